import pytest
import torch

FILLERS = [
    "the", "a", "old", "grey", "stone", "river", "house", "cloud",
    "road", "lamp", "garden", "winter", "morning", "walks", "stands",
    "near", "under", "over", "beside", "quiet",
]

# Targets are absent from the tokenizer's training text, so their forms
# split into sub-tokens (which the sub-token averaging tests rely on).
TARGETS = {
    "blicket": ["blicket", "blickets", "blicketed"],
    "wug": ["wug", "wugs", "wugged"],
}

ACCEPTANCE_RESULTS: dict[str, str] = {}


def record_criterion(name: str, passed: bool) -> None:
    ACCEPTANCE_RESULTS[name] = "PASS" if passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{ACCEPTANCE_RESULTS[name]}  {name}")


def conllu_sentence(forms, lemmas, sent_id):
    lines = [f"# sent_id = {sent_id}"]
    for index, (form, lemma) in enumerate(zip(forms, lemmas), start=1):
        upos = "VERB" if lemma in TARGETS else "NOUN"
        lines.append(
            f"{index}\t{form}\t{lemma}\t{upos}\t_\t_\t0\tdep\t_\t_"
        )
    lines.append("")
    return "\n".join(lines) + "\n"


def build_fixture_corpus(path, n_sentences=100, max_len_for_truncation=24):
    """~100 sentences mixing fillers with inflected target occurrences; the
    final sentence is long enough that a trailing target gets truncated away
    at small context lengths."""
    import numpy as np

    rng = np.random.default_rng(17)
    blocks = []
    for index in range(n_sentences - 1):
        forms = list(rng.choice(FILLERS, size=5))
        lemmas = list(forms)
        if index % 3 != 2:  # two of three sentences contain a target
            lemma = "blicket" if index % 2 == 0 else "wug"
            form = TARGETS[lemma][index % len(TARGETS[lemma])]
            position = int(rng.integers(0, len(forms) + 1))
            forms.insert(position, form)
            lemmas.insert(position, lemma)
        blocks.append(conllu_sentence(forms, lemmas, index))
    long_forms = list(rng.choice(FILLERS, size=max_len_for_truncation * 3))
    long_lemmas = list(long_forms)
    long_forms.append("wugged")
    long_lemmas.append("wug")
    blocks.append(conllu_sentence(long_forms, long_lemmas, n_sentences - 1))
    path.write_text("".join(blocks), encoding="utf-8")


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A small pretrained-format model: BPE tokenizer trained on the filler
    vocabulary plus a compact RoBERTa-architecture encoder, saved to disk and
    loadable through the standard pretrained-model path."""
    from tokenizers import Tokenizer, models, pre_tokenizers, processors, trainers
    from transformers import PreTrainedTokenizerFast, RobertaConfig, RobertaForMaskedLM

    directory = tmp_path_factory.mktemp("tiny_model")
    training_text = [" ".join(FILLERS)] * 50

    tokenizer = Tokenizer(models.BPE(unk_token="<unk>"))
    tokenizer.pre_tokenizer = pre_tokenizers.Whitespace()
    trainer = trainers.BpeTrainer(
        vocab_size=200, special_tokens=["<s>", "<pad>", "</s>", "<unk>", "<mask>"]
    )
    tokenizer.train_from_iterator(training_text, trainer)
    tokenizer.post_processor = processors.RobertaProcessing(
        sep=("</s>", tokenizer.token_to_id("</s>")),
        cls=("<s>", tokenizer.token_to_id("<s>")),
    )
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        model_max_length=64,
        bos_token="<s>", eos_token="</s>", unk_token="<unk>",
        pad_token="<pad>", mask_token="<mask>", cls_token="<s>", sep_token="</s>",
    )
    config = RobertaConfig(
        vocab_size=len(fast),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64 + 2,
        pad_token_id=fast.pad_token_id,
        bos_token_id=fast.bos_token_id,
        eos_token_id=fast.eos_token_id,
    )
    torch.manual_seed(7)
    model = RobertaForMaskedLM(config)
    model.eval()
    fast.save_pretrained(directory)
    model.save_pretrained(directory)
    return directory


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "corpus.conllu"
    build_fixture_corpus(path)
    return path
