"""Run a pretrained masked language model over indexed target occurrences and
write one UMX1 usage matrix per target: each row is the layer-averaged hidden
state at the occurrence position (averaged over sub-tokens when the tokenizer
splits the surface form)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch

from .config import ExtractionConfig
from .conllu import Sentence
from .umx import write_meta_sidecar, write_umx

log = logging.getLogger(__name__)


@dataclass
class LemmaReport:
    lemma: str
    n_occurrences: int
    n_written: int
    n_skipped: int


@dataclass
class ExtractionReport:
    """Reconciliation record: for every lemma,
    n_written = n_occurrences - n_skipped (skips are truncation casualties)."""

    lemmas: dict[str, LemmaReport] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def reconciles(self) -> bool:
        return all(
            entry.n_written == entry.n_occurrences - entry.n_skipped
            for entry in self.lemmas.values()
        )

    def to_json_dict(self) -> dict:
        return {
            "lemmas": {
                lemma: {
                    "n_occurrences": entry.n_occurrences,
                    "n_written": entry.n_written,
                    "n_skipped": entry.n_skipped,
                }
                for lemma, entry in sorted(self.lemmas.items())
            },
            "warnings": self.warnings,
        }


def load_model(model_path: str):
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(model_path)
    model = AutoModel.from_pretrained(model_path)
    model.eval()
    return tokenizer, model


def _batches(items: Sequence, size: int):
    for start in range(0, len(items), size):
        yield items[start : start + size]


def extract_usage_matrices(
    sentences: Sequence[Sentence],
    occurrences: dict[str, list[tuple[int, int]]],
    config: ExtractionConfig,
    out_dir: str | Path,
    tokenizer=None,
    model=None,
) -> ExtractionReport:
    """Write `<lemma>.umx` (+ `.meta.jsonl` provenance) under ``out_dir`` for
    every lemma in ``occurrences``.

    Rows appear in occurrence order. An occurrence whose word falls beyond
    the truncated context window is skipped and counted in the report.
    """
    if tokenizer is None or model is None:
        tokenizer, model = load_model(config.model)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    by_sentence: dict[int, list[tuple[str, int]]] = {}
    for lemma, positions in occurrences.items():
        for sentence_index, word_index in positions:
            by_sentence.setdefault(sentence_index, []).append((lemma, word_index))
    for entries in by_sentence.values():
        entries.sort(key=lambda pair: pair[1])

    report = ExtractionReport(
        lemmas={
            lemma: LemmaReport(lemma, len(positions), 0, 0)
            for lemma, positions in occurrences.items()
        }
    )
    rows: dict[str, list[np.ndarray]] = {lemma: [] for lemma in occurrences}
    meta: dict[str, list[dict]] = {lemma: [] for lemma in occurrences}

    interesting = sorted(by_sentence)
    with torch.no_grad():
        for batch_indices in _batches(interesting, config.batch_size):
            batch_forms = [
                [word.form for word in sentences[index]] for index in batch_indices
            ]
            encoded = tokenizer(
                batch_forms,
                is_split_into_words=True,
                padding=True,
                truncation=True,
                max_length=config.max_context_length,
                return_tensors="pt",
            )
            output = model(**encoded, output_hidden_states=True)
            layer_indices = config.layer_indices(len(output.hidden_states))
            averaged = torch.stack(
                [output.hidden_states[layer] for layer in layer_indices]
            ).mean(dim=0)

            for row, sentence_index in enumerate(batch_indices):
                word_ids = encoded.word_ids(row)
                for lemma, word_index in by_sentence[sentence_index]:
                    positions = [
                        i for i, word_id in enumerate(word_ids) if word_id == word_index
                    ]
                    if not positions:
                        report.lemmas[lemma].n_skipped += 1
                        message = (
                            f"{lemma!r}: occurrence at sentence {sentence_index} "
                            f"position {word_index} beyond the {config.max_context_length}"
                            f"-token context window; skipped"
                        )
                        report.warnings.append(message)
                        log.warning("%s", message)
                        continue
                    vector = averaged[row, positions].mean(dim=0)
                    rows[lemma].append(vector.numpy().astype(np.float64))
                    meta[lemma].append(
                        {"sentence_index": sentence_index, "token_index": word_index}
                    )
                    report.lemmas[lemma].n_written += 1

    dim = int(model.config.hidden_size)
    for lemma in sorted(occurrences):
        stacked = (
            np.stack(rows[lemma]) if rows[lemma] else np.empty((0, dim), dtype=np.float64)
        )
        write_umx(out_dir / f"{lemma}.umx", stacked)
        write_meta_sidecar(out_dir / f"{lemma}.meta.jsonl", meta[lemma])
    return report
