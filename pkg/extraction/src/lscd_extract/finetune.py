"""Masked-language-model fine-tuning on a diachronic corpus, so the model
adapts to the domain before usage matrices are extracted."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import torch

from .conllu import Sentence

log = logging.getLogger(__name__)

DEFAULT_MAX_LENGTH = 256
DEFAULT_BATCH_SIZE = 16


def add_vocabulary(tokenizer, model, forms: Sequence[str]) -> int:
    """Register surface forms the tokenizer does not know as whole tokens and
    grow the embedding matrix accordingly. Returns the number added."""
    known = tokenizer.get_vocab()
    missing = sorted(set(forms) - set(known))
    if not missing:
        return 0
    added = tokenizer.add_tokens(missing)
    if added:
        model.resize_token_embeddings(len(tokenizer))
        log.info("added %d surface forms to the vocabulary", added)
    return added


def finetune(
    sentences: Sequence[Sentence],
    model_path: str,
    out_dir: str | Path,
    epochs: int,
    max_length: int = DEFAULT_MAX_LENGTH,
    batch_size: int = DEFAULT_BATCH_SIZE,
    learning_rate: float = 5e-5,
    mask_probability: float = 0.15,
    seed: int = 0,
    added_vocabulary: Sequence[str] = (),
) -> Path:
    """Fine-tune with the standard masked-token objective and save the
    adapted model (plus tokenizer) to ``out_dir``.

    ``epochs == 0`` is a no-op passthrough: the source model is saved
    unchanged, so downstream extraction works identically either way.
    """
    from transformers import (
        AutoModelForMaskedLM,
        AutoTokenizer,
        DataCollatorForLanguageModeling,
    )

    if epochs < 0:
        raise ValueError("epochs must be nonnegative")
    out_dir = Path(out_dir)
    tokenizer = AutoTokenizer.from_pretrained(model_path)
    model = AutoModelForMaskedLM.from_pretrained(model_path)
    if added_vocabulary:
        add_vocabulary(tokenizer, model, added_vocabulary)

    if epochs > 0:
        texts = [[word.form for word in sentence] for sentence in sentences]
        if not texts:
            raise ValueError("no sentences to fine-tune on")
        encoded = tokenizer(
            texts,
            is_split_into_words=True,
            truncation=True,
            max_length=max_length,
        )
        examples = [
            {"input_ids": ids, "attention_mask": mask}
            for ids, mask in zip(encoded["input_ids"], encoded["attention_mask"])
        ]
        collator = DataCollatorForLanguageModeling(
            tokenizer=tokenizer, mlm=True, mlm_probability=mask_probability
        )
        generator = torch.Generator().manual_seed(seed)
        loader = torch.utils.data.DataLoader(
            examples,
            batch_size=batch_size,
            shuffle=True,
            generator=generator,
            collate_fn=collator,
        )
        torch.manual_seed(seed)
        optimizer = torch.optim.AdamW(model.parameters(), lr=learning_rate)
        model.train()
        for epoch in range(epochs):
            total_loss = 0.0
            for batch in loader:
                optimizer.zero_grad()
                loss = model(**batch).loss
                loss.backward()
                optimizer.step()
                total_loss += float(loss.detach())
            log.info("epoch %d/%d: mean loss %.4f",
                     epoch + 1, epochs, total_loss / max(len(loader), 1))
        model.eval()

    out_dir.mkdir(parents=True, exist_ok=True)
    tokenizer.save_pretrained(out_dir)
    model.save_pretrained(out_dir)
    return out_dir
