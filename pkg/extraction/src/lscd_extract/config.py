"""Extraction and fine-tuning configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

# Fine-tuning epochs per language, scaled to the corpus sizes.
EPOCHS_BY_LANGUAGE = {
    "en": 5,
    "la": 5,
    "de": 3,
    "sw": 3,
    "ru": 2,
    "it": 2,
    "no": 2,
}


def epochs_for_language(code: str) -> int:
    try:
        return EPOCHS_BY_LANGUAGE[code.lower()]
    except KeyError:
        raise ValueError(
            f"no epoch setting for language {code!r}; "
            f"known: {', '.join(sorted(EPOCHS_BY_LANGUAGE))}"
        ) from None


@dataclass
class ExtractionConfig:
    """How to run the language model over target occurrences.

    ``layers`` selects hidden states to average: "all" means every
    transformer layer (the embedding output is excluded); an explicit list
    gives indices into the hidden-state stack, where 0 is the embedding
    output and 1..L the transformer layers.
    """

    model: str
    max_context_length: int = 256
    batch_size: int = 32
    layers: Union[str, Sequence[int]] = "all"
    added_vocabulary: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.max_context_length < 2:
            raise ValueError("max_context_length must be >= 2")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if isinstance(self.layers, str):
            if self.layers != "all":
                raise ValueError(f"layers must be 'all' or a list, got {self.layers!r}")
        else:
            self.layers = [int(layer) for layer in self.layers]
            if not self.layers:
                raise ValueError("layers list must be nonempty")
            if any(layer < 0 for layer in self.layers):
                raise ValueError("layer indices must be nonnegative")

    def layer_indices(self, n_hidden_states: int) -> list[int]:
        """Resolve against a model's hidden-state stack of size L + 1."""
        if self.layers == "all":
            return list(range(1, n_hidden_states))
        bad = [layer for layer in self.layers if layer >= n_hidden_states]
        if bad:
            raise ValueError(
                f"layer indices {bad} out of range for {n_hidden_states} hidden states"
            )
        return list(self.layers)
