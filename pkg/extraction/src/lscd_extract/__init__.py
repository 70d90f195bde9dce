"""Produce the scoring core's inputs: run a pretrained language model over
indexed target usages and write UMX1 usage matrices (with provenance
sidecars); optionally fine-tune the model on the diachronic corpus first."""

__version__ = "0.1.0"

from .config import EPOCHS_BY_LANGUAGE, ExtractionConfig, epochs_for_language
from .conllu import (
    Word,
    collect_surface_forms,
    index_usages,
    read_conllu,
    read_targets_tsv,
)
from .extract import ExtractionReport, LemmaReport, extract_usage_matrices, load_model
from .finetune import add_vocabulary, finetune
from .umx import read_umx, write_meta_sidecar, write_umx
