"""Corpus preparation and multilingual mixing for English-Inuktitut NMT."""

import json as _json

from ._core import (
    DEFAULT_BPE_MARKER,
    BpeModel,
    __version__,
    apply_bpe,
    build_vocab,
    clean_corpus,
    corpus_bleu,
    deromanize,
    detokenize,
    learn_bpe,
    romanize,
    tokenize_13a,
)
from ._core import default_config as _default_config
from ._core import run_pipeline as _run_pipeline


def run_pipeline(config_path):
    """Run the full pipeline; returns the manifest as a dict."""
    return _json.loads(_run_pipeline(str(config_path)))


def default_config():
    """Default pipeline config as a dict."""
    return _json.loads(_default_config())


__all__ = [
    "DEFAULT_BPE_MARKER",
    "BpeModel",
    "__version__",
    "apply_bpe",
    "build_vocab",
    "clean_corpus",
    "corpus_bleu",
    "default_config",
    "deromanize",
    "detokenize",
    "learn_bpe",
    "romanize",
    "run_pipeline",
    "tokenize_13a",
]
