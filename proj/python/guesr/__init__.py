"""GUESR: global item-graph contrastive enhancement for sequential recommendation."""

from ._core import (
    Corpus,
    ItemGraph,
    ablate,
    build_girg,
    evaluate,
    full_rank,
    load_attributes,
    load_sequences,
    rank_metrics,
    sample_view,
    synth_corpus,
    train,
    window,
    write_corpus,
)

__all__ = [
    "Corpus",
    "ItemGraph",
    "ablate",
    "build_girg",
    "evaluate",
    "full_rank",
    "load_attributes",
    "load_sequences",
    "rank_metrics",
    "sample_view",
    "synth_corpus",
    "train",
    "window",
    "write_corpus",
]
