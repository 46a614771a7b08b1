"""Fair GAN training via transfer learning (fairTL / fairTL++).

Thin python layer over the C++ core: dataset construction with controlled
attribute bias, GAN pretraining and fairness adaptation, fairness/quality
metrics, and checkpoint IO.
"""

from fairtl._core import (
    Dataset,
    Gan,
    adapt,
    build_dataset,
    debias,
    evaluate,
    fd_from_counts,
    frechet_sq,
    gallery,
    load_checkpoint,
    pretrain,
    save_checkpoint,
)

__all__ = [
    "Dataset",
    "Gan",
    "adapt",
    "build_dataset",
    "debias",
    "evaluate",
    "fd_from_counts",
    "frechet_sq",
    "gallery",
    "load_checkpoint",
    "pretrain",
    "save_checkpoint",
]

__version__ = "0.1.0"
