"""Corpus analytics for scholarly-metadata exports.

Ingest and deduplicate records, build co-authorship networks, weight terms
with tf-idf, cluster abstract embeddings and render the results as CSV and
SVG.
"""
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
__all__ = ["KERNEL_BACKEND", "__version__"]
