"""Dimension reduction and clustering for feature-space structure checks.

PCA/tSVD and exact t-SNE project stacked feature vectors to 2-D; K-means and
Fuzzy C-means group them; entropy-based external metrics and silhouette
sweeps score the groupings and find the natural cluster count.
"""
from .fcm import fuzzy_cmeans
from .kmeans import ClusterAssignment, kmeans
from .metrics import (
    asw_sweep,
    average_silhouette_width,
    external_metrics,
    silhouette,
    silhouette_samples,
)
from .reduce import Embedding, pca_reduce, tsvd_reduce
from .tsne import conditional_affinities, tsne_reduce

__all__ = [
    "Embedding",
    "pca_reduce",
    "tsvd_reduce",
    "tsne_reduce",
    "conditional_affinities",
    "ClusterAssignment",
    "kmeans",
    "fuzzy_cmeans",
    "external_metrics",
    "silhouette",
    "silhouette_samples",
    "average_silhouette_width",
    "asw_sweep",
]
