"""Inductive structural graph embeddings."""

from ._igel import (
    EmbeddingMatrix,
    EncoderConfig,
    Graph,
    IgelError,
    Mode,
    Noise,
    Optimizer,
    UnsupConfig,
    WalkConfig,
    betweenness,
    centrality_correlations,
    clone_graph_with_bridge,
    embed_nodes,
    encode,
    encode_node,
    fit_config,
    generate_erdos_renyi,
    harmonic_closeness,
    kmeans,
    link_prediction,
    load_edge_list,
    micro_f1,
    modularity,
    pagerank,
    random_walks,
    roc_auc,
    select_k_by_modularity,
    spearman,
    split_edges,
    train_unsupervised,
    version,
)

__version__ = version()

__all__ = [name for name in dir() if not name.startswith("_")]
