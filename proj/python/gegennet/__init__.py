"""Gegenbauer graph filters and link sign prediction on signed bipartite graphs."""

from ._gegennet import (
    ConfigError,
    DataError,
    Graph,
    NumericalError,
    Split,
    classification_metrics,
    config_hash,
    filter_curve,
    gegenbauer_apply,
    gegenbauer_scalar,
    load_edge_list,
    normalized_adjacency,
    parse_config,
    parse_edge_list,
    planted_graph,
    roc_auc,
    run_experiment,
    selftest,
    spectral_features,
    split_edges,
    split_from_json,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Graph",
    "NumericalError",
    "Split",
    "classification_metrics",
    "config_hash",
    "filter_curve",
    "gegenbauer_apply",
    "gegenbauer_scalar",
    "load_edge_list",
    "normalized_adjacency",
    "parse_config",
    "parse_edge_list",
    "planted_graph",
    "roc_auc",
    "run_experiment",
    "selftest",
    "spectral_features",
    "split_edges",
    "split_from_json",
]
