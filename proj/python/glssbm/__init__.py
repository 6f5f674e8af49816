"""Latent space stochastic blockmodel for directed binary networks."""

from ._core import (
    InputError,
    adjusted_rand_index,
    classical_mds,
    edge_probability,
    fit,
    log_likelihood,
    roc_auc,
    simulate,
    waic,
)

__all__ = [
    "InputError",
    "adjusted_rand_index",
    "classical_mds",
    "edge_probability",
    "fit",
    "log_likelihood",
    "roc_auc",
    "simulate",
    "waic",
]
