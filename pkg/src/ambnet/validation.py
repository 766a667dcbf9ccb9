"""Input validation helpers shared by the functional core and the estimators."""

from __future__ import annotations

import numpy as np


def validate_adjacency(mat) -> np.ndarray:
    """Coerce *mat* to a read-only boolean adjacency matrix.

    Requires a square, symmetric, zero-diagonal 2-D array. Returns a fresh
    boolean copy with the writeable flag cleared.
    """
    adj = np.asarray(mat)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValueError(f"adjacency must be a square 2-D array, got shape {adj.shape}")
    if adj.shape[0] == 0:
        raise ValueError("graph must have at least one vertex")
    if adj.dtype != bool and not np.isin(adj, (0, 1)).all():
        raise ValueError("adjacency entries must be boolean or 0/1")
    adj = adj.astype(bool)
    if not np.array_equal(adj, adj.T):
        raise ValueError("adjacency must be symmetric")
    if adj.diagonal().any():
        raise ValueError("adjacency must have an empty diagonal (no self-loops)")
    adj.flags.writeable = False
    return adj


def validate_vertex_order(perm, n: int) -> np.ndarray:
    """Check that *perm* is a permutation of 0..n-1 and return it as intp."""
    order = np.asarray(perm)
    if order.shape != (n,):
        raise ValueError(f"vertex order must have length {n}, got shape {order.shape}")
    if not np.issubdtype(order.dtype, np.integer):
        raise ValueError("vertex order must be integer-valued")
    order = order.astype(np.intp)
    if not np.array_equal(np.sort(order), np.arange(n)):
        raise ValueError("vertex order must be a permutation of 0..n-1")
    return order


def validate_image_batch(X, side: int | None = None) -> np.ndarray:
    """Validate a stack of square binary images, returned as float64 in {0, 1}.

    Accepts shape (n_samples, s, s); values must be 0/1 (bool or numeric).
    """
    arr = np.asarray(X)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(
            f"expected a (n_samples, side, side) image batch, got shape {arr.shape}"
        )
    if side is not None and arr.shape[1] != side:
        raise ValueError(f"expected images of side {side}, got {arr.shape[1]}")
    arr = arr.astype(np.float64)
    if not np.isin(arr, (0.0, 1.0)).all():
        raise ValueError("image pixels must be binary (0 or 1)")
    return arr


def validate_seed(seed) -> int:
    """Check that *seed* is an integer fitting in unsigned 64 bits."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    value = int(seed)
    if not 0 <= value < 2**64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return value
