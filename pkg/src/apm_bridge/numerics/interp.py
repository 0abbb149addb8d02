"""Polynomial interpolation in barycentric form."""

import numpy as np

from ..errors import DomainError


def barycentric_weights(nodes):
    nodes = np.asarray(nodes, dtype=float)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0):
        raise DomainError("interpolation nodes must be distinct")
    # scale by the node spread to keep the products away from overflow
    span = np.ptp(nodes) or 1.0
    return 1.0 / np.prod(diff / span, axis=1)


def lagrange_interp(nodes, values, x):
    """Evaluate the interpolating polynomial through (nodes, values) at x.

    Uses the second barycentric formula; exact at the nodes.
    """
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values)
    if nodes.ndim != 1 or nodes.shape != values.shape:
        raise DomainError("nodes and values must be 1-D arrays of equal length")
    if nodes.size == 0:
        raise DomainError("need at least one node")
    w = barycentric_weights(nodes)
    xx = np.atleast_1d(np.asarray(x, dtype=float))
    diff = xx[:, None] - nodes[None, :]
    hit = diff == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = w / diff
        out = (terms @ values) / terms.sum(axis=1)
    rows = hit.any(axis=1)
    if np.any(rows):
        out[rows] = values[np.argmax(hit[rows], axis=1)]
    return out.item() if np.ndim(x) == 0 else out
