"""Distance-based reference estimators of local intrinsic dimensionality.

These are the standard expansion-rate estimators used for comparison:
the Hill maximum-likelihood estimator, a first-moment method-of-moments
estimator, and the generalized expansion dimension. All three consume
only neighbor distances, and only through ratios, so they are invariant
under rescaling of the data.
"""

from __future__ import annotations

import numpy as np

from .core import (
    DEGENERATE_ZERO_DENOMINATOR,
    IdEstimate,
    InsufficientNeighborsError,
)
from .neighbors import NeighborList

__all__ = ["mle_hill", "mom", "ged"]


def mle_hill(nl: NeighborList) -> IdEstimate:
    """Hill/MLE estimate from the k-nearest-neighbor distance profile.

    value = -((1/(k-1)) * sum_{i<k} ln(d_i / d_k))**-1. When all distances
    are equal the log-sum is zero and the infinite estimate is reported as
    k with a degeneracy flag.
    """
    k = nl.k
    if k < 2:
        raise InsufficientNeighborsError(2, k)
    d = nl.distances
    log_sum = float(np.log(d[:-1] / d[-1]).sum())
    if log_sum == 0.0:
        return IdEstimate("mle", float(k), k, frozenset({DEGENERATE_ZERO_DENOMINATOR}))
    return IdEstimate("mle", -(k - 1) / log_sum, k)


def mom(nl: NeighborList) -> IdEstimate:
    """First-moment method-of-moments estimate: m / (w - m).

    m is the mean neighbor distance and w = d_k the neighborhood radius.
    For distances following an exact power law d_i = (i/k)**(1/m0) this
    converges to m0 as k grows. All distances equal means w == m and the
    infinite estimate is reported as k with a degeneracy flag.
    """
    k = nl.k
    if k < 2:
        raise InsufficientNeighborsError(2, k)
    d = nl.distances
    w = float(d[-1])
    m = float(d.mean())
    if w == m:
        return IdEstimate("mom", float(k), k, frozenset({DEGENERATE_ZERO_DENOMINATOR}))
    return IdEstimate("mom", m / (w - m), k)


def ged(nl: NeighborList, pair: tuple[int, int] | None = None) -> IdEstimate:
    """Generalized expansion dimension from two neighbor counts.

    value = ln(k2/k1) / ln(d_k2/d_k1), i.e. the growth exponent of the
    neighbor count with the radius. The default pair is (ceil(k/2), k),
    a stable deterministic split; any 1-based pair k1 < k2 <= k can be
    passed instead. Equal radii at both counts degenerate to k.
    """
    k = nl.k
    if k < 4:
        raise InsufficientNeighborsError(4, k)
    if pair is None:
        k1, k2 = (k + 1) // 2, k
    else:
        k1, k2 = pair
    if not (1 <= k1 < k2 <= k):
        raise ValueError(f"need 1 <= k1 < k2 <= {k}, got ({k1}, {k2})")
    d1 = float(nl.distances[k1 - 1])
    d2 = float(nl.distances[k2 - 1])
    if d1 == d2:
        return IdEstimate("ged", float(k), k, frozenset({DEGENERATE_ZERO_DENOMINATOR}))
    return IdEstimate("ged", float(np.log(k2 / k1) / np.log(d2 / d1)), k)
