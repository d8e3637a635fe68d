"""Connectivity reliability of Erdős–Rényi random graphs.

``reliability_connected(n, x)`` is the probability that G(n, x) is
connected, computed by the classic component-counting recursion

    A_n(x) = 1 - sum_{s=1}^{n-1} C(n-1, s-1) A_s(x) (1-x)^(s(n-s))

(condition on the size s of the component containing a fixed node).
``two_terminal(n, x)`` is the probability that two distinct randomly
chosen nodes of G(n, x) are connected.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from ._kernels import reliability_vector

EXACT_LIMIT = 400  # beyond this the recursion's tail approximation kicks in


class ReliabilityTable:
    """Memo of A_n(x) vectors keyed by x.

    Lookups extend the memoized vector as needed.  Plain dict operations
    are atomic under the GIL, so concurrent readers are safe; a stale
    miss only costs a recomputation.
    """

    def __init__(self):
        self._table: dict[float, np.ndarray] = {}

    def connected_vector(self, n: int, x: float) -> np.ndarray:
        key = float(x)
        vec = self._table.get(key)
        if vec is None or vec.shape[0] < n + 1:
            vec = reliability_vector(n, key)
            self._table[key] = vec
        return vec

    @property
    def max_n(self) -> int:
        return max((v.shape[0] - 1 for v in self._table.values()), default=0)


_TABLE = ReliabilityTable()


def _validate_prob(x: float, name: str = "x") -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def reliability_connected(n: int, x: float) -> float:
    """Probability that G(n, x) is connected.

    Uses direct products up to n = 30 and log-space evaluation of the
    binomials and (1-x)^(s(n-s)) factors above that.  For n > 400 the
    isolated-node tail approximation 1 - n(1-x)^(n-1) is substituted
    (and flagged with a RuntimeWarning).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    _validate_prob(x)
    if n > EXACT_LIMIT:
        warnings.warn(
            f"reliability_connected(n={n}): using the isolated-node tail "
            f"approximation above n={EXACT_LIMIT}",
            RuntimeWarning,
            stacklevel=2,
        )
    return float(_TABLE.connected_vector(n, x)[n])


def two_terminal(n: int, x: float) -> float:
    """Probability that two distinct random nodes of G(n, x) are connected.

    Conditions on the size s of the first terminal's component; the
    second terminal lies outside it with probability (n-s)/(n-1).
    """
    if n < 2:
        raise ValueError("two_terminal needs n >= 2")
    _validate_prob(x)
    a = _TABLE.connected_vector(n - 1, x)
    if n <= 30:
        acc = 0.0
        c = 1.0  # C(n-1, s-1)
        for s in range(1, n):
            if a[s] > 0.0 and x < 1.0:
                acc += c * a[s] * (1.0 - x) ** (s * (n - s)) * (n - s) / (n - 1)
            c = c * (n - s) / s
        return min(1.0, max(0.0, 1.0 - acc))
    l1mx = math.log1p(-x) if x < 1.0 else -math.inf
    lgn = math.lgamma(n)  # C(n-1, s-1) = Gamma(n) / (Gamma(s) Gamma(n-s+1))
    terms = []
    for s in range(1, n):
        if a[s] <= 0.0 or x >= 1.0:
            continue
        lc = lgn - math.lgamma(s) - math.lgamma(n - s + 1)
        terms.append(
            math.exp(lc + math.log(a[s]) + s * (n - s) * l1mx + math.log((n - s) / (n - 1)))
        )
    return min(1.0, max(0.0, 1.0 - math.fsum(terms)))


def partition_identity_gap(n: int, x: float) -> float:
    """|1 - sum_s C(n-1,s-1) A_s(x) (1-x)^(s(n-s))| including s = n.

    The component of a fixed node has *some* size, so the sum over all
    component sizes must be exactly one; useful as a numerical check.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    _validate_prob(x)
    a = _TABLE.connected_vector(n, x)
    acc = 0.0
    c = 1.0  # C(n-1, s-1)
    for s in range(1, n + 1):
        term = c * a[s]
        if x < 1.0:
            term *= (1.0 - x) ** (s * (n - s))
        elif s != n:
            term = 0.0
        acc += term
        c = c * (n - s) / s if s < n else c
    return abs(1.0 - acc)
