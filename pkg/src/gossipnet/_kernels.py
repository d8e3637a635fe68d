"""Numerical kernels behind the percolation engines.

Two interchangeable backends provide every function below:

* ``numba``: scalar inner loops JIT-compiled with ``@njit`` (the default
  whenever numba imports cleanly).
* ``numpy``: vectorized fallback, selected by setting the environment
  variable ``GOSSIPNET_NO_NUMBA=1`` before import.  Full-graph
  connectivity falls back to ``scipy.sparse.csgraph``.

All Monte-Carlo randomness is counter-based: every uniform variate is a
pure function of ``(seed, trial, index)``.  Consequently the two
backends return bit-identical trial counts, and results do not depend
on execution order (sequential, chunked, or threaded).

``benchmarks/bench_kernels.py`` times one backend against the other.
"""

from __future__ import annotations

import math
import os

import numpy as np

_MASK64 = (1 << 64) - 1
MASK63 = (1 << 63) - 1  # kernel seed arguments must fit in int64
_C_TRIAL = 0x9E3779B97F4A7C15
_C_INDEX = 0xD1B54A32D192ED03
_M1 = 0xFF51AFD7ED558CCD
_M2 = 0xC4CEB9FE1A85EC53
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

_DISABLED = os.environ.get("GOSSIPNET_NO_NUMBA", "").lower() in ("1", "true", "yes")

if not _DISABLED:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def mix64(z: int) -> int:
    """64-bit avalanche mix (murmur3 finalizer) on a Python int."""
    z &= _MASK64
    z ^= z >> 33
    z = (z * _M1) & _MASK64
    z ^= z >> 33
    z = (z * _M2) & _MASK64
    z ^= z >> 33
    return z


def derive_seed(base: int, *tags: int) -> int:
    """Derive an independent stream seed from a base seed and tags.

    Pure function of its arguments; used to hand out per-edge, per-node
    and per-grid-point streams so that parallel and sequential execution
    see identical randomness.  Results fit in an int64 so they can cross
    the kernel boundary unchanged.
    """
    s = mix64(base & _MASK64)
    for t in tags:
        s = mix64(s ^ ((t * _C_TRIAL) & _MASK64))
    return s & MASK63


def u01_scalar(seed: int, trial: int, idx: int) -> float:
    """Reference counter-based uniform in [0, 1). Matches both backends."""
    h = mix64((seed & _MASK64) ^ ((trial * _C_TRIAL) & _MASK64))
    h = mix64(h ^ ((idx * _C_INDEX) & _MASK64))
    return (h >> 11) * _INV53


def _u01_vec(seed: int, trial: int, idx: np.ndarray) -> np.ndarray:
    """Vectorized counter-based uniforms for one trial (numpy backend)."""
    h0 = np.uint64(mix64((seed & _MASK64) ^ ((trial * _C_TRIAL) & _MASK64)))
    z = h0 ^ (idx.astype(np.uint64) * np.uint64(_C_INDEX))
    z ^= z >> np.uint64(33)
    z *= np.uint64(_M1)
    z ^= z >> np.uint64(33)
    z *= np.uint64(_M2)
    z ^= z >> np.uint64(33)
    return (z >> np.uint64(11)) * _INV53


def edge_endpoints(indptr, indices, eids, ne):
    """Recover (eu, ev) with eu < ev from a CSR graph with edge ids."""
    n = indptr.shape[0] - 1
    u = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    mask = u < indices
    eu = np.empty(ne, dtype=np.int64)
    ev = np.empty(ne, dtype=np.int64)
    eu[eids[mask]] = u[mask]
    ev[eids[mask]] = indices[mask]
    return eu, ev


# ---------------------------------------------------------------------------
# Connectivity probability of G(n, x) and the two-rate percolation sum.
# One source implementation, shared by both backends (JIT-compiled as-is).
# ---------------------------------------------------------------------------

def _reliability_vector_py(n, x):
    # a[t] = probability G(t, x) is connected, t = 1..n (a[0] unused).
    # Component-counting recursion; direct products up to t=30, log-space
    # binomials above, isolated-node tail approximation above t=400.
    a = np.zeros(n + 1)
    a[0] = 1.0
    if n >= 1:
        a[1] = 1.0
    l1mx = math.log1p(-x) if x < 1.0 else -math.inf
    for t in range(2, n + 1):
        if t > 400:
            tail = t * math.exp((t - 1) * l1mx) if x < 1.0 else 0.0
            a[t] = 1.0 - tail if tail < 1.0 else 0.0
            continue
        acc = 0.0
        if t <= 30:
            c = 1.0  # C(t-1, s-1)
            for s in range(1, t):
                if a[s] > 0.0 and x < 1.0:
                    acc += c * a[s] * (1.0 - x) ** (s * (t - s))
                c = c * (t - s) / s
        else:
            # C(t-1, s-1) = Gamma(t) / (Gamma(s) Gamma(t-s+1))
            lgt = math.lgamma(t)
            for s in range(1, t):
                if a[s] > 0.0 and x < 1.0:
                    lc = lgt - math.lgamma(s) - math.lgamma(t - s + 1)
                    acc += math.exp(lc + math.log(a[s]) + (s * (t - s)) * l1mx)
        v = 1.0 - acc
        if v < 0.0:
            v = 0.0
        elif v > 1.0:
            v = 1.0
        a[t] = v
    return a


def _percolation_prob_py(n, p1, p2):
    # Probability that a marked outside node, tied to each of the n nodes
    # of G(n, p2) independently with probability p1, connects to a random
    # one of them.  n = 0 means there is nobody to reach.
    if n <= 0:
        return 0.0
    a = _RELIABILITY_VECTOR(n, p2)
    acc = 0.0
    if n <= 30:
        c = 1.0  # C(n, kp)
        for kp in range(1, n + 1):
            c = c * (n - kp + 1) / kp
            if a[kp] <= 0.0:
                continue
            term = c * a[kp] * (kp / n) * (1.0 - p1) ** kp
            if p2 < 1.0:
                term *= (1.0 - p2) ** (kp * (n - kp))
            elif kp != n:
                term = 0.0
            acc += term
    else:
        lgn1 = math.lgamma(n + 1)
        l1mp2 = math.log1p(-p2) if p2 < 1.0 else -math.inf
        l1mp1 = math.log1p(-p1) if p1 < 1.0 else -math.inf
        for kp in range(1, n + 1):
            if a[kp] <= 0.0 or p1 >= 1.0:
                continue
            if p2 >= 1.0 and kp != n:
                continue
            lc = lgn1 - math.lgamma(kp + 1) - math.lgamma(n - kp + 1)
            le = (kp * (n - kp)) * l1mp2 if kp != n else 0.0
            acc += math.exp(
                lc + math.log(a[kp]) + le + kp * l1mp1 + math.log(kp / n)
            )
    p = 1.0 - acc
    if p < 0.0:
        p = 0.0
    elif p > 1.0:
        p = 1.0
    return p


def _attachment_weights_py(k_arr, e_arr, m_arr, p):
    # Expected-audience weight of one hypothetical edge per candidate:
    # k = candidate degree after insertion, e = induced edge count among
    # the candidate's previous neighbors, m = shared neighbors.
    nc = k_arr.shape[0]
    w = np.empty(nc)
    for c in range(nc):
        k = k_arr[c]
        m = m_arr[c]
        if m <= 0 or k < 2:
            w[c] = 0.0
            continue
        p1 = p * m / (k - 1.0)
        if k <= 2:
            p2 = 0.0
        else:
            p2 = p * e_arr[c] / ((k - 1.0) * (k - 2.0) / 2.0)
        w[c] = (k - 1.0) * _PERCOLATION_PROB(k - 1, p1, p2)
    return w


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    # compile bottom-up so the globals the callees resolve to are Dispatchers
    _RELIABILITY_VECTOR = njit(cache=True, nogil=True)(_reliability_vector_py)
    percolation_prob = njit(cache=True, nogil=True)(_percolation_prob_py)
    _PERCOLATION_PROB = percolation_prob
    attachment_weights = njit(cache=True, nogil=True)(_attachment_weights_py)
    reliability_vector = _RELIABILITY_VECTOR

    @njit(cache=True, nogil=True, inline="always")
    def _trial_hash(seed, trial):
        h = np.uint64(seed) ^ (np.uint64(trial) * np.uint64(_C_TRIAL))
        h ^= h >> np.uint64(33)
        h *= np.uint64(_M1)
        h ^= h >> np.uint64(33)
        h *= np.uint64(_M2)
        h ^= h >> np.uint64(33)
        return h

    @njit(cache=True, nogil=True, inline="always")
    def _u01(ht, idx):
        h = ht ^ (np.uint64(idx) * np.uint64(_C_INDEX))
        h ^= h >> np.uint64(33)
        h *= np.uint64(_M1)
        h ^= h >> np.uint64(33)
        h *= np.uint64(_M2)
        h ^= h >> np.uint64(33)
        return (h >> np.uint64(11)) * _INV53

    @njit(cache=True, nogil=True)
    def exact_audience(eu, ev, n_nodes, src, p):
        ne = eu.shape[0]
        if ne == 0:
            return 0.0
        w = np.empty(ne + 1)
        for c in range(ne + 1):
            w[c] = p ** c * (1.0 - p) ** (ne - c)
        # per-node bitmask of incident edge ids (ne <= 24 fits easily)
        emask = np.zeros(n_nodes, dtype=np.int64)
        for e in range(ne):
            emask[eu[e]] |= 1 << e
            emask[ev[e]] |= 1 << e
        visited = np.zeros(n_nodes, dtype=np.bool_)
        stack = np.empty(n_nodes, dtype=np.int64)
        total = 0.0
        for mask in range(1 << ne):
            m = mask
            c = 0
            while m:
                m &= m - 1
                c += 1
            for v in range(n_nodes):
                visited[v] = False
            visited[src] = True
            stack[0] = src
            sp = 1
            reached = 0
            while sp > 0:
                sp -= 1
                u = stack[sp]
                act = emask[u] & mask
                while act:
                    lsb = act & (-act)
                    e = int(round(math.log2(lsb)))
                    act ^= lsb
                    v = eu[e] + ev[e] - u
                    if not visited[v]:
                        visited[v] = True
                        reached += 1
                        stack[sp] = v
                        sp += 1
            total += w[c] * reached
        return total

    @njit(cache=True, nogil=True)
    def mc_audience(indptr, indices, eids, ne, src, p, trials, seed):
        n = indptr.shape[0] - 1
        visited = np.zeros(n, dtype=np.bool_)
        stack = np.empty(n, dtype=np.int64)
        active = np.zeros(ne, dtype=np.bool_)
        s = 0
        s2 = 0
        for t in range(trials):
            ht = _trial_hash(seed, t)
            for e in range(ne):
                active[e] = _u01(ht, e) < p
            for v in range(n):
                visited[v] = False
            visited[src] = True
            stack[0] = src
            sp = 1
            cnt = 0
            while sp > 0:
                sp -= 1
                u = stack[sp]
                for pos in range(indptr[u], indptr[u + 1]):
                    if active[eids[pos]]:
                        v = indices[pos]
                        if not visited[v]:
                            visited[v] = True
                            cnt += 1
                            stack[sp] = v
                            sp += 1
            s += cnt
            s2 += cnt * cnt
        return s, s2

    @njit(cache=True, nogil=True)
    def mc_observed_audience(indptr, indices, eids, ne, p, q, trials, seed):
        n = indptr.shape[0] - 1
        visited = np.zeros(n, dtype=np.bool_)
        stack = np.empty(n, dtype=np.int64)
        active = np.zeros(ne, dtype=np.bool_)
        s = 0
        s2 = 0
        for t in range(trials):
            ht = _trial_hash(seed, t)
            for e in range(ne):
                active[e] = _u01(ht, e) < p
            # observers seed the spread; their uniforms sit after the edges
            for v in range(n):
                visited[v] = False
            sp = 0
            for v in range(n):
                if _u01(ht, ne + v) < q:
                    visited[v] = True
                    stack[sp] = v
                    sp += 1
            while sp > 0:
                sp -= 1
                u = stack[sp]
                for pos in range(indptr[u], indptr[u + 1]):
                    if active[eids[pos]]:
                        v2 = indices[pos]
                        if not visited[v2]:
                            visited[v2] = True
                            stack[sp] = v2
                            sp += 1
            cnt = 0
            for v in range(n):
                if visited[v]:
                    cnt += 1
            s += cnt
            s2 += cnt * cnt
        return s, s2

    @njit(cache=True, nogil=True)
    def mc_graph_audience(indptr, indices, eids, pe, src, targets, trials, seed):
        # Edge e transmits iff u01(seed, t, e) < pe[e]; evaluated lazily
        # during the BFS (a pure function, so repeat visits agree).
        n = indptr.shape[0] - 1
        visited = np.zeros(n, dtype=np.bool_)
        stack = np.empty(n, dtype=np.int64)
        s = 0
        s2 = 0
        for t in range(trials):
            ht = _trial_hash(seed, t)
            for v in range(n):
                visited[v] = False
            visited[src] = True
            stack[0] = src
            sp = 1
            while sp > 0:
                sp -= 1
                u = stack[sp]
                for pos in range(indptr[u], indptr[u + 1]):
                    v = indices[pos]
                    if visited[v]:
                        continue
                    e = eids[pos]
                    if pe[e] > 0.0 and _u01(ht, e) < pe[e]:
                        visited[v] = True
                        stack[sp] = v
                        sp += 1
            cnt = 0
            for v in range(n):
                if visited[v] and targets[v]:
                    cnt += 1
            s += cnt
            s2 += cnt * cnt
        return s, s2

    @njit(cache=True, nogil=True)
    def pair_connect_count(indptr, indices, eids, ne, pu, pv, r, trials, seed):
        n = indptr.shape[0] - 1
        labels = np.empty(n, dtype=np.int64)
        stack = np.empty(n, dtype=np.int64)
        active = np.zeros(ne, dtype=np.bool_)
        hits = 0
        for t in range(trials):
            ht = _trial_hash(seed, t)
            for e in range(ne):
                active[e] = _u01(ht, e) < r
            for v in range(n):
                labels[v] = -1
            lab = 0
            for root in range(n):
                if labels[root] >= 0:
                    continue
                labels[root] = lab
                stack[0] = root
                sp = 1
                while sp > 0:
                    sp -= 1
                    u = stack[sp]
                    for pos in range(indptr[u], indptr[u + 1]):
                        if active[eids[pos]]:
                            v = indices[pos]
                            if labels[v] < 0:
                                labels[v] = lab
                                stack[sp] = v
                                sp += 1
                lab += 1
            for k in range(pu.shape[0]):
                if labels[pu[k]] == labels[pv[k]]:
                    hits += 1
        return hits

    @njit(cache=True, nogil=True)
    def source_distance_sums(indptr, indices, sources):
        # Per source: (sum of BFS distances to reached nodes, reached count
        # excluding the source itself).
        n = indptr.shape[0] - 1
        ns = sources.shape[0]
        sums = np.zeros(ns, dtype=np.int64)
        cnts = np.zeros(ns, dtype=np.int64)
        dist = np.empty(n, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        for k in range(ns):
            src = sources[k]
            for v in range(n):
                dist[v] = -1
            dist[src] = 0
            queue[0] = src
            head = 0
            tail = 1
            total = 0
            cnt = 0
            while head < tail:
                u = queue[head]
                head += 1
                for pos in range(indptr[u], indptr[u + 1]):
                    v = indices[pos]
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        total += dist[v]
                        cnt += 1
                        queue[tail] = v
                        tail += 1
            sums[k] = total
            cnts[k] = cnt
        return sums, cnts

    @njit(cache=True, nogil=True)
    def component_labels(indptr, indices):
        n = indptr.shape[0] - 1
        labels = np.full(n, -1, dtype=np.int64)
        stack = np.empty(n, dtype=np.int64)
        lab = 0
        for root in range(n):
            if labels[root] >= 0:
                continue
            labels[root] = lab
            stack[0] = root
            sp = 1
            while sp > 0:
                sp -= 1
                u = stack[sp]
                for pos in range(indptr[u], indptr[u + 1]):
                    v = indices[pos]
                    if labels[v] < 0:
                        labels[v] = lab
                        stack[sp] = v
                        sp += 1
            lab += 1
        return labels


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

else:
    from scipy.sparse import csr_array
    from scipy.sparse.csgraph import connected_components as _scipy_cc
    from scipy.sparse.csgraph import shortest_path as _scipy_sp

    _RELIABILITY_VECTOR = _reliability_vector_py
    _PERCOLATION_PROB = _percolation_prob_py
    reliability_vector = _reliability_vector_py
    percolation_prob = _percolation_prob_py
    attachment_weights = _attachment_weights_py

    def _spread(active, eu, ev, reach):
        # Propagate reach masks (chunk, n) to a fixed point over active
        # edges (chunk, ne).  Edge loop is Python; chunk axis is vectorized.
        while True:
            changed = False
            for e in range(eu.shape[0]):
                a = active[:, e]
                u, v = eu[e], ev[e]
                new_v = reach[:, u] & a & ~reach[:, v]
                if new_v.any():
                    reach[:, v] |= new_v
                    changed = True
                new_u = reach[:, v] & a & ~reach[:, u]
                if new_u.any():
                    reach[:, u] |= new_u
                    changed = True
            if not changed:
                return

    def exact_audience(eu, ev, n_nodes, src, p):
        ne = eu.shape[0]
        if ne == 0:
            return 0.0
        w = np.array([p ** c * (1.0 - p) ** (ne - c) for c in range(ne + 1)])
        total = 0.0
        chunk = 1 << min(ne, 12)
        for lo in range(0, 1 << ne, chunk):
            masks = np.arange(lo, lo + chunk, dtype=np.int64)
            active = (masks[:, None] >> np.arange(ne)) & 1 > 0
            reach = np.zeros((chunk, n_nodes), dtype=bool)
            reach[:, src] = True
            _spread(active, eu, ev, reach)
            counts = reach.sum(axis=1) - 1
            total += float(np.dot(w[active.sum(axis=1)], counts))
        return total

    def _uniform_block(seed, t0, nt, idx):
        return np.stack([_u01_vec(seed, t0 + t, idx) for t in range(nt)], axis=0)

    def mc_audience(indptr, indices, eids, ne, src, p, trials, seed):
        n = indptr.shape[0] - 1
        eu, ev = edge_endpoints(indptr, indices, eids, ne)
        idx = np.arange(ne, dtype=np.int64)
        s = 0
        s2 = 0
        chunk = 256
        for t0 in range(0, trials, chunk):
            nt = min(chunk, trials - t0)
            active = _uniform_block(seed, t0, nt, idx) < p
            reach = np.zeros((nt, n), dtype=bool)
            reach[:, src] = True
            _spread(active, eu, ev, reach)
            counts = reach.sum(axis=1).astype(np.int64) - 1
            s += int(counts.sum())
            s2 += int(np.dot(counts, counts))
        return s, s2

    def mc_observed_audience(indptr, indices, eids, ne, p, q, trials, seed):
        n = indptr.shape[0] - 1
        eu, ev = edge_endpoints(indptr, indices, eids, ne)
        eidx = np.arange(ne, dtype=np.int64)
        vidx = np.arange(ne, ne + n, dtype=np.int64)
        s = 0
        s2 = 0
        chunk = 256
        for t0 in range(0, trials, chunk):
            nt = min(chunk, trials - t0)
            active = _uniform_block(seed, t0, nt, eidx) < p
            reach = _uniform_block(seed, t0, nt, vidx) < q
            _spread(active, eu, ev, reach)
            counts = reach.sum(axis=1).astype(np.int64)
            s += int(counts.sum())
            s2 += int(np.dot(counts, counts))
        return s, s2

    def _active_labels(n, eu, ev, act):
        g = csr_array(
            (np.ones(int(act.sum()), dtype=np.int8), (eu[act], ev[act])),
            shape=(n, n),
        )
        return _scipy_cc(g, directed=False)[1]

    def mc_graph_audience(indptr, indices, eids, pe, src, targets, trials, seed):
        n = indptr.shape[0] - 1
        ne = pe.shape[0]
        eu, ev = edge_endpoints(indptr, indices, eids, ne)
        idx = np.arange(ne, dtype=np.int64)
        s = 0
        s2 = 0
        for t in range(trials):
            act = _u01_vec(seed, t, idx) < pe
            labels = _active_labels(n, eu, ev, act)
            cnt = int(np.count_nonzero((labels == labels[src]) & targets))
            s += cnt
            s2 += cnt * cnt
        return s, s2

    def pair_connect_count(indptr, indices, eids, ne, pu, pv, r, trials, seed):
        n = indptr.shape[0] - 1
        eu, ev = edge_endpoints(indptr, indices, eids, ne)
        idx = np.arange(ne, dtype=np.int64)
        hits = 0
        for t in range(trials):
            act = _u01_vec(seed, t, idx) < r
            labels = _active_labels(n, eu, ev, act)
            hits += int(np.count_nonzero(labels[pu] == labels[pv]))
        return hits

    def source_distance_sums(indptr, indices, sources):
        n = indptr.shape[0] - 1
        g = csr_array(
            (np.ones(indices.shape[0], dtype=np.int8), indices, indptr),
            shape=(n, n),
        )
        sums = np.zeros(sources.shape[0], dtype=np.int64)
        cnts = np.zeros(sources.shape[0], dtype=np.int64)
        chunk = 128
        for lo in range(0, sources.shape[0], chunk):
            sub = sources[lo : lo + chunk]
            d = _scipy_sp(g, method="D", unweighted=True, indices=sub)
            finite = np.isfinite(d)
            sums[lo : lo + chunk] = np.where(finite, d, 0.0).sum(axis=1).astype(np.int64)
            cnts[lo : lo + chunk] = finite.sum(axis=1) - 1
        return sums, cnts

    def component_labels(indptr, indices):
        n = indptr.shape[0] - 1
        g = csr_array(
            (np.ones(indices.shape[0], dtype=np.int8), indices, indptr),
            shape=(n, n),
        )
        return _scipy_cc(g, directed=False)[1].astype(np.int64)
