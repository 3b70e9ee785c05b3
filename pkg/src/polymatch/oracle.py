"""Ground-truth matchings and the exact-integer determinant decoder.

Nothing here touches the truncated ring.  ``exhaustive_mwpm`` enumerates
every perfect matching, ``path_graph_mwpm`` solves the detector/boundary-copy
layout exactly by dynamic programming over subsets of detectors, and
``exact_integer_decode`` is the original integer Tutte-matrix method with
entries ``+-2^w`` evaluated in arbitrary precision.  The integer decoder
shares the Samuelson-Berkowitz recursion with the ring decoder, so any
disagreement between the two isolates the truncation logic.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from .det_decoder import (
    DecodeOutcome,
    IntRing,
    PerturbedWeights,
    Scheme,
    Status,
    berkowitz,
)
from .graph_model import PathGraph

__all__ = [
    "NoPerfectMatchingError",
    "perfect_matchings",
    "complete_matchings",
    "matching_incidence",
    "exhaustive_mwpm",
    "path_graph_mwpm",
    "reference_mwpm",
    "is_isolated",
    "integer_tutte_determinant",
    "exact_integer_decode",
    "appendix_a_decode",
    "random_even_graph",
]

EXHAUSTIVE_LIMIT = 16


class NoPerfectMatchingError(ValueError):
    pass


def perfect_matchings(pg: PathGraph) -> Iterator[tuple[tuple[int, int], ...]]:
    """Every perfect matching, pairing the lowest unmatched vertex first."""
    nbrs = [[] for _ in range(pg.n)]
    for i, j in pg.edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    for adj in nbrs:
        adj.sort()
    used = [False] * pg.n
    stack: list[tuple[int, int]] = []

    def rec(lo: int):
        while lo < pg.n and used[lo]:
            lo += 1
        if lo == pg.n:
            yield tuple(stack)
            return
        used[lo] = True
        for j in nbrs[lo]:
            if not used[j]:
                used[j] = True
                stack.append((lo, j))
                yield from rec(lo + 1)
                stack.pop()
                used[j] = False
        used[lo] = False

    if pg.n % 2:
        return iter(())
    return rec(0)


@lru_cache(maxsize=None)
def complete_matchings(n: int) -> np.ndarray:
    """All perfect matchings of K_n as an ``(count, n // 2, 2)`` array."""
    if n % 2:
        raise NoPerfectMatchingError("odd order")
    out = []

    def rec(rest: tuple[int, ...], acc: tuple):
        if not rest:
            out.append(acc)
            return
        a = rest[0]
        for k in range(1, len(rest)):
            rec(rest[1:k] + rest[k + 1:], acc + ((a, rest[k]),))

    rec(tuple(range(n)), ())
    return np.array(out, dtype=np.int64).reshape(len(out), n // 2, 2)


def matching_incidence(pg: PathGraph) -> tuple[np.ndarray, list]:
    """0/1 matrix (matchings x edges) for vectorised weight evaluation."""
    ms = list(perfect_matchings(pg))
    inc = np.zeros((len(ms), len(pg.edges)), dtype=np.int64)
    for r, m in enumerate(ms):
        for i, j in m:
            inc[r, pg.edge_index(i, j)] = 1
    return inc, ms


def exhaustive_mwpm(pg: PathGraph, weights: Optional[Sequence] = None,
                    limit: Optional[int] = EXHAUSTIVE_LIMIT):
    """Minimum total weight and every perfect matching attaining it.

    ``weights`` defaults to the path graph's own weights and must align with
    ``pg.edges``.
    """
    if pg.n % 2:
        raise NoPerfectMatchingError(f"odd order {pg.n} admits no perfect matching")
    if limit is not None and pg.n > limit:
        raise ValueError(f"exhaustive enumeration is limited to {limit} vertices")
    w = pg.weights if weights is None else weights
    best = None
    argbest: list = []
    for m in perfect_matchings(pg):
        total = sum(w[pg.edge_index(i, j)] for i, j in m)
        if best is None or total < best:
            best, argbest = total, [m]
        elif total == best:
            argbest.append(m)
    if best is None:
        raise NoPerfectMatchingError("graph has no perfect matching")
    return best, argbest


def path_graph_mwpm(pg: PathGraph, weights: Optional[Sequence] = None):
    """Exact MWPM of a detector/boundary-copy path graph.

    Each detector either pairs with another detector or with its own
    boundary copy; leftover copies pair up at zero cost.  A DP over subsets
    of detectors therefore solves the problem in ``O(2^a a^2)``.  Ties are
    broken by preferring the boundary, then the smallest partner index.
    """
    a = pg.num_detectors
    if a is None:
        raise ValueError("path graph lacks the detector/boundary-copy layout")
    w = pg.weights if weights is None else weights
    inf = math.inf

    def wt(i, j):
        key = (i, j) if i < j else (j, i)
        k = pg._index.get(key)
        return inf if k is None else w[k]

    bd = [wt(i, a + i) for i in range(a)]
    dd = [[wt(i, j) if i != j else inf for j in range(a)] for i in range(a)]
    full = (1 << a) - 1
    cost = [inf] * (1 << a)
    choice = [-1] * (1 << a)
    cost[0] = 0
    for mask in range(1, full + 1):
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        best, arg = bd[i] + cost[rest], i
        r = rest
        while r:
            low = r & -r
            j = low.bit_length() - 1
            r ^= low
            c = dd[i][j] + cost[rest ^ low]
            if c < best:
                best, arg = c, j
        cost[mask] = best
        choice[mask] = arg
    if math.isinf(cost[full]):
        raise NoPerfectMatchingError("no perfect matching")
    pairs = []
    to_boundary = []
    mask = full
    while mask:
        i = (mask & -mask).bit_length() - 1
        j = choice[mask]
        if j == i:
            pairs.append((i, a + i))
            mask ^= 1 << i
            to_boundary.append(i)
        else:
            pairs.append((i, j))
            mask ^= (1 << i) | (1 << j)
    spare = sorted(a + i for i in range(a) if i not in to_boundary)
    pairs.extend((spare[k], spare[k + 1]) for k in range(0, len(spare), 2))
    return cost[full], tuple(sorted(pairs))


def reference_mwpm(pg: PathGraph, weights: Optional[Sequence] = None):
    """(weight, one optimal matching) using the cheapest exact method available."""
    if pg.n == 0:
        return 0, ()
    if pg.num_detectors is not None:
        return path_graph_mwpm(pg, weights)
    best, ms = exhaustive_mwpm(pg, weights, limit=None)
    return best, ms[0]


def is_isolated(pg: PathGraph, weights: Sequence) -> bool:
    """True iff the minimum-weight perfect matching under ``weights`` is unique."""
    _, ms = exhaustive_mwpm(pg, weights, limit=None)
    return len(ms) == 1


# -- exact integer Tutte matrix ---------------------------------------------------

def _tutte_rows(n: int, edges, effective):
    rows = [[] for _ in range(n)]
    for (i, j), e in zip(edges, effective):
        rows[i].append((j, (1, e)))
        rows[j].append((i, (-1, e)))
    for r in rows:
        r.sort()
    return rows


def _int_det(n: int, rows) -> int:
    if n == 0:
        return 1
    c = berkowitz(n, rows, IntRing())[n]
    return -c if n % 2 else c


def _drop(rows, i: int, j: int):
    out = []
    for r, row in enumerate(rows):
        if r == i:
            continue
        out.append([(c - (c > j), e) for c, e in row if c != j])
    return out


def integer_tutte_determinant(pg: PathGraph, effective: Sequence[int]) -> int:
    """det of the skew-symmetric integer matrix with entries +-2^effective."""
    return _int_det(pg.n, _tutte_rows(pg.n, pg.edges, effective))


def _v2(x: int) -> int:
    x = abs(x)
    return (x & -x).bit_length() - 1


def exact_integer_decode(pg: PathGraph, effective: Sequence[int]) -> DecodeOutcome:
    """Integer-arithmetic decoder: w* from the largest power of 4 dividing det,
    edges where minor * 2^w / 4^w* is odd."""
    n = pg.n
    if n == 0:
        return DecodeOutcome(Status.MATCHING, (), 0, 0, 0)
    rows = _tutte_rows(n, pg.edges, effective)
    det = _int_det(n, rows)
    if det == 0:
        raise NoPerfectMatchingError("integer Tutte determinant vanishes")
    w_star = _v2(det) // 2
    chosen = []
    for (i, j), e in zip(pg.edges, effective):
        mb = _int_det(n - 1, _drop(rows, i, j))
        if mb and _v2(mb) + e == 2 * w_star:
            chosen.append((i, j))
    chosen = tuple(chosen)
    eff_total = sum(effective[pg.edge_index(i, j)] for i, j in chosen)
    if not pg.is_perfect_matching(chosen) or eff_total != w_star:
        return DecodeOutcome(Status.NOT_ISOLATED, chosen, w_star, None, eff_total)
    weight = sum(pg.weights[pg.edge_index(i, j)] for i, j in chosen)
    return DecodeOutcome(Status.MATCHING, chosen, w_star, weight, eff_total)


def appendix_a_decode(pg: PathGraph, pw: PerturbedWeights) -> DecodeOutcome:
    """Exact-integer decode of an amplified perturbation (no truncation anywhere)."""
    if Scheme(pw.scheme) is not Scheme.AMPLIFIED:
        raise ValueError("the integer decoder is defined for amplified weights")
    return exact_integer_decode(pg, pw.effective)


def random_even_graph(n: int, rng: np.random.Generator, weight_max: int = 256,
                      density: float = 0.5) -> PathGraph:
    """Random graph on ``n`` (even) vertices that contains a planted perfect matching.

    Weights are uniform on ``{1..weight_max}``; every other pair is an edge
    with probability ``density``.
    """
    if n % 2:
        raise ValueError("n must be even")
    perm = rng.permutation(n)
    pairs = {tuple(sorted((int(perm[2 * k]), int(perm[2 * k + 1])))) for k in range(n // 2)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                pairs.add((i, j))
    weights = {e: int(rng.integers(1, weight_max + 1)) for e in sorted(pairs)}
    return PathGraph.from_weights(n, weights)
