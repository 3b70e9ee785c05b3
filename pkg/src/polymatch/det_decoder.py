"""Determinant-based MWPM decoding over F2[X]/(X^w_th) with overflow detection.

Pipeline for one perturbation trial on a path graph:

1. perturb the integer edge weights (amplified ``C*w + W`` or plain ``w + W``),
2. build the symmetric matrix ``B`` with ``B[i][j] = X^effective(i, j)`` on edges,
3. ``det(B)`` by the division-free Samuelson-Berkowitz recursion; its lowest
   exponent is ``2 w*``, and a zero determinant means the matching weight
   overflowed the ring (the failure indicator),
4. an edge ``{i, j}`` belongs to the matching iff the lowest exponent of
   ``minor(i, j) * X^effective(i, j)`` equals ``2 w*``.

Multiplying by a matrix entry is a single shift because every entry of ``B``
is a monomial, so the inner loops are shift/XOR on packed integers.  General
ring products only appear in the Toeplitz step of the recursion.

Every routine is a pure function of its inputs; the per-edge minors and
separate trials can be farmed out to workers without coordination.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graph_model import PathGraph
from .poly_gf2 import TruncatedPoly, clmul, low_mask

__all__ = [
    "Scheme",
    "Status",
    "PerturbedWeights",
    "RingMatrix",
    "DecodeOutcome",
    "RingProfile",
    "InternalInconsistencyError",
    "default_w_max",
    "amplification_factor",
    "make_rng",
    "random_seed",
    "perturb",
    "perturb_with",
    "build_matrix",
    "charpoly",
    "determinant",
    "minor",
    "adjugate",
    "ring_profile",
    "outcome_from_profile",
    "decode",
    "F2Ring",
    "IntRing",
    "berkowitz",
    "berkowitz_f2",
    "horner_adjugate",
    "packed_adjugate",
]


class Scheme(str, enum.Enum):
    AMPLIFIED = "amplified"
    PLAIN = "plain"


class Status(str, enum.Enum):
    MATCHING = "MATCHING"
    OVERFLOW_FAILURE = "OVERFLOW_FAILURE"
    NOT_ISOLATED = "NOT_ISOLATED"


class InternalInconsistencyError(RuntimeError):
    """Raised when the determinant has an odd lowest exponent (impossible for valid B)."""


def default_w_max(n: int) -> int:
    """Perturbation range ceil(0.8 n^0.8) for a path graph with n vertices."""
    if n <= 0:
        return 1
    return max(1, math.ceil(0.8 * n ** 0.8))


def amplification_factor(n: int, w_max: int) -> int:
    return (n // 2) * (w_max - 1) + 1


def random_seed() -> int:
    """Seed drawn uniformly from the 32-bit unsigned integers."""
    return int(np.random.default_rng().integers(0, 2 ** 32))


def make_rng(seed: int, kind: str = "pcg64"):
    """Seeded generator; ``kind`` is ``"pcg64"`` (default) or ``"mt19937"``."""
    if kind == "pcg64":
        return np.random.Generator(np.random.PCG64(seed))
    if kind == "mt19937":
        # RandomState seeds MT19937 with the classic init_genrand for 32-bit seeds
        return np.random.RandomState(seed % 2 ** 32)
    raise ValueError(f"unknown generator {kind!r}")


def _draw(rng, low: int, high: int, size: int) -> np.ndarray:
    if isinstance(rng, np.random.RandomState):
        return rng.randint(low, high + 1, size=size)
    return rng.integers(low, high + 1, size=size)


@dataclass(frozen=True)
class PerturbedWeights:
    """Random perturbation of a path graph's integer weights for one trial."""

    scheme: Scheme
    w_max: int
    seed: Optional[int]
    perturbations: tuple[int, ...]
    effective: tuple[int, ...]
    amplification: int = 1
    base_scale: Optional[int] = None

    def __post_init__(self):
        if any(not (1 <= x <= self.w_max) for x in self.perturbations):
            raise ValueError("perturbations must lie in [1, w_max]")


def perturb_with(pg: PathGraph, scheme: Scheme, w_max: int, perturbations: Sequence[int],
                 seed: Optional[int] = None) -> PerturbedWeights:
    """Apply explicit perturbation values (aligned with ``pg.edges``)."""
    scheme = Scheme(scheme)
    if w_max < 1:
        raise ValueError("w_max must be >= 1")
    if len(perturbations) != len(pg.edges):
        raise ValueError("one perturbation per edge required")
    for w in pg.weights:
        if int(w) != w or w < 0:
            raise ValueError("path-graph weights must be non-negative integers")
    amp = amplification_factor(pg.n, w_max) if scheme is Scheme.AMPLIFIED else 1
    pert = tuple(int(x) for x in perturbations)
    eff = tuple(amp * int(w) + x for w, x in zip(pg.weights, pert))
    return PerturbedWeights(scheme, w_max, seed, pert, eff, amp, pg.scale)


def perturb(pg: PathGraph, scheme: Scheme, w_max: int, seed: Optional[int] = None,
            rng: str = "pcg64") -> PerturbedWeights:
    """Draw W(e) i.i.d. uniform on {1..w_max} (in ``pg.edges`` order) and apply ``scheme``."""
    if seed is None:
        seed = random_seed()
    draws = _draw(make_rng(seed, rng), 1, w_max, len(pg.edges))
    return perturb_with(pg, scheme, w_max, draws.tolist(), seed)


# -- ring backends ------------------------------------------------------------
#
# A backend supplies the element operations used by the recursion.  Matrix
# entries are stored in whatever form makes "entry * element" cheapest: an
# exponent for monomial F2 matrices, a (sign, exponent) pair for the integer
# Tutte matrix, a packed polynomial for general F2 matrices.

class F2Ring:
    """F2[X]/(X^w_th) on packed integers; ``monomial`` entries are exponents."""

    zero = 0
    one = 1

    def __init__(self, w_th: int, monomial: bool = True):
        self.w_th = w_th
        self.mask = low_mask(w_th)
        self.monomial = monomial

    def lift(self, entry) -> int:
        if self.monomial:
            return (1 << entry) & self.mask
        return entry

    def dot(self, row, v) -> int:
        acc = 0
        if self.monomial:
            for j, e in row:
                x = v[j]
                if x:
                    acc ^= x << e
            return acc & self.mask
        for j, e in row:
            x = v[j]
            if x:
                acc ^= clmul(e, x, self.w_th)
        return acc

    def scale(self, entry, x):
        # left unreduced for monomial entries; callers finish with reduce()
        if self.monomial:
            return x << entry
        return clmul(entry, x, self.w_th)

    def reduce(self, a):
        return a & self.mask

    def neg(self, a):
        return a

    def add(self, a, b):
        return a ^ b

    def mul(self, a, b):
        return clmul(a, b, self.w_th)

    def signed(self, a, negate: bool):
        return a


class IntRing:
    """Exact integers; entries are ``(sign, exponent)`` meaning ``sign * 2**exponent``."""

    zero = 0
    one = 1

    def lift(self, entry) -> int:
        s, e = entry
        return s << e if s > 0 else -(1 << e)

    def dot(self, row, v) -> int:
        acc = 0
        for j, (s, e) in row:
            x = v[j]
            if x:
                if s > 0:
                    acc += x << e
                else:
                    acc -= x << e
        return acc

    def scale(self, entry, x):
        s, e = entry
        return x << e if s > 0 else -(x << e)

    def reduce(self, a):
        return a

    def neg(self, a):
        return -a

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def signed(self, a, negate: bool):
        return -a if negate else a


def _toeplitz(ring, col, p):
    # lower-triangular Toeplitz (len(p)+1) x len(p) with first column ``col``, times p
    out = []
    lp = len(p)
    for i in range(lp + 1):
        acc = ring.zero
        for j in range(max(0, i - len(col) + 1), min(i, lp - 1) + 1):
            a, b = col[i - j], p[j]
            if a and b:
                acc = ring.add(acc, ring.mul(a, b))
        out.append(acc)
    return out


def berkowitz(n: int, rows, ring) -> list:
    """Characteristic polynomial coefficients ``[1, c1, ..., cn]`` of det(tI - A).

    ``rows[i]`` lists the nonzeros ``(j, entry)`` of row ``i`` (diagonal
    included).  Division-free, so valid over any commutative ring.
    """
    p = [ring.one]
    for r in range(n - 1, -1, -1):
        m = n - r
        a = ring.zero
        for j, e in rows[r]:
            if j == r:
                a = ring.lift(e)
        R = [(j, e) for j, e in rows[r] if j > r]
        sub = [(i, [(j, e) for j, e in rows[i] if j > r]) for i in range(r + 1, n)]
        v = [ring.zero] * n
        for i in range(r + 1, n):
            for j, e in rows[i]:
                if j == r:
                    v[i] = ring.lift(e)
                    break
        col = [ring.one, ring.neg(a)]
        for k in range(m - 1):
            col.append(ring.neg(ring.dot(R, v)))
            if k < m - 2:
                nv = [ring.zero] * n
                for i, row in sub:
                    nv[i] = ring.dot(row, v)
                v = nv
        p = _toeplitz(ring, col, p)
    return p


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def berkowitz_f2(n: int, rows, w_th: int) -> list[int]:
    """``berkowitz`` specialised to monomial F2 matrices (entries are exponents).

    Same recursion with the ring calls inlined; the Toeplitz products shift
    by the set bits of whichever factor is sparser.
    """
    mask = low_mask(w_th)
    p = [1]
    for r in range(n - 1, -1, -1):
        m = n - r
        a = 0
        R = []
        for j, e in rows[r]:
            if j == r:
                a = (1 << e) & mask
            elif j > r:
                R.append((j, e))
        v = [0] * n
        for i in range(r + 1, n):
            for j, e in rows[i]:
                if j == r:
                    v[i] = 1 << e
                    break
        sub = [(i, [(j, e) for j, e in rows[i] if j > r]) for i in range(r + 1, n)]
        col = [1, a]
        for k in range(m - 1):
            acc = 0
            for j, e in R:
                x = v[j]
                if x:
                    acc ^= x << e
            col.append(acc & mask)
            if k < m - 2:
                nv = [0] * n
                for i, row in sub:
                    acc = 0
                    for j, e in row:
                        x = v[j]
                        if x:
                            acc ^= x << e
                    nv[i] = acc & mask
                v = nv
        ccount = [c.bit_count() for c in col]
        pcount = [c.bit_count() for c in p]
        cbits: dict = {}
        pbits: dict = {}
        lp, lc = len(p), len(col)
        out = []
        for i in range(lp + 1):
            acc = 0
            for j in range(max(0, i - lc + 1), min(i, lp - 1) + 1):
                k = i - j
                cc, pc = ccount[k], pcount[j]
                if not cc or not pc:
                    continue
                if cc <= pc:
                    bl = cbits.get(k)
                    if bl is None:
                        bl = cbits[k] = _bits(col[k])
                    x = p[j]
                else:
                    bl = pbits.get(j)
                    if bl is None:
                        bl = pbits[j] = _bits(p[j])
                    x = col[k]
                for s in bl:
                    acc ^= x << s
            out.append(acc & mask)
        p = out
    return p


def horner_adjugate(n: int, rows, coeffs, ring) -> list[list]:
    """adj(A) from Cayley-Hamilton: (-1)^(n-1) (A^(n-1) + c1 A^(n-2) + ... + c_(n-1) I).

    Evaluated Horner-style, P <- P A + c_k I, which needs only entry-times-
    element products (shifts for monomial matrices).
    """
    P = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    scale, add, reduce = ring.scale, ring.add, ring.reduce
    for k in range(1, n):
        Q = []
        for i in range(n):
            Pi = P[i]
            out = [ring.zero] * n
            for l in range(n):
                x = Pi[l]
                if not x:
                    continue
                for j, e in rows[l]:
                    out[j] = add(out[j], scale(e, x))
            out = [reduce(o) for o in out]
            out[i] = add(out[i], coeffs[k])
            Q.append(out)
        P = Q
    negate = (n - 1) % 2 == 1
    return [[ring.signed(x, negate) for x in row] for row in P]


def packed_adjugate(n: int, rows, coeffs, w_th: int) -> list[int]:
    """Horner adjugate for monomial F2 matrices with whole columns packed in one int.

    Column ``l`` of the running matrix P is ``sum_i P[i][l] << (i * S)``
    with slot width ``S = 2 w_th``, so P[:, l] * X^e for every row at once
    is one shift.  Products stay below ``2^(2 w_th)`` and never spill into
    the next slot; one AND per column truncates them.  Returns the packed
    columns of adj(A) (signs vanish over F2).
    """
    S = 2 * w_th
    slot = low_mask(w_th)
    mask = 0
    for i in range(n):
        mask |= slot << (i * S)
    by_col = [[] for _ in range(n)]
    for l in range(n):
        for j, e in rows[l]:
            by_col[j].append((l, e))
    cols = [1 << (l * S) for l in range(n)]
    for k in range(1, n):
        ck = coeffs[k]
        new = []
        for j in range(n):
            acc = 0
            for l, e in by_col[j]:
                acc ^= cols[l] << e
            acc &= mask
            if ck:
                acc ^= ck << (j * S)
            new.append(acc)
        cols = new
    return cols


# -- matrices over the truncated ring ------------------------------------------

@dataclass(frozen=True)
class RingMatrix:
    """Square matrix over F2[X]/(X^w_th).

    ``bits[i][j]`` is the packed entry.  When every entry is a monomial or
    zero, ``exponents[i][j]`` holds its exponent (``-1`` for zero) and the
    determinant kernel multiplies by shifting.
    """

    w_th: int
    bits: tuple[tuple[int, ...], ...]
    exponents: Optional[tuple[tuple[int, ...], ...]] = None

    @property
    def n(self) -> int:
        return len(self.bits)

    def entry(self, i: int, j: int) -> TruncatedPoly:
        return TruncatedPoly(self.bits[i][j], self.w_th)

    def is_symmetric(self) -> bool:
        return all(self.bits[i][j] == self.bits[j][i] for i in range(self.n) for j in range(i))

    @classmethod
    def from_polys(cls, entries) -> "RingMatrix":
        entries = [list(r) for r in entries]
        if not entries:
            raise ValueError("use RingMatrix(w_th, ()) for the empty matrix")
        w_th = entries[0][0].w_th
        n = len(entries)
        for r in entries:
            if len(r) != n:
                raise ValueError("matrix must be square")
            for x in r:
                if x.w_th != w_th:
                    raise ValueError("mixed truncation thresholds")
        bits = tuple(tuple(x.bits for x in r) for r in entries)
        exps = []
        for r in bits:
            er = []
            for b in r:
                if b == 0:
                    er.append(-1)
                elif b & (b - 1) == 0:
                    er.append(b.bit_length() - 1)
                else:
                    break
            else:
                exps.append(tuple(er))
                continue
            exps = None
            break
        return cls(w_th, bits, tuple(exps) if exps is not None else None)

    def _sparse(self):
        n = self.n
        if self.exponents is not None:
            ring = F2Ring(self.w_th, monomial=True)
            rows = [[(j, e) for j, e in enumerate(self.exponents[i]) if e >= 0] for i in range(n)]
        else:
            ring = F2Ring(self.w_th, monomial=False)
            rows = [[(j, b) for j, b in enumerate(self.bits[i]) if b] for i in range(n)]
        return ring, rows

    def submatrix(self, i: int, j: int) -> "RingMatrix":
        """Remove row ``i`` and column ``j``."""
        n = self.n
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"minor indices ({i}, {j}) out of range for n={n}")
        keep_r = [r for r in range(n) if r != i]
        keep_c = [c for c in range(n) if c != j]
        bits = tuple(tuple(self.bits[r][c] for c in keep_c) for r in keep_r)
        exps = None
        if self.exponents is not None:
            exps = tuple(tuple(self.exponents[r][c] for c in keep_c) for r in keep_r)
        return RingMatrix(self.w_th, bits, exps)


def build_matrix(pg: PathGraph, pw: PerturbedWeights, w_th: int) -> RingMatrix:
    """B[i][j] = X^effective({i, j}) on edges (0 once the exponent reaches w_th), else 0."""
    if w_th < 1:
        raise ValueError("w_th must be >= 1")
    n = pg.n
    exps = [[-1] * n for _ in range(n)]
    for (i, j), e in zip(pg.edges, pw.effective):
        if e < w_th:
            exps[i][j] = exps[j][i] = e
    bits = tuple(tuple((1 << e) if e >= 0 else 0 for e in row) for row in exps)
    return RingMatrix(w_th, bits, tuple(tuple(r) for r in exps))


def charpoly(m: RingMatrix) -> list[TruncatedPoly]:
    ring, rows = m._sparse()
    return [TruncatedPoly(c, m.w_th) for c in berkowitz(m.n, rows, ring)]


def _det_bits(m: RingMatrix) -> int:
    if m.n == 0:
        return 1 & low_mask(m.w_th)
    ring, rows = m._sparse()
    # signs vanish in characteristic 2
    return berkowitz(m.n, rows, ring)[m.n]


def determinant(m: RingMatrix) -> TruncatedPoly:
    return TruncatedPoly(_det_bits(m), m.w_th)


def minor(m: RingMatrix, i: int, j: int) -> TruncatedPoly:
    """det of ``m`` with row ``i`` and column ``j`` removed."""
    return determinant(m.submatrix(i, j))


def adjugate(m: RingMatrix) -> list[list[TruncatedPoly]]:
    """All cofactors at once; ``adjugate(m)[j][i] == minor(m, i, j)`` over F2."""
    n = m.n
    if n == 0:
        return []
    ring, rows = m._sparse()
    coeffs = berkowitz(n, rows, ring)
    adj = horner_adjugate(n, rows, coeffs, ring)
    return [[TruncatedPoly(x, m.w_th) for x in row] for row in adj]


# -- decoding -----------------------------------------------------------------

@dataclass(frozen=True)
class DecodeOutcome:
    """Result of one decode.

    ``weight`` is the matching's total under the path graph's own
    (unperturbed) weights; ``effective_weight`` is its total under the
    perturbed weights and equals ``w_star`` whenever status is MATCHING.
    """

    status: Status
    matching: tuple[tuple[int, int], ...] = ()
    w_star: Optional[int] = None
    weight: Optional[float] = None
    effective_weight: Optional[int] = None
    w_th: Optional[int] = None
    trial: Optional[int] = None
    candidates: int = 0

    @property
    def ok(self) -> bool:
        return self.status is Status.MATCHING


@dataclass(frozen=True)
class RingProfile:
    """det(B) and the per-edge minors at threshold ``w_th``.

    Truncation is a ring homomorphism, so the profile at a large threshold
    determines the decode outcome at every smaller one.
    """

    w_th: int
    det: int
    minors: tuple[int, ...]


def _edge_minors_adjugate(pg: PathGraph, m: RingMatrix):
    ring, rows = m._sparse()
    if ring.monomial:
        coeffs = berkowitz_f2(m.n, rows, m.w_th)
        cols = packed_adjugate(m.n, rows, coeffs, m.w_th)
        S = 2 * m.w_th
        # minor(i, j) = adj[j][i], which lives in column i at slot j
        return coeffs[m.n], tuple((cols[i] >> (j * S)) & ring.mask for i, j in pg.edges)
    coeffs = berkowitz(m.n, rows, ring)
    adj = horner_adjugate(m.n, rows, coeffs, ring)
    return coeffs[m.n], tuple(adj[j][i] for i, j in pg.edges)


def ring_profile(pg: PathGraph, pw: PerturbedWeights, w_th: int, minors: str = "adjugate") -> RingProfile:
    """Compute det(B) and minor(i, j) for every edge of ``pg``.

    ``minors="per_edge"`` runs one independent determinant per edge (the
    embarrassingly parallel form); ``"adjugate"`` obtains all of them from a
    single characteristic polynomial and matrix-power pass.  Both return
    identical bits.
    """
    if pg.n == 0:
        return RingProfile(w_th, 1 & low_mask(w_th), ())
    m = build_matrix(pg, pw, w_th)
    if minors == "adjugate":
        det, mins = _edge_minors_adjugate(pg, m)
    elif minors == "per_edge":
        det = _det_bits(m)
        mins = tuple(_det_bits(m.submatrix(i, j)) for i, j in pg.edges)
    else:
        raise ValueError(f"unknown minor strategy {minors!r}")
    return RingProfile(w_th, det, mins)


def outcome_from_profile(profile: RingProfile, pg: PathGraph, pw: PerturbedWeights,
                         w_th: Optional[int] = None) -> DecodeOutcome:
    """Steps 3-4 of the decoder, reading det/minors truncated to ``w_th``."""
    if w_th is None:
        w_th = profile.w_th
    if w_th > profile.w_th:
        raise ValueError("profile was computed at a smaller threshold")
    if pg.n == 0:
        return DecodeOutcome(Status.MATCHING, (), 0, 0, 0, w_th)
    mask = low_mask(w_th)
    det = profile.det & mask
    if det == 0:
        return DecodeOutcome(Status.OVERFLOW_FAILURE, w_th=w_th)
    low = (det & -det).bit_length() - 1
    if low % 2:
        raise InternalInconsistencyError(f"det(B) has odd lowest exponent {low}")
    w_star = low // 2
    # minor(i, j) * X^eff has lowest term X^(2 w*) exactly on matching edges
    target = 1 << low
    below = (target << 1) - 1
    chosen = []
    for (i, j), mb, eff in zip(pg.edges, profile.minors, pw.effective):
        if eff > low:
            continue
        if ((mb << eff) & mask & below) == target:
            chosen.append((i, j))
    chosen = tuple(chosen)
    eff_total = sum(pw.effective[pg.edge_index(i, j)] for i, j in chosen)
    if not pg.is_perfect_matching(chosen) or eff_total != w_star:
        return DecodeOutcome(Status.NOT_ISOLATED, chosen, w_star, None, eff_total, w_th)
    weight = sum(pg.weights[pg.edge_index(i, j)] for i, j in chosen)
    return DecodeOutcome(Status.MATCHING, chosen, w_star, weight, eff_total, w_th)


def decode(pg: PathGraph, pw: PerturbedWeights, w_th: int, minors: str = "adjugate") -> DecodeOutcome:
    """Determinant-based MWPM of the perturbed path graph in F2[X]/(X^w_th).

    Returns OVERFLOW_FAILURE when det(B) vanishes in the truncated ring,
    NOT_ISOLATED when the selected edges are not a perfect matching of
    effective weight w*, and MATCHING otherwise.
    """
    if pg.n % 2:
        raise ValueError("path graph must have even order")
    if len(pw.effective) != len(pg.edges):
        raise ValueError("perturbation does not match the path graph")
    return outcome_from_profile(ring_profile(pg, pw, w_th, minors), pg, pw, w_th)
