"""Monte Carlo harness: rotated surface code detector graphs and sweeps.

The noise model is phenomenological: every data qubit may suffer an X flip
before each round of Z-stabilizer measurements, and every measurement
outcome (except the final, perfect round) may be wrong.  Each fault is one
edge of the detector graph.  Optionally, per-location rates are spread
log-uniformly around ``p`` so that edge weights are not all equal (a
circuit-level model has the same property; the uniform model makes every
discretization look perfect).

Logical class: Z-bar is a horizontal row of Z operators, so an X error
flips the logical outcome iff it sits on row 0.  Those edges carry the
``logical`` flag.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .det_decoder import Scheme, Status, default_w_max, outcome_from_profile
from .graph_model import (
    BOUNDARY,
    DETECTOR,
    DetectorGraph,
    DistanceTable,
    PathGraph,
    build_path_graph,
    discretize,
    full_precision,
    scale_for_precision,
)
from .heuristic import matching_weight, required_wth_bound, trial_profiles
from .oracle import path_graph_mwpm

__all__ = [
    "NoiseModel",
    "SweepPoint",
    "SweepResult",
    "ShotBatch",
    "z_faces",
    "build_surface_detector_graph",
    "sample_shot",
    "sample_batch",
    "shot_seed",
    "worker_count",
    "parallel_map",
    "Reference",
    "reference_correction",
    "precision_sweep",
    "WthSurvey",
    "wth_survey",
    "threshold_sweep",
]


@dataclass(frozen=True)
class NoiseModel:
    d: int
    p: float = 1e-3
    rounds: Optional[int] = None
    p_meas: Optional[float] = None
    spread: float = 0.0
    seed: int = 0
    kind: str = "phenomenological"

    def __post_init__(self):
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError("code distance must be odd and >= 3")
        if not (0.0 < self.p < 1.0):
            raise ValueError("p must lie in (0, 1)")
        if self.rounds is None:
            object.__setattr__(self, "rounds", self.d)
        if self.p_meas is None:
            object.__setattr__(self, "p_meas", self.p)
        if self.rounds < 1:
            raise ValueError("need at least one round")
        if not (0.0 < self.p_meas < 1.0):
            raise ValueError("p_meas must lie in (0, 1)")
        if self.spread < 0:
            raise ValueError("spread must be non-negative")
        if self.kind != "phenomenological":
            raise ValueError("only the phenomenological model is implemented")


def z_faces(d: int) -> list[tuple[tuple[int, int], ...]]:
    """Qubit sets of the Z stabilizers of the rotated distance-d code.

    Face (i, j) covers qubits (i..i+1, j..j+1) clipped to the d x d grid.
    Z faces sit where i + j is even: all such bulk faces, plus the
    weight-two faces on the left and right edges.
    """
    out = []
    for i in range(-1, d):
        for j in range(-1, d):
            if (i + j) % 2:
                continue
            bulk = 0 <= i <= d - 2 and 0 <= j <= d - 2
            side = j in (-1, d - 1) and 0 <= i <= d - 2
            if bulk or side:
                qs = tuple((r, c) for r in (i, i + 1) for c in (j, j + 1)
                           if 0 <= r < d and 0 <= c < d)
                out.append(qs)
    return out


def build_surface_detector_graph(nm: NoiseModel) -> DetectorGraph:
    """Space-time detector graph of a Z-memory experiment.

    Detector ``t * F + f`` is face ``f`` in round ``t``; the last two
    vertices are the top and bottom boundaries.  Parallel mechanisms (same
    endpoints and logical flag) are merged by summing their probabilities.
    """
    d, R = nm.d, nm.rounds
    faces = z_faces(d)
    nf = len(faces)
    on = {}
    for f, qs in enumerate(faces):
        for q in qs:
            on.setdefault(q, []).append(f)
    top, bottom = R * nf, R * nf + 1
    kinds = (DETECTOR,) * (R * nf) + (BOUNDARY, BOUNDARY)

    rng = np.random.default_rng(nm.seed)

    def rate(p):
        if nm.spread == 0:
            return p
        return min(0.5, p * math.exp(nm.spread * rng.uniform(-1.0, 1.0)))

    merged: dict[tuple[int, int, bool], float] = {}

    def add(u, v, p, lg):
        key = (min(u, v), max(u, v), lg)
        merged[key] = merged.get(key, 0.0) + p

    for t in range(R):
        base = t * nf
        for r in range(d):
            for c in range(d):
                fs = on.get((r, c), [])
                p = rate(nm.p)
                lg = r == 0
                if len(fs) == 2:
                    add(base + fs[0], base + fs[1], p, lg)
                elif len(fs) == 1:
                    add(base + fs[0], top if r == 0 else bottom, p, lg)
                else:  # pragma: no cover - layout invariant
                    raise AssertionError(f"qubit {(r, c)} in {len(fs)} Z faces")
        if t + 1 < R:
            for f in range(nf):
                add(base + f, base + nf + f, rate(nm.p_meas), False)
    keys = sorted(merged)
    return DetectorGraph(
        kinds,
        tuple((u, v) for u, v, _ in keys),
        tuple(merged[k] for k in keys),
        logical=tuple(lg for _, _, lg in keys),
    )


# -- sampling -----------------------------------------------------------------

def _syndrome(g: DetectorGraph, faults: Iterable[int]) -> tuple[tuple[int, ...], bool]:
    flips = Counter()
    parity = False
    for k in faults:
        u, v = g.edges[k]
        flips[u] += 1
        flips[v] += 1
        parity ^= g.logical[k]
    active = tuple(sorted(x for x, c in flips.items() if c % 2 and g.kinds[x] == DETECTOR))
    return active, parity


def sample_shot(g: DetectorGraph, seed: int):
    """(active detectors, fault edge indices) for one shot."""
    rng = np.random.default_rng(seed)
    hit = rng.random(g.num_edges) < np.asarray(g.probabilities)
    faults = tuple(int(k) for k in np.flatnonzero(hit))
    return _syndrome(g, faults)[0], faults


@dataclass
class ShotBatch:
    active: list
    faults: list
    parity: np.ndarray

    def __len__(self):
        return len(self.active)


def sample_batch(g: DetectorGraph, shots: int, seed: int, chunk: int = 8192) -> ShotBatch:
    """``shots`` independent shots from one seeded stream (chunking does not change results)."""
    rng = np.random.default_rng(seed)
    probs = np.asarray(g.probabilities)
    active, faults = [], []
    parity = np.zeros(shots, dtype=bool)
    done = 0
    while done < shots:
        rows = min(chunk, shots - done)
        hit = rng.random((rows, g.num_edges)) < probs
        for r in range(rows):
            row = hit[r]
            if row.any():
                fs = tuple(int(k) for k in np.flatnonzero(row))
                act, par = _syndrome(g, fs)
            else:
                fs, act, par = (), (), False
            active.append(act)
            faults.append(fs)
            parity[done + r] = par
        done += rows
    return ShotBatch(active, faults, parity)


def shot_seed(seed: int, shot: int) -> int:
    """Per-shot base seed for perturbation trials."""
    return int(np.random.SeedSequence([seed, shot]).generate_state(1, np.uint32)[0])


# -- workers ------------------------------------------------------------------

def worker_count(requested: Optional[int] = None) -> int:
    """Requested count, capped by POLYMATCH_THREADS and the CPU count."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    env = os.environ.get("POLYMATCH_THREADS")
    if env:
        n = min(n, max(1, int(env)))
    return max(1, n)


def parallel_map(fn: Callable, items: Sequence, workers: Optional[int] = None) -> list:
    """Ordered map; results never depend on how many workers run it."""
    n = worker_count(workers)
    if n <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (n * 4))
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


# -- results ------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    axis: str
    value: object
    trials: int
    failures: int

    @property
    def fraction(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def stderr(self) -> float:
        if not self.trials:
            return 0.0
        p = self.fraction
        return math.sqrt(p * (1 - p) / self.trials)


@dataclass
class SweepResult:
    points: list = field(default_factory=list)

    def add(self, axis, value, trials, failures):
        self.points.append(SweepPoint(axis, value, int(trials), int(failures)))

    def series(self, axis: str) -> list[SweepPoint]:
        return [p for p in self.points if p.axis == axis]

    def get(self, axis: str, value) -> SweepPoint:
        for p in self.points:
            if p.axis == axis and p.value == value:
                return p
        raise KeyError((axis, value))

    def to_csv(self) -> str:
        lines = ["axis,value,trials,failures,stderr"]
        for p in self.points:
            lines.append(f"{p.axis},{p.value},{p.trials},{p.failures},{p.stderr:.6e}")
        return "\n".join(lines) + "\n"


# -- reference decoding -------------------------------------------------------

@dataclass(frozen=True)
class Reference:
    weight: float
    matching: tuple
    parity: bool


def _correction_parity(table: DistanceTable, act: Sequence[int], matching) -> bool:
    g = table.graph
    a = len(act)
    parity = False
    for i, j in matching:
        if i >= a:
            continue  # copy-copy pair, no physical correction
        if j == a + i:
            _, b = table.boundary_distance(act[i])
            path = table.path_edges(act[i], b)
        else:
            path = table.path_edges(act[i], act[j])
        for k in path:
            parity ^= g.logical[k]
    return parity


def reference_correction(table: DistanceTable, active: Sequence[int]) -> Reference:
    """Exact MWPM under ``table``'s weights and the logical parity of its correction."""
    act = sorted(active)
    if not act:
        return Reference(0, (), False)
    pg = build_path_graph(table.graph, table.weights, act, table)
    w, m = path_graph_mwpm(pg)
    return Reference(w, m, _correction_parity(table, act, m))


# -- precision sweep ----------------------------------------------------------

def _mismatch_row(active, g, tables, full, rtol):
    pg_full = build_path_graph(g, full.weights, active, full)
    best, _ = path_graph_mwpm(pg_full)
    out = []
    for t in tables:
        pg_b = build_path_graph(g, t.weights, active, t)
        _, m = path_graph_mwpm(pg_b)
        w = matching_weight(m, pg_full)
        out.append(w > best + rtol * max(1.0, abs(best)))
    return out


def precision_sweep(g: DetectorGraph, b_values: Sequence[int], shots: int, seed: int,
                    max_detectors: int = 20, workers: Optional[int] = None,
                    batch: Optional[ShotBatch] = None, rtol: float = 1e-9) -> SweepResult:
    """Fraction of shots whose integer-weight MWPM is not optimal at full precision.

    For each binary precision b, the MWPM of the discretized path graph is
    re-scored with the exact -ln p weights and compared with the true
    optimum.  Shots with more than ``max_detectors`` active detectors are
    left out of the denominator.
    """
    if batch is None:
        batch = sample_batch(g, shots, seed)
    full = DistanceTable(g, full_precision(g))
    tables = [DistanceTable(g, discretize(g, scale_for_precision(g, b))) for b in b_values]
    counts = Counter(batch.active)
    excluded = sum(c for a, c in counts.items() if len(a) > max_detectors)
    keys = sorted(a for a in counts if 0 < len(a) <= max_detectors)
    fn = partial(_mismatch_row, g=g, tables=tables, full=full, rtol=rtol)
    rows = parallel_map(fn, keys, workers)
    res = SweepResult()
    n = len(batch) - excluded
    for col, b in enumerate(b_values):
        fails = sum(counts[a] for a, row in zip(keys, rows) if row[col])
        res.add("b", b, n, fails)
    if excluded:
        res.add("excluded_detectors_gt", max_detectors, len(batch), excluded)
    return res


# -- required threshold survey -------------------------------------------------

@dataclass
class WthSurvey:
    shots: int
    considered: int
    maxima: dict
    largest_n: int


def _bounds_row(active, g, t_lo, t_hi):
    pg_lo = build_path_graph(g, t_lo.weights, active, t_lo)
    pg_hi = build_path_graph(g, t_hi.weights, active, t_hi)
    wmax = default_w_max(pg_hi.n)
    w_lo, _ = path_graph_mwpm(pg_lo)
    w_hi, _ = path_graph_mwpm(pg_hi)
    return (
        required_wth_bound(pg_hi, Scheme.AMPLIFIED, wmax, w_hi),
        required_wth_bound(pg_hi, Scheme.PLAIN, wmax, w_hi),
        required_wth_bound(pg_lo, Scheme.PLAIN, wmax, w_lo),
    )


def wth_survey(g: DetectorGraph, shots: int, seed: int, b_low: int = 4, b_high: int = 8,
               max_size: int = 28, workers: Optional[int] = None,
               batch: Optional[ShotBatch] = None) -> WthSurvey:
    """Largest 2*(perturbed MWPM weight)+1 seen per (scheme, precision) over sampled shots."""
    if batch is None:
        batch = sample_batch(g, shots, seed)
    t_lo = DistanceTable(g, discretize(g, scale_for_precision(g, b_low)))
    t_hi = DistanceTable(g, discretize(g, scale_for_precision(g, b_high)))
    counts = Counter(batch.active)
    keys = sorted(a for a in counts if 0 < 2 * len(a) <= max_size)
    rows = parallel_map(partial(_bounds_row, g=g, t_lo=t_lo, t_hi=t_hi), keys, workers)
    names = (f"amplified/b{b_high}", f"plain/b{b_high}", f"plain/b{b_low}")
    maxima = {nm: max((r[k] for r in rows), default=0) for k, nm in enumerate(names)}
    considered = sum(c for a, c in counts.items() if 2 * len(a) <= max_size)
    largest = max((2 * len(a) for a in keys), default=0)
    return WthSurvey(len(batch), considered, maxima, largest)


# -- threshold sweep ----------------------------------------------------------

def _prefix_failures(pg_gen: PathGraph, pg_score: PathGraph, reference: int, seed: int,
                     w_ths: Sequence[int], ks: Sequence[int], rng: str) -> list[list[bool]]:
    # one profile per trial at the largest threshold serves every smaller one
    w_max = default_w_max(pg_gen.n)
    seeds = [seed + t for t in range(max(ks))]
    profs = trial_profiles(pg_gen, Scheme.PLAIN, w_max, seeds, max(w_ths), rng)
    table = []
    for w_th in w_ths:
        best = None
        prefix = []
        for pw, prof in profs:
            o = outcome_from_profile(prof, pg_gen, pw, w_th)
            if o.status is Status.MATCHING:
                w = matching_weight(o.matching, pg_score)
                if best is None or w < best:
                    best = w
            prefix.append(best)
        table.append([prefix[k - 1] is None or prefix[k - 1] > reference for k in ks])
    return table


def _threshold_shot(item, g, t_lo, t_hi, full, w_ths, mults, methods, rng):
    shot, active, seed = item
    if not active:
        return None
    pg_hi = build_path_graph(g, t_hi.weights, active, t_hi)
    ref, _ = path_graph_mwpm(pg_hi)
    ks = [m * default_w_max(pg_hi.n) for m in mults]
    out = {}
    for method in methods:
        if method == "base":
            pg_gen = pg_hi
        else:
            pg_gen = build_path_graph(g, t_lo.weights, active, t_lo)
        out[method] = _prefix_failures(pg_gen, pg_hi, ref, seed, w_ths, ks, rng)
    return out


def threshold_sweep(g: DetectorGraph, w_th_list: Sequence[int], k_multipliers: Sequence[int],
                    shots: int, seed: int, b_low: int = 4, b_high: int = 8, max_size: int = 28,
                    methods: Sequence[str] = ("base", "extended"), rng: str = "pcg64",
                    workers: Optional[int] = None, batch: Optional[ShotBatch] = None) -> SweepResult:
    """Failure fraction of the multi-trial decoder over a (w_th, K) grid.

    ``base`` draws candidates from the b_high path graph; ``extended`` draws
    them from the b_low path graph and scores on b_high.  A shot fails when
    no candidate survives or the chosen matching is heavier than the exact
    b_high MWPM.  K = multiplier * W_max, trial seeds are shared across the
    grid so the K series are nested.  Shots whose path graph exceeds
    ``max_size`` vertices are excluded.  The last row reports the logical
    error proxy: how often the exact MWPM correction (full-precision
    weights) disagrees with the sampled faults' logical class.
    """
    w_ths = sorted(set(int(w) for w in w_th_list))
    mults = sorted(set(int(m) for m in k_multipliers))
    for m in methods:
        if m not in ("base", "extended"):
            raise ValueError(f"unknown method {m!r}")
    if batch is None:
        batch = sample_batch(g, shots, seed)
    t_lo = DistanceTable(g, discretize(g, scale_for_precision(g, b_low)))
    t_hi = DistanceTable(g, discretize(g, scale_for_precision(g, b_high)))
    full = DistanceTable(g, full_precision(g))
    items = []
    kept = 0
    for s, act in enumerate(batch.active):
        if 2 * len(act) > max_size:
            continue
        kept += 1
        if act:
            items.append((s, act, shot_seed(seed, s)))
    fn = partial(_threshold_shot, g=g, t_lo=t_lo, t_hi=t_hi, full=full, w_ths=w_ths,
                 mults=mults, methods=tuple(methods), rng=rng)
    rows = parallel_map(fn, items, workers)
    res = SweepResult()
    for method in methods:
        for km, m in enumerate(mults):
            axis = f"w_th|{method}|K={m}xWmax"
            for kw, w_th in enumerate(w_ths):
                fails = sum(1 for r in rows if r is not None and r[method][kw][km])
                res.add(axis, w_th, kept, fails)
    # logical proxy from the exact reference correction, per distinct syndrome
    parity = {}
    logical = 0
    for s, act in enumerate(batch.active):
        if 2 * len(act) > max_size:
            continue
        if act not in parity:
            parity[act] = reference_correction(full, act).parity
        logical += parity[act] != bool(batch.parity[s])
    res.add("logical_proxy", "reference", kept, logical)
    res.add("excluded_size_gt", max_size, len(batch), len(batch) - kept)
    return res
