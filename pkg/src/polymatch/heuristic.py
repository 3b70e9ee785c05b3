"""Bit-length reduction: multi-trial plain perturbation and variable precision.

Plain perturbation (``w + W``, no amplification) keeps effective weights
small but gives up the guarantee that the isolated matching is minimal for
the original weights.  Running K independent trials and keeping the
candidate with the lowest original weight recovers most of it.  Variable
precision goes further: candidates come from a coarse weight function (small
ring), and a fine weight function picks among them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .det_decoder import (
    DecodeOutcome,
    InternalInconsistencyError,
    PerturbedWeights,
    RingProfile,
    Scheme,
    Status,
    amplification_factor,
    decode,
    default_w_max,
    perturb,
    ring_profile,
)
from .graph_model import (
    DetectorGraph,
    DistanceTable,
    PathGraph,
    build_path_graph,
    discretize,
    scale_for_precision,
)

__all__ = [
    "HeuristicConfig",
    "matching_weight",
    "run_trials",
    "trial_profiles",
    "select_candidate",
    "multi_trial_decode",
    "variable_precision_decode",
    "precision_pair",
    "required_wth_bound",
]


@dataclass(frozen=True)
class HeuristicConfig:
    """Knobs for the heuristic decoders.

    ``num_trials`` and ``w_max`` may be left as None, in which case they are
    resolved per path graph: W_max = ceil(0.8 n^0.8), K = trial_factor * W_max.
    """

    w_th: int = 512
    num_trials: Optional[int] = None
    w_max: Optional[int] = None
    b_low: int = 4
    b_high: int = 8
    base_seed: int = 0
    trial_factor: int = 8
    rng: str = "pcg64"
    early_exit: bool = False

    def __post_init__(self):
        if self.w_th < 1:
            raise ValueError("w_th must be positive")
        if self.num_trials is not None and self.num_trials < 1:
            raise ValueError("need at least one trial")
        if self.w_max is not None and self.w_max < 1:
            raise ValueError("w_max must be positive")
        if self.b_low < 1 or self.b_high < self.b_low:
            raise ValueError("need 1 <= b_low <= b_high")

    def resolve_w_max(self, n: int) -> int:
        return self.w_max if self.w_max is not None else default_w_max(n)

    def resolve_trials(self, n: int) -> int:
        if self.num_trials is not None:
            return self.num_trials
        return self.trial_factor * self.resolve_w_max(n)


def matching_weight(matching: Iterable[tuple[int, int]], pg: PathGraph,
                    weights: Optional[Sequence] = None):
    """Total of ``pg``'s weights (or ``weights``, aligned with pg.edges) over ``matching``."""
    w = pg.weights if weights is None else weights
    total = 0
    for i, j in matching:
        if not pg.has_edge(i, j):
            raise KeyError(f"({i}, {j}) is not an edge of the path graph")
        total += w[pg.edge_index(i, j)]
    return total


def run_trials(pg: PathGraph, scheme: Scheme, w_max: int, seeds: Sequence[int], w_th: int,
               rng: str = "pcg64") -> list[tuple[PerturbedWeights, DecodeOutcome]]:
    out = []
    for s in seeds:
        pw = perturb(pg, scheme, w_max, seed=s, rng=rng)
        out.append((pw, decode(pg, pw, w_th)))
    return out


def trial_profiles(pg: PathGraph, scheme: Scheme, w_max: int, seeds: Sequence[int], w_th: int,
                   rng: str = "pcg64") -> list[tuple[PerturbedWeights, RingProfile]]:
    """Per-trial ring profiles at ``w_th``; outcomes at any smaller threshold follow from these."""
    out = []
    for s in seeds:
        pw = perturb(pg, scheme, w_max, seed=s, rng=rng)
        out.append((pw, ring_profile(pg, pw, w_th)))
    return out


def select_candidate(outcomes: Sequence[DecodeOutcome], score_pg: PathGraph,
                     w_th: Optional[int] = None) -> DecodeOutcome:
    """Lowest ``score_pg`` weight among MATCHING outcomes; earliest trial wins ties.

    With no candidate at all the result is OVERFLOW_FAILURE, unless every
    trial came back NOT_ISOLATED (then that status is passed through).
    """
    best = None
    best_w = None
    count = 0
    for t, o in enumerate(outcomes):
        if o.status is not Status.MATCHING:
            continue
        count += 1
        w = matching_weight(o.matching, score_pg)
        if best is None or w < best_w:
            best, best_w = (t, o), w
    if best is None:
        if outcomes and all(o.status is Status.NOT_ISOLATED for o in outcomes):
            return DecodeOutcome(Status.NOT_ISOLATED, w_th=w_th, candidates=0)
        return DecodeOutcome(Status.OVERFLOW_FAILURE, w_th=w_th, candidates=0)
    t, o = best
    return replace(o, weight=best_w, trial=t, candidates=count)


def multi_trial_decode(pg_high: PathGraph, cfg: HeuristicConfig,
                       scheme: Scheme = Scheme.PLAIN) -> DecodeOutcome:
    """K perturbation trials with seeds base_seed + t; keep the lightest valid matching.

    A trial is a candidate only if its edge set is a perfect matching whose
    effective weight equals w*; NOT_ISOLATED and OVERFLOW_FAILURE trials
    are discarded.
    """
    if pg_high.n % 2:
        raise ValueError("path graph must have even order")
    w_max = cfg.resolve_w_max(pg_high.n)
    k = cfg.resolve_trials(pg_high.n)
    outcomes = []
    for t in range(k):
        pw = perturb(pg_high, scheme, w_max, seed=cfg.base_seed + t, rng=cfg.rng)
        o = decode(pg_high, pw, cfg.w_th)
        outcomes.append(o)
        if cfg.early_exit and o.ok:
            break
    return select_candidate(outcomes, pg_high, cfg.w_th)


def precision_pair(g: DetectorGraph, active, b_low: int, b_high: int,
                   tables: Optional[tuple[DistanceTable, DistanceTable]] = None):
    """Path graphs for the same active set under the b_low and b_high weight functions."""
    if tables is None:
        lo = discretize(g, scale_for_precision(g, b_low))
        hi = discretize(g, scale_for_precision(g, b_high))
        tables = (DistanceTable(g, lo), DistanceTable(g, hi))
    t_lo, t_hi = tables
    return (build_path_graph(g, t_lo.weights, active, t_lo),
            build_path_graph(g, t_hi.weights, active, t_hi))


def _transfer(o: DecodeOutcome, pg_from: PathGraph, pg_to: PathGraph) -> DecodeOutcome:
    if pg_from.n != pg_to.n:
        raise InternalInconsistencyError("precision levels disagree on the vertex set")
    for i, j in o.matching:
        if not pg_to.has_edge(i, j):
            raise InternalInconsistencyError(f"candidate edge ({i}, {j}) missing at high precision")
    return o


def variable_precision_decode(g: DetectorGraph, active, cfg: HeuristicConfig,
                              tables: Optional[tuple[DistanceTable, DistanceTable]] = None
                              ) -> DecodeOutcome:
    """Generate candidates on the b_low path graph, score them on the b_high one."""
    pg_lo, pg_hi = precision_pair(g, active, cfg.b_low, cfg.b_high, tables)
    if cfg.b_low == cfg.b_high:
        return multi_trial_decode(pg_hi, cfg)
    w_max = cfg.resolve_w_max(pg_lo.n)
    k = cfg.resolve_trials(pg_lo.n)
    outcomes = []
    for t in range(k):
        pw = perturb(pg_lo, Scheme.PLAIN, w_max, seed=cfg.base_seed + t, rng=cfg.rng)
        o = decode(pg_lo, pw, cfg.w_th)
        if o.ok:
            _transfer(o, pg_lo, pg_hi)
        outcomes.append(o)
        if cfg.early_exit and o.ok:
            break
    return select_candidate(outcomes, pg_hi, cfg.w_th)


def required_wth_bound(pg: PathGraph, scheme: Scheme, w_max: int,
                       mwpm_weight: Optional[int] = None) -> int:
    """2 * (scheme-scaled MWPM weight + every perturbation at W_max) + 1.

    Any threshold above this keeps 2 w* representable for every draw.
    ``mwpm_weight`` is computed exactly when not supplied.
    """
    if pg.n == 0:
        return 1
    if mwpm_weight is None:
        from .oracle import reference_mwpm
        mwpm_weight, _ = reference_mwpm(pg)
    amp = amplification_factor(pg.n, w_max) if Scheme(scheme) is Scheme.AMPLIFIED else 1
    return 2 * (amp * int(mwpm_weight) + (pg.n // 2) * w_max) + 1
