"""Command line entry point (``polymatch`` / ``python -m polymatch``)."""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from typing import Optional

import numpy as np

from .det_decoder import Scheme, Status, decode, default_w_max, perturb, random_seed
from .graph_model import (
    DetectorGraph,
    DistanceTable,
    build_path_graph,
    discretize,
    fixed_weights,
    read_detector_graph,
    read_syndromes,
    scale_for_precision,
    write_detector_graph,
    write_syndromes,
)
from .heuristic import (
    HeuristicConfig,
    multi_trial_decode,
    required_wth_bound,
    variable_precision_decode,
)
from .oracle import (
    appendix_a_decode,
    exhaustive_mwpm,
    random_even_graph,
)
from .sim import (
    NoiseModel,
    build_surface_detector_graph,
    precision_sweep,
    sample_batch,
    shot_seed,
    threshold_sweep,
)


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


@contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def _noise_args(p: argparse.ArgumentParser, default_p: float = 1e-3):
    p.add_argument("--d", type=int, default=5, help="code distance (odd)")
    p.add_argument("--rounds", type=int, default=None, help="measurement rounds (default d)")
    p.add_argument("--p", type=float, default=default_p, help="physical error rate")
    p.add_argument("--p-meas", type=float, default=None, help="measurement error rate (default p)")
    p.add_argument("--spread", type=float, default=0.0,
                   help="log-uniform spread of per-location rates (0 = uniform)")
    p.add_argument("--noise-seed", type=int, default=0, help="seed for the rate spread")


def _graph_from(args) -> DetectorGraph:
    if getattr(args, "graph", None):
        return read_detector_graph(args.graph)
    nm = NoiseModel(args.d, args.p, args.rounds, args.p_meas, args.spread, args.noise_seed)
    return build_surface_detector_graph(nm)


# -- decode -------------------------------------------------------------------

def _format_shot(shot: int, outcome, pg) -> str:
    if outcome.status is Status.MATCHING:
        pairs = " ".join(f"{pg.labels[i]}-{pg.labels[j]}" for i, j in outcome.matching) or "-"
        return (f"shot {shot} status {outcome.status.value} wstar {outcome.w_star} "
                f"weight {int(outcome.weight)} edges {pairs}")
    return f"shot {shot} status {outcome.status.value} wstar -1 weight -1 edges -"


def _weight_tables(g: DetectorGraph, b_low: Optional[int], b_high: int):
    if all(w is not None for w in g.overrides) and g.overrides:
        t = DistanceTable(g, fixed_weights(g))
        return t, t
    hi = DistanceTable(g, discretize(g, scale_for_precision(g, b_high)))
    if b_low is None or b_low == b_high:
        return hi, hi
    return DistanceTable(g, discretize(g, scale_for_precision(g, b_low))), hi


def cmd_decode(args) -> int:
    g = read_detector_graph(args.graph)
    shots = read_syndromes(args.syndromes)
    scheme = Scheme(args.scheme)
    seed = args.seed if args.seed is not None else random_seed()
    b_low = args.b_low if scheme is Scheme.PLAIN else None
    t_lo, t_hi = _weight_tables(g, b_low, args.b_high)
    variable = t_lo is not t_hi
    with _output(args.out) as fh:
        fh.write(f"# seed {seed}\n")
        for shot, active in enumerate(shots):
            trials = args.trials
            if trials is None and scheme is Scheme.AMPLIFIED:
                trials = 1
            cfg = HeuristicConfig(w_th=args.w_th, num_trials=trials, w_max=args.w_max,
                                  b_low=args.b_low if variable else args.b_high,
                                  b_high=args.b_high, base_seed=shot_seed(seed, shot),
                                  rng=args.rng)
            pg_hi = build_path_graph(g, t_hi.weights, active, t_hi)
            if variable:
                out = variable_precision_decode(g, active, cfg, (t_lo, t_hi))
            else:
                out = multi_trial_decode(pg_hi, cfg, scheme)
            fh.write(_format_shot(shot, out, pg_hi) + "\n")
    return 0


# -- gen-graph ----------------------------------------------------------------

def cmd_gen_graph(args) -> int:
    g = _graph_from(args)
    write_detector_graph(g, args.out)
    if args.shots:
        if not args.syndromes:
            raise SystemExit("--shots needs --syndromes FILE")
        batch = sample_batch(g, args.shots, args.seed)
        write_syndromes(batch.active, args.syndromes)
    return 0


# -- sweeps -------------------------------------------------------------------

def cmd_sweep_precision(args) -> int:
    g = _graph_from(args)
    bs = list(range(args.b_min, args.b_max + 1))
    res = precision_sweep(g, bs, args.shots, args.seed, max_detectors=args.max_detectors,
                          workers=args.workers)
    with _output(args.out) as fh:
        fh.write(res.to_csv())
    return 0


def cmd_sweep_threshold(args) -> int:
    g = _graph_from(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    res = threshold_sweep(g, _ints(args.w_th_list), _ints(args.k_multipliers), args.shots,
                          args.seed, b_low=args.b_low, b_high=args.b_high,
                          max_size=args.max_size, methods=methods, rng=args.rng,
                          workers=args.workers)
    with _output(args.out) as fh:
        fh.write(res.to_csv())
    return 0


# -- oracle-check -------------------------------------------------------------

def cmd_oracle_check(args) -> int:
    """Random even graphs: ring decoder vs exhaustive MWPM vs exact integer decoder."""
    rng = np.random.default_rng(args.seed)
    sizes = [n for n in range(2, args.n_max + 1, 2)]
    bad = 0
    with _output(args.out) as fh:
        fh.write("n,cases,isolated,correct,overflow_detected,integer_agree\n")
        for n in sizes:
            iso = correct = overflow = agree = 0
            for _ in range(args.cases):
                pg = random_even_graph(n, rng, weight_max=args.weight_max)
                w_max = default_w_max(n)
                pw = perturb(pg, Scheme.AMPLIFIED, w_max, seed=int(rng.integers(2 ** 32)))
                w_th = required_wth_bound(pg, Scheme.AMPLIFIED, w_max) + 2
                out = decode(pg, pw, w_th)
                w, ms = exhaustive_mwpm(pg, pw.effective, limit=None)
                if len(ms) == 1:
                    iso += 1
                    correct += out.ok and set(out.matching) == set(ms[0]) and out.w_star == w
                    ref = appendix_a_decode(pg, pw)
                    agree += ref.w_star == out.w_star and set(ref.matching) == set(out.matching)
                over = [decode(pg, pw, t).status for t in (2 * w, 2 * w - 1)]
                overflow += all(s is Status.OVERFLOW_FAILURE for s in over)
            bad += (correct != iso) + (agree != iso) + (overflow != args.cases)
            fh.write(f"{n},{args.cases},{iso},{correct},{overflow},{agree}\n")
    if bad:
        print(f"oracle-check: {bad} disagreeing size(s)", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polymatch", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", help="decode syndromes against a detector graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--syndromes", required=True)
    p.add_argument("--w-th", type=int, default=512)
    p.add_argument("--scheme", choices=[s.value for s in Scheme], default="plain")
    p.add_argument("--trials", type=int, default=None, help="K (default 8*W_max; 1 if amplified)")
    p.add_argument("--w-max", type=int, default=None, help="W_max (default ceil(0.8 n^0.8))")
    p.add_argument("--b-low", type=int, default=4)
    p.add_argument("--b-high", type=int, default=8)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rng", choices=["pcg64", "mt19937"], default="pcg64")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("gen-graph", help="write a surface-code detector graph")
    _noise_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--shots", type=int, default=0, help="also sample this many syndromes")
    p.add_argument("--syndromes", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("sweep-precision", help="MWPM mismatch rate vs binary precision")
    _noise_args(p)
    p.add_argument("--graph", default=None, help="detector graph file instead of the generator")
    p.add_argument("--b-min", type=int, default=2)
    p.add_argument("--b-max", type=int, default=12)
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-detectors", type=int, default=20)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep_precision)

    p = sub.add_parser("sweep-threshold", help="failure rate over (w_th, K)")
    _noise_args(p)
    p.add_argument("--graph", default=None)
    p.add_argument("--w-th-list", default="128,256,512,1024")
    p.add_argument("--k-multipliers", default="1,2,4,8")
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--b-low", type=int, default=4)
    p.add_argument("--b-high", type=int, default=8)
    p.add_argument("--max-size", type=int, default=28)
    p.add_argument("--methods", default="base,extended")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rng", choices=["pcg64", "mt19937"], default="pcg64")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep_threshold)

    p = sub.add_parser("oracle-check", help="cross-check decoders on random graphs")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--cases", type=int, default=50)
    p.add_argument("--weight-max", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
