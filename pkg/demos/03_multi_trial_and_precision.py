"""
Shorter rings: many cheap trials, coarse weights
================================================

Plain perturbation keeps the determinant's exponents small.  Running K trials
and keeping the lightest candidate recovers the minimum; generating the
candidates with 4-bit weights and scoring them with 8-bit weights shrinks the
ring further.
"""

from polymatch import Scheme, default_w_max
from polymatch.graph_model import DistanceTable, build_path_graph, discretize, scale_for_precision
from polymatch.heuristic import (
    HeuristicConfig,
    multi_trial_decode,
    required_wth_bound,
    variable_precision_decode,
)
from polymatch.oracle import path_graph_mwpm
from polymatch.sim import NoiseModel, build_surface_detector_graph, sample_batch

g = build_surface_detector_graph(NoiseModel(5, p=3e-3, spread=1.0, seed=11))
hi = DistanceTable(g, discretize(g, scale_for_precision(g, 8)))
lo = DistanceTable(g, discretize(g, scale_for_precision(g, 4)))

batch = sample_batch(g, 2000, seed=1)
act = max(batch.active, key=len)
print(len(act), "active detectors:", act)

pg_hi = build_path_graph(g, hi.weights, act, hi)
pg_lo = build_path_graph(g, lo.weights, act, lo)
exact, _ = path_graph_mwpm(pg_hi)
print("exact MWPM weight at 8 bits:", exact)

for scheme, pg in (("amplified b=8", pg_hi), ("plain b=8", pg_hi), ("plain b=4", pg_lo)):
    s = Scheme.AMPLIFIED if scheme.startswith("amp") else Scheme.PLAIN
    print(f"{scheme:14s} needs w_th >= {required_wth_bound(pg, s, default_w_max(pg.n))}")

# at 8 bits, 512 is usually too short for a shot this size; 2048 is not
for w_th in (512, 2048):
    for k in (1, 2, 4, 8, 16, 32):
        out = multi_trial_decode(pg_hi, HeuristicConfig(w_th=w_th, num_trials=k, base_seed=5))
        print("w_th", w_th, "K =", k, out.status.value, out.weight)

cfg = HeuristicConfig(w_th=512, base_seed=5)
out = variable_precision_decode(g, act, cfg, (lo, hi))
print("variable precision:", out.status.value, out.weight, "from", out.candidates, "candidates")
