"""
Monte Carlo sweeps on a d=5 surface code
========================================

Small versions of the three experiments: how many bits of weight precision
the matching needs, how long the ring must be under each perturbation
scheme, and how the multi-trial decoder fails as w_th and K vary.  The CLI
(`polymatch sweep-precision`, `polymatch sweep-threshold`) runs the same
code at larger shot counts.
"""

from polymatch.sim import (
    NoiseModel,
    build_surface_detector_graph,
    precision_sweep,
    sample_batch,
    threshold_sweep,
    wth_survey,
)

g = build_surface_detector_graph(NoiseModel(5, p=3e-3, spread=1.0, seed=11))
print(len(g.detectors), "detectors,", g.num_edges, "edges")

batch = sample_batch(g, 5000, seed=7)
print(sum(1 for a in batch.active if a), "of", len(batch), "shots have a non-empty syndrome")

res = precision_sweep(g, range(2, 11), 5000, 7, batch=batch)
print(res.to_csv())

sv = wth_survey(g, 5000, 7, batch=batch)
print("largest path graph", sv.largest_n, "maxima", sv.maxima)

res = threshold_sweep(g, [128, 512], [1, 4], 1000, 7)
print(res.to_csv())
