"""
Decoding a matching from one determinant
========================================

Build the symmetric matrix with entries X^(w + W) for a small graph,
read the minimum-weight perfect matching off the lowest term of its
determinant, and watch the overflow check fire when the threshold is too
small.
"""

import numpy as np

from polymatch import PathGraph, Scheme, decode, perturb
from polymatch.det_decoder import build_matrix, determinant
from polymatch.oracle import exhaustive_mwpm

# a 6-cycle with two chords
weights = {(0, 1): 4, (1, 2): 1, (2, 3): 3, (3, 4): 2, (4, 5): 5, (0, 5): 1,
           (0, 3): 2, (1, 4): 6}
pg = PathGraph.from_weights(6, weights)

pw = perturb(pg, Scheme.AMPLIFIED, w_max=4, seed=3)
print("perturbations", pw.perturbations)
print("effective", pw.effective)

B = build_matrix(pg, pw, 256)
det = determinant(B)
print("lowest exponent of det:", det.min_degree())

out = decode(pg, pw, 256)
print(out.status.value, "w* =", out.w_star, "matching", out.matching, "weight", out.weight)

best, ms = exhaustive_mwpm(pg)
print("brute force:", best, ms)

# squeeze the ring: once 2 w* no longer fits, decode reports it rather than guessing
for w_th in (2 * out.w_star + 1, 2 * out.w_star):
    print(w_th, decode(pg, pw, w_th).status.value)

# same graph, unamplified weights: cheaper ring, no guarantee on the original weights
rng = np.random.default_rng(0)
for t in range(4):
    o = decode(pg, perturb(pg, Scheme.PLAIN, 4, seed=int(rng.integers(1 << 32))), 64)
    print("plain trial", t, o.status.value, o.weight)
