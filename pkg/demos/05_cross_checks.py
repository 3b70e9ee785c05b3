"""
Three decoders, one answer
==========================

On random graphs with an isolated minimum, the truncated-ring decoder, the
exact-integer determinant decoder and brute-force enumeration agree.
"""

import numpy as np

from polymatch import Scheme, decode, default_w_max, perturb
from polymatch.heuristic import required_wth_bound
from polymatch.oracle import appendix_a_decode, exhaustive_mwpm, is_isolated, random_even_graph

rng = np.random.default_rng(42)
rows = []
for n in (4, 6, 8, 10):
    agree = total = 0
    for _ in range(30):
        pg = random_even_graph(n, rng, weight_max=64)
        w_max = default_w_max(n)
        pw = perturb(pg, Scheme.AMPLIFIED, w_max, seed=int(rng.integers(1 << 32)))
        if not is_isolated(pg, pw.effective):
            continue
        total += 1
        ring = decode(pg, pw, required_wth_bound(pg, Scheme.AMPLIFIED, w_max) + 2)
        exact = appendix_a_decode(pg, pw)
        best, _ = exhaustive_mwpm(pg)
        agree += ring.matching == exact.matching and ring.weight == exact.weight == best
    rows.append((n, total, agree))

for n, total, agree in rows:
    print(f"n={n:2d}  isolated {total:2d}  all three agree {agree:2d}")
