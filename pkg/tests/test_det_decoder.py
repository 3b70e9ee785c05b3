import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polymatch.det_decoder import (
    InternalInconsistencyError,
    PerturbedWeights,
    RingMatrix,
    RingProfile,
    Scheme,
    Status,
    adjugate,
    amplification_factor,
    berkowitz,
    berkowitz_f2,
    build_matrix,
    charpoly,
    decode,
    default_w_max,
    determinant,
    minor,
    outcome_from_profile,
    perturb,
    perturb_with,
    ring_profile,
)
from polymatch.graph_model import PathGraph
from polymatch.oracle import exhaustive_mwpm, is_isolated, random_even_graph
from polymatch.poly_gf2 import TruncatedPoly, monomial

from _oracles import all_matchings, leibniz_f2


def two_vertex(w):
    return PathGraph(2, ((0, 1),), (w,))


def fixed(pg, eff):
    """PLAIN perturbation with every W(e)=1 on weights eff-1, i.e. effective = eff."""
    base = PathGraph(pg.n, pg.edges, tuple(e - 1 for e in eff))
    return base, perturb_with(base, Scheme.PLAIN, 1, [1] * len(eff))


def random_matrix(rng, n, w_th, monomial_only):
    bits = []
    for _ in range(n):
        row = []
        for _ in range(n):
            if rng.random() < 0.3:
                row.append(0)
            elif monomial_only:
                row.append(1 << rng.randrange(w_th))
            else:
                row.append(rng.getrandbits(w_th))
        bits.append(row)
    return RingMatrix.from_polys([[TruncatedPoly(b, w_th) for b in r] for r in bits])


# -- perturbation -------------------------------------------------------------

def test_amplification_factor_example():
    assert amplification_factor(4, 3) == 5
    assert amplification_factor(2, 2) == 2


def test_default_w_max():
    assert default_w_max(28) == 12
    assert [default_w_max(n) for n in (2, 4, 8, 12)] == [2, 3, 5, 6]


def test_w_max_one_gives_unit_perturbations():
    pg = random_even_graph(6, np.random.default_rng(0))
    pw = perturb(pg, Scheme.PLAIN, 1, seed=9)
    assert set(pw.perturbations) == {1}
    assert pw.effective == tuple(w + 1 for w in pg.weights)


def test_amplified_effective_weights():
    pg = random_even_graph(8, np.random.default_rng(1))
    pw = perturb(pg, Scheme.AMPLIFIED, 5, seed=3)
    c = amplification_factor(8, 5)
    assert pw.amplification == c
    assert pw.effective == tuple(c * w + x for w, x in zip(pg.weights, pw.perturbations))
    assert all(1 <= x <= 5 for x in pw.perturbations)


def test_perturb_is_seeded():
    pg = random_even_graph(10, np.random.default_rng(2))
    a = perturb(pg, Scheme.PLAIN, 7, seed=123)
    b = perturb(pg, Scheme.PLAIN, 7, seed=123)
    c = perturb(pg, Scheme.PLAIN, 7, seed=124)
    assert a == b and a.perturbations != c.perturbations
    m = perturb(pg, Scheme.PLAIN, 7, seed=123, rng="mt19937")
    assert m == perturb(pg, Scheme.PLAIN, 7, seed=123, rng="mt19937")
    # the compatibility generator is the classic MT19937 stream
    assert list(m.perturbations) == list(np.random.RandomState(123).randint(1, 8, len(pg.edges)))


def test_unseeded_perturb_records_a_32_bit_seed():
    pw = perturb(two_vertex(3), Scheme.PLAIN, 4)
    assert 0 <= pw.seed < 2 ** 32


def test_perturbation_range_checked():
    with pytest.raises(ValueError):
        PerturbedWeights(Scheme.PLAIN, 2, None, (3,), (4,))
    with pytest.raises(ValueError):
        perturb_with(two_vertex(3), Scheme.PLAIN, 2, [1, 1])
    with pytest.raises(ValueError):
        perturb_with(PathGraph(2, ((0, 1),), (1.5,)), Scheme.PLAIN, 2, [1])


@given(st.integers(1, 40), st.integers(0, 2 ** 32 - 1))
def test_perturbations_stay_in_range(w_max, seed):
    pg = random_even_graph(6, np.random.default_rng(seed % 97))
    pw = perturb(pg, Scheme.PLAIN, w_max, seed=seed)
    assert all(1 <= x <= w_max for x in pw.perturbations)


# -- matrix construction --------------------------------------------------------

def test_build_matrix_examples():
    pg, pw = fixed(two_vertex(0), [3])
    m = build_matrix(pg, pw, 8)
    assert m.entry(0, 1) == monomial(3, 8) == m.entry(1, 0)
    assert m.entry(0, 0).is_zero() and m.entry(1, 1).is_zero()
    pg, pw = fixed(two_vertex(0), [9])
    assert build_matrix(pg, pw, 8).entry(0, 1).is_zero()

    cyc = PathGraph.from_weights(4, {(0, 1): 0, (1, 2): 0, (2, 3): 0, (0, 3): 0})
    pg, pw = fixed(cyc, [1, 4, 2, 3])
    m = build_matrix(pg, pw, 16)
    assert m.n == 4 and m.is_symmetric()
    assert all(m.entry(i, i).is_zero() for i in range(4))
    assert m.entry(0, 1) == monomial(1, 16) and m.entry(3, 0) == monomial(4, 16)
    assert m.entry(0, 2).is_zero()


# -- determinant and minors -----------------------------------------------------

def test_determinant_examples():
    pg, pw = fixed(two_vertex(0), [3])
    m = build_matrix(pg, pw, 8)
    assert determinant(m) == monomial(6, 8)
    assert minor(m, 0, 1) == monomial(3, 8)
    eye = RingMatrix.from_polys([[monomial(0, 8) if i == j else TruncatedPoly.zero(8)
                                  for j in range(5)] for i in range(5)])
    assert determinant(eye) == TruncatedPoly.one(8)


def test_minor_of_diagonal_matrix():
    diag = [[TruncatedPoly.zero(32)] * 3 for _ in range(3)]
    diag = [list(r) for r in diag]
    for i, e in enumerate((2, 5, 7)):
        diag[i][i] = monomial(e, 32)
    m = RingMatrix.from_polys(diag)
    assert minor(m, 1, 1) == monomial(9, 32)
    assert minor(m, 0, 0) == monomial(12, 32)


def test_minor_index_checks():
    pg, pw = fixed(two_vertex(0), [3])
    m = build_matrix(pg, pw, 8)
    with pytest.raises(IndexError):
        minor(m, 2, 0)
    with pytest.raises(IndexError):
        minor(m, 0, -1)


@pytest.mark.parametrize("monomial_only", [True, False])
def test_determinant_matches_leibniz(monomial_only):
    rng = random.Random(17 if monomial_only else 18)
    for n in range(1, 7):
        for _ in range(4 if n == 6 else 10):
            w_th = rng.choice([5, 16, 40])
            m = random_matrix(rng, n, w_th, monomial_only)
            assert determinant(m).bits == leibniz_f2(m.bits, w_th)


def test_minor_matches_leibniz_on_submatrix():
    rng = random.Random(3)
    for _ in range(10):
        m = random_matrix(rng, 5, 24, monomial_only=rng.random() < 0.5)
        i, j = rng.randrange(5), rng.randrange(5)
        sub = [[m.bits[r][c] for c in range(5) if c != j] for r in range(5) if r != i]
        assert minor(m, i, j).bits == leibniz_f2(sub, 24)


@pytest.mark.parametrize("monomial_only", [True, False])
def test_adjugate_holds_all_minors(monomial_only):
    rng = random.Random(8)
    for n in (2, 3, 5, 6):
        m = random_matrix(rng, n, 30, monomial_only)
        adj = adjugate(m)
        for i in range(n):
            for j in range(n):
                assert adj[j][i] == minor(m, i, j)


def test_specialized_kernel_matches_generic():
    rng = random.Random(21)
    for n in (2, 4, 7, 10):
        m = random_matrix(rng, n, 64, monomial_only=True)
        ring, rows = m._sparse()
        assert berkowitz_f2(n, rows, 64) == berkowitz(n, rows, ring)
        assert [c.bits for c in charpoly(m)] == berkowitz(n, rows, ring)


def test_adjugate_and_per_edge_profiles_identical():
    rng = np.random.default_rng(4)
    for n in (2, 6, 10, 14):
        pg = random_even_graph(n, rng, weight_max=40)
        pw = perturb(pg, Scheme.PLAIN, default_w_max(n), seed=n)
        for w_th in (30, 200):
            assert ring_profile(pg, pw, w_th) == ring_profile(pg, pw, w_th, minors="per_edge")
    with pytest.raises(ValueError):
        ring_profile(pg, pw, 10, minors="magic")


def test_determinant_invariant_under_relabeling():
    rng = np.random.default_rng(6)
    for _ in range(10):
        pg = random_even_graph(8, rng, weight_max=30)
        pw = perturb(pg, Scheme.PLAIN, 5, seed=int(rng.integers(1000)))
        perm = rng.permutation(8)
        moved = {(int(perm[i]), int(perm[j])): e for (i, j), e in zip(pg.edges, pw.effective)}
        pg2 = PathGraph.from_weights(8, {k: 0 for k in moved})
        eff2 = [moved.get(e, moved.get((e[1], e[0]))) for e in pg2.edges]
        pg2, pw2 = fixed(pg2, eff2)
        d1 = determinant(build_matrix(pg, pw, 300))
        d2 = determinant(build_matrix(pg2, pw2, 300))
        assert d1 == d2


def test_cancellation_identity():
    """det(B) equals the sum over perfect matchings of X^(2 weight), coefficients mod 2."""
    rng = np.random.default_rng(10)
    for n in (2, 4, 6, 8, 10):
        for _ in range(6):
            pg = random_even_graph(n, rng, weight_max=12, density=0.7)
            pw = perturb(pg, Scheme.PLAIN, 4, seed=int(rng.integers(10 ** 6)))
            w_th = 200
            expect = 0
            for m in all_matchings(n, set(pg.edges)):
                tot = sum(pw.effective[pg.edge_index(i, j)] for i, j in m)
                if 2 * tot < w_th:
                    expect ^= 1 << (2 * tot)
            assert determinant(build_matrix(pg, pw, w_th)).bits == expect


# -- decode ---------------------------------------------------------------------

def test_decode_two_vertex_examples():
    pg, pw = fixed(two_vertex(0), [3])
    out = decode(pg, pw, 8)
    assert out.status is Status.MATCHING and out.w_star == 3 and out.matching == ((0, 1),)
    assert out.effective_weight == 3
    assert decode(pg, pw, 6).status is Status.OVERFLOW_FAILURE
    assert decode(pg, pw, 7).status is Status.MATCHING


def test_decode_empty_graph():
    pg = PathGraph(0, (), ())
    pw = perturb_with(pg, Scheme.PLAIN, 3, [])
    out = decode(pg, pw, 8)
    assert out.ok and out.w_star == 0 and out.matching == () and out.weight == 0


def test_decode_rejects_odd_order():
    pg = PathGraph(3, ((0, 1),), (1,))
    with pytest.raises(ValueError):
        decode(pg, perturb_with(pg, Scheme.PLAIN, 1, [1]), 8)


def test_odd_lowest_exponent_is_internal_error():
    pg, pw = fixed(two_vertex(0), [3])
    with pytest.raises(InternalInconsistencyError):
        outcome_from_profile(RingProfile(16, 1 << 5, (1 << 3,)), pg, pw)


def test_profile_threshold_checks():
    pg, pw = fixed(two_vertex(0), [3])
    prof = ring_profile(pg, pw, 8)
    with pytest.raises(ValueError):
        outcome_from_profile(prof, pg, pw, 9)


def test_not_isolated_is_reported():
    # a 4-cycle whose two perfect matchings tie: det cancels at the tie
    # exponent, so the lowest surviving term cannot yield a valid matching
    eff = {(0, 1): 1, (2, 3): 1, (0, 2): 1, (1, 3): 1, (0, 3): 5}
    sq = PathGraph.from_weights(4, {k: 0 for k in eff})
    pg, pw = fixed(sq, [eff[e] for e in sq.edges])
    out = decode(pg, pw, 64)
    w, ms = exhaustive_mwpm(pg, pw.effective)
    assert len(ms) == 2
    assert out.status is not Status.MATCHING or out.w_star != w


def test_isolated_instances_decode_exactly():
    rng = np.random.default_rng(12)
    seen = 0
    for _ in range(150):
        n = int(rng.choice([2, 4, 6, 8, 10]))
        pg = random_even_graph(n, rng, weight_max=50)
        pw = perturb(pg, Scheme.PLAIN, default_w_max(n), seed=int(rng.integers(2 ** 32)))
        w, ms = exhaustive_mwpm(pg, pw.effective)
        if len(ms) != 1:
            continue
        seen += 1
        out = decode(pg, pw, 2 * w + 1)
        assert out.ok and out.w_star == w and set(out.matching) == set(ms[0])
        assert decode(pg, pw, 2 * w).status is Status.OVERFLOW_FAILURE
    assert seen > 100


def test_amplified_isolated_matching_is_minimal_for_original_weights():
    rng = np.random.default_rng(13)
    for _ in range(60):
        n = int(rng.choice([4, 6, 8]))
        pg = random_even_graph(n, rng, weight_max=20)
        w_max = default_w_max(n)
        pw = perturb(pg, Scheme.AMPLIFIED, w_max, seed=int(rng.integers(2 ** 32)))
        if not is_isolated(pg, pw.effective):
            continue
        out = decode(pg, pw, 10 ** 5)
        best, _ = exhaustive_mwpm(pg)
        assert out.ok and out.weight == best


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 4, 6, 8]), st.integers(1, 400))
def test_decode_invariants(seed, n, w_th):
    rng = np.random.default_rng(seed)
    pg = random_even_graph(n, rng, weight_max=30)
    pw = perturb(pg, Scheme.PLAIN, default_w_max(n), seed=seed)
    out = decode(pg, pw, w_th)
    if out.ok:
        assert pg.is_perfect_matching(out.matching)
        assert sum(pw.effective[pg.edge_index(*e)] for e in out.matching) == out.w_star
        assert 2 * out.w_star < w_th
    w, _ = exhaustive_mwpm(pg, pw.effective)
    if 2 * w >= w_th:
        assert out.status is Status.OVERFLOW_FAILURE
