"""Straightforward reference implementations used only by the tests.

None of these share code with the package: polynomials are coefficient
lists, determinants are Leibniz sums, shortest paths are Floyd-Warshall.
"""

import itertools
import math


def poly_from_bits(bits, w_th):
    return [(bits >> i) & 1 for i in range(w_th)]


def bits_from_poly(coeffs):
    out = 0
    for i, c in enumerate(coeffs):
        if c % 2:
            out |= 1 << i
    return out


def schoolbook_mul(a, b, w_th):
    """Coefficient-list product over F2, truncated to w_th terms."""
    out = [0] * w_th
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y and i + j < w_th:
                out[i + j] ^= 1
    return out


def schoolbook_add(a, b):
    return [(x + y) % 2 for x, y in zip(a, b)]


def perm_sign(p):
    s = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def leibniz_f2(bits, w_th):
    """det of a matrix of packed F2 polynomials by summing all n! permutations."""
    n = len(bits)
    total = [0] * w_th
    for p in itertools.permutations(range(n)):
        term = [1] + [0] * (w_th - 1)
        for i in range(n):
            term = schoolbook_mul(term, poly_from_bits(bits[i][p[i]], w_th), w_th)
            if not any(term):
                break
        total = schoolbook_add(total, term)
    return bits_from_poly(total)


def leibniz_int(mat):
    n = len(mat)
    total = 0
    for p in itertools.permutations(range(n)):
        prod = perm_sign(p)
        for i in range(n):
            prod *= mat[i][p[i]]
            if not prod:
                break
        total += prod
    return total


def floyd_warshall(num_vertices, edges, weights, sinks=()):
    """All-pairs distances; paths may end at a sink but never pass through one."""
    sinks = set(sinks)
    d = [[math.inf] * num_vertices for _ in range(num_vertices)]
    for v in range(num_vertices):
        d[v][v] = 0
    for (u, v), w in zip(edges, weights):
        if w < d[u][v]:
            d[u][v] = d[v][u] = w
    for k in range(num_vertices):
        if k in sinks:
            continue
        for i in range(num_vertices):
            for j in range(num_vertices):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def all_matchings(n, edge_set):
    """Every perfect matching of the graph on range(n) as a frozenset of pairs."""
    out = []

    def rec(rest, acc):
        if not rest:
            out.append(frozenset(acc))
            return
        a = rest[0]
        for k in range(1, len(rest)):
            b = rest[k]
            if (a, b) in edge_set or (b, a) in edge_set:
                rec(rest[1:k] + rest[k + 1:], acc + [(min(a, b), max(a, b))])

    rec(list(range(n)), [])
    return out
