"""Detector graphs, integer weight discretization and path-graph construction.

A detector graph has detector and boundary vertices; each edge is a single
fault mechanism with flip probability ``p_e``.  Edge weights are the
discretized negative log-likelihoods ``ceil(-C ln p_e)``.  The decoder never
sees the detector graph directly: for every shot it receives a path graph on
the active detectors (plus one boundary copy per active detector) whose edge
weights are shortest-path distances.

Path-graph vertex layout: for ``a`` active detectors (sorted by id), indices
``0..a-1`` are the detectors and ``a + i`` is the boundary copy of detector
``i``.  Detector ``i`` connects to its own copy with its distance to the
nearest boundary vertex, and the copies form a zero-weight clique, so every
path graph has even order and at least one perfect matching.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "DETECTOR",
    "BOUNDARY",
    "DetectorGraph",
    "WeightFunction",
    "PathGraph",
    "InvalidProbabilityError",
    "UnreachableDetectorError",
    "GraphFormatError",
    "discretize",
    "full_precision",
    "fixed_weights",
    "scale_for_precision",
    "dijkstra",
    "DistanceTable",
    "build_path_graph",
    "read_detector_graph",
    "write_detector_graph",
    "format_detector_graph",
    "parse_detector_graph",
    "read_syndromes",
    "write_syndromes",
]

DETECTOR = "detector"
BOUNDARY = "boundary"

# relative tolerance for treating -C ln p as an exact integer before ceiling
_TIE_RTOL = 2.0 ** -40


class InvalidProbabilityError(ValueError):
    pass


class UnreachableDetectorError(ValueError):
    pass


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class DetectorGraph:
    """Vertices are ``0..num_vertices-1``; ``kinds[v]`` is DETECTOR or BOUNDARY.

    ``logical[k]`` marks edges whose fault flips the logical observable; it
    is only used for logical-class bookkeeping in simulations.
    """

    kinds: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    probabilities: tuple[float, ...]
    overrides: tuple[Optional[int], ...] = ()
    logical: tuple[bool, ...] = ()

    def __post_init__(self):
        m = len(self.edges)
        if len(self.probabilities) != m:
            raise ValueError("one probability per edge required")
        if not self.overrides:
            object.__setattr__(self, "overrides", (None,) * m)
        if not self.logical:
            object.__setattr__(self, "logical", (False,) * m)
        if len(self.overrides) != m or len(self.logical) != m:
            raise ValueError("overrides/logical must align with edges")
        for kind in self.kinds:
            if kind not in (DETECTOR, BOUNDARY):
                raise ValueError(f"unknown vertex kind {kind!r}")
        n = len(self.kinds)
        for (u, v), p in zip(self.edges, self.probabilities):
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if self.kinds[u] == BOUNDARY and self.kinds[v] == BOUNDARY:
                raise ValueError(f"edge ({u}, {v}) touches no detector")
            if not (0.0 < p < 1.0):
                raise InvalidProbabilityError(f"edge ({u}, {v}) has p_e={p!r} outside (0, 1)")

    @property
    def num_vertices(self) -> int:
        return len(self.kinds)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def detectors(self) -> list[int]:
        return [v for v, k in enumerate(self.kinds) if k == DETECTOR]

    @property
    def boundaries(self) -> list[int]:
        return [v for v, k in enumerate(self.kinds) if k == BOUNDARY]

    def is_boundary(self, v: int) -> bool:
        return self.kinds[v] == BOUNDARY


@dataclass(frozen=True)
class WeightFunction:
    """Per-edge weights of a detector graph.

    ``scale`` is the integer factor C for discretized weights and ``None``
    for the floating-point (full precision) log-likelihood weights.
    """

    scale: Optional[int]
    weights: tuple

    @property
    def is_integer(self) -> bool:
        return self.scale is not None


def _ceil_exact(x: float) -> int:
    r = round(x)
    if abs(x - r) <= _TIE_RTOL * max(abs(x), 1.0):
        return int(r)
    return math.ceil(x)


def discretize(g: DetectorGraph, C: int) -> WeightFunction:
    """Integer weights ``ceil(-C ln p_e)`` for every edge."""
    if C < 1:
        raise ValueError("scale factor C must be >= 1")
    weights = []
    for p in g.probabilities:
        if not (0.0 < p < 1.0):
            raise InvalidProbabilityError(f"p_e={p!r} outside (0, 1)")
        weights.append(max(1, _ceil_exact(-C * math.log(p))))
    return WeightFunction(C, tuple(weights))


def full_precision(g: DetectorGraph) -> WeightFunction:
    return WeightFunction(None, tuple(-math.log(p) for p in g.probabilities))


def fixed_weights(g: DetectorGraph) -> WeightFunction:
    """Weights taken verbatim from the per-edge ``w`` overrides of a graph file."""
    if any(w is None for w in g.overrides):
        raise ValueError("not every edge carries a weight override")
    return WeightFunction(1, tuple(int(w) for w in g.overrides))


def scale_for_precision(g: DetectorGraph, b: int) -> int:
    """Smallest C >= 1 whose minimum discretized edge weight has at least b binary digits."""
    if b < 1:
        raise ValueError("binary precision b must be >= 1")
    if not g.edges:
        raise ValueError("graph has no edges")
    target = 1 << (b - 1)
    # the minimum weight comes from the most likely edge; start just below the answer
    worst = -math.log(max(g.probabilities))
    C = max(1, math.floor((target - 1) / worst))
    while min(discretize(g, C).weights) < target:
        C += 1
    return C


def _adjacency(g: DetectorGraph, wf: WeightFunction) -> list[list[tuple[int, object, int]]]:
    adj: list[list[tuple[int, object, int]]] = [[] for _ in range(g.num_vertices)]
    for k, ((u, v), w) in enumerate(zip(g.edges, wf.weights)):
        adj[u].append((v, w, k))
        adj[v].append((u, w, k))
    return adj


def dijkstra(adj, source: int, kinds: Sequence[str]):
    """Single-source shortest paths with a binary heap.

    Boundary vertices are sinks: a path may end on one but never passes
    through it.  Returns ``(dist, pred_edge)`` where ``pred_edge[v]`` is the
    index of the detector-graph edge used to reach ``v`` (-1 if none).
    """
    n = len(adj)
    dist = [math.inf] * n
    pred = [-1] * n
    dist[source] = 0
    heap = [(0, source)]
    done = [False] * n
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if kinds[u] == BOUNDARY and u != source:
            continue
        for v, w, k in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = k
                heapq.heappush(heap, (nd, v))
    return dist, pred


class DistanceTable:
    """Lazily filled lookup table of shortest paths from detectors.

    One instance per (graph, weight function); shots reuse it.  Rows are
    computed on first use, so sharing an instance is cheap even for large
    graphs.
    """

    def __init__(self, g: DetectorGraph, wf: WeightFunction):
        if len(wf.weights) != g.num_edges:
            raise ValueError("weight function does not match graph")
        self.graph = g
        self.weights = wf
        self._adj = _adjacency(g, wf)
        self._rows: dict[int, tuple[list, list]] = {}
        self._boundary: dict[int, tuple[object, int]] = {}

    def _row(self, source: int):
        row = self._rows.get(source)
        if row is None:
            row = dijkstra(self._adj, source, self.graph.kinds)
            self._rows[source] = row
        return row

    def precompute(self) -> "DistanceTable":
        for d in self.graph.detectors:
            self._row(d)
            self.boundary_distance(d)
        return self

    def distance(self, u: int, v: int):
        return self._row(u)[0][v]

    def boundary_distance(self, u: int):
        """(distance, boundary vertex) of the nearest boundary, or (inf, -1)."""
        hit = self._boundary.get(u)
        if hit is None:
            dist = self._row(u)[0]
            best, arg = math.inf, -1
            for b in self.graph.boundaries:
                if dist[b] < best:
                    best, arg = dist[b], b
            hit = (best, arg)
            self._boundary[u] = hit
        return hit

    def path_edges(self, u: int, v: int) -> list[int]:
        """Detector-graph edge indices of a shortest path from ``u`` to ``v``."""
        dist, pred = self._row(u)
        if math.isinf(dist[v]):
            raise UnreachableDetectorError(f"no path from {u} to {v}")
        out = []
        cur = v
        while cur != u:
            k = pred[cur]
            out.append(k)
            a, b = self.graph.edges[k]
            cur = a if b == cur else b
        out.reverse()
        return out


@dataclass(frozen=True)
class PathGraph:
    """Even-order weighted graph handed to the decoders.

    ``edges`` are sorted pairs ``(i, j)`` with ``i < j``; ``weights`` align
    with ``edges``.  ``num_detectors`` is set for graphs produced by
    :func:`build_path_graph` (detector/boundary-copy layout) and ``None``
    for arbitrary graphs.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple
    labels: tuple = ()
    num_detectors: Optional[int] = None
    scale: Optional[int] = None
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.weights) != len(self.edges):
            raise ValueError("one weight per edge required")
        index = {}
        for k, (i, j) in enumerate(self.edges):
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge ({i}, {j}) is not a sorted pair of vertices")
            if (i, j) in index:
                raise ValueError(f"duplicate edge ({i}, {j})")
            index[(i, j)] = k
        object.__setattr__(self, "_index", index)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.n)))

    @classmethod
    def from_weights(cls, n: int, weights: dict, **kwargs) -> "PathGraph":
        """Build from ``{(i, j): w}``; pairs are normalized and sorted."""
        items = sorted(((min(i, j), max(i, j)), w) for (i, j), w in weights.items())
        return cls(n, tuple(e for e, _ in items), tuple(w for _, w in items), **kwargs)

    def edge_index(self, i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"({i}, {j}) is not an edge of the path graph") from None

    def has_edge(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in self._index

    def weight(self, i: int, j: int):
        return self.weights[self.edge_index(i, j)]

    def weight_matrix(self, missing=np.inf) -> np.ndarray:
        out = np.full((self.n, self.n), missing, dtype=float)
        for (i, j), w in zip(self.edges, self.weights):
            out[i, j] = out[j, i] = w
        return out

    def is_perfect_matching(self, matching: Iterable[tuple[int, int]]) -> bool:
        seen = [False] * self.n
        count = 0
        for i, j in matching:
            if not self.has_edge(i, j) or seen[i] or seen[j]:
                return False
            seen[i] = seen[j] = True
            count += 1
        return 2 * count == self.n

    @property
    def detector_labels(self) -> tuple:
        if self.num_detectors is None:
            return self.labels
        return self.labels[: self.num_detectors]


def build_path_graph(
    g: DetectorGraph,
    wf: WeightFunction,
    active: Iterable[int],
    table: Optional[DistanceTable] = None,
) -> PathGraph:
    """Path graph on the active detectors plus their boundary copies."""
    act = sorted(set(active))
    for d in act:
        if not (0 <= d < g.num_vertices) or g.kinds[d] != DETECTOR:
            raise ValueError(f"{d} is not a detector of the graph")
    if table is None:
        table = DistanceTable(g, wf)
    elif table.weights is not wf and table.weights != wf:
        raise ValueError("lookup table was built for a different weight function")
    a = len(act)
    weights = {}
    for i, u in enumerate(act):
        bd, _ = table.boundary_distance(u)
        if not math.isinf(bd):
            weights[(i, a + i)] = bd
        for j in range(i + 1, a):
            d = table.distance(u, act[j])
            if not math.isinf(d):
                weights[(i, j)] = d
    for i, u in enumerate(act):
        if not any(e[0] == i or e[1] == i for e in weights):
            raise UnreachableDetectorError(
                f"detector {u} reaches neither a boundary nor another active detector"
            )
    for i in range(a):
        for j in range(i + 1, a):
            weights[(a + i, a + j)] = 0
    labels = tuple(act) + tuple(f"b{u}" for u in act)
    return PathGraph.from_weights(2 * a, weights, labels=labels, num_detectors=a, scale=wf.scale)


# -- file formats -----------------------------------------------------------

def format_detector_graph(g: DetectorGraph) -> str:
    lines = [f"dgraph v1 {g.num_vertices}"]
    for v, kind in enumerate(g.kinds):
        lines.append(f"v {v} {kind}")
    for (u, v), p, w, lg in zip(g.edges, g.probabilities, g.overrides, g.logical):
        line = f"e {u} {v} {p!r}"
        if w is not None:
            line += f" w {int(w)}"
        if lg:
            line += " l 1"
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_detector_graph(text: str) -> DetectorGraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphFormatError("empty detector-graph file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "dgraph" or head[1] != "v1":
        raise GraphFormatError(f"bad header: {lines[0]!r}")
    n = int(head[2])
    kinds: list[Optional[str]] = [None] * n
    edges, probs, overrides, logical = [], [], [], []
    for ln in lines[1:]:
        tok = ln.split()
        if tok[0] == "v":
            if len(tok) != 3:
                raise GraphFormatError(f"bad vertex line: {ln!r}")
            v = int(tok[1])
            if not 0 <= v < n:
                raise GraphFormatError(f"vertex id {v} out of range")
            kinds[v] = tok[2]
        elif tok[0] == "e":
            if len(tok) < 4 or len(tok) % 2 != 0:
                raise GraphFormatError(f"bad edge line: {ln!r}")
            edges.append((int(tok[1]), int(tok[2])))
            probs.append(float(tok[3]))
            w, lg = None, False
            for key, val in zip(tok[4::2], tok[5::2]):
                if key == "w":
                    w = int(val)
                elif key == "l":
                    lg = val == "1"
                else:
                    raise GraphFormatError(f"unknown edge attribute {key!r}")
            overrides.append(w)
            logical.append(lg)
        else:
            raise GraphFormatError(f"unknown record {tok[0]!r}")
    if any(k is None for k in kinds):
        raise GraphFormatError("every vertex id must be declared")
    return DetectorGraph(tuple(kinds), tuple(edges), tuple(probs), tuple(overrides), tuple(logical))


def read_detector_graph(path) -> DetectorGraph:
    with open(path) as fh:
        return parse_detector_graph(fh.read())


def write_detector_graph(g: DetectorGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_detector_graph(g))


def read_syndromes(path) -> list[list[int]]:
    """One shot per line, space-separated active detector ids; empty line = no detections."""
    with open(path) as fh:
        text = fh.read()
    if not text:
        return []
    # the final newline terminates the last record
    if text.endswith("\n"):
        text = text[:-1]
    return [[int(t) for t in line.split()] for line in text.split("\n")]


def write_syndromes(shots: Iterable[Iterable[int]], path) -> None:
    with open(path, "w") as fh:
        for act in shots:
            fh.write(" ".join(str(int(d)) for d in sorted(act)) + "\n")
