"""Finite weighted graphs: vertex measure, adjacency, domains and boundaries."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphValidationError, UnknownLabelError

VertexId = int
DomainSet = frozenset


class WeightedGraph:
    """Immutable graph with one canonical weight per unordered edge.

    Symmetry w(x,y) = w(y,x) holds by construction: each pair {x,y} is stored
    once. Construction checks structural shape (index range, no self loops,
    no duplicate pairs, finite values); positivity of weights/measure and
    connectivity are certified by validate_graph, which must be able to
    inspect ill-formed instances in order to report them.
    """

    def __init__(
        self,
        vertex_count: int,
        edges: Iterable[tuple[int, int, float]],
        measure: Sequence[float] | np.ndarray | None = None,
        labels: Sequence[str] | None = None,
    ):
        n = int(vertex_count)
        if n <= 0:
            raise GraphValidationError("vertex_count must be positive")
        self.vertex_count = n

        ei, ej, ew = [], [], []
        seen: set[tuple[int, int]] = set()
        for edge in edges:
            x, y, w = edge
            x, y = int(x), int(y)
            if not (0 <= x < n and 0 <= y < n):
                raise GraphValidationError(f"edge ({x}, {y}) references a vertex outside [0, {n})")
            if x == y:
                raise GraphValidationError(f"self loop at vertex {x}")
            if x > y:
                x, y = y, x
            if (x, y) in seen:
                raise GraphValidationError(f"duplicate edge ({x}, {y})")
            seen.add((x, y))
            ei.append(x)
            ej.append(y)
            ew.append(float(w))
        self.edge_i = np.asarray(ei, dtype=np.int64)
        self.edge_j = np.asarray(ej, dtype=np.int64)
        self.edge_w = np.asarray(ew, dtype=np.float64)
        if self.edge_w.size and not np.all(np.isfinite(self.edge_w)):
            raise GraphValidationError("edge weights must be finite")

        if measure is None:
            mu = np.ones(n, dtype=np.float64)
        else:
            mu = np.asarray(measure, dtype=np.float64).copy()
        if mu.shape != (n,):
            raise GraphValidationError(f"measure must have one value per vertex, got shape {mu.shape}")
        if not np.all(np.isfinite(mu)):
            raise GraphValidationError("measure values must be finite")
        self.mu = mu
        self.mu_min = float(mu.min())

        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise GraphValidationError("labels must have one entry per vertex")
        self.labels = labels
        self._label_ids = {s: i for i, s in enumerate(labels)}
        if len(self._label_ids) != n:
            raise GraphValidationError("vertex labels must be unique")

        # CSR-style adjacency: neighbors of x are _nbr[_indptr[x]:_indptr[x+1]]
        heads = np.concatenate([self.edge_i, self.edge_j])
        tails = np.concatenate([self.edge_j, self.edge_i])
        ws = np.concatenate([self.edge_w, self.edge_w])
        order = np.argsort(heads, kind="stable")
        self._nbr = tails[order]
        self._nbr_w = ws[order]
        counts = np.bincount(heads, minlength=n)
        self._indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        # weighted degree: sum of incident weights (diagonal of -Laplacian times mu)
        self.wdeg = np.bincount(heads, weights=ws, minlength=n)

        for arr in (self.edge_i, self.edge_j, self.edge_w, self.mu, self._nbr,
                    self._nbr_w, self._indptr, self.wdeg):
            arr.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return int(self.edge_w.size)

    def check_vertex(self, x: int) -> int:
        x = int(x)
        if not 0 <= x < self.vertex_count:
            raise UnknownLabelError(f"vertex {x} not in graph of size {self.vertex_count}")
        return x

    def neighbors(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor ids and the matching edge weights of vertex x."""
        x = self.check_vertex(x)
        lo, hi = self._indptr[x], self._indptr[x + 1]
        return self._nbr[lo:hi], self._nbr_w[lo:hi]

    def id_of(self, label: str) -> int:
        try:
            return self._label_ids[label]
        except KeyError:
            raise UnknownLabelError(f"unknown vertex label {label!r}") from None

    def label_of(self, x: int) -> str:
        return self.labels[self.check_vertex(x)]

    def __repr__(self) -> str:
        return f"WeightedGraph(|V|={self.vertex_count}, |E|={self.edge_count})"


class PotentialField:
    """Nonnegative potentials (a, b) and their zero-set wells.

    The wells Omega_a = {a = 0}, Omega_b = {b = 0} and their overlap must all
    be nonempty; solutions concentrate there as the coupling strength grows.
    """

    def __init__(self, a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray):
        a = np.asarray(a, dtype=np.float64).copy()
        b = np.asarray(b, dtype=np.float64).copy()
        if a.ndim != 1 or a.shape != b.shape:
            raise GraphValidationError("potentials a and b must be 1-d arrays of equal length")
        for name, arr in (("a", a), ("b", b)):
            if not np.all(np.isfinite(arr)):
                raise GraphValidationError(f"potential {name} must be finite")
            if np.any(arr < 0):
                offender = int(np.argmax(arr < 0))
                raise GraphValidationError(
                    f"potential {name} is negative at vertex {offender}: {arr[offender]}")
        a.setflags(write=False)
        b.setflags(write=False)
        self.a = a
        self.b = b
        self.omega_a = frozenset(int(i) for i in np.flatnonzero(a == 0.0))
        self.omega_b = frozenset(int(i) for i in np.flatnonzero(b == 0.0))
        self.overlap = self.omega_a & self.omega_b
        if not self.omega_a:
            raise GraphValidationError("potential a has an empty zero set")
        if not self.omega_b:
            raise GraphValidationError("potential b has an empty zero set")
        if not self.overlap:
            raise GraphValidationError("the zero sets of a and b do not overlap")

    def __repr__(self) -> str:
        return (f"PotentialField(|Omega_a|={len(self.omega_a)}, "
                f"|Omega_b|={len(self.omega_b)}, |overlap|={len(self.overlap)})")


@dataclass(frozen=True)
class ValidationReport:
    vertex_count: int
    edge_count: int
    mu_min: float
    connected: bool = True


def validate_graph(g: WeightedGraph) -> ValidationReport:
    """Certify positivity of weights/measure and connectivity from vertex 0.

    Raises GraphValidationError naming an offender on failure; returns a
    summary report on success.
    """
    if np.any(g.edge_w <= 0):
        k = int(np.argmax(g.edge_w <= 0))
        raise GraphValidationError(
            f"nonpositive weight {g.edge_w[k]} on edge "
            f"({g.label_of(int(g.edge_i[k]))}, {g.label_of(int(g.edge_j[k]))})")
    if np.any(g.mu <= 0):
        k = int(np.argmax(g.mu <= 0))
        raise GraphValidationError(f"nonpositive measure {g.mu[k]} at vertex {g.label_of(k)}")
    reached = _bfs_reach(g, 0)
    if not reached.all():
        k = int(np.argmax(~reached))
        raise GraphValidationError(f"graph is disconnected: vertex {g.label_of(k)} is unreachable from {g.label_of(0)}")
    return ValidationReport(g.vertex_count, g.edge_count, g.mu_min, True)


def _bfs_reach(g: WeightedGraph, source: int) -> np.ndarray:
    reached = np.zeros(g.vertex_count, dtype=bool)
    reached[source] = True
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in g.neighbors(x)[0]:
            if not reached[y]:
                reached[y] = True
                queue.append(int(y))
    return reached


def graph_distance(g: WeightedGraph, x: int, y: int) -> int:
    """Hop-count distance: minimal number of edges joining x and y."""
    x = g.check_vertex(x)
    y = g.check_vertex(y)
    if x == y:
        return 0
    dist = np.full(g.vertex_count, -1, dtype=np.int64)
    dist[x] = 0
    queue = deque([x])
    while queue:
        z = queue.popleft()
        for t in g.neighbors(z)[0]:
            if dist[t] < 0:
                dist[t] = dist[z] + 1
                if t == y:
                    return int(dist[t])
                queue.append(int(t))
    raise GraphValidationError(f"no path between {g.label_of(x)} and {g.label_of(y)}")


def as_domain(g: WeightedGraph, members: Iterable[int]) -> frozenset:
    """Normalize an iterable of vertex ids into a validated DomainSet."""
    dom = frozenset(int(v) for v in members)
    for v in dom:
        g.check_vertex(v)
    return dom


def boundary(g: WeightedGraph, omega: Iterable[int]) -> frozenset:
    """Vertex boundary: vertices outside omega adjacent to some vertex of omega."""
    dom = as_domain(g, omega)
    if not dom:
        return frozenset()
    inside = np.zeros(g.vertex_count, dtype=bool)
    inside[list(dom)] = True
    ai, aj = inside[g.edge_i], inside[g.edge_j]
    out = set(g.edge_i[aj & ~ai].tolist()) | set(g.edge_j[ai & ~aj].tolist())
    return frozenset(int(v) for v in out)


def closure(g: WeightedGraph, omega: Iterable[int]) -> frozenset:
    """Omega together with its vertex boundary."""
    dom = as_domain(g, omega)
    return dom | boundary(g, dom)
