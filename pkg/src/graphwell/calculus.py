"""Discrete calculus on weighted graphs: Laplacian, gradient form, norms.

Convention used throughout: integrating the gradient form over V turns into a
sum over unordered edges, sum_x mu(x) Gamma(u,v)(x) = sum_{xy in E} w_xy du dv,
because each edge is seen from both endpoints and the 1/2 cancels the double
count. The norm implementations use the edge-sum form; the pointwise operators
below are the literal per-vertex definitions.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Iterable, NamedTuple

import numpy as np

from .errors import DomainViolationError
from .graph import WeightedGraph, as_domain, closure

if TYPE_CHECKING:  # circular at runtime only
    from .functional import DirichletProblem, LambdaProblem


class PairFunction(NamedTuple):
    """A pair (u, v) of vertex functions on a shared graph."""

    u: np.ndarray
    v: np.ndarray


def as_vertex_function(g: WeightedGraph, values) -> np.ndarray:
    f = np.asarray(values, dtype=np.float64)
    if f.shape != (g.vertex_count,):
        raise ValueError(f"vertex function must have shape ({g.vertex_count},), got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("vertex function values must be finite")
    return f


def as_pair(g: WeightedGraph, w) -> PairFunction:
    u, v = w
    return PairFunction(as_vertex_function(g, u), as_vertex_function(g, v))


def laplacian(g: WeightedGraph, u, x: int) -> float:
    """mu-Laplacian at x: (1/mu(x)) sum_{y~x} w_xy (u(y) - u(x))."""
    u = as_vertex_function(g, u)
    x = g.check_vertex(x)
    nbr, w = g.neighbors(x)
    return float(np.dot(w, u[nbr] - u[x]) / g.mu[x])


def laplacian_all(g: WeightedGraph, u: np.ndarray) -> np.ndarray:
    """mu-Laplacian at every vertex, assembled by edge scatter."""
    n = g.vertex_count
    flow = g.edge_w * (u[g.edge_j] - u[g.edge_i])
    acc = np.bincount(g.edge_i, weights=flow, minlength=n)
    acc -= np.bincount(g.edge_j, weights=flow, minlength=n)
    return acc / g.mu


def gradient_form(g: WeightedGraph, u, v, x: int) -> float:
    """Gamma(u,v)(x) = (1/(2 mu(x))) sum_{y~x} w_xy (u(y)-u(x))(v(y)-v(x))."""
    u = as_vertex_function(g, u)
    v = as_vertex_function(g, v)
    x = g.check_vertex(x)
    nbr, w = g.neighbors(x)
    return float(np.dot(w, (u[nbr] - u[x]) * (v[nbr] - v[x])) / (2.0 * g.mu[x]))


def gradient_form_all(g: WeightedGraph, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = g.vertex_count
    prod = g.edge_w * (u[g.edge_j] - u[g.edge_i]) * (v[g.edge_j] - v[g.edge_i])
    acc = np.bincount(g.edge_i, weights=prod, minlength=n)
    acc += np.bincount(g.edge_j, weights=prod, minlength=n)
    return acc / (2.0 * g.mu)


def grad_length(g: WeightedGraph, u, x: int) -> float:
    """|grad u|(x) = sqrt(Gamma(u,u)(x))."""
    return math.sqrt(max(gradient_form(g, u, u, x), 0.0))


def integrate(g: WeightedGraph, f, over: Iterable[int] | None = None) -> float:
    """Integral of f against the vertex measure, over all of V by default."""
    f = as_vertex_function(g, f)
    if over is None:
        return float(np.dot(g.mu, f))
    idx = sorted(as_domain(g, over))
    if not idx:
        return 0.0
    return float(np.dot(g.mu[idx], f[idx]))


def dirichlet_energy_sq(g: WeightedGraph, u: np.ndarray) -> float:
    """sum over edges of w (du)^2, which equals the integral of |grad u|^2."""
    du = u[g.edge_j] - u[g.edge_i]
    return float(np.dot(g.edge_w, du * du))


def norm_H_lambda_sq(p: "LambdaProblem", w) -> float:
    """Squared H_lambda norm: gradient terms plus (lambda a + 1), (lambda b + 1) mass."""
    u, v = as_pair(p.graph, w)
    g = p.graph
    grad = dirichlet_energy_sq(g, u) + dirichlet_energy_sq(g, v)
    mass = float(np.dot(g.mu, p.coef_u * u * u + p.coef_v * v * v))
    return grad + mass


def inner_H_lambda(p: "LambdaProblem", w1, w2) -> float:
    u1, v1 = as_pair(p.graph, w1)
    u2, v2 = as_pair(p.graph, w2)
    g = p.graph
    du1 = u1[g.edge_j] - u1[g.edge_i]
    du2 = u2[g.edge_j] - u2[g.edge_i]
    dv1 = v1[g.edge_j] - v1[g.edge_i]
    dv2 = v2[g.edge_j] - v2[g.edge_i]
    grad = float(np.dot(g.edge_w, du1 * du2 + dv1 * dv2))
    mass = float(np.dot(g.mu, p.coef_u * u1 * u2 + p.coef_v * v1 * v2))
    return grad + mass


def norm_H_sq(g: WeightedGraph, w) -> float:
    """Squared H norm: unit-coefficient mass, same gradient terms."""
    u, v = as_pair(g, w)
    grad = dirichlet_energy_sq(g, u) + dirichlet_energy_sq(g, v)
    mass = float(np.dot(g.mu, u * u + v * v))
    return grad + mass


def check_admissible(d: "DirichletProblem", w) -> PairFunction:
    """Require u = 0 off Omega_a and v = 0 off Omega_b, else raise."""
    u, v = as_pair(d.graph, w)
    bad_u = np.flatnonzero((u != 0.0) & ~d.mask_a)
    if bad_u.size:
        lab = d.graph.label_of(int(bad_u[0]))
        raise DomainViolationError(f"u is nonzero at {lab}, outside the a-well interior")
    bad_v = np.flatnonzero((v != 0.0) & ~d.mask_b)
    if bad_v.size:
        lab = d.graph.label_of(int(bad_v[0]))
        raise DomainViolationError(f"v is nonzero at {lab}, outside the b-well interior")
    return PairFunction(u, v)


def norm_H_Omega_sq(d: "DirichletProblem", w) -> float:
    """Squared H_Omega norm of an admissible pair.

    Gradient terms are summed over the closed wells, mass terms over the open
    wells; for admissible pairs every omitted vertex contributes zero anyway.
    """
    u, v = check_admissible(d, w)
    g = d.graph
    gamma_sum = gradient_form_all(g, u, u) + gradient_form_all(g, v, v)
    grad = float(np.dot(g.mu[d.closure_mask], gamma_sum[d.closure_mask]))
    union = d.union_mask
    mass = float(np.dot(g.mu[union], u[union] ** 2 + v[union] ** 2))
    return grad + mass


def norm_Lq(g: WeightedGraph, w, q: float) -> float:
    """L^q norm of a pair for q in [2, inf]; q = inf is sup|u| + sup|v|."""
    u, v = as_pair(g, w)
    if q == math.inf:
        return float(np.max(np.abs(u)) + np.max(np.abs(v)))
    q = float(q)
    if q < 2.0:
        raise ValueError(f"q must be >= 2 or inf, got {q}")
    total = float(np.dot(g.mu, np.abs(u) ** q + np.abs(v) ** q))
    return total ** (1.0 / q)
