"""Energy functionals, strong-form residuals, and Nehari-manifold algebra.

Two problem flavors share one algebraic skeleton: J(w) = (1/2) ||w||^2 -
coupling(w)/(alpha+beta), with the norm and the integration domain depending
on the flavor. The dispatch helpers at the bottom let the solver treat both
uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import calculus
from .calculus import PairFunction, as_pair, check_admissible, laplacian_all
from .errors import DegeneratePairError, GraphValidationError
from .graph import PotentialField, WeightedGraph, as_domain, closure


@dataclass(frozen=True, eq=False)
class LambdaProblem:
    """Coupled system on the whole graph with potentials scaled by lam."""

    graph: WeightedGraph
    potentials: PotentialField
    lam: float
    alpha: float
    beta: float
    coef_u: np.ndarray = field(init=False, repr=False)
    coef_v: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.potentials.a.shape != (self.graph.vertex_count,):
            raise GraphValidationError("potentials and graph disagree on vertex count")
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"lambda must be positive and finite, got {self.lam}")
        if not self.alpha > 1 or not self.beta > 1:
            raise ValueError(f"alpha and beta must exceed 1, got {self.alpha}, {self.beta}")
        cu = self.lam * self.potentials.a + 1.0
        cv = self.lam * self.potentials.b + 1.0
        cu.setflags(write=False)
        cv.setflags(write=False)
        object.__setattr__(self, "coef_u", cu)
        object.__setattr__(self, "coef_v", cv)

    @property
    def gamma(self) -> float:
        return self.alpha + self.beta


@dataclass(frozen=True, eq=False)
class DirichletProblem:
    """Limit system posed inside the wells with zero boundary values."""

    graph: WeightedGraph
    omega_a: frozenset
    omega_b: frozenset
    alpha: float
    beta: float
    mask_a: np.ndarray = field(init=False, repr=False)
    mask_b: np.ndarray = field(init=False, repr=False)
    union_mask: np.ndarray = field(init=False, repr=False)
    closure_mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = self.graph
        omega_a = as_domain(g, self.omega_a)
        omega_b = as_domain(g, self.omega_b)
        object.__setattr__(self, "omega_a", omega_a)
        object.__setattr__(self, "omega_b", omega_b)
        if not omega_a or not omega_b:
            raise GraphValidationError("both wells must be nonempty")
        if not (omega_a & omega_b):
            raise GraphValidationError("the wells do not overlap")
        if not self.alpha > 1 or not self.beta > 1:
            raise ValueError(f"alpha and beta must exceed 1, got {self.alpha}, {self.beta}")
        n = g.vertex_count
        mask_a = np.zeros(n, dtype=bool)
        mask_a[list(omega_a)] = True
        mask_b = np.zeros(n, dtype=bool)
        mask_b[list(omega_b)] = True
        closure_mask = np.zeros(n, dtype=bool)
        closure_mask[list(closure(g, omega_a) | closure(g, omega_b))] = True
        for m in (mask_a, mask_b, closure_mask):
            m.setflags(write=False)
        union = mask_a | mask_b
        union.setflags(write=False)
        object.__setattr__(self, "mask_a", mask_a)
        object.__setattr__(self, "mask_b", mask_b)
        object.__setattr__(self, "union_mask", union)
        object.__setattr__(self, "closure_mask", closure_mask)

    @property
    def gamma(self) -> float:
        return self.alpha + self.beta

    @property
    def overlap(self) -> frozenset:
        return self.omega_a & self.omega_b


@dataclass(frozen=True)
class LambdaFamily:
    """A lambda-indexed family of problems sharing graph and potentials."""

    graph: WeightedGraph
    potentials: PotentialField
    alpha: float
    beta: float

    def problem(self, lam: float) -> LambdaProblem:
        return LambdaProblem(self.graph, self.potentials, lam, self.alpha, self.beta)


class NehariDiagnostics(NamedTuple):
    norm_sq: float
    coupling: float
    defect: float
    energy: float
    nontrivial: bool


Problem = LambdaProblem | DirichletProblem


def signed_power(u: np.ndarray, p: float) -> np.ndarray:
    """sign(u)|u|^p with the continuous extension 0 at u = 0 (needs p > 0)."""
    return np.sign(u) * np.abs(u) ** p


def coupling_integral(p: Problem, w) -> float:
    """Integral of |u|^alpha |v|^beta, over V or over the union of wells."""
    u, v = as_pair(p.graph, w)
    dens = np.abs(u) ** p.alpha * np.abs(v) ** p.beta
    if isinstance(p, DirichletProblem):
        mask = p.union_mask
        return float(np.dot(p.graph.mu[mask], dens[mask]))
    return float(np.dot(p.graph.mu, dens))


def energy_J_lambda(p: LambdaProblem, w) -> float:
    return 0.5 * calculus.norm_H_lambda_sq(p, w) - coupling_integral(p, w) / p.gamma


def grad_J_lambda(p: LambdaProblem, w) -> PairFunction:
    """Strong-form residual of system (1); its L2(dmu) pairing is the weak form."""
    u, v = as_pair(p.graph, w)
    g = p.gamma
    ru = (-laplacian_all(p.graph, u) + p.coef_u * u
          - (p.alpha / g) * signed_power(u, p.alpha - 1.0) * np.abs(v) ** p.beta)
    rv = (-laplacian_all(p.graph, v) + p.coef_v * v
          - (p.beta / g) * np.abs(u) ** p.alpha * signed_power(v, p.beta - 1.0))
    return PairFunction(ru, rv)


def energy_J_Omega(d: DirichletProblem, w) -> float:
    return 0.5 * calculus.norm_H_Omega_sq(d, w) - coupling_integral(d, w) / d.gamma


def grad_J_Omega(d: DirichletProblem, w) -> PairFunction:
    """Residual of system (2) on interior vertices, pinned to 0 elsewhere."""
    u, v = check_admissible(d, w)
    g = d.gamma
    ru = (-laplacian_all(d.graph, u) + u
          - (d.alpha / g) * signed_power(u, d.alpha - 1.0) * np.abs(v) ** d.beta)
    rv = (-laplacian_all(d.graph, v) + v
          - (d.beta / g) * np.abs(u) ** d.alpha * signed_power(v, d.beta - 1.0))
    ru = np.where(d.mask_a, ru, 0.0)
    rv = np.where(d.mask_b, rv, 0.0)
    return PairFunction(ru, rv)


def norm_sq_of(p: Problem, w) -> float:
    if isinstance(p, DirichletProblem):
        return calculus.norm_H_Omega_sq(p, w)
    return calculus.norm_H_lambda_sq(p, w)


def energy_of(p: Problem, w) -> float:
    if isinstance(p, DirichletProblem):
        return energy_J_Omega(p, w)
    return energy_J_lambda(p, w)


def residual_of(p: Problem, w) -> PairFunction:
    if isinstance(p, DirichletProblem):
        return grad_J_Omega(p, w)
    return grad_J_lambda(p, w)


def nehari_scale(p: Problem, w) -> float:
    """The unique t > 0 placing t*w on the Nehari manifold.

    Solves t^2 norm_sq = t^gamma coupling, so t = (norm_sq/coupling)^(1/(gamma-2)).
    """
    norm_sq = norm_sq_of(p, w)
    coupling = coupling_integral(p, w)
    if coupling <= 0.0 or norm_sq <= 0.0:
        raise DegeneratePairError(
            f"no Nehari projection: norm_sq={norm_sq}, coupling={coupling}")
    return float((norm_sq / coupling) ** (1.0 / (p.gamma - 2.0)))


def nehari_project(p: Problem, w) -> PairFunction:
    t = nehari_scale(p, w)
    u, v = as_pair(p.graph, w)
    return PairFunction(t * u, t * v)


def nehari_diagnostics(p: Problem, w) -> NehariDiagnostics:
    norm_sq = norm_sq_of(p, w)
    coupling = coupling_integral(p, w)
    return NehariDiagnostics(
        norm_sq=norm_sq,
        coupling=coupling,
        defect=norm_sq - coupling,
        energy=energy_of(p, w),
        nontrivial=bool(norm_sq > 0.0 and coupling > 0.0),
    )
