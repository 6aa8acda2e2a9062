"""Ground-state computation by projected descent on the Nehari manifold.

Each restart starts from a random positive pair supported on the overlap of
the wells, projects it onto the manifold, and then alternates descent steps
with re-projection. The line search tests the Armijo condition on the energy
AFTER re-projection: along the ray the manifold point is the energy maximum,
so plain descent on J followed by projection could move uphill, while the
projected energy is the quantity the iteration actually drives down. At a
manifold point both energies share the same directional derivative, so the
usual Armijo decrement applies unchanged.

Descent directions are the strong residual scaled by the diagonal of the
linearized operator, (lam a + 1) + wdeg/mu. Without that scaling the mass
coefficients spread over seven orders of magnitude across the sweep and
first-order descent cannot reach the residual tolerance in any sane budget.

Descent alone still crawls on symmetric instances, where the Hessian at the
ground state can have an exactly flat direction (the energy grows only
quartically along it). Each restart therefore hands over to a damped Newton
polish of the optimality system once the residual is small; Newton moves
along such valleys at a fixed linear rate instead of stalling. The polished
point is kept only when it actually lowers the residual norm.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .calculus import PairFunction, as_pair
from .errors import AllRestartsDegenerateError, DegeneratePairError
from .functional import (
    DirichletProblem,
    LambdaProblem,
    NehariDiagnostics,
    Problem,
    coupling_integral,
    energy_of,
    nehari_diagnostics,
    nehari_scale,
    norm_sq_of,
    residual_of,
)

logger = logging.getLogger(__name__)

_STALL_LIMIT = 200          # consecutive non-improving iterations before giving up
_STEP_UNDERFLOW = 1e-18     # relative to the initial step
_POLISH_SWITCH = 1e-4       # hand off to Newton at rnorm <= this * max(1, ||w||)
_POLISH_MAX_ITERS = 60
_POLISH_BACKTRACKS = 40


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 50000
    grad_tol: float = 1e-9
    step_init: float = 1.0
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    restarts: int = 8
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not self.step_init > 0:
            raise ValueError("step_init must be positive")
        if not 0 < self.armijo_c < 1:
            raise ValueError("armijo_c must lie in (0, 1)")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack must lie in (0, 1)")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be a nonnegative integer")


@dataclass(frozen=True)
class SolveResult:
    pair: PairFunction
    energy: float
    residual_norm: float
    nehari: NehariDiagnostics
    iterations: int
    restart_index: int
    converged: bool


def _level_energy(norm_sq: float, coupling: float, gamma: float) -> float:
    """Energy after exact Nehari projection, from the ray maximum formula."""
    logval = (gamma * math.log(norm_sq) - 2.0 * math.log(coupling)) / (gamma - 2.0)
    return (0.5 - 1.0 / gamma) * math.exp(logval)


def _overlap_of(p: Problem) -> frozenset:
    if isinstance(p, DirichletProblem):
        return p.omega_a & p.omega_b
    return p.potentials.overlap


def _diag_of(p: Problem) -> tuple[np.ndarray, np.ndarray]:
    ratio = p.graph.wdeg / p.graph.mu
    if isinstance(p, DirichletProblem):
        d = 1.0 + ratio
        return np.where(p.mask_a, d, 1.0), np.where(p.mask_b, d, 1.0)
    return p.coef_u + ratio, p.coef_v + ratio


def _initial_pair(p: Problem, rng: np.random.Generator) -> PairFunction:
    n = p.graph.vertex_count
    idx = sorted(_overlap_of(p))
    u = np.zeros(n)
    v = np.zeros(n)
    u[idx] = rng.uniform(0.5, 1.5, len(idx))
    v[idx] = rng.uniform(0.5, 1.5, len(idx))
    return PairFunction(u, v)


def _residual_norm(p: Problem, r: PairFunction) -> float:
    mu = p.graph.mu
    return math.sqrt(float(np.dot(mu, r.u * r.u) + np.dot(mu, r.v * r.v)))


def _active_indices(p: Problem) -> tuple[np.ndarray, np.ndarray]:
    n = p.graph.vertex_count
    if isinstance(p, DirichletProblem):
        return np.flatnonzero(p.mask_a), np.flatnonzero(p.mask_b)
    idx = np.arange(n)
    return idx, idx


def _newton_polish(p: Problem, w: PairFunction, grad_tol: float) -> PairFunction:
    """Damped Newton on the stacked optimality system, finite-difference Jacobian.

    Dense linear algebra per step, sized for the small graphs this package
    targets. Every step must strictly shrink the residual, so a poor Jacobian
    can only waste a few evaluations, never corrupt the iterate.
    """
    g = p.graph
    iu, iv = _active_indices(p)
    m = iu.size + iv.size

    def unpack(z: np.ndarray) -> PairFunction:
        u = np.zeros(g.vertex_count)
        v = np.zeros(g.vertex_count)
        u[iu] = z[:iu.size]
        v[iv] = z[iu.size:]
        return PairFunction(u, v)

    def stacked(z: np.ndarray) -> tuple[np.ndarray, float]:
        r = residual_of(p, unpack(z))
        f = np.concatenate([g.mu[iu] * r.u[iu], g.mu[iv] * r.v[iv]])
        return f, _residual_norm(p, r)

    z = np.concatenate([w.u[iu], w.v[iv]])
    f, rnorm = stacked(z)
    for _ in range(_POLISH_MAX_ITERS):
        fnorm = float(np.linalg.norm(f))
        if not math.isfinite(fnorm) or fnorm == 0.0 or rnorm <= 0.5 * grad_tol:
            break
        jac = np.empty((m, m))
        for j in range(m):
            h = 1e-7 * max(1.0, abs(z[j]))
            zp = z.copy()
            zp[j] += h
            zm = z.copy()
            zm[j] -= h
            jac[:, j] = (stacked(zp)[0] - stacked(zm)[0]) / (2.0 * h)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        t = 1.0
        improved = False
        for _ in range(_POLISH_BACKTRACKS):
            ft, rt = stacked(z + t * step)
            if np.all(np.isfinite(ft)) and float(np.linalg.norm(ft)) < fnorm:
                z = z + t * step
                f, rnorm = ft, rt
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return unpack(z)


def _run_descent(p: Problem, cfg: SolverConfig, w0: PairFunction, index: int) -> SolveResult | None:
    """One restart. Returns None when the start has no Nehari projection."""
    if isinstance(p, DirichletProblem):
        w0 = PairFunction(np.where(p.mask_a, w0.u, 0.0), np.where(p.mask_b, w0.v, 0.0))
    try:
        t = nehari_scale(p, w0)
    except DegeneratePairError:
        return None
    w = PairFunction(t * w0.u, t * w0.v)

    gamma = p.gamma
    mu = p.graph.mu
    diag_u, diag_v = _diag_of(p)
    defect_tol = math.sqrt(cfg.grad_tol)
    eps = np.finfo(np.float64).eps

    energy = energy_of(p, w)
    best_rnorm = math.inf
    no_improve = 0
    iters = 0

    for k in range(cfg.max_iters):
        iters = k + 1
        res = residual_of(p, w)
        rnorm = _residual_norm(p, res)
        norm_sq = norm_sq_of(p, w)
        coupling = coupling_integral(p, w)
        if rnorm <= cfg.grad_tol and abs(norm_sq - coupling) <= defect_tol * norm_sq:
            break
        if rnorm <= _POLISH_SWITCH * max(1.0, math.sqrt(norm_sq)):
            break
        if no_improve >= _STALL_LIMIT:
            logger.debug("restart %d stalled after %d iterations (rnorm %.3e)", index, iters, rnorm)
            break

        du = res.u / diag_u
        dv = res.v / diag_v
        slope = float(np.dot(mu, res.u * du) + np.dot(mu, res.v * dv))
        if slope <= 0.0:
            break

        step = cfg.step_init
        accepted = False
        slack = 4.0 * eps * max(1.0, abs(energy))
        while step > _STEP_UNDERFLOW * cfg.step_init:
            tu = w.u - step * du
            tv = w.v - step * dv
            trial = PairFunction(tu, tv)
            norm_t = norm_sq_of(p, trial)
            coup_t = coupling_integral(p, trial)
            if coup_t > 0.0 and norm_t > 0.0:
                energy_t = _level_energy(norm_t, coup_t, gamma)
                if energy_t <= energy - cfg.armijo_c * step * slope + slack:
                    accepted = True
                    break
            step *= cfg.backtrack
        if not accepted:
            logger.debug("restart %d: line search underflow at iteration %d", index, iters)
            break

        t = (norm_t / coup_t) ** (1.0 / (gamma - 2.0))
        w = PairFunction(t * tu, t * tv)
        if energy_t > energy + 1e-9 * max(1.0, abs(energy)):
            logger.warning("energy increased from %.17g to %.17g at iteration %d",
                           energy, energy_t, iters)
        improved = energy_t < energy - slack
        if rnorm < 0.999 * best_rnorm:
            improved = True
        best_rnorm = min(best_rnorm, rnorm)
        no_improve = 0 if improved else no_improve + 1
        energy = energy_t

    res = residual_of(p, w)
    rnorm = _residual_norm(p, res)
    if rnorm > cfg.grad_tol:
        # Re-project so the certificate below sees an exact manifold point;
        # at a polished critical point the scale is 1 up to rounding.
        try:
            polished = _newton_polish(p, w, cfg.grad_tol)
            t = nehari_scale(p, polished)
            cand = PairFunction(t * polished.u, t * polished.v)
            cnorm = _residual_norm(p, residual_of(p, cand))
            if math.isfinite(cnorm) and cnorm < rnorm:
                w, rnorm = cand, cnorm
        except DegeneratePairError:
            pass
    nd = nehari_diagnostics(p, w)
    converged = bool(rnorm <= cfg.grad_tol
                     and abs(nd.defect) <= defect_tol * nd.norm_sq
                     and nd.nontrivial)
    logger.debug("restart %d: energy %.12g rnorm %.3e iters %d converged %s",
                 index, nd.energy, rnorm, iters, converged)
    return SolveResult(pair=w, energy=nd.energy, residual_norm=rnorm, nehari=nd,
                       iterations=iters, restart_index=index, converged=converged)


def _solve(p: Problem, cfg: SolverConfig, warm_starts: Sequence[PairFunction]) -> SolveResult:
    candidates: list[SolveResult] = []
    for offset, w0 in enumerate(warm_starts):
        out = _run_descent(p, cfg, as_pair(p.graph, w0), offset - len(warm_starts))
        if out is not None:
            candidates.append(out)
    for i in range(cfg.restarts):
        rng = np.random.default_rng([cfg.rng_seed, i])
        out = _run_descent(p, cfg, _initial_pair(p, rng), i)
        if out is not None:
            candidates.append(out)
    if not candidates:
        raise AllRestartsDegenerateError(
            "coupling degenerated to zero in every restart; no Nehari projection exists")
    pool = [c for c in candidates if c.converged] or candidates
    best = min(c.energy for c in pool)
    tol = 1e-12 * max(1.0, abs(best))
    return min((c for c in pool if c.energy <= best + tol), key=lambda c: c.restart_index)


def solve_ground_state(p: LambdaProblem, cfg: SolverConfig | None = None,
                       warm_starts: Sequence[PairFunction] = ()) -> SolveResult:
    """Lowest-energy Nehari minimizer of the lambda-problem over all restarts.

    Unconverged runs are reported through the converged flag, never raised.
    Extra deterministic starting pairs (warm starts) may be supplied; they are
    run before the seeded random restarts and win energy ties.
    """
    if not isinstance(p, LambdaProblem):
        raise TypeError(f"expected LambdaProblem, got {type(p).__name__}")
    return _solve(p, cfg or SolverConfig(), warm_starts)


def solve_dirichlet(d: DirichletProblem, cfg: SolverConfig | None = None,
                    warm_starts: Sequence[PairFunction] = ()) -> SolveResult:
    """Ground state of the Dirichlet system, restricted to admissible pairs."""
    if not isinstance(d, DirichletProblem):
        raise TypeError(f"expected DirichletProblem, got {type(d).__name__}")
    return _solve(d, cfg or SolverConfig(), warm_starts)


def descent_step(p: Problem, w, step: float, cfg: SolverConfig) -> tuple[PairFunction, float]:
    """One Armijo-backtracked step along the negative residual, no projection.

    Returns the updated pair and the accepted step size; a zero step signals
    line-search underflow (the caller should restart). The decrement target is
    armijo_c * step * ||R||^2 in L2(dmu), the exact first-order decrease of a
    steepest-descent step in that metric.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    w = as_pair(p.graph, w)
    res = residual_of(p, w)
    mu = p.graph.mu
    rn2 = float(np.dot(mu, res.u * res.u) + np.dot(mu, res.v * res.v))
    if rn2 == 0.0:
        return w, float(step)
    energy = energy_of(p, w)
    s = float(step)
    while s > _STEP_UNDERFLOW * step:
        trial = PairFunction(w.u - s * res.u, w.v - s * res.v)
        if energy_of(p, trial) <= energy - cfg.armijo_c * s * rn2:
            return trial, s
        s *= cfg.backtrack
    return w, 0.0
