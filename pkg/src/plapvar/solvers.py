"""Critical-point machinery: quasi-Newton local minimization, a numerical
mountain-pass (string) method, and deflated multistart assembly of at
least three solutions.

Every accepted point is polished by a damped Newton iteration on the
gradient, so reported residuals reach the configured tolerance whenever
the critical point is nondegenerate.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .lattice import DomainError

__all__ = [
    "SolverConfig",
    "CriticalPoint",
    "minimize_local",
    "mountain_pass",
    "find_three",
    "distinctness_report",
]

Objective = Callable[[np.ndarray], float]
Gradient = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SolverConfig:
    grad_tol: float = 1e-8
    max_iters: int = 100_000
    path_nodes: int = 41
    deflation_radius: float = 1e-4
    multistart_count: int = 64
    seed: int = 0
    start_scales: Tuple[float, ...] = (1.0, 5.0, 15.0)
    divergence_bound: float = 1e6

    def __post_init__(self):
        if self.grad_tol <= 0 or self.max_iters <= 0 or self.path_nodes < 3:
            raise DomainError("invalid solver configuration")
        if self.deflation_radius <= 0 or self.multistart_count < 0:
            raise DomainError("invalid solver configuration")


@dataclass(frozen=True)
class CriticalPoint:
    values: np.ndarray
    energy: float
    grad_norm: float
    residual_norm: float
    kind: str  # "local-min" | "mountain-pass-saddle" | "unclassified"
    converged: bool
    origin: str = ""

    def sup_distance(self, other: "CriticalPoint") -> float:
        return float(np.max(np.abs(self.values - other.values)))


def _sup(g: np.ndarray) -> float:
    return float(np.max(np.abs(g))) if g.size else 0.0


def _fd_hessian(grad: Gradient, x: np.ndarray, h_rel: float = 1e-6) -> np.ndarray:
    n = len(x)
    H = np.empty((n, n))
    for i in range(n):
        h = h_rel * max(1.0, abs(x[i]))
        e = np.zeros(n)
        e[i] = h
        H[:, i] = (grad(x + e) - grad(x - e)) / (2.0 * h)
    return H


def _newton_polish(
    grad: Gradient,
    x0: np.ndarray,
    tol: float,
    max_iter: int = 60,
) -> Tuple[np.ndarray, bool]:
    """Damped Newton on grad = 0 with a finite-difference Jacobian."""
    x = x0.copy()
    if not np.all(np.isfinite(x)):
        return x, False
    g = grad(x)
    gn = _sup(g)
    if not np.isfinite(gn):
        return x, False
    for _ in range(max_iter):
        if gn <= tol:
            return x, True
        J = _fd_hessian(grad, x)
        if not np.all(np.isfinite(J)):
            return x, False
        try:
            step = np.linalg.solve(J, -g)
        except np.linalg.LinAlgError:
            try:
                step, *_ = np.linalg.lstsq(J, -g, rcond=None)
            except np.linalg.LinAlgError:
                return x, False
        if not np.all(np.isfinite(step)):
            return x, False
        t = 1.0
        improved = False
        for _ in range(40):
            x_new = x + t * step
            g_new = grad(x_new)
            gn_new = _sup(g_new)
            if gn_new < gn:
                x, g, gn = x_new, g_new, gn_new
                improved = True
                break
            t *= 0.5
        if not improved:
            return x, gn <= tol
    return x, gn <= tol


def _classify(grad: Gradient, x: np.ndarray, psd_tol: float = 1e-6) -> str:
    H = _fd_hessian(grad, x)
    H = 0.5 * (H + H.T)
    eigs = np.linalg.eigvalsh(H)
    scale = max(1.0, float(np.max(np.abs(eigs)))) if eigs.size else 1.0
    if np.all(eigs >= -psd_tol * scale):
        return "local-min"
    return "unclassified"


def minimize_local(
    fun: Objective,
    grad: Gradient,
    x0: Sequence[float],
    config: SolverConfig,
    origin: str = "minimize",
) -> CriticalPoint:
    """BFGS descent with Armijo backtracking, then Newton polish.

    The line search uses function values only (no curvature condition):
    the energies here are C^1 but not C^2 for exponents below 2.
    """
    x = np.array(x0, dtype=float)
    if not np.isfinite(fun(x)):
        raise DomainError("objective not finite at the starting point")
    n = len(x)
    f = fun(x)
    g = grad(x)
    H = np.eye(n)
    iters = min(config.max_iters, 5000)
    converged = False
    for _ in range(iters):
        gn = _sup(g)
        if gn <= config.grad_tol:
            converged = True
            break
        if float(np.linalg.norm(x)) > config.divergence_bound:
            break
        d = -H @ g
        slope = float(np.dot(d, g))
        if slope >= -1e-14 * float(np.linalg.norm(d)) * float(np.linalg.norm(g)):
            d = -g
            H = np.eye(n)
            slope = -float(np.dot(g, g))
        t = 1.0
        accepted = False
        for _ in range(60):
            x_new = x + t * d
            f_new = fun(x_new)
            if np.isfinite(f_new) and f_new <= f + 1e-4 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        s = x_new - x
        g_new = grad(x_new)
        y = g_new - g
        sy = float(np.dot(s, y))
        if sy > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)) + 1e-300:
            rho_bfgs = 1.0 / sy
            I = np.eye(n)
            V = I - rho_bfgs * np.outer(s, y)
            H = V @ H @ V.T + rho_bfgs * np.outer(s, s)
        x, f, g = x_new, f_new, g_new
    # Newton polish when the iterate is already in a critical point's basin.
    if _sup(g) <= max(1e-3, 1e3 * config.grad_tol):
        x_pol, ok = _newton_polish(grad, x, config.grad_tol)
        moved = _sup(x_pol - x)
        if ok and moved <= 0.5 * max(1.0, float(np.linalg.norm(x))):
            x = x_pol
            g = grad(x)
            converged = _sup(g) <= config.grad_tol
    gn = _sup(g)
    kind = _classify(grad, x) if converged else "unclassified"
    return CriticalPoint(
        values=x,
        energy=float(fun(x)),
        grad_norm=gn,
        residual_norm=gn,
        kind=kind,
        converged=converged,
        origin=origin,
    )


class NoBarrierError(RuntimeError):
    """The path between the endpoints collapsed: no barrier detected."""


def _equidistribute(path: np.ndarray, norm: Callable[[np.ndarray], float]) -> np.ndarray:
    """Re-space path nodes by piecewise-linear arclength."""
    M = len(path)
    seg = np.array([norm(path[i + 1] - path[i]) for i in range(M - 1)])
    total = float(np.sum(seg))
    if total <= 0.0:
        return path
    s = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, total, M)
    out = np.empty_like(path)
    out[0], out[-1] = path[0], path[-1]
    j = 0
    for i in range(1, M - 1):
        t = targets[i]
        while j < M - 2 and s[j + 1] < t:
            j += 1
        denom = s[j + 1] - s[j]
        lam = 0.0 if denom <= 0 else (t - s[j]) / denom
        out[i] = path[j] + lam * (path[j + 1] - path[j])
    return out


def mountain_pass(
    fun: Objective,
    grad: Gradient,
    low_state: Sequence[float],
    high_state: Sequence[float],
    config: SolverConfig,
    norm: Optional[Callable[[np.ndarray], float]] = None,
) -> CriticalPoint:
    """String method between two states, polished to a saddle.

    Discretizes a path, relaxes interior nodes along the gradient
    component orthogonal to the path, re-equidistributes after each
    sweep, and finishes with Newton from the max-energy node.  Raises
    :class:`NoBarrierError` when the path collapses onto an endpoint.
    """
    lo = np.array(low_state, dtype=float)
    hi = np.array(high_state, dtype=float)
    if norm is None:
        norm = lambda v: float(np.linalg.norm(v))
    if norm(hi - lo) <= config.deflation_radius:
        raise NoBarrierError("endpoints coincide: no barrier detected")
    M = config.path_nodes
    path = np.array([lo + t * (hi - lo) for t in np.linspace(0.0, 1.0, M)])
    f_end = max(fun(lo), fun(hi))
    dt = None
    sweeps = min(config.max_iters, 800)
    best_level = np.inf
    for sweep in range(sweeps):
        fvals = np.array([fun(p) for p in path])
        imax = 1 + int(np.argmax(fvals[1:-1]))
        g_max = grad(path[imax])
        best_level = min(best_level, float(fvals[imax]))
        if _sup(g_max) <= 1e-5:
            break
        grads = [grad(path[i]) for i in range(1, M - 1)]
        gscale = max(_sup(g) for g in grads) or 1.0
        pathlen = float(np.sum([norm(path[i + 1] - path[i]) for i in range(M - 1)]))
        if dt is None:
            dt = 0.2 * pathlen / (M * gscale)
        new_path = path.copy()
        cap = 0.5 * pathlen / (M - 1)  # per-node trust region: half a spacing
        for i in range(1, M - 1):
            tau = path[i + 1] - path[i - 1]
            tn = float(np.linalg.norm(tau))
            if tn > 0:
                tau = tau / tn
            gi = grads[i - 1]
            disp = dt * -(gi - float(np.dot(gi, tau)) * tau)
            dn = float(np.linalg.norm(disp))
            if dn > cap:
                disp *= cap / dn
            new_path[i] = path[i] + disp
        new_path = _equidistribute(new_path, norm)
        new_max = max(fun(p) for p in new_path[1:-1])
        # reject non-finite sweeps and sweeps whose max fell to the endpoint
        # level: both signal the discrete path escaping past the barrier
        if not (np.all(np.isfinite(new_path)) and np.isfinite(new_max)) or (
            new_max > fvals[imax] + 1e-12 * max(1.0, abs(fvals[imax]))
            or new_max <= f_end + 1e-12 * max(1.0, abs(f_end))
        ):
            dt *= 0.5
            if dt * gscale < 1e-14 * max(1.0, pathlen):
                break
        else:
            path = new_path
            dt *= 1.05
    fvals = np.array([fun(p) for p in path])
    imax = 1 + int(np.argmax(fvals[1:-1]))
    if fvals[imax] <= f_end + 1e-12 * max(1.0, abs(f_end)):
        raise NoBarrierError("max-energy node converged to an endpoint: no barrier detected")
    x, ok = _newton_polish(grad, path[imax], config.grad_tol)
    near_endpoint = min(_sup(x - lo), _sup(x - hi)) <= config.deflation_radius
    if near_endpoint:
        raise NoBarrierError("saddle search collapsed onto an endpoint: no barrier detected")
    g = grad(x)
    gn = _sup(g)
    return CriticalPoint(
        values=x,
        energy=float(fun(x)),
        grad_norm=gn,
        residual_norm=gn,
        kind="mountain-pass-saddle" if ok else "unclassified",
        converged=ok,
        origin="mountain-pass",
    )


def _dedupe(points: List[CriticalPoint], radius: float) -> List[CriticalPoint]:
    """Deflation bookkeeping: keep one representative per cluster.

    Tie-break: smaller residual, then smaller energy, then earlier index.
    """
    kept: List[CriticalPoint] = []
    order = sorted(
        range(len(points)),
        key=lambda i: (points[i].residual_norm, points[i].energy, i),
    )
    for i in order:
        p = points[i]
        if all(p.sup_distance(qpt) >= radius for qpt in kept):
            kept.append(p)
    return kept


def find_three(
    problem,
    lam: float,
    config: SolverConfig,
    structured_scale: Optional[float] = None,
) -> Tuple[List[CriticalPoint], str]:
    """Multistart minimization plus mountain passes between the minima.

    Returns the deduplicated points sorted by energy and a status string:
    "ok" when at least three pairwise-distinct critical points were found,
    otherwise "partial" (the underlying theorem is nonconstructive, so the
    solver reports what it found).
    """
    from . import bvp  # local import: solvers is otherwise problem-agnostic

    prob = dataclasses.replace(problem, lam=float(lam))
    fun = lambda x: bvp.J1(x, prob)
    grad = lambda x: bvp.grad_J1(x, prob)
    T = prob.T
    scales = config.start_scales
    if structured_scale is not None:
        scales = tuple(sorted(set(scales) | {structured_scale}))
    starts: List[np.ndarray] = [np.zeros(T)]
    for s in scales:
        starts.append(np.full(T, s))
        starts.append(np.full(T, -s))
        spike = np.zeros(T)
        spike[T // 2] = s
        starts.append(spike)
    rng = np.random.default_rng(config.seed)
    s_max = max(scales)
    for _ in range(config.multistart_count):
        starts.append(rng.uniform(-s_max, s_max, size=T))
    found: List[CriticalPoint] = []
    for idx, x0 in enumerate(starts):
        try:
            pt = minimize_local(fun, grad, x0, config, origin=f"start-{idx}")
        except DomainError:
            continue
        if pt.converged:
            found.append(pt)
    found = _dedupe(found, config.deflation_radius)
    minima = [p for p in found if p.kind == "local-min"]
    saddles: List[CriticalPoint] = []
    for i in range(len(minima)):
        for j in range(i + 1, len(minima)):
            try:
                sp = mountain_pass(fun, grad, minima[i].values, minima[j].values, config)
            except NoBarrierError:
                continue
            if sp.converged:
                saddles.append(sp)
    points = _dedupe(found + saddles, config.deflation_radius)
    points.sort(key=lambda p: (p.energy, tuple(p.values)))
    status = "ok" if len(points) >= 3 else "partial"
    return points, status


def distinctness_report(points: Sequence[CriticalPoint], radius: float):
    """Pairwise sup-norm distance matrix and the pairs below the radius."""
    n = len(points)
    D = np.zeros((n, n))
    flagged = []
    for i in range(n):
        for j in range(i + 1, n):
            d = points[i].sup_distance(points[j])
            D[i, j] = D[j, i] = d
            if d < radius:
                flagged.append((i, j))
    return D, flagged
