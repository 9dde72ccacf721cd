"""Whole-line problem by truncation: the lattice energy on [-N, N] with
zero Dirichlet padding, its gradient, the mountain-pass solve across an
increasing truncation schedule, and the translation structure checks.

Note on the gradient: the first-order term uses the exponent p1 from the
problem statement (the published gradient display repeats p2 there); the
choice is recorded in every report.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as kernels
from . import certifier, solvers
from .lattice import DomainError, LatticeFunction, PeriodicTable, as_exponent, phi
from .nonlinearity import Nonlinearity

__all__ = [
    "HomoclinicProblem",
    "HigherOrderHomoclinicProblem",
    "TruncationReport",
    "GRADIENT_CONVENTION",
    "J_home",
    "grad_home",
    "grad_home_free",
    "find_ascent_endpoint",
    "solve_homoclinic",
    "translate",
    "embedding_bound_check",
    "AscentError",
]

GRADIENT_CONVENTION = (
    "first-order term uses phi_{p1} per the problem statement "
    "(the gradient display's phi_{p2} there is not used)"
)


class AscentError(RuntimeError):
    """No negative-energy state found along the scanned rays."""


@dataclass(frozen=True)
class HomoclinicProblem:
    """Whole-line problem data (order 2): exponents, weights and nonlinearity.

    V lists one period starting at site 0 and extends periodically; the
    nonlinearity must share the same period.
    """

    p1: float
    p2: float
    q: float
    a: float
    lam: float
    V: PeriodicTable
    nl: Nonlinearity
    mu: float
    s_threshold: float = 1.0

    def __post_init__(self):
        for name in ("p1", "p2", "q", "mu"):
            as_exponent(getattr(self, name))
        if not (self.p1 >= self.q and self.p2 >= self.q):
            raise DomainError("need p1, p2 >= q")
        if not (self.mu > self.p1 and self.mu > self.p2):
            raise DomainError("need mu > p1, p2")
        if self.a <= 0:
            raise DomainError("a must be positive")
        if self.lam < 0:
            raise DomainError("lambda must be nonnegative")
        if np.any(self.V.values <= 0):
            raise DomainError("V must be positive")
        if self.nl.period is not None and self.nl.period != self.V.period:
            raise DomainError("nonlinearity period must match V")
        if self.s_threshold <= 0:
            raise DomainError("s threshold must be positive")

    @property
    def T(self) -> int:
        return self.V.period


@dataclass(frozen=True)
class HigherOrderHomoclinicProblem:
    """Order-n variant; a_coeffs = (a_1, ..., a_{n-1}), a_n = 1 implicit."""

    n: int
    p: Tuple[float, ...]  # (p_1, ..., p_n)
    q: float
    a_coeffs: Tuple[float, ...]
    lam: float
    V: PeriodicTable
    nl: Nonlinearity
    mu: float
    s_threshold: float = 1.0

    def __post_init__(self):
        if self.n < 1 or len(self.p) != self.n or len(self.a_coeffs) != self.n - 1:
            raise DomainError("inconsistent order-n data")
        as_exponent(self.q)
        for pi in self.p:
            if not as_exponent(pi) >= self.q:
                raise DomainError("need p_i >= q")
            if not self.mu > pi:
                raise DomainError("need mu > p_i")
        if any(ai < 0 for ai in self.a_coeffs):
            raise DomainError("a_i must be nonnegative")


@dataclass(frozen=True)
class TruncationReport:
    N: int
    tail_max: float
    energy: float
    mp_level: float
    converged: bool


def _coerce_full(u, problem: HomoclinicProblem) -> np.ndarray:
    """Accept free values on [-N, N] (raw array or symmetric lattice
    function) and return the zero-padded vector on [-N-2, N+2]."""
    if isinstance(u, LatticeFunction):
        if u.window_lo != -u.window_hi:
            raise DomainError("homoclinic states live on symmetric windows [-N, N]")
        arr = np.asarray(u.values, dtype=float)
    else:
        arr = np.asarray(u, dtype=float)
    if arr.ndim != 1 or len(arr) % 2 == 0:
        raise DomainError("free state must be an odd-length 1-d array on [-N, N]")
    w = np.zeros(len(arr) + 4)
    w[2:-2] = arr
    return w


def _window_data(w: np.ndarray, problem: HomoclinicProblem):
    N = (len(w) - 5) // 2
    ks = np.arange(-N, N + 1)
    Varr = problem.V.on_window(-N, N)
    return N, ks, Varr


def J_home(u, problem: HomoclinicProblem) -> float:
    """Truncated whole-line energy: quasilinear part minus lambda * sum F."""
    w = _coerce_full(u, problem)
    _, ks, Varr = _window_data(w, problem)
    quad = kernels.energy(w, problem.p2, problem.p1, problem.q, problem.a, Varr)
    pot = float(np.sum(problem.nl.F_at(ks, w[2:-2])))
    return float(quad) - problem.lam * pot


def grad_home_free(u, problem: HomoclinicProblem) -> np.ndarray:
    """Gradient over the free sites [-N, N] as a plain array."""
    w = _coerce_full(u, problem)
    _, ks, Varr = _window_data(w, problem)
    g = kernels.grad(w, problem.p2, problem.p1, problem.q, problem.a, Varr)
    return g - problem.lam * problem.nl.f_at(ks, w[2:-2])


def grad_home(u, problem: HomoclinicProblem) -> LatticeFunction:
    """Gradient as a lattice function on [-N, N]."""
    w = _coerce_full(u, problem)
    N = (len(w) - 5) // 2
    return LatticeFunction(-N, N, grad_home_free(u, problem))


def translate(u: LatticeFunction, shift: int) -> LatticeFunction:
    """result(k) = u(k + shift) on the same window; clipping nonzero
    support is a domain error."""
    vals = u.values
    n = len(vals)
    out = np.zeros(n)
    src_lo = max(0, shift)
    src_hi = min(n, n + shift)
    if src_lo < src_hi:
        out[src_lo - shift : src_hi - shift] = vals[src_lo:src_hi]
    # values shifted out of the window must have been zero
    clipped = np.concatenate([vals[:shift] if shift > 0 else vals[n + shift :] if shift < 0 else np.empty(0)])
    if clipped.size and np.any(clipped != 0.0):
        raise DomainError("translation clips nonzero support")
    return LatticeFunction(u.window_lo, u.window_hi, out)


def embedding_bound_check(u: LatticeFunction, p1: float, p2: float) -> bool:
    """The convexity-derived bounds used for well-definedness:
    sum phi_{p2}(D2 u) <= (4^p2 / p2) sum |u|^p2 and
    sum |D u|^p1 <= 2^p1 sum |u|^p1, for finitely supported u."""
    p1 = as_exponent(p1)
    p2 = as_exponent(p2)
    w = np.zeros(len(u) + 4)
    w[2:-2] = u.values
    lhs2 = float(np.sum(np.abs(np.diff(w, 2)) ** p2)) / p2
    rhs2 = 4.0 ** p2 / p2 * float(np.sum(np.abs(u.values) ** p2))
    lhs1 = float(np.sum(np.abs(np.diff(w)) ** p1))
    rhs1 = 2.0 ** p1 * float(np.sum(np.abs(u.values) ** p1))
    tol = 1e-12
    return lhs2 <= rhs2 * (1 + tol) + tol and lhs1 <= rhs1 * (1 + tol) + tol


def find_ascent_endpoint(problem: HomoclinicProblem, N: int, t_max: float = 1e6) -> np.ndarray:
    """Scan rays t * u0 for a state with negative energy.

    Directions: a unit spike at 0 and a bump of width 3; t grows
    geometrically.  Superlinear growth of F guarantees success when the
    superlinearity condition holds and lambda > 0."""
    if N < 3:
        raise DomainError("truncation radius too small")
    spike = np.zeros(2 * N + 1)
    spike[N] = 1.0
    bump = np.zeros(2 * N + 1)
    bump[N - 1 : N + 2] = np.exp(-np.array([-1.0, 0.0, 1.0]) ** 2)
    for u0 in (spike, bump):
        t = 1.0
        while t <= t_max:
            cand = t * u0
            if J_home(cand, problem) < 0.0:
                return cand
            t *= 1.5
    raise AscentError("no negative-energy state found along the scanned rays")


def _tail_max(free: np.ndarray) -> float:
    n = len(free)
    m = max(1, n // 10)
    return float(max(np.max(np.abs(free[:m])), np.max(np.abs(free[-m:]))))


def _center(free: np.ndarray, T: int) -> np.ndarray:
    """Shift by a multiple of T so the max-|u| site lands in [0, T-1]."""
    N = (len(free) - 1) // 2
    k_max = int(np.argmax(np.abs(free))) - N
    j = k_max - (k_max % T)  # j is the multiple of T below k_max
    if j == 0:
        return free
    shifted = np.zeros_like(free)
    lo = max(0, j)
    hi = min(len(free), len(free) + j)
    shifted[lo - j : hi - j] = free[lo:hi]
    # keep the original if the shift would clip meaningful support
    clipped = free[:j] if j < 0 else free[len(free) - j :]
    if clipped.size and np.max(np.abs(clipped)) > 1e-12:
        return free
    return shifted


def run_hypothesis_checks(problem: HomoclinicProblem, box_half_width: float = 50.0) -> dict:
    """(F1)-(F3) falsification checks for the problem's nonlinearity."""
    T = problem.T
    k_range = range(0, T)
    return {
        "F1_periodicity": certifier.periodicity_check(problem.nl, problem.V, T),
        "F2_superlinearity": certifier.rabinowitz_check(
            problem.nl,
            problem.mu,
            problem.s_threshold,
            (-box_half_width, box_half_width),
            k_range=list(k_range),
        ),
        "F3_smallness": certifier.smallness_check(problem.nl, problem.q, k_range=list(k_range)),
    }


def solve_homoclinic(
    problem: HomoclinicProblem,
    N_schedule: Sequence[int],
    config: solvers.SolverConfig,
    tail_tol: float = 1e-6,
    nontrivial_floor: float = 1e-3,
    waive_checks: bool = False,
) -> Tuple[List[Tuple[solvers.CriticalPoint, TruncationReport]], str]:
    """Mountain-pass solve at each truncation radius in the schedule.

    Later levels warm-start from the previous solution (Newton polish),
    falling back to a fresh mountain pass when that fails.  Returns the
    per-N trace and a status string ("ok" or "partial")."""
    if not N_schedule or any(n2 <= n1 for n1, n2 in zip(N_schedule, N_schedule[1:])):
        raise DomainError("N_schedule must be strictly increasing and nonempty")
    if not waive_checks:
        checks = run_hypothesis_checks(problem)
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            raise DomainError(f"hypothesis checks failed: {', '.join(failed)} (waive explicitly to proceed)")
    results: List[Tuple[solvers.CriticalPoint, TruncationReport]] = []
    prev_free: Optional[np.ndarray] = None
    status = "ok"
    for N in N_schedule:
        fun = lambda x: J_home(x, problem)
        grad = lambda x: grad_home_free(x, problem)
        point = None
        if prev_free is not None:
            pad = N - (len(prev_free) - 1) // 2
            warm = np.concatenate([np.zeros(pad), prev_free, np.zeros(pad)])
            x, ok = solvers._newton_polish(grad, warm, config.grad_tol)
            if ok and float(np.max(np.abs(x))) >= nontrivial_floor:
                gn = float(np.max(np.abs(grad(x))))
                point = solvers.CriticalPoint(
                    values=x,
                    energy=float(fun(x)),
                    grad_norm=gn,
                    residual_norm=gn,
                    kind="mountain-pass-saddle",
                    converged=True,
                    origin=f"warm-start-N{N}",
                )
        if point is None:
            e = find_ascent_endpoint(problem, N)
            zero = np.zeros(2 * N + 1)
            point = solvers.mountain_pass(fun, grad, zero, e, config)
        centered = _center(point.values, problem.T)
        gn = float(np.max(np.abs(grad(centered))))
        point = solvers.CriticalPoint(
            values=centered,
            energy=float(fun(centered)),
            grad_norm=gn,
            residual_norm=gn,
            kind=point.kind,
            converged=point.converged and gn <= config.grad_tol,
            origin=point.origin,
        )
        report = TruncationReport(
            N=N,
            tail_max=_tail_max(point.values),
            energy=point.energy,
            mp_level=point.energy,
            converged=point.converged,
        )
        accept = (
            point.converged
            and report.tail_max <= tail_tol
            and float(np.max(np.abs(point.values))) >= nontrivial_floor
        )
        # the schedule's early levels are warm-up: only the final level decides
        status = "ok" if accept else "partial"
        results.append((point, report))
        prev_free = point.values
    return results, status
