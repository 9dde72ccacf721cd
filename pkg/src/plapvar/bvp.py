"""Variational space, energy, gradient and embedding constant for the
Dirichlet boundary value problem on [1, T] (order 2 and order n).

States live on the padded window [-1, T+2] (order n: [1-n, T+n]) with the
padding pinned to zero; that convention makes the space T-dimensional and
kills every boundary term in the summation-by-parts identities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Tuple, Union

import numpy as np

from . import _kernels as kernels
from .lattice import DomainError, LatticeFunction, as_exponent, phi
from .nonlinearity import Nonlinearity

__all__ = [
    "BvpProblem",
    "HigherOrderBvpProblem",
    "StateX",
    "embed_state",
    "restrict",
    "norm_X",
    "rho",
    "rho_q_exact",
    "rho_n",
    "Phi1",
    "Psi1",
    "J1",
    "grad_J1",
    "residual",
    "directional_derivative",
    "sbp_check",
    "sbp_defect_order",
    "max_embedding_check",
    "step_inequalities_hold",
]

BOUNDARY_CONVENTION = (
    "padded window with u(-1)=u(0)=u(T+1)=u(T+2)=0 "
    "(space-side convention; the problem display's Delta u(T)=0 is not used)"
)


@dataclass(frozen=True)
class BvpProblem:
    """Order-2 boundary value problem data: (T, q, a, V(1..T), f, lambda)."""

    T: int
    q: float
    a: float
    V: np.ndarray
    nl: Nonlinearity
    lam: float = 0.0

    def __post_init__(self):
        if self.T < 1:
            raise DomainError(f"T must be >= 1, got {self.T}")
        as_exponent(self.q)
        if self.a < 0:
            raise DomainError("a must be nonnegative")
        if self.lam < 0:
            raise DomainError("lambda must be nonnegative")
        V = np.array(self.V, dtype=float)
        if V.shape != (self.T,):
            raise DomainError(f"V needs {self.T} entries, got {V.shape}")
        if np.any(V <= 0.0):
            raise DomainError("V must be strictly positive")
        V.setflags(write=False)
        object.__setattr__(self, "V", V)

    @property
    def order(self) -> int:
        return 2

    @property
    def V0(self) -> float:
        return float(np.min(self.V))

    @property
    def V1(self) -> float:
        return float(np.max(self.V))

    @property
    def pad(self) -> int:
        return 2

    def sites(self) -> np.ndarray:
        return np.arange(1, self.T + 1)


@dataclass(frozen=True)
class HigherOrderBvpProblem(BvpProblem):
    """Order-n problem; a_coeffs = (a_1, ..., a_{n-1}), a_n = 1 implicit.

    The certified regime needs 2n < T, but the operators themselves only
    need n >= 1.
    """

    n: int = 2
    a_coeffs: Tuple[float, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if self.n < 1:
            raise DomainError("order n must be >= 1")
        if len(self.a_coeffs) != self.n - 1:
            raise DomainError(f"need {self.n - 1} coefficients a_1..a_{self.n - 1}")
        if any(ai < 0 for ai in self.a_coeffs):
            raise DomainError("a_i must be nonnegative")
        object.__setattr__(self, "a_coeffs", tuple(float(ai) for ai in self.a_coeffs))

    @property
    def order(self) -> int:
        return self.n

    @property
    def pad(self) -> int:
        return self.n


@dataclass(frozen=True)
class StateX:
    """A state of the T-dimensional space: zero-padded lattice function."""

    u: LatticeFunction
    pad: int = 2

    def __post_init__(self):
        vals = self.u.values
        if len(vals) < 2 * self.pad + 1:
            raise DomainError("window too short for the padding")
        if np.any(vals[: self.pad] != 0.0) or np.any(vals[-self.pad :] != 0.0):
            raise DomainError("padding entries must vanish")

    @property
    def T(self) -> int:
        return len(self.u) - 2 * self.pad

    @property
    def free(self) -> np.ndarray:
        return self.u.values[self.pad : -self.pad]

    @property
    def full(self) -> np.ndarray:
        return self.u.values


def _pad_of(problem: BvpProblem) -> int:
    return problem.pad


def embed_state(free: Union[Sequence[float], np.ndarray], problem: BvpProblem) -> StateX:
    """Extend T free values on [1, T] by zeros on the padded window."""
    free = np.asarray(free, dtype=float)
    if free.shape != (problem.T,):
        raise DomainError(f"need {problem.T} free values, got {free.shape}")
    pad = _pad_of(problem)
    w = np.zeros(problem.T + 2 * pad)
    w[pad:-pad] = free
    return StateX(LatticeFunction(1 - pad, problem.T + pad, w), pad=pad)


def restrict(state: StateX) -> np.ndarray:
    """Inverse of :func:`embed_state`: the values on [1, T]."""
    return state.free.copy()


def _coerce_full(u, problem: BvpProblem) -> np.ndarray:
    """Accept a StateX, a full padded vector, or T free values."""
    if isinstance(u, StateX):
        return u.full
    arr = np.asarray(u, dtype=float)
    pad = _pad_of(problem)
    if arr.shape == (problem.T,):
        w = np.zeros(problem.T + 2 * pad)
        w[pad:-pad] = arr
        return w
    if arr.shape == (problem.T + 2 * pad,):
        return arr
    raise DomainError(f"state has wrong length {arr.shape}")


def _phi1_higher(w: np.ndarray, q: float, n: int, a_coeffs, V: np.ndarray) -> float:
    total = float(np.sum(np.abs(np.diff(w, n)) ** q))
    for i, ai in enumerate(a_coeffs, start=1):
        total += ai * float(np.sum(np.abs(np.diff(w, n - i)) ** q))
    total += float(np.sum(V * np.abs(w[n:-n]) ** q))
    return total / q


def _grad_phi1_higher(w: np.ndarray, q: float, n: int, a_coeffs, V: np.ndarray) -> np.ndarray:
    T = len(w) - 2 * n
    out = V * phi(q, w[n:-n])
    weights = [(n, 1.0)] + [(n - i, ai) for i, ai in enumerate(a_coeffs, start=1)]
    for j, aj in weights:
        if aj == 0.0:
            continue
        G = np.diff(phi(q, np.diff(w, j)), j)
        out = out + aj * ((-1) ** j) * G[n - j : n - j + T]
    return out


def Phi1(u, problem: BvpProblem) -> float:
    """The coercive part of the energy; equals norm_X(u)^q / q."""
    w = _coerce_full(u, problem)
    if problem.order == 2:
        return float(kernels.energy(w, problem.q, problem.q, problem.q, problem.a, problem.V))
    return _phi1_higher(w, problem.q, problem.order, problem.a_coeffs, problem.V)


def norm_X(u, problem: BvpProblem) -> float:
    """The variational norm of the space X."""
    return float((problem.q * Phi1(u, problem)) ** (1.0 / problem.q))


def Psi1(u, problem: BvpProblem) -> float:
    """Minus the summed potential over the free sites."""
    w = _coerce_full(u, problem)
    pad = _pad_of(problem)
    k = problem.sites()
    return -float(np.sum(problem.nl.F_at(k, w[pad:-pad])))


def J1(u, problem: BvpProblem) -> float:
    """Full energy Phi1 + lambda * Psi1."""
    return Phi1(u, problem) + problem.lam * Psi1(u, problem)


def grad_J1(u, problem: BvpProblem) -> np.ndarray:
    """Euler-Lagrange gradient over the free sites [1, T]."""
    w = _coerce_full(u, problem)
    pad = _pad_of(problem)
    k = problem.sites()
    if problem.order == 2:
        g = kernels.grad(w, problem.q, problem.q, problem.q, problem.a, problem.V)
    else:
        g = _grad_phi1_higher(w, problem.q, problem.order, problem.a_coeffs, problem.V)
    return g - problem.lam * problem.nl.f_at(k, w[pad:-pad])


def residual(u, problem: BvpProblem) -> np.ndarray:
    """The difference-equation residual; identical to :func:`grad_J1`."""
    return grad_J1(u, problem)


def directional_derivative(u, v, problem: BvpProblem) -> float:
    """<J1'(u), v> in its bilinear (weak) form, computed without the
    strong residual; used to cross-check :func:`grad_J1`."""
    if problem.order != 2:
        raise DomainError("bilinear form implemented for order 2 only")
    wu = _coerce_full(u, problem)
    wv = _coerce_full(v, problem)
    q, a = problem.q, problem.a
    d2u, d2v = np.diff(wu, 2), np.diff(wv, 2)
    d1u, d1v = np.diff(wu), np.diff(wv)
    k = problem.sites()
    uf, vf = wu[2:-2], wv[2:-2]
    return float(
        math.fsum(phi(q, d2u) * d2v)
        + a * math.fsum(phi(q, d1u) * d1v)
        + math.fsum(problem.V * phi(q, uf) * vf)
        - problem.lam * math.fsum(problem.nl.f_at(k, uf) * vf)
    )


def rho(T: int, q: float, a: float, V0: float) -> float:
    """Embedding constant: max |u| <= rho * norm_X(u) on X."""
    if T < 1 or V0 <= 0 or a < 0:
        raise DomainError("need T >= 1, a >= 0, V0 > 0")
    q = as_exponent(q)
    num = (T + 1) * (T + 2) ** ((q - 1.0) / q)
    den = (
        4.0 ** q
        + 2.0 ** q * a * (T + 1) * float(T + 2) ** (q - 1.0)
        + V0 * float(T + 1) ** q * float(T + 2) ** (q - 1.0)
    ) ** (1.0 / q)
    return num / den


def rho_q_exact(T: int, q: int, a, V0) -> Fraction:
    """Exact rational rho^q for integer q (a, V0 exact as given)."""
    if not (isinstance(q, int) and q > 1):
        raise DomainError("exact mode needs integer q > 1")
    a = Fraction(a)
    V0 = Fraction(V0)
    num = Fraction((T + 1) ** q * (T + 2) ** (q - 1))
    den = Fraction(4 ** q) + Fraction(2 ** q) * a * (T + 1) * (T + 2) ** (q - 1) + V0 * (T + 1) ** q * (T + 2) ** (q - 1)
    return num / den


def rho_n(T: int, q: float, n: int, a_coeffs: Sequence[float], V0: float) -> float:
    """Order-n embedding constant; reduces to :func:`rho` at n = 2, a_1 = a.

    Computed from the order-i step bounds
    sum |Delta^i u|^q >= 2^(qi) max|u|^q / ((T+i)^(q-1) prod_{j<i} (T+j)^q),
    whose reciprocal sum (plus V0) is 1 / rho^q.
    """
    if n < 1 or len(a_coeffs) != n - 1:
        raise DomainError(f"need n >= 1 and {n - 1} coefficients")
    q = as_exponent(q)

    def term(i: int) -> float:
        prod = 1.0
        for j in range(1, i):
            prod *= float(T + j) ** q
        return 2.0 ** (q * i) / (float(T + i) ** (q - 1.0) * prod)

    inv = term(n) + V0
    for i, ai in enumerate(a_coeffs, start=1):
        inv += ai * term(n - i)
    return inv ** (-1.0 / q)


def sbp_check(u, v, problem: BvpProblem) -> Tuple[float, float]:
    """Defects of the two order-2 summation-by-parts identities on X.

    Both vanish identically in exact arithmetic; returned values are the
    floating-point leftovers.
    """
    wu = _coerce_full(u, problem)
    wv = _coerce_full(v, problem)
    q = problem.q
    T = problem.T
    d1u, d1v = np.diff(wu), np.diff(wv)
    d2u, d2v = np.diff(wu, 2), np.diff(wv, 2)
    g1 = phi(q, d1u)
    g2 = phi(q, d2u)
    vf = wv[2:-2]
    # sum_{k=1}^{T+1} phi(Du(k-1)) Dv(k-1) = -sum_{k=1}^{T} D(phi(Du(k-1))) v(k)
    lhs1 = math.fsum(g1[1 : T + 2] * d1v[1 : T + 2])
    rhs1 = math.fsum(np.diff(g1)[1 : T + 1] * vf)
    # sum_{k=1}^{T+2} phi(D2u(k-2)) D2v(k-2) = sum_{k=1}^{T} D2(phi(D2u(k-2))) v(k)
    lhs2 = math.fsum(g2 * d2v)
    rhs2 = math.fsum(np.diff(g2, 2) * vf)
    return abs(lhs1 + rhs1), abs(lhs2 - rhs2)


def sbp_defect_order(u: LatticeFunction, v: LatticeFunction, q: float, i: int) -> float:
    """Defect of the order-i identity
    sum phi(D^i u) D^i v = (-1)^i sum D^i(phi(D^i u)) v
    for states sharing a window with at least i zero padding per side."""
    q = as_exponent(q)
    if (u.window_lo, u.window_hi) != (v.window_lo, v.window_hi):
        raise DomainError("states must share a window")
    wu, wv = u.values, v.values
    L = len(wu)
    if L < 2 * i + 1:
        raise DomainError("window too short for the requested order")
    for w in (wu, wv):
        if np.any(w[:i] != 0.0) or np.any(w[-i:] != 0.0):
            raise DomainError(f"states need {i} zero padding entries per side")
    g = phi(q, np.diff(wu, i))
    lhs = math.fsum(g * np.diff(wv, i))
    rhs = ((-1) ** i) * math.fsum(np.diff(g, i) * wv[i : L - i])
    return abs(lhs - rhs)


def step_inequalities_hold(u, problem: BvpProblem, slack: float = 1e-12) -> bool:
    """2|u(j)| <= sum |Du| and 2|Du(j-1)| <= sum |D2u| for all j in [1, T]."""
    w = _coerce_full(u, problem)
    T = problem.T
    d1 = np.diff(w)
    d2 = np.diff(w, 2)
    s1 = math.fsum(np.abs(d1[1 : T + 2]))
    s2 = math.fsum(np.abs(d2[: T + 2]))
    ok1 = np.all(2.0 * np.abs(w[2 : T + 2]) <= s1 + slack)
    ok2 = np.all(2.0 * np.abs(d1[1 : T + 1]) <= s2 + slack)
    return bool(ok1 and ok2)


def max_embedding_check(u, problem: BvpProblem, slack: float = 1e-12) -> bool:
    """max_{[1,T]} |u| <= rho * norm_X(u), with a tiny rounding slack."""
    w = _coerce_full(u, problem)
    pad = _pad_of(problem)
    sup = float(np.max(np.abs(w[pad:-pad])))
    if problem.order == 2:
        r = rho(problem.T, problem.q, problem.a, problem.V0)
    else:
        r = rho_n(problem.T, problem.q, problem.order, problem.a_coeffs, problem.V0)
    return sup <= r * norm_X(w, problem) + slack
