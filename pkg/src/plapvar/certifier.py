"""Hypothesis checks and the admissible lambda-interval for the
three-solutions result, plus the falsification checks (F1)-(F3) used on
the whole-line problem.

The continuous-domain conditions (growth bound, superlinearity,
smallness at the origin) are checked by sampling: a numeric tool cannot
prove universally quantified statements about a black-box f, so every
report states the sampled box alongside the verdict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .lattice import DomainError, PeriodicTable, as_exponent
from .nonlinearity import Nonlinearity
from . import bvp

__all__ = [
    "CertificationError",
    "GrowthWitness",
    "Certificate",
    "sup_F",
    "theta",
    "lambda_cap",
    "structure_constant",
    "check_d1",
    "check_d2",
    "lambda_interval",
    "check_vd_threshold",
    "rabinowitz_check",
    "smallness_check",
    "periodicity_check",
    "ps_lower_bound_check",
    "certify",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class CertificationError(ValueError):
    """A certification quantity is degenerate or the interval is empty."""

    def __init__(self, message: str, lambda_lo: float = math.inf, lambda_hi: float = math.inf):
        super().__init__(message)
        self.lambda_lo = lambda_lo
        self.lambda_hi = lambda_hi


@dataclass(frozen=True)
class GrowthWitness:
    """Witness (b, p) for the subcritical growth bound F <= b (1 + |t|^p)."""

    b: float
    p: float

    def __post_init__(self):
        if self.b <= 0:
            raise DomainError("witness b must be positive")
        if self.p < 0:
            raise DomainError("witness p must be nonnegative")


@dataclass(frozen=True)
class Certificate:
    """Everything the three-solutions check produced, ready for reporting."""

    rho: float
    rho_q: float
    rho_q_exact: Optional[Fraction]
    theta_c: float
    lambda_d: float
    level_r: float
    c: float
    d: float
    d1_holds: bool
    d1_lhs: float
    d1_rhs: float
    d2_holds: Optional[bool]
    d2_sample_box: Optional[Tuple[float, float]]
    vd_threshold_ok: bool
    lambda_lo: float
    lambda_hi: float
    interval_nonempty: bool
    flags: Tuple[str, ...] = ()


def _golden_max(fun: Callable[[float], float], lo: float, hi: float, rel_tol: float) -> Tuple[float, float]:
    """Golden-section maximization of a scalar function on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    scale = max(1.0, abs(lo), abs(hi))
    while (b - a) > rel_tol * scale:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fun(x1)
    xm = 0.5 * (a + b)
    return xm, fun(xm)


def sup_F(k: int, c: float, nl: Nonlinearity, rel_tol: float = 1e-10) -> float:
    """sup of F(k, .) over [-c, c].

    Exact for hinted monotone structure; otherwise a 1025-point grid with
    golden-section polish around the three best cells.
    """
    if c <= 0:
        raise DomainError("c must be positive")
    if nl.sup_hint == "increasing-in-|t|":
        return float(max(nl.F_at(k, c), nl.F_at(k, -c)))
    if nl.sup_hint == "increasing":
        return float(nl.F_at(k, c))
    if nl.sup_hint == "even":
        grid = np.linspace(0.0, c, 1025)
    else:
        grid = np.linspace(-c, c, 1025)
    vals = nl.F_at(np.full(grid.shape, k), grid)
    best = float(np.max(vals))
    top = np.argsort(vals)[-3:]
    fun = lambda t: float(nl.F_at(k, t))
    for idx in top:
        lo = grid[max(int(idx) - 1, 0)]
        hi = grid[min(int(idx) + 1, len(grid) - 1)]
        if hi > lo:
            _, fm = _golden_max(fun, lo, hi, rel_tol)
            best = max(best, fm)
    return best


def theta(c: float, nl: Nonlinearity, T: int, q: float) -> float:
    """(sum_k sup_{|s|<=c} F(k, s)) / c^q over k in [1, T]."""
    q = as_exponent(q)
    total = math.fsum(sup_F(k, c, nl) for k in range(1, T + 1))
    return total / c ** q


def lambda_cap(c: float, d: float, nl: Nonlinearity, T: int, q: float) -> float:
    """(sum_k (F(k, d) - sup_{|s|<=c} F(k, s))) / d^q over k in [1, T]."""
    if not (0 < c < d):
        raise DomainError(f"need 0 < c < d, got c={c}, d={d}")
    q = as_exponent(q)
    total = math.fsum(float(nl.F_at(k, d)) - sup_F(k, c, nl) for k in range(1, T + 1))
    return total / d ** q


def structure_constant(problem: bvp.BvpProblem) -> float:
    """4 + 2a at order 2; 2^n + sum_i 2^(n-i) a_i at order n."""
    if problem.order == 2:
        return 4.0 + 2.0 * problem.a
    n = problem.order
    return 2.0 ** n + sum(ai * 2.0 ** (n - i) for i, ai in enumerate(problem.a_coeffs, start=1))


def _rho_of(problem: bvp.BvpProblem) -> float:
    if problem.order == 2:
        return bvp.rho(problem.T, problem.q, problem.a, problem.V0)
    return bvp.rho_n(problem.T, problem.q, problem.order, problem.a_coeffs, problem.V0)


def check_d1(c: float, d: float, problem: bvp.BvpProblem, nl: Optional[Nonlinearity] = None) -> Tuple[bool, float, float]:
    """Condition (d1): theta(c) < lambda_cap(d) / (K * rho^q), strictly.

    Returns (holds, lhs, rhs) with K = structure_constant + T * V1.
    """
    nl = nl if nl is not None else problem.nl
    lhs = theta(c, nl, problem.T, problem.q)
    K = structure_constant(problem) + problem.T * problem.V1
    rhs = lambda_cap(c, d, nl, problem.T, problem.q) / (K * _rho_of(problem) ** problem.q)
    return lhs < rhs, lhs, rhs


def _d2_samples(box: Tuple[float, float], n: int) -> np.ndarray:
    lo, hi = box
    lin = np.linspace(lo, hi, n // 2)
    top = max(abs(lo), abs(hi), 1.0)
    logs = np.geomspace(1e-8, top, n // 4)
    return np.unique(np.concatenate([lin, logs, -logs, [0.0]]))


def check_d2(
    nl: Nonlinearity,
    witness: GrowthWitness,
    q: float,
    T: int,
    sample_box: Tuple[float, float],
    n_samples: int = 4096,
) -> bool:
    """Falsification check of F(k, t) <= b (1 + |t|^p) on the sampled box."""
    q = as_exponent(q)
    if not witness.p < q:
        raise DomainError("witness exponent p must be below q")
    t = _d2_samples(sample_box, n_samples)
    bound = witness.b * (1.0 + np.abs(t) ** witness.p)
    for k in range(1, T + 1):
        vals = nl.F_at(np.full(t.shape, k), t)
        if np.any(vals > bound * (1.0 + 1e-12)):
            return False
    return True


def lambda_interval(c: float, d: float, problem: bvp.BvpProblem, nl: Optional[Nonlinearity] = None) -> Tuple[float, float]:
    """The admissible interval (K / (q lambda_cap(d)), 1 / (q rho^q theta(c))).

    Raises :class:`CertificationError` when degenerate or empty, carrying
    both endpoints for reporting.
    """
    nl = nl if nl is not None else problem.nl
    q = problem.q
    K = structure_constant(problem) + problem.T * problem.V1
    lam_d = lambda_cap(c, d, nl, problem.T, q)
    th_c = theta(c, nl, problem.T, q)
    rq = _rho_of(problem) ** q
    hi = 1.0 / (q * rq * th_c) if th_c > 0 else math.inf
    if lam_d <= 0:
        raise CertificationError("lambda_cap(d) is not positive", math.inf, hi)
    lo = K / (q * lam_d)
    if not lo < hi:
        raise CertificationError("empty lambda interval", lo, hi)
    return lo, hi


def check_vd_threshold(c: float, d: float, problem: bvp.BvpProblem) -> bool:
    """Direct-summation check that the constant-d state clears the level:
    norm_X(v_d)^q > q r = (c / rho)^q, and (order 2, T >= 2) that the
    closed count (4 + 2a + sum V) d^q matches the direct sum."""
    if not (0 < c < d):
        raise DomainError(f"need 0 < c < d, got c={c}, d={d}")
    v_d = bvp.embed_state(np.full(problem.T, float(d)), problem)
    direct = bvp.norm_X(v_d, problem) ** problem.q
    if problem.order == 2 and problem.T >= 2:
        closed = (4.0 + 2.0 * problem.a + float(np.sum(problem.V))) * d ** problem.q
        if abs(direct - closed) > 1e-10 * max(1.0, abs(closed)):
            return False
    qr = (c / _rho_of(problem)) ** problem.q
    return direct > qr


def rabinowitz_check(
    nl: Nonlinearity,
    mu: float,
    s: float,
    sample_box: Tuple[float, float],
    k_range: Sequence[int] = (1,),
    n_samples: int = 512,
    rel_tol: float = 1e-9,
) -> bool:
    """Sampled superlinearity condition: mu F(k, t) <= t f(k, t) for t != 0
    and F(k, t) > 0 for t >= s, over the sampled box and listed sites."""
    mu = as_exponent(mu)
    if s <= 0:
        raise DomainError("threshold s must be positive")
    t = _d2_samples(sample_box, n_samples)
    t = t[np.abs(t) > 1e-12]
    for k in k_range:
        kk = np.full(t.shape, k)
        Fv = nl.F_at(kk, t)
        fv = nl.f_at(kk, t)
        scale = np.maximum(1.0, np.abs(t * fv))
        if np.any(mu * Fv - t * fv > rel_tol * scale):
            return False
        pos = t >= s
        if np.any(Fv[pos] <= 0.0):
            return False
    return True


def smallness_check(nl: Nonlinearity, q: float, k_range: Sequence[int] = (1,), threshold: float = 1e-4) -> bool:
    """Sampled check that f(k, t) is o(|t|^(q-1)) near t = 0: the ratio
    |f| / |t|^(q-1) must fall below the threshold at |t| = 1e-8."""
    q = as_exponent(q)
    t = np.concatenate([np.geomspace(1e-1, 1e-8, 29), -np.geomspace(1e-1, 1e-8, 29)])
    for k in k_range:
        ratio = np.abs(nl.f_at(np.full(t.shape, k), t)) / np.abs(t) ** (q - 1.0)
        smallest = np.abs(t) <= 1.001e-8
        if np.any(ratio[smallest] >= threshold):
            return False
    return True


def periodicity_check(
    nl: Nonlinearity,
    V: Union[PeriodicTable, Callable[[int], float]],
    T: int,
    seed: int = 0,
    n_samples: int = 64,
) -> bool:
    """Sampled T-periodicity of f(., t) and V: values at k and k + T agree."""
    rng = np.random.default_rng(seed)
    ks = rng.integers(-5 * T, 5 * T, size=n_samples)
    ts = rng.uniform(-10.0, 10.0, size=n_samples)
    V_at = V.at if isinstance(V, PeriodicTable) else np.vectorize(V)
    fv = nl.f_at(ks, ts)
    fv_shift = nl.f_at(ks + T, ts)
    scale = np.maximum(1.0, np.abs(fv))
    if np.any(np.abs(fv - fv_shift) > 1e-14 * scale):
        return False
    Vv = np.asarray(V_at(ks), dtype=float)
    Vv_shift = np.asarray(V_at(ks + T), dtype=float)
    scale = np.maximum(1.0, np.abs(Vv))
    return bool(np.all(np.abs(Vv - Vv_shift) <= 1e-14 * scale))


def ps_lower_bound_check(u, problem, mu: float, tol: float = 1e-8) -> bool:
    """The coercivity inequality behind bounded (PS) sequences:
    mu J(u) - <J'(u), u> >= (mu - q) ||u||_q^q - tol.

    ``problem`` may be a BVP problem or a homoclinic problem; ``u`` is the
    corresponding state (free values, padded vector, or state object)."""
    mu = as_exponent(mu)
    if isinstance(problem, bvp.BvpProblem):
        w = bvp._coerce_full(u, problem)
        pad = problem.pad
        free = w[pad:-pad]
        Ju = bvp.J1(w, problem)
        pairing = float(np.dot(bvp.grad_J1(w, problem), free))
        weighted = float(np.sum(problem.V * np.abs(free) ** problem.q)) / problem.q
        q = problem.q
    else:
        from . import homoclinic as hc

        w = hc._coerce_full(u, problem)
        free = w[2:-2]
        Ju = hc.J_home(free, problem)
        pairing = float(np.dot(hc.grad_home_free(free, problem), free))
        q = problem.q
        N = (len(free) - 1) // 2
        Varr = problem.V.on_window(-N, N)
        weighted = float(np.sum(Varr * np.abs(free) ** q)) / q
    return mu * Ju - pairing >= (mu - q) * weighted - tol


def certify(
    problem: bvp.BvpProblem,
    nl: Optional[Nonlinearity],
    c: float,
    d: float,
    witness: Optional[GrowthWitness] = None,
    sample_box: Optional[Tuple[float, float]] = None,
) -> Certificate:
    """Assemble the full three-solutions certificate for (problem, c, d)."""
    nl = nl if nl is not None else problem.nl
    if not (0 < c < d):
        raise DomainError(f"need 0 < c < d, got c={c}, d={d}")
    q = problem.q
    r = _rho_of(problem)
    rq = r ** q
    exact = None
    if problem.order == 2 and float(q).is_integer():
        exact = bvp.rho_q_exact(problem.T, int(q), problem.a, problem.V0)
    th = theta(c, nl, problem.T, q)
    lam_d = lambda_cap(c, d, nl, problem.T, q)
    level_r = c ** q / (q * rq)
    d1_holds, d1_lhs, d1_rhs = check_d1(c, d, problem, nl)
    if sample_box is None:
        sample_box = (-10.0 * d, 10.0 * d)
    d2_holds = None
    if witness is not None:
        d2_holds = check_d2(nl, witness, q, problem.T, sample_box)
    vd_ok = check_vd_threshold(c, d, problem)
    flags = []
    if nl.potential_offset:
        flags.append("potential-offset: F(k,0) != 0 for this family; constants follow the published display")
    try:
        lo, hi = lambda_interval(c, d, problem, nl)
        nonempty = True
    except CertificationError as err:
        lo, hi = err.lambda_lo, err.lambda_hi
        nonempty = False
        flags.append(f"certification failure: {err}")
    return Certificate(
        rho=r,
        rho_q=rq,
        rho_q_exact=exact,
        theta_c=th,
        lambda_d=lam_d,
        level_r=level_r,
        c=c,
        d=d,
        d1_holds=d1_holds,
        d1_lhs=d1_lhs,
        d1_rhs=d1_rhs,
        d2_holds=d2_holds,
        d2_sample_box=sample_box if witness is not None else None,
        vd_threshold_ok=vd_ok,
        lambda_lo=lo,
        lambda_hi=hi,
        interval_nonempty=nonempty,
        flags=tuple(flags),
    )
