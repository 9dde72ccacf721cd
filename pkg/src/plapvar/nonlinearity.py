"""Nonlinearity catalog: the right-hand sides f(k, t) and their potentials F(k, t).

Every family keeps F in closed form so that certification constants are
exact up to rounding.  f and F are vectorized over both arguments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .lattice import DomainError, as_exponent

__all__ = [
    "Nonlinearity",
    "power_family",
    "example2_family",
    "polynomial_family",
    "zero_family",
]


@dataclass(frozen=True)
class Nonlinearity:
    """A site-dependent nonlinearity f with potential F.

    ``sup_hint`` tags structure usable for exact sup computation over
    [-c, c]: "even", "increasing-in-|t|", "increasing", or "none".
    ``potential_offset`` marks families whose F carries a constant offset
    (F(k, 0) != 0); the certification quantities are insensitive to the
    offset only through f, so reports flag it.
    """

    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    F: Callable[[np.ndarray, np.ndarray], np.ndarray]
    period: Optional[int] = None
    sup_hint: str = "none"
    name: str = "custom"
    params: dict = field(default_factory=dict)
    potential_offset: bool = False

    def f_at(self, k, t):
        k = np.asarray(k)
        t = np.asarray(t, dtype=float)
        return np.asarray(self.f(k, t), dtype=float)

    def F_at(self, k, t):
        k = np.asarray(k)
        t = np.asarray(t, dtype=float)
        return np.asarray(self.F(k, t), dtype=float)


def _site_lookup(table: np.ndarray, base: int, period: Optional[int]):
    def at(k):
        idx = np.asarray(k) - base
        if period is not None:
            idx = idx % period
        return table[idx]

    return at


def power_family(
    b: Sequence[float],
    r: float,
    period: Optional[int] = None,
    base_index: Optional[int] = None,
) -> Nonlinearity:
    """f(k, t) = b(k) t |t|^(r-2), F(k, t) = b(k) |t|^r / r.

    For periodic (homoclinic) use, ``b`` lists one period starting at site
    ``base_index`` (default 0); otherwise ``b`` is indexed from 1.
    """
    r = as_exponent(r)
    b_arr = np.array(b, dtype=float)
    if np.any(b_arr <= 0.0):
        raise DomainError("power family needs positive b(k)")
    if base_index is None:
        base_index = 0 if period is not None else 1
    if period is not None and period != len(b_arr):
        raise DomainError("period must equal the length of the b table")
    b_at = _site_lookup(b_arr, base_index, period)

    def f(k, t):
        return b_at(k) * np.sign(t) * np.abs(t) ** (r - 1.0)

    def F(k, t):
        return b_at(k) * np.abs(t) ** r / r

    return Nonlinearity(
        f=f,
        F=F,
        period=period,
        sup_hint="increasing-in-|t|",
        name="power",
        params={"b": b_arr.tolist(), "r": r, "period": period, "base_index": base_index},
    )


_EXAMPLE2_CAP = 14.0


def example2_family() -> Nonlinearity:
    """f(k, t) = k^2 g(t) with g = exp capped at t = 14; F(k, t) = k^2 G(t).

    G is the capped-exponential antiderivative shifted so that G(t) = e^t
    below the cap.  Note F(k, 0) = k^2 != 0: the family keeps the constant
    offset so the published certification constants reproduce verbatim.
    """

    def g(t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= _EXAMPLE2_CAP, np.exp(np.minimum(t, _EXAMPLE2_CAP)), np.exp(_EXAMPLE2_CAP))

    def G(t):
        t = np.asarray(t, dtype=float)
        return np.where(
            t <= _EXAMPLE2_CAP,
            np.exp(np.minimum(t, _EXAMPLE2_CAP)),
            np.exp(_EXAMPLE2_CAP) * (t - (_EXAMPLE2_CAP - 1.0)),
        )

    def f(k, t):
        return np.asarray(k, dtype=float) ** 2 * g(t)

    def F(k, t):
        return np.asarray(k, dtype=float) ** 2 * G(t)

    return Nonlinearity(
        f=f,
        F=F,
        period=None,
        sup_hint="increasing",
        name="example2",
        params={"cap": _EXAMPLE2_CAP},
        potential_offset=True,
    )


def polynomial_family(
    coeffs: Sequence[float],
    scale: Optional[Sequence[float]] = None,
    period: Optional[int] = None,
    base_index: Optional[int] = None,
) -> Nonlinearity:
    """f(k, t) = s(k) * sum_j coeffs[j] t^j, with the exact antiderivative F.

    ``scale`` is an optional per-site multiplier table (defaults to 1).
    """
    c = np.array(coeffs, dtype=float)
    if c.ndim != 1 or len(c) == 0:
        raise DomainError("polynomial family needs a nonempty coefficient list")
    cF = c / (np.arange(len(c)) + 1.0)  # antiderivative coefficients of t^(j+1)

    if scale is not None:
        s_arr = np.array(scale, dtype=float)
        if base_index is None:
            base_index = 0 if period is not None else 1
        s_at = _site_lookup(s_arr, base_index, period)
    else:
        s_at = lambda k: np.ones(np.shape(k)) if np.ndim(k) else 1.0

    def f(k, t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros_like(t)
        for j in range(len(c) - 1, -1, -1):
            acc = acc * t + c[j]
        return s_at(k) * acc

    def F(k, t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros_like(t)
        for j in range(len(cF) - 1, -1, -1):
            acc = acc * t + cF[j]
        return s_at(k) * acc * t

    return Nonlinearity(
        f=f,
        F=F,
        period=period,
        sup_hint="none",
        name="polynomial",
        params={
            "coeffs": c.tolist(),
            "scale": None if scale is None else list(map(float, scale)),
            "period": period,
            "base_index": base_index,
        },
    )


def zero_family() -> Nonlinearity:
    """f = F = 0; useful as a degenerate control."""

    def zero(k, t):
        return np.zeros(np.broadcast(np.asarray(k), np.asarray(t)).shape)

    return Nonlinearity(f=zero, F=zero, period=1, sup_hint="even", name="zero")
