"""Difference calculus, power nonlinearities and norms on finite lattice windows.

Everything here is pure: operations return new objects and never mutate
their inputs, so values are safe to share across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

__all__ = [
    "DomainError",
    "Exponent",
    "LatticeFunction",
    "PeriodicTable",
    "forward_diff",
    "iterated_diff",
    "phi",
    "phi_antideriv",
    "lq_norm",
    "weighted_q_norm",
]


class DomainError(ValueError):
    """An operation was called outside its domain."""


@dataclass(frozen=True)
class Exponent:
    """A growth exponent, strictly greater than 1."""

    value: float

    def __post_init__(self):
        v = self.value
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 1.0):
            raise DomainError(f"Exponent must exceed 1, got {v!r}")

    def __float__(self) -> float:
        return float(self.value)


def as_exponent(p: Union[float, Exponent]) -> float:
    """Validate and unwrap an exponent to a plain float."""
    if isinstance(p, Exponent):
        return float(p.value)
    p = float(p)
    if not (math.isfinite(p) and p > 1.0):
        raise DomainError(f"Exponent must exceed 1, got {p!r}")
    return p


@dataclass(frozen=True)
class LatticeFunction:
    """Real values on the integer window [window_lo, window_hi], inclusive.

    Value semantics: the stored array is copied on construction and frozen.
    """

    window_lo: int
    window_hi: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1:
            raise DomainError("values must be one-dimensional")
        if len(vals) != self.window_hi - self.window_lo + 1:
            raise DomainError(
                f"window [{self.window_lo}, {self.window_hi}] needs "
                f"{self.window_hi - self.window_lo + 1} values, got {len(vals)}"
            )
        if not np.all(np.isfinite(vals)):
            raise DomainError("values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, k: int) -> float:
        if not (self.window_lo <= k <= self.window_hi):
            raise DomainError(f"index {k} outside window [{self.window_lo}, {self.window_hi}]")
        return float(self.values[k - self.window_lo])

    def indices(self) -> np.ndarray:
        return np.arange(self.window_lo, self.window_hi + 1)

    def restrict(self, lo: int, hi: int) -> "LatticeFunction":
        if lo < self.window_lo or hi > self.window_hi or lo > hi:
            raise DomainError(f"[{lo}, {hi}] is not a subwindow of [{self.window_lo}, {self.window_hi}]")
        return LatticeFunction(lo, hi, self.values[lo - self.window_lo : hi - self.window_lo + 1])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0


@dataclass(frozen=True)
class PeriodicTable:
    """A positive table on one period, extended periodically to all of Z.

    ``values[i]`` is the table entry at site ``base + i``; lookups reduce
    the site modulo the period.
    """

    values: np.ndarray
    base: int = 0

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) == 0:
            raise DomainError("PeriodicTable needs a nonempty 1-d table")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def period(self) -> int:
        return len(self.values)

    def at(self, k) -> np.ndarray:
        idx = (np.asarray(k) - self.base) % self.period
        return self.values[idx]

    def on_window(self, lo: int, hi: int) -> np.ndarray:
        return self.at(np.arange(lo, hi + 1))


def forward_diff(u: LatticeFunction) -> LatticeFunction:
    """First forward difference; the window loses its rightmost index."""
    if len(u) < 2:
        raise DomainError("forward_diff needs a window of length >= 2")
    return LatticeFunction(u.window_lo, u.window_hi - 1, np.diff(u.values))


def iterated_diff(u: LatticeFunction, i: int) -> LatticeFunction:
    """i-fold forward difference; the window shrinks by i on the right."""
    if i < 1:
        raise DomainError(f"difference order must be positive, got {i}")
    if len(u) < i + 1:
        raise DomainError(f"order-{i} difference needs a window of length >= {i + 1}")
    return LatticeFunction(u.window_lo, u.window_hi - i, np.diff(u.values, i))


def phi(p: Union[float, Exponent], t):
    """The odd power map t |t|^(p-2), extended continuously by 0 at t = 0."""
    p = as_exponent(p)
    t_arr = np.asarray(t, dtype=float)
    out = np.sign(t_arr) * np.abs(t_arr) ** (p - 1.0)
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def phi_antideriv(p: Union[float, Exponent], t):
    """|t|^p / p, the antiderivative of :func:`phi` vanishing at 0."""
    p = as_exponent(p)
    t_arr = np.asarray(t, dtype=float)
    out = np.abs(t_arr) ** p / p
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def lq_norm(u: LatticeFunction, q: Union[float, Exponent]) -> float:
    """(sum |u(k)|^q)^(1/q) over the window."""
    q = as_exponent(q)
    return float(np.sum(np.abs(u.values) ** q) ** (1.0 / q))


def weighted_q_norm(
    u: LatticeFunction,
    q: Union[float, Exponent],
    V: Union[Sequence, np.ndarray, PeriodicTable],
) -> float:
    """((1/q) sum V(k) |u(k)|^q)^(1/q); V must be positive on the window."""
    q = as_exponent(q)
    if isinstance(V, PeriodicTable):
        w = V.on_window(u.window_lo, u.window_hi)
    else:
        w = np.asarray(V, dtype=float)
        if w.shape != u.values.shape:
            raise DomainError(
                f"weight table has {len(w)} entries, window needs {len(u)}"
            )
    if np.any(w <= 0.0):
        raise DomainError("weights must be strictly positive")
    return float((np.sum(w * np.abs(u.values) ** q) / q) ** (1.0 / q))
