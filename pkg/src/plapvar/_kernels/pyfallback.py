"""Pure-numpy implementations of the hot energy/gradient kernels.

The state vector ``w`` carries the unknown plus exactly two zero padding
entries on each side; the free sites are ``w[2:-2]``.  ``V`` holds one
positive weight per free site.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def phi_vals(x: np.ndarray, p: float) -> np.ndarray:
    """Elementwise t |t|^(p-2), 0 at 0."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** (p - 1.0)


def energy(w: np.ndarray, p2: float, p1: float, q: float, a: float, V: np.ndarray) -> float:
    """Sum of |D2 w|^p2 / p2, a |D1 w|^p1 / p1 and V |w|^q / q terms."""
    w = np.asarray(w, dtype=float)
    d2 = np.diff(w, 2)
    d1 = np.diff(w)
    u = w[2:-2]
    s2 = np.sum(np.abs(d2) ** p2) / p2
    s1 = np.sum(np.abs(d1) ** p1) / p1
    sv = np.sum(V * np.abs(u) ** q) / q
    return float(s2 + a * s1 + sv)


def grad(w: np.ndarray, p2: float, p1: float, q: float, a: float, V: np.ndarray) -> np.ndarray:
    """Gradient of :func:`energy` with respect to the free sites w[2:-2]."""
    w = np.asarray(w, dtype=float)
    g2 = phi_vals(np.diff(w, 2), p2)
    g1 = phi_vals(np.diff(w), p1)
    u = w[2:-2]
    return np.diff(g2, 2) - a * np.diff(g1)[1:-1] + V * phi_vals(u, q)
