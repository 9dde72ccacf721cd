"""Seeded self-test battery: every identity and inequality the library
relies on, evaluated on randomized inputs with pass counts reported.
"""
from __future__ import annotations

import numpy as np

from . import bvp
from .lattice import LatticeFunction, phi, phi_antideriv
from .nonlinearity import polynomial_family

__all__ = ["run_property_suite"]


def _random_problem(rng, T=None):
    T = int(rng.integers(2, 9)) if T is None else T
    q = float(rng.uniform(1.6, 3.5))
    a = float(rng.uniform(0.0, 5.0))
    V = rng.uniform(0.5, 3.0, size=T)
    nl = polynomial_family([0.0, 1.0, 0.5])
    lam = float(rng.uniform(0.0, 0.5))
    return bvp.BvpProblem(T=T, q=q, a=a, V=V, nl=nl, lam=lam)


def _fd_gradient(fun, x, h=1e-6):
    g = np.empty(len(x))
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h * max(1.0, abs(x[i]))
        g[i] = (fun(x + e) - fun(x - e)) / (2.0 * e[i])
    return g


def run_property_suite(seed: int = 0, scale: int = 1) -> dict:
    """Run the full identity/inequality battery; returns per-check
    pass/total counts.  ``scale`` multiplies the sample counts."""
    rng = np.random.default_rng(seed)
    results = {}

    n, ok = 200 * scale, 0
    for _ in range(n):
        x, y = rng.uniform(0, 10, size=2)
        p = rng.uniform(1.01, 6.0)
        if ((x + y) / 2.0) ** p <= (x ** p + y ** p) / 2.0 + 1e-12:
            ok += 1
    results["convexity_inequality"] = (ok, n)

    n, ok = 200 * scale, 0
    for _ in range(n):
        p = rng.uniform(1.2, 4.0)
        t = rng.uniform(0.1, 5.0) * rng.choice([-1.0, 1.0])
        h = 1e-5
        fd = (phi_antideriv(p, t + h) - phi_antideriv(p, t - h)) / (2 * h)
        if abs(fd - phi(p, t)) <= 1e-6 * max(1.0, abs(phi(p, t))):
            ok += 1
    results["phi_is_derivative"] = (ok, n)

    n, ok = 100 * scale, 0
    for _ in range(n):
        prob = _random_problem(rng)
        u = rng.uniform(-2, 2, size=prob.T)
        v = rng.uniform(-2, 2, size=prob.T)
        d1, d2 = bvp.sbp_check(u, v, prob)
        if max(d1, d2) <= 1e-10:
            ok += 1
    results["summation_by_parts"] = (ok, n)

    n, ok = 200 * scale, 0
    for _ in range(n):
        prob = _random_problem(rng)
        u = rng.uniform(-3, 3, size=prob.T)
        if bvp.max_embedding_check(u, prob) and bvp.step_inequalities_hold(u, prob):
            ok += 1
    results["max_embedding"] = (ok, n)

    n, ok = 20 * scale, 0
    for _ in range(n):
        prob = _random_problem(rng)
        u = rng.uniform(0.2, 2.0, size=prob.T) * rng.choice([-1.0, 1.0], size=prob.T)
        g = bvp.grad_J1(u, prob)
        fd = _fd_gradient(lambda x: bvp.J1(x, prob), u)
        if np.max(np.abs(g - fd)) <= 1e-6 * max(1.0, float(np.max(np.abs(g)))):
            ok += 1
    results["gradient_fd"] = (ok, n)

    n, ok = 100 * scale, 0
    for _ in range(n):
        prob = _random_problem(rng)
        u = rng.uniform(-2, 2, size=prob.T)
        lhs = bvp.Phi1(u, prob)
        rhs = bvp.norm_X(u, prob) ** prob.q / prob.q
        if abs(lhs - rhs) <= 1e-12 * (1.0 + abs(lhs)):
            ok += 1
    results["phi1_norm_identity"] = (ok, n)

    n, ok = 100 * scale, 0
    for _ in range(n):
        prob = _random_problem(rng)
        u = rng.uniform(-2, 2, size=prob.T)
        v = rng.uniform(-2, 2, size=prob.T)
        pairing = float(np.dot(bvp.grad_J1(u, prob), v))
        bilinear = bvp.directional_derivative(u, v, prob)
        if abs(pairing - bilinear) <= 1e-10 * (1.0 + abs(bilinear)):
            ok += 1
    results["weak_strong_agreement"] = (ok, n)

    return results
