import importlib

import numpy as np
import pytest

from plapvar._kernels import pyfallback

try:
    from plapvar._kernels import core
except ImportError:  # pragma: no cover - depends on the build environment
    core = None

needs_core = pytest.mark.skipif(core is None, reason="compiled kernels unavailable")


def _random_case(rng, n=None):
    n = int(rng.integers(5, 40)) if n is None else n
    w = np.zeros(n)
    w[2:-2] = rng.uniform(-3.0, 3.0, size=n - 4)
    V = rng.uniform(0.5, 4.0, size=n - 4)
    p2 = float(rng.uniform(1.3, 4.0))
    p1 = float(rng.uniform(1.3, 4.0))
    q = float(rng.uniform(1.3, 4.0))
    a = float(rng.uniform(0.0, 6.0))
    return w, p2, p1, q, a, V


def test_fallback_backend_label():
    assert pyfallback.BACKEND == "python"


@needs_core
def test_core_backend_label():
    assert core.BACKEND == "cython"


@needs_core
def test_phi_vals_agree():
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.uniform(-5.0, 5.0, size=int(rng.integers(1, 30)))
        p = float(rng.uniform(1.1, 5.0))
        assert np.allclose(core.phi_vals(x, p), pyfallback.phi_vals(x, p), rtol=1e-14, atol=1e-14)


@needs_core
def test_energy_agrees():
    rng = np.random.default_rng(1)
    for _ in range(100):
        w, p2, p1, q, a, V = _random_case(rng)
        e_c = core.energy(w, p2, p1, q, a, V)
        e_p = pyfallback.energy(w, p2, p1, q, a, V)
        assert e_c == pytest.approx(e_p, rel=1e-13, abs=1e-13)


@needs_core
def test_grad_agrees():
    rng = np.random.default_rng(2)
    for _ in range(100):
        w, p2, p1, q, a, V = _random_case(rng)
        g_c = core.grad(w, p2, p1, q, a, V)
        g_p = pyfallback.grad(w, p2, p1, q, a, V)
        assert np.allclose(g_c, g_p, rtol=1e-12, atol=1e-12)


@needs_core
def test_readonly_input_accepted():
    rng = np.random.default_rng(3)
    w, p2, p1, q, a, V = _random_case(rng)
    w.setflags(write=False)
    V.setflags(write=False)
    assert np.isfinite(core.energy(w, p2, p1, q, a, V))
    assert np.all(np.isfinite(core.grad(w, p2, p1, q, a, V)))


def test_env_override_selects_fallback(monkeypatch):
    import plapvar._kernels as K

    monkeypatch.setenv("PLAPVAR_PURE_PYTHON", "1")
    mod = importlib.reload(K)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("PLAPVAR_PURE_PYTHON")
        importlib.reload(K)
