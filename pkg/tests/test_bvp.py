import math
from fractions import Fraction

import numpy as np
import pytest

from plapvar import bvp
from plapvar.lattice import DomainError, LatticeFunction
from plapvar.nonlinearity import example2_family, polynomial_family, power_family, zero_family


def make_problem(T=8, q=3.0, a=10.0, V=None, nl=None, lam=0.0):
    V = np.arange(1.0, T + 1.0) if V is None else np.asarray(V, dtype=float)
    nl = example2_family() if nl is None else nl
    return bvp.BvpProblem(T=T, q=q, a=a, V=V, nl=nl, lam=lam)


class TestProblemValidation:
    def test_rejects_bad_T(self):
        with pytest.raises(DomainError):
            make_problem(T=0, V=[])

    def test_rejects_nonpositive_V(self):
        with pytest.raises(DomainError):
            make_problem(T=2, V=[1.0, 0.0])

    def test_rejects_wrong_V_length(self):
        with pytest.raises(DomainError):
            make_problem(T=3, V=[1.0, 2.0])

    def test_V_extrema(self):
        p = make_problem()
        assert p.V0 == 1.0 and p.V1 == 8.0


class TestStateEmbedding:
    def test_round_trip(self):
        p = make_problem(T=4)
        free = np.array([1.0, -2.0, 3.0, 0.5])
        s = bvp.embed_state(free, p)
        assert s.u.window_lo == -1 and s.u.window_hi == 6
        assert np.array_equal(bvp.restrict(s), free)
        # boundary values u(-1) = u(0) = u(T+1) = u(T+2) = 0
        for k in (-1, 0, 5, 6):
            assert s.u(k) == 0.0

    def test_nonzero_padding_rejected(self):
        u = LatticeFunction(-1, 6, [0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0])
        with pytest.raises(DomainError):
            bvp.StateX(u, pad=2)


class TestNormOracles:
    def test_spike_norm_closed_form(self):
        # interior unit spike: norm^q = (2 + 2^q + 2a + V(k0)) c^q
        p = make_problem(T=8, q=3.0, a=10.0, V=np.ones(8))
        for c in (1.0, 2.5):
            spike = np.zeros(8)
            spike[3] = c
            expect = (2.0 + 2.0 ** 3 + 2.0 * 10.0 + 1.0) * c ** 3
            assert bvp.norm_X(spike, p) ** 3 == pytest.approx(expect, rel=1e-12)

    def test_unit_spike_is_31(self):
        p = make_problem(T=8, q=3.0, a=10.0, V=np.ones(8))
        spike = np.zeros(8)
        spike[4] = 1.0
        assert bvp.norm_X(spike, p) ** 3 == pytest.approx(31.0, rel=1e-12)

    def test_constant_state_closed_form(self):
        # v_d = d on [1, T]: norm^q = (4 + 2a + sum V) d^q for T >= 2
        p = make_problem()
        d = 14.0
        expect = (4.0 + 2.0 * 10.0 + float(np.sum(p.V))) * d ** 3
        assert bvp.norm_X(np.full(8, d), p) ** 3 == pytest.approx(expect, rel=1e-12)

    def test_phi1_is_normq_over_q(self):
        rng = np.random.default_rng(0)
        p = make_problem(q=2.4)
        for _ in range(20):
            u = rng.uniform(-3, 3, size=8)
            assert bvp.Phi1(u, p) == pytest.approx(bvp.norm_X(u, p) ** 2.4 / 2.4, rel=1e-12)


class TestRho:
    def test_example_rational_value(self):
        assert bvp.rho_q_exact(8, 3, 10, 1) == Fraction(18225, 36241)

    def test_float_matches_exact(self):
        exact = Fraction(18225, 36241)
        assert bvp.rho(8, 3.0, 10.0, 1.0) ** 3 == pytest.approx(float(exact), rel=1e-12)

    def test_rho_n_reduces_to_rho_at_order_two(self):
        for T, q, a, V0 in [(8, 3.0, 10.0, 1.0), (5, 2.0, 0.5, 2.0), (12, 2.5, 3.0, 0.25)]:
            assert bvp.rho_n(T, q, 2, (a,), V0) == pytest.approx(bvp.rho(T, q, a, V0), rel=1e-12)

    def test_rho_decreases_in_V0(self):
        assert bvp.rho(8, 3.0, 10.0, 2.0) < bvp.rho(8, 3.0, 10.0, 1.0)

    def test_exact_mode_rejects_float_q(self):
        with pytest.raises(DomainError):
            bvp.rho_q_exact(8, 2.5, 10, 1)


class TestGradient:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            T = int(rng.integers(2, 10))
            q = float(rng.uniform(1.8, 3.5))
            p = make_problem(
                T=T,
                q=q,
                a=float(rng.uniform(0, 5)),
                V=rng.uniform(0.5, 3.0, size=T),
                nl=polynomial_family([0.0, 1.0, -0.3, 0.05]),
                lam=float(rng.uniform(0.0, 0.4)),
            )
            u = rng.uniform(0.3, 2.0, size=T) * rng.choice([-1.0, 1.0], size=T)
            g = bvp.grad_J1(u, p)
            fd = np.empty(T)
            for i in range(T):
                e = np.zeros(T)
                e[i] = 1e-6
                fd[i] = (bvp.J1(u + e, p) - bvp.J1(u - e, p)) / 2e-6
            assert np.allclose(g, fd, rtol=1e-5, atol=1e-6)

    def test_weak_form_agrees_with_strong(self):
        rng = np.random.default_rng(8)
        p = make_problem(T=6, q=2.7, V=rng.uniform(1, 2, size=6), lam=0.1)
        for _ in range(20):
            u = rng.uniform(-2, 2, size=6)
            v = rng.uniform(-2, 2, size=6)
            assert float(np.dot(bvp.grad_J1(u, p), v)) == pytest.approx(
                bvp.directional_derivative(u, v, p), rel=1e-10, abs=1e-10
            )

    def test_zero_family_gradient_at_zero(self):
        p = make_problem(T=5, V=np.ones(5), nl=zero_family(), lam=1.0)
        assert np.allclose(bvp.grad_J1(np.zeros(5), p), 0.0)

    def test_residual_is_gradient(self):
        p = make_problem(T=4, V=np.ones(4), lam=1e-3)
        u = np.array([0.5, -1.0, 2.0, 0.1])
        assert np.array_equal(bvp.residual(u, p), bvp.grad_J1(u, p))


class TestHigherOrder:
    def test_order_two_subclass_matches_base(self):
        rng = np.random.default_rng(9)
        base = make_problem(T=6, q=2.5, a=3.0, V=np.ones(6), lam=0.2)
        hi = bvp.HigherOrderBvpProblem(
            T=6, q=2.5, a=3.0, V=np.ones(6), nl=base.nl, lam=0.2, n=2, a_coeffs=(3.0,)
        )
        for _ in range(10):
            u = rng.uniform(-2, 2, size=6)
            assert bvp.Phi1(u, hi) == pytest.approx(bvp.Phi1(u, base), rel=1e-12)
            assert np.allclose(bvp.grad_J1(u, hi), bvp.grad_J1(u, base), rtol=1e-12, atol=1e-12)

    def test_order_three_gradient_fd(self):
        rng = np.random.default_rng(10)
        T = 7
        p = bvp.HigherOrderBvpProblem(
            T=T,
            q=2.0,
            a=1.0,
            V=rng.uniform(1, 2, size=T),
            nl=polynomial_family([0.0, 1.0]),
            lam=0.3,
            n=3,
            a_coeffs=(1.0, 0.5),
        )
        u = rng.uniform(-1, 1, size=T)
        g = bvp.grad_J1(u, p)
        fd = np.empty(T)
        for i in range(T):
            e = np.zeros(T)
            e[i] = 1e-6
            fd[i] = (bvp.J1(u + e, p) - bvp.J1(u - e, p)) / 2e-6
        assert np.allclose(g, fd, rtol=1e-5, atol=1e-7)


class TestSummationByParts:
    def test_order_two_defects_vanish(self):
        rng = np.random.default_rng(11)
        p = make_problem(T=9, q=2.3, V=np.ones(9))
        for _ in range(50):
            u = rng.uniform(-4, 4, size=9)
            v = rng.uniform(-4, 4, size=9)
            d1, d2 = bvp.sbp_check(u, v, p)
            assert d1 <= 1e-10 and d2 <= 1e-10

    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    def test_general_order_defect(self, i):
        rng = np.random.default_rng(12 + i)
        L = 20
        for _ in range(30):
            wu = np.zeros(L)
            wv = np.zeros(L)
            wu[i : L - i] = rng.uniform(-5, 5, size=L - 2 * i)
            wv[i : L - i] = rng.uniform(-5, 5, size=L - 2 * i)
            u = LatticeFunction(0, L - 1, wu)
            v = LatticeFunction(0, L - 1, wv)
            assert bvp.sbp_defect_order(u, v, 2.6, i) <= 1e-10

    def test_insufficient_padding_rejected(self):
        u = LatticeFunction(0, 5, [0.0, 1.0, 2.0, 3.0, 1.0, 0.0])
        with pytest.raises(DomainError):
            bvp.sbp_defect_order(u, u, 2.0, 2)


class TestEmbedding:
    def test_random_states_satisfy_bound(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            T = int(rng.integers(1, 12))
            p = make_problem(
                T=T,
                q=float(rng.uniform(1.5, 4.0)),
                a=float(rng.uniform(0, 8)),
                V=rng.uniform(0.3, 3.0, size=T),
            )
            u = rng.uniform(-10, 10, size=T)
            assert bvp.max_embedding_check(u, p)
            assert bvp.step_inequalities_hold(u, p)

    def test_one_dimensional_oracle(self):
        # T = 1: the residual is scalar; bisection solves it independently
        nl = polynomial_family([1.0])  # f = 1, F = t
        p = make_problem(T=1, q=2.0, a=1.0, V=[2.0], nl=nl, lam=1.0)

        def res(t):
            return float(bvp.residual(np.array([t]), p)[0])

        lo, hi = 0.0, 5.0
        assert res(lo) < 0 < res(hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if res(mid) < 0:
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        # order-2, T=1: norm^q weights give (2 + 2^q + 2a + V) t = lambda
        # with q = 2: (6 + 2 + 2) t = 1
        assert root == pytest.approx(1.0 / 10.0, abs=1e-10)
        assert abs(res(root)) <= 1e-9
