"""Sub/super-solution certificates: sign verdicts, auto-chosen constants, and
finite-difference validation of every closed-form residual."""

import math

import numpy as np
import pytest

from kppfront import DomainError, minimal_wave
from kppfront.ansatz import (
    AnsatzSpec,
    check_critical_sub,
    check_critical_super,
    check_linear_residual_identity,
    check_phi_eta_sub,
    check_subsolution,
    check_supersolution,
    check_tw_shift,
    fd_residual,
    psi_eval,
    subsolution_constants,
    supersolution_constants,
    tw_shift_residual,
)
from kppfront.heatkernel import v_dirichlet, v_dirichlet_dx
from kppfront.special import w_eval, w_prime_eval
from kppfront.waves import phi_gamma

R_SET = (-1.0, 0.0, 0.5, 1.0, 1.25)


class TestPsiEval:
    def test_zero_at_boundary(self):
        for r, rp, t in [(0.5, 0.5, 3.0), (-1.0, 0.0, 7.0), (1.0, -1.0, 2.0)]:
            assert psi_eval(r, rp, t, 0.0) == 0.0

    def test_half_drift_quadrature_value(self):
        val = psi_eval(0.5, 0.5, 1.0, 1.0)
        target = math.exp(-1.0) * math.sqrt(math.pi) * math.erf(0.5)
        np.testing.assert_allclose(val, target, rtol=1e-10)

    def test_gaussian_drift_value(self):
        val = psi_eval(1.5, 1.5, 4.0, 2.0)
        np.testing.assert_allclose(val, 2.0 * math.exp(-2.0) * math.exp(-0.25), rtol=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            psi_eval(0.5, 0.5, 0.0, 1.0)
        with pytest.raises(DomainError):
            psi_eval(0.5, 0.5, 1.0, -0.5)


class TestAnsatzSpec:
    def test_relation_enforcement(self):
        AnsatzSpec("psi_super", {"r": 0.5, "r_prime": 0.5})
        AnsatzSpec("psi_super", {"r": -1.0, "r_prime": 0.0})
        with pytest.raises(DomainError):
            AnsatzSpec("psi_super", {"r": -1.0, "r_prime": -1.0})
        AnsatzSpec("psi_sub", {"r": 0.5, "r_prime": -1.5})
        with pytest.raises(DomainError):
            AnsatzSpec("psi_sub", {"r": 0.5, "r_prime": 0.5})
        eta = math.sqrt(1.0)
        AnsatzSpec("phi_eta_sub", {"r": -1.0, "eta": eta, "gamma": math.exp(2.0 * eta)})
        with pytest.raises(DomainError):
            AnsatzSpec("phi_eta_sub", {"r": -1.0, "eta": 0.5, "gamma": math.e})


class TestResidualIdentity:
    def test_delay_subcase_closed_form_vanishes(self):
        # r <= 0 forces r' = 0 and the ansatz solves the linear equation
        rep = check_linear_residual_identity(-1.0, 0.0)
        assert rep.passed
        assert rep.closed_form_mismatch <= 1e-6

    @pytest.mark.parametrize("r,rp", [(1.0, 1.0), (0.5, 0.5), (1.25, 1.25),
                                      (0.5, -1.5), (1.0, -1.0), (-1.0, -3.0)])
    def test_fd_matches_closed_form(self, r, rp):
        rep = check_linear_residual_identity(r, rp, samples=[(10.0, 5.0), (5.0, 1.0), (20.0, 2.0)])
        assert rep.passed
        assert rep.closed_form_mismatch <= 1e-4

    def test_gaussian_drift_sign_tracks_w_prime(self):
        r = rp = 1.5
        for t, z in [(9.0, 1.0), (9.0, 12.0)]:
            closed = rp * math.exp(-z) * t ** (-1.0) * w_prime_eval(r, z / math.sqrt(t))
            assert math.copysign(1.0, closed) == math.copysign(1.0, w_prime_eval(r, z / math.sqrt(t)))

    def test_rejects_small_t(self):
        with pytest.raises(DomainError):
            check_linear_residual_identity(0.5, 0.5, samples=[(1.0, 1.0)])


class TestSupersolution:
    @pytest.mark.parametrize("r", R_SET)
    def test_passes_with_auto_constants(self, r):
        rep = check_supersolution(r)
        assert rep.passed
        assert rep.worst_signed_residual >= -1e-12

    def test_trivial_for_nonpositive_r(self):
        consts = supersolution_constants(-1.0)
        assert consts["M"] == 0.0 and consts["r_prime"] == 0.0
        assert check_supersolution(-1.0).worst_signed_residual == 0.0

    def test_t0_respects_damping_floor(self):
        consts = supersolution_constants(1.25)
        assert 1.0 - consts["M"] / math.sqrt(consts["t0"]) >= 0.5

    def test_refinement_never_flips(self):
        a = check_supersolution(1.0)
        b = check_supersolution(1.0, n_t=2 * 60, n_y=2 * 200)
        assert a.passed and b.passed

    def test_fd_validates_bracket(self):
        # L of (1 - M/sqrt t) psi equals e^{-z} t^{-(1+r-r')} [bracket]
        r = 1.0
        consts = supersolution_constants(r)
        M = consts["M"]

        def u(t, x):
            z = x - 2.0 * t + r * math.log(t)
            return (1.0 - M / math.sqrt(t)) * psi_eval(r, r, t, z) if z >= 0.0 else 0.0

        rng = np.random.default_rng(5)
        for _ in range(20):
            t = float(rng.uniform(30.0, 120.0))
            z = float(rng.uniform(0.5, 6.0))
            x = z + 2.0 * t - r * math.log(t)
            y = z / math.sqrt(t)
            bracket = (1.0 - M / math.sqrt(t)) * r * w_prime_eval(r, y) + 0.5 * M * w_eval(r, y)
            closed = math.exp(-z) * t ** (-1.0) * bracket
            fd = fd_residual(u, t, x, h_t=min(2.5e-3, z / 10), h_x=min(5e-3, z / 10))
            assert abs(fd - closed) <= 1e-4 * max(abs(closed), 1e-2 * abs(u(t, x)))


class TestSubsolution:
    @pytest.mark.parametrize("r", R_SET)
    def test_passes_with_auto_constants(self, r):
        rep = check_subsolution(r)
        assert rep.passed
        assert rep.worst_signed_residual <= 1e-12

    def test_braced_expression_negative_at_origin(self):
        # z = 0: braced = (1 + M/sqrt t) r' < 0 since w(0) = 0, w'(0) = 1
        consts = subsolution_constants(0.5)
        t = consts["t0"]
        braced = (1.0 + consts["M"] / math.sqrt(t)) * consts["r_prime"]
        assert braced < 0.0

    def test_epsilon_bound_rejection(self):
        with pytest.raises(DomainError, match="epsilon"):
            check_subsolution(0.5, epsilon_scale=10.0)

    def test_refinement_never_flips(self):
        a = check_subsolution(0.5)
        b = check_subsolution(0.5, n_t=120, n_y=400)
        assert a.passed and b.passed

    def test_fd_validates_braced_form(self):
        r = 0.5
        consts = subsolution_constants(r)
        M, eps, rp = consts["M"], consts["epsilon"], consts["r_prime"]

        def u(t, x):
            z = x - 2.0 * t + rp * math.log(t)
            return (1.0 + M / math.sqrt(t)) * eps * psi_eval(r, rp, t, z) if z >= 0.0 else 0.0

        rng = np.random.default_rng(6)
        for _ in range(20):
            t = float(rng.uniform(450.0, 1200.0))
            z = float(rng.uniform(0.5, 6.0))
            x = z + 2.0 * t - rp * math.log(t)
            y = z / math.sqrt(t)
            damp = 1.0 + M / math.sqrt(t)
            braced = (
                -0.5 * M * w_eval(r, y)
                + damp * (rp * w_prime_eval(r, y) + damp * eps * math.exp(-z) * w_eval(r, y) ** 2)
            )
            closed = eps * math.exp(-z) * t ** (-3.0) * braced
            fd = fd_residual(u, t, x, nonlinear=True, h_t=min(2.5e-3, z / 10), h_x=min(5e-3, z / 10))
            assert abs(fd - closed) <= 1e-4 * max(abs(closed), 1e-2 * abs(u(t, x)))


class TestTwShift:
    def test_k_one_is_neutral(self):
        rep = check_tw_shift(1.0)
        assert rep.passed and rep.details["acts_as"] == "both"
        assert rep.worst_signed_residual == 0.0

    def test_k_three_is_super(self):
        rep = check_tw_shift(3.0)
        assert rep.passed and rep.details["acts_as"] == "super"

    def test_k_zero_is_sub(self):
        rep = check_tw_shift(0.0)
        assert rep.passed and rep.details["acts_as"] == "sub"

    def test_antisymmetry_around_k_one(self):
        z = np.linspace(-15.0, 30.0, 50)
        for k in (0.0, 0.5, 3.0):
            a = tw_shift_residual(k, 1.0, 10.0, z)
            b = tw_shift_residual(2.0 - k, 1.0, 10.0, z)
            np.testing.assert_allclose(a, -b, atol=1e-12)

    def test_fd_validates_shift_residual(self):
        wave = minimal_wave()
        t0 = 1.0
        rng = np.random.default_rng(7)
        for k in (0.0, 3.0):
            r = 0.5 * (1.0 - k)

            def v(t, x, _r=r):
                return float(wave(x - 2.0 * t + _r * math.log(t + t0)))

            for _ in range(10):
                t = float(rng.uniform(2.0, 50.0))
                z = float(rng.uniform(-10.0, 10.0))
                x = z + 2.0 * t - r * math.log(t + t0)
                closed = (r / (t + t0)) * wave.derivative(z)
                fd = fd_residual(v, t, x, nonlinear=True, h_t=2.5e-3, h_x=5e-3)
                assert abs(fd - closed) <= 1e-4 * max(abs(closed), 1e-4)


class TestPhiEtaSub:
    @pytest.mark.parametrize("r", [-1.0, -0.25])
    def test_passes(self, r):
        rep = check_phi_eta_sub(r)
        assert rep.passed
        assert rep.details["min_gluing_slope"] > 0.0

    def test_boundary_saturation_is_exact_zero(self):
        eta = math.sqrt(1.0)
        gamma = float(np.exp(2.0 * eta))
        assert float(np.exp(eta * 2.0)) - gamma == 0.0

    def test_requires_negative_r(self):
        with pytest.raises(DomainError):
            check_phi_eta_sub(0.25)

    def test_fd_validates_exact_residual(self):
        # full closed form before any sign-discarding:
        # e^{-eta z/sqrt t} L u = -(eta z / 2 t^{3/2}) phi - (2 eta/sqrt t)(phi' + phi)
        #   - (eta^2/t) phi + (r/t) phi' + (r eta / t^{3/2}) phi + (e^{eta z/sqrt t} - gamma) phi^2
        r = -1.0
        eta = math.sqrt(-r)
        gamma = float(np.exp(2.0 * eta))
        phi = phi_gamma(gamma)

        def u(t, x):
            z = x - 2.0 * t + r * math.log(t)
            if z <= 0.0:
                return 0.5 / gamma
            return math.exp(eta * z / math.sqrt(t)) * float(phi(z))

        rng = np.random.default_rng(8)
        for _ in range(20):
            t = float(rng.uniform(5.0, 80.0))
            z = float(rng.uniform(0.5, min(8.0, 1.8 * math.sqrt(t))))
            x = z + 2.0 * t - r * math.log(t)
            p, dp = float(phi(z)), float(phi.derivative(z))
            boost = math.exp(eta * z / math.sqrt(t))
            closed = boost * (
                -(eta * z / (2.0 * t**1.5)) * p
                - (2.0 * eta / math.sqrt(t)) * (dp + p)
                - (eta * eta / t) * p
                + (r / t) * dp
                + (r * eta / t**1.5) * p
                + (boost - gamma) * p * p
            )
            fd = fd_residual(u, t, x, nonlinear=True, h_t=min(2.5e-3, z / 10), h_x=min(5e-3, z / 10))
            assert abs(fd - closed) <= 1e-4 * max(abs(closed), 1e-2 * abs(u(t, x)))


class TestCriticalChecks:
    def test_sub_passes_with_auto_constants(self):
        rep = check_critical_sub()
        assert rep.passed
        assert rep.details["delta"] * (1.0 + rep.details["M"]) ** 2 < 1.0

    def test_sub_rejects_bad_delta(self):
        with pytest.raises(DomainError, match="delta"):
            check_critical_sub(M=3.0, delta=0.5)

    def test_super_passes_with_auto_constant(self):
        rep = check_critical_super()
        assert rep.passed

    def test_super_fails_without_damping(self):
        # M = 0 leaves nothing to offset dx v < 0 beyond the hump
        rep = check_critical_super(M=0.0, t_range=(1e3, 1e6), n_t=4, n_y=4)
        assert not rep.passed

    def test_fd_validates_sub_closed_form(self):
        M, delta = 1.5, 0.05
        rng = np.random.default_rng(9)

        def u(t, x):
            z = x - 2.0 * t
            if z <= 0.0:
                return 0.0
            return delta * (1.0 + M / (t + 1.0) ** 0.25) * math.exp(-z) * v_dirichlet(t, z, tol=1e-13).value

        for _ in range(8):
            t = float(rng.uniform(5.0, 40.0))
            z = float(rng.uniform(0.8, 4.0))
            x = z + 2.0 * t
            v = v_dirichlet(t, z, tol=1e-13).value
            closed = delta * math.exp(-z) * v * (
                delta * (1.0 + M / (t + 1.0) ** 0.25) ** 2 * math.exp(-z) * v
                - 0.25 * M / (t + 1.0) ** 1.25
            )
            fd = fd_residual(u, t, x, nonlinear=True, h_t=min(2.5e-3, z / 10), h_x=min(5e-3, z / 10))
            assert abs(fd - closed) <= 1e-4 * max(abs(closed), 1e-2 * abs(u(t, x)))

    def test_fd_validates_super_closed_form(self):
        M = 2.0
        rng = np.random.default_rng(10)

        def frame(t, x):
            return x - 2.0 * t + 1.5 * math.log(t) - math.log(math.log(t))

        def u(t, x):
            z = frame(t, x)
            if z <= 0.0:
                return 0.0
            damp = 1.0 - M / t**0.25
            return damp * (t**1.5 / math.log(t)) * math.exp(-z) * v_dirichlet(t, z, tol=1e-13).value

        for _ in range(8):
            t = float(rng.uniform(30.0, 150.0))
            z = float(rng.uniform(0.8, 4.0))
            x = z - 1.5 * math.log(t) + math.log(math.log(t)) + 2.0 * t
            v = v_dirichlet(t, z, tol=1e-14).value
            dv = v_dirichlet_dx(t, z, tol=1e-14).value
            damp = 1.0 - M / t**0.25
            closed = damp * (t**1.5 / math.log(t)) * math.exp(-z) * (
                (1.5 / t - 1.0 / (t * math.log(t))) * dv
                + (0.25 * M / t**1.25) / damp * v
            )
            fd = fd_residual(u, t, x, h_t=min(2.5e-3, z / 10), h_x=min(5e-3, z / 10))
            assert abs(fd - closed) <= 1e-4 * max(abs(closed), 1e-2 * abs(u(t, x)))
