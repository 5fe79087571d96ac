import math

import numpy as np
import pytest

from levydual.errors import (
    DegenerateDirection,
    DimensionMismatch,
    DomainError,
    UnavailableDrift,
    UnsupportedModel,
)
from levydual.models.gh import (
    GH1DParams,
    GHModel,
    GHParams,
    esscher_tilt,
    gh_quanto_dual,
    gh_radon,
    gh_swap_dual,
)

from .oracles import empirical_cf, mgf_log_estimate, nig_quanto_drift_integral

I2 = np.eye(2)

# general unit-determinant mixing matrix used for the full parameter maps
DELTA = np.array([[2.0, 0.5], [0.5, 0.625]])


def nig_params(alpha=4.0, beta=(0.0, 0.0), delta=1.0, mu=(0.0, 0.0),
               Delta=I2):
    return GHParams(-0.5, alpha, beta, delta, mu, Delta)


class TestParams:
    def test_determinant_constraint(self):
        with pytest.raises(ValueError, match="det"):
            nig_params(Delta=np.diag([2.0, 2.0]))

    def test_moment_condition(self):
        with pytest.raises(ValueError):
            nig_params(alpha=1.0, beta=(1.0, 0.5))

    def test_flavors(self):
        assert nig_params().flavor == "nig"
        assert GHParams(1.2, 6.0, [0.3, -0.2], 0.0, [0.0, 0.0], I2).flavor == "vg"
        assert GHParams(0.7, 6.0, [0.0, 0.0], 1.0, [0.0, 0.0], I2).flavor == "general"

    def test_one_dim_integrability(self):
        with pytest.raises(ValueError, match="beta"):
            GH1DParams(lambda_=-0.5, alpha=1.0, beta=1.5, delta=1.0, mu=0.0)


class TestCumulant:
    def test_symmetric_nig_value(self):
        model = GHModel(nig_params())
        # delta * (gamma_bar - sqrt(alpha^2 - 1)) at alpha=4, beta=0
        assert model.cumulant([1.0, 0.0]).real == pytest.approx(
            4.0 - math.sqrt(15.0), abs=1e-15)

    def test_symmetric_nig_value_against_sampler(self):
        model = GHModel(nig_params())
        rows = model.sample_terminal(1.0, 400_000, seed=17, antithetic=False)
        est, se = mgf_log_estimate(rows, [1.0, 0.0])
        assert abs(est - (4.0 - math.sqrt(15.0))) < 3.0 * se

    def test_outside_cone_raises(self):
        model = GHModel(nig_params(alpha=3.0))
        with pytest.raises(DomainError, match="strip"):
            model.cumulant([4.0, 0.0])

    def test_moment_cone_boundary_is_included(self):
        model = GHModel(nig_params(alpha=3.0))
        assert not model.exp_moment_ok([4.0, 0.0])
        assert model.exp_moment_ok([3.0, 0.0])

    def test_general_flavor_refuses_cumulant(self):
        model = GHModel(GHParams(0.7, 6.0, [0.0, 0.0], 1.0, [0.0, 0.0], I2))
        with pytest.raises(UnsupportedModel):
            model.cumulant([0.5, 0.0])
        with pytest.raises(UnsupportedModel):
            model.sample_terminal(1.0, 4, seed=1)

    def test_martingale_calibration(self, nig_model, vg_model):
        for model in (nig_model, vg_model):
            assert abs(model.cumulant([1.0, 0.0])) < 1e-14
            assert abs(model.cumulant([0.0, 1.0])) < 1e-14


class TestRadon:
    def test_symmetric_marginal(self):
        p = nig_params(delta=0.8, mu=(0.1, 0.2))
        out = gh_radon(p, [0.0, 1.0])
        assert (out.lambda_, out.alpha, out.beta) == (-0.5, 4.0, 0.0)
        assert out.delta == pytest.approx(0.8)
        assert out.mu == pytest.approx(0.2)

    def test_diagonal_direction_scales_delta(self):
        out = gh_radon(nig_params(delta=0.8), [1.0, 1.0])
        assert out.delta == pytest.approx(0.8 * math.sqrt(2.0), abs=1e-15)

    def test_skew_projection_numbers(self):
        p = nig_params(alpha=3.0, beta=(0.5, -0.5))
        out = gh_radon(p, [1.0, 0.0])
        assert out.beta == pytest.approx(0.5, abs=1e-15)
        assert out.alpha == pytest.approx(math.sqrt(8.75), abs=1e-15)
        assert out.delta == pytest.approx(1.0, abs=1e-15)

    def test_projected_law_against_sampler_cf(self):
        p = nig_params(alpha=3.0, beta=(0.5, -0.5))
        u = np.array([1.0, 0.0])
        law = gh_radon(p, u)
        rows = GHModel(p).sample_terminal(1.0, 1_000_000, seed=23,
                                          antithetic=False)
        proj = rows @ u
        for s in np.linspace(0.25, 2.5, 10):
            emp, se = empirical_cf(proj.reshape(-1, 1), [s])
            exact = np.exp(law.cumulant(1j * s))
            assert abs(emp - exact) < 3.0 * max(se, 1e-6)

    def test_zero_direction_rejected(self):
        with pytest.raises(DegenerateDirection):
            gh_radon(nig_params(), [0.0, 0.0])


class TestTilt:
    def test_shifts_beta_only(self):
        p = nig_params(beta=(0.2, -0.1), mu=(0.01, 0.02))
        tilted = esscher_tilt(p, [1.0, 0.0])
        assert tilted.beta == pytest.approx([1.2, -0.1])
        assert tilted.mu == pytest.approx(p.mu)
        assert tilted.alpha == p.alpha

    def test_boundary_tilt_rejected(self):
        # membership allows the cone boundary; tilting demands the interior
        with pytest.raises(DomainError, match="interior"):
            esscher_tilt(nig_params(alpha=3.0), [3.0, 0.0])

    def test_shape_guard(self):
        with pytest.raises(DimensionMismatch):
            esscher_tilt(nig_params(), [1.0, 0.0, 0.0])


class TestSwapDual:
    def test_matches_tilt_then_project(self):
        p = GHParams(-0.5, 5.0, [0.2, -0.1], 0.5, [0.01, 0.02], I2)
        direct = gh_swap_dual(p)
        composed = gh_radon(esscher_tilt(p, [1.0, 0.0]), [-1.0, 1.0])
        for f in ("lambda_", "alpha", "beta", "delta", "mu"):
            assert getattr(direct, f) == pytest.approx(getattr(composed, f),
                                                       abs=1e-12)

    def test_identity_mixing_formulas(self):
        p = GHParams(-0.5, 5.0, [0.2, -0.1], 0.5, [0.01, 0.02], I2)
        out = gh_swap_dual(p)
        assert out.lambda_ == -0.5
        assert out.beta == pytest.approx((-0.1 - 0.2 - 1.0) / 2.0, abs=1e-15)
        assert out.delta == pytest.approx(0.5 * math.sqrt(2.0), abs=1e-15)
        assert out.mu == pytest.approx(0.02 - 0.01, abs=1e-15)

    def test_general_mixing_written_out(self):
        alpha, beta, delta, mu = 5.0, np.array([0.2, -0.1]), 0.5, (0.01, 0.02)
        p = GHParams(-0.5, alpha, beta, delta, mu, DELTA)
        d11, d12, d22 = DELTA[0, 0], DELTA[0, 1], DELTA[1, 1]
        b1, b2 = beta
        denom = d11 + d22 - 2.0 * d12
        beta_u = (b2 * d22 - (b1 + 1.0) * d11 - d12 * (b2 - b1 - 1.0)) / denom
        alpha_u = math.sqrt(
            (alpha ** 2 - (b1 + 1.0) ** 2 * d11 - b2 ** 2 * d22
             - 2.0 * (b1 + 1.0) * b2 * d12) / denom + beta_u ** 2)
        out = gh_swap_dual(p)
        assert out.beta == pytest.approx(beta_u, abs=1e-12)
        assert out.alpha == pytest.approx(alpha_u, abs=1e-12)
        assert out.delta == pytest.approx(delta * math.sqrt(denom), abs=1e-12)
        assert out.mu == pytest.approx(mu[1] - mu[0], abs=1e-15)

    def test_lambda_passes_through(self, vg_model):
        assert gh_swap_dual(vg_model.params).lambda_ == 1.2

    def test_cone_violation(self):
        with pytest.raises(DomainError):
            gh_swap_dual(nig_params(alpha=1.2, beta=(0.5, 0.0)))

    def test_dual_cumulant_identity(self, nig_model, vg_model):
        for model in (nig_model, vg_model):
            dual = gh_swap_dual(model.params)
            theta = np.array([1.0, 0.0])
            u = np.array([-1.0, 1.0])
            for z in (-0.5, 0.3, 1.0, 1.4):
                lhs = dual.cumulant(z)
                rhs = model.cumulant(theta + z * u) - model.cumulant(theta)
                assert lhs == pytest.approx(rhs, abs=1e-13)


class TestQuantoDual:
    def test_matches_tilt_then_project(self):
        p = GHParams(-0.5, 5.0, [0.2, -0.1], 0.5, [0.01, 0.02], DELTA)
        direct = gh_quanto_dual(p).params
        composed = gh_radon(esscher_tilt(p, [1.0, 0.0]), [0.0, 1.0])
        for f in ("lambda_", "alpha", "beta", "delta", "mu"):
            assert getattr(direct, f) == pytest.approx(getattr(composed, f),
                                                       abs=1e-12)

    def test_general_mixing_written_out(self):
        alpha, beta, delta = 5.0, np.array([0.2, -0.1]), 0.5
        p = GHParams(-0.5, alpha, beta, delta, (0.01, 0.02), DELTA)
        d11, d12, d22 = DELTA[0, 0], DELTA[0, 1], DELTA[1, 1]
        b1, b2 = beta
        out = gh_quanto_dual(p).params
        assert out.beta == pytest.approx(b2 + (b1 + 1.0) * d12 / d22,
                                         abs=1e-12)
        assert out.alpha == pytest.approx(math.sqrt(
            (alpha ** 2 - (b1 + 1.0) ** 2 * (d11 - d12 ** 2 / d22)) / d22),
            abs=1e-12)
        assert out.delta == pytest.approx(delta * math.sqrt(d22), abs=1e-12)
        assert out.mu == pytest.approx(0.02, abs=1e-15)

    def test_neutral_tilt_keeps_alpha(self):
        p = nig_params(beta=(-1.0, 0.0))
        assert gh_quanto_dual(p).params.alpha == pytest.approx(4.0, abs=1e-14)

    def test_drift_equals_dual_mean(self, nig_model, vg_model):
        for model in (nig_model, vg_model):
            dual = gh_quanto_dual(model.params)
            assert dual.drift == pytest.approx(dual.params.mean(), abs=1e-12)

    def test_drift_against_finite_difference(self, nig_model, vg_model):
        h = 1e-6
        for model in (nig_model, vg_model):
            dual = gh_quanto_dual(model.params)
            fd = (model.cumulant([1.0, h]) - model.cumulant([0.0, h])
                  - model.cumulant([1.0, -h]) + model.cumulant([0.0, -h])
                  ).real / (2.0 * h)
            correction = dual.drift - gh_radon(model.params, [0.0, 1.0]).mean()
            assert correction == pytest.approx(fd, abs=1e-8)

    def test_symmetric_drift_correction_vanishes(self):
        p = GHModel.martingale(-0.5, 4.0, [0.0, 0.0], 1.0, I2).params
        dual = gh_quanto_dual(p)
        correction = dual.drift - gh_radon(p, [0.0, 1.0]).mean()
        assert correction == pytest.approx(0.0, abs=1e-14)
        oracle = nig_quanto_drift_integral(4.0, [0.0, 0.0], 1.0)
        assert oracle == pytest.approx(0.0, abs=2e-5)

    def test_drift_against_levy_density_quadrature(self):
        """The jump-integral form of the drift, on the written-out density."""
        p = GHModel.martingale(-0.5, 4.0, [0.3, 0.2], 1.0, I2).params
        dual = gh_quanto_dual(p)
        correction = dual.drift - gh_radon(p, [0.0, 1.0]).mean()
        oracle = nig_quanto_drift_integral(4.0, [0.3, 0.2], 1.0)
        assert correction == pytest.approx(oracle, abs=2e-5)

    def test_general_flavor_has_no_drift(self):
        p = GHParams(0.7, 6.0, [0.0, 0.0], 1.0, [0.0, 0.0], I2)
        dual = gh_quanto_dual(p)
        assert dual.params.lambda_ == 0.7
        assert dual.drift is None
        with pytest.raises(UnavailableDrift):
            dual.drift_value

    def test_dual_cumulant_identity(self, nig_model, vg_model):
        for model in (nig_model, vg_model):
            dual = gh_quanto_dual(model.params)
            kappa0 = model.cumulant([1.0, 0.0])
            for z in (-0.6, 0.4, 1.0):
                lhs = dual.params.cumulant(z)
                rhs = model.cumulant([1.0, z]) - kappa0
                assert lhs == pytest.approx(rhs, abs=1e-13)


class TestSampler:
    @pytest.mark.parametrize("fixture", ["nig_model", "vg_model"])
    def test_terminal_law_matches_cumulant(self, fixture, request):
        model = request.getfixturevalue(fixture)
        T = 0.75
        rows = model.sample_terminal(T, 1_000_000, seed=31, antithetic=False)
        for w in ([0.8, 0.0], [0.0, 1.1], [0.6, -0.6], [1.3, 0.7],
                  [0.3, 0.3]):
            emp, se = empirical_cf(rows, w)
            exact = np.exp(T * model.cumulant(1j * np.asarray(w)))
            assert abs(emp - exact) < 3.0 * max(se, 1e-6)

    def test_vg_mixing_uses_gamma_time(self, vg_model):
        # terminal mean must match T * gradient of the cumulant
        T = 1.0
        rows = vg_model.sample_terminal(T, 200_000, seed=9, antithetic=False)
        p = vg_model.params
        mean = p.mu + 2.0 * p.lambda_ * (p.Delta @ p.beta) / p.gamma_sq
        se = rows.std(axis=0, ddof=1) / math.sqrt(len(rows))
        assert np.all(np.abs(rows.mean(axis=0) - T * mean) < 4.0 * se)
