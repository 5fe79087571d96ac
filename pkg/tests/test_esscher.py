import math

import numpy as np
import pytest

from levydual.characteristics import (
    EmptyJumps,
    FiniteAtoms,
    LevyTriplet,
    TiltedProjection,
    Truncation,
    cumulant,
    linear_transform,
)
from levydual.errors import (
    DegenerateDirection,
    DimensionMismatch,
    DomainError,
    UnsupportedMeasure,
)
from levydual.esscher import (
    DualTriplet1D,
    EsscherFrame,
    dual_cumulant,
    dual_triplet,
    dual_triplet_diffusion,
    one_dim_dual,
)
from levydual.models.merton import merton_triplet

from .oracles import exchange_vol

SWAP = EsscherFrame([1.0, 0.0], [-1.0, 1.0], 1.0)
QUANTO = EsscherFrame([1.0, 0.0], [0.0, 1.0], 1.0)


class TestFrame:
    def test_zero_direction_rejected(self):
        with pytest.raises(DegenerateDirection):
            EsscherFrame([1.0, 0.0], [0.0, 0.0], 1.0)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionMismatch):
            EsscherFrame([1.0, 0.0], [1.0, 0.0, 0.0], 1.0)

    def test_nonpositive_maturity_rejected(self):
        with pytest.raises(ValueError, match="maturity"):
            EsscherFrame([1.0, 0.0], [0.0, 1.0], 0.0)

    def test_check_against_dimension(self, atoms_triplet):
        frame = EsscherFrame([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 1.0)
        with pytest.raises(DimensionMismatch):
            frame.check_against(atoms_triplet)

    def test_check_against_domain(self, nig_model):
        frame = EsscherFrame([6.0, 0.0], [0.0, 1.0], 1.0)
        with pytest.raises(DomainError, match="moment domain"):
            frame.check_against(nig_model.triplet())


class TestDualCumulant:
    def test_zero_is_zero(self, merton2):
        assert dual_cumulant(merton2.cumulant, SWAP, 0.0) == 0.0

    def test_matches_shifted_difference(self, merton2):
        z = 0.7
        expected = (merton2.cumulant(SWAP.theta + z * SWAP.u)
                    - merton2.cumulant(SWAP.theta))
        assert dual_cumulant(merton2.cumulant, SWAP, z) == pytest.approx(
            expected, abs=1e-15)

    def test_calibrated_swap_vanishes_at_one(self, bs_margrabe):
        # both coordinates are unit martingales, so kappa(e2) = kappa(e1) = 0
        val = dual_cumulant(bs_margrabe.cumulant, SWAP, 1.0)
        assert abs(val) < 1e-15

    def test_tower_of_tilts(self, merton2):
        theta1 = np.array([0.3, -0.2])
        theta2 = np.array([0.7, 0.2])
        inner = lambda w: merton2.cumulant(theta1 + np.asarray(w)) \
            - merton2.cumulant(theta1)
        staged = EsscherFrame(theta2, [0.0, 1.0], 1.0)
        joint = EsscherFrame(theta1 + theta2, [0.0, 1.0], 1.0)
        for z in (-1.5, -0.4, 0.0, 0.6, 1.3, 2.0, 0.25):
            assert dual_cumulant(inner, staged, z) == pytest.approx(
                dual_cumulant(merton2.cumulant, joint, z), abs=1e-10)


class TestDualTripletDiffusion:
    def test_exchange_variance(self, bs_margrabe):
        drift, var = dual_triplet_diffusion(bs_margrabe.drift,
                                            bs_margrabe.cov, SWAP)
        assert var == pytest.approx(exchange_vol(0.3, 0.2, 0.5) ** 2,
                                    abs=1e-14)
        assert drift == pytest.approx(-var / 2.0, abs=1e-14)

    def test_quanto_drift_picks_up_covariance(self, bs_margrabe):
        drift, var = dual_triplet_diffusion(bs_margrabe.drift,
                                            bs_margrabe.cov, QUANTO)
        assert var == pytest.approx(0.04, abs=1e-14)
        assert drift == pytest.approx(-0.02 + 0.03, abs=1e-14)

    def test_shape_guard(self, bs_margrabe):
        frame = EsscherFrame([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0)
        with pytest.raises(DimensionMismatch):
            dual_triplet_diffusion(bs_margrabe.drift, bs_margrabe.cov, frame)


class TestDualTriplet:
    def test_pure_diffusion_swap(self, bs_margrabe):
        dual = dual_triplet(bs_margrabe.triplet(), SWAP)
        assert dual.diffusion == pytest.approx(0.07, abs=1e-14)
        assert dual.drift == pytest.approx(-0.035, abs=1e-14)
        assert isinstance(dual.jumps, EmptyJumps)
        assert dual.is_dual_martingale is True

    def test_atoms_map_exactly(self, atoms_triplet):
        dual = dual_triplet(atoms_triplet, SWAP)
        pts = atoms_triplet.jumps.points
        expected_sizes = pts @ SWAP.u
        expected_weights = atoms_triplet.jumps.weights * np.exp(pts @ SWAP.theta)
        assert dual.jumps.points[:, 0] == pytest.approx(expected_sizes)
        assert dual.jumps.weights == pytest.approx(expected_weights)
        assert np.all(dual.jumps.weights > 0)

    def test_atoms_cumulant_identity(self, atoms_triplet):
        dual = dual_triplet(atoms_triplet, SWAP)
        for z in (-1.0, -0.3, 0.5, 1.0, 2.2):
            lhs = cumulant(dual.triplet, [z])
            rhs = (cumulant(atoms_triplet, SWAP.theta + z * SWAP.u)
                   - cumulant(atoms_triplet, SWAP.theta))
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_swap_dual_of_calibrated_atoms_is_martingale(self, atoms_triplet):
        assert dual_triplet(atoms_triplet, SWAP).is_dual_martingale is True

    def test_density_cumulant_identity(self, merton2):
        """Quadrature route through the projected measure, no closed forms."""
        dual = dual_triplet(merton_triplet(merton2.params), QUANTO)
        assert isinstance(dual.jumps, TiltedProjection)
        for z in (-0.8, 0.5, 1.0):
            lhs = cumulant(dual.triplet, [z])
            rhs = dual_cumulant(merton2.cumulant, QUANTO, z)
            assert lhs.real == pytest.approx(rhs.real, abs=1e-8)

    def test_quanto_dual_of_correlated_model_is_not_martingale(self, merton2):
        dual = dual_triplet(merton_triplet(merton2.params), QUANTO)
        assert dual.is_dual_martingale is False

    def test_zero_tilt_reduces_to_projection(self, atoms_triplet):
        frame = EsscherFrame([0.0, 0.0], [-1.0, 1.0], 1.0)
        dual = dual_triplet(atoms_triplet, frame)
        projected = linear_transform(atoms_triplet, [[-1.0, 1.0]])
        assert dual.drift == pytest.approx(projected.drift[0], abs=1e-15)
        assert dual.diffusion == pytest.approx(projected.cov[0, 0], abs=1e-15)
        assert dual.jumps.points == pytest.approx(projected.jumps.points)
        assert dual.jumps.weights == pytest.approx(projected.jumps.weights)

    def test_gh_triplet_is_refused(self, nig_model):
        with pytest.raises(UnsupportedMeasure, match="model layer"):
            dual_triplet(nig_model.triplet(), SWAP)

    def test_source_and_frame_are_recorded(self, atoms_triplet):
        dual = dual_triplet(atoms_triplet, SWAP)
        assert isinstance(dual, DualTriplet1D)
        assert dual.source == "esscher_tilt+projection"
        assert dual.maturity == 1.0
        assert dual.theta.tolist() == [1.0, 0.0]


class TestOneDimDual:
    def test_black_scholes_line(self):
        t = LevyTriplet(1, [-0.02], [[0.04]], EmptyJumps(1), Truncation.ZERO)
        dual = one_dim_dual(t)
        assert dual.drift == pytest.approx(-0.02, abs=1e-15)
        assert dual.diffusion == pytest.approx(0.04, abs=1e-15)
        assert dual.is_dual_martingale is True

    def test_single_atom_flips_and_reweights(self):
        w = math.exp(0.5)
        t = LevyTriplet(1, [-(w - 1.0)], [[0.0]],
                        FiniteAtoms(1, [[0.5]], [1.0]), Truncation.ZERO)
        dual = one_dim_dual(t)
        assert dual.jumps.points.tolist() == [[-0.5]]
        assert dual.jumps.weights[0] == pytest.approx(w, abs=1e-15)
        assert dual.drift == pytest.approx(w - 1.0, abs=1e-13)

    def test_uncalibrated_triplet_rejected(self):
        t = LevyTriplet(1, [0.0], [[0.04]], EmptyJumps(1), Truncation.ZERO)
        with pytest.raises(DomainError, match="martingale-calibrated"):
            one_dim_dual(t)

    def test_two_dimensional_triplet_rejected(self, atoms_triplet):
        with pytest.raises(DimensionMismatch):
            one_dim_dual(atoms_triplet)

    def test_canonical_truncation_drift(self):
        # calibrated compound Poisson under canonical truncation, atom inside
        # the unit ball so the h-correction is active on both sides
        atom, lam = 0.5, 1.0
        b = -(lam * (math.exp(atom) - 1.0 - atom))
        t = LevyTriplet(1, [b], [[0.0]], FiniteAtoms(1, [[atom]], [lam]),
                        Truncation.CANONICAL)
        dual = one_dim_dual(t)
        z = 0.8
        lhs = cumulant(dual.triplet, [z])
        rhs = cumulant(t, [1.0 - z]) - cumulant(t, [1.0])
        assert lhs == pytest.approx(rhs, abs=1e-13)
