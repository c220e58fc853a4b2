import numpy as np
import pytest
from conftest import random_unitary
from scipy import stats

from qpool.errors import ShapeError
from qpool.haar import (
    PureStateSample,
    average_projector,
    measure_normalization,
    sample_amplitudes,
    sample_pure_state,
)


class TestSamplePureState:
    def test_one_dimensional(self):
        state = sample_pure_state(1, np.random.default_rng(0))
        assert state.dim == 1
        assert abs(state.amplitudes[0]) == pytest.approx(1.0, abs=1e-15)

    def test_zero_dimension_rejected(self):
        with pytest.raises(ShapeError):
            sample_pure_state(0, np.random.default_rng(0))
        with pytest.raises(ShapeError):
            sample_amplitudes(0, 5, np.random.default_rng(0))

    def test_normalization_and_projector(self):
        rng = np.random.default_rng(1)
        for dim in (2, 3, 5):
            state = sample_pure_state(dim, rng)
            assert state.probs.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.abs(state.amplitudes).max() <= 1.0 + 1e-12
            p = state.projector()
            assert np.trace(p).real == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(p @ p, p, atol=1e-12)

    def test_qubit_population_is_uniform(self):
        # For d = 2 the flat simplex measure makes P_1 exactly uniform;
        # this fact underlies the exact polynomial integrals downstream.
        rng = np.random.default_rng(2)
        amps = sample_amplitudes(2, 100_000, rng)
        populations = np.abs(amps[:, 0]) ** 2
        assert stats.kstest(populations, "uniform").pvalue > 0.01

    def test_unitary_invariance_of_overlaps(self):
        # |<phi|psi>|^2 must be distributed identically before and after a
        # fixed unitary is applied to the samples.
        rng = np.random.default_rng(3)
        dim, n = 3, 100_000
        amps = sample_amplitudes(dim, n, rng)
        rotated = sample_amplitudes(dim, n, rng) @ random_unitary(rng, dim).T
        phi = sample_amplitudes(dim, 1, rng)[0]
        overlaps = np.abs(amps @ phi.conj()) ** 2
        overlaps_rotated = np.abs(rotated @ phi.conj()) ** 2
        assert stats.ks_2samp(overlaps, overlaps_rotated).pvalue > 0.01

    def test_phases_independent_of_probabilities(self):
        amps = sample_amplitudes(2, 100_000, np.random.default_rng(4))
        p1 = np.abs(amps[:, 0]) ** 2
        theta1 = np.angle(amps[:, 0])
        assert abs(np.corrcoef(p1, theta1)[0, 1]) < 0.01


class TestMeasureNormalization:
    def test_one_dimension(self):
        assert measure_normalization(1) == pytest.approx(2 * np.pi, abs=1e-12)

    def test_two_dimensions(self):
        assert measure_normalization(2) == pytest.approx(2 * np.pi**2, abs=1e-12)

    def test_three_dimensions(self):
        # 2 pi^3 / 2! = pi^3.
        assert measure_normalization(3) == pytest.approx(np.pi**3, abs=1e-12)

    def test_rejects_zero(self):
        with pytest.raises(ShapeError):
            measure_normalization(0)


class TestAverageProjector:
    def test_single_sample_is_rank_one(self):
        out = average_projector(3, 1, seed=0)
        vals = np.linalg.eigvalsh(out)
        assert vals[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.abs(vals[:-1]).max() <= 1e-12

    def test_converges_to_maximally_mixed(self):
        out = average_projector(2, 1_000_000, seed=1)
        np.testing.assert_allclose(out, np.eye(2) / 2, atol=3e-3)

    def test_off_diagonals_average_out(self):
        out = average_projector(3, 300_000, seed=2)
        off = out - np.diag(np.diag(out))
        assert np.abs(off).max() <= 5e-3


def test_pure_state_sample_validation():
    with pytest.raises(ValueError):
        PureStateSample(np.array([0.5, 0.6]), np.zeros(2))
    with pytest.raises(ShapeError):
        PureStateSample(np.array([1.0]), np.zeros(2))
