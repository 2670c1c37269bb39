import math

import numpy as np
import pytest

from darkstates import (
    CouplingSet,
    Geometry,
    InvalidPhysicsError,
    dicke_couplings,
    explicit_couplings,
    lambda_scheme,
    scalar_kernel_couplings,
)


class TestDickeCouplings:
    def test_all_entries_equal(self):
        cpl = dicke_couplings(3, lambda_scheme(3), gamma=1.0, omega=0.5)
        for j in (1, 2):
            assert np.array_equal(cpl.gamma[j], np.ones((3, 3)))
            assert np.array_equal(cpl.omega[j], 0.5 * (np.ones((3, 3)) - np.eye(3)))
            assert np.array_equal(cpl.omega_bar[j], np.zeros(3))

    def test_rank_one_spectrum(self):
        cpl = dicke_couplings(3, lambda_scheme(3), gamma=2.0)
        eigs = np.sort(np.linalg.eigvalsh(cpl.gamma[1]))
        assert np.allclose(eigs, [0.0, 0.0, 6.0], atol=1e-12)

    def test_single_atom(self):
        cpl = dicke_couplings(1, lambda_scheme(3), gamma=1.0)
        assert cpl.gamma[1].shape == (1, 1)
        assert cpl.gamma[1][0, 0] == 1.0

    def test_per_transition_rates(self):
        cpl = dicke_couplings(2, lambda_scheme(3), gamma={1: 1.0, 2: 3.0})
        assert cpl.gamma[1][0, 0] == 1.0
        assert cpl.gamma[2][0, 0] == 3.0

    def test_rejects_nonpositive_gamma(self):
        with pytest.raises(ValueError):
            dicke_couplings(2, lambda_scheme(3), gamma=0.0)

    def test_is_uniform(self):
        cpl = dicke_couplings(3, lambda_scheme(3), gamma=1.0)
        assert cpl.is_uniform(1) and cpl.is_uniform(2)


class TestExplicitCouplings:
    def test_cross_damping_accepted_with_expected_spectrum(self):
        m = np.full((3, 3), 0.95)
        np.fill_diagonal(m, 1.0)
        cpl = explicit_couplings([m, m])
        # each matrix: eigenvalues 1 + 2a and (1 - a) twice for uniform a
        eigs = np.sort(np.linalg.eigvalsh(cpl.gamma[1]))
        assert np.allclose(eigs, [0.05, 0.05, 2.9], atol=1e-12)
        assert not cpl.is_uniform(1)

    def test_rejects_indefinite_matrix(self):
        bad = np.array([[1.0, 1.5], [1.5, 1.0]])
        with pytest.raises(InvalidPhysicsError, match="transition 1"):
            explicit_couplings([bad])

    def test_rejects_asymmetric_matrix(self):
        bad = np.array([[1.0, 0.2], [0.3, 1.0]])
        with pytest.raises(ValueError):
            explicit_couplings([bad])

    def test_rejects_nonzero_shift_diagonal(self):
        g = np.eye(2)
        om = np.array([[0.5, 0.1], [0.1, 0.0]])
        with pytest.raises(ValueError):
            explicit_couplings([g], [om])

    def test_zero_offdiagonal_matches_independent_atoms(self):
        cpl = explicit_couplings([np.eye(3), np.eye(3)])
        for j in (1, 2):
            assert np.array_equal(cpl.gamma[j], np.eye(3))

    def test_mapping_input_preserves_ids(self):
        cpl = explicit_couplings({2: np.eye(2), 5: np.eye(2)})
        assert cpl.transition_ids == (2, 5)


class TestScalarKernel:
    def test_quarter_wavelength_value(self):
        geo = Geometry([[0.0, 0.0, 0.0], [0.25, 0.0, 0.0]])
        cpl = scalar_kernel_couplings(geo, gamma=1.0, n_transitions=2)
        x = math.pi / 2
        assert cpl.gamma[1][0, 1] == pytest.approx(math.sin(x) / x)
        assert cpl.gamma[1][0, 1] == pytest.approx(2 / math.pi)
        assert cpl.omega[1][0, 1] == pytest.approx(-0.5 * math.cos(x) / x, abs=1e-15)

    def test_half_wavelength_crossing(self):
        geo = Geometry([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]])
        cpl = scalar_kernel_couplings(geo, gamma=1.0)
        assert abs(cpl.gamma[1][0, 1]) < 1e-12
        assert cpl.omega[1][0, 1] == pytest.approx(0.5 / math.pi)

    def test_small_separation_approaches_equal_coupling(self):
        geo = Geometry([[0.0, 0.0, 0.0], [1e-6, 0.0, 0.0], [0.0, 1e-6, 0.0]])
        kernel = scalar_kernel_couplings(geo, gamma=1.0, n_transitions=2)
        dicke = dicke_couplings(3, lambda_scheme(3), gamma=1.0)
        for j in (1, 2):
            assert np.max(np.abs(kernel.gamma[j] - dicke.gamma[j])) < 1e-4

    def test_diagonals(self):
        geo = Geometry([[0.0, 0.0, 0.0], [0.3, 0.1, 0.0]])
        cpl = scalar_kernel_couplings(geo, gamma=2.0)
        assert np.allclose(np.diag(cpl.gamma[1]), 2.0)
        assert np.allclose(np.diag(cpl.omega[1]), 0.0)

    def test_rejects_coincident_atoms(self):
        geo = Geometry([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        with pytest.raises(ValueError):
            scalar_kernel_couplings(geo, gamma=1.0)

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(9)
        pos = rng.uniform(-0.4, 0.4, size=(4, 3))
        theta = 0.7
        rot = np.array(
            [
                [math.cos(theta), -math.sin(theta), 0.0],
                [math.sin(theta), math.cos(theta), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        moved = pos @ rot.T + np.array([0.3, -1.2, 0.8])
        a = scalar_kernel_couplings(Geometry(pos), gamma=1.0)
        b = scalar_kernel_couplings(Geometry(moved), gamma=1.0)
        assert np.max(np.abs(a.gamma[1] - b.gamma[1])) < 1e-12
        assert np.max(np.abs(a.omega[1] - b.omega[1])) < 1e-12

    def test_kernel_psd_on_random_geometries(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            pos = rng.uniform(-1.0, 1.0, size=(5, 3))
            cpl = scalar_kernel_couplings(Geometry(pos), gamma=1.0)
            assert np.linalg.eigvalsh(cpl.gamma[1]).min() > -1e-10


class TestGeometryAndSetValidation:
    def test_geometry_shape(self):
        with pytest.raises(ValueError):
            Geometry([[0.0, 0.0]])
        with pytest.raises(ValueError):
            Geometry(np.array([[np.inf, 0.0, 0.0]]))

    def test_coupling_set_shape_checks(self):
        with pytest.raises(ValueError):
            CouplingSet(
                2,
                (1,),
                gamma={1: np.eye(3)},
                omega={1: np.zeros((2, 2))},
                omega_bar={1: np.zeros(2)},
            )

    def test_immutable_matrices(self):
        cpl = dicke_couplings(2, lambda_scheme(3), gamma=1.0)
        with pytest.raises(ValueError):
            cpl.gamma[1][0, 0] = 5.0
