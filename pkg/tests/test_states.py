import itertools
import math

import numpy as np
import pytest

from darkstates import (
    DensityMatrix,
    PureState,
    antisymmetric_dark_state,
    basis_ket,
    composite_dark_state,
    lambda_scheme,
    partial_trace,
    symmetric_superradiant_state,
    tensor_product,
    v_scheme,
    v_system_dark_state,
)
from darkstates.dynamics import excited_population

from _oracles import antisym_vector, collective_lower, flat_index


class TestDarkStateConstruction:
    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_matches_inversion_count_oracle(self, N):
        psi = antisymmetric_dark_state(N)
        assert np.allclose(psi.amplitudes, antisym_vector(N), atol=0)

    def test_two_atom_form(self):
        psi = antisymmetric_dark_state(2)
        # (|e g_1> - |g_1 e>)/sqrt(2) with e -> 0, g_1 -> 1
        expected = np.zeros(4, dtype=complex)
        expected[flat_index((0, 1), 2)] = 1 / math.sqrt(2)
        expected[flat_index((1, 0), 2)] = -1 / math.sqrt(2)
        assert np.allclose(psi.amplitudes, expected)

    def test_three_atom_amplitudes(self):
        psi = antisymmetric_dark_state(3)
        assert psi.amplitudes[flat_index((0, 1, 2), 3)] == pytest.approx(1 / math.sqrt(6))
        assert psi.amplitudes[flat_index((0, 2, 1), 3)] == pytest.approx(-1 / math.sqrt(6))

    @pytest.mark.parametrize("N", [2, 3, 4, 5])
    def test_normalized(self, N):
        psi = antisymmetric_dark_state(N)
        assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-13)

    def test_antisymmetry_under_transpositions(self):
        for N in (2, 3, 4):
            psi = antisymmetric_dark_state(N)
            tensor = psi.amplitudes.reshape([N] * N)
            for a, b in itertools.combinations(range(N), 2):
                swapped = np.swapaxes(tensor, a, b)
                assert np.array_equal(swapped, -tensor)

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            antisymmetric_dark_state(1)


class TestSuperradiantState:
    def test_two_atom_plus_sign(self):
        psi = symmetric_superradiant_state(2)
        assert psi.amplitudes[flat_index((0, 1), 2)] == pytest.approx(1 / math.sqrt(2))
        assert psi.amplitudes[flat_index((1, 0), 2)] == pytest.approx(1 / math.sqrt(2))

    def test_three_atom_uniform(self):
        psi = symmetric_superradiant_state(3)
        support = np.abs(psi.amplitudes) > 0
        assert support.sum() == 6
        assert np.allclose(psi.amplitudes[support], 1 / math.sqrt(6))

    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_orthogonal_to_dark(self, N):
        overlap = symmetric_superradiant_state(N).overlap(antisymmetric_dark_state(N))
        assert abs(overlap) < 1e-14

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            symmetric_superradiant_state(1)


class TestVSystemDarkState:
    def test_three_atom_stores_two_excitations(self):
        psi = v_system_dark_state(3)
        _, total = excited_population(psi.density_matrix(), v_scheme(3))
        assert total == pytest.approx(2.0, abs=1e-12)

    def test_amplitude_convention(self):
        psi = v_system_dark_state(3)
        # |g e_1 e_2> with g -> 0, e_i -> i
        assert psi.amplitudes[flat_index((0, 1, 2), 3)] == pytest.approx(1 / math.sqrt(6))

    def test_two_atom_form(self):
        psi = v_system_dark_state(2)
        expected = np.zeros(4, dtype=complex)
        expected[flat_index((0, 1), 2)] = 1 / math.sqrt(2)
        expected[flat_index((1, 0), 2)] = -1 / math.sqrt(2)
        assert np.allclose(psi.amplitudes, expected)


class TestTensorProduct:
    def test_basis_kets(self):
        e = basis_ket(1, 3, [0])
        g1 = basis_ket(1, 3, [1])
        prod = tensor_product(e, g1)
        assert prod.amplitudes[flat_index((0, 1), 3)] == 1.0

    def test_norm_multiplicative(self):
        rng = np.random.default_rng(42)
        for _ in range(5):
            a = rng.normal(size=9) + 1j * rng.normal(size=9)
            b = rng.normal(size=3) + 1j * rng.normal(size=3)
            sa = PureState.from_amplitudes(2, 3, a, normalize=True)
            sb = PureState.from_amplitudes(1, 3, b, normalize=True)
            assert np.linalg.norm(tensor_product(sa, sb).amplitudes) == pytest.approx(1.0)

    def test_singlet_with_spectator_overlap(self):
        # (psi_- (x) |g_2>) against the three-atom dark state: 1/sqrt(3)
        singlet = antisymmetric_dark_state(2)
        embedded = np.zeros(9, dtype=complex)
        embedded[flat_index((0, 1), 3)] = singlet.amplitudes[flat_index((0, 1), 2)]
        embedded[flat_index((1, 0), 3)] = singlet.amplitudes[flat_index((1, 0), 2)]
        two = PureState(2, 3, embedded)
        prod = tensor_product(two, basis_ket(1, 3, [2]))
        overlap = antisymmetric_dark_state(3).overlap(prod)
        assert overlap == pytest.approx(1 / math.sqrt(3), abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            tensor_product(basis_ket(1, 2, [0]), basis_ket(1, 3, [0]))


class TestCompositeDarkState:
    def _dark3(self):
        return antisymmetric_dark_state(3)

    def test_product_of_two_dark_blocks_is_dark(self):
        psi = composite_dark_state(
            [[((1, 2, 3), self._dark3()), ((4, 5, 6), self._dark3())]], [1.0]
        )
        for lower in (1, 2):
            image = collective_lower(psi.amplitudes, 0, lower, 6, 3)
            assert np.linalg.norm(image) < 1e-12

    def test_ground_dressed_term_norm(self):
        g = basis_ket(1, 3, [1])
        term = [((1,), g), ((2,), g), ((3, 4, 5), self._dark3()), ((6,), basis_ket(1, 3, [2]))]
        psi = composite_dark_state([term], [1.0])
        assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-13)

    def test_superposition_is_dark(self):
        g1 = basis_ket(1, 3, [1])
        term_a = [((1, 2, 3), self._dark3()), ((4, 5, 6), self._dark3())]
        term_b = [((1,), g1), ((2,), g1), ((3, 4, 5), self._dark3()), ((6,), g1)]
        psi, norm = composite_dark_state([term_a, term_b], [1.0, 1.0], return_norm=True)
        assert norm > 0
        for lower in (1, 2):
            image = collective_lower(psi.amplitudes, 0, lower, 6, 3)
            assert np.linalg.norm(image) < 1e-12

    def test_block_placement_reorders_atoms(self):
        # blocks given out of order must land on the atoms they name
        e = basis_ket(1, 3, [0])
        g2 = basis_ket(1, 3, [2])
        psi = composite_dark_state([[((2,), g2), ((1,), e)]], [1.0])
        assert psi.amplitudes[flat_index((0, 2), 3)] == pytest.approx(1.0)

    def test_rejects_overlapping_subsets(self):
        with pytest.raises(ValueError):
            composite_dark_state(
                [[((1, 2, 3), self._dark3()), ((3, 4, 5), self._dark3())]], [1.0]
            )

    def test_rejects_incomplete_partition(self):
        with pytest.raises(ValueError):
            composite_dark_state([[((1, 2, 4), self._dark3())]], [1.0])

    def test_rejects_all_zero_weights(self):
        with pytest.raises(ValueError):
            composite_dark_state([[((1, 2, 3), self._dark3())]], [0.0])


class TestPartialTrace:
    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_single_atom_reduction_maximally_mixed(self, N):
        rho = antisymmetric_dark_state(N).density_matrix()
        for atom in range(1, N + 1):
            red = partial_trace(rho, {atom})
            assert np.allclose(red.entries, np.eye(N) / N, atol=1e-12)

    def test_product_state_recovery(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=3) + 1j * rng.normal(size=3)
        b = rng.normal(size=9) + 1j * rng.normal(size=9)
        sa = PureState.from_amplitudes(1, 3, a, normalize=True)
        sb = PureState.from_amplitudes(2, 3, b, normalize=True)
        prod = tensor_product(sa, sb).density_matrix()
        red = partial_trace(prod, {1})
        assert np.allclose(red.entries, sa.density_matrix().entries, atol=1e-12)

    def test_two_atom_reduction_of_dark3(self):
        rho = antisymmetric_dark_state(3).density_matrix()
        red = partial_trace(rho, {1, 2})
        eigs = np.linalg.eigvalsh(red.entries)
        assert np.allclose(np.sort(eigs)[-3:], [1 / 3] * 3, atol=1e-12)
        assert np.allclose(np.sort(eigs)[:-3], 0.0, atol=1e-12)
        # support is antisymmetric: swapping the two atoms flips the sign
        tensor = red.entries.reshape(3, 3, 3, 3)
        swapped = tensor.transpose(1, 0, 3, 2).reshape(9, 9)
        assert np.allclose(swapped, red.entries, atol=1e-12)

    def test_trace_and_hermiticity_preserved(self):
        rng = np.random.default_rng(11)
        A = rng.normal(size=(27, 27)) + 1j * rng.normal(size=(27, 27))
        rho = A @ A.conj().T
        rho = DensityMatrix(3, 3, rho / np.trace(rho))
        red = partial_trace(rho, {2, 3})
        assert np.trace(red.entries) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(red.entries, red.entries.conj().T)

    def test_composition(self):
        rng = np.random.default_rng(12)
        A = rng.normal(size=(27, 27)) + 1j * rng.normal(size=(27, 27))
        rho = A @ A.conj().T
        rho = DensityMatrix(3, 3, rho / np.trace(rho))
        two_step = partial_trace(partial_trace(rho, {1, 2}), {1})
        one_step = partial_trace(rho, {1})
        assert np.linalg.norm(two_step.entries - one_step.entries) < 1e-12

    def test_rejects_bad_keep_sets(self):
        rho = antisymmetric_dark_state(2).density_matrix()
        with pytest.raises(ValueError):
            partial_trace(rho, set())
        with pytest.raises(ValueError):
            partial_trace(rho, {0, 1})
        with pytest.raises(ValueError):
            partial_trace(rho, {3})


class TestValidation:
    def test_pure_state_norm_enforced(self):
        with pytest.raises(ValueError):
            PureState(1, 2, np.array([1.0, 1.0]))

    def test_density_matrix_hermiticity(self):
        mat = np.eye(4, dtype=complex) / 4
        mat = mat.copy()
        mat[0, 1] = 0.5
        with pytest.raises(ValueError):
            DensityMatrix(2, 2, mat)

    def test_density_matrix_trace(self):
        with pytest.raises(ValueError):
            DensityMatrix(2, 2, np.eye(4, dtype=complex))

    def test_density_matrix_positivity(self):
        mat = np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValueError):
            DensityMatrix(2, 2, mat)

    def test_level_scheme_counts(self):
        assert lambda_scheme(3).transition_ids == (1, 2)
        assert v_scheme(4).transition_ids == (1, 2, 3)
        assert lambda_scheme(3).labels == ("e", "g_1", "g_2")
        assert v_scheme(3).labels == ("g", "e_1", "e_2")

    def test_lowering_matrices(self):
        lam = lambda_scheme(3)
        low = lam.lowering_matrix(2)
        expect = np.zeros((3, 3))
        expect[2, 0] = 1.0
        assert np.array_equal(low, expect)
        vee = v_scheme(3)
        low_v = vee.lowering_matrix(1)
        expect_v = np.zeros((3, 3))
        expect_v[0, 1] = 1.0
        assert np.array_equal(low_v, expect_v)
