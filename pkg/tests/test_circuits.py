import math

import numpy as np
import pytest

from darkstates import (
    Circuit,
    Gate,
    PureState,
    antisymmetric_dark_state,
    controlled_cycle,
    cyclic_shift,
    equal_up_to_local_phases,
    exponential_triple_cycle_gate,
    lambda_scheme,
    partial_trace,
    prepare_dark_method1,
    prepare_dark_method2,
    prepare_dark_recursive,
    prepare_superradiant_recursive,
    prepare_two_atom_singlet,
    symmetric_superradiant_state,
)
from darkstates._tensor import apply_site_vec
from darkstates.dynamics import collective_jump_operators

from _oracles import flat_index


def apply_phases(state: PureState, fit) -> np.ndarray:
    vec = state.amplitudes.copy()
    for m, phase in enumerate(fit.site_phases):
        vec = apply_site_vec(np.diag(phase), vec, m, state.M, state.d)
    return vec * np.conj(fit.global_phase)


class TestGates:
    def test_cyclic_shift_action(self):
        X = cyclic_shift(3).matrix
        e0, e1, e2 = np.eye(3)
        assert np.array_equal(X @ e0, e1)
        assert np.array_equal(X @ e2, e0)

    def test_cyclic_shift_order(self):
        X = cyclic_shift(3).matrix
        assert np.array_equal(np.linalg.matrix_power(X, 3), np.eye(3))

    def test_qubit_case_is_bit_flip(self):
        X = cyclic_shift(2).matrix
        assert np.array_equal(X, np.array([[0, 1], [1, 0]]))

    def test_rejects_small_dimension(self):
        with pytest.raises(ValueError):
            cyclic_shift(1)

    def test_gate_unitarity_enforced(self):
        with pytest.raises(ValueError):
            Gate(targets=(1,), matrix=np.array([[1.0, 1.0], [0.0, 1.0]]), label="bad")

    def test_gate_retargeting(self):
        g = controlled_cycle(3)
        g2 = g.on(3, 1)
        assert g2.targets == (3, 1)
        assert np.array_equal(g2.matrix, g.matrix)

    def test_controlled_cycle_unitary(self):
        g = controlled_cycle(3)
        assert np.linalg.norm(g.matrix.conj().T @ g.matrix - np.eye(9)) < 1e-12

    def test_circuit_target_validation(self):
        with pytest.raises(ValueError):
            Circuit(2, 3, (controlled_cycle(3).on(1, 5),))


class TestSinglet:
    def test_amplitudes(self):
        psi = prepare_two_atom_singlet()
        assert psi.amplitudes[flat_index((0, 1), 3)] == pytest.approx(1 / math.sqrt(2))
        assert psi.amplitudes[flat_index((1, 0), 3)] == pytest.approx(-1 / math.sqrt(2))

    def test_norm(self):
        assert np.linalg.norm(prepare_two_atom_singlet().amplitudes) == pytest.approx(1.0)

    def test_orthogonal_to_triplet(self):
        psi = prepare_two_atom_singlet()
        plus = np.zeros(9, dtype=complex)
        plus[flat_index((0, 1), 3)] = plus[flat_index((1, 0), 3)] = 1 / math.sqrt(2)
        assert abs(np.vdot(plus, psi.amplitudes)) < 1e-14


class TestExponentialGateMethod:
    def test_gate_unitary(self):
        g = exponential_triple_cycle_gate()
        assert np.linalg.norm(g.matrix.conj().T @ g.matrix - np.eye(27)) < 1e-12

    def test_gate_commutes_with_generator(self):
        g = exponential_triple_cycle_gate().matrix
        X = cyclic_shift(3).matrix
        XXX = np.kron(np.kron(X, X), X)
        assert np.linalg.norm(g @ XXX - XXX @ g) < 1e-12

    def test_cube_matches_third_angle(self):
        g = exponential_triple_cycle_gate().matrix
        X = cyclic_shift(3).matrix
        XXX = np.kron(np.kron(X, X), X)
        gen = XXX + XXX.conj().T
        w, V = np.linalg.eigh(gen)
        cube_ref = (V * np.exp(-1j * 2 * np.pi / 3 * w)) @ V.conj().T
        assert np.linalg.norm(np.linalg.matrix_power(g, 3) - cube_ref) < 1e-10

    def test_output_support_and_moduli(self):
        state, _ = prepare_dark_method1()
        moduli = np.abs(state.amplitudes)
        support = moduli > 1e-12
        assert support.sum() == 6
        assert np.allclose(moduli[support], 1 / math.sqrt(6), atol=1e-12)

    def test_phase_recovery_reaches_dark_state(self):
        state, fit = prepare_dark_method1()
        assert fit.equal
        corrected = apply_phases(state, fit)
        target = antisymmetric_dark_state(3).amplitudes
        assert np.linalg.norm(corrected - target) < 1e-10

    def test_raw_output_differs_from_dark_state(self):
        state, _ = prepare_dark_method1()
        overlap = abs(antisymmetric_dark_state(3).overlap(state))
        assert overlap < 0.99  # genuinely needs the local phase gates


class TestControlledShiftMethod:
    def test_exact_output(self):
        out = prepare_dark_method2()
        overlap = antisymmetric_dark_state(3).overlap(out)
        assert abs(overlap - 1.0) < 1e-12

    def test_control_atom_marginal_uniform(self):
        out = prepare_dark_method2()
        red = partial_trace(out.density_matrix(), {3})
        assert np.allclose(np.diag(red.entries), 1 / 3, atol=1e-12)


class TestRecursiveScheme:
    @pytest.mark.parametrize("N", [3, 4])
    def test_dark_overlap(self, N):
        state, phase = prepare_dark_recursive(N)
        overlap = antisymmetric_dark_state(N).overlap(state)
        assert abs(abs(overlap) - 1.0) < 1e-10
        assert phase == pytest.approx(overlap / abs(overlap))

    def test_matches_controlled_shift_for_three(self):
        rec, _ = prepare_dark_recursive(3)
        direct = prepare_dark_method2()
        assert abs(rec.overlap(direct)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("N", [3, 4])
    def test_superradiant_overlap(self, N):
        state, _ = prepare_superradiant_recursive(N)
        overlap = symmetric_superradiant_state(N).overlap(state)
        assert abs(abs(overlap) - 1.0) < 1e-10

    def test_output_annihilated_by_jump_operators(self):
        for N in (3, 4):
            state, _ = prepare_dark_recursive(N)
            for S in collective_jump_operators(N, lambda_scheme(N)):
                assert np.linalg.norm(S @ state.amplitudes) < 1e-10

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            prepare_dark_recursive(2)


class TestLocalPhaseEquivalence:
    def test_global_phase_only(self):
        psi = antisymmetric_dark_state(3)
        rotated = PureState(3, 3, np.exp(0.7j) * psi.amplitudes)
        fit = equal_up_to_local_phases(rotated, psi)
        assert fit.equal
        assert fit.residual < 1e-12

    def test_dark_vs_superradiant_fails(self):
        fit = equal_up_to_local_phases(
            symmetric_superradiant_state(3), antisymmetric_dark_state(3)
        )
        assert not fit.equal

    def test_recovers_random_diagonal_dressing(self):
        rng = np.random.default_rng(51)
        psi = antisymmetric_dark_state(3)
        vec = psi.amplitudes.copy()
        for m in range(3):
            vec = apply_site_vec(np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 3))), vec, m, 3, 3)
        dressed = PureState(3, 3, vec)
        fit = equal_up_to_local_phases(dressed, psi, tol=1e-10)
        assert fit.equal
        corrected = apply_phases(dressed, fit)
        assert np.linalg.norm(corrected - psi.amplitudes) < 1e-10

    def test_modulus_mismatch_fails_fast(self):
        psi = antisymmetric_dark_state(3)
        other = PureState(3, 3, np.roll(psi.amplitudes, 1))
        fit = equal_up_to_local_phases(other, psi)
        assert not fit.equal

    def test_all_three_preparations_agree(self):
        m1, _ = prepare_dark_method1()
        m2 = prepare_dark_method2()
        m3, _ = prepare_dark_recursive(3)
        assert equal_up_to_local_phases(m1, m2, tol=1e-9).equal
        assert equal_up_to_local_phases(m2, m3, tol=1e-9).equal
        assert equal_up_to_local_phases(m1, m3, tol=1e-9).equal
