import numpy as np
import pytest

from extentlab import (
    AffineForm,
    PauliOperator,
    enumerate_stabilizer_states,
    group_into_bases,
    pauli_commutes,
    stabilizer_amplitudes,
    stabilizer_state_count,
)
from extentlab.dictionary import ray_key
from extentlab.errors import CapacityError, DimensionMismatchError, StructureError
from extentlab.stab import iter_stabilizer_groups

from oracles import brute_force_stabilizer_rays


class TestPauli:
    def test_x_z_anticommute(self):
        assert not pauli_commutes(PauliOperator.from_label("XI"), PauliOperator.from_label("ZI"))

    def test_xx_zz_commute(self):
        assert pauli_commutes(PauliOperator.from_label("XX"), PauliOperator.from_label("ZZ"))

    def test_identity_commutes(self):
        eye = PauliOperator.from_label("II")
        for lbl in ("XY", "ZX", "YY"):
            assert pauli_commutes(eye, PauliOperator.from_label(lbl))

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            pauli_commutes(PauliOperator.from_label("X"), PauliOperator.from_label("XX"))

    def test_bad_label(self):
        with pytest.raises(ValueError):
            PauliOperator.from_label("XQ")

    def test_phase_mod_4(self):
        assert PauliOperator.from_label("X", phase=7).phase == 3


class TestAmplitudes:
    def test_point_support(self):
        form = AffineForm(np.zeros((0, 2)), [0, 0], [0, 0], np.zeros((0, 0)))
        np.testing.assert_allclose(stabilizer_amplitudes(form, 2), [1, 0, 0, 0])

    def test_uniform_superposition(self):
        form = AffineForm([[1]], [0], [0], [[0]])
        np.testing.assert_allclose(stabilizer_amplitudes(form, 1), np.ones(2) / np.sqrt(2))

    def test_i_phase(self):
        form = AffineForm([[1]], [0], [1], [[0]])
        np.testing.assert_allclose(stabilizer_amplitudes(form, 1), np.array([1, 1j]) / np.sqrt(2))

    def test_unit_norm(self):
        form = AffineForm([[1, 0, 1], [0, 1, 1]], [0, 0, 1], [1, 2, 3], [[0, 1], [0, 0]])
        v = stabilizer_amplitudes(form, 3)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_dependent_basis_rejected(self):
        form = AffineForm([[1, 1], [1, 1]], [0, 0], [0, 0], np.zeros((2, 2)))
        with pytest.raises(StructureError):
            stabilizer_amplitudes(form, 2)

    def test_lower_triangular_quadratic_rejected(self):
        form = AffineForm([[1, 0], [0, 1]], [0, 0], [0, 0], [[0, 0], [1, 0]])
        with pytest.raises(StructureError):
            stabilizer_amplitudes(form, 2)


class TestEnumeration:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_counts_match_formula(self, n):
        assert len(enumerate_stabilizer_states(n)) == stabilizer_state_count(n)

    @pytest.mark.slow
    def test_count_n4(self):
        assert len(enumerate_stabilizer_states(4)) == stabilizer_state_count(4)

    def test_formula_values(self):
        assert [stabilizer_state_count(n) for n in range(1, 6)] == [
            6, 60, 1080, 36720, 2423520,
        ]

    @pytest.mark.parametrize("n", [1, 2])
    def test_matches_brute_force_oracle(self, n):
        lib = {ray_key(w.amplitudes) for w in enumerate_stabilizer_states(n)}
        assert lib == brute_force_stabilizer_rays(n)

    def test_n5_gated(self):
        with pytest.raises(CapacityError):
            enumerate_stabilizer_states(5)

    def test_out_of_range(self):
        with pytest.raises(CapacityError):
            enumerate_stabilizer_states(0)
        with pytest.raises(CapacityError):
            enumerate_stabilizer_states(6)

    def test_stream_matches_materialized(self):
        d = enumerate_stabilizer_states(2)
        streamed = []
        for idx, amps in iter_stabilizer_groups(2):
            block = np.zeros((amps.shape[0], 4), dtype=complex)
            block[:, idx] = amps
            streamed.extend(block)
        assert len(streamed) == len(d)
        keys = {ray_key(w.amplitudes) for w in d}
        from extentlab.dictionary import canonical_phase

        assert {ray_key(canonical_phase(v)) for v in streamed} == keys

    def test_single_qubit_states(self):
        d = enumerate_stabilizer_states(1)
        rt = 1 / np.sqrt(2)
        expected = [
            [1, 0], [0, 1], [rt, rt], [rt, -rt], [rt, 1j * rt], [rt, -1j * rt],
        ]
        for v in expected:
            assert d.contains_ray(np.array(v, dtype=complex))


class TestBasisPartition:
    def test_n1_groups(self):
        d = enumerate_stabilizer_states(1)
        part = group_into_bases(d)
        assert len(part.groups) == 3
        assert sorted(i for g in part.groups for i in g) == list(range(6))

    @pytest.mark.parametrize("n", [1, 2])
    def test_groups_are_orthonormal(self, n):
        d = enumerate_stabilizer_states(n)
        part = group_into_bases(d)
        assert len(part.groups) == len(d) // d.dim
        for g in part.groups:
            G = d.matrix[:, list(g)]
            np.testing.assert_allclose(G.conj().T @ G, np.eye(d.dim), atol=1e-10)

    def test_basis_index_array(self):
        d = enumerate_stabilizer_states(1)
        part = group_into_bases(d)
        arr = part.basis_index_array()
        assert arr.shape == (6,)
        for g, members in enumerate(part.groups):
            assert all(arr[i] == g for i in members)
            assert all(part.basis_of(i) == g for i in members)

    def test_non_partitionable(self):
        from extentlab import make_dictionary

        d = make_dictionary([
            np.array([1, 0], complex),
            np.array([1, 1], complex) / np.sqrt(2),
        ])
        with pytest.raises(StructureError):
            group_into_bases(d)
