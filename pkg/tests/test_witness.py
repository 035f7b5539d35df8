import numpy as np
import pytest

from extentlab import enumerate_stabilizer_states, extent, make_dictionary
from extentlab.errors import FeasibilityError, NormalizationError
from extentlab.extent import magic_t_state
from extentlab.rng import haar_sample, trial_rng
from extentlab.witness import (
    active_set,
    check_complementary_slackness,
    in_interior,
    in_normal_cone,
    is_extreme_point,
    witness_is_unique,
    word_addition_strictly_decreases,
)

F_T = (1.0 + 1.0 / np.sqrt(3.0)) / 2.0


@pytest.fixture(scope="module")
def stab1():
    return enumerate_stabilizer_states(1)


@pytest.fixture(scope="module")
def t_solution(stab1):
    return extent(stab1, magic_t_state())


def dict_e01():
    return make_dictionary([np.array([1, 0], complex), np.array([0, 1], complex)])


class TestActiveSet:
    def test_t_state_witness(self, stab1, t_solution):
        act = active_set(stab1, t_solution.witness)
        assert act.indices.size == 3
        # phases rotate each active overlap onto the positive real axis
        ov = stab1.matrix[:, act.indices].conj().T @ t_solution.witness
        rotated = np.exp(1j * act.phases) * ov
        np.testing.assert_allclose(rotated.imag, 0.0, atol=1e-6)
        assert np.all(rotated.real > 0)

    def test_infeasible_rejected(self, stab1):
        with pytest.raises(FeasibilityError):
            active_set(stab1, np.array([3.0, 0.0]))


class TestExtremePoint:
    def test_t_witness_extremal(self, stab1, t_solution):
        assert is_extreme_point(stab1, t_solution.witness)

    def test_basis_vector_not_extremal(self, stab1):
        # active set of y = e_0 is the single word e_0: cannot span C^2
        assert not is_extreme_point(stab1, np.array([1.0, 0.0]))


class TestSlackness:
    def test_certified_solution_is_slack(self, stab1, t_solution):
        rep = check_complementary_slackness(stab1, t_solution.coefficients, t_solution.witness)
        assert rep.max_violation <= 1e-6

    def test_random_instances(self, stab1):
        for trial in range(10):
            psi = haar_sample(2, trial_rng(13, "slackness", trial))
            sol = extent(stab1, psi)
            rep = check_complementary_slackness(stab1, sol.coefficients, sol.witness)
            assert rep.max_violation <= 1e-6

    def test_detects_leakage(self, stab1):
        c = np.zeros(6, dtype=complex)
        idx = stab1.index_of_ray(np.array([1, 1], complex) / np.sqrt(2))
        c[idx] = 0.3  # mass on a word that is strictly inactive for this witness
        y = np.array([0.6, 0.0])  # feasible: every overlap is at most 0.6
        rep = check_complementary_slackness(stab1, c, y)
        assert rep.max_leakage == pytest.approx(0.3 * (1.0 - 0.6 / np.sqrt(2)))


class TestUniqueness:
    def test_t_state_unique(self, stab1, t_solution):
        assert witness_is_unique(stab1, t_solution) == "unique"

    def test_word_is_unknown(self, stab1):
        # a single-word support cannot span C^2
        sol = extent(stab1, stab1[0].amplitudes)
        assert witness_is_unique(stab1, sol) == "unknown"


class TestNormalCone:
    def test_own_witness_in_cone(self, stab1):
        psi = haar_sample(2, trial_rng(13, "cone", 0))
        sol = extent(stab1, psi)
        assert in_normal_cone(stab1, sol.witness, psi)

    def test_far_witness_not_in_cone(self, stab1, t_solution):
        # e_1 is strictly inactive for the T witness, so it cannot attain
        psi = np.array([0.0, 1.0], dtype=complex)
        assert not in_normal_cone(stab1, t_solution.witness, psi)

    def test_in_interior_details(self, stab1):
        psi = magic_t_state()
        sol = extent(stab1, psi)
        verdict, info = in_interior(stab1, sol.witness, psi, details=True)
        assert verdict
        assert info["in_cone"] and info["unique_witness"] and info["witness_matches"]


class TestWordAddition:
    def test_constructed_trigger(self):
        d = dict_e01()
        psi = np.array([0.6, 0.8])
        sol = extent(d, psi)
        w = np.array([1.0, 1.0]) / np.sqrt(2)
        assert word_addition_strictly_decreases(d, sol, w)
        after = extent(d.add_word(w), psi)
        assert after.xi < sol.xi - 1e-4

    def test_existing_word_never_triggers(self, stab1):
        psi = haar_sample(2, trial_rng(13, "word-add", 0))
        sol = extent(stab1, psi)
        assert not word_addition_strictly_decreases(stab1, sol, stab1[2].amplitudes)

    def test_norm_check(self):
        d = dict_e01()
        sol = extent(d, np.array([0.6, 0.8]))
        with pytest.raises(NormalizationError):
            word_addition_strictly_decreases(d, sol, np.array([2.0, 0.0]))
