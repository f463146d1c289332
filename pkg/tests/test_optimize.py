from fractions import Fraction

import pytest

from src.errors import CapExceededError, InputError, IsopolyError
from src.graphs import adjacency_matrix
import src.optimize
from src.optimize import OptResult, lap_max, psi_n_max, psi_nn_max, q_coefficients
from src.tensor_core import (Matrix, ObjectiveTensor, Permutation, all_permutations, identity_objective,
                             objective_from_pair, pair_value, random_integer_tensor)


def brute_psi(W):
    best = None
    for sigma in all_permutations(W.n):
        value = pair_value(W, sigma, sigma)
        if best is None or value > best[0]:
            best = (value, sigma)
    return best


def brute_psinn(W):
    best = None
    perms = list(all_permutations(W.n))
    for sigma in perms:
        for pi in perms:
            value = pair_value(W, sigma, pi)
            if best is None or value > best[0]:
                best = (value, sigma, pi)
    return best


def brute_lap(C):
    best = None
    for pi in all_permutations(C.n):
        value = sum((C[s, pi(s)] for s in range(C.n)), Fraction(0))
        if best is None or value > best[0]:
            best = (value, pi)
    return best


def random_rational_matrix(n, rng):
    return Matrix([[Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 4))) for _ in range(n)]
                   for _ in range(n)])


@pytest.fixture
def k3_p3(k3, p3):
    return objective_from_pair(adjacency_matrix(k3), adjacency_matrix(p3))


def test_lap_max_examples():
    assert lap_max(Matrix.identity(3)) == (3, Permutation.identity(3))
    assert lap_max(Matrix([[1, 2], [3, 5]])) == (6, Permutation((0, 1)))
    assert lap_max(Matrix([[0, 1], [1, 0]])) == (2, Permutation((1, 0)))


def test_lap_max_breaks_ties_lexicographically():
    value, pi = lap_max(Matrix.zeros(4))
    assert value == 0 and pi == Permutation.identity(4)
    value, pi = lap_max(Matrix([[1, 1, 0], [1, 1, 0], [0, 0, 1]]))
    assert value == 3 and pi == Permutation.identity(3)


def test_lap_max_matches_enumeration(rng):
    for _ in range(200):
        C = random_rational_matrix(int(rng.integers(1, 7)), rng)
        assert lap_max(C) == brute_lap(C)


def test_q_coefficients(rng):
    for n in (1, 2, 4):
        assert q_coefficients(identity_objective(n), Permutation.identity(n)) == Matrix.identity(n)
    assert q_coefficients(ObjectiveTensor.zeros(3), Permutation((2, 0, 1))) == Matrix.zeros(3)
    for _ in range(20):
        W = random_integer_tensor(3, 9, rng)
        sigma, pi = Permutation(tuple(rng.permutation(3))), Permutation(tuple(rng.permutation(3)))
        c = q_coefficients(W, sigma)
        assert sum(c[s, pi(s)] for s in range(3)) == pair_value(W, sigma, pi)


@pytest.mark.parametrize('method', ['exhaustive', 'branch_and_bound'])
def test_psi_n_max_examples(method, k3_p3):
    for n in (1, 2, 3, 5):
        result = psi_n_max(identity_objective(n), method=method)
        assert result.value == n and result.sigma == Permutation.identity(n)
    result = psi_n_max(k3_p3, method=method)
    assert result.value == 4 and result.sigma == Permutation.identity(3)
    result = psi_n_max(ObjectiveTensor.zeros(4), method=method)
    assert result.value == 0 and result.sigma == Permutation.identity(4)


def test_psi_n_max_single_vertex():
    W = ObjectiveTensor([[[["-7/2"]]]])
    assert psi_n_max(W).value == Fraction(-7, 2)
    assert psi_nn_max(W).value == Fraction(-7, 2)


@pytest.mark.parametrize('n', [2, 3, 4])
def test_psi_n_max_matches_enumeration(rng, n):
    for _ in range(10):
        W = random_integer_tensor(n, 9, rng).scale(Fraction(1, 2))
        value, sigma = brute_psi(W)
        for method in ('exhaustive', 'branch_and_bound'):
            result = psi_n_max(W, method=method)
            assert (result.value, result.sigma) == (value, sigma)
            assert pair_value(W, result.sigma, result.sigma) == result.value


@pytest.mark.parametrize('n', [3, 4, 5])
def test_branch_and_bound_matches_exhaustive(rng, n):
    for _ in range(10):
        W = random_integer_tensor(n, 9, rng)
        exhaustive = psi_n_max(W, method='exhaustive')
        bnb = psi_n_max(W, method='branch_and_bound')
        assert (bnb.value, bnb.witness) == (exhaustive.value, exhaustive.witness)


@pytest.mark.slow
@pytest.mark.parametrize('n', [3, 4, 5, 6])
def test_branch_and_bound_matches_exhaustive_sweep(n):
    from src.tensor_core import seeded_generator
    rng = seeded_generator(n)
    for _ in range(100):
        W = random_integer_tensor(n, 9, rng)
        exhaustive = psi_n_max(W, method='exhaustive')
        bnb = psi_n_max(W, method='branch_and_bound')
        assert (bnb.value, bnb.witness) == (exhaustive.value, exhaustive.witness)


@pytest.mark.parametrize('method', ['exhaustive', 'branch_and_bound'])
def test_psi_nn_max_examples(method, k3_p3):
    for n in (1, 2, 3):
        result = psi_nn_max(identity_objective(n), method=method)
        assert result.value == n
        assert result.witness == (Permutation.identity(n), Permutation.identity(n))
    assert psi_nn_max(k3_p3, method=method).value == 4
    assert psi_nn_max(ObjectiveTensor.zeros(3), method=method).value == 0


@pytest.mark.parametrize('n', [2, 3])
def test_psi_nn_max_matches_enumeration(rng, n):
    for _ in range(25):
        W = random_integer_tensor(n, 9, rng)
        value, sigma, pi = brute_psinn(W)
        for method in ('exhaustive', 'branch_and_bound'):
            result = psi_nn_max(W, method=method)
            assert (result.value, result.sigma, result.pi) == (value, sigma, pi)


@pytest.mark.slow
def test_psi_nn_max_matches_enumeration_n4(rng):
    for _ in range(25):
        W = random_integer_tensor(4, 9, rng)
        value, sigma, pi = brute_psinn(W)
        result = psi_nn_max(W)
        assert (result.value, result.sigma, result.pi) == (value, sigma, pi)


def test_psi_nn_dominates_psi(rng):
    for n in (2, 3, 4):
        W = random_integer_tensor(n, 9, rng)
        assert psi_nn_max(W).value >= psi_n_max(W).value


def test_psi_n_max_scaling_and_identity_shift(rng):
    W = random_integer_tensor(4, 9, rng)
    base = psi_n_max(W)
    scaled = psi_n_max(W.scale(Fraction(5, 3)))
    assert scaled.value == Fraction(5, 3) * base.value
    assert scaled.sigma == base.sigma
    shifted = psi_n_max(W + identity_objective(4).scale(Fraction(7, 2)))
    assert shifted.value == base.value + 4 * Fraction(7, 2)
    assert shifted.sigma == base.sigma


@pytest.mark.parametrize('method', ['exhaustive', 'branch_and_bound'])
def test_threads_give_identical_results(rng, method):
    W = random_integer_tensor(5, 9, rng)
    assert psi_n_max(W, method=method, threads=4) == psi_n_max(W, method=method)
    V = random_integer_tensor(4, 9, rng)
    assert psi_nn_max(V, method=method, threads=3) == psi_nn_max(V, method=method)


def test_caps_and_bad_arguments():
    with pytest.raises(CapExceededError):
        psi_n_max(identity_objective(4), cap=3)
    with pytest.raises(CapExceededError):
        psi_nn_max(identity_objective(3), cap=2)
    with pytest.raises(InputError):
        psi_n_max(identity_objective(2), method='greedy')
    with pytest.raises(InputError):
        psi_n_max(identity_objective(2), threads=0)


def test_cap_follows_environment(monkeypatch):
    monkeypatch.setenv('ISOPOLY_MAX_N', '2')
    with pytest.raises(CapExceededError):
        psi_n_max(identity_objective(3))


def test_opt_result_json(k3_p3):
    doc = psi_n_max(k3_p3).to_json()
    assert doc == {'value': '4', 'witness': [1, 2, 3], 'nodes': 6, 'method': 'exhaustive'}
    doc = psi_nn_max(identity_objective(2)).to_json()
    assert doc['witness'] == [[1, 2], [1, 2]]
    assert OptResult(Fraction(1, 2), (Permutation((1, 0)),), 1, 'exhaustive').to_json()['value'] == '1/2'


def test_psi_nn_max_rejects_inconsistent_inner_assignment(monkeypatch):
    solve = src.optimize._lap_lex
    monkeypatch.setattr(src.optimize, '_lap_lex', lambda rows: (solve(rows)[0] + 1, solve(rows)[1]))
    with pytest.raises(IsopolyError):
        psi_nn_max(identity_objective(2))
