from fractions import Fraction
from itertools import combinations

import pytest
import sympy

from src.errors import CapExceededError, InputError
from src.project_config import DEFAULT_CAPS
from src.polytope_lab import (EdgeIndex, PointCloud, affine_dimension, compare_invariants,
                              distance_spectrum, graph_complete, induced_perm, is_edge, phi_vertex,
                              phi_vertices, psi_vertices)
from src.tensor_core import Matrix, Permutation, all_permutations, perm_matrix

CYCLE = Permutation((1, 2, 0))
SQUARE = PointCloud(2, ((0, 0), (1, 0), (1, 1), (0, 1)))


def test_edge_index_is_lexicographic():
    edges = EdgeIndex(4)
    assert edges.pairs == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    assert edges.N == 6
    assert [edges.index_of(*pair) for pair in edges.pairs] == list(range(6))
    assert edges.index_of(3, 1) == edges.index_of(1, 3)


def test_induced_perm_examples():
    assert induced_perm(Permutation.identity(4)) == Permutation.identity(6)
    assert induced_perm(CYCLE) == Permutation((2, 0, 1))
    assert induced_perm(Permutation((1, 0, 2))) == Permutation((0, 2, 1))
    with pytest.raises(InputError):
        induced_perm(Permutation.identity(1))


@pytest.mark.parametrize('n', [2, 3, 4])
def test_induced_perm_is_homomorphism(n):
    perms = list(all_permutations(n))
    induced = {sigma: induced_perm(sigma) for sigma in perms}
    for sigma in perms:
        assert induced[sigma.inverse()] == induced[sigma].inverse()
        for tau in perms:
            assert induced[sigma.compose(tau)] == induced[sigma].compose(induced[tau])


@pytest.mark.slow
def test_induced_perm_is_homomorphism_n5():
    perms = list(all_permutations(5))
    induced = {sigma: induced_perm(sigma) for sigma in perms}
    for sigma in perms:
        assert induced[sigma.inverse()] == induced[sigma].inverse()
        for tau in perms:
            assert induced[sigma.compose(tau)] == induced[sigma].compose(induced[tau])


def test_phi_vertex_examples():
    assert phi_vertex(Permutation.identity(4)) == Matrix.identity(6)
    assert phi_vertex(CYCLE) == perm_matrix(Permutation((2, 0, 1)))
    for n in (3, 4):
        vertices = [tuple(phi_vertex(sigma).entries.flat) for sigma in all_permutations(n)]
        assert len(set(vertices)) == len(vertices)


def test_point_cloud_validation():
    with pytest.raises(InputError):
        PointCloud(2, ((0, 0), (0, 0)))
    with pytest.raises(InputError):
        PointCloud(2, ((0, 0, 1),))
    cloud = PointCloud(1, ((Fraction(1, 2),), (1,)))
    assert cloud.to_json() == {'dim': 1, 'points': [['1/2'], ['1']]}


def test_vertex_clouds():
    psi2 = psi_vertices(2)
    assert (len(psi2), psi2.dim) == (2, 16)
    for n in (3, 4):
        psi, phi = psi_vertices(n), phi_vertices(n)
        assert len(psi) == len(phi) == len(list(all_permutations(n)))
        N = n * (n - 1) // 2
        assert phi.dim == N * N
        assert all(sum(p) == n * n and set(p) <= {0, 1} for p in psi.points)
        assert all(sum(p) == N and set(p) <= {0, 1} for p in phi.points)


def test_phi_2_is_a_single_point():
    assert len(phi_vertices(2)) == 1


def test_cloud_caps():
    with pytest.raises(CapExceededError):
        psi_vertices(4, cap=3)
    with pytest.raises(CapExceededError):
        phi_vertices(6)


def test_affine_dimension():
    assert affine_dimension(PointCloud(3, ((1, 2, 3),))) == 0
    assert affine_dimension(PointCloud(2, ((0, 0), (1, 1)))) == 1
    assert affine_dimension(psi_vertices(2)) == 1
    assert affine_dimension(SQUARE) == 2


def test_affine_dimension_of_small_clouds():
    # the six P⊗P are linearly independent; φ3 is the Birkhoff polytope of S3
    assert affine_dimension(psi_vertices(3)) == 5
    assert affine_dimension(phi_vertices(3)) == 4
    half, third = Fraction(1, 2), Fraction(1, 3)
    skew = PointCloud(3, ((0, 0, 0), (half, half, 0), (1, 1, 0), (0, 0, third)))
    assert affine_dimension(skew) == 2
    thirds = PointCloud(2, ((third, 0), (0, third), (Fraction(2, 3), -third)))
    assert affine_dimension(thirds) == 1


def test_is_edge_examples():
    triangle = PointCloud(2, ((0, 0), (1, 0), (0, 1)))
    assert all(is_edge(triangle, u, v) for u, v in combinations(range(3), 2))
    assert not is_edge(SQUARE, 0, 2)
    assert not is_edge(SQUARE, 1, 3)
    assert is_edge(SQUARE, 0, 1)
    assert is_edge(psi_vertices(2), 0, 1)


def test_is_edge_rejects_bad_indices():
    with pytest.raises(InputError):
        is_edge(SQUARE, 0, 4)
    with pytest.raises(InputError):
        is_edge(SQUARE, 1, 1)


def midpoint_in_rest(cloud, u, v):
    """Basic-solution enumeration with sympy: is the midpoint a convex combination of the rest?"""
    rest = [p for k, p in enumerate(cloud.points) if k not in (u, v)]
    target = [(a + b) / 2 for a, b in zip(cloud.points[u], cloud.points[v])]
    system = sympy.Matrix(cloud.dim + 1, len(rest),
                          lambda r, k: sympy.Rational(str(rest[k][r])) if r < cloud.dim else 1)
    rhs = sympy.Matrix([sympy.Rational(str(x)) for x in target] + [1])
    for size in range(1, len(rest) + 1):
        for subset in combinations(range(len(rest)), size):
            sub = system[:, list(subset)]
            if sub.rank() != size:
                continue
            try:
                solution, _ = sub.gauss_jordan_solve(rhs)
            except ValueError:
                continue
            if all(x >= 0 for x in solution):
                return True
    return False


def test_is_edge_agrees_with_basic_solutions(rng):
    checked = 0
    while checked < 40:
        dim = int(rng.integers(1, 4))
        count = int(rng.integers(3, 6))
        raw = {tuple(int(x) for x in rng.integers(0, 2, size=dim)) for _ in range(count)}
        if len(raw) < 3:
            continue
        cloud = PointCloud(dim, tuple(sorted(raw)))
        for u, v in combinations(range(len(cloud)), 2):
            assert is_edge(cloud, u, v) == (not midpoint_in_rest(cloud, u, v))
            assert is_edge(cloud, u, v) == is_edge(cloud, v, u)
        checked += 1


def test_graph_complete_square():
    report = graph_complete(SQUARE)
    assert not report.is_complete_graph
    assert report.non_edges == ((0, 2), (1, 3))
    assert report.pairs_tested == 6 and report.edge_count == 4


def test_graph_complete_phi3():
    report = graph_complete(phi_vertices(3))
    assert report.is_complete_graph
    assert report.pairs_tested == 15


@pytest.mark.slow
def test_graph_complete_phi4():
    report = graph_complete(phi_vertices(4))
    assert report.is_complete_graph
    assert report.pairs_tested == 276


def test_graph_complete_threads_match():
    cloud = psi_vertices(3)
    assert graph_complete(cloud, threads=3) == graph_complete(cloud)


def test_graph_complete_cap():
    with pytest.raises(CapExceededError):
        graph_complete(SQUARE, cap=3)


def test_distance_spectrum():
    assert distance_spectrum(psi_vertices(3)) == [(16, 9), (18, 6)]
    assert distance_spectrum(phi_vertices(3)) == [(4, 9), (6, 6)]
    assert distance_spectrum(PointCloud(2, ((0, 0), (Fraction(1, 2), 1)))) == [(Fraction(5, 4), 1)]
    assert distance_spectrum(SQUARE) == [(1, 4), (2, 2)]


def test_compare_invariants_n3():
    report = compare_invariants(3)
    rows = {row['invariant']: row for row in report.rows}
    assert rows['vertex_count']['psi'] == rows['vertex_count']['phi'] == 6
    assert rows['distance_spectrum']['psi'] == [[16, 9], [18, 6]]
    assert rows['distance_spectrum']['phi'] == [[4, 9], [6, 6]]
    assert rows['distance_multiplicities']['equal']
    assert rows['vertex_graph_edges']['psi'] == rows['vertex_graph_edges']['phi'] == 15
    assert all(row['notion'] for row in report.rows)
    assert not report.degenerate and not report.adjacency_skipped
    assert report.to_frame().loc['vertex_count', 'psi'] == 6


def test_compare_invariants_n2_is_degenerate():
    report = compare_invariants(2)
    rows = {row['invariant']: row for row in report.rows}
    assert report.degenerate
    assert (rows['vertex_count']['psi'], rows['vertex_count']['phi']) == (2, 1)


def test_compare_invariants_skips_adjacency_above_cap(monkeypatch):
    monkeypatch.setitem(DEFAULT_CAPS, 'lab_adjacency_n', 2)
    report = compare_invariants(3)
    assert report.adjacency_skipped
    assert 'vertex_graph_edges' not in {row['invariant'] for row in report.rows}


def test_compare_invariants_cloud_cap(monkeypatch):
    monkeypatch.setenv('ISOPOLY_MAX_N', '2')
    with pytest.raises(CapExceededError):
        compare_invariants(3)
