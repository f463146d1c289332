"""Vertex clouds of ψn and φn, vertex adjacency by exact LP, and side-by-side invariants.

φn is the convex hull of the N×N permutation matrices (N = n(n-1)/2) that vertex
permutations of Kn induce on its edges, taken in lexicographic order.
"""
import logging
import math
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from itertools import combinations
from math import factorial

import numpy as np
import pandas as pd
import sympy
from tqdm import tqdm

from src.errors import InputError, check_cap
from src.exact_lp import feasible_convex_combination
from src.project_config import get_cap
from src.tensor_core import all_permutations, format_rational, perm_matrix, Permutation, vertex_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EdgeIndex:
    """The edges {i,j}, i < j, of Kn in lexicographic order."""

    n: int
    pairs: tuple = field(init=False)
    _positions: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple(combinations(range(self.n), 2))
        object.__setattr__(self, 'pairs', pairs)
        object.__setattr__(self, '_positions', {pair: k for k, pair in enumerate(pairs)})

    @property
    def N(self):
        return len(self.pairs)

    def index_of(self, i, j):
        return self._positions[(min(i, j), max(i, j))]


def induced_perm(sigma):
    """Σ({i,j}) = {σ(i), σ(j)} as a permutation of edge indices."""
    if sigma.n < 2:
        raise InputError(f"induced edge permutations need n >= 2, got {sigma.n}")
    edges = EdgeIndex(sigma.n)
    return Permutation(tuple(edges.index_of(sigma(i), sigma(j)) for i, j in edges.pairs))


def phi_vertex(sigma):
    return perm_matrix(induced_perm(sigma))


@dataclass(frozen=True)
class PointCloud:
    """Distinct rational points of one dimension."""

    dim: int
    points: tuple

    def __post_init__(self):
        points = tuple(tuple(Fraction(x) for x in p) for p in self.points)
        for p in points:
            if len(p) != self.dim:
                raise InputError(f"point of length {len(p)} in a cloud of dimension {self.dim}")
        if len(set(points)) != len(points):
            raise InputError("point cloud holds repeated points")
        object.__setattr__(self, 'points', points)

    def __len__(self):
        return len(self.points)

    def to_json(self):
        return {'dim': self.dim, 'points': [[str(x) for x in p] for p in self.points]}


@dataclass(frozen=True)
class AdjacencyReport:
    vertex_count: int
    pairs_tested: int
    non_edges: tuple

    @property
    def is_complete_graph(self):
        return not self.non_edges

    @property
    def edge_count(self):
        return self.pairs_tested - len(self.non_edges)

    def to_json(self):
        return {'vertex_count': self.vertex_count, 'pairs_tested': self.pairs_tested,
                'edge_count': self.edge_count, 'non_edges': [list(p) for p in self.non_edges],
                'is_complete_graph': self.is_complete_graph}


def psi_vertices(n, cap=None):
    check_cap('psi_vertices', n, cap if cap is not None else get_cap('cloud'))
    points = [vertex_point(sigma, sigma) for sigma in all_permutations(n)]
    return PointCloud(n ** 4, tuple(points))


def phi_vertices(n, cap=None):
    """Flattened φn vertices in lexicographic σ order, repeated matrices dropped (only n = 2 repeats)."""
    if n < 2:
        raise InputError(f"φn needs n >= 2, got {n}")
    check_cap('phi_vertices', n, cap if cap is not None else get_cap('cloud'))
    N = n * (n - 1) // 2
    seen = {}
    for sigma in all_permutations(n):
        point = tuple(phi_vertex(sigma).entries.flat)
        seen.setdefault(point, None)
    if len(seen) < factorial(n):
        logger.warning(f"φ{n} is degenerate: {factorial(n)} permutations give {len(seen)} distinct vertices")
    return PointCloud(N * N, tuple(seen))


def affine_dimension(cloud):
    """Exact rank of {p - p0}, with constant coordinates dropped first."""
    if not len(cloud):
        raise InputError("affine dimension of an empty cloud")
    base = cloud.points[0]
    varying = [d for d in range(cloud.dim) if any(p[d] != base[d] for p in cloud.points)]
    if not varying:
        return 0
    diffs = ([p[d] - base[d] for d in varying] for p in cloud.points[1:])
    rows = [[sympy.Rational(x.numerator, x.denominator) for x in diff] for diff in diffs]
    return int(sympy.Matrix(rows).rank())


def is_edge(cloud, u, v):
    """[p_u, p_v] is an edge of the hull iff its midpoint is not a convex combination of the rest."""
    k = len(cloud)
    for idx in (u, v):
        if not 0 <= idx < k:
            raise InputError(f"vertex index {idx} out of range for a cloud of {k} points")
    if u == v:
        raise InputError(f"is_edge needs two distinct vertices, got {u} twice")
    p, q = cloud.points[u], cloud.points[v]
    midpoint = [(a + b) / 2 for a, b in zip(p, q)]
    rest = [point for idx, point in enumerate(cloud.points) if idx not in (u, v)]
    return feasible_convex_combination(rest, midpoint) is None


def _edge_test(cloud, pair):
    return pair, is_edge(cloud, *pair)


def graph_complete(cloud, cap=None, threads=1):
    """Runs is_edge over every unordered pair, in lexicographic pair order."""
    check_cap('graph_complete', len(cloud), cap if cap is not None else get_cap('adjacency_points'))
    pairs = list(combinations(range(len(cloud)), 2))
    test = partial(_edge_test, cloud)
    progress = dict(total=len(pairs), desc='adjacency', disable=not sys.stderr.isatty())
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(tqdm(pool.map(test, pairs), **progress))
    else:
        results = [test(pair) for pair in tqdm(pairs, **progress)]

    non_edges = tuple(pair for pair, adjacent in results if not adjacent)
    logger.info(f"Adjacency over {len(cloud)} vertices: {len(pairs)} pairs, {len(non_edges)} non-edges")
    return AdjacencyReport(len(cloud), len(pairs), non_edges)


def distance_spectrum(cloud):
    """Sorted (squared distance, multiplicity) pairs over unordered point pairs."""
    if len(cloud) < 2:
        return []
    den = math.lcm(*(x.denominator for p in cloud.points for x in p))
    ints = [[int(x * den) for x in p] for p in cloud.points]
    dtype = np.int64 if max((abs(x) for p in ints for x in p), default=0) < 2 ** 20 else object
    X = np.array(ints, dtype=dtype).reshape(len(cloud), cloud.dim)
    norms = (X * X).sum(axis=1)
    D = norms[:, None] + norms[None, :] - 2 * (X @ X.T)
    iu = np.triu_indices(len(cloud), k=1)
    counts = Counter(int(x) for x in D[iu])
    scale = den ** 2
    return sorted((Fraction(value, scale), mult) for value, mult in counts.items())


@dataclass(frozen=True)
class InvariantReport:
    """Invariants of ψn and φn side by side. Evidence only; no isomorphism is claimed either way."""

    n: int
    rows: tuple
    degenerate: bool
    adjacency_skipped: bool

    def to_json(self):
        return {'n': self.n, 'degenerate': self.degenerate, 'adjacency_skipped': self.adjacency_skipped,
                'invariants': [dict(row) for row in self.rows]}

    def to_frame(self):
        return invariant_frame(self.to_json()['invariants'])


def invariant_frame(rows):
    """One row per invariant, psi and phi side by side."""
    frame = pd.DataFrame(list(rows), columns=['invariant', 'psi', 'phi', 'equal', 'notion'])
    return frame.set_index('invariant')


def _spectrum_json(spectrum):
    return [[format_rational(value), mult] for value, mult in spectrum]


def compare_invariants(n, cap=None, threads=1):
    """Vertex count, dimensions, distance spectra and vertex-graph edges of ψn next to φn.

    Each row names the notion of isomorphism it constrains: combinatorial (face lattice),
    congruence (Euclidean), or similarity (congruence up to scale).
    """
    psi = psi_vertices(n, cap=cap)
    phi = phi_vertices(n, cap=cap)
    logger.info(f"Comparing invariants of psi_{n} and phi_{n}")

    psi_spec, phi_spec = distance_spectrum(psi), distance_spectrum(phi)
    rows = [
        {'invariant': 'vertex_count', 'notion': 'combinatorial', 'psi': len(psi), 'phi': len(phi)},
        {'invariant': 'ambient_dimension', 'notion': 'none', 'psi': psi.dim, 'phi': phi.dim},
        {'invariant': 'affine_dimension', 'notion': 'combinatorial',
         'psi': affine_dimension(psi), 'phi': affine_dimension(phi)},
        {'invariant': 'distance_spectrum', 'notion': 'congruence',
         'psi': _spectrum_json(psi_spec), 'phi': _spectrum_json(phi_spec)},
        {'invariant': 'distance_multiplicities', 'notion': 'similarity',
         'psi': [mult for _, mult in psi_spec], 'phi': [mult for _, mult in phi_spec]},
    ]

    adjacency_skipped = n > get_cap('lab_adjacency_n')
    if adjacency_skipped:
        logger.info(f"Skipping vertex-graph comparison for n={n} (cap {get_cap('lab_adjacency_n')})")
    else:
        psi_graph = graph_complete(psi, threads=threads)
        phi_graph = graph_complete(phi, threads=threads)
        rows.append({'invariant': 'vertex_graph_edges', 'notion': 'combinatorial',
                     'psi': psi_graph.edge_count, 'phi': phi_graph.edge_count})

    for row in rows:
        row['equal'] = row['psi'] == row['phi']
    degenerate = n <= 2
    if degenerate:
        logger.warning(f"n={n} is degenerate: psi_{n} has {len(psi)} vertices, phi_{n} has {len(phi)}")
    return InvariantReport(n, tuple(rows), degenerate, adjacency_skipped)
