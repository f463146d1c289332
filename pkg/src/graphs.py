"""Simple undirected graphs: ingestion (graph6, edge lists), adjacency matrices, relabeling,
and a backtracking subgraph-isomorphism oracle independent of the polytope route.

"Subgraph" here is edgewise containment under a relabeling of all n vertices, not induced.
"""
import logging
import os
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx
import numpy as np
from networkx.readwrite.graph6 import data_to_n

from src.errors import DimensionMismatchError, GraphParseError, InputError, check_cap
from src.project_config import get_cap
from src.tensor_core import ONE, ZERO, Matrix, Permutation

logger = logging.getLogger(__name__)

GRAPH6_HEADER = '>>graph6<<'
BUILTIN_KINDS = ('complete', 'path', 'cycle', 'empty')
FORMAT_BY_EXTENSION = {'.g6': 'graph6', '.el': 'edgelist'}


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 0:
            raise InputError(f"vertex count must be a non-negative integer, got {self.n!r}")
        canonical = set()
        for edge in self.edges:
            u, v = (int(x) for x in edge)
            if u == v:
                raise InputError(f"loop at vertex {u} is not allowed in a simple graph")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge {{{u},{v}}} out of range for n={self.n}")
            canonical.add((min(u, v), max(u, v)))
        object.__setattr__(self, 'edges', frozenset(canonical))

    @property
    def m(self):
        return len(self.edges)

    def sorted_edges(self):
        return sorted(self.edges)

    def adjacency_sets(self):
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class IsoWitness:
    sigma: Permutation
    mapped_edges: int


# --- graph6 -------------------------------------------------------------------------------

def to_networkx(G):
    nxg = nx.Graph()
    nxg.add_nodes_from(range(G.n))
    nxg.add_edges_from(G.edges)
    return nxg


def _graph6_body(text, start):
    """The bytes after the header, each in 63..126; the offset of the first bad one is reported."""
    for offset in range(start, len(text)):
        if not 63 <= ord(text[offset]) <= 126:
            raise GraphParseError(f"out-of-range byte {text[offset]!r}", offset=offset)
    return text[start:].encode('ascii')


def parse_graph6(text):
    """Decodes one graph6 string (standard encoding, optional >>graph6<< header)."""
    text = text.rstrip('\r\n')
    if not text:
        raise GraphParseError("empty graph6 string", offset=0)
    start = len(GRAPH6_HEADER) if text.startswith(GRAPH6_HEADER) else 0
    body = _graph6_body(text, start)
    if not body:
        raise GraphParseError("missing size header", offset=start)
    try:
        n, bit_field = data_to_n([c - 63 for c in body])
    except IndexError:
        raise GraphParseError("truncated size header", offset=len(text))
    if n < 1:
        raise GraphParseError(f"vertex count must be >= 1, got {n}", offset=start)

    n_bytes = (n * (n - 1) // 2 + 5) // 6
    if len(bit_field) < n_bytes:
        raise GraphParseError(f"truncated bit field: need {n_bytes} bytes for n={n}", offset=len(text))
    if len(bit_field) > n_bytes:
        raise GraphParseError("trailing data after bit field", offset=len(text) - len(bit_field) + n_bytes)
    return Graph(n, frozenset(nx.from_graph6_bytes(body).edges()))


def emit_graph6(G):
    """Canonical graph6 encoding, no header."""
    return nx.to_graph6_bytes(to_networkx(G), header=False).decode('ascii').strip()


# --- edge lists ---------------------------------------------------------------------------

def _parse_int(token, line_no, what):
    try:
        return int(token)
    except ValueError:
        raise GraphParseError(f"bad token {token!r} for {what}", line=line_no)


def parse_edge_list(text):
    """Reads "n <count>" then one "u v" pair per line, 1-based. Duplicate edges collapse."""
    n = None
    edges = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        tokens = line.split()
        if n is None:
            if len(tokens) != 2 or tokens[0] != 'n':
                raise GraphParseError("expected header 'n <count>'", line=line_no)
            n = _parse_int(tokens[1], line_no, 'vertex count')
            if n < 1:
                raise GraphParseError(f"vertex count must be >= 1, got {n}", line=line_no)
            continue
        if len(tokens) != 2:
            raise GraphParseError(f"expected two vertices, got {len(tokens)} tokens", line=line_no)
        u = _parse_int(tokens[0], line_no, 'vertex')
        v = _parse_int(tokens[1], line_no, 'vertex')
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphParseError("vertex out of range", line=line_no)
        if u == v:
            raise GraphParseError(f"loop at vertex {u}", line=line_no)
        edges.add((min(u, v) - 1, max(u, v) - 1))
    if n is None:
        raise GraphParseError("missing header 'n <count>'", line=1)
    return Graph(n, frozenset(edges))


def emit_edge_list(G):
    lines = [f"n {G.n}"] + [f"{u + 1} {v + 1}" for u, v in G.sorted_edges()]
    return '\n'.join(lines) + '\n'


def load_graph(path, fmt=None):
    """Reads a graph file; the format comes from fmt or else from the .g6 / .el extension."""
    if fmt is None:
        ext = os.path.splitext(path)[1].lower()
        fmt = FORMAT_BY_EXTENSION.get(ext)
        if fmt is None:
            raise InputError(f"cannot detect graph format of {path}; use a .g6/.el extension or pass the format")
    try:
        with open(path, 'r', encoding='ascii') as file:
            text = file.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}")

    logger.info(f"Loading {fmt} graph from {path}")
    if fmt == 'graph6':
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise GraphParseError(f"{path}: empty graph6 file", offset=0)
        if len(lines) > 1:
            logger.warning(f"{path} holds {len(lines)} graphs; using the first")
        return parse_graph6(lines[0])
    if fmt == 'edgelist':
        return parse_edge_list(text)
    raise InputError(f"unknown graph format {fmt!r}")


# --- constructions ------------------------------------------------------------------------

def builtin_graph(kind, n):
    if n < 1:
        raise InputError(f"builtin graphs need n >= 1, got {n}")
    if kind == 'complete':
        edges = combinations(range(n), 2)
    elif kind == 'path':
        edges = ((i, i + 1) for i in range(n - 1))
    elif kind == 'cycle':
        if n < 3:
            raise InputError(f"a cycle needs n >= 3, got {n}")
        edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    elif kind == 'empty':
        edges = ()
    else:
        raise InputError(f"unknown graph kind {kind!r}, expected one of {', '.join(BUILTIN_KINDS)}")
    return Graph(n, frozenset(edges))


def random_graph(n, rng, p=0.5):
    """Each pair {i,j}, taken in lexicographic order, is an edge with probability p."""
    pairs = list(combinations(range(n), 2))
    draws = rng.random(len(pairs))
    return Graph(n, frozenset(pair for pair, x in zip(pairs, draws) if x < p))


def adjacency_matrix(G):
    arr = np.full((G.n, G.n), ZERO, dtype=object)
    for u, v in G.edges:
        arr[u, v] = ONE
        arr[v, u] = ONE
    return Matrix._trusted(arr)


def permute_graph(sigma, H):
    """The graph whose adjacency matrix is P·A_H·Pᵀ: H-edge {a,b} becomes {σ⁻¹(a), σ⁻¹(b)}."""
    if sigma.n != H.n:
        raise DimensionMismatchError(f"permutation on {sigma.n} points applied to a graph on {H.n} vertices")
    inv = sigma.inverse()
    return Graph(H.n, frozenset((inv(a), inv(b)) for a, b in H.edges))


def pad_graph(G, n):
    if n < G.n:
        raise InputError(f"cannot pad a graph on {G.n} vertices down to {n}")
    return Graph(n, G.edges)


def count_mapped_edges(G, H, sigma):
    """Number of edges of permute_graph(σ, H) that are edges of G."""
    return len(permute_graph(sigma, H).edges & G.edges)


def subgraph_iso_oracle(G, H, cap=None):
    """Finds σ with permute_graph(σ, H) ⊆ G edgewise, or returns None.

    Backtracks over images of H-vertices in order of decreasing degree, skipping
    G-vertices of smaller degree and any image that breaks an already placed H-edge.
    """
    if G.n != H.n:
        raise DimensionMismatchError(f"G has {G.n} vertices, H has {H.n}; pad H first")
    check_cap('subgraph_iso_oracle', G.n, cap if cap is not None else get_cap('oracle'))
    n = G.n
    adj_g, adj_h = G.adjacency_sets(), H.adjacency_sets()
    deg_g, deg_h = [len(a) for a in adj_g], [len(a) for a in adj_h]
    order = sorted(range(n), key=lambda h: (-deg_h[h], h))

    image = [-1] * n  # H-vertex -> G-vertex
    used = [False] * n

    def extend(k):
        if k == n:
            return True
        h = order[k]
        for g in range(n):
            if used[g] or deg_g[g] < deg_h[h]:
                continue
            if all(image[h2] in adj_g[g] for h2 in adj_h[h] if image[h2] >= 0):
                image[h], used[g] = g, True
                if extend(k + 1):
                    return True
                image[h], used[g] = -1, False
        return False

    if not extend(0):
        logger.debug(f"No embedding of H (m={H.m}) into G (m={G.m})")
        return None
    sigma = Permutation(tuple(image)).inverse()
    return IsoWitness(sigma, count_mapped_edges(G, H, sigma))
