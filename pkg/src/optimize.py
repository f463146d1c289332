"""Exact linear optimization over the vertex sets of ψn (the tensors P⊗P) and ψn,n (all P⊗Q).

Over ψn the problem is a quadratic assignment problem; over ψn,n it splits into an
outer enumeration of σ and an inner linear assignment for π. Both work on the
integer form of the objective (coeff = K / d), so every comparison is exact and fast.

Enumeration is always cut into partitions by the first image σ(0). Each partition is
solved with its own incumbent and the partial results are merged by (value, then
lexicographically smallest witness), so a threaded run returns exactly what a
sequential run returns, node counts included.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial, reduce
from itertools import permutations

import numpy as np
from more_itertools import chunked

from src.errors import InputError, IsopolyError, check_cap
from src.project_config import get_cap
from src.tensor_core import Matrix, Permutation, check_same_n

logger = logging.getLogger(__name__)

METHODS = ('exhaustive', 'branch_and_bound')
CAP_BY_METHOD = {'exhaustive': 'psi_n_exhaustive', 'branch_and_bound': 'psi_n_branch_and_bound'}

# Permutations scored per numpy call in the exhaustive ψn scan
CHUNK = 5040


@dataclass(frozen=True)
class OptResult:
    """Optimum over a vertex set: (σ,) witnesses ψn, (σ, π) witnesses ψn,n."""

    value: Fraction
    witness: tuple
    nodes_explored: int
    method: str

    @property
    def sigma(self):
        return self.witness[0]

    @property
    def pi(self):
        return self.witness[-1]

    def to_json(self):
        if len(self.witness) == 1:
            witness = self.witness[0].one_based()
        else:
            witness = [p.one_based() for p in self.witness]
        return {'value': str(self.value), 'witness': witness,
                'nodes': self.nodes_explored, 'method': self.method}


# --- linear assignment --------------------------------------------------------------------

def _hungarian_min(cost):
    """Minimum-cost perfect assignment of a square matrix; returns (total, row -> column)."""
    n = len(cost)
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row matched to column j, 1-based, 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [None] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta, j1 = None, -1
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if minv[j] is None or cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if delta is None or minv[j] < delta:
                    delta, j1 = minv[j], j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[p[j] - 1] = j - 1
    return sum(cost[r][assignment[r]] for r in range(n)), assignment


def _lap_value(rows):
    if not rows:
        return 0
    total, _ = _hungarian_min([[-x for x in row] for row in rows])
    return -total


def _lap_lex(rows):
    """Maximum assignment value and the lexicographically smallest optimal image."""
    n = len(rows)
    target = _lap_value(rows)
    image, free, acc = [], list(range(n)), 0
    for s in range(n):
        for t in free:
            rest_cols = [c for c in free if c != t]
            rest = [[rows[r][c] for c in rest_cols] for r in range(s + 1, n)]
            if acc + rows[s][t] + _lap_value(rest) == target:
                image.append(t)
                acc += rows[s][t]
                free = rest_cols
                break
    return target, tuple(image)


def lap_max(C):
    """Exact maximum-weight assignment: max over π of Σ C[s][π(s)], lexicographically smallest π."""
    value, image = _lap_lex(C.entries.tolist())
    return Fraction(value), Permutation(image)


def q_coefficients(W, sigma):
    """c[s][t] = Σ_i coeff[i][σ(i)][s][t], so that Σ_s c[s][π(s)] = <W, P⊗Q>."""
    check_same_n(W.n, sigma.n)
    return Matrix._trusted(W.coeff[np.arange(W.n), sigma.as_array()].sum(axis=0))


# --- partition plumbing -------------------------------------------------------------------

def _merge(a, b):
    """Associative merge of (value, witness images, nodes) partials."""
    best = a if (a[0] > b[0] or (a[0] == b[0] and a[1] <= b[1])) else b
    return best[0], best[1], a[2] + b[2]


def _run_partitions(solve_one, n, threads):
    if threads < 1:
        raise InputError(f"threads must be >= 1, got {threads}")
    if threads > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(solve_one, range(n)))
    else:
        parts = [solve_one(first) for first in range(n)]
    return reduce(_merge, parts)


# --- ψn -----------------------------------------------------------------------------------

def _psi_exhaustive_part(K, n, first):
    idx = np.arange(n)
    rest = [x for x in range(n) if x != first]
    best_value, best_image, nodes = None, None, 0
    for chunk in chunked(permutations(rest), CHUNK):
        perms = np.array([(first,) + tail for tail in chunk], dtype=np.intp).reshape(len(chunk), n)
        values = K[idx[None, :, None], perms[:, :, None], idx[None, None, :], perms[:, None, :]].sum(axis=(1, 2))
        k = int(np.argmax(values))
        nodes += len(chunk)
        if best_value is None or values[k] > best_value:
            best_value, best_image = int(values[k]), tuple(int(x) for x in perms[k])
    logger.debug(f"psi exhaustive partition σ(0)={first}: best {best_value} over {nodes} permutations")
    return best_value, (best_image,), nodes


def _psi_rest_bound(K, n, prefix, free):
    """Upper bound on the pairs not yet fixed by the prefix, each maximized over feasible images."""
    k = len(prefix)
    A = np.arange(k)
    sig = np.array(prefix, dtype=np.intp)
    U = np.arange(k, n)
    F = np.array(free, dtype=np.intp)
    assigned_row = K[A[:, None, None], sig[:, None, None], U[None, :, None], F[None, None, :]].max(axis=2).sum()
    assigned_col = K[U[:, None, None], F[None, None, :], A[None, :, None], sig[None, :, None]].max(axis=2).sum()
    both_free = K[np.ix_(U, F, U, F)].max(axis=(1, 3))
    same_row = K[U[:, None], F[None, :], U[:, None], F[None, :]].max(axis=1)
    return assigned_row + assigned_col + both_free.sum() - np.trace(both_free) + same_row.sum()


def _psi_bnb_part(K, n, first):
    best = [None, None]
    nodes = [0]
    prefix = [first]

    def visit(value):
        nodes[0] += 1
        k = len(prefix)
        if k == n:
            if best[0] is None or value > best[0]:
                best[0], best[1] = int(value), tuple(prefix)
            return
        free = [x for x in range(n) if x not in prefix]
        if best[0] is not None and value + _psi_rest_bound(K, n, prefix, free) < best[0]:
            return
        A = np.arange(k)
        sig = np.array(prefix, dtype=np.intp)
        for j in free:
            gain = K[k, j, k, j] + K[A, sig, k, j].sum() + K[k, j, A, sig].sum()
            prefix.append(j)
            visit(value + gain)
            prefix.pop()

    visit(K[0, first, 0, first])
    logger.debug(f"psi branch-and-bound partition σ(0)={first}: best {best[0]}, {nodes[0]} nodes")
    return best[0], (best[1],), nodes[0]


def psi_n_max(W, method='exhaustive', cap=None, threads=1):
    """max over σ of <W, P⊗P>, with the lexicographically smallest optimal σ."""
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}, expected one of {', '.join(METHODS)}")
    n = W.n
    check_cap(f"psi_n_max[{method}]", n, cap if cap is not None else get_cap(CAP_BY_METHOD[method]))
    K, den = W.integer_form()
    part = _psi_exhaustive_part if method == 'exhaustive' else _psi_bnb_part

    logger.info(f"Optimizing over psi_{n} ({method}, threads={threads})")
    value, witness, nodes = _run_partitions(partial(part, K, n), n, threads)
    result = OptResult(Fraction(int(value), den), (Permutation(witness[0]),), nodes, method)
    logger.info(f"psi_{n} optimum {result.value} at {result.sigma.one_based()} after {nodes} nodes")
    return result


# --- ψn,n ---------------------------------------------------------------------------------

def _q_rows(K, sigma_image):
    n = len(sigma_image)
    return K[np.arange(n), np.array(sigma_image, dtype=np.intp)].sum(axis=0).tolist()


def _psinn_exhaustive_part(K, n, first):
    rest = [x for x in range(n) if x != first]
    best_value, best_image, nodes = None, None, 0
    for tail in permutations(rest):
        image = (first,) + tail
        value = _lap_value(_q_rows(K, image))
        nodes += 1
        if best_value is None or value > best_value:
            best_value, best_image = value, image
    return best_value, (best_image,), nodes


def _psinn_bnb_part(K, n, first):
    best = [None, None]
    nodes = [0]
    prefix = [first]

    def visit():
        nodes[0] += 1
        k = len(prefix)
        if k == n:
            value = _lap_value(_q_rows(K, prefix))
            if best[0] is None or value > best[0]:
                best[0], best[1] = value, tuple(prefix)
            return
        free = [x for x in range(n) if x not in prefix]
        if best[0] is not None:
            fixed = K[np.arange(k), np.array(prefix, dtype=np.intp)].sum(axis=0)
            loose = K[np.ix_(np.arange(k, n), np.array(free, dtype=np.intp))].max(axis=1).sum(axis=0)
            # entrywise over-approximation of every completion's q-matrix
            if _lap_value((fixed + loose).tolist()) < best[0]:
                return
        for j in free:
            prefix.append(j)
            visit()
            prefix.pop()

    visit()
    logger.debug(f"psinn branch-and-bound partition σ(0)={first}: best {best[0]}, {nodes[0]} nodes")
    return best[0], (best[1],), nodes[0]


def psi_nn_max(W, method='exhaustive', cap=None, threads=1):
    """max over (σ, π) of <W, P⊗Q>: smallest optimal σ, then the smallest optimal π for it."""
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}, expected one of {', '.join(METHODS)}")
    n = W.n
    check_cap(f"psi_nn_max[{method}]", n, cap if cap is not None else get_cap('psi_nn'))
    K, den = W.integer_form()
    part = _psinn_exhaustive_part if method == 'exhaustive' else _psinn_bnb_part

    logger.info(f"Optimizing over psi_{n},{n} ({method}, threads={threads})")
    value, witness, nodes = _run_partitions(partial(part, K, n), n, threads)
    sigma_image = witness[0]
    lap_value, pi_image = _lap_lex(_q_rows(K, sigma_image))
    if lap_value != value:
        raise IsopolyError(f"inner assignment for sigma={sigma_image} gives {lap_value}, search found {value}")
    result = OptResult(Fraction(int(value), den), (Permutation(sigma_image), Permutation(pi_image)), nodes, method)
    logger.info(f"psi_{n},{n} optimum {result.value} at {result.sigma.one_based()} x {result.pi.one_based()}")
    return result
