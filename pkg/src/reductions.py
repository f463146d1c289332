"""Executable forms of the face, subgraph-decision and lift identities.

Every decision here is checked against an independent route: the ψn optimum, the
ψn,n optimum of the lifted objective, and the backtracking oracle in graphs.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np
from more_itertools import chunked

from src.errors import DimensionMismatchError, InputError, check_cap
from src.graphs import adjacency_matrix, pad_graph, subgraph_iso_oracle
from src.optimize import psi_n_max, psi_nn_max
from src.project_config import get_cap
from src.tensor_core import (ObjectiveTensor, Permutation, format_rational, identity_objective,
                             objective_from_pair)

logger = logging.getLogger(__name__)

DECISION_METHODS = ('psi', 'psinn', 'oracle')
LIFT_MODES = ('general', 'nonnegative')

CHUNK = 5040


@dataclass(frozen=True)
class FaceReport:
    n: int
    pairs_checked: int
    diagonal_pairs: int
    offdiagonal_pairs: int
    max_offdiagonal: int
    min_diagonal: int
    holds: bool

    def to_json(self):
        return {'n': self.n, 'pairs_checked': self.pairs_checked, 'diagonal_pairs': self.diagonal_pairs,
                'offdiagonal_pairs': self.offdiagonal_pairs, 'max_offdiagonal': self.max_offdiagonal,
                'min_diagonal': self.min_diagonal, 'holds': self.holds}


@dataclass(frozen=True)
class LiftSpec:
    W: ObjectiveTensor
    w: Fraction
    shift: Fraction
    lifted: ObjectiveTensor
    mode: str

    def to_json(self):
        return {'n': self.W.n, 'mode': self.mode, 'w': format_rational(self.w),
                'shift': format_rational(self.shift)}


@dataclass(frozen=True)
class LiftCheck:
    """Both sides of the lift identity for one objective."""

    spec: LiftSpec
    left: Fraction
    right: Fraction

    @property
    def holds(self):
        return self.left == self.right

    def to_json(self):
        return dict(self.spec.to_json(), left=format_rational(self.left),
                    right=format_rational(self.right), holds=self.holds)


@dataclass(frozen=True)
class Decision:
    value: Fraction
    threshold: Fraction
    is_yes: bool
    witness: Permutation
    method: str

    def to_json(self):
        return {
            'method': self.method,
            'value': None if self.value is None else format_rational(self.value),
            'threshold': format_rational(self.threshold),
            'is_yes': self.is_yes,
            'witness': None if self.witness is None else self.witness.one_based(),
        }


# --- faces ----------------------------------------------------------------------------------

def verify_face(n, cap=None):
    """Checks that <I⊗I, P⊗Q> (the agreement count) is n on the diagonal and at most n-1 off it."""
    if n < 1:
        raise InputError(f"verify_face needs n >= 1, got {n}")
    check_cap('verify_face', n, cap if cap is not None else get_cap('face'))
    perms = np.array(list(permutations(range(n))), dtype=np.intp)
    count = len(perms)

    max_off, min_diag = 0, n
    for k, row in enumerate(perms):
        agree = (perms == row).sum(axis=1)
        min_diag = min(min_diag, int(agree[k]))
        agree[k] = -1
        max_off = max(max_off, int(agree.max()))

    holds = min_diag == n and max_off <= n - 1
    report = FaceReport(n, count * count, count, count * count - count, max_off, min_diag, holds)
    if holds:
        logger.info(f"Face check n={n}: {report.pairs_checked} pairs, max off-diagonal agreement {max_off}")
    else:
        logger.warning(f"Face check n={n} FAILED: min diagonal {min_diag}, max off-diagonal {max_off}")
    return report


# --- lifts ----------------------------------------------------------------------------------

def lift_objective(W, mode='general'):
    """W + w·I⊗I with w = 2n²·max|W| (general) or n²·max W (nonnegative W)."""
    n = W.n
    if mode == 'general':
        w = 2 * n * n * W.max_abs()
    elif mode == 'nonnegative':
        if W.min_coeff() < 0:
            raise InputError(f"nonnegative lift needs W >= 0, found coefficient {W.min_coeff()}")
        w = n * n * W.max_coeff()
    else:
        raise InputError(f"unknown lift mode {mode!r}, expected one of {', '.join(LIFT_MODES)}")
    w = Fraction(w)
    lifted = W + identity_objective(n).scale(w)
    return LiftSpec(W, w, n * w, lifted, mode)


def verify_lift(W, mode='general', method='exhaustive', cap=None, threads=1):
    """max over ψn of W against max over ψn,n of the lifted objective, minus n·w."""
    check_cap('verify_lift', W.n, cap if cap is not None else get_cap('psi_nn'))
    spec = lift_objective(W, mode)
    left = psi_n_max(W, method=method, threads=threads).value
    right = psi_nn_max(spec.lifted, method=method, cap=cap, threads=threads).value - spec.shift
    check = LiftCheck(spec, left, right)
    if not check.holds:
        logger.warning(f"Lift identity violated (n={W.n}, {mode}): {left} != {right}")
    return check


def minimal_lift_weight(W, cap=None):
    """Smallest w for which the lift identity holds: the max over σ≠π of (<W,P⊗Q> - L)/(n - agreement).

    Returns None for n = 1, where every w works.
    """
    n = W.n
    check_cap('minimal_lift_weight', n, cap if cap is not None else get_cap('psi_nn'))
    if n == 1:
        return None
    K, den = W.integer_form()
    left = psi_n_max(W).value * den
    perms = np.array(list(permutations(range(n))), dtype=np.intp)
    rows = np.arange(n)

    best = None
    for sigma in perms:
        c = K[rows, sigma].sum(axis=0)
        values = c[rows, perms].sum(axis=1)
        agree = (perms == sigma).sum(axis=1)
        for a in range(n - 1):
            mask = agree == a
            if not mask.any():
                continue
            ratio = Fraction(int(values[mask].max()) - int(left), n - a)
            if best is None or ratio > best:
                best = ratio
    return best / den


# --- subgraph decisions ---------------------------------------------------------------------

def _align(G, H, pad):
    if G.n == H.n:
        return G, H
    if pad and H.n < G.n:
        logger.info(f"Padding H from {H.n} to {G.n} vertices")
        return G, pad_graph(H, G.n)
    if H.n > G.n:
        raise DimensionMismatchError(f"H has {H.n} vertices but G only {G.n}; no embedding is possible")
    raise DimensionMismatchError(f"G has {G.n} vertices, H has {H.n}; pass --pad to pad H")


def decide_subgraph_psi(G, H, cap=None):
    """max over σ of <A_G, P·A_H·Pᵀ> against 2m, scanning σ in lexicographic order.

    The first σ reaching 2m is the smallest optimal one, so the scan stops there.
    """
    if G.n != H.n:
        raise DimensionMismatchError(f"G has {G.n} vertices, H has {H.n}; pad H first")
    n = G.n
    check_cap('decide_subgraph_psi', n, cap if cap is not None else get_cap('psi_n_exhaustive'))
    A = np.array([[int(x) for x in row] for row in adjacency_matrix(G).entries], dtype=np.int64).reshape(n, n)
    B = np.array([[int(x) for x in row] for row in adjacency_matrix(H).entries], dtype=np.int64).reshape(n, n)
    threshold = 2 * H.m

    best, best_image = None, None
    for chunk in chunked(permutations(range(n)), CHUNK):
        perms = np.array(chunk, dtype=np.intp).reshape(len(chunk), n)
        # <P·B·Pᵀ, A> for every σ in the chunk
        values = (B[perms[:, :, None], perms[:, None, :]] * A).sum(axis=(1, 2))
        k = int(np.argmax(values))
        if best is None or values[k] > best:
            best, best_image = int(values[k]), tuple(int(x) for x in perms[k])
        if best == threshold:
            break

    is_yes = best == threshold
    witness = Permutation(best_image) if is_yes else None
    return Decision(Fraction(best), Fraction(threshold), is_yes, witness, 'psi')


def decide_subgraph_psinn(G, H, method='exhaustive', cap=None, threads=1):
    """max over ψn,n of A_G⊗A_H + n²·I⊗I against 2m + n³."""
    if G.n != H.n:
        raise DimensionMismatchError(f"G has {G.n} vertices, H has {H.n}; pad H first")
    n = G.n
    W = objective_from_pair(adjacency_matrix(G), adjacency_matrix(H)) + identity_objective(n).scale(n * n)
    result = psi_nn_max(W, method=method, cap=cap, threads=threads)
    threshold = Fraction(2 * H.m + n ** 3)
    is_yes = result.value == threshold
    witness = result.sigma if is_yes else None
    return Decision(result.value, threshold, is_yes, witness, 'psinn')


def decide_subgraph_oracle(G, H, cap=None):
    found = subgraph_iso_oracle(G, H, cap=cap)
    threshold = Fraction(2 * H.m)
    if found is None:
        return Decision(None, threshold, False, None, 'oracle')
    return Decision(threshold, threshold, True, found.sigma, 'oracle')


def decide_subgraph(G, H, method='psi', pad=False, threads=1):
    """Entry point shared by the CLI: aligns sizes, then runs one decision method."""
    if method not in DECISION_METHODS:
        raise InputError(f"unknown method {method!r}, expected one of {', '.join(DECISION_METHODS)}")
    G, H = _align(G, H, pad)
    logger.info(f"Deciding H (n={H.n}, m={H.m}) in G (m={G.m}) via {method}")
    if method == 'psi':
        return decide_subgraph_psi(G, H)
    if method == 'psinn':
        return decide_subgraph_psinn(G, H, threads=threads)
    return decide_subgraph_oracle(G, H)
