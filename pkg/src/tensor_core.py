"""Exact permutations, matrices and 4-index objective tensors.

Every objective tensor is stored in one convention: ``coeff[i][j][s][t]`` is the
coefficient of ``P[i][j] * Q[s][t]`` when the tensor is paired with the vertex
``P (x) Q``. The shuffled index order of the bilinear form on tensors is applied
once, in :func:`objective_from_pair`; after that every pairing is a plain
contraction.

Scalars are :class:`fractions.Fraction` throughout. Indices are 0-based; JSON
and text output switch to 1-based at the boundary.
"""
import json
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from src.errors import DimensionMismatchError, InputError, TensorFormatError

logger = logging.getLogger(__name__)


ZERO = Fraction(0)
ONE = Fraction(1)

_RATIONAL_TEXT = re.compile(r'^[+-]?\d+(/\d+)?$')


def to_rational(value):
    """Converts an int, a Fraction or a "p/q" string to a Fraction. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TensorFormatError(f"booleans are not rationals: {value!r}")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_TEXT.match(text):
            raise TensorFormatError(f"bad rational {value!r}, expected an integer or 'p/q'")
        try:
            result = Fraction(text)
        except ZeroDivisionError:
            raise TensorFormatError(f"zero denominator in {value!r}")
        if '/' in text and int(text.split('/')[1]) != result.denominator:
            raise TensorFormatError(f"{value!r} is not in lowest terms, expected {format_rational(result)!r}")
        return result
    raise TensorFormatError(f"bad rational {value!r} of type {type(value).__name__}")


def format_rational(value):
    """JSON form of a rational: an int when integral, otherwise "p/q" in lowest terms."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def _rational_array(data, ndim, what):
    try:
        arr = np.array(data, dtype=object)
    except ValueError as e:
        raise InputError(f"{what}: ragged nesting ({e})")
    if arr.ndim != ndim or len(set(arr.shape)) > 1:
        raise DimensionMismatchError(f"{what}: expected {ndim} equal axes, got shape {arr.shape}")
    out = np.empty(arr.shape, dtype=object)
    for idx, value in np.ndenumerate(arr):
        out[idx] = to_rational(value)
    out.flags.writeable = False
    return out


def _frozen(arr):
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection on {0..n-1}, given by its image array. Ordering is lexicographic on the image."""

    image: tuple

    def __post_init__(self):
        try:
            image = tuple(int(x) for x in self.image)
        except (TypeError, ValueError):
            raise InputError(f"permutation image must be integers, got {self.image!r}")
        if sorted(image) != list(range(len(image))):
            raise InputError(f"not a permutation of 0..{len(image) - 1}: {list(image)}")
        object.__setattr__(self, 'image', image)

    @property
    def n(self):
        return len(self.image)

    def __call__(self, i):
        return self.image[i]

    def __len__(self):
        return len(self.image)

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))

    @classmethod
    def from_one_based(cls, values):
        return cls(tuple(int(v) - 1 for v in values))

    def one_based(self):
        return [i + 1 for i in self.image]

    def inverse(self):
        inv = [0] * self.n
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other):
        """Returns self∘other, i.e. i -> self(other(i))."""
        check_same_n(self.n, other.n)
        return Permutation(tuple(self.image[j] for j in other.image))

    def as_array(self):
        return np.array(self.image, dtype=np.intp)


def all_permutations(n):
    """Yields every permutation of {0..n-1} in lexicographic order."""
    for image in permutations(range(n)):
        yield Permutation(image)


def check_same_n(a, b):
    if a != b:
        raise DimensionMismatchError(f"dimension mismatch: {a} vs {b}")


class Matrix:
    """Immutable square matrix of rationals."""

    __slots__ = ('entries',)

    def __init__(self, entries):
        self.entries = _rational_array(entries, 2, 'matrix')

    @classmethod
    def _trusted(cls, arr):
        obj = cls.__new__(cls)
        obj.entries = _frozen(arr)
        return obj

    @classmethod
    def zeros(cls, n):
        return cls._trusted(np.full((n, n), ZERO, dtype=object))

    @classmethod
    def identity(cls, n):
        arr = np.full((n, n), ZERO, dtype=object)
        for i in range(n):
            arr[i, i] = ONE
        return cls._trusted(arr)

    @property
    def n(self):
        return self.entries.shape[0]

    def __getitem__(self, key):
        return self.entries[key]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    __hash__ = None

    def __repr__(self):
        return f"Matrix({self.rows()!r})"

    def __add__(self, other):
        check_same_n(self.n, other.n)
        return Matrix._trusted(self.entries + other.entries)

    def __matmul__(self, other):
        check_same_n(self.n, other.n)
        return Matrix._trusted(np.dot(self.entries, other.entries))

    def scale(self, c):
        return Matrix._trusted(self.entries * to_rational(c))

    def transpose(self):
        return Matrix._trusted(self.entries.T.copy())

    def rows(self):
        return [[format_rational(x) for x in row] for row in self.entries]


class ObjectiveTensor:
    """Dense n×n×n×n rational tensor, indexed coeff[i][j][s][t] (coefficient of P[i][j]·Q[s][t])."""

    __slots__ = ('coeff',)

    def __init__(self, coeff):
        self.coeff = _rational_array(coeff, 4, 'objective tensor')
        if self.coeff.shape[0] < 1:
            raise InputError("objective tensor needs n >= 1")

    @classmethod
    def _trusted(cls, arr):
        obj = cls.__new__(cls)
        obj.coeff = _frozen(arr)
        return obj

    @classmethod
    def zeros(cls, n):
        return cls._trusted(np.full((n, n, n, n), ZERO, dtype=object))

    @property
    def n(self):
        return self.coeff.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ObjectiveTensor):
            return NotImplemented
        return self.coeff.shape == other.coeff.shape and bool(np.all(self.coeff == other.coeff))

    __hash__ = None

    def __repr__(self):
        return f"ObjectiveTensor(n={self.n})"

    def __add__(self, other):
        check_same_n(self.n, other.n)
        return ObjectiveTensor._trusted(self.coeff + other.coeff)

    def scale(self, c):
        return ObjectiveTensor._trusted(self.coeff * to_rational(c))

    def max_abs(self):
        return max(abs(x) for x in self.coeff.flat)

    def max_coeff(self):
        return max(self.coeff.flat)

    def min_coeff(self):
        return min(self.coeff.flat)

    def integer_form(self):
        """Returns (K, d) with K an integer array and coeff = K / d exactly.

        K is int64 when every pairing sum fits comfortably, otherwise an object array of ints.
        """
        den = math.lcm(*(q.denominator for q in self.coeff.flat))
        ints = [q.numerator * (den // q.denominator) for q in self.coeff.flat]
        worst = max(abs(x) for x in ints) * self.n ** 2
        dtype = np.int64 if worst < 2 ** 62 else object
        return np.array(ints, dtype=dtype).reshape(self.coeff.shape), den

    def to_json(self):
        return {
            'n': self.n,
            'coeff': [[[[format_rational(x) for x in t_row] for t_row in s_blk]
                       for s_blk in j_blk] for j_blk in self.coeff],
        }

    @classmethod
    def from_json(cls, doc):
        if not isinstance(doc, dict) or 'n' not in doc or 'coeff' not in doc:
            raise TensorFormatError("tensor JSON must be an object with keys 'n' and 'coeff'")
        n = doc['n']
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise TensorFormatError(f"'n' must be a positive integer, got {n!r}")
        _check_nesting(doc['coeff'], n, 4, 'coeff')
        return cls(doc['coeff'])


def _check_nesting(node, n, depth, path):
    if depth == 0:
        return
    if not isinstance(node, list):
        raise TensorFormatError(f"{path} must be a list of {n} entries")
    if len(node) != n:
        raise TensorFormatError(f"{path} has {len(node)} entries, expected {n}")
    for k, child in enumerate(node):
        _check_nesting(child, n, depth - 1, f"{path}[{k}]")


def load_tensor(path):
    """Reads an ObjectiveTensor JSON file."""
    logger.info(f"Loading tensor from {path}")
    try:
        with open(path, 'r', encoding='utf-8') as file:
            doc = json.load(file)
    except json.JSONDecodeError as e:
        raise TensorFormatError(f"{path}: invalid JSON ({e})")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}")
    return ObjectiveTensor.from_json(doc)


def save_tensor(tensor, path):
    with open(path, 'w', encoding='utf-8') as file:
        json.dump(tensor.to_json(), file)
        file.write('\n')


@dataclass(frozen=True)
class PairObjective:
    """The simple tensor A⊗B, kept lazily as its two factors."""

    A: Matrix
    B: Matrix

    def __post_init__(self):
        check_same_n(self.A.n, self.B.n)

    @property
    def n(self):
        return self.A.n

    def expand(self):
        return objective_from_pair(self.A, self.B)

    def value(self, sigma, pi):
        return fast_pair_value(self.A, self.B, sigma, pi)


def perm_matrix(sigma):
    arr = np.full((sigma.n, sigma.n), ZERO, dtype=object)
    for i, j in enumerate(sigma.image):
        arr[i, j] = ONE
    return Matrix._trusted(arr)


def matrix_pairing(A, B):
    """<A,B> = sum over i,j of A[i][j]·B[i][j]."""
    check_same_n(A.n, B.n)
    return sum((A.entries * B.entries).flat, ZERO)


def objective_from_pair(A, B):
    """Expands A⊗B into the objective convention: coeff[i][j][s][t] = A[i][s]·B[j][t]."""
    check_same_n(A.n, B.n)
    outer = np.multiply.outer(A.entries, B.entries)  # [i, s, j, t]
    return ObjectiveTensor._trusted(np.ascontiguousarray(outer.transpose(0, 2, 1, 3)))


def pair_value(W, sigma, pi):
    """<W, P⊗Q> = sum over i,s of coeff[i][σ(i)][s][π(s)]."""
    check_same_n(W.n, sigma.n)
    check_same_n(W.n, pi.n)
    idx = np.arange(W.n)
    block = W.coeff[idx[:, None], sigma.as_array()[:, None], idx[None, :], pi.as_array()[None, :]]
    return sum(block.flat, ZERO)


def permuted_product(B, sigma, pi):
    """P·B·Qᵀ for P = perm_matrix(σ), Q = perm_matrix(π); entry (i,s) is B[σ(i)][π(s)]."""
    check_same_n(B.n, sigma.n)
    check_same_n(B.n, pi.n)
    return Matrix._trusted(B.entries[np.ix_(sigma.as_array(), pi.as_array())])


def fast_pair_value(A, B, sigma, pi):
    """<A⊗B, P⊗Q> evaluated as <P·B·Qᵀ, A> in O(n²)."""
    return matrix_pairing(A, permuted_product(B, sigma, pi))


def identity_objective(n):
    if n < 1:
        raise InputError(f"identity_objective needs n >= 1, got {n}")
    return objective_from_pair(Matrix.identity(n), Matrix.identity(n))


def agreement_count(sigma, pi):
    """Number of positions where σ and π agree; equals <I⊗I, P⊗Q> = trace(P·Qᵀ)."""
    check_same_n(sigma.n, pi.n)
    return sum(1 for a, b in zip(sigma.image, pi.image) if a == b)


def vertex_point(sigma, pi):
    """Flattened P⊗Q in row-major (i,j,s,t) order."""
    check_same_n(sigma.n, pi.n)
    n = sigma.n
    P = np.zeros((n, n), dtype=np.int8)
    Q = np.zeros((n, n), dtype=np.int8)
    P[np.arange(n), sigma.as_array()] = 1
    Q[np.arange(n), pi.as_array()] = 1
    return tuple(ONE if x else ZERO for x in np.multiply.outer(P, Q).ravel())


def seeded_generator(seed):
    """numpy Generator on PCG64; the seed must fit in 64 unsigned bits."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < 2 ** 64:
        raise InputError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def random_integer_tensor(n, bound, rng, nonnegative=False):
    """Draws the n⁴ entries uniformly from [-bound, bound] (or [0, bound]) as one row-major block."""
    if bound < 0:
        raise InputError(f"entry bound must be >= 0, got {bound}")
    low = 0 if nonnegative else -bound
    block = rng.integers(low, bound, size=(n, n, n, n), endpoint=True)
    return ObjectiveTensor(block)
