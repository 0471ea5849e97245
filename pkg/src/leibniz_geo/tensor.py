"""Typed (q, r) tensor algebra over the scalar field on a fixed frame.

Components are stored densely in numpy object arrays of ScalarField; the frame
rank never exceeds single digits here, so dense storage costs little and keeps
every operation a transparent loop.  All indices are 0-based internally; the
model-file layer converts from the 1-based convention used in the docs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import DegenerateMetric, NoSolution, NonUnique, SlotMismatch
from .scalar import ScalarField


def zeros_array(shape, coords):
    arr = np.empty(shape, dtype=object)
    zero = ScalarField.constant(0, coords)
    arr[...] = zero
    return arr


def object_array(nested):
    arr = np.empty(np.shape(nested), dtype=object)
    arr[...] = nested
    return arr


def array_is_zero(arr):
    return all(entry.is_zero for entry in arr.flat)


@dataclass(frozen=True)
class ETensor:
    """Dense (q, r)-type tensor: q contravariant then r covariant slots."""

    q: int
    r: int
    dim: int
    coords: tuple
    comps: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = (self.dim,) * (self.q + self.r)
        if self.comps.shape != expected:
            raise SlotMismatch(f"components have shape {self.comps.shape}, expected {expected}")

    @classmethod
    def zeros(cls, q, r, dim, coords):
        return cls(q, r, dim, tuple(coords), zeros_array((dim,) * (q + r), coords))

    @classmethod
    def from_array(cls, q, r, arr, coords):
        arr = object_array(arr)
        return cls(q, r, arr.shape[0] if arr.ndim else 0, tuple(coords), arr)

    @property
    def is_zero(self):
        return array_is_zero(self.comps)

    def nonzero_count(self):
        return sum(0 if entry.is_zero else 1 for entry in self.comps.flat)

    def max_degree(self):
        degrees = [entry.total_degree() for entry in self.comps.flat if not entry.is_zero]
        return max(degrees, default=0)

    def __add__(self, other):
        self._check_compatible(other)
        return ETensor(self.q, self.r, self.dim, self.coords, self.comps + other.comps)

    def __sub__(self, other):
        self._check_compatible(other)
        return ETensor(self.q, self.r, self.dim, self.coords, self.comps - other.comps)

    def __neg__(self):
        return ETensor(self.q, self.r, self.dim, self.coords, -self.comps)

    def scale(self, factor):
        return ETensor(self.q, self.r, self.dim, self.coords, self.comps * factor)

    def _check_compatible(self, other):
        if not isinstance(other, ETensor):
            raise SlotMismatch("operand is not an ETensor")
        if (self.q, self.r, self.dim) != (other.q, other.r, other.dim):
            raise SlotMismatch(
                f"type mismatch: ({self.q},{self.r}) dim {self.dim} "
                f"vs ({other.q},{other.r}) dim {other.dim}"
            )

    def swap_slots(self, i, j):
        """Transpose two global slots (1-based); both must share variance."""
        self._check_same_variance(i, j)
        return ETensor(
            self.q, self.r, self.dim, self.coords, np.swapaxes(self.comps, i - 1, j - 1)
        )

    def _check_same_variance(self, i, j):
        total = self.q + self.r
        for slot in (i, j):
            if not 1 <= slot <= total:
                raise SlotMismatch(f"slot {slot} out of range 1..{total}")
        if (i <= self.q) != (j <= self.q):
            raise SlotMismatch(f"slots {i} and {j} differ in variance")


def contract(t, upper_slot, lower_slot):
    """Trace over one contravariant and one covariant slot (each 1-based)."""
    if not 1 <= upper_slot <= t.q:
        raise SlotMismatch(f"upper slot {upper_slot} out of range 1..{t.q}")
    if not 1 <= lower_slot <= t.r:
        raise SlotMismatch(f"lower slot {lower_slot} out of range 1..{t.r}")
    axis1 = upper_slot - 1
    axis2 = t.q + lower_slot - 1
    traced = np.trace(t.comps, axis1=axis1, axis2=axis2)
    if t.q + t.r == 2:
        traced = object_array(traced)
    return ETensor(t.q - 1, t.r - 1, t.dim, t.coords, traced)


def is_totally_symmetric(t):
    """True iff the covariant block is invariant under every permutation."""
    if t.q != 0:
        raise SlotMismatch("total symmetry is checked on covariant slots only")
    for perm in itertools.permutations(range(t.r)):
        permuted = np.transpose(t.comps, perm)
        if not array_is_zero(t.comps - permuted):
            return False
    return True


def is_antisymmetric_in(t, i, j):
    """True iff the tensor flips sign under transposing global slots i, j (1-based)."""
    swapped = t.swap_slots(i, j)
    return array_is_zero(t.comps + swapped.comps)


def symmetrize_check(t, kind):
    """Dispatch form: kind is 'totally_symmetric' or ('antisymmetric_in', i, j)."""
    if kind == "totally_symmetric":
        return is_totally_symmetric(t)
    if isinstance(kind, tuple) and kind[0] == "antisymmetric_in":
        return is_antisymmetric_in(t, kind[1], kind[2])
    raise ValueError(f"unknown symmetry kind {kind!r}")


def antisymmetrize(t):
    """Full antisymmetrization over the covariant slots of a (0, p) tensor."""
    if t.q != 0:
        raise SlotMismatch("antisymmetrization acts on covariant slots only")
    acc = zeros_array(t.comps.shape, t.coords)
    count = 0
    for perm in itertools.permutations(range(t.r)):
        sign = _parity(perm)
        permuted = np.transpose(t.comps, perm)
        acc = acc + permuted if sign > 0 else acc - permuted
        count += 1
    inv = ScalarField.constant(Fraction(1, count), t.coords)
    return ETensor(0, t.r, t.dim, t.coords, acc * inv)


def _parity(perm):
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        current = start
        while not seen[current]:
            seen[current] = True
            current = perm[current]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class EVectorField:
    """Section of the bundle: components v^a on the fixed frame."""

    comps: np.ndarray = field(repr=False)

    @classmethod
    def from_list(cls, entries):
        return cls(object_array(list(entries)))

    @property
    def dim(self):
        return self.comps.shape[0]

    @property
    def is_zero(self):
        return array_is_zero(self.comps)

    def __add__(self, other):
        return EVectorField(self.comps + other.comps)

    def __sub__(self, other):
        return EVectorField(self.comps - other.comps)

    def __neg__(self):
        return EVectorField(-self.comps)

    def scale(self, factor):
        return EVectorField(self.comps * factor)


@dataclass(frozen=True)
class EOneForm:
    """Covariant counterpart of EVectorField: components w_a."""

    comps: np.ndarray = field(repr=False)

    @classmethod
    def from_list(cls, entries):
        return cls(object_array(list(entries)))

    @property
    def dim(self):
        return self.comps.shape[0]

    @property
    def is_zero(self):
        return array_is_zero(self.comps)

    def apply(self, u):
        return sum(self.comps[a] * u.comps[a] for a in range(self.dim))

    def __sub__(self, other):
        return EOneForm(self.comps - other.comps)


@dataclass(frozen=True)
class EPForm:
    """Fully antisymmetric (0, p) tensor, stored dense and validated."""

    degree: int
    comps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.degree != self.comps.ndim:
            raise SlotMismatch(f"degree {self.degree} does not match rank {self.comps.ndim}")
        for i in range(self.degree):
            for j in range(i + 1, self.degree):
                swapped = np.swapaxes(self.comps, i, j)
                if not array_is_zero(self.comps + swapped):
                    raise SlotMismatch(f"components not antisymmetric in slots {i + 1},{j + 1}")

    @property
    def dim(self):
        return self.comps.shape[0] if self.degree else 0

    @property
    def is_zero(self):
        return array_is_zero(self.comps)

    def as_tensor(self, dim, coords):
        return ETensor(0, self.degree, dim, tuple(coords), self.comps)


class EMetric:
    """Symmetric invertible (0, 2) tensor with its exact cached inverse."""

    def __init__(self, matrix, coords):
        matrix = object_array(matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise SlotMismatch(f"metric must be square, got shape {matrix.shape}")
        r = matrix.shape[0]
        for a in range(r):
            for b in range(a + 1, r):
                if not (matrix[a, b] - matrix[b, a]).is_zero:
                    raise SlotMismatch(f"metric not symmetric at ({a + 1},{b + 1})")
        det = linalg.determinant([[matrix[a, b] for b in range(r)] for a in range(r)])
        if det.is_zero:
            raise DegenerateMetric("metric determinant is the zero scalar field")
        self.coords = tuple(coords)
        self.matrix = matrix
        self.det = det
        try:
            inverse = linalg.invert([[matrix[a, b] for b in range(r)] for a in range(r)])
        except (NoSolution, NonUnique) as exc:  # pragma: no cover - det check precedes
            raise DegenerateMetric(str(exc)) from exc
        self.inverse = object_array(inverse)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def lower_tensor(self):
        return ETensor(0, 2, self.dim, self.coords, self.matrix)

    def inverse_tensor(self):
        return ETensor(2, 0, self.dim, self.coords, self.inverse)


def metric_inverse(g):
    """The exact inverse of an EMetric as a (2, 0) tensor."""
    return g.inverse_tensor()
