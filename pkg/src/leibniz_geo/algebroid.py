"""Anchored bundles and bracket structures on a fixed local frame.

An ``Algebroid`` stores the structure data (anchor, bracket coefficients,
locality coefficients, optional projector and kernel sections) as component
arrays of exact scalar fields over a single chart.  Brackets on arbitrary
sections are evaluated through the two Leibniz rules, and the axioms are
validated as exact frame-level residuals: every axiom quantified over
sections reduces to a structure-coefficient identity because the section
dependence cancels between the two sides (the reductions are spelled out at
each residual below).

Index conventions (all 0-based internally, 1-based in the docs):
  anchor[a][i]        rho^i_a, action of the frame field X_a on coordinates
  bracket[a][b][c]    c^a_{bc}, with [X_b, X_c] = c^a_{bc} X_a
  locality[a][d][e][c]  L^{a d}_{e c} = e^a(L(e^d, X_e, X_c))
  projector[a][b]     P^a_b
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    InvalidStructureConstants,
    MissingKernelSections,
    MissingProjector,
)
from .expr import parse_expr
from .scalar import ScalarField
from .tensor import (
    ETensor,
    EOneForm,
    EVectorField,
    array_is_zero,
    object_array,
    zeros_array,
)


@dataclass(frozen=True)
class Residual:
    """Exact LHS - RHS of an identity; zero iff the identity holds."""

    name: str
    tensor: ETensor

    @property
    def is_zero(self):
        return self.tensor.is_zero

    def summary(self):
        return {
            "check": self.name,
            "residual_nonzero_components": self.tensor.nonzero_count(),
            "residual_max_degree": self.tensor.max_degree(),
        }


@dataclass
class AlgebroidReport:
    """Named outcomes of a validation batch; entries are bools or Residuals."""

    name: str
    entries: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def record(self, key, value):
        self.entries[key] = value

    def warn(self, message):
        self.warnings.append(message)

    @property
    def ok(self):
        for value in self.entries.values():
            if isinstance(value, Residual):
                if not value.is_zero:
                    return False
            elif not value:
                return False
        return True


@dataclass(frozen=True)
class Algebroid:
    coords: tuple
    rank: int
    anchor: np.ndarray = field(repr=False)
    bracket: np.ndarray = field(repr=False)
    locality: np.ndarray = field(repr=False)
    projector: np.ndarray | None = field(repr=False, default=None)
    kernel_sections: tuple = ()

    @property
    def dim(self):
        return len(self.coords)

    # -- scalar helpers -------------------------------------------------------

    def field(self, value):
        if isinstance(value, ScalarField):
            return value
        if isinstance(value, str):
            return parse_expr(value, self.coords)
        return ScalarField.constant(value, self.coords)

    def zero(self):
        return ScalarField.constant(0, self.coords)

    def one(self):
        return ScalarField.constant(1, self.coords)

    def x(self, i):
        return ScalarField.coordinate(i, self.coords)

    def vector(self, entries):
        return EVectorField.from_list([self.field(v) for v in entries])

    def frame_vector(self, a):
        """The frame section X_a (0-based)."""
        entries = [self.one() if b == a else self.zero() for b in range(self.rank)]
        return EVectorField.from_list(entries)

    def zeros(self, *shape):
        return zeros_array(shape, self.coords)

    def tensor(self, q, r, arr):
        return ETensor(q, r, self.rank, self.coords, object_array(arr))

    # -- locality projector ---------------------------------------------------

    @property
    def locality_hat(self):
        """P-projected locality coefficients Lhat^{a d}_{e c} = P^a_f L^{f d}_{e c}."""
        if self.projector is None:
            raise MissingProjector("algebroid has no locality projector")
        r = self.rank
        hat = self.zeros(r, r, r, r)
        for a, d, e, c in itertools.product(range(r), repeat=4):
            hat[a, d, e, c] = sum(
                (self.projector[a, f] * self.locality[f, d, e, c] for f in range(r)),
                self.zero(),
            )
        return hat

    # -- basic actions --------------------------------------------------------

    def anchor_apply(self, u, f):
        """rho(u)(f) = u^a rho^i_a d_i f."""
        acc = self.zero()
        for a in range(self.rank):
            for i in range(self.dim):
                acc = acc + u.comps[a] * self.anchor[a, i] * f.diff(i + 1)
        return acc

    def frame_apply(self, a, f):
        """rho(X_a)(f) for a frame field (0-based index)."""
        acc = self.zero()
        for i in range(self.dim):
            acc = acc + self.anchor[a, i] * f.diff(i + 1)
        return acc

    def coboundary(self, f):
        """(Df)_a = rho(X_a)(f) as a one-form."""
        return EOneForm.from_list([self.frame_apply(a, f) for a in range(self.rank)])

    def bracket_eval(self, u, v):
        """Bracket of arbitrary sections through the two Leibniz rules.

        [u, v]^a = u^b v^c c^a_{bc} + rho(u)(v^a) - rho(v)(u^a)
                   + L^{a d}_{b c} rho(X_d)(u^b) v^c
        """
        r = self.rank
        out = []
        for a in range(r):
            acc = self.zero()
            for b in range(r):
                for c in range(r):
                    acc = acc + u.comps[b] * v.comps[c] * self.bracket[a, b, c]
            acc = acc + self.anchor_apply(u, v.comps[a]) - self.anchor_apply(v, u.comps[a])
            for b in range(r):
                for c in range(r):
                    for d in range(r):
                        acc = acc + self.locality[a, d, b, c] * self.frame_apply(d, u.comps[b]) * v.comps[c]
            out.append(acc)
        return EVectorField.from_list(out)

    # -- axiom residuals ------------------------------------------------------

    def validate_pre_leibniz(self):
        """Anchor compatibility rho([u, v]) = [rho(u), rho(v)] as a frame residual.

        On frame fields both sides are C-infinity bilinear combinations of the
        same section data, so vanishing of
            rho^i_a c^a_{bc} - (rho^j_b d_j rho^i_c - rho^j_c d_j rho^i_b)
        is equivalent to the axiom: the Leibniz rules reproduce the identical
        derivative terms on both sides for non-frame sections.
        """
        r, n = self.rank, self.dim
        res = self.zeros(n, r, r)
        for i, b, c in itertools.product(range(n), range(r), range(r)):
            acc = self.zero()
            for a in range(r):
                acc = acc + self.anchor[a, i] * self.bracket[a, b, c]
            for j in range(n):
                acc = acc - self.anchor[b, j] * self.anchor[c, i].diff(j + 1)
                acc = acc + self.anchor[c, j] * self.anchor[b, i].diff(j + 1)
            res[i, b, c] = acc
        return Residual("anchor-compatibility", _loose_tensor(res, self.coords))

    def validate_projector(self):
        """Projector axioms: idempotence, image of P.L in ker rho, identity on ker."""
        if self.projector is None:
            raise MissingProjector("algebroid has no locality projector")
        r, n = self.rank, self.dim
        report = AlgebroidReport("projector")

        idem = self.zeros(r, r)
        for a, b in itertools.product(range(r), repeat=2):
            acc = -self.projector[a, b]
            for f in range(r):
                acc = acc + self.projector[a, f] * self.projector[f, b]
            idem[a, b] = acc
        report.record("idempotent", Residual("P.P - P", _loose_tensor(idem, self.coords)))

        hat = self.locality_hat
        image = self.zeros(n, r, r, r)
        for i, d, e, c in itertools.product(range(n), range(r), range(r), range(r)):
            image[i, d, e, c] = sum(
                (self.anchor[a, i] * hat[a, d, e, c] for a in range(r)), self.zero()
            )
        report.record(
            "projected_locality_in_kernel",
            Residual("rho o (P.L)", _loose_tensor(image, self.coords)),
        )

        if not self.kernel_sections:
            report.warn("no kernel sections supplied; identity-on-kernel check skipped")
        for idx, k in enumerate(self.kernel_sections):
            fixed = self.zeros(r)
            for a in range(r):
                acc = -k.comps[a]
                for b in range(r):
                    acc = acc + self.projector[a, b] * k.comps[b]
                fixed[a] = acc
            report.record(
                f"fixes_kernel_section_{idx}",
                Residual("P(k) - k", _loose_tensor(fixed, self.coords)),
            )
            anchored = self.zeros(n)
            for i in range(n):
                anchored[i] = sum(
                    (self.anchor[a, i] * k.comps[a] for a in range(r)), self.zero()
                )
            report.record(
                f"annihilates_kernel_section_{idx}",
                Residual("rho(k)", _loose_tensor(anchored, self.coords)),
            )
        return report

    def admissibility_residual(self, conn):
        """Symmetrized-bracket condition for a connection, as a frame residual.

        Section level the condition reads
            [u, v] + [v, u] = L(e^a, nabla_{X_a} u, v) + L(e^a, nabla_{X_a} v, u);
        on frame fields the derivative terms on both sides cancel identically
        (the Leibniz expansions agree term by term), leaving
            c^a_{bc} + c^a_{cb} - G^e_{db} L^{a d}_{e c} - G^e_{dc} L^{a d}_{e b}.
        """
        r = self.rank
        res = self.zeros(r, r, r)
        for a, b, c in itertools.product(range(r), repeat=3):
            acc = self.bracket[a, b, c] + self.bracket[a, c, b]
            for d in range(r):
                for e in range(r):
                    acc = acc - conn.gamma[e, d, b] * self.locality[a, d, e, c]
                    acc = acc - conn.gamma[e, d, c] * self.locality[a, d, e, b]
            res[a, b, c] = acc
        return Residual("admissibility", ETensor(1, 2, r, self.coords, res))


def _loose_tensor(arr, coords):
    """Wrap a mixed-index residual array whose axes may differ in length."""
    return _RawResidualTensor(arr, coords)


class _RawResidualTensor:
    """Residual carrier for arrays mixing frame and coordinate axes."""

    def __init__(self, comps, coords):
        self.comps = comps
        self.coords = tuple(coords)

    @property
    def is_zero(self):
        return array_is_zero(self.comps)

    def nonzero_count(self):
        return sum(0 if entry.is_zero else 1 for entry in self.comps.flat)

    def max_degree(self):
        degrees = [entry.total_degree() for entry in self.comps.flat if not entry.is_zero]
        return max(degrees, default=0)


# -- built-in structures ------------------------------------------------------


def tangent(n, coords=None):
    """Tangent-bundle structure on a single chart of R^n."""
    if coords is None:
        coords = tuple(f"x{i + 1}" for i in range(n))
    coords = tuple(coords)
    zero = ScalarField.constant(0, coords)
    one = ScalarField.constant(1, coords)
    anchor = zeros_array((n, n), coords)
    projector = zeros_array((n, n), coords)
    for a in range(n):
        anchor[a, a] = one
        projector[a, a] = one
    return Algebroid(
        coords=coords,
        rank=n,
        anchor=anchor,
        bracket=zeros_array((n, n, n), coords),
        locality=zeros_array((n, n, n, n), coords),
        projector=projector,
        kernel_sections=(),
    )


def lie_algebra(structure_constants):
    """Lie-algebra structure over a point: zero anchor, constant bracket.

    The constants must be antisymmetric in the lower pair; the Jacobi identity
    is not required (anchor compatibility is trivial over a point).
    """
    coords = ()
    arr = object_array(
        [
            [
                [ScalarField.constant(Fraction(v), coords) for v in row]
                for row in plane
            ]
            for plane in structure_constants
        ]
    )
    r = arr.shape[0]
    if arr.shape != (r, r, r):
        raise InvalidStructureConstants(f"expected shape ({r},{r},{r}), got {arr.shape}")
    for a, b, c in itertools.product(range(r), repeat=3):
        if not (arr[a, b, c] + arr[a, c, b]).is_zero:
            raise InvalidStructureConstants(
                f"constants not antisymmetric at ({a + 1},{b + 1},{c + 1})"
            )
    one = ScalarField.constant(1, coords)
    projector = zeros_array((r, r), coords)
    for a in range(r):
        projector[a, a] = one
    kernel = tuple(
        EVectorField.from_list(
            [one if b == a else ScalarField.constant(0, coords) for b in range(r)]
        )
        for a in range(r)
    )
    return Algebroid(
        coords=coords,
        rank=r,
        anchor=zeros_array((r, 0), coords),
        bracket=arr,
        locality=zeros_array((r, r, r, r), coords),
        projector=projector,
        kernel_sections=kernel,
    )


def courant(n, coords=None):
    """Split-signature Courant structure on R^n: rank 2n, Dorfman-type bracket.

    Frame order: n vector-block fields then n form-block fields.  The pairing
    eta couples the two blocks; the locality coefficients are
    L^{a d}_{e c} = eta_{e c} eta^{d a}, the projector kills the vector block,
    and the form-block frame fields span the anchor kernel.
    """
    if coords is None:
        coords = tuple(f"x{i + 1}" for i in range(n))
    coords = tuple(coords)
    r = 2 * n
    zero = ScalarField.constant(0, coords)
    one = ScalarField.constant(1, coords)
    anchor = zeros_array((r, n), coords)
    for a in range(n):
        anchor[a, a] = one
    eta = zeros_array((r, r), coords)
    for a in range(n):
        eta[a, n + a] = one
        eta[n + a, a] = one
    # eta is an involution, so eta^{ab} has the same components.
    locality = zeros_array((r, r, r, r), coords)
    for a, d, e, c in itertools.product(range(r), repeat=4):
        locality[a, d, e, c] = eta[e, c] * eta[d, a]
    projector = zeros_array((r, r), coords)
    for a in range(n, r):
        projector[a, a] = one
    kernel = tuple(
        EVectorField.from_list([one if b == a else zero for b in range(r)])
        for a in range(n, r)
    )
    return Algebroid(
        coords=coords,
        rank=r,
        anchor=anchor,
        bracket=zeros_array((r, r, r), coords),
        locality=locality,
        projector=projector,
        kernel_sections=kernel,
    )


def courant_pairing(A):
    """The split pairing eta of a courant(n) structure as an EMetric."""
    from .tensor import EMetric

    r = A.rank
    n = r // 2
    zero = A.zero()
    one = A.one()
    eta = [[one if (b == a + n or a == b + n) else zero for b in range(r)] for a in range(r)]
    return EMetric(eta, A.coords)


def so3():
    """The rotation Lie algebra: c^a_{bc} = epsilon_{abc} over a point."""
    eps = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for a, b, c in itertools.permutations(range(3)):
        sign = 1 if (a, b, c) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1
        eps[a][b][c] = sign
    return lie_algebra(eps)


def builtin(kind, *args, **kwargs):
    """Constructor dispatch: kind in {'tangent', 'lie_algebra', 'courant', 'so3'}."""
    table = {"tangent": tangent, "lie_algebra": lie_algebra, "courant": courant, "so3": so3}
    if kind not in table:
        raise ValueError(f"unknown builtin kind {kind!r}")
    return table[kind](*args, **kwargs)
