"""The model space of a Herglotz base function, in weighted-L2 coordinates.

For a base function h(z) = a + sum_k (1 + t_k z)/(t_k - z) * nu_k with
nu_k > 0, the associated reproducing kernel space is isometrically the
weighted space over the atoms with weights mu_k = (1 + t_k^2) * nu_k.  An
element is a coordinate vector f; the function it represents is the Cauchy
transform

    (F f)(z) = sum_k f_k * mu_k / (t_k - z).

Every operator of interest is a small dense matrix in these coordinates:
the distinguished self-adjoint extension is multiplication by the atom
coordinates, and its resolvent is the difference-quotient operator, which
acts diagonally as f_k -> f_k / (t_k - w).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DimensionMismatch, PoleAt, TooFewProbes
from .measures import NonnegAtomicMeasure, require_nonempty
from .qherglotz import QuasiHerglotz, check_off_atoms
from .relations import LinearRelationFD, numerical_rank


@dataclass(frozen=True)
class HerglotzSpace:
    """Model space of dimension n = number of atoms of ``nu``."""

    nu: NonnegAtomicMeasure
    a: float = 0.0

    @property
    def n(self) -> int:
        return self.nu.n

    @cached_property
    def ts(self) -> np.ndarray:
        return self.nu.ts

    @cached_property
    def nus(self) -> np.ndarray:
        return self.nu.ws

    @cached_property
    def mus(self) -> np.ndarray:
        return (1.0 + self.ts**2) * self.nus

    @property
    def base_function(self) -> QuasiHerglotz:
        return QuasiHerglotz(self.a, 0.0, self.nu.as_complex())


@dataclass(frozen=True, eq=False)
class SpaceElement:
    """Coordinate vector of a space element (immutable)."""

    coords: np.ndarray

    def __init__(self, coords):
        arr = np.array(coords, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.coords == 0))


def make_space(nu: NonnegAtomicMeasure, a: float = 0.0) -> HerglotzSpace:
    """Build the model space of ``h = a + integral against nu``."""
    require_nonempty(nu)
    return HerglotzSpace(nu, float(a))


def zero_element(space: HerglotzSpace) -> SpaceElement:
    return SpaceElement(np.zeros(space.n, dtype=complex))


def _check_dim(space: HerglotzSpace, f: SpaceElement) -> None:
    if len(f) != space.n:
        raise DimensionMismatch(f"element has length {len(f)}, space dimension is {space.n}")


def kernel(space: HerglotzSpace, z: complex, w: complex, tol: Tolerances = DEFAULT) -> complex:
    """Reproducing kernel N(z, w) = sum_k mu_k / ((t_k - z)(t_k - conj w)).

    The coordinate sum agrees with the difference quotient
    (h(z) - conj h(w)) / (z - conj w) wherever the latter is defined and
    extends it smoothly across z = conj w, where the value is h'(w).
    """
    check_off_atoms(space.ts, z, tol)
    check_off_atoms(space.ts, w, tol)
    return complex(np.sum(space.mus / ((space.ts - z) * (space.ts - np.conj(w)))))


def kernel_vector(space: HerglotzSpace, w: complex, tol: Tolerances = DEFAULT) -> SpaceElement:
    """Coordinates of the kernel function at ``w``: k_w = 1 / (t - conj w)."""
    check_off_atoms(space.ts, w, tol)
    return SpaceElement(1.0 / (space.ts - np.conj(w)))


def eval_element(space: HerglotzSpace, f: SpaceElement, z: complex, tol: Tolerances = DEFAULT) -> complex:
    """Point evaluation of the represented function (the Cauchy transform)."""
    _check_dim(space, f)
    check_off_atoms(space.ts, z, tol)
    return complex(np.sum(f.coords * space.mus / (space.ts - z)))


def inner(space: HerglotzSpace, f: SpaceElement, g: SpaceElement) -> complex:
    """Weighted inner product sum_k f_k conj(g_k) mu_k."""
    _check_dim(space, f)
    _check_dim(space, g)
    return complex(np.sum(f.coords * np.conj(g.coords) * space.mus))


def norm(space: HerglotzSpace, f: SpaceElement) -> float:
    return float(np.sqrt(inner(space, f, f).real))


def diff_quotient(space: HerglotzSpace, f: SpaceElement, w: complex, tol: Tolerances = DEFAULT) -> SpaceElement:
    """Difference-quotient operator: coordinates f_k / (t_k - w)."""
    _check_dim(space, f)
    check_off_atoms(space.ts, w, tol)
    return SpaceElement(f.coords / (space.ts - w))


def multiplication_matrix(space: HerglotzSpace) -> np.ndarray:
    return np.diag(space.ts.astype(complex))


def sym_and_selfadjoint(space: HerglotzSpace, tol: Tolerances = DEFAULT) -> tuple[LinearRelationFD, LinearRelationFD]:
    """The symmetric restriction and its distinguished self-adjoint extension.

    The extension A is multiplication by the atom coordinates, an
    everywhere-defined operator.  The symmetric part S restricts A to the
    hyperplane sum_k f_k mu_k = 0, which is exactly the condition for
    z * (F f)(z) to stay inside the space.
    """
    n = space.n
    A = multiplication_matrix(space)
    rel_a = LinearRelationFD.from_operator(A)
    # orthonormal basis of the hyperplane mu^T f = 0
    mu_row = space.mus.astype(complex).reshape(1, n)
    _, _, vh = np.linalg.svd(mu_row)
    dom = vh[1:].conj().T  # (n, n-1)
    basis = np.vstack([dom, A @ dom])
    rel_s = LinearRelationFD(basis, space_dim=n, rank_tol=tol.rank_tol)
    return rel_s, rel_a


def defect_vector(space: HerglotzSpace, w: complex, tol: Tolerances = DEFAULT) -> SpaceElement:
    """Spanning vector of the defect space at ``w``: coordinates 1/(t_k - w).

    Defined off the atoms; real non-atom points are allowed since the formula
    extends analytically.
    """
    check_off_atoms(space.ts, w, tol)
    return SpaceElement(1.0 / (space.ts - w))


def simplicity_rank(space: HerglotzSpace, probes: list[complex], tol: Tolerances = DEFAULT) -> int:
    """Numerical rank of the defect-vector matrix over the probes.

    A full rank of n certifies that the defect spaces span the whole space,
    i.e. that the symmetric restriction is simple.
    """
    if len(probes) < space.n:
        raise TooFewProbes(f"{len(probes)} probes for dimension {space.n}")
    cols = np.column_stack([defect_vector(space, p, tol).coords for p in probes])
    return numerical_rank(cols, tol.rank_tol)
