"""Function models for extensions: defining functions, conjugated kernels,
rank-one perturbations, and finite Blaschke model spaces.

A defining function is stored as the pair (a, f): a complex constant plus a
coordinate vector, evaluated as

    g(z) = a + sum_k (1 + t_k z)/(t_k - z) * f_k mu_k / (t_k - i).

This is the same object as q_v + c for v_k = f_k (t_k + i)/(t_k - i), so the
pair converts losslessly to and from extension parameters.  Multiplying the
model space by 1/g conjugates the extension's resolvent into the plain
difference-quotient operator; finite Blaschke products reach this picture
through the Cayley transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .config import DEFAULT, Tolerances
from .errors import IdenticallyZero, NonHerglotzResidue, PhaseMinusOne, ZeroOfG
from .hspace import (
    HerglotzSpace,
    SpaceElement,
    eval_element,
    kernel,
    make_space,
)
from .krein import ExtensionParams, base_defect_element, g_scale, identify_params, krein_resolvent
from .measures import NonnegAtomicMeasure
from .qherglotz import check_off_atoms
from .relations import SpectrumReport, matrix_spectrum

BASE_POINT = 1j


@dataclass(frozen=True, eq=False)
class MFunction:
    """Defining function of an extension, as constant plus coordinates."""

    a: complex
    f: SpaceElement

    def __init__(self, a: complex, f: SpaceElement):
        object.__setattr__(self, "a", complex(a))
        object.__setattr__(self, "f", f)

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.f.is_zero


def m_weights(space: HerglotzSpace, g: MFunction) -> np.ndarray:
    return np.asarray(g.f.coords) * space.mus / (space.ts - BASE_POINT)


def m_eval(space: HerglotzSpace, g: MFunction, z: complex, tol: Tolerances = DEFAULT) -> complex:
    """Evaluate the defining function at ``z`` (off the atoms)."""
    check_off_atoms(space.ts, z, tol)
    rho = m_weights(space, g)
    return complex(g.a + np.sum((1.0 + space.ts * z) / (space.ts - z) * rho))


def m_scale(space: HerglotzSpace, g: MFunction, z: complex) -> float:
    rho = m_weights(space, g)
    return float(1.0 + abs(g.a) + np.sum(np.abs(rho * (1.0 + space.ts * z) / (space.ts - z))))


def from_extension(space: HerglotzSpace, params: ExtensionParams) -> MFunction:
    """The defining function g = q_v + c of an extension."""
    t = space.ts
    f = SpaceElement(np.asarray(params.v.coords) * (t - 1j) / (t + 1j))
    return MFunction(params.c, f)


def to_extension(space: HerglotzSpace, g: MFunction) -> ExtensionParams:
    """Extension parameters of a nonzero defining function."""
    if g.is_zero:
        raise IdenticallyZero("the zero function defines no extension")
    t = space.ts
    v = SpaceElement(np.asarray(g.f.coords) * (t + 1j) / (t - 1j))
    return ExtensionParams(v, g.a)


def element_to_mfunction(space: HerglotzSpace, x: SpaceElement) -> MFunction:
    """View a space element (its Cauchy transform) as a defining function."""
    t, mu = space.ts, space.mus
    a = complex(np.sum(np.asarray(x.coords) * mu * t / (1.0 + t**2)))
    f = SpaceElement(np.asarray(x.coords) / (t + 1j))
    return MFunction(a, f)


def conjugated_kernel(
    space: HerglotzSpace,
    g: MFunction,
    z: complex,
    w: complex,
    tol: Tolerances = DEFAULT,
) -> complex:
    """Kernel of the space multiplied by 1/g: N(z, w) / (g(z) conj g(w))."""
    gz = m_eval(space, g, z, tol)
    gw = m_eval(space, g, w, tol)
    if abs(gz) <= tol.degenerate_tol * m_scale(space, g, z):
        raise ZeroOfG(f"g vanishes at {z}")
    if abs(gw) <= tol.degenerate_tol * m_scale(space, g, w):
        raise ZeroOfG(f"g vanishes at {w}")
    return kernel(space, z, w, tol) / (gz * np.conj(gw))


def diagram_check(
    space: HerglotzSpace,
    g: MFunction,
    w: complex,
    samples: int = 8,
    seed: int = 0,
    tol: Tolerances = DEFAULT,
) -> float:
    """Max residual of the conjugation diagram at random samples.

    For sample elements x, compares (1/g) applied after the extension's
    resolvent acting on g * (Fx/g) against the plain difference quotient of
    the function Fx/g, pointwise at random probe points.
    """
    rng = np.random.default_rng(seed)
    params = to_extension(space, g)
    gw = m_eval(space, g, w, tol)
    if abs(gw) <= tol.degenerate_tol * m_scale(space, g, w):
        raise ZeroOfG(f"g vanishes at the resolvent point {w}")
    t_mat = krein_resolvent(space, params, w, tol)
    span = 1.0 + float(np.max(np.abs(space.ts)))
    worst = 0.0
    for _ in range(samples):
        x = SpaceElement(rng.standard_normal(space.n) + 1j * rng.standard_normal(space.n))
        y = SpaceElement(t_mat @ np.asarray(x.coords))
        fhat_w = eval_element(space, x, w, tol) / gw
        probes_done = 0
        while probes_done < 4:
            z = complex(rng.uniform(-span, span), rng.uniform(0.2, 1.5) * span * rng.choice([-1.0, 1.0]))
            gz = m_eval(space, g, z, tol)
            if abs(gz) <= 1e-6 * m_scale(space, g, z):
                continue
            probes_done += 1
            lhs = eval_element(space, y, z, tol) / gz
            fhat_z = eval_element(space, x, z, tol) / gz
            rhs = (fhat_z - fhat_w) / (z - w)
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs)))
    return worst


def perturbation_matrix(space: HerglotzSpace, y: SpaceElement) -> np.ndarray:
    """The rank-one perturbed operator B = diag(t) + y * [ . , ones].

    The pairing [f, ones] = sum_k f_k mu_k is exactly the functional whose
    kernel is the domain of the symmetric restriction, so the graph of B
    extends that restriction.
    """
    t, mu = space.ts, space.mus
    return np.diag(t.astype(complex)) + np.outer(np.asarray(y.coords), mu.astype(complex))


def rank_one_forward(
    space: HerglotzSpace, y: SpaceElement, tol: Tolerances = DEFAULT
) -> tuple[np.ndarray, SpectrumReport]:
    """Perturbed matrix and its dense-eigensolver spectrum."""
    b = perturbation_matrix(space, y)
    return b, matrix_spectrum(b, tol)


def rank_one_bridge(space: HerglotzSpace, y: SpaceElement, tol: Tolerances = DEFAULT) -> ExtensionParams:
    """Extension parameters whose relation is the graph of the perturbed matrix."""
    b = perturbation_matrix(space, y)
    n = space.n
    span = 1.0 + float(np.max(np.abs(space.ts))) + float(np.linalg.norm(b, 2))
    best = None
    for w in (1.31j * span, -1.73j * span, (0.9 + 1.1j) * span, 2.57j * span):
        m = b - w * np.eye(n)
        s = np.linalg.svd(m, compute_uv=False)
        ratio = s[-1] / s[0]
        if best is None or ratio > best[0]:
            best = (ratio, w)
    w = best[1]
    r_sample = np.linalg.inv(b - w * np.eye(n))
    return identify_params(space, r_sample, w, tol)


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product for the upper half plane, times a phase.

    The same rational formula realizes the lower half plane values, where it
    satisfies v(z) = 1 / conj(v(conj z)).
    """

    zeros: tuple[complex, ...]
    phase: complex = 1.0 + 0j

    def __init__(self, zeros, phase: complex = 1.0 + 0j):
        zeros = tuple(complex(z) for z in zeros)
        phase = complex(phase)
        for z in zeros:
            if z.imag <= 0:
                raise ValueError(f"Blaschke zero {z} is not in the open upper half plane")
        if abs(abs(phase) - 1.0) > 1e-9:
            raise ValueError(f"phase {phase} is not unimodular")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "phase", phase)

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def evaluate(self, z: complex) -> complex:
        out = self.phase
        for zk in self.zeros:
            out *= (z - zk) / (z - np.conj(zk))
        return complex(out)


def blaschke_cayley(bp: BlaschkeProduct, tol: Tolerances = DEFAULT) -> tuple[HerglotzSpace, MFunction]:
    """Model space and defining function of a finite Blaschke product.

    The Cayley transform h = i (1 - v)/(1 + v) is a Herglotz function whose
    poles are the real solutions of v = -1; the atom weights are the
    (negated) residues divided by 1 + t^2 and must come out positive.  The
    returned defining function is g = 1/(1 + v) = (h + i)/(2i).
    """
    if abs(bp.phase + 1.0) <= tol.phase_tol:
        raise PhaseMinusOne(f"phase {bp.phase} is within {tol.phase_tol} of -1")
    n = bp.degree
    if n == 0:
        raise ValueError("a Blaschke product of degree zero has no model space")

    p = np.array([bp.phase], dtype=complex)
    q = np.array([1.0], dtype=complex)
    for zk in bp.zeros:
        p = npoly.polymul(p, np.array([-zk, 1.0], dtype=complex))
        q = npoly.polymul(q, np.array([-np.conj(zk), 1.0], dtype=complex))
    w_poly = npoly.polyadd(p, q)  # degree n, leading coefficient 1 + phase

    roots = npoly.polyroots(w_poly)
    if np.max(np.abs(roots.imag)) > 1e-7 * (1.0 + np.max(np.abs(roots))):
        raise NonHerglotzResidue("pole locations of the Cayley transform are not real")
    poles = np.sort(roots.real)

    w_der = npoly.polyder(w_poly)
    atoms = []
    for pk in poles:
        residue = 2j * complex(npoly.polyval(pk, q)) / complex(npoly.polyval(pk, w_der))
        weight = -residue / (1.0 + pk**2)
        if abs(weight.imag) > 1e-9 * (1.0 + abs(weight)) or weight.real <= 0:
            raise NonHerglotzResidue(f"atom weight {weight} at t={pk} is not positive")
        atoms.append((float(pk), weight.real))

    nu = NonnegAtomicMeasure(atoms)
    h_inf = 1j * (1.0 - bp.phase) / (1.0 + bp.phase)
    if abs(h_inf.imag) > 1e-9 * (1.0 + abs(h_inf)):
        raise NonHerglotzResidue("value of the Cayley transform at infinity is not real")
    ts = nu.ts
    a = float(h_inf.real + np.sum(nu.ws * ts))
    space = make_space(nu, a)

    g_const = (a + 1j) / 2j
    g_coords = 1.0 / (2j * (space.ts + 1j))
    return space, MFunction(g_const, SpaceElement(g_coords))
