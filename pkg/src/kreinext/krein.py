"""Rank-one corrected resolvents and the spectra of the resulting extensions.

The reference framework is fixed once per space: the self-adjoint base
operator A is multiplication by the atom coordinates, and the distinguished
defect element is phi = defect_vector(i).  An extension is parametrized by a
target element v and a constant c through the corrected resolvent

    T(z) = (A - z)^{-1} - [ . , phi_phi(conj z)] / (q(z) + c) * phi_v(z),

where q is the normalized Q-function of v, pinned down (up to the additive
constant, fixed to zero) by

    (q(z) - q(conj w)) / (z - conj w) = [phi_v(z), phi_phi(w)].

In coordinates everything is closed form: phi_v(w) has entries
v_k (t_k - i)/(t_k - w) and q is itself an atomic quasi-Herglotz function
supported on the space atoms with weights v_k mu_k / (t_k + i).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .config import DEFAULT, Tolerances
from .errors import (
    DegenerateExtension,
    Infeasible,
    MixedHalfPlanes,
    NotAnEigenvalue,
    NotAnExtension,
    NotRankOne,
    QZero,
)
from .hspace import HerglotzSpace, SpaceElement, defect_vector, zero_element
from .measures import ComplexAtomicMeasure
from .qherglotz import (
    QuasiHerglotz,
    check_off_atoms,
    cluster_roots,
    evaluate,
    rational_numerator,
    trim_polynomial,
)
from .relations import (
    Eigenvalue,
    LinearRelationFD,
    SpectrumReport,
    _sorted_eigenvalues,
    pair_residual,
    relation_spectrum,
)

__all__ = [
    "ExtensionParams",
    "SpectrumReport",
    "base_defect_element",
    "phi_field",
    "normalized_q",
    "krein_resolvent",
    "reconstruct_relation",
    "relation_spectrum",
    "extension_spectrum",
    "eigenvector_check",
    "identify_params",
    "interpolate_spectrum",
    "blaschke_condition",
]

BASE_POINT = 1j


def base_defect_element(space: HerglotzSpace) -> SpaceElement:
    """The fixed defect element phi = defect vector at the base point i."""
    return defect_vector(space, BASE_POINT)


@dataclass(frozen=True, eq=False)
class ExtensionParams:
    """Target element and constant; q_v + c must not vanish identically."""

    v: SpaceElement
    c: complex

    def __init__(self, v: SpaceElement, c: complex):
        c = complex(c)
        if v.is_zero and c == 0:
            raise DegenerateExtension("v = 0 and c = 0 define the identically zero function")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "c", c)


def phi_field(space: HerglotzSpace, v: SpaceElement, w: complex, tol: Tolerances = DEFAULT) -> SpaceElement:
    """Analytic family (I + (w - i)(A - w)^{-1}) v; equals v at w = i."""
    check_off_atoms(space.ts, w, tol)
    return SpaceElement(v.coords * (space.ts - BASE_POINT) / (space.ts - w))


def q_weights(space: HerglotzSpace, v: SpaceElement, defect: SpaceElement | None = None) -> np.ndarray:
    """Atomic weights of the normalized Q-function of ``v``.

    With the default defect element these are v_k mu_k / (t_k + i); a custom
    defect element psi gives v_k conj(psi_k) mu_k.
    """
    if defect is None:
        return np.asarray(v.coords) * space.mus / (space.ts + 1j)
    return np.asarray(v.coords) * np.conj(defect.coords) * space.mus


def normalized_q(space: HerglotzSpace, v: SpaceElement, defect: SpaceElement | None = None) -> QuasiHerglotz:
    """Normalized Q-function of ``v``: vanishing constant and slope.

    The defining difference-quotient identity determines the function up to
    an additive constant; normalization drops that constant.  In the atomic
    model the linear coefficient is always zero as well, because the
    correlation of two phi-fields decays at infinity.
    """
    rho = q_weights(space, v, defect)
    nu = ComplexAtomicMeasure(list(zip(space.ts, rho)))
    return QuasiHerglotz(0.0, 0.0, nu)


def g_function(space: HerglotzSpace, params: ExtensionParams) -> QuasiHerglotz:
    """The defining function g = q_v + c in canonical form."""
    q = normalized_q(space, params.v)
    return QuasiHerglotz(params.c, 0.0, q.nu)


def g_scale(space: HerglotzSpace, params: ExtensionParams, z: complex) -> float:
    """Magnitude scale of g near ``z``: sum of term moduli plus |c|."""
    rho = q_weights(space, params.v)
    terms = np.abs(rho * (1 + space.ts * z) / (space.ts - z))
    return float(abs(params.c) + np.sum(terms) + 1.0)


def krein_resolvent(
    space: HerglotzSpace,
    params: ExtensionParams,
    z: complex,
    tol: Tolerances = DEFAULT,
    defect: SpaceElement | None = None,
) -> np.ndarray:
    """Resolvent matrix of the extension at ``z``.

    Diagonal resolvent of A minus the rank-one correction with column factor
    phi_v(z) and row factor the pairing against phi_phi(conj z).  Raises
    :class:`QZero` when q(z) + c is numerically zero, i.e. when ``z`` is a
    spectral point of the extension.
    """
    check_off_atoms(space.ts, z, tol)
    t, mu = space.ts, space.mus
    psi = base_defect_element(space) if defect is None else defect
    q = normalized_q(space, params.v, defect=psi if defect is not None else None)
    denom = evaluate(q, z, tol) + params.c
    if abs(denom) <= tol.degenerate_tol * g_scale(space, params, z):
        raise QZero(f"q(z)+c is numerically zero at z={z}")
    col = phi_field(space, params.v, z, tol).coords
    # pairing [f, phi_psi(conj z)] as a row vector acting on coordinates
    row = np.conj(psi.coords) * (t + 1j) * mu / (t - z)
    return np.diag(1.0 / (t - z)) - np.outer(col, row) / denom


def reconstruct_relation(
    space: HerglotzSpace,
    params: ExtensionParams,
    z: complex,
    tol: Tolerances = DEFAULT,
) -> LinearRelationFD:
    """The extension as a subspace: pairs (T(z) u, (I + z T(z)) u).

    The result does not depend on the sample point ``z``.
    """
    t_mat = krein_resolvent(space, params, z, tol)
    return LinearRelationFD.from_resolvent(t_mat, z)


def resolvent_sample_point(space: HerglotzSpace, params: ExtensionParams, tol: Tolerances = DEFAULT) -> complex:
    """A non-real point far from the atoms where q + c is comfortably nonzero."""
    span = 1.0 + float(np.max(np.abs(space.ts)))
    g = g_function(space, params)
    candidates = [1.37j * span, -2.11j * span, (1.3 + 1.9j) * span, (-0.7 - 2.3j) * span, 3.41j * span]
    best = None
    for z in candidates:
        val = abs(evaluate(g, z, tol))
        ref = g_scale(space, params, z)
        if best is None or val / ref > best[0]:
            best = (val / ref, z)
    if best[0] <= tol.degenerate_tol:
        raise QZero("no usable resolvent sample point found")
    return best[1]


def g_numerator(space: HerglotzSpace, params: ExtensionParams) -> tuple[np.ndarray, np.ndarray]:
    """Numerator of g over the full denominator prod_k (t_k - z).

    Atoms with zero weight keep their denominator factor so that every atom
    of the space stays visible to the spectral bookkeeping.
    """
    rho = q_weights(space, params.v)
    return rational_numerator(params.c, 0.0, space.ts, rho)


def extension_spectrum(space: HerglotzSpace, params: ExtensionParams, tol: Tolerances = DEFAULT) -> SpectrumReport:
    """Full spectrum of the extension, assembled analytically.

    Finite eigenvalues off the atoms are the zeros of g = q + c with their
    multiplicities.  At an atom the value of g decides: a pole leaves the
    atom in the resolvent set, a finite nonzero value gives a simple
    eigenvalue, and a zero of order m gives algebraic multiplicity m + 1
    (these two branches both show up as numerator roots at the atom, of
    multiplicity 1 + m).  The leftover count, the vanishing order of g at
    infinity, sits at the eigenvalue infinity.  Every eigenvalue is
    geometrically simple.
    """
    n = space.n
    t = space.ts
    rho = q_weights(space, params.v)
    rho_scale = max(1.0, float(np.max(np.abs(rho))) if n else 1.0, abs(params.c))

    num, _den = g_numerator(space, params)
    num = trim_polynomial(num, rel=1e-12)
    degree = len(num) - 1
    m_inf = n - degree

    eigens: list[Eigenvalue] = []
    if degree > 0:
        roots = npoly.polyroots(num)
        clusters = cluster_roots(num, roots, tol)
        for center, mult in clusters:
            dist = np.abs(t - center)
            k = int(np.argmin(dist))
            attached = dist[k] <= tol.atom_attach_tol * (1.0 + abs(t[k]))
            if attached and abs(rho[k]) <= 1e-9 * rho_scale:
                eigens.append(Eigenvalue(complex(t[k]), False, mult, 1))
            else:
                eigens.append(Eigenvalue(center, False, mult, 1))
    if m_inf > 0:
        eigens.append(Eigenvalue(0j, True, m_inf, 1))

    certified_atoms = tuple(complex(t[k]) for k in range(n) if abs(rho[k]) > 1e-9 * rho_scale)
    return SpectrumReport(n, _sorted_eigenvalues(eigens), resolvent_certified=certified_atoms)


def eigenvector_check(
    space: HerglotzSpace,
    params: ExtensionParams,
    w: complex,
    tol: Tolerances = DEFAULT,
) -> SpaceElement:
    """Eigenvector phi_v(w) at an off-atom eigenvalue, certified by the pencil."""
    g = g_function(space, params)
    if abs(evaluate(g, w, tol)) > tol.root_tol * g_scale(space, params, w):
        raise NotAnEigenvalue(f"q(w)+c does not vanish at w={w}")
    f = phi_field(space, params.v, w, tol)
    rel = reconstruct_relation(space, params, resolvent_sample_point(space, params, tol), tol)
    res = pair_residual(rel, f.coords, w * f.coords)
    if res > 1e-9:
        raise NotAnEigenvalue(f"pencil residual {res:.3e} exceeds 1e-9 at w={w}")
    return f


def identify_params(
    space: HerglotzSpace,
    r_sample: np.ndarray,
    w: complex,
    tol: Tolerances = DEFAULT,
) -> ExtensionParams:
    """Recover (v, c) from one resolvent sample of an extension.

    The difference to the base resolvent must be rank one with row factor
    proportional to the pairing against phi_phi(conj w); the column factor y
    then determines v = (I + (i - w)(A - i)^{-1}) y, and c is gauged so that
    q(w) + c = 1.
    """
    check_off_atoms(space.ts, w, tol)
    t, mu = space.ts, space.mus
    r_sample = np.asarray(r_sample, dtype=complex)
    base = np.diag(1.0 / (t - w))
    delta = r_sample - base
    scale = 1.0 + np.linalg.norm(r_sample, 2) + np.linalg.norm(base, 2)
    if np.linalg.norm(delta, 2) <= 1e-12 * scale:
        return ExtensionParams(zero_element(space), 1.0)

    u_mat, s, vh = np.linalg.svd(delta)
    if len(s) > 1 and s[1] > tol.rank_tol * s[0]:
        raise NotRankOne(f"resolvent difference has second singular value {s[1]:.3e}")

    row_expect = mu / (t - w)
    # delta = -outer(y, row); its top right singular row vh[0] must align with row
    cos = abs(np.sum(vh[0] * np.conj(row_expect))) / np.linalg.norm(row_expect)
    if cos < 1.0 - 1e-6:
        raise NotAnExtension("rank-one row factor is not the defect pairing at conj w")

    y = -delta @ np.conj(row_expect) / np.vdot(row_expect, row_expect).real
    v = SpaceElement(y * (t - w) / (t - BASE_POINT))
    q = normalized_q(space, v)
    c = 1.0 - evaluate(q, w, tol)
    params = ExtensionParams(v, c)

    check = krein_resolvent(space, params, w, tol)
    if np.linalg.norm(check - r_sample, 2) > 1e-10 * scale:
        raise NotAnExtension("recovered parameters do not reproduce the sample resolvent")
    return params


def _interpolation_probes(space: HerglotzSpace) -> np.ndarray:
    """Well conditioned probe set: points straight above and below each atom
    at half the local gap, plus one distant point for the constant column."""
    t = space.ts
    n = space.n
    if n == 1:
        offsets = np.array([1.0])
    else:
        gaps = np.diff(t)
        offsets = np.empty(n)
        offsets[0] = gaps[0]
        offsets[-1] = gaps[-1]
        for k in range(1, n - 1):
            offsets[k] = min(gaps[k - 1], gaps[k])
        offsets = 0.5 * offsets
    span = 1.0 + float(np.max(np.abs(t)))
    far = complex(np.mean(t), 2.0 * span)
    return np.concatenate([t + 1j * offsets, t - 1j * offsets, [far]])


def params_with_numerator_roots(
    space: HerglotzSpace,
    roots: list[tuple[complex, int]],
    tol: Tolerances = DEFAULT,
) -> ExtensionParams:
    """Parameters whose defining function has the prescribed numerator roots.

    The map (c, weights) -> numerator polynomial is a linear bijection onto
    polynomials of degree <= n, so any monic root configuration with total
    multiplicity <= n is reachable (a shortfall leaves the rest at infinity).
    Roots at atoms force those atom weights to zero; the corresponding
    unknowns are removed instead of snapped afterwards, since snapping would
    perturb coefficients enough to split an m-fold root by eps^(1/m).
    """
    n = space.n
    t, mu = space.ts, space.mus
    total = sum(m for _, m in roots)
    if total > n:
        raise Infeasible(f"requested total multiplicity {total} exceeds dimension {n}")
    target = np.array([1], dtype=complex)
    for z, m in roots:
        for _ in range(m):
            target = npoly.polymul(target, np.array([-z, 1], dtype=complex))
    forced_zero = {
        k for k in range(n) if any(abs(z - t[k]) <= tol.atom_attach_tol * (1.0 + abs(t[k])) for z, _ in roots)
    }
    active = np.array([k for k in range(n) if k not in forced_zero], dtype=int)

    probes = _interpolation_probes(space)
    rows = np.empty((len(probes), 1 + len(active)), dtype=complex)
    rhs = np.empty(len(probes), dtype=complex)
    for j, p in enumerate(probes):
        den = complex(np.prod(t - p))
        rows[j, 0] = 1.0
        rows[j, 1:] = (1.0 + t[active] * p) / (t[active] - p)
        rhs[j] = complex(npoly.polyval(p, target)) / den

    sol, _, rank, _ = np.linalg.lstsq(rows, rhs, rcond=tol.rank_tol)
    if rank < rows.shape[1]:
        raise Infeasible("interpolation system is numerically rank deficient")
    correction, _, _, _ = np.linalg.lstsq(rows, rhs - rows @ sol, rcond=tol.rank_tol)
    sol = sol + correction
    if np.linalg.norm(rows @ sol - rhs) > 1e-9 * (1.0 + np.linalg.norm(rhs)):
        raise Infeasible("interpolation system could not be solved accurately")

    c = complex(sol[0])
    rho = np.zeros(n, dtype=complex)
    rho[active] = sol[1:]
    v = SpaceElement(rho * (t + 1j) / mu)
    return ExtensionParams(v, c)


def interpolate_spectrum(
    space: HerglotzSpace,
    zeros: list[tuple[complex, int]],
    tol: Tolerances = DEFAULT,
) -> ExtensionParams:
    """Parameters whose extension has exactly the prescribed non-real spectrum.

    The remaining numerator degree is parked on the leading atoms, which turn
    into simple real eigenvalues there, leaving the non-real spectrum exactly
    as requested.
    """
    n = space.n
    total = sum(m for _, m in zeros)
    if total > n:
        raise Infeasible(f"requested total multiplicity {total} exceeds dimension {n}")
    if not zeros:
        return ExtensionParams(zero_element(space), 1.0)
    for z, m in zeros:
        if m < 1:
            raise Infeasible(f"multiplicity {m} at {z} is not positive")
        if abs(z.imag) <= tol.sep_min:
            raise Infeasible(f"prescribed zero {z} is not strictly non-real")
    fill = [(complex(space.ts[k]), 1) for k in range(n - total)]
    return params_with_numerator_roots(space, list(zeros) + fill, tol)


def blaschke_condition(zs: list[complex], tol: Tolerances = DEFAULT) -> tuple[bool, float]:
    """Summability certificate for a finite half-plane point list.

    Always satisfied for finite lists; the reported value is the sum of
    |Im(1/z_k)|.  Raises when the points do not sit in a single open half
    plane.
    """
    if not zs:
        return True, 0.0
    signs = {1 if z.imag > 0 else (-1 if z.imag < 0 else 0) for z in zs}
    if 0 in signs or len(signs) > 1:
        raise MixedHalfPlanes("points must lie in one open half plane")
    return True, float(sum(abs((1.0 / z).imag) for z in zs))
