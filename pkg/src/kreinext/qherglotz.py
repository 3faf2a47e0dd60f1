"""Quasi-Herglotz functions in canonical atomic form.

A function here is the triple ``(a, b, nu)`` with complex constants ``a``,
``b`` and a finite complex atomic measure ``nu``, evaluated as

    q(z) = a + b*z + sum_k (1 + t_k*z) / (t_k - z) * w_k.

The triple is canonical: two functions are equal exactly when their triples
are.  Because the measure is finitely atomic, every such function is rational
with denominator ``prod_k (t_k - z)``, which makes zero sets and
multiplicities exactly computable.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as npoly

from .config import DEFAULT, Tolerances
from .errors import IdenticallyZero, PoleAt
from .measures import ComplexAtomicMeasure, NonnegAtomicMeasure, jordan_decompose, support, total_variation


@dataclass(frozen=True)
class QuasiHerglotz:
    a: complex
    b: complex
    nu: ComplexAtomicMeasure

    def __init__(self, a: complex = 0, b: complex = 0, nu: ComplexAtomicMeasure | None = None):
        object.__setattr__(self, "a", complex(a))
        object.__setattr__(self, "b", complex(b))
        object.__setattr__(self, "nu", nu if nu is not None else ComplexAtomicMeasure())

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.nu.is_empty


@dataclass(frozen=True)
class RationalForm:
    """Numerator/denominator pair with denominator fixed to prod(t_k - z).

    No gcd cancellation is performed; the denominator is pinned to the atom
    set so that numerator roots at atoms stay visible to callers.
    Coefficients are stored lowest degree first.
    """

    numerator: tuple[complex, ...]
    denominator: tuple[complex, ...]

    def evaluate(self, z: complex) -> complex:
        return complex(npoly.polyval(z, np.asarray(self.numerator))) / complex(
            npoly.polyval(z, np.asarray(self.denominator))
        )


def check_off_atoms(ts: np.ndarray, z: complex, tol: Tolerances = DEFAULT) -> None:
    """Raise :class:`PoleAt` when ``z`` is within ``sep_min`` of an atom."""
    if ts.size == 0:
        return
    dist = np.abs(ts - z)
    k = int(np.argmin(dist))
    if dist[k] < tol.sep_min:
        raise PoleAt(z, float(ts[k]))


def evaluate(q: QuasiHerglotz, z: complex, tol: Tolerances = DEFAULT) -> complex:
    ts, ws = q.nu.ts, q.nu.ws
    check_off_atoms(ts, z, tol)
    return complex(q.a + q.b * z + np.sum((1 + ts * z) / (ts - z) * ws))


def evaluate_derivative(q: QuasiHerglotz, z: complex, order: int, tol: Tolerances = DEFAULT) -> complex:
    """Derivative of any order, in closed form.

    Uses (1+t*z)/(t-z) = -t + (1+t^2)/(t-z), whose r-th derivative is
    (1+t^2) * r! / (t-z)^(r+1).
    """
    if order == 0:
        return evaluate(q, z, tol)
    ts, ws = q.nu.ts, q.nu.ws
    check_off_atoms(ts, z, tol)
    out = q.b if order == 1 else 0j
    out += factorial(order) * np.sum(ws * (1 + ts**2) / (ts - z) ** (order + 1))
    return complex(out)


def shift_constant(q: QuasiHerglotz, c: complex) -> QuasiHerglotz:
    return QuasiHerglotz(q.a + c, q.b, q.nu)


def scale(q: QuasiHerglotz, s: complex) -> QuasiHerglotz:
    return QuasiHerglotz(s * q.a, s * q.b, ComplexAtomicMeasure([(t, s * w) for t, w in q.nu.atoms]))


def add(q1: QuasiHerglotz, q2: QuasiHerglotz) -> QuasiHerglotz:
    merged = ComplexAtomicMeasure(list(q1.nu.atoms) + list(q2.nu.atoms))
    return QuasiHerglotz(q1.a + q2.a, q1.b + q2.b, merged)


def _denominator(ts: np.ndarray) -> np.ndarray:
    den = np.array([1], dtype=complex)
    for t in ts:
        den = npoly.polymul(den, np.array([t, -1], dtype=complex))
    return den


def rational_numerator(a: complex, b: complex, ts: np.ndarray, ws: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Numerator and denominator of a + b*z + sum w_k (1+t_k z)/(t_k - z).

    The atom list may include zero weights; they still contribute their
    factor to the fixed denominator.  Returns ascending coefficient arrays.
    """
    den = _denominator(ts)
    num = npoly.polymul(np.array([a, b], dtype=complex), den)
    for k in range(len(ts)):
        cofactor = np.array([1], dtype=complex)
        for j in range(len(ts)):
            if j != k:
                cofactor = npoly.polymul(cofactor, np.array([ts[j], -1], dtype=complex))
        term = npoly.polymul(np.array([1, ts[k]], dtype=complex), cofactor) * ws[k]
        num = npoly.polyadd(num, term)
    # polyadd trims nothing; pad to a fixed length for predictable shape
    width = len(den) + 1
    out = np.zeros(width, dtype=complex)
    out[: len(num)] = num
    return out, den


def rational_form(q: QuasiHerglotz) -> RationalForm:
    num, den = rational_numerator(q.a, q.b, q.nu.ts, q.nu.ws)
    return RationalForm(tuple(num), tuple(den))


def trim_polynomial(coeffs: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    """Drop leading coefficients below ``rel`` times the largest modulus."""
    mags = np.abs(coeffs)
    top = mags.max() if mags.size else 0.0
    if top == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(mags > rel * top)[0]
    return np.array(coeffs[: keep[-1] + 1], dtype=complex)


def polynomial_scale(coeffs: np.ndarray, z: complex) -> float:
    """Natural magnitude of a polynomial near ``z``: sum |c_j| max(1,|z|)^j."""
    r = max(1.0, abs(z))
    return float(np.sum(np.abs(coeffs) * r ** np.arange(len(coeffs))))


def _poly_derivative_value(coeffs: np.ndarray, z: complex, order: int) -> complex:
    d = npoly.polyder(coeffs, order) if order else coeffs
    return complex(npoly.polyval(z, d)) if len(d) else 0j


def vanishes_to_order(coeffs: np.ndarray, z: complex, m: int, vanish_tol: float) -> bool:
    """Value and first m-1 derivatives below ``vanish_tol`` relative to scale."""
    for j in range(m):
        cj = npoly.polyder(coeffs, j) if j else coeffs
        ref = polynomial_scale(cj, z)
        if ref == 0.0:
            return False
        if abs(_poly_derivative_value(coeffs, z, j)) > vanish_tol * ref:
            return False
    return True


def is_multiple_root(coeffs: np.ndarray, z: complex, m: int, root_tol: float) -> bool:
    """Certify that ``z`` is a root of multiplicity exactly ``m``.

    The first ``m-1`` derivatives must vanish within ``root_tol`` relative to
    the derivative's own scale at ``z`` and the ``m``-th must not.
    """
    if not vanishes_to_order(coeffs, z, m, root_tol):
        return False
    if m < len(coeffs) - 1:
        ref = polynomial_scale(npoly.polyder(coeffs, m), z)
        return abs(_poly_derivative_value(coeffs, z, m)) > root_tol * ref
    return True  # m equals the degree: nothing left to be nonzero


def _newton_refine(coeffs: np.ndarray, z0: complex, m: int, steps: int = 16) -> complex:
    """Polish an m-fold root candidate on the (m-1)-th derivative.

    At a true m-fold root the (m-1)-th derivative has a simple zero, so the
    iteration converges quadratically from the cluster mean.
    """
    d = npoly.polyder(coeffs, m - 1) if m > 1 else coeffs
    dd = npoly.polyder(d)
    z = complex(z0)
    for _ in range(steps):
        dval = complex(npoly.polyval(z, dd)) if len(dd) else 0j
        if dval == 0:
            break
        step = complex(npoly.polyval(z, d)) / dval
        z -= step
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    return z


def _group_points(points: list[complex], radius_rel: float) -> list[list[complex]]:
    groups: list[list[complex]] = [[z] for z in points]
    merged = True
    while merged and len(groups) > 1:
        merged = False
        centers = [sum(g) / len(g) for g in groups]
        pairs = sorted(
            (abs(centers[i] - centers[j]), i, j)
            for i in range(len(groups))
            for j in range(i + 1, len(groups))
        )
        for d, i, j in pairs:
            center = (centers[i] * len(groups[i]) + centers[j] * len(groups[j])) / (
                len(groups[i]) + len(groups[j])
            )
            if d <= radius_rel * (1.0 + abs(center)):
                groups[i] = groups[i] + groups[j]
                del groups[j]
                merged = True
                break
    return groups


def cluster_roots(coeffs: np.ndarray, roots: np.ndarray, tol: Tolerances = DEFAULT) -> list[tuple[complex, int]]:
    """Group raw roots into certified multiple roots.

    Tries grouping radii from coarse to fine (multiple roots split by
    eps^(1/m), so the radius must shrink only when certification fails).
    Each candidate group is polished by Newton on the matching derivative
    order and certified by derivative vanishing at the refined center; the
    first radius at which every group certifies wins.  Falls back to plain
    greedy clustering at ``root_tol`` when nothing certifies.
    """
    pts = [complex(z) for z in roots]
    if not pts:
        return []
    vanish_tol = 1e-11
    for rung in (1e-2, 1e-4, 1e-6, tol.root_tol):
        groups = _group_points(pts, rung)
        ok = True
        out: list[tuple[complex, int]] = []
        for members in groups:
            m = len(members)
            mean = sum(members) / m
            if m == 1:
                out.append((mean, 1))
                continue
            spread = max(abs(z - mean) for z in members)
            z = _newton_refine(coeffs, mean, m)
            if abs(z - mean) > 2.0 * spread + rung * (1.0 + abs(mean)):
                ok = False
                break
            if not vanishes_to_order(coeffs, z, m, vanish_tol):
                ok = False
                break
            if not is_multiple_root(coeffs, z, m, tol.root_tol):
                ok = False
                break
            out.append((z, m))
        if ok:
            return sorted(out, key=lambda cm: (cm[0].real, cm[0].imag))
    fallback = [(sum(g) / len(g), len(g)) for g in _group_points(pts, tol.root_tol)]
    return sorted(fallback, key=lambda cm: (cm[0].real, cm[0].imag))


def zeros_with_multiplicity(q: QuasiHerglotz, tol: Tolerances = DEFAULT) -> list[tuple[complex, int]]:
    """All zeros of ``q`` with multiplicities, via the numerator polynomial.

    Roots are companion-matrix eigenvalues of the exact numerator; clusters
    are certified by derivative tests.  Numerator roots that sit on a
    denominator root (an atom) are treated as cancelled and dropped.
    """
    if q.is_zero:
        raise IdenticallyZero("the zero function has no zero set")
    num, den = rational_numerator(q.a, q.b, q.nu.ts, q.nu.ws)
    num = trim_polynomial(num)
    if len(num) == 1:
        return []
    roots = npoly.polyroots(num)
    clusters = cluster_roots(num, roots, tol)
    ts = q.nu.ts
    out = []
    for z, m in clusters:
        if ts.size and np.min(np.abs(ts - z)) <= tol.root_tol * (1.0 + abs(z)):
            continue
        out.append((z, m))
    return out


def is_herglotz(q: QuasiHerglotz, tol: Tolerances = DEFAULT) -> bool:
    """Membership in the Herglotz-Nevanlinna class.

    In the atomic representation this is exactly: real constant, real
    nonnegative slope, strictly positive real weights.  Realness is tested
    with a relative slack so that values assembled in floating point pass.
    """
    eps = tol.herglotz_tol

    def real_enough(x: complex) -> bool:
        return abs(x.imag) <= eps * (1.0 + abs(x))

    if not real_enough(q.a):
        return False
    if not real_enough(q.b) or q.b.real < -eps:
        return False
    for _, w in q.nu.atoms:
        if not real_enough(w) or w.real <= 0:
            return False
    return True


def herglotz_quadruple(
    q: QuasiHerglotz,
) -> tuple[QuasiHerglotz, QuasiHerglotz, QuasiHerglotz, QuasiHerglotz]:
    """Split ``q = (h1 - h2) + i (h3 - h4)`` with every part Herglotz or zero."""
    n1, n2, n3, n4 = jordan_decompose(q.nu)

    def part(x: float) -> tuple[float, float]:
        return (x, 0.0) if x >= 0 else (0.0, -x)

    a1, a2 = part(q.a.real)
    a3, a4 = part(q.a.imag)
    b1, b2 = part(q.b.real)
    b3, b4 = part(q.b.imag)
    return (
        QuasiHerglotz(a1, b1, n1.as_complex()),
        QuasiHerglotz(a2, b2, n2.as_complex()),
        QuasiHerglotz(a3, b3, n3.as_complex()),
        QuasiHerglotz(a4, b4, n4.as_complex()),
    )


def analyticity_domain(q: QuasiHerglotz) -> list[float]:
    """Points removed from the domain: the support of |nu|."""
    return support(total_variation(q.nu))
