"""Invariant suites behind the ``verify`` command and the property tests.

Each property is a pure function of a batch of instances plus a seeded
generator and returns its worst residual; the registry pairs it with the
tolerance it must meet.  Boolean checks report 0.0 on success and 1.0 per
violation so they flow through the same reporting path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import hspace, krein, measures, models, qherglotz
from .config import DEFAULT, Tolerances
from .errors import QZero, ZeroOfG
from .hspace import HerglotzSpace, SpaceElement
from .krein import ExtensionParams
from .relations import (
    LinearRelationFD,
    containment_residual,
    relation_spectrum,
    spectra_agreement,
    subspace_distance,
)
from .sampling import random_blaschke, random_element, random_nonreal

Instance = tuple[HerglotzSpace, ExtensionParams]


@dataclass
class VerifyContext:
    instances: Sequence[Instance]
    seed: int
    tol: Tolerances
    fault: str | None = None

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


@dataclass
class PropertyOutcome:
    name: str
    residual: float
    tolerance: float
    passed: bool


def _rel(delta: complex | float, scale: float) -> float:
    return float(abs(delta) / (1.0 + scale))


def _safe_nonreal(rng: np.random.Generator, space: HerglotzSpace) -> complex:
    span = 1.0 + float(np.max(np.abs(space.ts)))
    return random_nonreal(rng, scale=span + 1.0, min_imag=0.2)


# ---------------------------------------------------------------- measures


def prop_jordan_recombine(ctx: VerifyContext) -> float:
    rng = ctx.rng(1)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 7))
        ts = np.sort(rng.uniform(-3, 3, size=n))
        ws = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        m = measures.ComplexAtomicMeasure(list(zip(ts, ws)))
        back = measures.jordan_recombine(measures.jordan_decompose(m))
        if len(back.atoms) != len(m.atoms):
            return 1.0
        for (t1, w1), (t2, w2) in zip(m.atoms, back.atoms):
            worst = max(worst, abs(t1 - t2), _rel(w1 - w2, abs(w1)))
    return worst


def prop_tv_minimality(ctx: VerifyContext) -> float:
    rng = ctx.rng(2)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 7))
        ts = np.sort(rng.uniform(-3, 3, size=n))
        ws = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        m = measures.ComplexAtomicMeasure(list(zip(ts, ws)))
        tv1 = measures.total_variation(m)
        tv2 = measures.total_variation(measures.jordan_recombine(measures.jordan_decompose(m)))
        for (t1, w1), (t2, w2) in zip(tv1.atoms, tv2.atoms):
            worst = max(worst, abs(t1 - t2), _rel(w1 - w2, abs(w1)))
    return worst


# --------------------------------------------------------------- qherglotz


def prop_conj_symmetry(ctx: VerifyContext) -> float:
    rng = ctx.rng(3)
    worst = 0.0
    for space, _ in ctx.instances:
        h = space.base_function
        for _ in range(5):
            z = _safe_nonreal(rng, space)
            lhs = qherglotz.evaluate(h, np.conj(z), ctx.tol)
            rhs = np.conj(qherglotz.evaluate(h, z, ctx.tol))
            worst = max(worst, _rel(lhs - rhs, abs(rhs)))
    return worst


def prop_positivity(ctx: VerifyContext) -> float:
    rng = ctx.rng(4)
    worst = 0.0
    for space, _ in ctx.instances:
        h = space.base_function
        for _ in range(5):
            z = _safe_nonreal(rng, space)
            z = complex(z.real, abs(z.imag))
            val = qherglotz.evaluate(h, z, ctx.tol)
            worst = max(worst, max(0.0, -val.imag))
    return worst


def prop_rational_agreement(ctx: VerifyContext) -> float:
    rng = ctx.rng(5)
    worst = 0.0
    for space, params in ctx.instances:
        g = krein.g_function(space, params)
        rf = qherglotz.rational_form(g)
        for _ in range(20):
            z = _safe_nonreal(rng, space)
            direct = qherglotz.evaluate(g, z, ctx.tol)
            via = rf.evaluate(z)
            worst = max(worst, _rel(direct - via, abs(direct)))
    return worst


def prop_quadruple_recombine(ctx: VerifyContext) -> float:
    rng = ctx.rng(6)
    worst = 0.0
    for space, params in ctx.instances:
        g = krein.g_function(space, params)
        h1, h2, h3, h4 = qherglotz.herglotz_quadruple(g)
        for h in (h1, h2, h3, h4):
            if not (h.is_zero or qherglotz.is_herglotz(h, ctx.tol)):
                return 1.0
        for _ in range(5):
            z = _safe_nonreal(rng, space)
            direct = qherglotz.evaluate(g, z, ctx.tol)
            combo = (
                qherglotz.evaluate(h1, z, ctx.tol)
                - qherglotz.evaluate(h2, z, ctx.tol)
                + 1j * (qherglotz.evaluate(h3, z, ctx.tol) - qherglotz.evaluate(h4, z, ctx.tol))
            )
            worst = max(worst, _rel(direct - combo, abs(direct)))
    return worst


def prop_zero_certificates(ctx: VerifyContext) -> float:
    worst = 0.0
    for space, params in ctx.instances:
        g = krein.g_function(space, params)
        num, _ = qherglotz.rational_numerator(g.a, g.b, g.nu.ts, g.nu.ws)
        num = qherglotz.trim_polynomial(num)
        for z, m in qherglotz.zeros_with_multiplicity(g, ctx.tol):
            for j in range(m):
                coeffs = npoly.polyder(num, j) if j else num
                ref = qherglotz.polynomial_scale(coeffs, z)
                worst = max(worst, abs(npoly.polyval(z, coeffs)) / ref)
            if not qherglotz.is_multiple_root(num, z, m, ctx.tol.root_tol):
                return 1.0
    return worst


# ------------------------------------------------------------------ hspace


def prop_reproducing(ctx: VerifyContext) -> float:
    rng = ctx.rng(7)
    worst = 0.0
    for space, _ in ctx.instances:
        for _ in range(5):
            f = random_element(rng, space.n)
            w = _safe_nonreal(rng, space)
            kw = hspace.kernel_vector(space, w, ctx.tol)
            if ctx.fault == "kernel":
                bumped = np.array(kw.coords)
                bumped[0] *= 1.0 + 1e-3
                kw = SpaceElement(bumped)
            lhs = hspace.inner(space, f, kw)
            rhs = hspace.eval_element(space, f, w, ctx.tol)
            worst = max(worst, _rel(lhs - rhs, abs(rhs)))
    return worst


def prop_kernel_consistency(ctx: VerifyContext) -> float:
    rng = ctx.rng(8)
    worst = 0.0
    for space, _ in ctx.instances:
        h = space.base_function
        for _ in range(5):
            z = _safe_nonreal(rng, space)
            w = _safe_nonreal(rng, space)
            if abs(z - np.conj(w)) < 1e-3:
                continue
            coord = hspace.kernel(space, z, w, ctx.tol)
            hz = qherglotz.evaluate(h, z, ctx.tol)
            hw = qherglotz.evaluate(h, w, ctx.tol)
            quot = (hz - np.conj(hw)) / (z - np.conj(w))
            worst = max(worst, _rel(coord - quot, abs(coord)))
    return worst


def prop_kernel_diagonal(ctx: VerifyContext) -> float:
    rng = ctx.rng(9)
    worst = 0.0
    for space, _ in ctx.instances:
        h = space.base_function
        for _ in range(3):
            w = _safe_nonreal(rng, space)
            diag = hspace.kernel(space, np.conj(w), w, ctx.tol)
            deriv = qherglotz.evaluate_derivative(h, w, 1, ctx.tol)
            worst = max(worst, _rel(diag - deriv, abs(deriv)))
    return worst


def prop_kernel_psd(ctx: VerifyContext) -> float:
    rng = ctx.rng(10)
    worst = 0.0
    for space, _ in ctx.instances:
        pts = [_safe_nonreal(rng, space) for _ in range(min(space.n + 2, 6))]
        gram = np.array([[hspace.kernel(space, zi, zj, ctx.tol) for zj in pts] for zi in pts])
        herm = np.linalg.norm(gram - gram.conj().T, 2)
        eigs = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
        trace = float(np.trace(gram).real)
        worst = max(worst, herm / (1.0 + trace), max(0.0, -float(eigs[0])) / trace)
    return worst


def prop_diffq_adjoint(ctx: VerifyContext) -> float:
    rng = ctx.rng(11)
    worst = 0.0
    for space, _ in ctx.instances:
        for _ in range(5):
            f = random_element(rng, space.n)
            g = random_element(rng, space.n)
            w = _safe_nonreal(rng, space)
            lhs = hspace.inner(space, hspace.diff_quotient(space, f, w, ctx.tol), g)
            rhs = hspace.inner(space, f, hspace.diff_quotient(space, g, np.conj(w), ctx.tol))
            worst = max(worst, _rel(lhs - rhs, abs(lhs)))
    return worst


def prop_resolvent_identity_base(ctx: VerifyContext) -> float:
    rng = ctx.rng(12)
    worst = 0.0
    for space, _ in ctx.instances:
        for _ in range(5):
            w = _safe_nonreal(rng, space)
            z = _safe_nonreal(rng, space)
            if abs(w - z) < 1e-3:
                continue
            for k in range(space.n):
                f = SpaceElement(np.eye(space.n)[k])
                dw = hspace.diff_quotient(space, f, w, ctx.tol).coords
                dz = hspace.diff_quotient(space, f, z, ctx.tol).coords
                dwz = hspace.diff_quotient(space, SpaceElement(dz), w, ctx.tol).coords
                worst = max(worst, float(np.max(np.abs((w - z) * dwz - (dw - dz)))))
    return worst


def prop_s_subset_a(ctx: VerifyContext) -> float:
    worst = 0.0
    for space, _ in ctx.instances:
        s, a = hspace.sym_and_selfadjoint(space, ctx.tol)
        worst = max(worst, containment_residual(s, a))
    return worst


def prop_resolvent_is_diffq(ctx: VerifyContext) -> float:
    rng = ctx.rng(13)
    worst = 0.0
    for space, _ in ctx.instances:
        w = _safe_nonreal(rng, space)
        a = hspace.multiplication_matrix(space)
        res = np.linalg.inv(a - w * np.eye(space.n))
        for k in range(space.n):
            f = SpaceElement(np.eye(space.n)[k])
            dq = hspace.diff_quotient(space, f, w, ctx.tol).coords
            worst = max(worst, float(np.max(np.abs(res @ f.coords - dq))))
    return worst


def prop_phi_membership(ctx: VerifyContext) -> float:
    rng = ctx.rng(14)
    worst = 0.0
    for space, _ in ctx.instances:
        phi = krein.base_defect_element(space)
        for _ in range(5):
            w = _safe_nonreal(rng, space)
            lhs = krein.phi_field(space, phi, w, ctx.tol).coords
            rhs = hspace.defect_vector(space, w, ctx.tol).coords
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / (1.0 + np.abs(rhs)))))
    return worst


def prop_defect_orthogonality(ctx: VerifyContext) -> float:
    rng = ctx.rng(15)
    worst = 0.0
    for space, _ in ctx.instances:
        if space.n < 2:
            continue
        w = _safe_nonreal(rng, space)
        eta = hspace.defect_vector(space, w, ctx.tol)
        s, _ = hspace.sym_and_selfadjoint(space, ctx.tol)
        e, f = s.pencil
        for col in range(e.shape[1]):
            u, su = e[:, col], f[:, col]
            val = hspace.inner(space, SpaceElement(su - np.conj(w) * u), eta)
            worst = max(worst, _rel(val, float(np.linalg.norm(u))))
    return worst


def prop_simplicity(ctx: VerifyContext) -> float:
    rng = ctx.rng(16)
    worst = 0.0
    for space, _ in ctx.instances:
        probes = [_safe_nonreal(rng, space) for _ in range(space.n)]
        rank = hspace.simplicity_rank(space, probes, ctx.tol)
        worst = max(worst, float(space.n - rank))
    return worst


# ------------------------------------------------------------------- krein


def prop_resolvent_identity_t(ctx: VerifyContext) -> float:
    rng = ctx.rng(17)
    worst = 0.0
    for space, params in ctx.instances:
        pairs = 0
        while pairs < 5:
            w = _safe_nonreal(rng, space)
            z = _safe_nonreal(rng, space)
            if abs(w - z) < 1e-3:
                continue
            try:
                tw = krein.krein_resolvent(space, params, w, ctx.tol)
                tz = krein.krein_resolvent(space, params, z, ctx.tol)
            except QZero:
                continue
            pairs += 1
            lhs = (w - z) * tw @ tz
            rhs = tw - tz
            denom = 1.0 + np.linalg.norm(tw, 2) * np.linalg.norm(tz, 2)
            worst = max(worst, float(np.linalg.norm(lhs - rhs, 2) / denom))
    return worst


def prop_q_defining_identity(ctx: VerifyContext) -> float:
    rng = ctx.rng(18)
    worst = 0.0
    for space, params in ctx.instances:
        q = krein.normalized_q(space, params.v)
        phi = krein.base_defect_element(space)
        for _ in range(5):
            z = _safe_nonreal(rng, space)
            w = _safe_nonreal(rng, space)
            if abs(z - np.conj(w)) < 1e-3:
                continue
            quot = (qherglotz.evaluate(q, z, ctx.tol) - qherglotz.evaluate(q, np.conj(w), ctx.tol)) / (z - np.conj(w))
            pair = hspace.inner(
                space, krein.phi_field(space, params.v, z, ctx.tol), krein.phi_field(space, phi, w, ctx.tol)
            )
            worst = max(worst, _rel(quot - pair, abs(pair)))
    return worst


def prop_q_single_point(ctx: VerifyContext) -> float:
    """The base-point identity alone already determines the Q-function."""
    rng = ctx.rng(19)
    worst = 0.0
    for space, params in ctx.instances:
        phi = krein.base_defect_element(space)
        q = krein.normalized_q(space, params.v)

        def one_point(z: complex) -> complex:
            pair = hspace.inner(space, krein.phi_field(space, params.v, z, ctx.tol), phi)
            return (z + 1j) * pair

        offset = qherglotz.evaluate(q, -1j, ctx.tol)  # q(conj i); one_point(-1j)=0 by construction
        for _ in range(5):
            z = _safe_nonreal(rng, space)
            w = _safe_nonreal(rng, space)
            if abs(z - np.conj(w)) < 1e-3:
                continue
            qa = one_point(z) + offset
            qb = one_point(np.conj(w)) + offset
            quot = (qa - qb) / (z - np.conj(w))
            pair = hspace.inner(
                space, krein.phi_field(space, params.v, z, ctx.tol), krein.phi_field(space, phi, w, ctx.tol)
            )
            worst = max(worst, _rel(quot - pair, abs(pair)))
            worst = max(worst, _rel(qa - qherglotz.evaluate(q, z, ctx.tol), abs(qa)))
    return worst


def prop_q_herglotz_special(ctx: VerifyContext) -> float:
    worst = 0.0
    for space, _ in ctx.instances:
        phi = krein.base_defect_element(space)
        q = krein.normalized_q(space, phi)
        if not qherglotz.is_herglotz(q, ctx.tol):
            return 1.0
        worst = max(worst, abs(q.b))
        expected = space.nus
        got = np.array([q.nu.weight_at(t) for t in space.ts])
        worst = max(worst, float(np.max(np.abs(got - expected) / (1.0 + expected))))
    return worst


def prop_b_vanishes(ctx: VerifyContext) -> float:
    worst = 0.0
    for space, params in ctx.instances:
        worst = max(worst, abs(krein.normalized_q(space, params.v).b))
    return worst


def prop_q_linearity(ctx: VerifyContext) -> float:
    rng = ctx.rng(20)
    worst = 0.0
    for space, params in ctx.instances:
        v2 = random_element(rng, space.n)
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        combo = SpaceElement(alpha * np.asarray(params.v.coords) + np.asarray(v2.coords))
        w_combo = krein.q_weights(space, combo)
        w_split = alpha * krein.q_weights(space, params.v) + krein.q_weights(space, v2)
        worst = max(worst, float(np.max(np.abs(w_combo - w_split) / (1.0 + np.abs(w_split)))))
    return worst


def prop_t_inverts_s(ctx: VerifyContext) -> float:
    rng = ctx.rng(21)
    worst = 0.0
    for space, params in ctx.instances:
        if space.n < 2:
            continue
        s, _ = hspace.sym_and_selfadjoint(space, ctx.tol)
        e, f = s.pencil
        w = krein.resolvent_sample_point(space, params, ctx.tol)
        t_mat = krein.krein_resolvent(space, params, w, ctx.tol)
        for col in range(e.shape[1]):
            u, su = e[:, col], f[:, col]
            back = t_mat @ (su - w * u)
            worst = max(worst, float(np.max(np.abs(back - u))) / (1.0 + float(np.max(np.abs(u)))))
    return worst


def prop_relation_contains_s(ctx: VerifyContext) -> float:
    worst = 0.0
    for space, params in ctx.instances:
        s, _ = hspace.sym_and_selfadjoint(space, ctx.tol)
        w = krein.resolvent_sample_point(space, params, ctx.tol)
        rel = krein.reconstruct_relation(space, params, w, ctx.tol)
        worst = max(worst, containment_residual(s, rel))
    return worst


def prop_z_independence(ctx: VerifyContext) -> float:
    rng = ctx.rng(22)
    worst = 0.0
    for space, params in ctx.instances:
        z1 = krein.resolvent_sample_point(space, params, ctx.tol)
        tries = 0
        while tries < 10:
            z2 = _safe_nonreal(rng, space)
            if abs(z2 - z1) < 1e-2:
                tries += 1
                continue
            try:
                rel2 = krein.reconstruct_relation(space, params, z2, ctx.tol)
            except QZero:
                tries += 1
                continue
            break
        else:
            continue
        rel1 = krein.reconstruct_relation(space, params, z1, ctx.tol)
        worst = max(worst, subspace_distance(rel1, rel2))
    return worst


def prop_identify_roundtrip(ctx: VerifyContext) -> float:
    worst = 0.0
    for space, params in ctx.instances:
        w = krein.resolvent_sample_point(space, params, ctx.tol)
        sample = krein.krein_resolvent(space, params, w, ctx.tol)
        recovered = krein.identify_params(space, sample, w, ctx.tol)
        rel1 = krein.reconstruct_relation(space, params, w, ctx.tol)
        rel2 = krein.reconstruct_relation(space, recovered, w, ctx.tol)
        worst = max(worst, subspace_distance(rel1, rel2))
    return worst


def prop_spectrum_equivalence(ctx: VerifyContext) -> float:
    worst = 0.0
    for space, params in ctx.instances:
        analytic = krein.extension_spectrum(space, params, ctx.tol)
        w = krein.resolvent_sample_point(space, params, ctx.tol)
        pencil = relation_spectrum(krein.reconstruct_relation(space, params, w, ctx.tol), ctx.tol)
        worst = max(worst, spectra_agreement(analytic, pencil))
    return worst


def prop_geometric_simplicity(ctx: VerifyContext) -> float:
    worst = 0.0
    for space, params in ctx.instances:
        w = krein.resolvent_sample_point(space, params, ctx.tol)
        pencil = relation_spectrum(krein.reconstruct_relation(space, params, w, ctx.tol), ctx.tol)
        for e in pencil.eigenvalues:
            if e.geometric != 1:
                worst = max(worst, float(abs(e.geometric - 1)))
    return worst


def prop_defect_rescaling(ctx: VerifyContext) -> float:
    """Scaling the defect element by lam and v by 1/lam keeps the extension.

    The constant transforms as c -> c * conj(lam)/lam, which reduces to the
    plain statement for real lam.
    """
    rng = ctx.rng(23)
    worst = 0.0
    for space, params in ctx.instances:
        lam = complex(rng.standard_normal(), rng.standard_normal())
        if abs(lam) < 0.1:
            lam += 1.0
        phi = krein.base_defect_element(space)
        scaled_phi = SpaceElement(lam * np.asarray(phi.coords))
        scaled_v = SpaceElement(np.asarray(params.v.coords) / lam)
        scaled_c = params.c * np.conj(lam) / lam
        w = krein.resolvent_sample_point(space, params, ctx.tol)
        t1 = krein.krein_resolvent(space, params, w, ctx.tol)
        t2 = krein.krein_resolvent(
            space, ExtensionParams(scaled_v, scaled_c), w, ctx.tol, defect=scaled_phi
        )
        worst = max(worst, float(np.linalg.norm(t1 - t2, 2) / (1.0 + np.linalg.norm(t1, 2))))
    return worst


# ------------------------------------------------------------------ models


def prop_leibniz(ctx: VerifyContext) -> float:
    rng = ctx.rng(24)
    worst = 0.0
    for space, params in ctx.instances:
        g = models.from_extension(space, params)
        x = random_element(rng, space.n)
        for _ in range(5):
            w = _safe_nonreal(rng, space)
            z = _safe_nonreal(rng, space)
            if abs(z - w) < 1e-3:
                continue

            def gv(p):
                return models.m_eval(space, g, p, ctx.tol)

            def fv(p):
                return hspace.eval_element(space, x, p, ctx.tol)

            lhs = (gv(z) * fv(z) - gv(w) * fv(w)) / (z - w)
            rhs = gv(z) * (fv(z) - fv(w)) / (z - w) + fv(w) * (gv(z) - gv(w)) / (z - w)
            worst = max(worst, _rel(lhs - rhs, abs(lhs)))
    return worst


def prop_closure_phi_consistency(ctx: VerifyContext) -> float:
    """Difference quotients of g equal the Cauchy transform of phi_v(w)."""
    rng = ctx.rng(25)
    worst = 0.0
    for space, params in ctx.instances:
        g = models.from_extension(space, params)
        for _ in range(5):
            w = _safe_nonreal(rng, space)
            z = _safe_nonreal(rng, space)
            if abs(z - w) < 1e-3:
                continue
            dq = (models.m_eval(space, g, z, ctx.tol) - models.m_eval(space, g, w, ctx.tol)) / (z - w)
            coords = krein.phi_field(space, params.v, w, ctx.tol)
            via = hspace.eval_element(space, coords, z, ctx.tol)
            worst = max(worst, _rel(dq - via, abs(via)))
    return worst


def prop_lh_subset_mh(ctx: VerifyContext) -> float:
    rng = ctx.rng(26)
    worst = 0.0
    for space, _ in ctx.instances:
        x = random_element(rng, space.n)
        g = models.element_to_mfunction(space, x)
        for _ in range(5):
            z = _safe_nonreal(rng, space)
            lhs = models.m_eval(space, g, z, ctx.tol)
            rhs = hspace.eval_element(space, x, z, ctx.tol)
            worst = max(worst, _rel(lhs - rhs, abs(rhs)))
    return worst


def prop_extension_mfunction_roundtrip(ctx: VerifyContext) -> float:
    rng = ctx.rng(27)
    worst = 0.0
    for space, params in ctx.instances:
        g = models.from_extension(space, params)
        back = models.to_extension(space, g)
        worst = max(
            worst,
            float(np.max(np.abs(np.asarray(back.v.coords) - np.asarray(params.v.coords)))),
            abs(back.c - params.c),
        )
        q = krein.g_function(space, params)
        for _ in range(3):
            z = _safe_nonreal(rng, space)
            worst = max(
                worst,
                _rel(
                    models.m_eval(space, g, z, ctx.tol) - qherglotz.evaluate(q, z, ctx.tol),
                    abs(qherglotz.evaluate(q, z, ctx.tol)),
                ),
            )
    return worst


def prop_bridge_relation(ctx: VerifyContext) -> float:
    rng = ctx.rng(28)
    worst = 0.0
    for space, _ in ctx.instances:
        y = random_element(rng, space.n)
        b = models.perturbation_matrix(space, y)
        params = models.rank_one_bridge(space, y, ctx.tol)
        w = krein.resolvent_sample_point(space, params, ctx.tol)
        rel = krein.reconstruct_relation(space, params, w, ctx.tol)
        graph = LinearRelationFD.from_operator(b)
        worst = max(worst, subspace_distance(rel, graph))
    return worst


def prop_bridge_spectrum(ctx: VerifyContext) -> float:
    rng = ctx.rng(29)
    worst = 0.0
    for space, _ in ctx.instances:
        y = random_element(rng, space.n)
        _, dense = models.rank_one_forward(space, y, ctx.tol)
        params = models.rank_one_bridge(space, y, ctx.tol)
        analytic = krein.extension_spectrum(space, params, ctx.tol)
        worst = max(worst, spectra_agreement(analytic, dense, require_geometric=True))
    return worst


def prop_blaschke_kernel_identity(ctx: VerifyContext) -> float:
    rng = ctx.rng(30)
    worst = 0.0
    for k in range(6):
        bp = random_blaschke(ctx.rng(300 + k), int(ctx.rng(400 + k).integers(1, 5)))
        space, g = models.blaschke_cayley(bp, ctx.tol)
        for _ in range(5):
            z = _safe_nonreal(rng, space)
            w = _safe_nonreal(rng, space)
            vz, vw = bp.evaluate(z), bp.evaluate(w)
            lhs = (1.0 + vz) * hspace.kernel(space, z, w, ctx.tol) * (1.0 + np.conj(vw)) / 2.0
            rhs = (1.0 - vz * np.conj(vw)) / (-1j * (z - np.conj(w)))
            worst = max(worst, _rel(lhs - rhs, abs(rhs)))
    return worst


def prop_blaschke_g_matches(ctx: VerifyContext) -> float:
    rng = ctx.rng(31)
    worst = 0.0
    for k in range(6):
        bp = random_blaschke(ctx.rng(500 + k), int(ctx.rng(600 + k).integers(1, 5)))
        space, g = models.blaschke_cayley(bp, ctx.tol)
        for _ in range(5):
            z = _safe_nonreal(rng, space)
            direct = 1.0 / (1.0 + bp.evaluate(z))
            via = models.m_eval(space, g, z, ctx.tol)
            worst = max(worst, _rel(direct - via, abs(direct)))
    return worst


def prop_pseudocontinuation(ctx: VerifyContext) -> float:
    rng = ctx.rng(32)
    worst = 0.0
    for k in range(6):
        bp = random_blaschke(ctx.rng(700 + k), int(ctx.rng(800 + k).integers(1, 5)))
        for _ in range(5):
            z = random_nonreal(rng)
            prod = bp.evaluate(z) * np.conj(bp.evaluate(np.conj(z)))
            worst = max(worst, abs(prod - 1.0))
    return worst


def prop_diagram_commutes(ctx: VerifyContext) -> float:
    rng = ctx.rng(33)
    worst = 0.0
    for space, params in ctx.instances:
        g = models.from_extension(space, params)
        tries = 0
        while tries < 10:
            w = _safe_nonreal(rng, space)
            try:
                res = models.diagram_check(space, g, w, samples=4, seed=int(rng.integers(1 << 31)), tol=ctx.tol)
            except (QZero, ZeroOfG):
                tries += 1
                continue
            worst = max(worst, res)
            break
    return worst


PROPERTY_TABLE: list[tuple[str, float, Callable[[VerifyContext], float]]] = [
    ("measures.jordan_recombine", 1e-14, prop_jordan_recombine),
    ("measures.total_variation_minimal", 1e-14, prop_tv_minimality),
    ("qherglotz.conjugate_symmetry", 1e-12, prop_conj_symmetry),
    ("qherglotz.upper_half_plane_positivity", 1e-12, prop_positivity),
    ("qherglotz.rational_form_agreement", 1e-12, prop_rational_agreement),
    ("qherglotz.quadruple_recombination", 1e-12, prop_quadruple_recombine),
    ("qherglotz.zero_multiplicity_certificates", 1e-8, prop_zero_certificates),
    ("hspace.reproducing_property", 1e-11, prop_reproducing),
    ("hspace.kernel_two_formulas", 1e-11, prop_kernel_consistency),
    ("hspace.kernel_diagonal_rule", 1e-11, prop_kernel_diagonal),
    ("hspace.kernel_gram_psd", 1e-10, prop_kernel_psd),
    ("hspace.diff_quotient_adjoint", 1e-11, prop_diffq_adjoint),
    ("hspace.resolvent_identity_base", 1e-11, prop_resolvent_identity_base),
    ("hspace.symmetric_inside_selfadjoint", 1e-10, prop_s_subset_a),
    ("hspace.resolvent_equals_diff_quotient", 1e-11, prop_resolvent_is_diffq),
    ("hspace.phi_field_of_defect", 1e-12, prop_phi_membership),
    ("hspace.defect_orthogonality", 1e-11, prop_defect_orthogonality),
    ("hspace.simplicity_rank_full", 0.5, prop_simplicity),
    ("krein.resolvent_identity", 1e-10, prop_resolvent_identity_t),
    ("krein.q_defining_identity", 1e-11, prop_q_defining_identity),
    ("krein.q_single_point_suffices", 1e-11, prop_q_single_point),
    ("krein.q_of_defect_is_herglotz", 1e-12, prop_q_herglotz_special),
    ("krein.q_linear_term_vanishes", 1e-15, prop_b_vanishes),
    ("krein.q_linearity", 1e-12, prop_q_linearity),
    ("krein.resolvent_inverts_symmetric_part", 1e-11, prop_t_inverts_s),
    ("krein.relation_contains_symmetric_part", 1e-10, prop_relation_contains_s),
    ("krein.sample_point_independence", 1e-10, prop_z_independence),
    ("krein.identify_roundtrip", 1e-10, prop_identify_roundtrip),
    ("krein.spectrum_two_routes_agree", 1e-8, prop_spectrum_equivalence),
    ("krein.geometric_simplicity", 0.5, prop_geometric_simplicity),
    ("krein.defect_rescaling_invariance", 1e-10, prop_defect_rescaling),
    ("models.leibniz_rule", 1e-11, prop_leibniz),
    ("models.difference_quotients_in_space", 1e-11, prop_closure_phi_consistency),
    ("models.space_inside_mspace", 1e-12, prop_lh_subset_mh),
    ("models.extension_mfunction_roundtrip", 1e-10, prop_extension_mfunction_roundtrip),
    ("models.bridge_relation_equality", 1e-10, prop_bridge_relation),
    ("models.bridge_spectrum_agreement", 1e-8, prop_bridge_spectrum),
    ("models.blaschke_kernel_identity", 1e-10, prop_blaschke_kernel_identity),
    ("models.blaschke_defining_function", 1e-10, prop_blaschke_g_matches),
    ("models.pseudocontinuation_rule", 1e-12, prop_pseudocontinuation),
    ("models.conjugation_diagram", 1e-9, prop_diagram_commutes),
]


def run_suite(
    instances: Sequence[Instance],
    seed: int = 0,
    tol: Tolerances = DEFAULT,
    fault: str | None = None,
    only: Sequence[str] | None = None,
    threshold_overrides: dict[str, float] | None = None,
) -> list[PropertyOutcome]:
    """Run the registered properties and collect worst residuals."""
    ctx = VerifyContext(instances, seed, tol, fault)
    outcomes = []
    for name, threshold, fn in PROPERTY_TABLE:
        if only is not None and name not in only:
            continue
        if threshold_overrides and name in threshold_overrides:
            threshold = threshold_overrides[name]
        if not instances and fn not in (
            prop_jordan_recombine,
            prop_tv_minimality,
            prop_blaschke_kernel_identity,
            prop_blaschke_g_matches,
            prop_pseudocontinuation,
        ):
            continue
        residual = float(fn(ctx))
        outcomes.append(PropertyOutcome(name, residual, threshold, residual <= threshold))
    return outcomes
