"""Finite-dimensional linear relations and pencil spectra.

A linear relation on an n-dimensional space is a subspace of the doubled
space, stored as a (2n, d) basis matrix.  The top/bottom halves (E, F) form
the pencil view: the relation is {(E u, F u)}.  Operators are relations with
trivial multivalued part; infinity is an eigenvalue exactly when E is rank
deficient.

Spectra are computed through the resolvent matrix R = E (F - s E)^{-1} at a
generic shift s: finite eigenvalues are Moebius images of eigenvalues of R,
infinity corresponds to the eigenvalue 0 of R, and algebraic multiplicity is
the cluster count of the backward-stable eigenvalues.  A defective m-fold
eigenvalue of floating-point matrix data splits by roughly eps^(1/m) and is
only determined as "m eigenvalues inside a small disk"; clusters are
therefore built by single-linkage partitions tried from coarse to fine, and
a partition is accepted only when every cluster is structurally consistent:
the geometric multiplicity, read from the singular-value gap of the shifted
pencil at the cluster center, must stay strictly below the cluster size
unless the cluster is coincidence-tight.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import NotAnExtension


def numerical_rank(m: np.ndarray, rank_tol: float = DEFAULT.rank_tol) -> int:
    """Number of singular values above ``rank_tol`` relative to the largest."""
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def orthonormal_columns(m: np.ndarray, rank_tol: float = DEFAULT.rank_tol) -> np.ndarray:
    """Orthonormal basis of the column space, numerical rank from the SVD."""
    if m.size == 0:
        return m.reshape(m.shape[0], 0)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > rank_tol * s[0])) if s[0] > 0 else 0
    return u[:, :r]


@dataclass(frozen=True, eq=False)
class LinearRelationFD:
    """Subspace of the doubled space with cached pencil form."""

    basis: np.ndarray
    space_dim: int

    def __init__(self, basis, space_dim: int | None = None, rank_tol: float = DEFAULT.rank_tol):
        arr = np.array(basis, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] % 2 != 0:
            raise ValueError("relation basis must be a (2n, d) matrix")
        n = arr.shape[0] // 2 if space_dim is None else int(space_dim)
        if arr.shape[0] != 2 * n:
            raise ValueError("basis rows do not match 2 * space_dim")
        if numerical_rank(arr, rank_tol) != arr.shape[1]:
            raise ValueError("relation basis columns are linearly dependent")
        arr.setflags(write=False)
        object.__setattr__(self, "basis", arr)
        object.__setattr__(self, "space_dim", n)

    @classmethod
    def from_operator(cls, m: np.ndarray) -> "LinearRelationFD":
        """Graph {(u, M u)} of a square matrix."""
        m = np.asarray(m, dtype=complex)
        n = m.shape[0]
        return cls(np.vstack([np.eye(n, dtype=complex), m]), space_dim=n)

    @classmethod
    def from_resolvent(cls, t: np.ndarray, z: complex) -> "LinearRelationFD":
        """Relation with resolvent ``t`` at ``z``: {(T u, (I + z T) u)}."""
        t = np.asarray(t, dtype=complex)
        n = t.shape[0]
        return cls(np.vstack([t, np.eye(n, dtype=complex) + z * t]), space_dim=n)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def pencil(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.space_dim
        return self.basis[:n, :], self.basis[n:, :]

    @cached_property
    def onb(self) -> np.ndarray:
        return orthonormal_columns(self.basis)

    def mul_dim(self, rank_tol: float = DEFAULT.rank_tol) -> int:
        """Dimension of the multivalued part {g : (0, g) in the relation}."""
        e, _ = self.pencil
        return self.dim - numerical_rank(e, rank_tol)

    def domain_rank(self, rank_tol: float = DEFAULT.rank_tol) -> int:
        e, _ = self.pencil
        return numerical_rank(e, rank_tol)


def subspace_distance(r1: LinearRelationFD, r2: LinearRelationFD) -> float:
    """Sine of the largest principal angle; 1.0 when the dimensions differ."""
    if r1.dim != r2.dim:
        return 1.0
    if r1.dim == 0:
        return 0.0
    q1, q2 = r1.onb, r2.onb
    p1 = q1 @ q1.conj().T
    p2 = q2 @ q2.conj().T
    return float(np.linalg.norm(p1 - p2, 2))


def containment_residual(inner_rel: LinearRelationFD, outer_rel: LinearRelationFD) -> float:
    """How far the first subspace sticks out of the second (0 means contained)."""
    if inner_rel.dim == 0:
        return 0.0
    qo = outer_rel.onb
    qi = inner_rel.onb
    return float(np.linalg.norm(qi - qo @ (qo.conj().T @ qi), 2))


def pair_residual(rel: LinearRelationFD, top: np.ndarray, bottom: np.ndarray) -> float:
    """Relative distance of the pair (top, bottom) from the relation subspace."""
    vec = np.concatenate([np.asarray(top, dtype=complex), np.asarray(bottom, dtype=complex)])
    nrm = np.linalg.norm(vec)
    if nrm == 0.0:
        return 0.0
    q = rel.onb
    return float(np.linalg.norm(vec - q @ (q.conj().T @ vec)) / nrm)


@dataclass(frozen=True)
class Eigenvalue:
    location: complex
    at_infinity: bool
    algebraic: int
    geometric: int


@dataclass(frozen=True)
class SpectrumReport:
    """Spectrum of an extension, multiplicities summing to the dimension."""

    dimension: int
    eigenvalues: tuple[Eigenvalue, ...]
    resolvent_certified: tuple[complex, ...] = ()
    certified: bool = True

    def __post_init__(self):
        total = sum(e.algebraic for e in self.eigenvalues)
        if total != self.dimension:
            raise ValueError(f"algebraic multiplicities sum to {total}, expected {self.dimension}")

    @property
    def finite(self) -> tuple[Eigenvalue, ...]:
        return tuple(e for e in self.eigenvalues if not e.at_infinity)

    @property
    def infinity(self) -> Eigenvalue | None:
        for e in self.eigenvalues:
            if e.at_infinity:
                return e
        return None


def _sorted_eigenvalues(eigens: list[Eigenvalue]) -> tuple[Eigenvalue, ...]:
    return tuple(sorted(eigens, key=lambda e: (e.at_infinity, e.location.real, e.location.imag)))


#: merges beyond this relative radius are never attempted; defective
#: eigenvalue fragments further apart than this are not resolvable here
CLUSTER_RESOLUTION = 2e-2

_TIGHT_SPREAD = 1e-10


def _mst_edges(points: np.ndarray, indices: list[int]) -> list[tuple[float, int, int]]:
    """Minimum spanning tree edges (Prim) over a subset of points, ascending."""
    if len(indices) <= 1:
        return []
    in_tree = [indices[0]]
    rest = set(indices[1:])
    out = []
    while rest:
        best = None
        for i in in_tree:
            for j in rest:
                d = abs(points[i] - points[j])
                if best is None or d < best[0]:
                    best = (d, i, j)
        out.append(best)
        in_tree.append(best[2])
        rest.remove(best[2])
    return sorted(out)


def _components_under_cap(points: np.ndarray, cap_rel: float) -> list[list[int]]:
    """Connected components linking points closer than the relative cap."""
    n = len(points)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            mid = (points[i] + points[j]) / 2.0
            if abs(points[i] - points[j]) <= cap_rel * (1.0 + abs(mid)):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values())


def _resolve_component(points: np.ndarray, indices: list[int], validate) -> list | None:
    """Validate a component as one cluster, else split at its widest gap.

    ``validate(indices)`` returns a record or None.  Splitting recurses on
    the two halves of the component across its longest internal spanning
    edge, so one undecidable component never disturbs the others.
    """
    record = validate(indices)
    if record is not None:
        return [record]
    if len(indices) == 1:
        return None
    edges = _mst_edges(points, indices)
    _, ei, ej = edges[-1]
    # split the component across the longest edge
    parent = {k: k for k in indices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, i, j in edges[:-1]:
        parent[find(i)] = find(j)
    halves: dict[int, list[int]] = {}
    for k in indices:
        halves.setdefault(find(k), []).append(k)
    out = []
    for half in sorted(halves.values()):
        sub = _resolve_component(points, half, validate)
        if sub is None:
            return None
        out.extend(sub)
    return out


def _gap_kernel_count(
    m_mat: np.ndarray,
    rank_tol: float,
    scale_ref: float = 0.0,
    floor_rel: float = 1e-3,
    min_ratio: float = 1e4,
) -> int:
    """Numerical kernel dimension located at the largest singular-value gap.

    Only gaps whose lower side is already below ``floor_rel`` (relative to
    the larger of the top singular value and ``scale_ref``) count; without a
    convincing gap the plain relative threshold decides.  ``scale_ref``
    keeps the decision meaningful when the matrix is itself nearly zero.
    """
    if m_mat.size == 0:
        return 0
    s = np.linalg.svd(m_mat, compute_uv=False)
    top = max(float(s[0]), scale_ref * 1e-12) if scale_ref > 0 else float(s[0])
    if top == 0.0:
        return len(s)
    if scale_ref > 0 and s[0] <= rank_tol * scale_ref:
        return len(s)
    best = None
    for i in range(len(s) - 1):
        if s[i + 1] > floor_rel * top:
            continue
        ratio = s[i] / max(s[i + 1], 1e-300)
        if best is None or ratio > best[0]:
            best = (ratio, i)
    if best is not None and best[0] >= min_ratio:
        return len(s) - best[1] - 1
    return int(np.sum(s <= rank_tol * top))


def _schur_trace_center(m_mat: np.ndarray, idx: list[int], all_values: np.ndarray) -> complex | None:
    """Refined center of an eigenvalue cluster: trace of its invariant block.

    Reorders a complex Schur form so the cluster occupies the leading block;
    the block trace over the size locates the cluster center far better than
    the mean of the split eigenvalues.
    """
    from scipy.linalg import schur

    members = all_values[idx]
    rest = np.delete(all_values, idx)
    mean = complex(np.mean(members))
    inner = float(np.max(np.abs(members - mean)))
    outer = float(np.min(np.abs(rest - mean))) if rest.size else np.inf
    if not np.isfinite(outer):
        r_sel = 2.0 * inner + 1.0
    else:
        if outer <= inner:
            return None
        r_sel = 0.5 * (inner + outer)
    try:
        t2, _, sdim = schur(m_mat, output="complex", sort=lambda x: abs(x - mean) <= r_sel)
    except Exception:  # noqa: BLE001 - scipy sort failures fall back to the mean
        return mean
    if sdim != len(members):
        return None
    return complex(np.trace(t2[:sdim, :sdim]) / sdim)


_SHIFT_CANDIDATES = (
    0.91 + 1.33j,
    -1.17 + 0.87j,
    1.93 - 1.71j,
    0.29 + 2.63j,
    -2.21 - 1.39j,
    3.07 + 0.41j,
    -0.53 - 2.87j,
    2.41 + 2.17j,
)


def _pick_shift(e: np.ndarray, f: np.ndarray) -> complex:
    best = None
    for sigma in _SHIFT_CANDIDATES:
        m = f - sigma * e
        s = np.linalg.svd(m, compute_uv=False)
        ratio = s[-1] / s[0] if s[0] > 0 else 0.0
        if best is None or ratio > best[0]:
            best = (ratio, sigma)
    if best[0] < 1e-12:
        raise NotAnExtension("pencil is singular at every probe shift")
    return best[1]


def relation_spectrum(rel: LinearRelationFD, tol: Tolerances = DEFAULT) -> SpectrumReport:
    """Eigenvalues (including infinity) of a relation of full graph dimension.

    Eigenvalues of the shifted resolvent matrix give locations and cluster
    counts; the infinity cluster sits at resolvent eigenvalue zero.  Every
    linkage component (under the resolution cap) is validated as one
    eigenvalue: multi-point clusters must show a geometric count, read from
    the singular value gap of the pencil at the Schur-refined center, that
    stays below the cluster size (defective) unless the points coincide to
    machine precision (semisimple); components failing validation split at
    their widest internal gap and are retried.  Singleton locations must be
    numerically singular points of the pencil, which stops fragments of a
    defective eigenvalue from posing as simple eigenvalues.
    """
    n = rel.space_dim
    if rel.dim != n:
        raise NotAnExtension(f"relation has dimension {rel.dim}, expected {n}")
    e_mat, f_mat = rel.pencil
    sigma = _pick_shift(e_mat, f_mat)
    r = e_mat @ np.linalg.inv(f_mat - sigma * e_mat)
    theta = np.linalg.eigvals(r)
    scale_t = max(1.0, float(np.max(np.abs(theta))) if theta.size else 1.0)
    e_norm = float(np.linalg.norm(e_mat, 2))
    f_norm = float(np.linalg.norm(f_mat, 2))

    def infinity_geo() -> int:
        null_dim = _gap_kernel_count(e_mat, tol.rank_tol, scale_ref=e_norm + f_norm)
        if null_dim == 0:
            return 0
        _, _, vh = np.linalg.svd(e_mat)
        null_basis = vh[e_mat.shape[1] - null_dim :].conj().T
        return numerical_rank(f_mat @ null_basis, tol.rank_tol)

    def validate(idx: list[int]) -> Eigenvalue | None:
        members = theta[idx]
        count = len(idx)
        small = np.abs(members) <= tol.inf_tol * scale_t
        if np.all(small):
            geo = infinity_geo()
            if geo < 1 or geo > count:
                return None
            return Eigenvalue(0j, True, count, geo)
        if np.any(small):
            return None  # mixed infinity/finite component must split
        if count == 1:
            lam = sigma + 1.0 / complex(members[0])
            scale_ref = f_norm + abs(lam) * e_norm
            s_min = np.linalg.svd(f_mat - lam * e_mat, compute_uv=False)[-1]
            if s_min > 1e-6 * scale_ref:
                return None
            return Eigenvalue(lam, False, 1, 1)
        refined = _schur_trace_center(r, idx, theta)
        if refined is None:
            return None
        spread = float(np.max(np.abs(members - refined)))
        lam = sigma + 1.0 / refined
        scale_ref = f_norm + abs(lam) * e_norm
        geo = _gap_kernel_count(f_mat - lam * e_mat, tol.rank_tol, scale_ref=scale_ref)
        if geo < 1 or geo > count:
            return None
        if geo == count and spread > _TIGHT_SPREAD * (1.0 + abs(refined)):
            return None
        return Eigenvalue(lam, False, count, geo)

    eigens: list[Eigenvalue] = []
    ok = True
    for comp in _components_under_cap(theta, CLUSTER_RESOLUTION):
        resolved = _resolve_component(theta, comp, validate)
        if resolved is None:
            ok = False
            break
        eigens.extend(resolved)
    if ok:
        return SpectrumReport(n, _sorted_eigenvalues(eigens))

    warnings.warn("pencil cluster certification failed; reporting raw singleton counts")
    eigens = []
    for th in theta:
        if abs(th) <= tol.inf_tol * scale_t:
            eigens.append(Eigenvalue(0j, True, 1, 1))
        else:
            eigens.append(Eigenvalue(sigma + 1.0 / th, False, 1, 1))
    return SpectrumReport(n, _sorted_eigenvalues(eigens), certified=False)


def matrix_spectrum(b: np.ndarray, tol: Tolerances = DEFAULT) -> SpectrumReport:
    """Dense-eigensolver spectrum of a square matrix with certified counts.

    Same clustering and validation scheme as for relations, with the pencil
    replaced by B - lambda I.
    """
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    raw = np.linalg.eigvals(b)
    eye = np.eye(n, dtype=complex)
    b_norm = float(np.linalg.norm(b, 2))

    def validate(idx: list[int]) -> Eigenvalue | None:
        members = raw[idx]
        count = len(idx)
        if count == 1:
            center = complex(members[0])
            spread = 0.0
        else:
            refined = _schur_trace_center(b, idx, raw)
            if refined is None:
                return None
            center = refined
            spread = float(np.max(np.abs(members - center)))
        scale_ref = b_norm + abs(center)
        if count == 1:
            s_min = np.linalg.svd(b - center * eye, compute_uv=False)[-1]
            if s_min > 1e-6 * scale_ref:
                return None
            return Eigenvalue(center, False, 1, 1)
        geo = _gap_kernel_count(b - center * eye, tol.rank_tol, scale_ref=scale_ref)
        if geo < 1 or geo > count:
            return None
        if geo == count and spread > _TIGHT_SPREAD * (1.0 + abs(center)):
            return None
        return Eigenvalue(center, False, count, geo)

    eigens: list[Eigenvalue] = []
    ok = True
    for comp in _components_under_cap(raw, CLUSTER_RESOLUTION):
        resolved = _resolve_component(raw, comp, validate)
        if resolved is None:
            ok = False
            break
        eigens.extend(resolved)
    if ok:
        return SpectrumReport(n, _sorted_eigenvalues(eigens))

    warnings.warn("matrix cluster certification failed; reporting raw singleton counts")
    eigens = [Eigenvalue(complex(z), False, 1, 1) for z in raw]
    return SpectrumReport(n, _sorted_eigenvalues(eigens), certified=False)


def spectra_agreement(
    a: SpectrumReport,
    b: SpectrumReport,
    require_geometric: bool = True,
) -> float:
    """Largest location deviation between matching eigenvalues.

    Returns ``inf`` when the two reports disagree structurally (different
    dimensions, infinity parts, or multiplicities under greedy one-to-one
    matching by location).  Because an m-fold eigenvalue of floating-point
    matrix data is located only to about eps^(1/m), each deviation enters
    at the m-th power.
    """
    if a.dimension != b.dimension:
        return float("inf")
    ia, ib = a.infinity, b.infinity
    if (ia is None) != (ib is None):
        return float("inf")
    if ia is not None:
        if ia.algebraic != ib.algebraic or (require_geometric and ia.geometric != ib.geometric):
            return float("inf")
    fa, fb = list(a.finite), list(b.finite)
    if len(fa) != len(fb):
        return float("inf")
    worst = 0.0
    remaining = list(fb)
    for ea in fa:
        if not remaining:
            return float("inf")
        j = min(range(len(remaining)), key=lambda k: abs(remaining[k].location - ea.location))
        eb = remaining.pop(j)
        if ea.algebraic != eb.algebraic:
            return float("inf")
        if require_geometric and ea.geometric != eb.geometric:
            return float("inf")
        dev = abs(ea.location - eb.location) / (1.0 + abs(ea.location))
        worst = max(worst, dev ** max(ea.algebraic, 1))
    return worst
