"""Finitely atomic measures on the real line.

A measure is a finite list of real atom coordinates with complex (or strictly
positive) weights.  Construction normalizes: atoms are sorted, coordinates
closer than ``sep_min`` are merged by adding weights, and exact zero weights
are dropped.  Values are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT
from .errors import EmptyMeasure


def _normalize(pairs: Iterable[tuple[float, complex]], sep_min: float) -> tuple[tuple[float, complex], ...]:
    items = sorted((float(t), complex(w)) for t, w in pairs)
    merged: list[list[complex | float]] = []
    for t, w in items:
        if merged and t - merged[-1][0] < sep_min:
            # coordinate kept at the running mean of the merged group
            told, wold, count = merged[-1]
            merged[-1] = [(told * count + t) / (count + 1), wold + w, count + 1]
        else:
            merged.append([t, w, 1])
    return tuple((t, w) for t, w, _ in merged if w != 0)


@dataclass(frozen=True)
class ComplexAtomicMeasure:
    """Finite complex measure supported on finitely many real points."""

    atoms: tuple[tuple[float, complex], ...]

    def __init__(self, atoms: Iterable[tuple[float, complex]] = (), sep_min: float = DEFAULT.sep_min):
        object.__setattr__(self, "atoms", _normalize(atoms, sep_min))

    @property
    def n(self) -> int:
        return len(self.atoms)

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    @property
    def ts(self) -> np.ndarray:
        return np.array([t for t, _ in self.atoms], dtype=float)

    @property
    def ws(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=complex)

    def weight_at(self, t: float, sep_min: float = DEFAULT.sep_min) -> complex:
        """Weight of the atom at ``t`` (0 if no atom lies within ``sep_min``)."""
        for tk, wk in self.atoms:
            if abs(tk - t) < sep_min:
                return wk
        return 0j


@dataclass(frozen=True)
class NonnegAtomicMeasure:
    """Atomic measure with strictly positive real weights."""

    atoms: tuple[tuple[float, float], ...]

    def __init__(self, atoms: Iterable[tuple[float, float]] = (), sep_min: float = DEFAULT.sep_min):
        normalized = _normalize(((t, complex(w)) for t, w in atoms), sep_min)
        for t, w in normalized:
            if w.imag != 0 or w.real <= 0:
                raise ValueError(f"weight {w} at t={t} is not strictly positive real")
        object.__setattr__(self, "atoms", tuple((t, w.real) for t, w in normalized))

    @property
    def n(self) -> int:
        return len(self.atoms)

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    @property
    def ts(self) -> np.ndarray:
        return np.array([t for t, _ in self.atoms], dtype=float)

    @property
    def ws(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    def as_complex(self) -> ComplexAtomicMeasure:
        return ComplexAtomicMeasure(self.atoms)


def total_variation(m: ComplexAtomicMeasure) -> NonnegAtomicMeasure:
    """Atom-wise modulus of the weights."""
    return NonnegAtomicMeasure(tuple((t, abs(w)) for t, w in m.atoms))


def jordan_decompose(
    m: ComplexAtomicMeasure,
) -> tuple[NonnegAtomicMeasure, NonnegAtomicMeasure, NonnegAtomicMeasure, NonnegAtomicMeasure]:
    """Minimal split ``m = (n1 - n2) + i (n3 - n4)`` into positive parts.

    Per atom the real part feeds ``n1`` or ``n2`` and the imaginary part
    ``n3`` or ``n4``, so the decomposition is minimal: ``n1*n2 = 0`` and
    ``n3*n4 = 0`` atom by atom.
    """
    pos_re, neg_re, pos_im, neg_im = [], [], [], []
    for t, w in m.atoms:
        if w.real > 0:
            pos_re.append((t, w.real))
        elif w.real < 0:
            neg_re.append((t, -w.real))
        if w.imag > 0:
            pos_im.append((t, w.imag))
        elif w.imag < 0:
            neg_im.append((t, -w.imag))
    return (
        NonnegAtomicMeasure(pos_re),
        NonnegAtomicMeasure(neg_re),
        NonnegAtomicMeasure(pos_im),
        NonnegAtomicMeasure(neg_im),
    )


def jordan_recombine(
    parts: Sequence[NonnegAtomicMeasure],
) -> ComplexAtomicMeasure:
    """Inverse of :func:`jordan_decompose`."""
    n1, n2, n3, n4 = parts
    pairs: list[tuple[float, complex]] = []
    pairs += [(t, complex(w)) for t, w in n1.atoms]
    pairs += [(t, complex(-w)) for t, w in n2.atoms]
    pairs += [(t, 1j * w) for t, w in n3.atoms]
    pairs += [(t, -1j * w) for t, w in n4.atoms]
    return ComplexAtomicMeasure(pairs)


def support(m: ComplexAtomicMeasure | NonnegAtomicMeasure) -> list[float]:
    """Sorted atom coordinates (the topological support)."""
    return [t for t, _ in m.atoms]


def require_nonempty(m: NonnegAtomicMeasure) -> None:
    if m.is_empty:
        raise EmptyMeasure("measure has no atoms")
