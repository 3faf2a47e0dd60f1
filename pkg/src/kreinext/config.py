"""Numerical tolerances used throughout the package.

Every tolerance has a single authoritative default here; commands echo the
effective values in their reports so runs are reproducible.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    #: minimal atom separation; closer atoms are merged, and evaluation
    #: points within this distance of an atom count as hitting the pole
    sep_min: float = 1e-9
    #: clustering / certification tolerance for polynomial zeros
    root_tol: float = 1e-8
    #: relative SVD threshold for all numerical rank decisions
    rank_tol: float = 1e-10
    #: |q(z)+c| below this value makes z a (numerically) spectral point
    degenerate_tol: float = 1e-13
    #: relative realness/positivity slack for Herglotz-class membership tests
    herglotz_tol: float = 1e-12
    #: radius (relative) for attributing a numerator root to an atom
    atom_attach_tol: float = 1e-7
    #: pencil eigenvalues with |theta| below this (relative) count as infinity
    inf_tol: float = 1e-8
    #: agreement required between the analytic and the pencil spectrum routes
    cert_tol: float = 1e-8
    #: rejection radius around phase = -1 for Blaschke instances
    phase_tol: float = 1e-6

    def replace(self, **overrides: float) -> "Tolerances":
        unknown = set(overrides) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance name(s): {sorted(unknown)}")
        return dataclasses.replace(self, **overrides)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


DEFAULT = Tolerances()
