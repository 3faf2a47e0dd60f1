"""Seeded random instance generators for tests and verification runs."""

from __future__ import annotations

import numpy as np

from .hspace import HerglotzSpace, SpaceElement, make_space
from .krein import ExtensionParams
from .measures import NonnegAtomicMeasure
from .models import BlaschkeProduct, MFunction


def random_space(rng: np.random.Generator, n: int, spread: float = 3.0, min_gap: float = 0.05) -> HerglotzSpace:
    """Space with n well-separated atoms in [-spread, spread] and O(1) weights."""
    while True:
        ts = np.sort(rng.uniform(-spread, spread, size=n))
        if n == 1 or np.min(np.diff(ts)) >= min_gap:
            break
    nus = rng.uniform(0.2, 2.0, size=n)
    a = float(rng.uniform(-1.0, 1.0))
    return make_space(NonnegAtomicMeasure(list(zip(ts, nus))), a)


def random_element(rng: np.random.Generator, n: int) -> SpaceElement:
    return SpaceElement(rng.standard_normal(n) + 1j * rng.standard_normal(n))


def random_params(rng: np.random.Generator, space: HerglotzSpace) -> ExtensionParams:
    v = random_element(rng, space.n)
    c = complex(rng.standard_normal(), rng.standard_normal())
    return ExtensionParams(v, c)


def random_mfunction(rng: np.random.Generator, space: HerglotzSpace) -> MFunction:
    a = complex(rng.standard_normal(), rng.standard_normal())
    return MFunction(a, random_element(rng, space.n))


def random_nonreal(rng: np.random.Generator, scale: float = 2.5, min_imag: float = 0.15) -> complex:
    re = rng.uniform(-scale, scale)
    im = rng.uniform(min_imag, scale) * rng.choice([-1.0, 1.0])
    return complex(re, im)


def random_upper(rng: np.random.Generator, scale: float = 2.0, min_imag: float = 0.15) -> complex:
    return complex(rng.uniform(-scale, scale), rng.uniform(min_imag, scale))


def random_blaschke(rng: np.random.Generator, degree: int, repeat: bool = False) -> BlaschkeProduct:
    """Blaschke product with zeros away from the real axis and phase away from -1."""
    zeros: list[complex] = []
    while len(zeros) < degree:
        z = random_upper(rng, scale=2.0, min_imag=0.2)
        if repeat and zeros and len(zeros) + 1 < degree and rng.random() < 0.4:
            zeros += [z, z]
        else:
            zeros.append(z)
    theta = rng.uniform(-np.pi + 0.4, np.pi - 0.4)
    return BlaschkeProduct(tuple(zeros[:degree]), complex(np.cos(theta), np.sin(theta)))
