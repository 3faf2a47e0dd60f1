"""Pydantic request/response models and codecs to the domain objects.

Complex scalars travel as [re, im] pairs; measure weights may be a bare real
number.  An instance is a space plus exactly one of the two extension
encodings: parameters (v, c) or a defining function g.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .hspace import HerglotzSpace, SpaceElement, make_space
from .krein import ExtensionParams
from .measures import ComplexAtomicMeasure, NonnegAtomicMeasure
from .models import MFunction, from_extension, to_extension

ComplexPair = Union[tuple[float, float], float]


def to_complex(value: ComplexPair) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    re, im = value
    return complex(re, im)


def pair(z: complex) -> tuple[float, float]:
    return (float(z.real), float(z.imag))


class AtomModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    t: float
    w: ComplexPair


class MeasureModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    atoms: list[AtomModel] = Field(default_factory=list)


class SpaceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    a: float = 0.0
    nu: MeasureModel


class ElementModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    coords: list[tuple[float, float]]


class MFunctionModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    a: ComplexPair
    f: ElementModel


class ExtensionModel(BaseModel):
    """Either the parameter pair (v, c) or a defining function g."""

    model_config = ConfigDict(extra="forbid")
    v: Optional[ElementModel] = None
    c: Optional[ComplexPair] = None
    g: Optional[MFunctionModel] = None

    @model_validator(mode="after")
    def _exactly_one_route(self) -> "ExtensionModel":
        has_vc = self.v is not None or self.c is not None
        has_g = self.g is not None
        if has_vc and has_g:
            raise ValueError("extension must use either (v, c) or g, not both")
        if has_vc and (self.v is None or self.c is None):
            raise ValueError("extension with parameters needs both v and c")
        if not has_vc and not has_g:
            raise ValueError("extension needs (v, c) or g")
        return self


class InstanceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    space: SpaceModel
    extension: ExtensionModel


class EigenvalueModel(BaseModel):
    re: float = 0.0
    im: float = 0.0
    inf: bool = False
    alg: int
    geo: int


class SpectrumResultModel(BaseModel):
    eigenvalues: list[EigenvalueModel]
    residuals: dict[str, float] = Field(default_factory=dict)


class PropertyModel(BaseModel):
    name: str
    max_residual: float
    tolerance: float
    passed: bool


class ReportModel(BaseModel):
    command: str
    instance_digest: str = ""
    results: dict[str, Any] = Field(default_factory=dict)
    residual_summary: dict[str, float] = Field(default_factory=dict)
    tolerances: dict[str, float] = Field(default_factory=dict)
    seed: int = 0
    wall_clock_s: float = 0.0


# ------------------------------------------------------------------ codecs


def measure_from_model(m: MeasureModel) -> ComplexAtomicMeasure:
    return ComplexAtomicMeasure([(atom.t, to_complex(atom.w)) for atom in m.atoms])


def nonneg_measure_from_model(m: MeasureModel) -> NonnegAtomicMeasure:
    pairs = []
    for atom in m.atoms:
        w = to_complex(atom.w)
        if w.imag != 0:
            raise ValueError(f"space measure weight {w} must be real")
        pairs.append((atom.t, w.real))
    return NonnegAtomicMeasure(pairs)


def space_from_model(m: SpaceModel) -> HerglotzSpace:
    return make_space(nonneg_measure_from_model(m.nu), m.a)


def space_to_model(space: HerglotzSpace) -> SpaceModel:
    atoms = [AtomModel(t=float(t), w=float(w)) for t, w in space.nu.atoms]
    return SpaceModel(a=space.a, nu=MeasureModel(atoms=atoms))


def element_from_model(m: ElementModel) -> SpaceElement:
    return SpaceElement([complex(re, im) for re, im in m.coords])


def element_to_model(e: SpaceElement) -> ElementModel:
    return ElementModel(coords=[pair(z) for z in np.asarray(e.coords)])


def extension_from_model(space: HerglotzSpace, m: ExtensionModel) -> ExtensionParams:
    if m.g is not None:
        g = MFunction(to_complex(m.g.a), element_from_model(m.g.f))
        if len(g.f) != space.n:
            raise ValueError(f"g coordinates have length {len(g.f)}, space dimension is {space.n}")
        return to_extension(space, g)
    v = element_from_model(m.v)
    if len(v) != space.n:
        raise ValueError(f"v has length {len(v)}, space dimension is {space.n}")
    return ExtensionParams(v, to_complex(m.c))


def params_to_model(params: ExtensionParams) -> ExtensionModel:
    return ExtensionModel(v=element_to_model(params.v), c=pair(params.c))


def mfunction_to_model(space: HerglotzSpace, params: ExtensionParams) -> ExtensionModel:
    g = from_extension(space, params)
    return ExtensionModel(g=MFunctionModel(a=pair(g.a), f=element_to_model(g.f)))


def instance_from_model(m: InstanceModel) -> tuple[HerglotzSpace, ExtensionParams]:
    space = space_from_model(m.space)
    return space, extension_from_model(space, m.extension)


def instance_digest(m: InstanceModel) -> str:
    canonical = json.dumps(m.model_dump(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
