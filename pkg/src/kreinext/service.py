"""FastAPI service wrapping the core package.

The handler functions are the single implementation behind both the HTTP
endpoints and the command line client; they take and return the pydantic
models from :mod:`kreinext.schemas`.  Domain errors carry the process exit
code the CLI should use, and map to HTTP 422 responses here.
"""

from __future__ import annotations

import time
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, ValidationError

from . import krein, models, verify
from .config import DEFAULT, Tolerances
from .errors import (
    CertificationError,
    DegenerateExtension,
    IdenticallyZero,
    Infeasible,
    KreinextError,
    MixedHalfPlanes,
    PhaseMinusOne,
    QZero,
)
from .hspace import SpaceElement, kernel as space_kernel, make_space
from .measures import NonnegAtomicMeasure
from .qherglotz import zeros_with_multiplicity
from .relations import relation_spectrum, spectra_agreement, subspace_distance, LinearRelationFD
from .sampling import random_params, random_space
from .schemas import (
    EigenvalueModel,
    InstanceModel,
    PropertyModel,
    ReportModel,
    SpaceModel,
    instance_digest,
    instance_from_model,
    mfunction_to_model,
    pair,
    params_to_model,
    space_from_model,
    space_to_model,
)


class AppError(Exception):
    """Domain failure with the CLI exit code it should produce."""

    def __init__(self, exit_code: int, message: str):
        self.exit_code = exit_code
        super().__init__(message)


_ERROR_CODES: list[tuple[type[Exception], int]] = [
    (PhaseMinusOne, 6),
    (Infeasible, 5),
    (CertificationError, 4),
    (DegenerateExtension, 3),
    (IdenticallyZero, 3),
    (QZero, 3),
    (MixedHalfPlanes, 2),
    (ValidationError, 2),
    (ValueError, 2),
    (KreinextError, 2),
]


def exit_code_for(exc: Exception) -> int:
    for etype, code in _ERROR_CODES:
        if isinstance(exc, etype):
            return code
    return 2


def _wrap(exc: Exception) -> AppError:
    return AppError(exit_code_for(exc), str(exc))


def _tolerances(overrides: dict[str, float]) -> Tolerances:
    known = {k: v for k, v in overrides.items() if k in DEFAULT.as_dict()}
    return DEFAULT.replace(**known)


def _spectrum_models(report) -> list[EigenvalueModel]:
    out = []
    for e in report.eigenvalues:
        out.append(
            EigenvalueModel(
                re=0.0 if e.at_infinity else float(e.location.real),
                im=0.0 if e.at_infinity else float(e.location.imag),
                inf=e.at_infinity,
                alg=e.algebraic,
                geo=e.geometric,
            )
        )
    return out


class SpectrumRequest(BaseModel):
    instance: InstanceModel
    seed: int = 0
    tolerances: dict[str, float] = Field(default_factory=dict)


class VerifyRequest(BaseModel):
    instance: Optional[InstanceModel] = None
    random_dim: int = 6
    trials: int = 20
    seed: int = 0
    tolerances: dict[str, float] = Field(default_factory=dict)
    inject_fault: Optional[str] = None


class ZeroSpec(BaseModel):
    re: float
    im: float
    mult: int = 1


class InterpolateRequest(BaseModel):
    space: SpaceModel
    zeros: list[ZeroSpec] = Field(default_factory=list)
    seed: int = 0
    tolerances: dict[str, float] = Field(default_factory=dict)


class InterpolateResponse(BaseModel):
    report: ReportModel
    instance: InstanceModel


class BlaschkeRequest(BaseModel):
    zeros: list[tuple[float, float]]
    phase_angle: float = 0.0
    seed: int = 0
    tolerances: dict[str, float] = Field(default_factory=dict)


class BlaschkeResponse(BaseModel):
    report: ReportModel
    instance: InstanceModel


class PerturbRequest(BaseModel):
    diag: list[float]
    y: list[tuple[float, float]]
    nu: Optional[list[float]] = None
    seed: int = 0
    tolerances: dict[str, float] = Field(default_factory=dict)


def _finish(report: ReportModel, t0: float) -> ReportModel:
    report.wall_clock_s = time.perf_counter() - t0
    return report


def handle_spectrum(req: SpectrumRequest) -> ReportModel:
    t0 = time.perf_counter()
    tol = _tolerances(req.tolerances)
    try:
        space, params = instance_from_model(req.instance)
        analytic = krein.extension_spectrum(space, params, tol)
        sample = krein.resolvent_sample_point(space, params, tol)
        pencil = relation_spectrum(krein.reconstruct_relation(space, params, sample, tol), tol)
    except AppError:
        raise
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes
        raise _wrap(exc) from exc
    agreement = spectra_agreement(analytic, pencil)
    if not (agreement <= tol.cert_tol):
        raise AppError(4, f"analytic and pencil spectra disagree (residual {agreement:.3e})")
    report = ReportModel(
        command="spectrum",
        instance_digest=instance_digest(req.instance),
        results={
            "eigenvalues": [e.model_dump() for e in _spectrum_models(analytic)],
            "resolvent_certified": [pair(z) for z in analytic.resolvent_certified],
            "pencil_eigenvalues": [e.model_dump() for e in _spectrum_models(pencil)],
        },
        residual_summary={"analytic_vs_pencil": agreement},
        tolerances=tol.as_dict(),
        seed=req.seed,
    )
    return _finish(report, t0)


def handle_verify(req: VerifyRequest) -> tuple[ReportModel, bool]:
    t0 = time.perf_counter()
    tol = _tolerances(req.tolerances)
    try:
        if req.instance is not None:
            instances = [instance_from_model(req.instance)]
            digest = instance_digest(req.instance)
        else:
            rng = np.random.default_rng(req.seed)
            instances = []
            for _ in range(req.trials):
                space = random_space(rng, int(rng.integers(1, max(2, req.random_dim + 1))))
                instances.append((space, random_params(rng, space)))
            digest = ""
        if req.trials == 0 and req.instance is None:
            instances = []
        outcomes = verify.run_suite(instances, seed=req.seed, tol=tol, fault=req.inject_fault)
    except AppError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise _wrap(exc) from exc
    passed = all(o.passed for o in outcomes)
    report = ReportModel(
        command="verify",
        instance_digest=digest,
        results={
            "properties": [
                PropertyModel(
                    name=o.name, max_residual=o.residual, tolerance=o.tolerance, passed=o.passed
                ).model_dump()
                for o in outcomes
            ],
            "passed": passed,
            "trials": req.trials,
        },
        residual_summary={o.name: o.residual for o in outcomes},
        tolerances=tol.as_dict(),
        seed=req.seed,
    )
    return _finish(report, t0), passed


def handle_interpolate(req: InterpolateRequest) -> InterpolateResponse:
    t0 = time.perf_counter()
    tol = _tolerances(req.tolerances)
    try:
        space = space_from_model(req.space)
        zeros = [(complex(z.re, z.im), z.mult) for z in req.zeros]
        params = krein.interpolate_spectrum(space, zeros, tol)
        analytic = krein.extension_spectrum(space, params, tol)
        sample = krein.resolvent_sample_point(space, params, tol)
        pencil = relation_spectrum(krein.reconstruct_relation(space, params, sample, tol), tol)
    except AppError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise _wrap(exc) from exc
    agreement = spectra_agreement(analytic, pencil)
    # certification: every requested zero shows up at the right multiplicity
    worst = 0.0
    nonreal = [e for e in analytic.finite if abs(e.location.imag) > tol.sep_min]
    if len(nonreal) != len(zeros):
        worst = float("inf")
    else:
        for z, m in zeros:
            best = min(nonreal, key=lambda e: abs(e.location - z))
            if best.algebraic != m:
                worst = float("inf")
                break
            worst = max(worst, abs(best.location - z) / (1.0 + abs(z)))
    if not (worst <= tol.cert_tol and agreement <= tol.cert_tol):
        raise AppError(4, f"interpolated spectrum failed certification (residual {worst:.3e})")
    instance = InstanceModel(space=space_to_model(space), extension=params_to_model(params))
    report = ReportModel(
        command="interpolate",
        instance_digest=instance_digest(instance),
        results={
            "eigenvalues": [e.model_dump() for e in _spectrum_models(analytic)],
            "requested": [{"re": z.real, "im": z.imag, "mult": m} for z, m in zeros],
        },
        residual_summary={"placement": worst, "analytic_vs_pencil": agreement},
        tolerances=tol.as_dict(),
        seed=req.seed,
    )
    return InterpolateResponse(report=_finish(report, t0), instance=instance)


def handle_blaschke(req: BlaschkeRequest) -> BlaschkeResponse:
    t0 = time.perf_counter()
    tol = _tolerances(req.tolerances)
    try:
        phase = complex(np.cos(req.phase_angle), np.sin(req.phase_angle))
        bp = models.BlaschkeProduct(tuple(complex(re, im) for re, im in req.zeros), phase)
        space, g = models.blaschke_cayley(bp, tol)
        params = models.to_extension(space, g)
        analytic = krein.extension_spectrum(space, params, tol)
        sample = krein.resolvent_sample_point(space, params, tol)
        pencil = relation_spectrum(krein.reconstruct_relation(space, params, sample, tol), tol)
    except AppError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise _wrap(exc) from exc
    agreement = spectra_agreement(analytic, pencil)
    rng = np.random.default_rng(req.seed)
    span = 1.0 + float(np.max(np.abs(space.ts)))
    kernel_residual = 0.0
    for _ in range(20):
        z = complex(rng.uniform(-span, span), rng.uniform(0.2, 1.5) * span * rng.choice([-1, 1]))
        w = complex(rng.uniform(-span, span), rng.uniform(0.2, 1.5) * span * rng.choice([-1, 1]))
        vz, vw = bp.evaluate(z), bp.evaluate(w)
        lhs = (1.0 + vz) * space_kernel(space, z, w, tol) * (1.0 + np.conj(vw)) / 2.0
        rhs = (1.0 - vz * np.conj(vw)) / (-1j * (z - np.conj(w)))
        kernel_residual = max(kernel_residual, abs(lhs - rhs) / (1.0 + abs(rhs)))
    if agreement > tol.cert_tol:
        raise AppError(4, f"model space spectrum failed pencil certification ({agreement:.3e})")
    instance = InstanceModel(space=space_to_model(space), extension=mfunction_to_model(space, params))
    report = ReportModel(
        command="blaschke",
        instance_digest=instance_digest(instance),
        results={
            "eigenvalues": [e.model_dump() for e in _spectrum_models(analytic)],
            "atoms": [pair(complex(t)) for t in space.ts],
            "weights": [float(w) for w in space.nus],
            "space_constant": space.a,
        },
        residual_summary={"kernel_identity": kernel_residual, "analytic_vs_pencil": agreement},
        tolerances=tol.as_dict(),
        seed=req.seed,
    )
    return BlaschkeResponse(report=_finish(report, t0), instance=instance)


def handle_perturb(req: PerturbRequest) -> ReportModel:
    t0 = time.perf_counter()
    tol = _tolerances(req.tolerances)
    try:
        diag = [float(t) for t in req.diag]
        yvals = [complex(re, im) for re, im in req.y]
        if len(diag) != len(yvals):
            raise ValueError(f"diag has length {len(diag)}, y has length {len(yvals)}")
        if req.nu is not None:
            if len(req.nu) != len(diag):
                raise ValueError("nu must match diag in length")
            nu_ws = [float(x) for x in req.nu]
        else:
            nu_ws = [1.0 / (1.0 + t**2) for t in diag]  # uniform mu = 1
        space = make_space(NonnegAtomicMeasure(list(zip(diag, nu_ws))))
        order = np.argsort(diag)
        y = SpaceElement(np.array(yvals, dtype=complex)[order])
        b, dense = models.rank_one_forward(space, y, tol)
        params = models.rank_one_bridge(space, y, tol)
        analytic = krein.extension_spectrum(space, params, tol)
        sample = krein.resolvent_sample_point(space, params, tol)
        rel = krein.reconstruct_relation(space, params, sample, tol)
        graph_dist = subspace_distance(rel, LinearRelationFD.from_operator(b))
    except AppError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise _wrap(exc) from exc
    agreement = spectra_agreement(analytic, dense)
    g = krein.g_function(space, params)
    zero_list = zeros_with_multiplicity(g, tol)
    report = ReportModel(
        command="perturb",
        results={
            "matrix_eigenvalues": [e.model_dump() for e in _spectrum_models(dense)],
            "extension_eigenvalues": [e.model_dump() for e in _spectrum_models(analytic)],
            "g_zeros": [{"re": z.real, "im": z.imag, "mult": m} for z, m in zero_list],
        },
        residual_summary={"spectrum_match": agreement, "graph_distance": graph_dist},
        tolerances=tol.as_dict(),
        seed=req.seed,
    )
    if not (agreement <= tol.cert_tol and graph_dist <= 1e-9):
        raise AppError(4, f"perturbation bridge failed certification ({agreement:.3e}, {graph_dist:.3e})")
    return _finish(report, t0)


app = FastAPI(title="kreinext", description="Rank-one resolvent extensions of atomic Herglotz spaces")


@app.exception_handler(AppError)
async def _app_error_handler(_: Request, exc: AppError):
    return JSONResponse(status_code=422, content={"detail": str(exc), "exit_code": exc.exit_code})


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok"}


@app.post("/spectrum", response_model=ReportModel)
def spectrum_endpoint(req: SpectrumRequest) -> ReportModel:
    return handle_spectrum(req)


@app.post("/verify", response_model=ReportModel)
def verify_endpoint(req: VerifyRequest) -> ReportModel:
    report, _ = handle_verify(req)
    return report


@app.post("/interpolate", response_model=InterpolateResponse)
def interpolate_endpoint(req: InterpolateRequest) -> InterpolateResponse:
    return handle_interpolate(req)


@app.post("/blaschke", response_model=BlaschkeResponse)
def blaschke_endpoint(req: BlaschkeRequest) -> BlaschkeResponse:
    return handle_blaschke(req)


@app.post("/perturb", response_model=ReportModel)
def perturb_endpoint(req: PerturbRequest) -> ReportModel:
    return handle_perturb(req)
