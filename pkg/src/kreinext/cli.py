"""Command line client.

Subcommands: spectrum, verify, interpolate, blaschke, perturb, serve.
By default the commands call the service handlers in process; pass
``--server URL`` to talk to a running instance over HTTP instead.

Exit codes: 0 success, 1 verification failure, 2 schema violation,
3 degenerate extension, 4 certification failure, 5 infeasible placement,
6 rejected Blaschke phase.

Complex numbers in flags use the ``a+bi`` syntax, e.g. ``0+1i`` or ``-2.5i``;
zero lists take an optional ``:mult`` suffix per entry.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from . import service
from .schemas import InstanceModel, ReportModel, SpaceModel
from .service import (
    AppError,
    BlaschkeRequest,
    InterpolateRequest,
    PerturbRequest,
    SpectrumRequest,
    VerifyRequest,
)


def parse_complex(text: str) -> complex:
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise AppError(2, f"cannot parse complex number {text!r}") from exc


def parse_zero_list(text: str) -> list[tuple[complex, int]]:
    out: list[tuple[complex, int]] = []
    if not text.strip():
        return out
    for chunk in text.split(","):
        chunk = chunk.strip()
        mult = 1
        if ":" in chunk:
            chunk, mult_text = chunk.rsplit(":", 1)
            try:
                mult = int(mult_text)
            except ValueError as exc:
                raise AppError(2, f"bad multiplicity suffix in {chunk!r}:{mult_text!r}") from exc
        out.append((parse_complex(chunk), mult))
    return out


def parse_real_list(text: str) -> list[float]:
    if not text.strip():
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise AppError(2, f"cannot parse real list {text!r}") from exc


def parse_tol_overrides(items: list[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in items or []:
        if "=" not in item:
            raise AppError(2, f"--tol expects name=value, got {item!r}")
        name, value = item.split("=", 1)
        try:
            out[name.strip()] = float(value)
        except ValueError as exc:
            raise AppError(2, f"bad tolerance value in {item!r}") from exc
    return out


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise AppError(2, f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise AppError(2, f"malformed JSON in {path}: {exc}") from exc


def load_instance(path: str) -> InstanceModel:
    try:
        return InstanceModel.model_validate(load_json(path))
    except ValidationError as exc:
        raise AppError(2, f"instance schema violation in {path}: {exc}") from exc


def load_space(path: str) -> SpaceModel:
    try:
        return SpaceModel.model_validate(load_json(path))
    except ValidationError as exc:
        raise AppError(2, f"space schema violation in {path}: {exc}") from exc


def write_report(report: ReportModel, path: str | None) -> None:
    if path:
        Path(path).write_text(json.dumps(report.model_dump(), sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_eigenvalue_csv(report: ReportModel, path: str | None, key: str = "eigenvalues") -> None:
    if not path:
        return
    rows = report.results.get(key, [])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im", "inf", "alg", "geo"])
        for row in rows:
            writer.writerow([row["re"], row["im"], int(row["inf"]), row["alg"], row["geo"]])


def write_property_csv(report: ReportModel, path: str | None) -> None:
    if not path:
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["property", "max_residual", "tolerance", "passed"])
        for row in report.results.get("properties", []):
            writer.writerow([row["name"], row["max_residual"], row["tolerance"], int(row["passed"])])


def print_eigenvalues(report: ReportModel) -> None:
    for row in report.results.get("eigenvalues", []):
        where = "inf" if row["inf"] else f"{row['re']:+.12g}{row['im']:+.12g}i"
        print(f"  eigenvalue {where}  alg={row['alg']} geo={row['geo']}")
    for name, value in sorted(report.residual_summary.items()):
        print(f"  residual {name} = {value:.3e}")


def _post_remote(server: str, endpoint: str, payload: dict) -> dict:
    import httpx

    resp = httpx.post(server.rstrip("/") + endpoint, json=payload, timeout=120.0)
    if resp.status_code == 422 and "exit_code" in resp.text:
        body = resp.json()
        raise AppError(int(body.get("exit_code", 2)), body.get("detail", "remote error"))
    resp.raise_for_status()
    return resp.json()


def cmd_spectrum(args: argparse.Namespace) -> int:
    req = SpectrumRequest(
        instance=load_instance(args.instance),
        seed=args.seed,
        tolerances=parse_tol_overrides(args.tol),
    )
    if args.server:
        report = ReportModel.model_validate(_post_remote(args.server, "/spectrum", req.model_dump()))
    else:
        report = service.handle_spectrum(req)
    print(f"spectrum of {args.instance} ({report.instance_digest})")
    print_eigenvalues(report)
    write_report(report, args.report)
    write_eigenvalue_csv(report, args.plot_data)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    req = VerifyRequest(
        instance=load_instance(args.instance) if args.instance else None,
        random_dim=args.random,
        trials=args.trials,
        seed=args.seed,
        tolerances=parse_tol_overrides(args.tol),
        inject_fault=args.inject_fault,
    )
    if args.server:
        report = ReportModel.model_validate(_post_remote(args.server, "/verify", req.model_dump()))
        passed = bool(report.results.get("passed", False))
    else:
        report, passed = service.handle_verify(req)
    for row in report.results.get("properties", []):
        status = "pass" if row["passed"] else "FAIL"
        print(f"  [{status}] {row['name']}: max residual {row['max_residual']:.3e} (tol {row['tolerance']:.1e})")
    print(f"verify: {'all properties passed' if passed else 'FAILURES detected'}")
    write_report(report, args.report)
    write_property_csv(report, args.plot_data)
    return 0 if passed else 1


def cmd_interpolate(args: argparse.Namespace) -> int:
    zeros = parse_zero_list(args.zeros)
    req = InterpolateRequest(
        space=load_space(args.space),
        zeros=[service.ZeroSpec(re=z.real, im=z.imag, mult=m) for z, m in zeros],
        seed=args.seed,
        tolerances=parse_tol_overrides(args.tol),
    )
    if args.server:
        body = _post_remote(args.server, "/interpolate", req.model_dump())
        resp = service.InterpolateResponse.model_validate(body)
    else:
        resp = service.handle_interpolate(req)
    Path(args.out).write_text(json.dumps(resp.instance.model_dump(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"wrote instance {args.out}")
    print_eigenvalues(resp.report)
    write_report(resp.report, args.report)
    write_eigenvalue_csv(resp.report, args.plot_data)
    return 0


def cmd_blaschke(args: argparse.Namespace) -> int:
    zeros = parse_zero_list(args.zeros)
    for _, m in zeros:
        if m != 1:
            # repeat the zero instead of a multiplicity suffix
            raise AppError(2, "blaschke zeros take no :mult suffix; repeat the zero instead")
    req = BlaschkeRequest(
        zeros=[(z.real, z.imag) for z, _ in zeros],
        phase_angle=args.phase,
        seed=args.seed,
        tolerances=parse_tol_overrides(args.tol),
    )
    if args.server:
        body = _post_remote(args.server, "/blaschke", req.model_dump())
        resp = service.BlaschkeResponse.model_validate(body)
    else:
        resp = service.handle_blaschke(req)
    Path(args.out).write_text(json.dumps(resp.instance.model_dump(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"wrote instance {args.out}")
    print_eigenvalues(resp.report)
    write_report(resp.report, args.report)
    write_eigenvalue_csv(resp.report, args.plot_data)
    return 0


def cmd_perturb(args: argparse.Namespace) -> int:
    yvals = [parse_complex(chunk) for chunk in args.y.split(",")] if args.y.strip() else []
    req = PerturbRequest(
        diag=parse_real_list(args.diag),
        y=[(z.real, z.imag) for z in yvals],
        nu=parse_real_list(args.nu) if args.nu is not None else None,
        seed=args.seed,
        tolerances=parse_tol_overrides(args.tol),
    )
    if args.server:
        report = ReportModel.model_validate(_post_remote(args.server, "/perturb", req.model_dump()))
    else:
        report = service.handle_perturb(req)
    print("matrix eigenvalues:")
    for row in report.results.get("matrix_eigenvalues", []):
        print(f"  {row['re']:+.12g}{row['im']:+.12g}i  alg={row['alg']} geo={row['geo']}")
    print("defining-function zeros:")
    for row in report.results.get("g_zeros", []):
        print(f"  {row['re']:+.12g}{row['im']:+.12g}i  mult={row['mult']}")
    for name, value in sorted(report.residual_summary.items()):
        print(f"  residual {name} = {value:.3e}")
    write_report(report, args.report)
    write_eigenvalue_csv(report, args.plot_data, key="extension_eigenvalues")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run(service.app, host=args.host, port=args.port)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="override a named tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None, metavar="PATH", help="write the JSON report here")
    p.add_argument("--plot-data", default=None, metavar="PATH", help="write plot data (CSV) here")
    p.add_argument("--server", default=None, metavar="URL", help="send the request to a running service")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kreinext", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="compute the spectrum of an instance file")
    p.add_argument("instance", help="instance JSON path")
    _add_common(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("instance", nargs="?", default=None, help="optional instance JSON path")
    p.add_argument("--random", type=int, default=6, metavar="N", help="max dimension of random instances")
    p.add_argument("--trials", type=int, default=20, help="number of random instances")
    p.add_argument("--inject-fault", default=None, choices=["kernel"], help="test fixture: corrupt a computation")
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("interpolate", help="place a prescribed non-real spectrum")
    p.add_argument("--space", required=True, help="space JSON path")
    p.add_argument("--zeros", required=True, help='comma list like "0+1i,0-2i:2"')
    p.add_argument("--out", default="instance.out.json", help="output instance path")
    _add_common(p)
    p.set_defaults(fn=cmd_interpolate)

    p = sub.add_parser("blaschke", help="build the model-space instance of a finite Blaschke product")
    p.add_argument("--zeros", required=True, help='comma list of upper half-plane zeros, e.g. "0+1i,1+2i"')
    p.add_argument("--phase", type=float, default=0.0, help="phase angle in radians (pi is rejected)")
    p.add_argument("--out", default="instance.out.json", help="output instance path")
    _add_common(p)
    p.set_defaults(fn=cmd_blaschke)

    p = sub.add_parser("perturb", help="rank-one perturbation against the extension route")
    p.add_argument("--diag", required=True, help="comma list of real diagonal entries")
    p.add_argument("--y", required=True, help="comma list of complex perturbation entries")
    p.add_argument("--nu", default=None, help="optional comma list of measure weights")
    _add_common(p)
    p.set_defaults(fn=cmd_perturb)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except AppError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
