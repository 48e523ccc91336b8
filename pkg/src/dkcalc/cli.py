"""Command-line driver: ``dkcalc verify | spectrum | chirality``.

Configuration comes from an optional JSON document (``--config``) with
command-line flags taking precedence.  Reports are JSON; ``spectrum`` also
writes the eigenvalues of D as CSV with header ``index,re,im``.

Exit status: 0 when every executed check passed, 1 when any failed, 2 on a
usage error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from . import spectral
from .checks import CheckResult, Context, run_checks
from .complex_core import LatticeSpec

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
RUNTIME_FIELDS = ("runtime_ms",)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    lattice: Tuple[int, int, int, int] = (3, 3, 3, 3)
    boundary: str = "periodic"
    mass: Optional[float] = None
    masses: List[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])
    seed: int = 42
    tol: float = 1e-12
    out: Optional[str] = None
    csv: Optional[str] = None
    trials: int = 10
    ghost_lattice: Tuple[int, int, int, int] = (2, 2, 2, 2)

    def validate(self) -> "RunConfig":
        for name in ("lattice", "ghost_lattice"):
            value = tuple(getattr(self, name))
            if len(value) != 4 or any(not isinstance(n, int) or isinstance(n, bool) or n < 1 for n in value):
                raise UsageError(f"{name} needs four integers >= 1, got {value}")
            setattr(self, name, value)
        if self.boundary not in ("periodic", "ghost"):
            raise UsageError(f"boundary must be periodic or ghost, got {self.boundary!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2 ** 64:
            raise UsageError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not (isinstance(self.tol, (int, float)) and math.isfinite(self.tol) and self.tol > 0):
            raise UsageError(f"tol must be a positive number, got {self.tol!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise UsageError(f"trials must be a positive integer, got {self.trials!r}")
        return self

    def lattice_spec(self) -> LatticeSpec:
        return LatticeSpec(self.lattice, self.boundary)

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in dataclasses.asdict(self).items()}


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise UsageError(f"unknown config fields: {', '.join(unknown)}")
    return data


def _extents(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N0,N1,N2,N3, got {text!r}")


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_config(args: argparse.Namespace) -> RunConfig:
    values = load_config(args.config)
    for name in ("lattice", "boundary", "mass", "masses", "seed", "tol", "out", "csv", "trials", "ghost_lattice"):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    try:
        config = RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc
    return config.validate()


# --------------------------------------------------------------------------
# JSON with 17 significant digits

def _dump(obj, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = ",\n".join(inner + _dump(v, indent + 1) for v in obj)
        return "[\n" + body + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_report(report: dict) -> str:
    return _dump(report) + "\n"


def strip_runtime(report: dict) -> dict:
    """Copy of a report without timing fields (for reproducibility comparisons)."""
    if isinstance(report, dict):
        return {k: strip_runtime(v) for k, v in report.items() if k not in RUNTIME_FIELDS}
    if isinstance(report, list):
        return [strip_runtime(v) for v in report]
    return report


def make_report(command: str, config: RunConfig, results: List[CheckResult], **extra) -> dict:
    records = [r.to_dict() for r in sorted(results, key=lambda r: r.id)]
    passed = sum(r.passed for r in results)
    report = {
        "command": command,
        "config": config.to_dict(),
        "checks": records,
        "summary": {"total": len(results), "passed": passed, "failed": len(results) - passed},
    }
    report.update(extra)
    return report


def emit(report: dict, config: RunConfig) -> None:
    text = dumps_report(report)
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, (time.perf_counter() - start) * 1e3


# --------------------------------------------------------------------------
# commands

def cmd_verify(config: RunConfig) -> dict:
    """Every structural invariant on seeded random data.

    Periodic identities run on ``lattice`` (periodic closure); the Green
    formula runs on ``ghost_lattice``, or on ``lattice`` itself when the
    boundary mode is ghost.
    """
    periodic = LatticeSpec(config.lattice, "periodic")
    ghost = LatticeSpec(config.lattice if config.boundary == "ghost" else config.ghost_lattice, "ghost")
    ctx = Context(periodic, ghost, config.seed, config.trials, config.tol, list(config.masses))
    return make_report("verify", config, run_checks(ctx))


def cmd_spectrum(config: RunConfig) -> dict:
    lattice = config.lattice_spec()
    if not lattice.is_periodic:
        raise UsageError("spectrum needs a periodic lattice")
    if lattice.n_sites > spectral.DESK_SCALE_SITES:
        raise UsageError(
            f"lattice has {lattice.n_sites} sites; dense spectra are capped at "
            f"{spectral.DESK_SCALE_SITES} sites (3^4, dimension 1296)"
        )
    eigenvalues, t_matrix = _timed(lambda: spectral.matrix_spectrum(lattice))
    symbol, t_symbol = _timed(lambda: spectral.symbol_spectrum(lattice))
    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    eigenvalues = eigenvalues[order]
    distance = spectral.match_spectra(eigenvalues, symbol)
    expected_rows = spectral.dimension(lattice)
    results = [
        CheckResult("spectral.dimension", "eigenvalue count = 16 * sites", eigenvalues.size == expected_rows,
                    float(abs(eigenvalues.size - expected_rows)), 0.0, t_matrix),
        CheckResult("spectral.symbol_agreement", "spectrum of D = union of Fourier symbol spectra",
                    distance <= 1e-9, distance, 1e-9, t_symbol),
    ]
    if config.csv:
        with open(config.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "re", "im"])
            for i, lam in enumerate(eigenvalues):
                writer.writerow([i, format(lam.real, ".17g"), format(lam.imag, ".17g")])
    return make_report("spectrum", config, results, csv=config.csv, n_eigenvalues=int(eigenvalues.size))


def cmd_chirality(config: RunConfig) -> dict:
    lattice = config.lattice_spec()
    if not lattice.is_periodic:
        raise UsageError("chirality needs a periodic lattice")
    if lattice.n_sites > spectral.DESK_SCALE_SITES:
        raise UsageError(f"lattice has {lattice.n_sites} sites; the dense cap is {spectral.DESK_SCALE_SITES}")
    masses = [config.mass] if config.mass is not None else list(config.masses)
    if not masses or any(m <= 0 for m in masses):
        raise UsageError(f"masses must be > 0 for the triviality check, got {masses}")

    results: List[CheckResult] = []
    trivial, t_triv = _timed(lambda: spectral.certify_triviality(lattice, masses))
    for rec in trivial.records:
        sigma = min(rec.sigma_self_dual, rec.sigma_anti_self_dual)
        results.append(CheckResult(
            f"triviality.m={rec.mass:.17g}", "smallest singular value of [D - m; I -/+ iota star] > 1e-8",
            rec.passed, sigma, rec.threshold, t_triv / len(trivial.records)))

    kernel, tk = _timed(lambda: spectral.certify_massless(lattice))
    results.append(CheckResult(
        "chiral_invariance.kernel", f"D Omega+/- = 0 on the {kernel.dimension}-dimensional massless kernel",
        kernel.passed, max(kernel.max_residual, kernel.max_plus, kernel.max_minus), kernel.threshold, tk))

    flip, tf = _timed(lambda: spectral.certify_flip(lattice))
    for i, rec in enumerate(flip.records):
        results.append(CheckResult(
            f"chirality_flip.eigenpair={i:04d}", f"m = {rec.eigenvalue.real:.17g}",
            rec.passed, max(rec.residual_plus, rec.residual_minus), rec.threshold,
            tf / max(1, len(flip.records))))
    flips = [
        {"index": i, "m_re": rec.eigenvalue.real, "m_im": rec.eigenvalue.imag,
         "eigen_residual": rec.eigen_residual, "residual_plus": rec.residual_plus,
         "residual_minus": rec.residual_minus}
        for i, rec in enumerate(flip.records)
    ]
    return make_report("chirality", config, results, kernel_dimension=kernel.dimension,
                       complex_eigenvalues=flip.n_complex, flip_residuals=flips)


COMMANDS = {"verify": cmd_verify, "spectrum": cmd_spectrum, "chirality": cmd_chirality}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its fields")
    common.add_argument("--lattice", type=_extents, metavar="N0,N1,N2,N3")
    common.add_argument("--boundary", choices=["periodic", "ghost"])
    common.add_argument("--mass", type=float)
    common.add_argument("--masses", type=_floats, metavar="M1,M2,...")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--out", help="report path (default: stdout)")
    common.add_argument("--csv", help="spectrum CSV path")
    common.add_argument("--trials", type=int)
    common.add_argument("--ghost-lattice", dest="ghost_lattice", type=_extents, metavar="N0,N1,N2,N3")

    parser = argparse.ArgumentParser(prog="dkcalc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run every structural invariant")
    sub.add_parser("spectrum", parents=[common], help="eigenvalues of D and the Fourier-symbol cross-check")
    sub.add_parser("chirality", parents=[common], help="triviality, chiral invariance and chirality flip")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        report = COMMANDS[args.command](config)
    except UsageError as exc:
        print(f"dkcalc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit(report, config)
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
