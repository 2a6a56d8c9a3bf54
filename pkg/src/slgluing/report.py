"""Verification records, experiment configuration and report files."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .asymptotics import NormCurve
from .config import ConfigError, ModelParams, params_from_mapping, parse_flat_config

SUITES = ("flat-identities", "gluing", "phase-norms", "criteria", "sobolev-partition",
          "spectral", "sobolev-probe", "all")

OUT_ENV = "SLGLUING_OUT"
CURVE_HEADER = ("quantity", "region", "m", "c1", "c2", "t", "value")


@dataclass(frozen=True)
class MeshResolution:
    nr: int = 16
    nphi: int = 12
    ntheta: int = 8

    def violations(self) -> list[str]:
        return [f"mesh.{k} must be at least 4" for k, v in asdict(self).items() if v < 4]


@dataclass(frozen=True)
class ExperimentConfig:
    suite: str
    params: ModelParams
    out_dir: Path
    seed: int
    mesh: MeshResolution = MeshResolution()
    warnings: tuple[str, ...] = ()


def lemma_threshold(m: int, a: float) -> float:
    """``max(1/2 (1 + 1/m), (1 - a)/m)``, the lower bound needed on ``eta2``."""
    return max(0.5 * (1 + 1 / m), (1 - a) / m)


def config_warnings(params: ModelParams) -> list[str]:
    thr = lemma_threshold(params.m, params.a_exp)
    if params.eta2 <= thr:
        return [f"eta2={params.eta2} does not exceed max((1+1/m)/2, (1-a)/m)={thr:.4g}; "
                "the dilatation lemma for the partition analysis does not apply"]
    return []


def build_config(values: dict[str, Any], suite: str = "all", out_dir: str | Path | None = None,
                 seed: int | None = None) -> ExperimentConfig:
    """Validate a dotted-key mapping into an :class:`ExperimentConfig`.

    Keys under ``mesh.`` set the spectral resolutions, ``run.suite`` and
    ``run.out`` the suite and output directory; everything else goes to
    :class:`ModelParams`.  All violations are collected into one error.
    """
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; expected one of {SUITES}")
    model, mesh, run = {}, {}, {}
    for key, val in values.items():
        head = key.split(".", 1)[0] if "." in key else ""
        (mesh if head == "mesh" else run if head == "run" else model)[key] = val
    problems: list[str] = []
    params = ModelParams()
    try:
        params = params_from_mapping(model)
    except ConfigError as exc:
        problems.append(str(exc))
    mesh_kw = {}
    for key, val in mesh.items():
        name = key.split(".", 1)[1]
        if name not in MeshResolution.__dataclass_fields__:
            problems.append(f"unknown configuration key {key!r}")
        elif not isinstance(val, int) or isinstance(val, bool):
            problems.append(f"{key}: expected an integer, got {val!r}")
        else:
            mesh_kw[name] = val
    res = MeshResolution(**mesh_kw)
    problems += res.violations()
    suite = str(run.pop("run.suite", suite))
    if suite not in SUITES:
        problems.append(f"unknown suite {suite!r}")
    out = out_dir or run.pop("run.out", None) or os.environ.get(OUT_ENV, "out")
    run.pop("run.out", None)
    problems += [f"unknown configuration key {k!r}" for k in run]
    if problems:
        raise ConfigError("; ".join(problems))
    if seed is not None:
        params = params.replace(seed=int(seed))
    return ExperimentConfig(suite, params, Path(out), params.seed, res,
                            tuple(config_warnings(params)))


def load_experiment(path: str | Path | None, **kw) -> ExperimentConfig:
    """Read and validate an experiment configuration file."""
    values = {} if path is None else parse_flat_config(Path(path).read_text())
    return build_config(values, **kw)


@dataclass
class Check:
    """One verification outcome."""

    check_id: str
    anchor: str
    predicted: Any
    measured: Any
    tolerance: Any
    passed: bool
    exploratory: bool = False
    runtime: float = 0.0
    error: str | None = None

    def summary(self) -> dict:
        out = {"id": self.check_id, "anchor": self.anchor, "predicted": self.predicted,
               "measured": self.measured, "tolerance": self.tolerance,
               "passed": bool(self.passed), "exploratory": self.exploratory}
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class VerificationReport:
    suite: str
    params: ModelParams
    checks: list[Check] = field(default_factory=list)
    curves: list[NormCurve] = field(default_factory=list)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed and not c.exploratory]

    @property
    def ok(self) -> bool:
        return not self.failed

    def counts(self) -> dict[str, int]:
        ex = sum(c.exploratory for c in self.checks)
        return {"total": len(self.checks), "exploratory": ex, "failed": len(self.failed),
                "passed": len(self.checks) - ex - len(self.failed)}

    def summary(self) -> dict:
        """Deterministic content of the summary file (no timings)."""
        return {"suite": self.suite, "params": asdict(self.params), "counts": self.counts(),
                "checks": [c.summary() for c in self.checks],
                "curves": [c.as_dict() for c in self.curves]}


def _clean(obj):
    """Make an object JSON-safe (tuples to lists, non-finite floats to strings)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and obj != obj:
        return "nan"
    if isinstance(obj, float) and obj in (float("inf"), float("-inf")):
        return "inf" if obj > 0 else "-inf"
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    return obj


def summary_text(report: VerificationReport) -> str:
    return json.dumps(_clean(report.summary()), sort_keys=True, indent=2) + "\n"


def table_text(report: VerificationReport) -> str:
    lines = [f"suite: {report.suite}", ""]
    width = max([len(c.check_id) for c in report.checks] + [5])
    lines.append(f"{'check':<{width}}  {'status':<11}  {'time[s]':>8}  anchor")
    for c in report.checks:
        status = "exploratory" if c.exploratory else ("pass" if c.passed else "FAIL")
        lines.append(f"{c.check_id:<{width}}  {status:<11}  {c.runtime:8.2f}  {c.anchor}")
        lines.append(f"{'':<{width}}    predicted={_fmt(c.predicted)} measured={_fmt(c.measured)}"
                     f" tol={_fmt(c.tolerance)}")
        if c.error:
            lines.append(f"{'':<{width}}    error: {c.error}")
    k = report.counts()
    lines += ["", f"passed {k['passed']}, failed {k['failed']}, exploratory {k['exploratory']}"]
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and len(v) > 6:
        return f"[{len(v)} values]"
    return str(v)


def write_curves(curves: list[NormCurve], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for cv in curves:
            for t, v in cv.samples:
                w.writerow([cv.quantity, cv.region, cv.m, repr(float(cv.c1)), repr(float(cv.c2)),
                            repr(float(t)), repr(float(v))])


def emit_reports(report: VerificationReport, out_dir: str | Path) -> dict[str, Path]:
    """Write ``curves.csv``, ``summary.json`` and ``report.txt`` into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {"curves": out / "curves.csv", "summary": out / "summary.json",
                 "table": out / "report.txt"}
        write_curves(report.curves, paths["curves"])
        paths["summary"].write_text(summary_text(report))
        paths["table"].write_text(table_text(report))
    except OSError as exc:
        raise OSError(f"cannot write reports to {out}: {exc}") from exc
    return paths
