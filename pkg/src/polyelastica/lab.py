"""Convergence and divergence experiments over refining inscriptions.

A run inscribes polygonals with increasing vertex counts, evaluates their
p-rotation and modulus, and compares against the p-energy of the curve.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from os import PathLike
from typing import Optional

import numpy as np

from .curves import CurveSpec, closed_form_energy, make_curve, p_energy
from .inscription import SCHEMES, refinement_sequence
from .smoothing import generalized_rotation, p_rotation

__all__ = [
    "ExperimentConfig",
    "ReportRow",
    "ExperimentReport",
    "LangleSummary",
    "run_convergence",
    "run_corner_divergence",
    "fuzz_langle",
    "emit_report",
    "report_to_dict",
    "fit_slope",
    "COLUMNS",
]

COLUMNS = ("n", "mesh", "modulus", "k_value", "reference_energy", "abs_error", "rel_error")

_DEFAULT_TOLERANCES = {"quadrature": 1e-10, "root_find": 1e-15, "modulus_resolution": 257}


@dataclass
class ExperimentConfig:
    curve: CurveSpec
    scheme: str = "uniform"
    p: float = 2.0
    alpha: float = 0.0
    counts: list = field(default_factory=lambda: [8, 16, 32, 64])
    reference: str = "closed_form"
    tolerances: dict = field(default_factory=lambda: dict(_DEFAULT_TOLERANCES))
    seed: int = 0
    output: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.curve, dict):
            self.curve = CurveSpec.from_dict(self.curve)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not self.p >= 1:
            raise ValueError("p must be >= 1")
        if self.alpha < 1 - self.p:
            raise ValueError("alpha must be >= 1 - p")
        if self.alpha != 0 and self.p == 1:
            raise ValueError("a non-zero alpha needs p > 1")
        counts = [int(n) for n in self.counts]
        if not counts or any(n < 2 for n in counts):
            raise ValueError("counts must be integers >= 2")
        if any(b <= a for a, b in zip(counts[:-1], counts[1:])):
            raise ValueError("counts must be strictly increasing")
        self.counts = counts
        if self.reference not in ("quadrature", "closed_form"):
            raise ValueError("reference must be 'quadrature' or 'closed_form'")
        self.tolerances = {**_DEFAULT_TOLERANCES, **(self.tolerances or {})}
        unknown = set(self.tolerances) - set(_DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance keys {sorted(unknown)}")
        self.seed = int(self.seed)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        allowed = {"curve", "scheme", "p", "alpha", "counts", "reference", "tolerances",
                   "seed", "output"}
        if not isinstance(data, dict) or "curve" not in data:
            raise ValueError("config must be an object with a 'curve' field")
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown config fields {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | PathLike) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["curve"] = self.curve.to_dict()
        return d


@dataclass(frozen=True)
class ReportRow:
    n: int
    mesh: float
    modulus: float
    k_value: float
    reference_energy: float
    abs_error: float
    rel_error: float


@dataclass
class ExperimentReport:
    rows: list
    rate_estimate: Optional[float]
    metadata: dict
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


def fit_slope(x, y) -> Optional[float]:
    """Least-squares slope of log y against log x over the last ceil(half) points.

    Points with non-positive or non-finite values are ignored; ``None`` if
    fewer than two remain.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    start = len(x) // 2
    x, y = x[start:], y[start:]
    ok = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if ok.sum() < 2:
        return None
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def _reference(config: ExperimentConfig, curve) -> tuple[float, str]:
    if config.reference == "closed_form":
        ref = closed_form_energy(curve, config.p)
        if ref is not None:
            return ref, "closed_form"
    rep = p_energy(curve, config.p, config.tolerances["quadrature"])
    return rep.value, "quadrature"


def _k_value(P, config: ExperimentConfig) -> float:
    if config.alpha == 0:
        return p_rotation(P, config.p)
    try:
        return generalized_rotation(P, config.p, config.alpha)
    except ValueError:
        return math.inf


def _rows(config: ExperimentConfig, curve, reference: float):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        seq = refinement_sequence(curve, config.scheme, config.counts,
                                  int(config.tolerances["modulus_resolution"]))
    rows = []
    for ins in seq:
        k = _k_value(ins.polygonal, config)
        if math.isfinite(k) and math.isfinite(reference):
            abs_err = abs(k - reference)
            rel_err = abs_err / abs(reference) if reference != 0 else abs_err
        else:
            abs_err = rel_err = math.inf
        rows.append(ReportRow(ins.n, ins.mesh, float(ins.modulus), float(k), float(reference),
                              float(abs_err), float(rel_err)))
    return rows, [str(w.message) for w in caught]


def run_convergence(config: ExperimentConfig) -> ExperimentReport:
    """Compare p-rotations of refining inscriptions against the p-energy.

    ``rate_estimate`` is the slope of log(abs_error) against log(modulus).
    Infinite p-rotations on a smooth curve are listed in ``failures``.
    """
    curve = make_curve(config.curve)
    if curve.flagged:
        raise ValueError("convergence studies need a curve without corners")
    reference, source = _reference(config, curve)
    rows, notes = _rows(config, curve, reference)
    failures = [f"n={r.n}: infinite p-rotation" for r in rows if not math.isfinite(r.k_value)]
    failures += notes
    rate = fit_slope([r.modulus for r in rows], [r.abs_error for r in rows])
    meta = {"config": config.to_dict(), "reference_source": source, "kind": "convergence"}
    return ExperimentReport(rows, rate, meta, failures)


def run_corner_divergence(config: ExperimentConfig) -> ExperimentReport:
    """p-rotations of refining inscriptions of a corner curve.

    ``rate_estimate`` is the slope of log(k_value) against log(modulus); for
    p > 1 it should approach -(p - 1), for p = 1 the values converge to the
    corner angle.
    """
    curve = make_curve(config.curve)
    if config.curve.kind != "corner":
        raise ValueError("corner studies need a corner curve")
    reference = closed_form_energy(curve, config.p)
    rows, notes = _rows(config, curve, reference)
    rate = fit_slope([r.modulus for r in rows], [r.k_value for r in rows])
    meta = {"config": config.to_dict(), "reference_source": "closed_form",
            "kind": "corner", "expected_slope": -(config.p - 1.0)}
    return ExperimentReport(rows, rate, meta, notes)


@dataclass(frozen=True)
class LangleSummary:
    trials: int
    dimension: int
    violations: int
    min_slack: float
    counterexample: Optional[dict] = None


def fuzz_langle(seed: int, trials: int, dimension: int) -> LangleSummary:
    """Check |b - (1 + s) a|^2 >= 2 (1 - cos theta) on random unit vectors.

    a is uniform on the sphere, b makes angle theta ~ U[0, pi) with a and
    s ~ U[0, 1). The slack LHS - RHS is recorded for every trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if dimension < 2:
        raise ValueError("dimension must be >= 2")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((trials, dimension))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    w = rng.standard_normal((trials, dimension))
    w -= np.sum(w * a, axis=1, keepdims=True) * a
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    theta = rng.uniform(0.0, math.pi, trials)
    sigma = rng.uniform(0.0, 1.0, trials)
    b = np.cos(theta)[:, None] * a + np.sin(theta)[:, None] * w
    lhs = np.sum((b - (1.0 + sigma)[:, None] * a) ** 2, axis=1)
    rhs = 2.0 * (1.0 - np.cos(theta))
    slack = lhs - rhs
    bad = np.flatnonzero(slack < 0)
    example = None
    if len(bad):
        i = int(bad[0])
        example = {"a": a[i].tolist(), "b": b[i].tolist(), "theta": float(theta[i]),
                   "sigma": float(sigma[i]), "lhs": float(lhs[i]), "rhs": float(rhs[i])}
    return LangleSummary(trials, dimension, len(bad), float(slack.min()), example)


def _num(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def report_to_dict(report: ExperimentReport) -> dict:
    return {
        "rows": [{k: _num(v) for k, v in asdict(r).items()} for r in report.rows],
        "rate_estimate": _num(report.rate_estimate),
        "metadata": report.metadata,
        "failures": list(report.failures),
    }


def _csv_cell(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v) if isinstance(v, float) else str(v)


def emit_report(report: ExperimentReport, fmt: str = "csv", path: str | PathLike | None = None) -> str:
    """Serialise a report as CSV (fixed columns, header row) or JSON.

    Infinite values are written as the string ``inf``. Writes to ``path``
    when given and returns the text either way.
    """
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in report.rows:
            writer.writerow([_csv_cell(getattr(r, c)) for c in COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(report_to_dict(report), indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
