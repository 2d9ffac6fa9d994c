"""Random instance generation with controlled (D, d, ||V||), single-trial
verification, and deterministic batch sweeps with JSONL/CSV reporting."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import m_total
from .errors import ConfigInvalid, NoConvergence, TanThetaError
from .model import SpectralDisposition, make_block_operator
from .riccati import (
    extract_angular_operator,
    solve_riccati_fixed_point,
    verify_lemma_identities,
)
from .spectral import (
    find_disposition,
    perturbed_partition,
    projection_distance,
    unperturbed_projector,
)

# Trials with ratio at or below this also run the fixed-point solver and
# record the cross-method deviation.
CROSS_CHECK_RATIO = 0.9

MARGIN_FAILURE_THRESHOLD = -1e-8

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """Finalizer of the splitmix64 generator; the fixed 64-bit mixing
    function used to derive per-trial seeds."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def trial_seed(base_seed: int, index: int) -> int:
    """seed_i = base_seed XOR splitmix64(i)."""
    return (base_seed ^ splitmix64(index)) & _MASK64


@dataclass(frozen=True)
class GenConfig:
    """Parameters of one random instance draw."""

    dim0: int
    dim1: int
    D: float
    d: float
    ratio: float
    span: float = 1.0
    conjugate: bool = False
    seed: int = 0

    def validate(self) -> None:
        if self.dim0 < 1 or self.dim1 < 2:
            raise ConfigInvalid("need dim0 >= 1 and dim1 >= 2")
        if not (self.D > 0.0 and 0.0 < self.d <= self.D / 2.0):
            raise ConfigInvalid(f"need 0 < d <= D/2, got d={self.d}, D={self.D}")
        if self.ratio < 0.0 or self.ratio >= math.sqrt(self.D / self.d):
            raise ConfigInvalid(
                f"ratio must lie in [0, sqrt(D/d)), got {self.ratio}"
            )
        if self.span <= 0.0:
            raise ConfigInvalid("span must be positive")
        if not 0 <= self.seed <= _MASK64:
            raise ConfigInvalid("seed must be a 64-bit unsigned integer")


def generate_instance(cfg: GenConfig) -> tuple:
    """Draw a block operator with gap exactly (-D/2, D/2), distance exactly
    d and ||B|| = ratio * d.

    One sigma0 value is pinned at an inner-interval endpoint and the gap
    edges +-D/2 carry sigma1 values, so the disposition parameters are
    attained, not just bounded. With conjugate=True both diagonal blocks
    and B undergo a random block-orthogonal change of basis, which leaves
    every computed norm invariant. Deterministic for fixed seed.
    """
    cfg.validate()
    rng = np.random.default_rng(np.random.PCG64(cfg.seed))
    half = cfg.D / 2.0
    lo, hi = -half + cfg.d, half - cfg.d

    sigma0 = lo + (hi - lo) * rng.random(cfg.dim0)
    sigma0[0] = lo if rng.random() < 0.5 else hi
    sigma0.sort()

    sigma1 = np.empty(cfg.dim1)
    sigma1[0] = -half
    sigma1[1] = half
    for i in range(2, cfg.dim1):
        side = 1.0 if rng.random() < 0.5 else -1.0
        sigma1[i] = side * (half + cfg.span * rng.random())
    sigma1.sort()

    B = rng.standard_normal((cfg.dim0, cfg.dim1))
    top = np.linalg.norm(B, 2)
    B = B * (cfg.ratio * cfg.d / top) if cfg.ratio > 0.0 else np.zeros_like(B)

    A0 = np.diag(sigma0)
    A1 = np.diag(sigma1)
    if cfg.conjugate:
        Q0, _ = np.linalg.qr(rng.standard_normal((cfg.dim0, cfg.dim0)))
        Q1, _ = np.linalg.qr(rng.standard_normal((cfg.dim1, cfg.dim1)))
        A0 = Q0 @ A0 @ Q0.T
        A1 = Q1 @ A1 @ Q1.T
        B = Q0 @ B @ Q1.T

    block = make_block_operator(A0, A1, B)
    disp = SpectralDisposition(
        tuple(sigma0), tuple(sigma1), -half, half, cfg.d, cfg.D
    )
    return block, disp


@dataclass(frozen=True)
class TrialReport:
    """Measured and estimated quantities of one verification run."""

    seed: int
    dims: tuple
    D: float
    d: float
    v: float
    region: str
    distance: float
    bound: float
    margin: float
    apriori: Optional[float]
    x_norm: float
    riccati_residual: float
    lemma_max_residual: float
    method: str
    elapsed_ms: float
    cross_method_deviation: Optional[float] = None


@dataclass(frozen=True)
class FailureRecord:
    """A trial whose pipeline raised; carried in-stream, never fatal."""

    seed: int
    error: str
    message: str


@dataclass(frozen=True)
class SweepSummary:
    trials: int
    failures: int
    min_margin: Optional[float]
    max_distance_bound_ratio: Optional[float]


def run_trial(cfg: GenConfig) -> TrialReport:
    """Full pipeline: generate, partition, extract the angular operator,
    measure the projector distance, evaluate all bounds, audit the
    eigenpair identities, and (for small ratio) cross-check against the
    fixed-point solver."""
    start = time.perf_counter()
    block, disp = generate_instance(cfg)
    measured = find_disposition(block)
    v = block.v_norm
    partition = perturbed_partition(block, measured)
    ang = extract_angular_operator(partition, block)
    distance = projection_distance(unperturbed_projector(block), partition.P0)
    ev = m_total(measured.D, measured.d, v)
    bound = ev.projection_bound
    region = ev.point.region.name
    apriori = ev.apriori_bound
    audit = verify_lemma_identities(ang, block, seed=cfg.seed)
    cross = None
    method = "extraction"
    if 0.0 < cfg.ratio <= CROSS_CHECK_RATIO:
        try:
            fp = solve_riccati_fixed_point(block, measured)
            cross = float(np.linalg.norm(fp.X - ang.X, 2))
        except NoConvergence:
            cross = None
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return TrialReport(
        seed=cfg.seed,
        dims=(cfg.dim0, cfg.dim1),
        D=measured.D,
        d=measured.d,
        v=v,
        region=region,
        distance=distance,
        bound=bound,
        margin=bound - distance,
        apriori=apriori,
        x_norm=ang.norm,
        riccati_residual=ang.riccati_residual,
        lemma_max_residual=audit.max_residual,
        method=method,
        elapsed_ms=elapsed_ms,
        cross_method_deviation=cross,
    )


def run_sweep(base_cfg: GenConfig, trials: int, ratio_grid) -> tuple:
    """Run trials x len(ratio_grid) independent trials with seeds derived
    from the base seed by the documented mixing rule.

    Returns (records, summary); records holds TrialReport and FailureRecord
    entries in trial order. Individual failures are recorded in-stream.
    """
    ratio_grid = [float(r) for r in ratio_grid]
    for r in ratio_grid:
        if r < 0.0 or r >= math.sqrt(base_cfg.D / base_cfg.d):
            raise ConfigInvalid(f"ratio {r} outside [0, sqrt(D/d))")
    records = []
    min_margin = None
    max_ratio = None
    failures = 0
    index = 0
    for _trial in range(trials):
        for ratio in ratio_grid:
            cfg = GenConfig(
                dim0=base_cfg.dim0,
                dim1=base_cfg.dim1,
                D=base_cfg.D,
                d=base_cfg.d,
                ratio=ratio,
                span=base_cfg.span,
                conjugate=base_cfg.conjugate,
                seed=trial_seed(base_cfg.seed, index),
            )
            index += 1
            try:
                report = run_trial(cfg)
            except TanThetaError as exc:
                failures += 1
                records.append(
                    FailureRecord(cfg.seed, type(exc).__name__, str(exc))
                )
                continue
            records.append(report)
            if min_margin is None or report.margin < min_margin:
                min_margin = report.margin
            if report.bound > 0.0:
                ratio_db = report.distance / report.bound
                if max_ratio is None or ratio_db > max_ratio:
                    max_ratio = ratio_db
    summary = SweepSummary(
        trials=trials * len(ratio_grid),
        failures=failures,
        min_margin=min_margin,
        max_distance_bound_ratio=max_ratio,
    )
    return records, summary


def format_float(x: float) -> str:
    """Fixed 17-significant-digit rendering used by all report output."""
    return format(float(x), ".17g")


# elapsed_ms is intentionally absent: sweep output must be byte-identical
# across reruns with the same seed.
REPORT_FIELDS = (
    "seed",
    "dims",
    "D",
    "d",
    "v",
    "region",
    "distance",
    "bound",
    "margin",
    "apriori",
    "x_norm",
    "riccati_residual",
    "lemma_max_residual",
    "method",
    "cross_method_deviation",
)


def _field_to_json(name: str, value) -> str:
    if value is None:
        return "null"
    if name in ("region", "method"):
        return f'"{value}"'
    if name == "seed":
        return str(value)
    if name == "dims":
        return f"[{value[0]}, {value[1]}]"
    return format_float(value)


def report_to_json_line(report: TrialReport) -> str:
    parts = [
        f'"{name}": {_field_to_json(name, getattr(report, name))}'
        for name in REPORT_FIELDS
    ]
    return "{" + ", ".join(parts) + "}"


def failure_to_json_line(rec: FailureRecord) -> str:
    return (
        f'{{"seed": {rec.seed}, "error": "{rec.error}", '
        f'"message": {_json_escape(rec.message)}}}'
    )


def _json_escape(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def summary_to_json_line(summary: SweepSummary) -> str:
    mm = "null" if summary.min_margin is None else format_float(summary.min_margin)
    mr = (
        "null"
        if summary.max_distance_bound_ratio is None
        else format_float(summary.max_distance_bound_ratio)
    )
    return (
        f'{{"summary": true, "trials": {summary.trials}, '
        f'"failures": {summary.failures}, "min_margin": {mm}, '
        f'"max_distance_bound_ratio": {mr}}}'
    )


def write_reports(records, summary: SweepSummary, path, fmt: str = "jsonl") -> None:
    """Write the report stream plus a trailing summary record."""
    if fmt == "jsonl":
        with open(path, "w") as fh:
            for rec in records:
                if isinstance(rec, FailureRecord):
                    fh.write(failure_to_json_line(rec) + "\n")
                else:
                    fh.write(report_to_json_line(rec) + "\n")
            fh.write(summary_to_json_line(summary) + "\n")
    elif fmt == "csv":
        with open(path, "w") as fh:
            fh.write(",".join(REPORT_FIELDS) + "\n")
            for rec in records:
                if isinstance(rec, FailureRecord):
                    row = {name: "" for name in REPORT_FIELDS}
                    row["seed"] = str(rec.seed)
                    row["method"] = f"failed:{rec.error}"
                    fh.write(",".join(row[name] for name in REPORT_FIELDS) + "\n")
                    continue
                cells = []
                for name in REPORT_FIELDS:
                    value = getattr(rec, name)
                    if value is None:
                        cells.append("")
                    elif name == "dims":
                        cells.append(f"{value[0]}x{value[1]}")
                    elif name in ("region", "method"):
                        cells.append(str(value))
                    elif name == "seed":
                        cells.append(str(value))
                    else:
                        cells.append(format_float(value))
                fh.write(",".join(cells) + "\n")
            mm = "" if summary.min_margin is None else format_float(summary.min_margin)
            mr = (
                ""
                if summary.max_distance_bound_ratio is None
                else format_float(summary.max_distance_bound_ratio)
            )
            tail = [""] * (len(REPORT_FIELDS) - 5)
            fh.write(
                ",".join(
                    ["summary", str(summary.trials), str(summary.failures), mm, mr]
                    + tail
                )
                + "\n"
            )
    else:
        raise ConfigInvalid(f"unknown report format: {fmt}")
