"""Experiment harness: data files, masking patterns, metrics, artifacts.

Data files are CSV (rows = sensors, columns = time steps; empty cells
or ``nan`` tokens mark missing values) or ``.npy`` arrays with NaN for
missing.  Three masking patterns hide observed entries for evaluation:

``rm``
    random missing: every observed entry is hidden independently.
``nm``
    non-random missing: whole (sensor, day) fibers are hidden.
``bm``
    blackout missing: whole window-aligned blocks of consecutive time
    steps are hidden across all sensors at once.

Imputation quality is scored on the hidden-but-known entries with MAPE
(entries with ``|truth| <= 1e-6`` excluded and counted) and RMSE (all
hidden entries).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .solver import ImputationResult, SolverConfig, impute, impute_lamc, lrtc_tnn_mode
from .tensors import project

PATTERNS = ("rm", "nm", "bm")
MODELS = ("latc", "lamc", "lrtc-tnn")
ZERO_TOLERANCE = 1e-6

_METRICS_FILE = "metrics.txt"
_HISTORY_FILE = "history.txt"
_IMPUTED_FILE = "imputed.csv"
_EVAL_MASK_FILE = "eval_mask.csv"
_CELL_FILE = "cell.txt"
_GRID_FILE = "grid.txt"


class DataError(Exception):
    """An input file could not be parsed into a valid matrix."""


@dataclass(frozen=True)
class MaskSpec:
    """Which pattern to apply, how much to hide, and the RNG seed."""

    pattern: str
    rate: float = 0.3
    window: int = 6
    seed: int = 0

    def validate(self) -> None:
        if self.pattern not in PATTERNS:
            raise ValueError(f"pattern must be one of {PATTERNS}, got {self.pattern!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must be in [0, 1], got {self.rate}")
        if self.pattern == "bm" and self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")


@dataclass(frozen=True)
class EvalReport:
    mape: float
    rmse: float
    n_eval: int
    excluded_zero: int


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _write_records(path: Path, records) -> None:
    """One ``key = value ...`` line per record."""
    lines = []
    for record in records:
        lines.append(" ".join(f"{k} = {_format_value(v)}" for k, v in record))
    path.write_text("\n".join(lines) + "\n")


def load_matrix(path, fmt: str | None = None):
    """Read a data file into ``(values, mask)``.

    Missing cells come back as ``0.0`` with ``mask`` false.  ``fmt`` is
    ``"csv"`` or ``"binary"``; when omitted it is inferred from the
    suffix (``.csv`` / ``.npy``).
    """
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower()
        if suffix == ".csv":
            fmt = "csv"
        elif suffix == ".npy":
            fmt = "binary"
        else:
            raise DataError(f"cannot infer format from suffix {suffix!r} of {path}")
    if fmt == "csv":
        return _load_csv(path)
    if fmt == "binary":
        return _load_binary(path)
    raise DataError(f"unknown format {fmt!r}")


def _load_csv(path: Path):
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")
    width = len(rows[0])
    values = np.zeros((len(rows), width))
    mask = np.ones((len(rows), width), dtype=bool)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"{path}: row {i + 1} has {len(row)} columns, expected {width}"
            )
        for j, token in enumerate(row):
            token = token.strip()
            if token == "" or token.lower() == "nan":
                mask[i, j] = False
                continue
            try:
                value = float(token)
            except ValueError as exc:
                raise DataError(
                    f"{path}: non-numeric token {token!r} at row {i + 1}, column {j + 1}"
                ) from exc
            if not np.isfinite(value):
                raise DataError(
                    f"{path}: non-finite value {token!r} at row {i + 1}, column {j + 1}"
                )
            values[i, j] = value
    return values, mask


def _load_binary(path: Path):
    try:
        arr = np.load(path)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if arr.ndim != 2:
        raise DataError(f"{path}: expected a 2-D array, got shape {arr.shape}")
    arr = arr.astype(float)
    if np.isinf(arr).any():
        raise DataError(f"{path}: array contains infinite values")
    mask = np.isfinite(arr)
    return np.where(mask, arr, 0.0), mask


def save_matrix(path, values: np.ndarray, mask: np.ndarray | None = None) -> None:
    """Write a matrix as CSV; cells where ``mask`` is false stay empty.

    Values use shortest round-trip decimal form, so a save/load cycle
    reproduces them exactly.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {values.shape}")
    if mask is None:
        mask = np.ones(values.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != values.shape:
        raise ValueError(f"mask shape {mask.shape} != values shape {values.shape}")
    lines = []
    for i in range(values.shape[0]):
        lines.append(
            ",".join(
                repr(float(values[i, j])) if mask[i, j] else ""
                for j in range(values.shape[1])
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def load_mask(path) -> np.ndarray:
    """Read a CSV of 0/1 cells into a boolean matrix."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")
    width = len(rows[0])
    mask = np.zeros((len(rows), width), dtype=bool)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"{path}: row {i + 1} has {len(row)} columns, expected {width}"
            )
        for j, token in enumerate(row):
            token = token.strip()
            if token not in ("0", "1"):
                raise DataError(
                    f"{path}: mask cell must be 0 or 1, got {token!r} at "
                    f"row {i + 1}, column {j + 1}"
                )
            mask[i, j] = token == "1"
    return mask


def save_mask(path, mask: np.ndarray) -> None:
    """Write a boolean matrix as a CSV of 0/1 cells."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {mask.shape}")
    lines = [",".join("1" if v else "0" for v in row) for row in mask]
    Path(path).write_text("\n".join(lines) + "\n")


def generate_mask(
    base: np.ndarray, dims: tuple[int, int, int], spec: MaskSpec
) -> np.ndarray:
    """Hide entries of ``base`` according to ``spec``.

    The result is an observation mask with ``result <= base``
    everywhere: already-missing entries stay missing, and only observed
    entries can be hidden.  Deterministic for a fixed seed.
    """
    spec.validate()
    m, i, j = (int(d) for d in dims)
    t = i * j
    base = np.asarray(base, dtype=bool)
    if base.shape != (m, t):
        raise ValueError(f"base mask shape {base.shape} does not match dims {dims}")
    rng = np.random.default_rng(spec.seed)
    if spec.pattern == "rm":
        hide = rng.random((m, t)) < spec.rate
    elif spec.pattern == "nm":
        fiber = rng.random((m, j)) < spec.rate
        hide = np.repeat(fiber, i, axis=1)
    else:  # bm
        slots = t // spec.window
        n_hidden = min(slots, round(spec.rate * t / spec.window))
        cols = np.zeros(t, dtype=bool)
        if n_hidden > 0:
            for s in rng.choice(slots, size=n_hidden, replace=False):
                cols[s * spec.window : (s + 1) * spec.window] = True
        hide = np.broadcast_to(cols, (m, t))
    return base & ~hide


def evaluate(
    truth: np.ndarray,
    imputed: np.ndarray,
    eval_mask: np.ndarray,
    zero_tol: float = ZERO_TOLERANCE,
) -> EvalReport:
    """Score ``imputed`` against ``truth`` on the entries of ``eval_mask``.

    RMSE covers every selected entry.  MAPE skips entries with
    ``|truth| <= zero_tol`` and reports how many were skipped; if every
    selected entry is skipped the MAPE is 0 by convention.
    """
    truth = np.asarray(truth, dtype=float)
    imputed = np.asarray(imputed, dtype=float)
    eval_mask = np.asarray(eval_mask, dtype=bool)
    if truth.shape != imputed.shape or truth.shape != eval_mask.shape:
        raise ValueError(
            f"shape mismatch: truth {truth.shape}, imputed {imputed.shape}, "
            f"mask {eval_mask.shape}"
        )
    n_eval = int(eval_mask.sum())
    if n_eval == 0:
        raise ValueError("evaluation mask selects no entries")
    t = truth[eval_mask]
    p = imputed[eval_mask]
    rmse = float(np.sqrt(np.mean((t - p) ** 2)))
    nonzero = np.abs(t) > zero_tol
    excluded = n_eval - int(nonzero.sum())
    if nonzero.any():
        mape = float(np.mean(np.abs(t[nonzero] - p[nonzero]) / np.abs(t[nonzero])) * 100.0)
    else:
        mape = 0.0
    return EvalReport(mape=mape, rmse=rmse, n_eval=n_eval, excluded_zero=excluded)


def _normalize_model(model: str) -> str:
    name = model.strip().lower().replace("_", "-")
    if name not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    return name


def _run_model(model: str, values, mask, cfg: SolverConfig) -> ImputationResult:
    if model == "latc":
        return impute(values, mask, cfg)
    if model == "lamc":
        return impute_lamc(values, mask, cfg)
    return lrtc_tnn_mode(values, mask, cfg)


def run_experiment(
    data_path,
    spec: MaskSpec,
    cfg: SolverConfig,
    model: str = "latc",
    out_dir=None,
) -> EvalReport:
    """Mask, impute and score one data set; optionally write artifacts.

    The artifacts written to ``out_dir`` are the imputed matrix
    (``imputed.csv``), the evaluation mask (``eval_mask.csv``, 1 marks a
    scored cell), ``metrics.txt`` and per-outer-iteration
    ``history.txt`` as ``key = value`` records, and the single grid
    record ``cell.txt``.  Files are removed again if writing fails
    part-way.  Outputs are byte-identical across repeated runs with the
    same inputs and seeds.
    """
    model = _normalize_model(model)
    spec.validate()
    cfg.validate()
    values, base_mask = load_matrix(data_path)
    m, i, j = cfg.dims
    if values.shape != (m, i * j):
        raise ValueError(
            f"data shape {values.shape} does not match dims {cfg.dims}"
        )
    observed = generate_mask(base_mask, cfg.dims, spec)
    eval_mask = base_mask & ~observed
    if not eval_mask.any():
        raise ValueError(
            "masking hid no observed entries; nothing to evaluate "
            f"(pattern={spec.pattern}, rate={spec.rate})"
        )
    result = _run_model(model, project(values, observed), observed, cfg)
    report = evaluate(values, result.recovered, eval_mask)
    if out_dir is not None:
        _write_artifacts(Path(out_dir), spec, cfg, model, result, report, eval_mask)
    return report


def _write_artifacts(
    out_dir: Path,
    spec: MaskSpec,
    cfg: SolverConfig,
    model: str,
    result: ImputationResult,
    report: EvalReport,
    eval_mask: np.ndarray,
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        save_matrix(out_dir / _IMPUTED_FILE, result.recovered)
        written.append(out_dir / _IMPUTED_FILE)
        save_mask(out_dir / _EVAL_MASK_FILE, eval_mask)
        written.append(out_dir / _EVAL_MASK_FILE)
        metrics = [
            ("model", model),
            ("pattern", spec.pattern),
            ("rate", spec.rate),
            ("window", spec.window),
            ("mask_seed", spec.seed),
            ("rho0", cfg.rho0),
            ("c", cfg.c),
            ("r", cfg.r),
            ("solver_seed", cfg.seed),
            ("mape", report.mape),
            ("rmse", report.rmse),
            ("n_eval", report.n_eval),
            ("excluded_zero", report.excluded_zero),
            ("iterations", result.iterations),
            ("converged", result.converged),
        ]
        _write_records(out_dir / _METRICS_FILE, [[item] for item in metrics])
        written.append(out_dir / _METRICS_FILE)
        _write_records(
            out_dir / _HISTORY_FILE,
            [
                [
                    ("outer", rec.outer),
                    ("change", rec.change),
                    ("primal_residual", rec.primal_residual),
                    ("rho", rec.rho),
                    ("low_rank_term", rec.low_rank_term),
                    ("ar_term", rec.ar_term),
                ]
                for rec in result.history
            ],
        )
        written.append(out_dir / _HISTORY_FILE)
        _write_records(
            out_dir / _CELL_FILE,
            [
                [
                    ("c", cfg.c),
                    ("r", cfg.r),
                    ("mape", report.mape),
                    ("rmse", report.rmse),
                ]
            ],
        )
        written.append(out_dir / _CELL_FILE)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise


def run_sweep(
    data_path,
    spec: MaskSpec,
    cfg: SolverConfig,
    model: str,
    c_values,
    r_values,
    out_dir,
) -> list[tuple[float, int, EvalReport]]:
    """Grid of :func:`run_experiment` cells over ``c`` and ``r``.

    Each cell writes its artifacts to its own subdirectory of
    ``out_dir`` and one summary record per cell goes to ``grid.txt``.
    """
    out_dir = Path(out_dir)
    records = []
    for c in c_values:
        for r in r_values:
            cell_cfg = replace(cfg, c=float(c), r=int(r))
            cell_dir = out_dir / f"cell_c{c:g}_r{int(r)}"
            report = run_experiment(data_path, spec, cell_cfg, model, cell_dir)
            records.append((float(c), int(r), report))
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_records(
        out_dir / _GRID_FILE,
        [
            [("c", c), ("r", r), ("mape", rep.mape), ("rmse", rep.rmse)]
            for c, r, rep in records
        ],
    )
    return records
