"""Empirical workflow: dB grids, simulated ABER campaigns, interpolation of
measurement sets and interpolation-based prediction (IBP) of the ACC."""

import csv
import io
import json
import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .channels import check_mean_snr
from .errors import CapabilityError, DomainError, SetParseError
from .measures import simulate_bit_errors
from .numerics.interp import lagrange_interp
from .relationships import ModulationParams, acc_from_aber

logger = logging.getLogger(__name__)

THREADS_ENV = "APM_BRIDGE_THREADS"
DEFAULT_ORDER = 7
SAFETY_MARGIN = 1e3


class SafetyMarginWarning(UserWarning):
    pass


def make_grid(n_points, bound_db):
    """Average-SNR grid uniform in dB over [-bound_db, bound_db]."""
    n = int(n_points)
    if n != n_points or n < 2:
        raise DomainError(f"grid needs an integer N >= 2, got {n_points!r}")
    if not (bound_db > 0 and math.isfinite(bound_db)):
        raise DomainError(f"grid bound must be positive, got {bound_db!r}")
    k = np.arange(n, dtype=float)
    return (2.0 * k / (n - 1) - 1.0) * bound_db


def worker_count(default=None):
    """Worker cap from the environment, else the CPU count."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if value < 1:
            raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        return value
    return default or os.cpu_count() or 1


@dataclass(eq=False)
class MeasurementSet:
    """ABER measurements at increasing average SNR (dB).

    ``censored`` marks points where no error was observed; their value is
    stored as 0 and they are excluded from the interpolation nodes.
    """

    snr_db: np.ndarray
    values: np.ndarray
    stderr: Optional[np.ndarray] = None
    censored: Optional[np.ndarray] = None
    modulation: Optional[ModulationParams] = None
    label: str = ""

    def __post_init__(self):
        self.snr_db = np.array(self.snr_db, dtype=float).ravel()
        self.values = np.array(self.values, dtype=float).ravel()
        n = self.snr_db.size
        if n == 0:
            raise DomainError("a measurement set needs at least one point")
        if self.values.size != n:
            raise DomainError("snr_db and values must have equal length")
        if self.stderr is not None:
            self.stderr = np.array(self.stderr, dtype=float).ravel()
            if self.stderr.size != n or np.any(~(self.stderr >= 0)):
                raise DomainError("stderr must be non-negative with one entry per point")
        if self.censored is None:
            self.censored = self.values == 0
        else:
            self.censored = np.array(self.censored, dtype=bool).ravel() | (self.values == 0)
            if self.censored.size != n:
                raise DomainError("censored flags need one entry per point")
        if np.any(~np.isfinite(self.snr_db)) or np.any(np.diff(self.snr_db) <= 0):
            raise DomainError("snr_db must be finite and strictly increasing")
        if np.any(~((self.values >= 0) & (self.values <= 0.5))):
            bad = self.values[~((self.values >= 0) & (self.values <= 0.5))][0]
            raise DomainError(f"ABER value {bad!r} is outside [0, 1/2]")
        if self.modulation is not None and not isinstance(self.modulation, ModulationParams):
            a, b = self.modulation
            self.modulation = ModulationParams(a, b)

    def __len__(self):
        return self.snr_db.size

    def __eq__(self, other):
        if not isinstance(other, MeasurementSet):
            return NotImplemented
        same_err = (self.stderr is None and other.stderr is None) or (
            self.stderr is not None and other.stderr is not None and np.array_equal(self.stderr, other.stderr)
        )
        return (
            np.array_equal(self.snr_db, other.snr_db)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.censored, other.censored)
            and same_err
            and self.modulation == other.modulation
            and self.label == other.label
        )

    __hash__ = None

    @property
    def mean_snr(self):
        return 10.0 ** (self.snr_db / 10.0)


def _point_seed(seed, index):
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, dtype=np.uint64)[0])


def measure_aber_campaign(model, grid_db, params, bits_per_point, seed, label="", threads=None):
    """Simulate an ABER measurement at every grid point.

    Each point uses its own sub-seed, so results do not depend on the
    number of worker threads.
    """
    params = params if isinstance(params, ModulationParams) else ModulationParams(*params)
    grid = np.asarray(grid_db, dtype=float).ravel()
    if int(bits_per_point) < 1:
        raise DomainError("bits_per_point must be >= 1")

    def run(i):
        return simulate_bit_errors(
            model, 10.0 ** (grid[i] / 10.0), params.a, params.b, bits_per_point, _point_seed(seed, i)
        )

    workers = min(threads or worker_count(), grid.size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(grid.size)))
    else:
        results = [run(i) for i in range(grid.size)]
    values = np.array([r[0] for r in results])
    stderr = np.array([r[1] for r in results])
    # sampling noise can push a near-dead channel above 1/2
    over = values > 0.5
    if np.any(over):
        logger.info("clipped %d simulated ABER values above 1/2", int(np.count_nonzero(over)))
        values = np.minimum(values, 0.5)
    return MeasurementSet(grid, values, stderr, values == 0, params, label)


# ---------------------------------------------------------------- interpolation

LOW_END_SIGNIFICANCE = 3.0
LOW_END_FIT_SPAN_DB = 20.0


def _nodes(mset):
    """Interpolation nodes (dB, log10 ABER) and the low-end power law.

    Censored points are dropped. With standard errors available, points
    whose reliability 1 - 2E is not LOW_END_SIGNIFICANCE standard errors
    above zero at the bottom of the grid are dropped too: their noise would
    otherwise be clipped at 1/2 and bias the kernel integral.
    """
    keep = ~mset.censored
    x = mset.snr_db[keep]
    values = mset.values[keep]
    rel = 1.0 - 2.0 * values
    start = 0
    fit_end = min(2, x.size)
    if mset.stderr is not None and x.size:
        noise = 2.0 * mset.stderr[keep]
        weak = np.flatnonzero(~(rel > LOW_END_SIGNIFICANCE * noise))
        if weak.size:
            start = int(weak[-1]) + 1
        fit_end = int(np.searchsorted(x, x[min(start, x.size - 1)] + LOW_END_FIT_SPAN_DB, side="right"))
    x, values, rel = x[start:], values[start:], rel[start:]
    fit_end = max(0, fit_end - start)
    return x, np.log10(values), _low_end(x[:fit_end], rel[:fit_end])


def _low_end(x, rel):
    """Power law of the reliability against γ, anchored at the lowest node.

    Returns (x0 in dB, log10 Q at x0, exponent) or None when no increasing
    power law fits.
    """
    if x.size < 2 or np.any(rel <= 0):
        return None
    # log10 Q is linear in dB with slope exponent/10
    slope, intercept = np.polyfit(x, np.log10(rel), 1)
    if not slope > 0:
        return None
    return x[0], intercept + slope * x[0], 10.0 * slope


def interpolate_set(mset, mean_snr, order=DEFAULT_ORDER):
    """ABER at average SNR γ̄ (linear) from a measurement set.

    Inside the grid: local barycentric Lagrange interpolation of degree
    `order` in (dB, log10 value), with the node window picked by the
    containing interval. Above the last uncensored node: log-linear
    extrapolation in dB from the last two uncensored nodes, never
    increasing. Below the first node: the reliability 1 - 2E follows a
    power law in γ fitted to the lowest nodes, or the channel is treated
    as dead when no increasing power law fits. Results are clipped to
    [0, 1/2].
    """
    g = np.asarray(mean_snr, dtype=float)
    if np.any(~(g >= 0)):
        raise DomainError("average SNR must be non-negative")
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(g)
    flat = np.atleast_1d(db).ravel()
    x, y, low = _nodes(mset)
    out = np.empty_like(flat)
    if x.size == 0:
        out[:] = 0.0
        return float(out[0]) if g.ndim == 0 else out.reshape(g.shape)

    if x.size == 1:
        out[:] = np.clip(10.0 ** y[0], 0.0, 0.5)
        return float(out[0]) if g.ndim == 0 else out.reshape(g.shape)

    degree = min(int(order), x.size - 1)
    inside = (flat >= x[0]) & (flat <= x[-1])
    if np.any(inside):
        xi = flat[inside]
        interval = np.clip(np.searchsorted(x, xi, side="right") - 1, 0, x.size - 2)
        start = np.clip(interval - (degree - 1) // 2, 0, x.size - degree - 1)
        res = np.empty_like(xi)
        for s in np.unique(start):
            sel = start == s
            res[sel] = lagrange_interp(x[s : s + degree + 1], y[s : s + degree + 1], xi[sel])
        out[inside] = 10.0 ** res

    above = flat > x[-1]
    if np.any(above):
        slope = min(0.0, (y[-1] - y[-2]) / (x[-1] - x[-2]))
        out[above] = 10.0 ** (y[-1] + slope * (flat[above] - x[-1]))

    below = flat < x[0]
    if np.any(below):
        if low is None:
            out[below] = 0.5
        else:
            x0, log_q0, p = low
            q = 10.0 ** (log_q0 + p * (flat[below] - x0) / 10.0)
            out[below] = 0.5 * (1.0 - q)

    out = np.clip(out, 0.0, 0.5)
    return float(out[0]) if g.ndim == 0 else out.reshape(g.shape)


def set_curve(mset, order=DEFAULT_ORDER):
    """Vectorized ABER curve backed by a measurement set."""
    return lambda g: interpolate_set(mset, g, order)


def ibp_acc(mset, mean_snr, tol=1e-8, order=DEFAULT_ORDER):
    """ACC predicted from an interpolated ABER measurement set."""
    if mset.modulation is None:
        raise CapabilityError("the measurement set carries no modulation parameters")
    mean_snr = check_mean_snr(mean_snr)
    lo = float(10.0 ** (mset.snr_db[0] / 10.0) / SAFETY_MARGIN)
    hi = float(10.0 ** (mset.snr_db[-1] / 10.0) / SAFETY_MARGIN)
    if not lo <= mean_snr <= hi:
        warnings.warn(
            f"average SNR {mean_snr!r} is outside the safety margin [{lo!r}, {hi!r}] of the grid",
            SafetyMarginWarning,
            stacklevel=2,
        )
    return acc_from_aber(set_curve(mset, order), mset.modulation, mean_snr, tol=tol)


# ---------------------------------------------------------------- file I/O

def _fmt(value):
    return repr(float(f"{value:.17g}"))


def write_set(mset, path, comments=()):
    """Write CSV (default) or JSON (for a .json suffix).

    ``comments`` are extra free-text lines, written as ``#`` lines in CSV
    and as a "comments" list in JSON; readers ignore them.
    """
    path = Path(path)
    if "\n" in mset.label or "\r" in mset.label:
        raise DomainError("labels must fit on one line")
    if path.suffix.lower() == ".json":
        payload = {
            "comments": list(comments),
            "label": mset.label,
            "modulation": None if mset.modulation is None else {"a": mset.modulation.a, "b": mset.modulation.b},
            "points": [],
        }
        for i in range(len(mset)):
            point = {"snr_db": float(mset.snr_db[i]), "value": float(mset.values[i])}
            if mset.stderr is not None:
                point["stderr"] = float(mset.stderr[i])
            if mset.censored[i]:
                point["censored"] = True
            payload["points"].append(point)
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        return
    lines = [f"# {c}" for c in comments]
    if mset.modulation is not None:
        lines.append(f"# modulation_a={_fmt(mset.modulation.a)}")
        lines.append(f"# modulation_b={_fmt(mset.modulation.b)}")
    lines.append(f"# label={mset.label}")
    lines.append("snr_db,value,stderr" if mset.stderr is not None else "snr_db,value")
    for i in range(len(mset)):
        row = [_fmt(mset.snr_db[i]), _fmt(mset.values[i])]
        if mset.stderr is not None:
            row.append(_fmt(mset.stderr[i]))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _float(text, path, line, name):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise SetParseError(f"not a number: {text!r}", path, line, name) from None
    if not math.isfinite(value):
        raise SetParseError(f"not finite: {text!r}", path, line, name)
    return value


def _build(path, rows, modulation, label, has_err):
    rows.sort(key=lambda r: r[0])
    snr = [r[0] for r in rows]
    if len(set(snr)) != len(snr):
        raise SetParseError("duplicate snr_db values", path)
    try:
        return MeasurementSet(
            snr,
            [r[1] for r in rows],
            [r[2] for r in rows] if has_err else None,
            [r[3] for r in rows],
            modulation,
            label,
        )
    except DomainError as exc:
        raise SetParseError(str(exc), path) from None


def _notice_unsorted(path, rows):
    if any(rows[i][0] > rows[i + 1][0] for i in range(len(rows) - 1)):
        logger.warning("%s: points were not sorted by snr_db; sorted on read", path)


def read_set(path):
    """Read a measurement set written by :func:`write_set` (CSV or JSON)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SetParseError(f"cannot read file: {exc}", path) from None
    if path.suffix.lower() == ".json":
        return _read_json(path, text)
    return _read_csv(path, text)


def _read_json(path, text):
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SetParseError(exc.msg, path, exc.lineno) from None
    if not isinstance(payload, dict) or not isinstance(payload.get("points"), list):
        raise SetParseError("expected an object with a 'points' list", path, field="points")
    mod = payload.get("modulation")
    modulation = None
    if mod is not None:
        try:
            modulation = ModulationParams(float(mod["a"]), float(mod["b"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SetParseError(f"bad modulation: {exc}", path, field="modulation") from None
    rows = []
    has_err = bool(payload["points"]) and all("stderr" in p for p in payload["points"])
    for i, p in enumerate(payload["points"]):
        where = f"points[{i}]"
        if not isinstance(p, dict):
            raise SetParseError("point must be an object", path, field=where)
        if "snr_db" not in p or "value" not in p:
            raise SetParseError("point needs snr_db and value", path, field=where)
        snr = _float(p["snr_db"], path, None, f"{where}.snr_db")
        value = _float(p["value"], path, None, f"{where}.value")
        err = _float(p["stderr"], path, None, f"{where}.stderr") if has_err else None
        if not 0.0 <= value <= 0.5:
            raise SetParseError(f"ABER value {value!r} is outside [0, 1/2]", path, field=f"{where}.value")
        rows.append((snr, value, err, bool(p.get("censored", False)), None))
    if not rows:
        raise SetParseError("no data points", path, field="points")
    _notice_unsorted(path, rows)
    return _build(path, rows, modulation, str(payload.get("label", "")), has_err)


def _read_csv(path, text):
    meta = {}
    header = None
    rows = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            if sep and key.strip() in ("modulation_a", "modulation_b", "label"):
                meta[key.strip()] = (value.strip(), lineno)
            continue
        cells = next(csv.reader([line]))
        cells = [c.strip() for c in cells]
        if header is None:
            if cells[:2] != ["snr_db", "value"] or cells[2:] not in ([], ["stderr"]):
                raise SetParseError(f"header must be snr_db,value[,stderr], got {line!r}", path, lineno)
            header = cells
            continue
        if len(cells) != len(header):
            raise SetParseError(f"expected {len(header)} fields, got {len(cells)}", path, lineno)
        snr = _float(cells[0], path, lineno, "snr_db")
        value = _float(cells[1], path, lineno, "value")
        err = _float(cells[2], path, lineno, "stderr") if len(header) == 3 else None
        if err is not None and err < 0:
            raise SetParseError("stderr must be non-negative", path, lineno, "stderr")
        if not 0.0 <= value <= 0.5:
            raise SetParseError(f"ABER value {value!r} is outside [0, 1/2]", path, lineno, "value")
        rows.append((snr, value, err, value == 0.0, lineno))
    if header is None:
        raise SetParseError("missing header line", path)
    if not rows:
        raise SetParseError("no data rows", path)
    modulation = None
    if "modulation_a" in meta or "modulation_b" in meta:
        if "modulation_a" not in meta or "modulation_b" not in meta:
            raise SetParseError("modulation needs both modulation_a and modulation_b", path)
        a = _float(meta["modulation_a"][0], path, meta["modulation_a"][1], "modulation_a")
        b = _float(meta["modulation_b"][0], path, meta["modulation_b"][1], "modulation_b")
        try:
            modulation = ModulationParams(a, b)
        except DomainError as exc:
            raise SetParseError(str(exc), path, meta["modulation_a"][1], "modulation_a") from None
    label = meta.get("label", ("", None))[0]
    _notice_unsorted(path, rows)
    return _build(path, rows, modulation, label, len(header) == 3)
