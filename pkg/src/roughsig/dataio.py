"""Reading observation panels and writing curve tables.

A panel splits one dated series into periods (calendar years or blocks of
a fixed number of rows). Inside a period the observations are treated as
equidistant on a unit interval, ``delta = 1 / len(period)``, whatever the
calendar gaps between them: only the order and the count of increments
enter the estimators.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import EmptyPanel, GridMismatch, InvalidParameter, IoError, NonPositiveValue, ParseError, PeriodTooShort
from .montecarlo import CurveSummary
from .signature import SignatureCurve
from .variation import Path

MIN_OBS = 30
FLOAT_FORMAT = ".17g"


def fmt(x: float) -> str:
    return format(float(x), FLOAT_FORMAT)


@dataclass(frozen=True)
class FixedCount:
    """Consecutive blocks of ``size`` observations; a short tail is dropped."""

    size: int

    def __post_init__(self):
        if isinstance(self.size, bool) or int(self.size) != self.size or self.size < 3:
            raise InvalidParameter(f"fixed_count needs a block size >= 3, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))

    def __str__(self) -> str:
        return f"fixed_count({self.size})"


CALENDAR_YEAR = "calendar_year"
PeriodRule = Union[str, FixedCount]


def parse_period_rule(text: str) -> PeriodRule:
    """``calendar_year``, ``fixed_count:252`` or ``fixed_count(252)``."""
    text = text.strip()
    if text == CALENDAR_YEAR:
        return CALENDAR_YEAR
    for sep in (":", "("):
        head, _, tail = text.partition(sep)
        if head == "fixed_count" and tail:
            try:
                return FixedCount(int(tail.rstrip(")")))
            except ValueError:
                break
    raise InvalidParameter(f"period rule must be 'calendar_year' or 'fixed_count:<m>', got {text!r}")


@dataclass(frozen=True, eq=False)
class PeriodPanel:
    """Ordered periods, each a path with the dates of its observations."""

    paths: dict[str, Path]
    dates: dict[str, tuple[dt.date, ...]] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.paths:
            raise EmptyPanel("a panel needs at least one period")
        for label, path in self.paths.items():
            if not isinstance(path, Path):
                raise InvalidParameter(f"period {label!r} is not a Path")
            if label in self.dates and len(self.dates[label]) != path.n:
                raise InvalidParameter(f"period {label!r} has {path.n} values but {len(self.dates[label])} dates")

    @property
    def labels(self) -> list[str]:
        return list(self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[str]:
        return iter(self.paths)

    def __getitem__(self, label: str) -> Path:
        return self.paths[label]

    def items(self):
        return self.paths.items()

    @classmethod
    def from_paths(cls, paths: Sequence[Path], labels: Sequence[str] | None = None, metadata: dict | None = None):
        labels = list(labels) if labels is not None else [f"path_{i}" for i in range(len(paths))]
        if len(set(labels)) != len(labels):
            raise InvalidParameter("period labels must be unique")
        return cls(dict(zip(labels, paths)), {}, dict(metadata or {}))


def _read_rows(file) -> tuple[list[str], list[tuple[int, dict]]]:
    try:
        with open(file, newline="", encoding="utf-8-sig") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise ParseError(1, "missing header row")
            rows = [(reader.line_num, row) for row in reader]
            return list(reader.fieldnames), rows
    except OSError as exc:
        raise IoError(f"cannot read {file}: {exc}") from exc


def _parse_value(row: int, text: str | None) -> float:
    if text is None or not text.strip():
        raise ParseError(row, "missing value")
    try:
        value = float(text)
    except ValueError:
        raise ParseError(row, f"cannot parse value {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(row, f"value {text!r} is not finite")
    if value <= 0:
        raise NonPositiveValue(row, value)
    return value


def _parse_date(row: int, text: str | None) -> dt.date:
    try:
        return dt.date.fromisoformat((text or "").strip())
    except ValueError:
        raise ParseError(row, f"cannot parse date {text!r} (expected YYYY-MM-DD)") from None


def _split(dates: list[dt.date], rule: PeriodRule) -> list[tuple[str, slice]]:
    if rule == CALENDAR_YEAR:
        out, start = [], 0
        for i in range(1, len(dates) + 1):
            if i == len(dates) or dates[i].year != dates[start].year:
                out.append((str(dates[start].year), slice(start, i)))
                start = i
        return out
    if not isinstance(rule, FixedCount):
        raise InvalidParameter(f"unknown period rule {rule!r}")
    m = rule.size
    full = len(dates) // m
    width = max(3, len(str(full)))
    return [(f"P{k + 1:0{width}d}", slice(k * m, (k + 1) * m)) for k in range(full)]


def load_panel(
    file,
    date_column: str = "date",
    value_column: str = "value",
    period_rule: PeriodRule = CALENDAR_YEAR,
    *,
    sqrt: bool = False,
    min_obs: int = MIN_OBS,
) -> PeriodPanel:
    """Load a dated CSV series and split it into periods.

    Rows are sorted by date. Every value must be finite and strictly
    positive; ``sqrt=True`` turns a variance column into a volatility column.
    Row numbers in errors are file line numbers (the header is line 1).
    """
    if isinstance(period_rule, str) and period_rule != CALENDAR_YEAR:
        period_rule = parse_period_rule(period_rule)
    header, rows = _read_rows(file)
    for col in (date_column, value_column):
        if col not in header:
            raise ParseError(1, f"column {col!r} not found (have {', '.join(header)})")
    records = []
    for line, row in rows:
        records.append((_parse_date(line, row[date_column]), _parse_value(line, row[value_column]), line))
    if not records:
        raise EmptyPanel(f"{file} holds no observations")
    records.sort(key=lambda r: r[0])
    for (d0, _, _), (d1, _, line) in zip(records, records[1:]):
        if d0 == d1:
            raise ParseError(line, f"duplicate date {d1.isoformat()}")

    dates = [r[0] for r in records]
    values = np.array([r[1] for r in records])
    if sqrt:
        values = np.sqrt(values)
    periods = _split(dates, period_rule)
    used = sum(s.stop - s.start for _, s in periods)
    if used < len(dates):
        warnings.warn(
            f"dropping the trailing {len(dates) - used} rows that do not fill a whole period",
            UserWarning,
            stacklevel=2,
        )
    if not periods:
        raise EmptyPanel(f"no complete period in {file} under {period_rule}")
    paths, period_dates = {}, {}
    for label, sl in periods:
        count = sl.stop - sl.start
        if count < max(min_obs, 3):
            raise PeriodTooShort(label, count, max(min_obs, 3))
        paths[label] = Path(values[sl], 1.0 / count)
        period_dates[label] = tuple(dates[sl])
    return PeriodPanel(
        paths,
        period_dates,
        {
            "source": str(file),
            "date_column": date_column,
            "value_column": value_column,
            "period_rule": str(period_rule),
            "sqrt": bool(sqrt),
            "transform": "none",
            "dropped_rows": len(dates) - used,
        },
    )


def log_transform(panel: PeriodPanel) -> PeriodPanel:
    """Natural log of every value; positivity is guaranteed at load time."""
    paths = {label: path.with_values(np.log(path.values)) for label, path in panel.items()}
    return PeriodPanel(paths, dict(panel.dates), {**panel.metadata, "transform": "log"})


def write_panel(panel: PeriodPanel, file, date_column: str = "date", value_column: str = "value") -> None:
    """Write a dated panel back to the long CSV layout that :func:`load_panel` reads."""
    if set(panel.dates) != set(panel.paths):
        raise InvalidParameter("only panels with dates for every period can be written in dated form")
    try:
        with open(file, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([date_column, value_column])
            for label, path in panel.items():
                for day, value in zip(panel.dates[label], path.values.tolist()):
                    writer.writerow([day.isoformat(), fmt(value)])
    except OSError as exc:
        raise IoError(f"cannot write {file}: {exc}") from exc


def write_paths(paths: Sequence[Path], file, labels: Sequence[str] | None = None) -> None:
    """Wide CSV: one column per path, one row per observation."""
    if not paths:
        raise EmptyPanel("no paths to write")
    n = paths[0].n
    if any(p.n != n for p in paths):
        raise GridMismatch("all paths must have the same length")
    labels = list(labels) if labels is not None else [f"path_{i}" for i in range(len(paths))]
    table = np.column_stack([p.values for p in paths])
    try:
        with open(file, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(labels)
            for row in table.tolist():
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise IoError(f"cannot write {file}: {exc}") from exc


def read_paths(file, columns: Sequence[str] | None = None, *, min_obs: int = 3) -> PeriodPanel:
    """Read a wide CSV (one path per column) as a panel, ``delta = 1/n``."""
    header, rows = _read_rows(file)
    columns = list(columns) if columns else header
    missing = [c for c in columns if c not in header]
    if missing:
        raise ParseError(1, f"columns not found: {', '.join(missing)}")
    if not rows:
        raise EmptyPanel(f"{file} holds no observations")
    paths = {}
    for col in columns:
        values = []
        for line, row in rows:
            text = row[col]
            if text is None or not text.strip():
                raise ParseError(line, f"missing value in column {col!r}")
            try:
                value = float(text)
            except ValueError:
                raise ParseError(line, f"cannot parse value {text!r} in column {col!r}") from None
            if not math.isfinite(value):
                raise ParseError(line, f"value {text!r} in column {col!r} is not finite")
            values.append(value)
        if len(values) < min_obs:
            raise PeriodTooShort(col, len(values), min_obs)
        paths[col] = Path(np.array(values), 1.0 / len(values))
    return PeriodPanel(paths, {}, {"source": str(file), "layout": "wide", "transform": "none"})


@dataclass(frozen=True, eq=False)
class CurveTable:
    """Columns of values over a shared power grid, as stored on disk."""

    p_grid: np.ndarray
    series: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def curves(self, nu: int | None = None, order: int | None = None) -> list[SignatureCurve]:
        nu = nu if nu is not None else self.metadata.get("nu", 2)
        order = order if order is not None else self.metadata.get("order", 1)
        return [SignatureCurve(self.p_grid, v, nu, order, label) for label, v in self.series.items()]


def _as_table(obj) -> CurveTable:
    if isinstance(obj, CurveTable):
        return obj
    if isinstance(obj, CurveSummary):
        curves = obj.as_curves()
        meta = dict(obj.metadata)
        meta["quantiles"] = list(obj.quantiles)
    else:
        curves = list(obj)
        meta = {}
        if curves:
            meta = {"nu": curves[0].nu, "order": curves[0].order}
    if not curves:
        raise EmptyPanel("no curves to write")
    grid = curves[0].p_grid
    series = {}
    for c in curves:
        if not np.array_equal(c.p_grid, grid):
            raise GridMismatch(f"curve {c.label!r} uses a different p grid")
        label = c.label or f"curve_{len(series)}"
        if label in series:
            raise InvalidParameter(f"duplicate curve label {label!r}")
        series[label] = c.values
    return CurveTable(grid, series, meta)


def _format_of(file, fmt_name: str | None) -> str:
    name = fmt_name or FsPath(str(file)).suffix.lstrip(".").lower() or "csv"
    if name not in ("csv", "json"):
        raise InvalidParameter(f"unsupported curve format {name!r}; use csv or json")
    return name


def _dump_curves(table: CurveTable, fh, kind: str) -> None:
    if kind == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p", *table.series])
        columns = [table.p_grid, *table.series.values()]
        for row in zip(*(c.tolist() for c in columns)):
            writer.writerow([fmt(v) for v in row])
    else:
        json.dump(
            {
                "p_grid": table.p_grid.tolist(),
                "series": {k: v.tolist() for k, v in table.series.items()},
                "metadata": table.metadata,
            },
            fh,
            indent=1,
            allow_nan=False,
        )
        fh.write("\n")


def write_curves(
    curves: Union[Iterable[SignatureCurve], CurveSummary, CurveTable],
    file,
    fmt_name: str | None = None,
) -> None:
    """Write curves or a summary as CSV (``p,<label>,...``) or JSON.

    CSV floats carry 17 significant digits and JSON uses the shortest
    round-trip representation, so reading back gives identical values.
    ``file`` may be a path or an open text stream.
    """
    table = _as_table(curves)
    if hasattr(file, "write"):
        _dump_curves(table, file, fmt_name or "csv")
        return
    kind = _format_of(file, fmt_name)
    try:
        with open(file, "w", newline="", encoding="utf-8") as fh:
            _dump_curves(table, fh, kind)
    except OSError as exc:
        raise IoError(f"cannot write {file}: {exc}") from exc


def read_curves(file, fmt_name: str | None = None) -> CurveTable:
    kind = _format_of(file, fmt_name)
    if kind == "json":
        try:
            with open(file, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise IoError(f"cannot read {file}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, f"invalid JSON: {exc.msg}") from None
        series = {k: np.array(v, dtype=np.float64) for k, v in data["series"].items()}
        return CurveTable(np.array(data["p_grid"], dtype=np.float64), series, data.get("metadata", {}))

    header, rows = _read_rows(file)
    if not header or header[0] != "p":
        raise ParseError(1, "curve CSV must start with a 'p' column")
    if not rows:
        raise EmptyPanel(f"{file} holds no grid points")
    cols = {name: [] for name in header}
    for line, row in rows:
        for name in header:
            try:
                cols[name].append(float(row[name]))
            except (TypeError, ValueError):
                raise ParseError(line, f"cannot parse {row[name]!r} in column {name!r}") from None
    grid = np.array(cols.pop("p"))
    return CurveTable(grid, {k: np.array(v) for k, v in cols.items()}, {})
