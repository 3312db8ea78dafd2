"""Plain-text beat files and CSV / NDJSON record streams."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import IO, Iterable, Sequence


class MalformedInput(ValueError):
    def __init__(self, source: str, lineno: int, message: str, unit: str = "line"):
        super().__init__(f"{source}: {unit} {lineno}: {message}")
        self.lineno = lineno


def read_numbers(fh: IO[str], source: str = "<input>") -> list[tuple[int, float]]:
    """``(lineno, value)`` pairs, one number per line; blank lines and ``#`` comments are skipped."""
    values = []
    for lineno, line in enumerate(fh, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            x = float(text)
        except ValueError:
            raise MalformedInput(source, lineno, f"not a number: {text!r}") from None
        if not math.isfinite(x):
            raise MalformedInput(source, lineno, f"non-finite value: {text!r}")
        values.append((lineno, x))
    return values


def read_beats(fh: IO[str], source: str = "<input>", ibis: bool = False) -> list[float]:
    """Read beat timestamps, or intervals when ``ibis`` is set (first beat at 0)."""
    rows = read_numbers(fh, source)
    if ibis:
        times = [0.0]
        for lineno, r in rows:
            if r <= 0:
                raise MalformedInput(source, lineno, f"interval must be positive, got {r!r}")
            times.append(times[-1] + r)
        return times
    times = []
    for lineno, t in rows:
        if not times and t < 0:
            raise MalformedInput(source, lineno, f"first beat must be >= 0, got {t!r}")
        if times and t <= times[-1]:
            raise MalformedInput(source, lineno, f"beat times must be strictly increasing ({t!r} after {times[-1]!r})")
        times.append(t)
    return times


def write_numbers(fh: IO[str], values: Iterable[float]) -> None:
    for v in values:
        fh.write(f"{float(v)!r}\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def write_records(fh: IO[str], columns: Sequence[str], rows: Iterable[Sequence], fmt: str = "csv") -> None:
    """Write rows in fixed column order. NaN becomes an empty CSV field / JSON null."""
    if fmt == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    elif fmt == "ndjson":
        for row in rows:
            fh.write(json.dumps({k: _json_value(v) for k, v in zip(columns, row)}) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_records(fh: IO[str], source: str = "<input>") -> list[dict]:
    """Read CSV (header row) or NDJSON records; the format is sniffed from the first character."""
    text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        out = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise MalformedInput(source, lineno, f"bad JSON: {exc.msg}") from None
        return out
    return list(csv.DictReader(io.StringIO(text)))


def column(records: list[dict], name: str, source: str = "<input>", cast=float) -> list:
    values = []
    for i, rec in enumerate(records, start=1):
        if name not in rec:
            raise MalformedInput(source, i, f"missing column {name!r}", unit="record")
        raw = rec[name]
        try:
            values.append(cast(raw) if raw not in ("", None) else math.nan)
        except (TypeError, ValueError):
            raise MalformedInput(source, i, f"bad {name} value {raw!r}", unit="record") from None
    return values
