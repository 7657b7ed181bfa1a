"""Dataset ingestion: JSONL files and CSV directories.

JSONL: one sequence per line, {"id": "...", "points": [[...], ...]}.
CSV directory: one file per sequence, one row per time step, numeric columns
as coordinates, filename stem as id.  Both formats are UTF-8 with LF or CRLF.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .sequences import Dataset, Sequence

__all__ = ["load_jsonl", "load_csv_dir", "load_dataset", "save_jsonl"]


def load_jsonl(path: str | Path) -> Dataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    sequences: list[Sequence] = []
    ids: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        where = f"{path}:{lineno}"
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{where}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict) or "id" not in record or "points" not in record:
            raise DataError(f'{where}: expected an object with "id" and "points"')
        if not isinstance(record["id"], str):
            raise DataError(f"{where}: id must be a string")
        try:
            pts = np.asarray(record["points"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise DataError(f"{where}: points must be a rectangular numeric array: {exc}") from exc
        try:
            sequences.append(Sequence(pts))
        except DataError as exc:
            raise DataError(f"{where}: {exc}") from exc
        ids.append(record["id"])
    if not sequences:
        raise DataError(f"{path}: no sequences found")
    return Dataset(tuple(sequences), tuple(ids))


def load_csv_dir(path: str | Path) -> Dataset:
    path = Path(path)
    if not path.is_dir():
        raise DataError(f"{path} is not a directory")
    files = sorted(path.glob("*.csv"))
    if not files:
        raise DataError(f"{path}: no .csv files found")
    sequences: list[Sequence] = []
    ids: list[str] = []
    for f in files:
        rows: list[list[float]] = []
        with open(f, encoding="utf-8", newline="") as handle:
            for rowno, row in enumerate(csv.reader(handle), start=1):
                if not row or all(not c.strip() for c in row):
                    continue
                try:
                    rows.append([float(c) for c in row])
                except ValueError:
                    raise DataError(f"{f}: row {rowno}: non-numeric cell") from None
        if not rows:
            raise DataError(f"{f}: empty sequence file")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise DataError(f"{f}: rows have mixed column counts {sorted(widths)}")
        try:
            sequences.append(Sequence(np.asarray(rows)))
        except DataError as exc:
            raise DataError(f"{f}: {exc}") from exc
        ids.append(f.stem)
    return Dataset(tuple(sequences), tuple(ids))


def load_dataset(path: str | Path) -> Dataset:
    """Dispatch on the path: a directory loads CSV files, a .jsonl file loads JSONL."""
    path = Path(path)
    if path.is_dir():
        return load_csv_dir(path)
    if path.suffix == ".jsonl":
        return load_jsonl(path)
    raise DataError(f"{path}: expected a .jsonl file or a directory of .csv files")


def save_jsonl(ds: Dataset, path: str | Path) -> None:
    lines = []
    for sid, seq in zip(ds.ids, ds.sequences):
        points = [[float(v) for v in p] for p in seq.points]
        lines.append(json.dumps({"id": sid, "points": points}))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
