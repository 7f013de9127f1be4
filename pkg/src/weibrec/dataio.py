"""Input parsing and data fingerprinting for the command line.

Accepted population data, either raw observation sequences or
pre-extracted record values:

* wide CSV: header row of population labels, one column per population
  (columns may have different lengths; blank cells are skipped);
* long CSV: columns ``population`` and ``value``, plus ``order`` giving
  the observation position (required for raw sequences, where record
  extraction depends on observation order);
* JSON: an object mapping labels to arrays, an array of objects with
  ``label`` and ``values`` (or ``records``), or a report emitted by the
  ``extract`` command (its ``populations`` list round-trips as input);
* inline: ``label:v1,v2,...;label2:...`` directly on the command line.

Parse failures carry row/column (or label/index) diagnostics.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidDataError
from .records import RecordSeries, extract_upper_records

Populations = list[tuple[str, NDArray[np.float64]]]


def _parse_number(text: str, where: str, positive: bool = False) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InvalidDataError(f"{where}: not a number: {text!r}") from None
    if not np.isfinite(value):
        raise InvalidDataError(f"{where}: value must be finite, got {text!r}")
    if positive and value <= 0.0:
        raise InvalidDataError(
            f"{where}: observations must be positive, got {text!r}"
        )
    return value


def _finish(pops: Populations) -> Populations:
    if not pops:
        raise InvalidDataError("no populations found in input")
    for label, values in pops:
        if values.size == 0:
            raise InvalidDataError(f"population {label!r} has no values")
    return pops


def _parse_wide_csv(rows: list[list[str]]) -> Populations:
    header = [cell.strip() for cell in rows[0]]
    if any(not cell for cell in header):
        raise InvalidDataError("row 1: wide CSV header has an empty label")
    if len(set(header)) != len(header):
        raise InvalidDataError("row 1: duplicate population labels in header")
    columns: list[list[float]] = [[] for _ in header]
    for i, row in enumerate(rows[1:], start=2):
        if len(row) > len(header):
            raise InvalidDataError(
                f"row {i}: {len(row)} cells but only {len(header)} columns"
            )
        for j, cell in enumerate(row):
            cell = cell.strip()
            if not cell:
                continue
            where = f"row {i}, column {header[j]!r}"
            columns[j].append(_parse_number(cell, where, positive=True))
    return _finish([
        (label, np.asarray(col, dtype=np.float64))
        for label, col in zip(header, columns)
    ])


def _parse_long_csv(rows: list[list[str]], kind: str) -> Populations:
    header = [cell.strip().lower() for cell in rows[0]]
    idx = {name: header.index(name) for name in header}
    has_order = "order" in idx
    if kind == "raw" and not has_order:
        raise InvalidDataError(
            "long-format raw sequences need an 'order' column: record "
            "extraction depends on observation order"
        )
    by_label: dict[str, list[tuple[float, float]]] = {}
    for i, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            raise InvalidDataError(f"row {i}: expected {len(header)} cells")
        label = row[idx["population"]].strip()
        if not label:
            raise InvalidDataError(f"row {i}, column 'population': empty label")
        value = _parse_number(row[idx["value"]].strip(),
                              f"row {i}, column 'value'", positive=True)
        order = _parse_number(row[idx["order"]].strip(),
                              f"row {i}, column 'order'") if has_order \
            else float(len(by_label.get(label, [])))
        by_label.setdefault(label, []).append((order, value))
    pops: Populations = []
    for label, pairs in by_label.items():
        orders = [o for o, _ in pairs]
        if len(set(orders)) != len(orders):
            raise InvalidDataError(
                f"population {label!r}: duplicate 'order' values"
            )
        pairs.sort(key=lambda p: p[0])
        pops.append((label, np.asarray([v for _, v in pairs],
                                       dtype=np.float64)))
    return _finish(pops)


def _parse_csv(text: str, kind: str) -> Populations:
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if not rows:
        raise InvalidDataError("empty CSV input")
    header = {cell.strip().lower() for cell in rows[0]}
    if {"population", "value"} <= header:
        return _parse_long_csv(rows, kind)
    return _parse_wide_csv(rows)


def _values_from_json(label: str, values) -> tuple[str, NDArray[np.float64]]:
    if not isinstance(values, (list, tuple)):
        raise InvalidDataError(f"population {label!r}: values must be an array")
    out = []
    for i, v in enumerate(values):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise InvalidDataError(
                f"population {label!r}, index {i}: not a number: {v!r}"
            )
        if not np.isfinite(v) or v <= 0.0:
            raise InvalidDataError(
                f"population {label!r}, index {i}: value must be "
                f"positive and finite, got {v!r}"
            )
        out.append(float(v))
    return label, np.asarray(out, dtype=np.float64)


def _parse_json(text: str) -> Populations:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidDataError(f"invalid JSON: {exc}") from None
    if isinstance(doc, dict) and "populations" in doc:
        doc = doc["populations"]
    pops: Populations = []
    if isinstance(doc, dict):
        for label, values in doc.items():
            pops.append(_values_from_json(str(label), values))
    elif isinstance(doc, list):
        for i, entry in enumerate(doc):
            if not isinstance(entry, dict) or "label" not in entry:
                raise InvalidDataError(
                    f"populations[{i}]: expected an object with a 'label'"
                )
            values = entry.get("values", entry.get("records"))
            if values is None:
                raise InvalidDataError(
                    f"populations[{i}]: needs a 'values' or 'records' array"
                )
            pops.append(_values_from_json(str(entry["label"]), values))
    else:
        raise InvalidDataError("JSON input must be an object or an array")
    return _finish(pops)


def _parse_inline(text: str) -> Populations:
    pops: Populations = []
    for i, part in enumerate(filter(None, text.split(";")), start=1):
        label, sep, body = part.partition(":")
        if not sep:
            label, body = f"pop{i}", part
        label = label.strip()
        values = [
            _parse_number(tok.strip(), f"inline population {label!r}",
                          positive=True)
            for tok in body.split(",") if tok.strip()
        ]
        pops.append((label, np.asarray(values, dtype=np.float64)))
    return _finish(pops)


def load_populations(source: str, kind: str = "raw") -> Populations:
    """Read labeled population sequences from a file or inline text.

    ``kind`` is ``raw`` for observation sequences or ``records`` for
    pre-extracted record values; it only affects format requirements
    (raw long-format CSV must carry an ``order`` column).
    """
    if kind not in ("raw", "records"):
        raise InvalidDataError(f"unknown data kind {kind!r}")
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
        if source.lower().endswith(".json"):
            return _parse_json(text)
        stripped = text.lstrip()
        if stripped.startswith(("{", "[")):
            return _parse_json(text)
        return _parse_csv(text, kind)
    if any(ch in source for ch in ":;,"):
        return _parse_inline(source)
    raise InvalidDataError(
        f"{source!r} is neither an existing file nor inline data "
        f"(label:v1,v2,...;...)"
    )


def records_from_populations(populations: Populations,
                             kind: str) -> list[RecordSeries]:
    """Convert parsed populations to validated record series."""
    out = []
    for label, values in populations:
        try:
            if kind == "raw":
                out.append(extract_upper_records(values, label=label))
            else:
                out.append(RecordSeries(values, label=label))
        except InvalidDataError as exc:
            raise InvalidDataError(f"population {label!r}: {exc}") from None
    return out


def populations_digest(populations: Populations) -> str:
    """Order-sensitive SHA-256 fingerprint of the parsed input."""
    h = hashlib.sha256()
    for label, values in populations:
        line = label + ":" + ",".join(repr(float(v)) for v in values) + "\n"
        h.update(line.encode())
    return h.hexdigest()
