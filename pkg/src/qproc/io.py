"""Version-tagged JSON files for datasets, channels and input lists.

Floats go through ``json`` (shortest repr), which round-trips doubles
exactly.
"""
import json
import math

from .bloch import AXES, MeasurementRecord, QubitState, state_from_record
from .channel import AffineChannel
from .errors import InputError
from .reconstruct import TestPair

VERSION = 1


class FormatError(InputError):
    """A file does not match its schema; ``field`` names the offending path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def _number(x, field):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise FormatError(field, f"expected a finite number, got {x!r}")
    return float(x)


def _vector(v, field, n=3):
    if not isinstance(v, list) or len(v) != n:
        raise FormatError(field, f"expected a list of {n} numbers")
    return [_number(x, f"{field}[{i}]") for i, x in enumerate(v)]


def _count(x, field):
    if isinstance(x, bool) or not isinstance(x, int) or x < 0:
        raise FormatError(field, f"expected a nonnegative integer, got {x!r}")
    return x


def _check_version(doc, where):
    if not isinstance(doc, dict):
        raise FormatError(where, "expected a JSON object")
    if doc.get("version") != VERSION:
        raise FormatError(f"{where}.version", f"expected {VERSION}, got {doc.get('version')!r}")


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(str(path), f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise FormatError(str(path), exc.strerror or str(exc)) from None


def dump_json(doc, path=None):
    text = json.dumps(doc, indent=2) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------- channel


def channel_to_dict(E):
    return {"version": VERSION, "matrix": [[float(x) for x in row] for row in E.M]}


def channel_from_dict(doc):
    _check_version(doc, "channel")
    rows = doc.get("matrix")
    if not isinstance(rows, list) or len(rows) != 4:
        raise FormatError("channel.matrix", "expected 4 rows")
    m = [_vector(row, f"channel.matrix[{i}]", 4) for i, row in enumerate(rows)]
    if m[0] != [1.0, 0.0, 0.0, 0.0]:
        raise FormatError("channel.matrix[0]", f"first row must be [1, 0, 0, 0], got {m[0]}")
    return AffineChannel(m)


def load_channel(path):
    return channel_from_dict(load_json(path))


def save_channel(E, path):
    return dump_json(channel_to_dict(E), path)


# ---------------------------------------------------------------- dataset


def record_to_dict(rec):
    if rec.counts is not None:
        return {"counts": {a: {"plus": p, "minus": m} for a, (p, m) in zip(AXES, rec.counts)}}
    return {"expectations": [float(e) for e in rec.expectations]}


def record_from_dict(doc, field):
    if not isinstance(doc, dict) or len(doc) != 1 or not ({"counts", "expectations"} & set(doc)):
        raise FormatError(field, "expected exactly one of 'counts' or 'expectations'")
    if "expectations" in doc:
        ex = _vector(doc["expectations"], f"{field}.expectations")
        try:
            return MeasurementRecord.from_expectations(ex)
        except InputError as exc:
            raise FormatError(f"{field}.expectations", str(exc)) from None
    counts = doc["counts"]
    if not isinstance(counts, dict):
        raise FormatError(f"{field}.counts", "expected an object keyed by x, y, z")
    pairs = []
    for a in AXES:
        c = counts.get(a)
        if not isinstance(c, dict):
            raise FormatError(f"{field}.counts.{a}", "missing axis")
        pairs.append((_count(c.get("plus"), f"{field}.counts.{a}.plus"), _count(c.get("minus"), f"{field}.counts.{a}.minus")))
    try:
        return MeasurementRecord.from_counts(pairs)
    except InputError as exc:
        raise FormatError(f"{field}.counts", str(exc)) from None


def dataset_to_dict(records):
    """``records`` is a list of ``(input QubitState, MeasurementRecord)``."""
    return {
        "version": VERSION,
        "pairs": [{"input": [float(x) for x in s.r], "output": record_to_dict(rec)} for s, rec in records],
    }


def dataset_from_dict(doc):
    _check_version(doc, "dataset")
    pairs = doc.get("pairs")
    if not isinstance(pairs, list):
        raise FormatError("dataset.pairs", "expected a list")
    out = []
    for j, p in enumerate(pairs):
        field = f"dataset.pairs[{j}]"
        if not isinstance(p, dict):
            raise FormatError(field, "expected an object")
        s = QubitState(_vector(p.get("input"), f"{field}.input"))
        out.append((s, record_from_dict(p.get("output"), f"{field}.output")))
    return out


def load_dataset(path):
    return dataset_from_dict(load_json(path))


def save_dataset(records, path):
    return dump_json(dataset_to_dict(records), path)


def dataset_pairs(records):
    """Test pairs with outputs estimated from the records (no clamping)."""
    out = []
    for j, (s, rec) in enumerate(records):
        try:
            out.append(TestPair(s, state_from_record(rec)))
        except InputError as exc:
            raise FormatError(f"dataset.pairs[{j}].input", str(exc)) from None
    return out


# ----------------------------------------------------------------- inputs


def inputs_from_dict(doc):
    """Input lists: ``{"version": 1, "inputs": [[x, y, z], ...]}``."""
    _check_version(doc, "inputs")
    items = doc.get("inputs")
    if not isinstance(items, list):
        raise FormatError("inputs.inputs", "expected a list")
    return [QubitState(_vector(v, f"inputs.inputs[{j}]")) for j, v in enumerate(items)]


def load_inputs(path):
    return inputs_from_dict(load_json(path))
