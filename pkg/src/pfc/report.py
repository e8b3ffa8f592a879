"""Deterministic JSON reports.

Floats are written with 17 significant digits so doubles round-trip
exactly; non-finite values become the strings ``"inf"``, ``"-inf"`` and
``"nan"``; complex numbers become ``[re, im]``.
"""

import dataclasses
import enum
import json
import math

import numpy as np

SCHEMA = "pfc-report/1"


class _Float(float):
    def __repr__(self):
        return format(self, ".17g")


def to_jsonable(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return _Float(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if hasattr(obj, "coords"):
        return to_jsonable(obj.coords)
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return [to_jsonable(v) for v in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


class _Encoder(json.JSONEncoder):
    def iterencode(self, o, _one_shot=False):
        # the C encoder ignores float subclasses' repr, so use the Python one
        return json.encoder._make_iterencode(
            {}, self.default, json.encoder.py_encode_basestring, self.indent,
            lambda f: repr(_Float(f)), self.key_separator, self.item_separator,
            self.sort_keys, self.skipkeys, _one_shot,
        )(o, 0)


def build_report(request, results, warnings=(), timing=None):
    """Report dict with fixed top-level field order."""
    return {
        "schema": SCHEMA,
        "request": to_jsonable(request),
        "results": to_jsonable(results),
        "warnings": list(warnings),
        "timing": to_jsonable(timing),
    }


def dumps(report):
    return json.dumps(report, cls=_Encoder, indent=2, allow_nan=False) + "\n"
