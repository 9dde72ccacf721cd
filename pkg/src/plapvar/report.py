"""Deterministic machine-readable reports.

Floats always print with 17 significant digits and dictionary keys are
sorted, so identical runs serialize byte-identically.  Exact rationals
print as "numerator/denominator" strings.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

__all__ = ["dumps", "fmt_float"]


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(float(x), ".17g")
    # make sure the token parses as a JSON number
    if "e" not in s and "." not in s and "inf" not in s and "nan" not in s:
        s += ".0"
    return s


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _dump(obj, parts, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        parts.append("true" if obj else "false")
    elif isinstance(obj, Fraction):
        parts.append(_escape(f"{obj.numerator}/{obj.denominator}"))
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(fmt_float(float(obj)))
    elif isinstance(obj, str):
        parts.append(_escape(obj))
    elif isinstance(obj, np.ndarray):
        _dump(obj.tolist(), parts, indent, level)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            parts.append("[]")
            return
        parts.append("[\n")
        for i, item in enumerate(obj):
            parts.append(pad_in)
            _dump(item, parts, indent, level + 1)
            parts.append(",\n" if i < len(obj) - 1 else "\n")
        parts.append(pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        keys = sorted(obj.keys())
        parts.append("{\n")
        for i, k in enumerate(keys):
            if not isinstance(k, str):
                raise TypeError(f"report keys must be strings, got {k!r}")
            parts.append(pad_in + _escape(k) + ": ")
            _dump(obj[k], parts, indent, level + 1)
            parts.append(",\n" if i < len(keys) - 1 else "\n")
        parts.append(pad + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    parts = []
    _dump(obj, parts, indent, 0)
    parts.append("\n")
    return "".join(parts)
