"""Deterministic JSON rendering with 17-significant-digit floats."""

from __future__ import annotations

import math


def _render(obj) -> str:
    if type(obj).__module__ == "numpy" and hasattr(obj, "item"):
        obj = obj.item()
    if isinstance(obj, dict):
        inner = ",".join(f"{_render(str(k))}:{_render(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_render(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        if math.isnan(obj):
            return '"nan"'
        return format(obj, ".17g")
    if isinstance(obj, complex):
        return _render([obj.real, obj.imag])
    raise TypeError(f"cannot render {type(obj)!r} as JSON")


def dumps(obj) -> str:
    return _render(obj)


def parse_p(value):
    """Inverse of the float rendering for the exponent field."""
    if value in ("inf", "Infinity"):
        return math.inf
    return float(value)
