"""Shared report plumbing: recorded comparisons and JSON-ready conversion."""

from dataclasses import dataclass, fields, is_dataclass
import math

import numpy as np

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Check:
    """One floating-point comparison, kept with the threshold it was judged by."""

    value: float
    threshold: float
    passed: bool

    @classmethod
    def at_most(cls, value, threshold):
        return cls(float(value), float(threshold), bool(value <= threshold))

    @classmethod
    def below(cls, value, threshold):
        return cls(float(value), float(threshold), bool(value < threshold))

    @classmethod
    def at_least(cls, value, threshold):
        return cls(float(value), float(threshold), bool(value >= threshold))

    @classmethod
    def above(cls, value, threshold):
        return cls(float(value), float(threshold), bool(value > threshold))

    def __bool__(self):
        return self.passed


def _float(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def to_jsonable(obj):
    """Recursively convert reports, arrays and complex numbers to JSON types.

    Complex scalars become ``[re, im]`` pairs; non-finite floats become the
    strings ``"inf"``, ``"-inf"`` or ``"nan"`` so the output stays strict JSON.
    """
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    return obj
