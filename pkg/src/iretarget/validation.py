"""Input validation helpers.

All public entry points funnel array inputs through these checks so that
shape and role errors surface as :class:`ValidationError` with a message
naming the offending argument, instead of cryptic numpy broadcasts.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def as_float_array(value, name: str, shape: tuple | None = None) -> np.ndarray:
    """Coerce to a float64 array and optionally enforce a shape.

    ``shape`` entries of ``None`` act as wildcards, e.g. ``(None, 3)``
    accepts any T x 3 array.
    """
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: cannot interpret as a float array ({exc})") from exc
    if shape is not None:
        if arr.ndim != len(shape):
            raise ValidationError(
                f"{name}: expected {len(shape)} dimensions, got shape {arr.shape}"
            )
        for axis, want in enumerate(shape):
            if want is not None and arr.shape[axis] != want:
                raise ValidationError(
                    f"{name}: expected shape {shape}, got {arr.shape}"
                )
    return arr


def require_same_shape(a: np.ndarray, b: np.ndarray, name_a: str, name_b: str) -> None:
    if a.shape != b.shape:
        raise ValidationError(
            f"{name_a} and {name_b} must have the same shape, got {a.shape} vs {b.shape}"
        )


def require_finite(arr: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")


def require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def require_roles(roles: dict, needed, owner: str = "skeleton") -> None:
    """Check that every role in ``needed`` is present, naming the first missing one."""
    for role in needed:
        if role not in roles:
            raise ValidationError(f"{owner} is missing required role '{role}'")
