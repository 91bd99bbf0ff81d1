import numpy as np

# membership tolerance for "x in Omega"
TOL_SET = 1e-10


class UsageError(ValueError):
    """Raised for invalid inputs: dimension mismatch, non-finite data, bad specs."""


def as_point(x, dim=None):
    """Return ``x`` as a 1-D float array, validating finiteness and dimension."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise UsageError(f"a point must be a non-empty vector, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise UsageError("point coordinates must be finite")
    if dim is not None and arr.size != dim:
        raise UsageError(f"dimension mismatch: expected {dim}, got {arr.size}")
    return arr


def as_points(X, dim=None):
    """Batch version of :func:`as_point`; returns an ``(m, N)`` array."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None] if dim == 1 else arr[None, :]
    if arr.ndim != 2:
        raise UsageError(f"expected an (m, N) array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise UsageError("point coordinates must be finite")
    if dim is not None and arr.shape[1] != dim:
        raise UsageError(f"dimension mismatch: expected {dim}, got {arr.shape[1]}")
    return arr


def lex_key(x):
    return tuple(float(v) for v in x)


def check_fields(d, required, optional=()):
    """Validate a JSON object's keys, rejecting unknown fields."""
    if not isinstance(d, dict):
        raise UsageError(f"expected a JSON object, got {type(d).__name__}")
    missing = [k for k in required if k not in d]
    if missing:
        raise UsageError(f"missing field(s): {', '.join(missing)}")
    unknown = sorted(set(d) - set(required) - set(optional))
    if unknown:
        raise UsageError(f"unknown field(s): {', '.join(unknown)}")


def finite_or_none(v):
    v = float(v)
    return v if np.isfinite(v) else None
