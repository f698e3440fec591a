"""Circle-valued angles and their continuous lifts."""

from __future__ import annotations

import numpy as np

from ..errors import AmbiguousLiftError, InvalidArgumentError

TWO_PI = 2.0 * np.pi


def wrap_angle(x):
    """Reduce ``x`` modulo 2*pi into ``[0, 2*pi)``.

    Accepts scalars or arrays; scalars come back as Python floats.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("angle must be finite")
    out = np.mod(arr, TWO_PI)
    # np.mod can round a tiny negative input up to exactly 2*pi.
    out = np.where(out >= TWO_PI, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def unwrap(angles) -> np.ndarray:
    """Continuous lift of a sequence of angles.

    Each step is replaced by the representative of its class modulo 2*pi
    with magnitude below pi. A step of exactly pi has two nearest lifts and
    raises :class:`AmbiguousLiftError` naming the offending index.
    """
    a = np.asarray(angles, dtype=float)
    if a.ndim != 1:
        raise InvalidArgumentError("unwrap expects a one-dimensional sequence")
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError("angles must be finite")
    if a.size == 0:
        return a.copy()
    steps = np.diff(a)
    lifted = np.mod(steps + np.pi, TWO_PI) - np.pi
    ambiguous = np.flatnonzero(np.abs(lifted) == np.pi)
    if ambiguous.size:
        i = int(ambiguous[0])
        raise AmbiguousLiftError(i + 1, float(steps[i]))
    out = np.empty_like(a)
    out[0] = a[0]
    # Accumulate the integer corrections rather than the lifted steps so that
    # wrapping the output reproduces the input exactly.
    turns = np.rint((lifted - steps) / TWO_PI)
    out[1:] = a[1:] + TWO_PI * np.cumsum(turns)
    return out
