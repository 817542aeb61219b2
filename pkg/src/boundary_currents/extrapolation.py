"""Richardson extrapolation of geometric ladders to h = 0."""

from dataclasses import dataclass

import numpy as np

__all__ = ["richardson", "richardson_table", "RichardsonResult"]


@dataclass
class RichardsonResult:
    value: object
    error: object
    converged: bool
    corrections: np.ndarray


def richardson_table(h, values, order_hint=1, tol=np.inf, rtol=1e-9):
    """Extrapolate values(h) to h = 0 assuming v(h) = v0 + c_p h^p + c_{p+1} h^{p+1} + ...

    ``values`` has the ladder along axis 0 and may carry trailing axes, which
    are extrapolated independently.  The error estimate is the magnitude of
    the last diagonal correction.  ``converged`` requires the last two
    diagonal corrections to be non-increasing (or negligible) and the error to
    stay below ``tol``.
    """
    h = np.asarray(h, dtype=float)
    V = np.asarray(values, dtype=complex)
    n = h.size
    if n < 3:
        raise ValueError("a ladder needs at least 3 rungs")
    if V.shape[0] != n:
        raise ValueError("ladder values do not match the steps")
    if np.any(np.diff(h) >= 0):
        raise ValueError("steps must be strictly decreasing")
    q = h[:-1] / h[1:]
    if np.max(np.abs(q - q[0])) > rtol * q[0]:
        raise ValueError("steps must form a geometric sequence")
    q = q[0]
    prev = list(V)  # column j-1 of the tableau, rows j-1..n-1
    diag = [V[0]]
    for j in range(1, n):
        fac = q ** (order_hint + j - 1) - 1.0
        cur = [prev[i] + (prev[i] - prev[i - 1]) / fac for i in range(1, len(prev))]
        diag.append(cur[0])
        prev = cur
    diag = np.array(diag)
    corr = np.abs(np.diff(diag, axis=0))
    value = diag[-1]
    err = corr[-1]
    scale = np.maximum(np.max(np.abs(V), axis=0), 1e-300)
    c_last, c_prev = corr[-1], corr[-2] if n >= 3 else corr[-1]
    tiny = c_last <= 1e-13 * scale
    monotone = np.all((c_last <= c_prev) | tiny)
    converged = bool(monotone and np.all(err <= tol))
    if np.ndim(value) == 0:
        value, err = complex(value), float(err)
    return RichardsonResult(value, err, converged, corr)


def richardson(ladder, order_hint=1):
    """Extrapolate a list of (h, value) pairs; returns (value, error)."""
    h = [p[0] for p in ladder]
    v = [p[1] for p in ladder]
    res = richardson_table(h, v, order_hint)
    return res.value, res.error
