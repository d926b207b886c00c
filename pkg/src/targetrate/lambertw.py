"""Principal branch of the Lambert W function on the nonnegative reals.

W0(w) is the unique x >= 0 with x * exp(x) = w. Evaluation uses Halley's
method on the rescaled residual ``x - w * exp(-x)``, which stays finite for
every representable ``w`` and has the same root as ``x * exp(x) - w``.

Initial guesses:

* ``w < 1e-4``: the series ``w - w**2``
* ``w > e``: the asymptotic ``ln(w) - ln(ln(w))``
* otherwise: ``ln(1 + w)``
"""

import math

import numpy as np
from numba import njit

from .errors import ConvergenceError, DomainError

__all__ = ["lambert_w0", "MAX_ITERATIONS"]

MAX_ITERATIONS = 50

_E = math.e
_TOL = 4.0 * np.finfo(float).eps


@njit(cache=True)
def _w0_kernel(w):
    # returns -1.0 on non-convergence; callers turn that into an exception
    if w == 0.0:
        return 0.0
    if w < 1e-4:
        x = w - w * w
    elif w > _E:
        lw = math.log(w)
        x = lw - math.log(lw)
    else:
        x = math.log1p(w)

    for _ in range(MAX_ITERATIONS):
        q = w * math.exp(-x)
        f = x - q
        fp = 1.0 + q
        fpp = -q
        dx = 2.0 * f * fp / (2.0 * fp * fp - f * fpp)
        x -= dx
        if abs(dx) <= _TOL * x:
            return x
    return -1.0


@njit(cache=True)
def _w0_array(w, out):
    for i in range(w.shape[0]):
        out[i] = _w0_kernel(w[i])


def lambert_w0(w):
    """Evaluate W0 at a nonnegative scalar or array.

    Parameters
    ----------
    w : float or array_like
        Arguments, all finite and >= 0.

    Returns
    -------
    float or numpy.ndarray
        W0(w), same shape as the input.

    Raises
    ------
    DomainError
        If any argument is negative, NaN or infinite.
    ConvergenceError
        If Halley's method does not settle within ``MAX_ITERATIONS`` steps.
    """
    arr = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("w", "Lambert W argument must be finite")
    if np.any(arr < 0.0):
        raise DomainError("w", "only the nonnegative real axis is supported")

    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    _w0_array(flat, out)
    if np.any(out < 0.0):
        raise ConvergenceError("Lambert W Halley iteration did not converge")
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)
