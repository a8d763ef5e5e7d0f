"""Scalar special functions and branch-window helpers.

Scalars are Python ``complex`` values and matrices are numpy ``complex128``
arrays.  Only the binary64 precision profile is implemented; the profile is
selected through the ``OKUBO_PRECISION`` environment variable.
"""

import cmath
import math
import os
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Lanczos approximation, g = 607/128, 14 terms.  Relative error of the
# log-gamma below 1e-15 on Re z >= 0.5 (see tests/test_numerics.py for the
# certificate against a 30 digit oracle).
_LANCZOS_G = 5.24218750000000000
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COF = (
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005
_LOG_PI = math.log(math.pi)

POLE_TOL = 1e-12


class PoleError(ArithmeticError):
    """Gamma evaluated at (or within tolerance of) a non-positive integer."""


class NoBranchError(ValueError):
    """No representative of arg z lies in the requested window."""


@dataclass(frozen=True)
class PrecisionProfile:
    name: str
    eps: float
    digits: int


_PROFILES = {"binary64": PrecisionProfile("binary64", 2.0 ** -52, 15)}
_PROFILES["double"] = _PROFILES["binary64"]


def precision_profile(name=None):
    """Return the active floating point profile."""
    if name is None:
        name = os.environ.get("OKUBO_PRECISION", "binary64")
    try:
        return _PROFILES[name]
    except KeyError:
        raise ValueError(
            f"unsupported precision profile {name!r}; available: {sorted(_PROFILES)}"
        ) from None


def as_complex(z):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite scalar {z!r}")
    return z


def dist_to_int(z):
    """Distance from z to the nearest integer."""
    z = complex(z)
    return abs(z - round(z.real))


def dist_to_nonpos_int(z):
    z = complex(z)
    k = min(round(z.real), 0)
    return abs(z - k)


def _lanczos_lgamma(z):
    # valid for Re z >= 0.5
    tmp = z + _LANCZOS_G
    tmp = (z + 0.5) * cmath.log(tmp) - tmp
    ser = _LANCZOS_C0
    y = z
    for c in _LANCZOS_COF:
        y = y + 1.0
        ser = ser + c / y
    return tmp + cmath.log(_SQRT_2PI * ser / z)


def _log_sin(w):
    """log(sin w) up to a multiple of 2*pi*i, stable for large |Im w|."""
    if w.imag > 0:
        return -1j * w + cmath.log(0.5j) + cmath.log(1.0 - cmath.exp(2j * w))
    return 1j * w - cmath.log(2j) + cmath.log(1.0 - cmath.exp(-2j * w))


def log_gamma(z):
    """A logarithm of Gamma(z).  The imaginary part is not on the principal
    branch of log Gamma; only exp(log_gamma(z)) is meaningful."""
    z = as_complex(z)
    if z.real <= 0.5 and dist_to_nonpos_int(z) < POLE_TOL:
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real >= 0.5:
        return _lanczos_lgamma(z)
    # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return _LOG_PI - _log_sin(math.pi * z) - _lanczos_lgamma(1.0 - z)


def complex_gamma(z):
    z = as_complex(z)
    if z.imag == 0.0 and z.real > 0 and z.real == int(z.real) and z.real <= 21:
        return complex(math.factorial(int(z.real) - 1))
    return cmath.exp(log_gamma(z))


def gamma_ratio(numerators, denominators):
    """prod Gamma(num) / prod Gamma(den), combined in log space."""
    s = 0j
    for z in numerators:
        s += log_gamma(z)
    for z in denominators:
        s -= log_gamma(z)
    return cmath.exp(s)


def pochhammer(a, m):
    """Rising factorial (a)_m by direct product."""
    if m < 0:
        raise ValueError("m must be non-negative")
    out = 1.0 + 0j
    a = complex(a)
    for j in range(m):
        out *= a + j
    return out


@dataclass(frozen=True)
class ArgWindow:
    """Half-open window (lo, hi] for an argument value."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("empty window")
        if self.hi - self.lo > TWO_PI + 1e-12:
            raise ValueError("window wider than 2*pi")

    def contains(self, theta):
        return self.lo < theta <= self.hi

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)


def arg_in_window(z, w):
    """The representative of arg z lying in the window w."""
    z = complex(z)
    if z == 0:
        raise NoBranchError("arg of zero")
    th = cmath.phase(z)
    k = math.floor((w.lo - th) / TWO_PI) + 1
    th = th + TWO_PI * k
    if th > w.hi:
        raise NoBranchError(f"arg of {z} has no representative in ({w.lo}, {w.hi}]")
    return th


def cpow(z, e, arg):
    """z**e with arg z pinned to the given value."""
    z = complex(z)
    if z == 0:
        if complex(e).real > 0:
            return 0j
        raise ZeroDivisionError("0 to a power with non-positive real part")
    return cmath.exp(complex(e) * complex(math.log(abs(z)), arg))


def unit(n, i):
    """Unit vector e_i (zero based) in C^n."""
    v = np.zeros(n, dtype=complex)
    v[i] = 1.0
    return v


def sin_identity(nu1, nu2):
    """sum_j exp(-pi i nu_j) sin(pi nu_j') / sin(pi (nu_j' - nu_j)); equals 1."""
    nu = (complex(nu1), complex(nu2))
    s = 0j
    for j in range(2):
        a, b = nu[j], nu[1 - j]
        s += cmath.exp(-1j * math.pi * a) * cmath.sin(math.pi * b) / cmath.sin(math.pi * (b - a))
    return s
