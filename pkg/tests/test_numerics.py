import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from okubo_connect.numerics import (ArgWindow, NoBranchError, PoleError, arg_in_window,
                                    complex_gamma, cpow, gamma_ratio, log_gamma, pochhammer,
                                    precision_profile, sin_identity, unit)

mpmath.mp.dps = 30

finite = st.floats(-6, 6, allow_nan=False)


def mp_gamma(z):
    return complex(mpmath.gamma(mpmath.mpc(z.real, z.imag)))


def test_gamma_integers_and_half():
    assert complex_gamma(5) == 24
    assert complex_gamma(1) == 1
    assert abs(complex_gamma(0.5) - math.sqrt(math.pi)) < 1e-15


@pytest.mark.parametrize("z", [0.3 + 0.1j, 2.7 - 4j, -0.5 + 0.25j, -3.3 - 0.7j, 1e-3 + 0j,
                               0.5 + 30j, -7.5 + 0.01j, 12.25 + 3j])
def test_gamma_against_mpmath(z):
    g = complex_gamma(z)
    assert abs(g - mp_gamma(z)) <= 5e-14 * abs(mp_gamma(z))


@given(finite, finite)
def test_gamma_certificate(x, y):
    z = complex(x, y)
    if min(abs(z + k) for k in range(8)) < 1e-3:
        return
    want = mp_gamma(z)
    assert abs(complex_gamma(z) - want) <= 1e-13 * abs(want)


@given(finite, finite)
def test_gamma_recurrence(x, y):
    z = complex(x, y)
    if min(abs(z + k) for k in range(9)) < 1e-2:
        return
    assert abs(complex_gamma(z + 1) - z * complex_gamma(z)) <= 1e-12 * abs(complex_gamma(z + 1))


@given(st.floats(-4, 4), st.floats(0.05, 3))
def test_gamma_reflection(x, y):
    z = complex(x, y)
    lhs = complex_gamma(z) * complex_gamma(1 - z)
    rhs = math.pi / cmath.sin(math.pi * z)
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


def test_gamma_poles():
    for z in (0, -1, -5, -3 + 1e-14j):
        with pytest.raises(PoleError):
            complex_gamma(z)


def test_gamma_ratio_large_arguments():
    # each Gamma alone overflows
    r = gamma_ratio([200.5], [199.5])
    assert abs(r - 199.5) < 1e-10
    r = gamma_ratio([0.3 + 0.2j, 1.1], [0.7 - 0.1j])
    want = mp_gamma(0.3 + 0.2j) * mp_gamma(1.1) / mp_gamma(0.7 - 0.1j)
    assert abs(r - want) <= 1e-14 * abs(want)


def test_log_gamma_exponentiates():
    z = -2.5 + 0.3j
    assert abs(cmath.exp(log_gamma(z)) - mp_gamma(z)) <= 1e-13 * abs(mp_gamma(z))


def test_pochhammer():
    assert pochhammer(0.5, 0) == 1
    assert abs(pochhammer(0.5, 3) - 0.5 * 1.5 * 2.5) < 1e-15
    z = 0.3 + 0.4j
    assert abs(pochhammer(z, 6) - complex_gamma(z + 6) / complex_gamma(z)) < 1e-12


def test_arg_window_representative():
    w = ArgWindow(math.pi, 3 * math.pi)
    assert abs(arg_in_window(1j, w) - 2.5 * math.pi) < 1e-15
    assert abs(arg_in_window(-1, w) - 3 * math.pi) < 1e-15
    with pytest.raises(NoBranchError):
        arg_in_window(1, ArgWindow(0.1, 1.0))
    with pytest.raises(NoBranchError):
        arg_in_window(0, w)
    with pytest.raises(ValueError):
        ArgWindow(0, 7)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-20, 20))
def test_arg_in_window_property(x, y, lo):
    z = complex(x, y)
    if z == 0:
        return
    th = arg_in_window(z, ArgWindow(lo, lo + 2 * math.pi))
    assert lo < th <= lo + 2 * math.pi + 1e-12
    assert abs(cmath.rect(abs(z), th) - z) <= 1e-12 * abs(z)


def test_cpow_branches():
    # (-1)^(1/2) with arg pi and -pi
    assert abs(cpow(-1, 0.5, math.pi) - 1j) < 1e-15
    assert abs(cpow(-1, 0.5, -math.pi) + 1j) < 1e-15
    assert cpow(0, 0.5, 0) == 0
    with pytest.raises(ZeroDivisionError):
        cpow(0, -0.5, 0)


@given(st.floats(0.01, 0.99), st.floats(-0.99, -0.01), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_sin_identity_property(a, b, c, d):
    nu1, nu2 = complex(a, c), complex(b, d)
    assert abs(sin_identity(nu1, nu2) - 1) <= 1e-13 * max(1, abs(cmath.sin(math.pi * (nu1 - nu2))) ** -1)


def test_sin_identity_example():
    assert abs(sin_identity(0.3, -0.7 + 0.2j) - 1) <= 1e-13


def test_unit():
    v = unit(3, 1)
    assert v.dtype == complex and list(v) == [0, 1, 0]


def test_precision_profile(monkeypatch):
    assert precision_profile().name == "binary64"
    monkeypatch.setenv("OKUBO_PRECISION", "double")
    assert precision_profile().eps == 2.0 ** -52
    with pytest.raises(ValueError):
        precision_profile("binary128")
