import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from okubo_connect.continuation import (AnalyticElement, continue_matrix, dense_line, march_line,
                                        monodromy, plan_path)
from okubo_connect.errors import ClearanceError, UnreachableError
from okubo_connect.instances import random_instance
from okubo_connect.model import OkuboSystem, build_big, build_frame, build_underlying, riemann_scheme

from conftest import rel


def scalar_system(a, t=0.0):
    return OkuboSystem(1, [t], [[a]])


@given(st.floats(-2, 2), st.floats(-1, 1), st.floats(0.2, 3), st.floats(-2.5, 2.5))
def test_scalar_continuation_matches_power(ar, ai, r, ang):
    a = complex(ar, ai)
    s = scalar_system(a)
    z0 = 1.0 + 0j
    z1 = r * cmath.exp(1j * ang)
    if abs(ang) > 2.4 and r < 0.5:
        return
    # straight line avoids 0 unless it passes through the negative axis
    if z1.real < 0 and abs(z1.imag) < 1e-3:
        return
    Y, _ = dense_line(s, z0, np.array([1.0 + 0j]), z1, [1.0])
    assert abs(Y[0] - z1 ** a) <= 1e-10 * abs(z1 ** a)


def test_scalar_monodromy():
    a = 0.37 - 0.2j
    M = monodromy(scalar_system(a), 0.0, 0.5)
    assert abs(M[0, 0] - cmath.exp(2j * math.pi * a)) < 1e-11
    # clockwise loop about infinity: exponent -a there
    M = monodromy(scalar_system(a), "inf", 2.0)
    assert abs(M[0, 0] - cmath.exp(-2j * math.pi * a)) < 1e-11


@pytest.mark.parametrize("seed", [1, 2])
def test_monodromy_spectra(seed):
    spec = random_instance(seed, (2, [1, 1], [1, 1], 2, [1, 1]))
    system = build_big(spec)
    sch = riemann_scheme(system)
    fin = np.array(system.finite_sing)
    for label, t, ex in sch.points:
        want = sorted((cmath.exp(2j * math.pi * e) for e, m in ex for _ in range(m)),
                      key=lambda z: (round(z.real, 6), z.imag))
        if t == "inf":
            base = fin.mean() + 2 * np.abs(fin - fin.mean()).max()
        else:
            base = t + 0.4 * min(abs(t - u) for u in fin if u != t)
        got = sorted(np.linalg.eigvals(monodromy(system, t, base)),
                     key=lambda z: (round(z.real, 6), z.imag))
        np.testing.assert_allclose(got, want, atol=1e-8, rtol=1e-8)


def test_product_of_monodromies_is_identity(generic2):
    spec, frame = generic2
    system = build_underlying(spec, frame, 0.21 + 0.1j)
    # the loop around everything equals the inverse of the loop around infinity
    fin = np.array(system.finite_sing)
    base = fin.mean() + 2 * np.abs(fin - fin.mean()).max()
    M = monodromy(system, "inf", base)
    np.testing.assert_allclose(np.linalg.det(M),
                               np.prod([cmath.exp(2j * math.pi * e) for e in
                                        np.linalg.eigvals(-system.A)]), rtol=1e-9)


def test_homotopy_invariance(generic2):
    spec, frame = generic2
    system = build_underlying(spec, frame, 0.1 - 0.2j)
    Y0 = np.eye(spec.n, dtype=complex)
    i = 0
    z0 = frame.tprime[i] + 0.2 * abs(frame.tprime[i] - frame.eta0) * cmath.exp(1j * (frame.theta_prime[i] - math.pi))
    z1 = frame.eta0 + 0.5 * abs(frame.tprime[1] - frame.eta0) * cmath.exp(1j * (frame.theta_prime[1] - 0.5))
    r0 = 0.5 * min(abs(t - frame.eta0) for t in frame.tprime)
    vals = []
    for r in (0.3 * r0, 0.95 * r0):
        plan = plan_path(frame, z0, z1, "Pprime", r_arc=r)
        vals.append(continue_matrix(system, AnalyticElement(z0, Y0, system), plan).value)
    assert rel(vals[0], vals[1]) <= 1e-9


def test_clearance_error():
    s = scalar_system(0.5)
    with pytest.raises(ClearanceError):
        march_line(s, -1.0 + 0j, np.array([1j]), 1.0 + 0j)


def test_plan_rejects_points_on_cuts(generic2):
    spec, frame = generic2
    t = frame.tprime[0]
    beyond = frame.eta0 + 2 * (t - frame.eta0)
    with pytest.raises(UnreachableError):
        plan_path(frame, beyond, frame.eta0, "Pprime")


def test_dense_line_values_along_segment():
    a = 0.25
    s = scalar_system(a)
    taus = [0.1, 0.5, 0.9, 1.0]
    Y, vals = dense_line(s, 1.0, np.array([1.0 + 0j]), 3.0 + 1j, taus)
    for tau, v in zip(taus, vals):
        z = 1.0 + (2.0 + 1j) * tau
        assert abs(v[0] - z ** a) < 1e-12
