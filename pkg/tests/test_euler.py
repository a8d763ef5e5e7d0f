import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from okubo_connect.branches import sector_angle
from okubo_connect.errors import DivergentIntegral, NoConvergence
from okubo_connect.euler import (EULER_NU, SWAP_NU, BoundaryTermError, IntegralSpec,
                                 _first_mu_below, check_relation, default_xi, eval_V,
                                 eval_W, euler_transform_residual, ode_residual,
                                 quad_segment, richardson, vanishing_report)

from conftest import rel

NU1, NU2 = 0.15 + 0.02j, -0.4 + 0.1j


# ---------------------------------------------------------------- quadrature

def test_quad_constant():
    r = quad_segment(lambda s, sc: np.ones_like(s), 0, 1)
    assert abs(r.value[0] - 1) < 1e-14


def test_quad_beta_endpoint_singularities():
    a, b = -0.6 + 0.3j, -0.8 - 0.1j
    r = quad_segment(lambda s, sc: np.ones_like(s), 0, 1, (a, b))
    assert abs(r.value[0] - complex(mp.beta(a + 1, b + 1))) < 1e-12


def test_quad_scales_with_segment():
    r = quad_segment(lambda s, sc: np.ones_like(s), 1j, 3 + 1j, (0.5, 0))
    assert abs(r.value[0] - 3 / 1.5) < 1e-13


def test_quad_gauss_kernel_against_hyp2f1():
    nu1, lam, z = 0.2 + 0.1j, 0.7 - 0.2j, 0.4 + 0.3j
    nu2 = -0.35 + 0.05j
    r = quad_segment(lambda s, sc: (1 - z * s) ** (-nu2 - 1), 0, 1, (lam - nu1 - 1, nu1))
    want = mp.beta(lam - nu1, nu1 + 1) * mp.hyp2f1(nu2 + 1, lam - nu1, lam + 1, z)
    assert abs(r.value[0] - complex(want)) < 1e-10 * abs(want)


def test_quad_per_component_exponents():
    r = quad_segment(lambda s, sc: np.ones((s.size, 2)), 0, 1,
                     (np.array([0.0, -0.5]), np.array([0.0, 0.0])))
    assert np.allclose(r.value, [1, 2], atol=1e-13)


def test_quad_rejects_divergent_exponent():
    with pytest.raises(DivergentIntegral):
        quad_segment(lambda s, sc: np.ones_like(s), 0, 1, (-1.0, 0))


def test_quad_reports_nonconvergence():
    with pytest.raises(NoConvergence):
        quad_segment(lambda s, sc: np.cos(400 * s), 0, 1, max_level=3)


# ---------------------------------------------------------------- specs

def test_integral_spec_validation():
    with pytest.raises(ValueError):
        IntegralSpec("finite", 0, 0, 0, NU1, NU2, ("inf", "xi"), -1)
    with pytest.raises(ValueError):
        IntegralSpec("inf", 0, 0, 0, NU1, NU2, ("t", "xi"), -1)
    with pytest.raises(ValueError):
        IntegralSpec("finite", 0, 0, 0, NU1, NU2, ("t", "xi"), 0)
    s = IntegralSpec("finite", 0, 0, 0, 1, 2, ["t", "xi"], 1)
    assert s.path == ("t", "xi") and isinstance(s.nu1, complex)


def test_divergent_eta0_endpoint(gauss):
    spec, frame = gauss
    isp = IntegralSpec("finite", 0, 0, 0, NU1, 0.5, ("eta0", "xi"), -1)
    with pytest.raises(DivergentIntegral):
        eval_W(isp, default_xi(frame, 0, -1), spec, frame)


def test_boundary_term_error_is_divergent():
    assert issubclass(BoundaryTermError, DivergentIntegral)


# ---------------------------------------------------------------- scalar closed form

def _closed_form(spec, frame, sign, nu1, nu2):
    # direct Euler-integral evaluation through 2F1, independent of the library
    xi = default_xi(frame, 0, sign)
    psi = sector_angle(*frame.sector_xi(0, sign))
    lam = spec.lam[0][0][0]
    t, eta0 = frame.tprime[0], frame.eta0
    d, ad = eta0 - t, frame.theta_prime[0] - math.pi

    def cp(z, e, a):
        return mp.exp(e * (mp.log(abs(z)) + 1j * a))

    def I(e):
        return (cp(xi - eta0, -nu2, psi) * cp(d, e, ad) * mp.beta(-nu2, nu1 + 1)
                * mp.hyp2f1(-e, -nu2, nu1 - nu2 + 1, -(xi - eta0) / d))

    top = d * I(lam - nu1 - 1)
    bottom = (nu2 - spec.Aprime[0][0]) * I(lam - nu1)
    return xi, np.array([complex(top), complex(bottom)])


@pytest.mark.parametrize("sign", [-1, 1])
def test_scalar_eta0_xi_closed_form(gauss, sign):
    spec, frame = gauss
    xi, want = _closed_form(spec, frame, sign, NU1, NU2)
    got = eval_W(IntegralSpec("finite", 0, 0, 0, NU1, NU2, ("eta0", "xi"), sign), xi,
                 spec, frame).value
    assert rel(got[:1], want[:1]) < 1e-9
    assert rel(got[1:], want[1:]) < 1e-9


def test_second_block_lemma_vs_direct(designed):
    spec, frame = designed
    xi = default_xi(frame, 0, -1)
    for path in (("t", "xi"), ("eta0", "xi"), ("eta0", "t")):
        isp = IntegralSpec("finite", 0, 0, 0, *EULER_NU["finite"], path, -1)
        a = eval_W(isp, xi, spec, frame).value
        b = eval_W(isp, xi, spec, frame, mode="direct").value
        assert rel(a, b) < 1e-7


# ---------------------------------------------------------------- relations

@pytest.mark.parametrize("relation", ["cauchy_minus", "cauchy_plus"])
@pytest.mark.parametrize("source", ["finite", "inf"])
@pytest.mark.parametrize("i", [0, 1])
def test_cauchy(designed, relation, source, i):
    spec, frame = designed
    nu = EULER_NU[source]
    k = 0 if source == "finite" else _first_mu_below(spec, nu[1])
    rep = check_relation(relation, dict(spec=spec, frame=frame, i=i, k=k, h=0, nu1=nu[0],
                                        nu2=nu[1], source=source))
    assert rep.passed, rep.entries[-1]


def test_cauchy_discriminates_phase(designed):
    # dropping the exp(-2 pi i nu1) factor in the S'+ relation must break it
    spec, frame = designed
    nu1, nu2 = EULER_NU["finite"]
    xi = default_xi(frame, 0, 1)
    W = [eval_W(IntegralSpec("finite", 0, 0, 0, nu1, nu2, p, 1), xi, spec, frame).value
         for p in (("eta0", "xi"), ("t", "xi"), ("eta0", "t"))]
    assert rel(W[0], W[1] + W[2]) > 1e-2


@pytest.mark.parametrize("family", list(SWAP_NU))
@pytest.mark.parametrize("sign", [-1, 1])
def test_swap_symmetry(designed, family, sign):
    spec, frame = designed
    nu = SWAP_NU[family]
    k = 0 if "t" in family else _first_mu_below(spec, max(nu, key=lambda z: -z.real))
    rep = check_relation("swap_symmetry", dict(spec=spec, frame=frame, i=0, k=k, h=0,
                                               family=family, nu1=nu[0], nu2=nu[1], sign=sign))
    assert rep.passed, rep.entries[-1]


def test_swap_is_not_trivial(designed):
    spec, frame = designed
    nu1, nu2 = SWAP_NU[("t", "xi")]
    xi = default_xi(frame, 0, -1)
    a = eval_W(IntegralSpec("finite", 0, 0, 0, nu1, nu2, ("t", "xi"), -1), xi, spec, frame).value
    b = eval_W(IntegralSpec("finite", 0, 0, 0, nu2, nu1, ("t", "xi"), -1), xi, spec, frame).value
    assert rel(a, b) > 1e-2
    va = eval_V(IntegralSpec("finite", 0, 0, 0, nu1, nu2, ("t", "xi"), -1), xi, spec, frame).value
    vb = eval_V(IntegralSpec("finite", 0, 0, 0, nu2, nu1, ("t", "xi"), -1), xi, spec, frame).value
    assert rel(va, vb) < 1e-9


def test_euler_transform_scalar(gauss):
    spec, frame = gauss
    assert euler_transform_residual(spec, frame, 0, 0, 0, 0.3 + 0.1j, -0.2 + 0.05j) < 1e-9


@pytest.mark.parametrize("i", [0, 1])
def test_euler_transform_rank2(designed, i):
    spec, frame = designed
    assert euler_transform_residual(spec, frame, i, 0, 0, 0.3 + 0.1j, -0.2 + 0.05j) < 1e-7


def test_euler_transform_needs_convergence(gauss):
    spec, frame = gauss
    with pytest.raises(DivergentIntegral):
        euler_transform_residual(spec, frame, 0, 0, 0, -0.3, 0.1)


@pytest.mark.parametrize("ident", ["W_eta0xi_t'i", "W_xi_t'i", "W_xi_inf"])
def test_asymptotics(designed, ident):
    spec, frame = designed
    src = "inf" if ident == "W_xi_inf" else "finite"
    nu = EULER_NU[src]
    k = 0 if src == "finite" else _first_mu_below(spec, nu[1])
    rep = check_relation("asymptotic", dict(spec=spec, frame=frame, i=0, k=k, id=ident,
                                            nu1=nu[0], nu2=nu[1], sign=-1), 1e-5)
    assert rep.passed, rep.entries[-1]


def test_richardson_removes_two_orders():
    assert abs(richardson(lambda r: 2.0 + 3 * r - 5 * r ** 2, 0.1) - 2.0) < 1e-14
    # the cubic term survives with weight 1/8
    assert abs(richardson(lambda r: r ** 3, 0.1) - 0.125e-3) < 1e-15


def test_vanishing(designed):
    rep = vanishing_report(*designed)
    assert len(rep.entries) > 0 and rep.passed


@pytest.mark.parametrize("path,nu", [(("eta0", "xi"), EULER_NU["finite"]),
                                     (("t", "inf"), (0.2 + 0.05j, 1.5 + 0.1j))])
def test_ode_residual(designed, path, nu):
    spec, frame = designed
    isp = IntegralSpec("finite", 0, 0, 0, nu[0], nu[1], path, -1)
    assert ode_residual(isp, default_xi(frame, 0, -1, 0.6), spec, frame) < 1e-6


# ---------------------------------------------------------------- properties

nu_part = st.floats(-0.45, 0.45)


@given(nu_part, nu_part, st.floats(-0.2, 0.2), st.floats(-0.2, 0.2))
def test_sin_identity_property(a, b, c, d):
    nu1, nu2 = complex(a, c), complex(b, d)
    if abs(cmath.sin(math.pi * (nu1 - nu2))) < 1e-3 or abs(nu1) < 1e-3 or abs(nu2) < 1e-3:
        return
    rep = check_relation("sin_identity", dict(nu1=nu1, nu2=nu2), 1e-10)
    assert rep.passed


# the (t, xi) path converges with vanishing boundary term for 0 < Re nu < lambda = 0.3
@settings(max_examples=15)
@given(st.floats(0.03, 0.27), st.floats(-0.1, 0.1), st.floats(0.03, 0.27), st.floats(-0.1, 0.1),
       st.sampled_from([-1, 1]))
def test_swap_symmetry_property(gauss, a, c, b, d, sign):
    spec, frame = gauss
    nu1, nu2 = complex(a, c), complex(b, d)
    rep = check_relation("swap_symmetry", dict(spec=spec, frame=frame, i=0, k=0, h=0,
                                               family=("t", "xi"), nu1=nu1, nu2=nu2,
                                               sign=sign), 1e-9)
    assert rep.passed, rep.entries[-1]
