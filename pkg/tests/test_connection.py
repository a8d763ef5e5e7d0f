import cmath
import math

import mpmath
import numpy as np
import pytest

from okubo_connect import connection as cn
from okubo_connect.instances import gauss_coefficients, gauss_spec, random_instance
from okubo_connect.model import build_frame

from conftest import rel

N3 = (3, [1, 1, 1], [1, 1, 1], 3, [1, 1, 1])


def mp_classical(a, b, c):
    """C_j from mpmath Gamma values (independent of complex_gamma)."""
    out = []
    for x, y in ((a, b), (b, a)):
        g = (mpmath.gamma(2 - c) * mpmath.gamma(y - x)
             / (mpmath.gamma(y - c + 1) * mpmath.gamma(1 - x)))
        out.append(complex(mpmath.exp(1j * mpmath.pi * (1 - c + x)) * g))
    return np.array(out)


@pytest.mark.parametrize("abc", [(0.3, 0.45, 0.7), (0.3 + 0.1j, 0.45 - 0.2j, 0.7 + 0.05j),
                                 (-0.2, 0.35, 1.4)])
def test_gauss_connection(abc):
    a, b, c = abc
    spec = gauss_spec(a, b, c)
    frame = build_frame(spec)
    want = mp_classical(a, b, c)
    assert rel(gauss_coefficients(a, b, c), want) < 1e-13
    for sign in (1, -1):
        num = cn.measure_big(spec, frame, ("Ui_to_inf", 0, sign))
        pred = cn.predict_big_coefficients(spec, frame, ("Ui_to_inf", 0, sign))
        assert rel(num.C[:, 0], want) < 1e-8
        assert rel(pred.C[:, 0], num.C[:, 0]) < 1e-8
        assert num.residual < 1e-10


def test_predict_rho_dependence_identity_at_zero():
    c0 = 0.7 - 0.2j
    assert cn.predict_rho_dependence("finite_to_finite", c0, 0.3, -0.2, 0.0) == pytest.approx(c0)
    assert cn.predict_rho_dependence("finite_to_infinity", c0, 0.3, -0.2, 0.0) == pytest.approx(c0)
    # a pole of Gamma(rho + mu + 1) in the denominator: coefficient vanishes
    assert cn.predict_rho_dependence("finite_to_infinity", c0, 0.3, 0.4, -1.4) == 0
    with pytest.raises(ValueError):
        cn.predict_rho_dependence("finite_to_finite", c0, 0.3, 0.4, 0.1, direction=0)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_scaling_suite(seed):
    spec = random_instance(seed, (2, [1, 1], [1, 1], 2, [1, 1]))
    rep = cn.verify(spec, build_frame(spec), "scaling", rng=np.random.default_rng(seed))
    assert rep.passed, [(e.name, e.rel_err) for e in rep.entries if not e.passed]


def test_scaling_phase_depends_on_order(generic2):
    # the literal exp(+pi i rho) phase fails for i > nu; the -1 direction holds
    spec, frame = generic2
    rho = 0.31 - 0.12j
    c0 = cn.underlying_table(spec, frame, 0.0, 1, 0).C
    c = cn.underlying_table(spec, frame, rho, 1, 0).C
    lam_i = spec.lam[1][0][0]
    lam_n = spec.lam[0][0][0]
    right = cn.predict_rho_dependence("finite_to_finite", c0[0, 0], lam_i, lam_n, rho, -1)
    wrong = cn.predict_rho_dependence("finite_to_finite", c0[0, 0], lam_i, lam_n, rho, 1)
    assert abs(right - c[0, 0]) < 1e-9 * abs(c[0, 0])
    assert abs(wrong - c[0, 0]) > 1e-3 * abs(c[0, 0])


def test_vanishing_suite(generic2):
    spec, frame = generic2
    rep = cn.verify(spec, frame, "vanishing")
    assert rep.passed and len(rep.entries) == spec.n * spec.p


@pytest.mark.parametrize("seed,shape,case", [
    (1, (2, [1, 1], [1, 1], 2, [1, 1]), "generic"),
    (2, (2, [1, 1], [1, 1], 2, [1, 1]), "generic"),
    (3, N3, "generic"),
    (1, N3, "red_i"),
    (1, N3, "red_ii"),
    (4, (2, [2, 2], [2, 1], 4, [1, 1, 1, 1]), "generic"),
    (5, (2, [2, 2], [2, 2], 3, [2, 1, 1]), "red_ii"),
])
def test_big_formulas(seed, shape, case):
    spec = random_instance(seed, shape, case=case)
    frame = build_frame(spec)
    rep = cn.verify(spec, frame, "big_" + case)
    assert rep.passed, [(e.name, e.rel_err, e.note) for e in rep.entries if not e.passed]
    assert rep.max_rel() < 1e-6


def test_families_cover_adjacent(generic2):
    spec, _ = generic2
    fams = cn.families(spec)
    assert ("adjacent", 0, 1) in fams and ("adjacent", 1, -1) in fams
    assert sum(f[0] == "Ui_to_inf" for f in fams) == 2 * spec.p


def test_eta0_independence(generic2):
    spec, frame = generic2
    rep = cn.verify(spec, frame, "eta0_independence")
    assert rep.passed


def test_structure_suite(generic2):
    spec, frame = generic2
    rep = cn.verify(spec, frame, "structure")
    assert rep.passed
    names = [e.name for e in rep.entries]
    assert any(n.startswith("monodromy[big:inf]") for n in names)
    assert any(n.startswith("homotopy") for n in names)


def test_gamma_vectors_shape(generic2):
    spec, frame = generic2
    g = cn.gamma_values(spec, frame, 0.2, ("finite", 0))
    assert g.shape == (spec.n, spec.sizes[0])
    g = cn.gamma_values(spec, frame, 0.2, ("inf", 0, 1))
    assert g.shape == (spec.n, spec.n)


def test_connect_numeric_residual(generic2):
    spec, frame = generic2
    t = cn.underlying_table(spec, frame, 0.15, 0, "inf")
    assert t.residual < 1e-10 and t.cond < 1e10
    assert t.C.shape == (spec.n, spec.sizes[0])
