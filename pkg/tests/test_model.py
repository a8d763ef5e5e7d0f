import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from okubo_connect.errors import (DegenerateFrame, SingularP, StructureError)
from okubo_connect.instances import DEFAULT_SHAPE, random_instance
from okubo_connect.model import (BigSystemSpec, big_matrix, build_big, build_frame,
                                 build_underlying, reduce, riemann_scheme, specialize, validate)

SHAPES = [DEFAULT_SHAPE, (3, [1, 1, 1], [1, 1, 1], 3, [1, 1, 1]), (2, [2, 1], [2, 1], 3, [1, 1, 1])]


def test_spec_structure_errors():
    with pytest.raises(StructureError):
        BigSystemSpec(((0, 1), (1, 1)), 2, np.eye(3), np.eye(2), 0.1, 0.2)
    with pytest.raises(StructureError):
        BigSystemSpec(((0, 1), (0, 1)), 2, np.eye(2), np.eye(2), 0.1, 0.2)
    spec = BigSystemSpec(((0, 2),), 1, [[0.1, 1], [0, 0.2]], np.eye(2), 0.1, 0.2)
    with pytest.raises(StructureError):
        spec.check_structure()
    spec = BigSystemSpec(((0, 1), (1, 1)), 2, [[0.1, 1], [1, 0.2]], [[1, 1], [1, 1]], 0.1, 0.2)
    with pytest.raises(SingularP):
        spec.check_structure()


def test_gauss_lambda_mu(gauss):
    spec, _ = gauss
    [[(lam, mult)]] = spec.lam
    assert mult == 1 and abs(lam - 0.3) < 1e-15
    assert len(spec.mu) == 1 and abs(spec.mu[0][0] - 0.3) < 1e-15
    assert validate(spec, 0.05).passed


def test_validate_names_failing_assumption():
    spec = BigSystemSpec(((0, 1),), 1, [[2.0]], [[1]], -0.3, -0.45)
    rep = validate(spec)
    assert not rep.passed
    assert "E2_1" in [c.name for c in rep.failures()]


def test_gauss_scheme(gauss):
    spec, _ = gauss
    a, b, c = 0.3, 0.45, 0.7
    sch = riemann_scheme(build_big(spec))
    got = {lab: [e for e, m in ex for _ in range(m)] for lab, _, ex in sch.points}
    np.testing.assert_allclose(sorted(got[0], key=abs), [0, 1 - c], atol=1e-14)
    np.testing.assert_allclose(sorted(got["last"], key=abs), [0, c - 1 - a - b], atol=1e-14)
    np.testing.assert_allclose(sorted(got["inf"], key=abs), [a, b], atol=1e-14)


@pytest.mark.parametrize("shape", SHAPES)
def test_schemes_match_closed_forms(shape):
    spec = random_instance(3, shape)
    frame = build_frame(spec)
    for system in (build_big(spec), build_underlying(spec, frame, 0.2 - 0.3j)):
        sch = riemann_scheme(system)
        # Fuchs relation: sum of all exponents is zero for an Okubo system
        assert abs(sch.total()) < 1e-10


@pytest.mark.parametrize("case", ["red_i", "red_ii"])
def test_reduced_systems(case):
    spec = random_instance(2, (3, [1, 1, 1], [1, 1, 1], 3, [1, 1, 1]), case=case)
    sys_ = reduce(spec, case)
    mu = spec.mu
    drop = mu[-1][1] if case == "red_i" else mu[-1][1] + mu[-2][1]
    assert sys_.rank == 2 * spec.n - drop
    big = big_matrix(specialize(spec, case))
    assert np.abs(big[sys_.rank:, :sys_.rank]).max() < 1e-12
    riemann_scheme(sys_)


def test_frame_geometry(generic2):
    spec, frame = generic2
    for ti, tp, th, thp in zip(spec.t, frame.tprime, frame.theta, frame.theta_prime):
        assert abs(tp - (frame.eta0 + 1 / (ti - spec.t_last))) < 1e-14
        assert abs(thp + th) < 1e-15
        assert abs(cmath.exp(1j * thp) - (tp - frame.eta0) / abs(tp - frame.eta0)) < 1e-12
    for i in range(spec.p):
        for sign in (1, -1):
            lo, hi = frame.sector_xi(i, -sign)
            assert frame.sector_x(i, sign) == (-hi, -lo)
            assert lo < hi


def test_frame_rejects_bad_order():
    w = cmath.exp(2j * math.pi / 3)
    A = np.array([[0.1, 1, 0.3], [0.5, 0.2, 0.1], [0.2, 0.4, 0.3]])
    spec = BigSystemSpec(((1, 1), (w * w, 1), (w, 1)), 0, A, np.eye(3), 0.1, 0.2)
    with pytest.raises(DegenerateFrame):
        build_frame(spec)
    spec = random_instance(1, DEFAULT_SHAPE)
    with pytest.raises(DegenerateFrame):
        build_frame(spec, delta=10.0)


@given(st.integers(0, 10_000))
def test_random_instances_validate(seed):
    spec = random_instance(seed, DEFAULT_SHAPE, margin=0.05)
    rep = validate(spec, 0.05)
    assert rep.passed
    assert np.linalg.cond(spec.P) <= 1e3
    assert min(c.margin for c in rep.checks) >= 0.05


def test_specialize_overwrites_rho():
    spec = random_instance(4, (3, [1, 1, 1], [1, 1, 1], 3, [1, 1, 1]))
    s2 = specialize(spec, "red_ii")
    assert (s2.rho1, s2.rho2) == (spec.mu[-2][0], spec.mu[-1][0])
    assert s2.case == "red_ii"
