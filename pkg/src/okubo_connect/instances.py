"""Seeded random instances satisfying the non-resonance assumptions."""

import cmath
import math

import numpy as np

from .errors import GiveUp, OkuboError
from .model import BigSystemSpec, specialize, validate
from .numerics import gamma_ratio

MAX_TRIES = 10_000
COND_MAX = 1e3


def _split(n, r):
    """Split n into r nearly equal positive parts."""
    if not 1 <= r <= n:
        raise ValueError(f"cannot split {n} into {r} distinct eigenvalues")
    q, s = divmod(n, r)
    return [q + 1] * s + [q] * (r - s)


def _box(rng, re=0.85, im=0.35):
    return complex(rng.uniform(-re, re), rng.uniform(-im, im))


def _sort_key(z):
    return (round(z.real, 12), round(z.imag, 12))


def _points(rng, p):
    """t_1..t_p on distinct rays about t_last, ordered counterclockwise."""
    tl = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
    while True:
        ang = np.sort(rng.uniform(-math.pi, math.pi, p))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
        if gaps.min() > 0.6:
            break
    rad = rng.uniform(0.6, 2.0, p)
    return [tl + r * cmath.exp(1j * a) for r, a in zip(rad, ang)], tl


def _draw_lambda_first(rng, sizes, lmult):
    n = sum(sizes)
    lam = []
    for li in lmult:
        for l in li:
            lam += [_box(rng)] * l
    A = 0.6 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    o = 0
    for m in sizes:
        A[o:o + m, o:o + m] = 0
        o += m
    A += np.diag(lam)
    mu, P = np.linalg.eig(A)
    order = sorted(range(n), key=lambda k: _sort_key(mu[k]))
    P = P[:, order]
    return A, P / np.linalg.norm(P, axis=0)


def _draw_mu_first(rng, sizes, mmult):
    n = sum(sizes)
    mu = []
    for m in mmult:
        mu += [_box(rng)] * m
    P0 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A0 = P0 @ np.diag(mu) @ np.linalg.inv(P0)
    Q = np.zeros((n, n), dtype=complex)
    o = 0
    for m in sizes:
        _, V = np.linalg.eig(A0[o:o + m, o:o + m])
        Q[o:o + m, o:o + m] = V
        o += m
    Qi = np.linalg.inv(Q)
    A = Qi @ A0 @ Q
    o = 0
    for m in sizes:
        blk = A[o:o + m, o:o + m]
        A[o:o + m, o:o + m] = np.diag(np.diag(blk))
        o += m
    P = Qi @ P0
    return A, P / np.linalg.norm(P, axis=0)


def random_instance(seed, shape, margin=0.05, case="generic"):
    """Random spec passing validate(case) with every margin >= margin.

    shape: (p, n_i list, r_i list, q, m_k list); r_i counts the distinct
    eigenvalues of the i-th diagonal block, m_k the multiplicities of the
    eigenvalues of A.
    """
    p, sizes, rs, q, mmult = shape
    sizes, rs, mmult = list(sizes), list(rs), list(mmult)
    if len(sizes) != p or len(rs) != p or len(mmult) != q or sum(sizes) != sum(mmult):
        raise ValueError("inconsistent shape")
    lmult = [_split(n, r) for n, r in zip(sizes, rs)]
    lam_repeat = any(l > 1 for li in lmult for l in li)
    mu_repeat = any(m > 1 for m in mmult)
    if lam_repeat and mu_repeat:
        raise ValueError("shapes with repeated eigenvalues in both A_ii and A are not supported")
    n = sum(sizes)
    # rank counting: a repeated eigenvalue this large is forced into the
    # spectrum of A (for lambda) or of some A_ii (for mu), so lambda - mu = 0
    if any(2 * l > n for li in lmult for l in li):
        raise ValueError("a diagonal-block eigenvalue repeated more than n/2 times is also an eigenvalue of A")
    if any(m + ni > n for m in mmult if m > 1 for ni in sizes):
        raise ValueError("an eigenvalue of A repeated m times with m + n_i > n is also an eigenvalue of A_ii")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_TRIES):
        t, tl = _points(rng, p)
        if mu_repeat:
            A, P = _draw_mu_first(rng, sizes, mmult)
        else:
            A, P = _draw_lambda_first(rng, sizes, lmult)
        if np.linalg.cond(P) > COND_MAX:
            continue
        rho1, rho2 = _box(rng), _box(rng)
        try:
            spec = BigSystemSpec(tuple(zip(t, sizes)), tl, A, P, rho1, rho2)
            if [m for _, m in spec.mu] != mmult or [[l for _, l in b] for b in spec.lam] != lmult:
                continue
            spec = specialize(spec, case)
            rep = validate(spec, margin, case)
        except OkuboError:
            continue
        if rep.passed:
            return spec
    raise GiveUp(f"no admissible instance after {MAX_TRIES} draws")


def shape_from_string(s):
    """Parse "p=2;n=1,1;r=1,1;m=1,1" style shape strings."""
    d = {}
    for part in s.split(";"):
        k, v = part.split("=")
        d[k.strip()] = [int(x) for x in v.split(",")]
    n = d["n"]
    r = d.get("r", n)
    m = d.get("m", [1] * sum(n))
    return (d.get("p", [len(n)])[0], n, r, len(m), m)


DEFAULT_SHAPE = (2, [1, 1], [1, 1], 2, [1, 1])


EULER_LAMBDA = (0.6 + 0.1j, 0.45 - 0.05j)
EULER_MU = (-0.3 + 0.1j, 1.35 - 0.05j)


def euler_instance(lam=EULER_LAMBDA, mu=EULER_MU, t=(1 + 0.2j, -0.5 + 1j), t_last=0j,
                   rho=(0.21 + 0.13j, -0.17 + 0.28j)):
    """Two one-dimensional blocks with prescribed lambda and mu.

    A = [[lam1, 1], [c, lam2]] with c = lam1 lam2 - mu1 mu2 has spectrum mu
    (the traces must agree); P holds the eigenvectors in the order of mu.
    The default mu1 is small enough that integrals towards infinity converge
    for nu2 in (Re mu1, 0).
    """
    l1, l2 = complex(lam[0]), complex(lam[1])
    m1, m2 = complex(mu[0]), complex(mu[1])
    if abs((l1 + l2) - (m1 + m2)) > 1e-12:
        raise ValueError("lambda and mu must have the same sum")
    A = np.array([[l1, 1.0], [l1 * l2 - m1 * m2, l2]])
    # (A - m) v = 0 with v = (1, m - l1)
    P = np.array([[1.0, 1.0], [m1 - l1, m2 - l1]])
    P = P / np.linalg.norm(P, axis=0)
    return BigSystemSpec(((t[0], 1), (t[1], 1)), t_last, A, P, rho[0], rho[1])


def gauss_spec(a, b, c):
    """Rank-2 system of the Gauss equation: t_1 = 0, t_last = 1, A = 1 - c,
    rho = (-a, -b); the exponents are {0, 1-c} at 0, {0, c-1-a-b} at 1 and
    {a, b} at infinity."""
    return BigSystemSpec(((0, 1),), 1, [[1 - c]], [[1]], -a, -b)


def gauss_coefficients(a, b, c):
    """Classical connection coefficients C_j of the solution with exponent
    1-c at 0 to the solutions with exponents a, b at infinity (Gamma-ratio
    formula; order (a, b))."""
    out = []
    for x, y in ((a, b), (b, a)):
        out.append(cmath.exp(1j * math.pi * (1 - c + x))
                   * gamma_ratio([2 - c, y - x], [y - c + 1, 1 - x]))
    return np.array(out)
