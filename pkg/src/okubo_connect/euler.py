"""Euler-type integrals W, their Gamma-normalized companions V, and numerical
checks of the relations between them.

For xi in the sector S'^(+/-)_i the integrals are

    W = [ (eta0 - T') v ; P^-1 M v ],
    v = int_a^b ((xi - zeta)/(xi - eta0))^nu1 (zeta - eta0)^(-nu2-1) w(-nu1-1; zeta) dzeta,

with w a local solution of the underlying system at t'_i or at infinity.  The
second block is evaluated through the identity
    P^-1 M v = (nu2 - A') P^-1 int (...) (zeta - T') w dzeta
(valid when the boundary terms vanish), or, with mode="direct", by
differentiating v numerically in xi.
"""

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .continuation import dense_line
from .errors import DivergentIntegral, NoConvergence
from .local import standard_basis
from .numerics import TWO_PI, ArgWindow, arg_in_window, cpow, gamma_ratio, sin_identity
from .report import Report

PI = math.pi
NEAR_FRACTION = 0.6
MAX_LEVEL = 10
PATHS = {
    "finite": (("eta0", "xi"), ("t", "xi"), ("eta0", "t"), ("t", "inf")),
    "inf": (("eta0", "xi"), ("inf", "xi"), ("eta0", "inf")),
}


class BoundaryTermError(DivergentIntegral):
    """The integral converges but the second-block identity does not apply."""


@dataclass(frozen=True)
class IntegralSpec:
    """sing: "finite" (w_{t'_i,k,h}) or "inf" (w_{inf,k,h}); i: sector index
    (and the singular point for finite sources); k, h zero based."""
    sing: str
    i: int
    k: int
    h: int
    nu1: complex
    nu2: complex
    path: tuple
    sign: int

    def __post_init__(self):
        if self.sing not in PATHS:
            raise ValueError(f"unknown source {self.sing!r}")
        if tuple(self.path) not in PATHS[self.sing]:
            raise ValueError(f"path {self.path} not available for source {self.sing}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "path", tuple(self.path))
        object.__setattr__(self, "nu1", complex(self.nu1))
        object.__setattr__(self, "nu2", complex(self.nu2))


@dataclass
class QuadratureResult:
    value: np.ndarray
    error_estimate: float
    nodes: int = 0
    meta: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# quadrature

def _log_logistic(u):
    """log(1/(1+exp(-u))) without overflow."""
    return -np.logaddexp(0.0, -u)


def quad_segment(integrand, a, b, endpoint_exponents=(0.0, 0.0), tol=1e-13,
                 max_level=MAX_LEVEL):
    """int_a^b s^alpha (1-s)^beta H dzeta along zeta = a + (b - a) s.

    integrand(s, sc) returns H at the parameters s and sc = 1 - s (both given
    so that points next to either end stay distinguishable); its values may
    be vectors, and alpha, beta may be per-component arrays.  Tanh-sinh rule
    with step halving until successive levels agree to tol.
    """
    al = np.atleast_1d(np.asarray(endpoint_exponents[0], dtype=complex))
    be = np.atleast_1d(np.asarray(endpoint_exponents[1], dtype=complex))
    worst = min(al.real.min(), be.real.min())
    if worst <= -1:
        raise DivergentIntegral(f"endpoint exponent with real part {worst:.4g} <= -1")
    tmax = math.asinh(45.0 / (PI * min(1.0, worst + 1)))
    scale = complex(b) - complex(a)

    def block(t):
        u = PI * np.sinh(t)
        ls, lc = _log_logistic(u), _log_logistic(-u)
        s, sc = np.exp(ls), np.exp(lc)
        H = np.asarray(integrand(s, sc), dtype=complex)
        if H.ndim == 1:
            H = H[:, None]
        w = np.exp((al + 1) * ls[:, None] + (be + 1) * lc[:, None]) * (PI * np.cosh(t))[:, None]
        return (w * H).sum(axis=0)

    h = 1.0
    t = np.arange(-math.floor(tmax), math.floor(tmax) + 1, dtype=float)
    S = h * block(t)
    nodes = t.size
    prev = S
    for level in range(1, max_level + 1):
        h /= 2
        j = np.arange(1, 2 * math.floor(tmax / h) + 2, 2)
        t = np.concatenate([-j[::-1], j]) * h
        t = t[np.abs(t) <= tmax]
        S = 0.5 * S + h * block(t)
        nodes += t.size
        diff = np.abs(S - prev).max()
        if level >= 3 and diff <= tol * max(np.abs(S).max(), 1e-300):
            return QuadratureResult(scale * S, abs(scale) * diff, nodes)
        prev = S
    raise NoConvergence(f"tanh-sinh not converged after {max_level} levels")


def _pow_window(z, e, center):
    """z**e with arg z taken in (center - pi, center + pi]; vectorized."""
    z = np.asarray(z, dtype=complex)
    th = np.angle(z)
    lo = center - PI
    th = th + TWO_PI * (np.floor((lo - th) / TWO_PI) + 1)
    return np.exp(complex(e) * (np.log(np.abs(z)) + 1j * th))


# --------------------------------------------------------------------------
# geometry and branch tables

def _mid(a, b):
    return 0.5 * (a + b)


def sector_args(frame, i, sign, xi):
    """(psi, chi) = (arg(xi - eta0), arg(xi - t'_i)) in the windows of the sector."""
    lo, hi = frame.sector_xi(i, sign)
    psi = arg_in_window(xi - frame.eta0, ArgWindow(lo, hi))
    th = frame.theta_prime[i]
    win = ArgWindow(th - PI, th) if sign < 0 else ArgWindow(th - TWO_PI, th - PI)
    chi = arg_in_window(xi - frame.tprime[i], win)
    return psi, chi


def branch_row(frame, i, sign, path, xi):
    """Central values of arg(xi - zeta), arg(zeta - eta0), arg(zeta - t'_i)
    along the path; each argument stays within pi of its central value."""
    psi, chi = sector_args(frame, i, sign, xi)
    th = frame.theta_prime[i]
    if sign < 0:
        phi = frame.phi_minus[i]
        rows = {
            ("eta0", "xi"): (psi, psi, _mid(th - PI, chi)),
            ("t", "xi"): (chi, _mid(psi, th), chi),
            ("eta0", "t"): (_mid(chi, psi), th, th - PI),
            ("t", "inf"): (_mid(th - PI, chi), th, th),
            ("inf", "xi"): (psi + PI, psi, None),
            ("eta0", "inf"): (_mid(psi, phi + PI), phi, None),
        }
    else:
        phi = frame.phi_plus[i]
        rows = {
            ("eta0", "xi"): (psi, psi, _mid(chi, th - PI)),
            ("t", "xi"): (chi, _mid(th, psi), chi),
            ("eta0", "t"): (_mid(psi - TWO_PI, chi), th, th - PI),
            ("t", "inf"): (_mid(chi, th - PI), th, th),
            ("inf", "xi"): (psi - PI, psi, None),
            ("eta0", "inf"): (_mid(phi - PI, psi), phi, None),
        }
    return rows[tuple(path)], psi, chi


# --------------------------------------------------------------------------
# the solution w along straight segments

def _dense(system, z0, Y0, z1, taus):
    """w at z0 + (z1 - z0) tau for the given taus (any order, in [0, 1])."""
    taus = np.asarray(taus, dtype=float)
    out = np.empty((taus.size, len(Y0)), dtype=complex)
    pos = taus > 0
    if pos.any():
        order = np.argsort(taus[pos])
        ts = taus[pos][order]
        uniq, inv = np.unique(ts, return_inverse=True)
        _, vals = dense_line(system, z0, Y0, z1, list(uniq))
        vals = np.array(vals)[inv]
        tmp = np.empty_like(vals)
        tmp[order] = vals
        out[pos] = tmp
    out[~pos] = Y0
    return out


def _carry(system, z0, Y0, z1):
    Y, _ = dense_line(system, z0, Y0, z1, [1.0])
    return Y


class SegmentW:
    """Values of w along zeta = a + (b - a) s.

    With a Frobenius expansion at an endpoint (end = 0 for a, 1 for b) the
    values returned are the series part phi = w / (zeta - t)^e, with
    arg(zeta - t) within pi of the centre arg; otherwise w itself, continued
    from a known value at one end.
    """

    def __init__(self, system, a, b, expansion=None, end=0, arg=None, value=None):
        self.system = system
        self.a, self.b = complex(a), complex(b)
        self.exp = expansion
        self.end = end
        self.arg = arg
        L = abs(self.b - self.a)
        if expansion is not None:
            t = expansion.center
            self.t = t
            self.s0 = min(1.0, NEAR_FRACTION * expansion.radius / L)
            if self.s0 < 1.0:
                z0 = complex(self._z(self.s0 if end == 0 else 1 - self.s0,
                                     self.s0 if end else 1 - self.s0))
                phi = expansion.series(z0 - t)[0]
                self.z0 = z0
                self.Y0 = _pow_window(z0 - t, expansion.exponent, arg) * phi
        else:
            self.z0 = self.a if end == 0 else self.b
            self.Y0 = np.asarray(value, dtype=complex)

    def _z(self, s, sc):
        s, sc = np.asarray(s), np.asarray(sc)
        return np.where(s <= 0.5, self.a + (self.b - self.a) * s, self.b - (self.b - self.a) * sc)

    def end_value(self):
        """w at the end of the segment opposite to the known one."""
        far = self.b if self.end == 0 else self.a
        if self.exp is not None and self.s0 >= 1.0:
            phi = self.exp.series(far - self.t)[0]
            return _pow_window(far - self.t, self.exp.exponent, self.arg) * phi
        return _carry(self.system, self.z0, self.Y0, far)

    def __call__(self, s, sc):
        s, sc = np.asarray(s, dtype=float), np.asarray(sc, dtype=float)
        z = self._z(s, sc)
        n = self.system.rank
        out = np.empty((s.size, n), dtype=complex)
        if self.exp is None:
            d = s if self.end == 0 else sc
            far = self.b if self.end == 0 else self.a
            out[:] = _dense(self.system, self.z0, self.Y0, far, d)
            return out
        d = s if self.end == 0 else sc          # distance parameter from the singular end
        near = d <= self.s0
        if near.any():
            base = (self.b - self.t) if self.end == 0 else (self.a - self.t)
            out[near] = self.exp.series_many(base * d[near])
        if (~near).any():
            far = self.b if self.end == 0 else self.a
            taus = (d[~near] - self.s0) / (1 - self.s0)
            w = _dense(self.system, self.z0, self.Y0, far, taus)
            out[~near] = w / _pow_window(z[~near] - self.t, self.exp.exponent, self.arg)[:, None]
        return out


# --------------------------------------------------------------------------
# W

def _conditions(ispec, spec, lam, mu_list, mode):
    nu1, nu2 = ispec.nu1, ispec.nu2
    ends = set(ispec.path)
    lemma = mode == "lemma"
    if "xi" in ends:
        if nu1.real <= -1:
            raise DivergentIntegral(f"Re nu1 = {nu1.real:.4g} <= -1 at the endpoint xi")
        if lemma and nu1.real <= 0:
            raise BoundaryTermError("Re nu1 <= 0: boundary term at xi does not vanish")
    if "eta0" in ends and nu2.real >= 0:
        raise DivergentIntegral(f"Re(-nu2-1) = {-nu2.real - 1:.4g} <= -1 at the endpoint eta0")
    if "t" in ends and (lam - nu1).real <= 0:
        raise DivergentIntegral(f"Re(lambda-nu1-1) = {(lam - nu1).real - 1:.4g} <= -1 at t'_i")
    if "inf" in ends:
        for m in mu_list:
            d = (m - nu2).real
            if d >= 1:
                raise DivergentIntegral(f"Re(mu-nu2) = {d:.4g} >= 1: no decay at infinity")
            if lemma and d >= 0:
                raise BoundaryTermError("Re(mu-nu2) >= 0: boundary term at infinity does not vanish")


def _label_index(basis, label):
    return basis.labels.index(label)


class _Context:
    """Underlying system and local bases at rho = -nu1 - 1."""

    def __init__(self, spec, frame, nu1):
        self.rho = -complex(nu1) - 1
        self.inf = standard_basis("underlying", spec, frame, self.rho, sing="inf")
        self.system = self.inf.system
        self._fin = {}
        self.spec, self.frame = spec, frame

    def finite(self, i):
        if i not in self._fin:
            self._fin[i] = standard_basis("underlying", self.spec, self.frame, self.rho,
                                          sing=i, system=self.system)
        return self._fin[i]


def _far_radius(frame, xi=None):
    R = 2.0 * frame.radius_prime_inf()
    if xi is not None:
        R = max(R, 1.5 * abs(xi - frame.eta0))
    return R


def _inf_values(ctx, cols, z, arg):
    """Columns of the basis at infinity evaluated at z with arg(z - eta0) = arg."""
    out = []
    for c in cols:
        e = ctx.inf.expansions[c]
        y = z - e.anchor
        out.append(cpow(y, -e.exponent, arg) * e.series(1.0 / y)[0])
    return np.array(out).T


def _finite_piece(ctx, spec, frame, a, b, row, xi, nu1, nu2, wfun, wexp, tol):
    """Finite segment a -> b; returns the integrals of K w and K (zeta - T') w."""
    eta0 = frame.eta0
    Tp = ctx.system.T_diag
    al, be = 0j, 0j
    consts = cpow(xi - eta0, -nu1, row[-1])
    factors = [(xi - a, xi - b, nu1, row[0]), (a - eta0, b - eta0, -nu2 - 1, row[1])]
    if wexp is not None:
        t, e = wexp
        factors.append((a - t, b - t, e, row[2]))
    varying = []
    for za, zb, e, c in factors:
        if abs(za) == 0:
            al += e
            consts *= _pow_window(zb, e, c)
        elif abs(zb) == 0:
            be += e
            consts *= _pow_window(za, e, c)
        else:
            varying.append((za, zb, e, c))

    def H(s, sc):
        vals = np.ones(s.size, dtype=complex)
        for za, zb, e, c in varying:
            z = np.where(s <= 0.5, za + (zb - za) * s, zb - (zb - za) * sc)
            vals = vals * _pow_window(z, e, c)
        w = wfun(s, sc)
        zeta = np.where(s <= 0.5, a + (b - a) * s, b - (b - a) * sc)
        w2 = (zeta[:, None] - Tp[None, :]) * w
        return vals[:, None] * np.concatenate([w, w2], axis=1)

    res = quad_segment(H, a, b, (al, be), tol)
    return consts * res.value, abs(consts) * res.error_estimate, res.nodes


def _tail_piece(ctx, spec, frame, zR, omega, xi, nu1, nu2, cols, coeffs, row, tol, direction,
               second=True):
    """int from zR to infinity (direction=+1) or from infinity to zR (-1) along
    the ray arg(zeta - eta0) = omega, for w = sum_c coeffs[c] w_inf,c."""
    eta0 = frame.eta0
    Tp = ctx.system.T_diag
    n = spec.n
    D = zR - eta0
    total = np.zeros(2 * n, dtype=complex)
    err = 0.0
    nodes = 0
    cxi = cpow(xi - eta0, -nu1, row[-1])
    for c, coef in zip(cols, coeffs):
        if coef == 0:
            continue
        e = ctx.inf.expansions[c]
        ew = -e.exponent                     # w_inf,c = (zeta - eta0)^ew * series
        const = (cxi * cpow(D, -nu2 - 1, omega) * cpow(D, ew, omega) * D)
        a1 = -nu1 + (nu2 + 1) - ew - 2
        alpha = np.array([a1] * n + [a1 - 1] * n) if second else np.full(n, a1)

        def H(tau, tc, e=e):
            N = tau * (xi - eta0) - D
            k1 = _pow_window(N, nu1, row[0])
            ser = e.series_many(tau / D)
            w2 = (D - tau[:, None] * (Tp[None, :] - eta0)) * ser
            if not second:
                return k1[:, None] * ser
            return k1[:, None] * np.concatenate([ser, w2], axis=1)

        res = quad_segment(H, 0.0, 1.0, (alpha, 0.0), tol)
        total[:res.value.size] += coef * const * res.value
        err += abs(coef * const) * res.error_estimate
        nodes += res.nodes
    return direction * total, err, nodes


def _integrals(ispec, xi, spec, frame, tol, ctx=None, second=True):
    """(I1, I2, err, nodes): int K w and int K (zeta - T') w along the path;
    the tails towards infinity skip I2 when second is False."""
    nu1, nu2 = ispec.nu1, ispec.nu2
    ctx = _Context(spec, frame, nu1) if ctx is None else ctx
    i = ispec.i
    eta0 = frame.eta0
    row, psi, chi = branch_row(frame, i, ispec.sign, ispec.path, xi)
    row = tuple(row) + (psi,)
    n = spec.n
    path = ispec.path
    pieces = []
    if ispec.sing == "finite":
        basis = ctx.finite(i)
        col = _label_index(basis, f"w_t'{i+1},{ispec.k+1},{ispec.h+1}")
        exp = basis.expansions[col]
        t = frame.tprime[i]
        th = frame.theta_prime[i]
        e = exp.exponent
        if path == ("eta0", "xi"):
            r = min(NEAR_FRACTION * exp.radius, 0.5 * abs(t - eta0))
            z0 = t + r * cmath.exp(1j * (th - PI))
            Y0 = cpow(z0 - t, e, th - PI) * exp.series(z0 - t)[0]
            Yeta = _carry(ctx.system, z0, Y0, eta0)
            wf = SegmentW(ctx.system, eta0, xi, value=Yeta, end=0)
            pieces.append(_finite_piece(ctx, spec, frame, eta0, xi, row, xi, nu1, nu2, wf, None, tol))
        elif path == ("t", "xi"):
            wf = SegmentW(ctx.system, t, xi, exp, end=0, arg=row[2])
            pieces.append(_finite_piece(ctx, spec, frame, t, xi, row, xi, nu1, nu2, wf, (t, e), tol))
        elif path == ("eta0", "t"):
            wf = SegmentW(ctx.system, eta0, t, exp, end=1, arg=row[2])
            pieces.append(_finite_piece(ctx, spec, frame, eta0, t, row, xi, nu1, nu2, wf, (t, e), tol))
        else:  # ("t", "inf")
            R = _far_radius(frame)
            zR = eta0 + R * cmath.exp(1j * th)
            wf = SegmentW(ctx.system, t, zR, exp, end=0, arg=row[2])
            pieces.append(_finite_piece(ctx, spec, frame, t, zR, row, xi, nu1, nu2, wf, (t, e), tol))
            cols = list(range(ctx.inf.n_singular))
            WR = _inf_values(ctx, cols, zR, th)
            coeffs = np.linalg.solve(WR, wf.end_value())
            pieces.append(_tail_piece(ctx, spec, frame, zR, th, xi, nu1, nu2, cols, coeffs,
                                      row, tol, +1, second))
    else:
        col = _label_index(ctx.inf, f"w_inf,{ispec.k+1},{ispec.h+1}")
        omega = row[1]
        R = _far_radius(frame, xi)
        zR = eta0 + R * cmath.exp(1j * omega)
        YR = _inf_values(ctx, [col], zR, omega)[:, 0]
        if path == ("eta0", "xi"):
            Yxi = _carry(ctx.system, zR, YR, xi)
            wf = SegmentW(ctx.system, eta0, xi, value=Yxi, end=1)
            pieces.append(_finite_piece(ctx, spec, frame, eta0, xi, row, xi, nu1, nu2, wf, None, tol))
        elif path == ("inf", "xi"):
            pieces.append(_tail_piece(ctx, spec, frame, zR, omega, xi, nu1, nu2, [col], [1.0],
                                      row, tol, -1, second))
            wf = SegmentW(ctx.system, zR, xi, value=YR, end=0)
            pieces.append(_finite_piece(ctx, spec, frame, zR, xi, row, xi, nu1, nu2, wf, None, tol))
        else:  # ("eta0", "inf")
            wf = SegmentW(ctx.system, eta0, zR, value=YR, end=1)
            pieces.append(_finite_piece(ctx, spec, frame, eta0, zR, row, xi, nu1, nu2, wf, None, tol))
            pieces.append(_tail_piece(ctx, spec, frame, zR, omega, xi, nu1, nu2, [col], [1.0],
                                      row, tol, +1, second))
    tot = sum(p[0] for p in pieces)
    return tot[:n], tot[n:], sum(p[1] for p in pieces), sum(p[2] for p in pieces)


def _lam_mu(ispec, spec):
    if ispec.sing == "finite":
        lam = spec.lam[ispec.i][ispec.k][0]
        mus = [m for m, _ in spec.mu] if "inf" in ispec.path else []
    else:
        lam = None
        mus = [spec.mu[ispec.k][0]]
    return lam, mus


def eval_W(ispec, xi, spec, frame, tol=1e-12, mode="lemma", ctx=None):
    """The 2n-vector W^{<S'sign_i; ab>}_{sing,k,h}(nu1, nu2; xi)."""
    xi = complex(xi)
    lam, mus = _lam_mu(ispec, spec)
    _conditions(ispec, spec, lam, mus, mode)
    n = spec.n
    eta0 = frame.eta0
    Tp = np.array([t for t, m in zip(frame.tprime, spec.sizes) for _ in range(m)])
    I1, I2, err, nodes = _integrals(ispec, xi, spec, frame, tol, ctx, mode == "lemma")
    top = (eta0 - Tp) * I1
    if mode == "lemma":
        bottom = (ispec.nu2 - np.diag(spec.Aprime)) * np.linalg.solve(spec.P, I2)
    elif mode == "direct":
        bottom = np.linalg.solve(spec.P, _M_direct(ispec, xi, spec, frame, tol, I1, ctx))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return QuadratureResult(np.concatenate([top, bottom]), err, nodes, {"mode": mode})


def _derivative_radius(frame, i, sign, xi):
    """Radius of a circle about xi that stays inside the sector and inside
    the window of arg(xi - t'_i)."""
    lo, hi = frame.sector_xi(i, sign)
    psi, chi = sector_args(frame, i, sign, xi)
    th = frame.theta_prime[i]
    clo, chi_hi = (th - PI, th) if sign < 0 else (th - TWO_PI, th - PI)
    d_eta = abs(xi - frame.eta0)
    d_t = abs(xi - frame.tprime[i])
    r = [d_eta, d_t] + [abs(xi - t) for t in frame.tprime]
    r.append(d_eta * math.sin(min(psi - lo, hi - psi, PI / 2)))
    r.append(d_t * math.sin(min(chi - clo, chi_hi - chi, PI / 2)))
    return 0.5 * min(r)


def _M_direct(ispec, xi, spec, frame, tol, v0, ctx=None, nodes=32):
    """M_eta0 v = -(xi - eta0)(xi - T') v' - A (eta0 - T') v, with v' from the
    trapezoidal rule on a circle about xi (Cauchy's formula)."""
    eta0 = frame.eta0
    Tp = np.array([t for t, m in zip(frame.tprime, spec.sizes) for _ in range(m)])
    r = _derivative_radius(frame, ispec.i, ispec.sign, xi)
    dv = 0
    for j in range(nodes):
        e = cmath.exp(2j * PI * j / nodes)
        dv = dv + _integrals(ispec, xi + r * e, spec, frame, tol, ctx, False)[0] / e
    dv = dv / (nodes * r)
    return -(xi - eta0) * (xi - Tp) * dv - spec.A @ ((eta0 - Tp) * v0)


# --------------------------------------------------------------------------
# V

def v_factor(ispec, spec):
    """The Gamma prefactor turning W into V; only four path families have one."""
    nu1, nu2, s = ispec.nu1, ispec.nu2, ispec.sign
    path = ispec.path
    if ispec.sing == "finite":
        lam = spec.lam[ispec.i][ispec.k][0]
        if path == ("t", "xi"):
            return -gamma_ratio([lam + 1], [nu1 + 1, lam - nu1])
        if path == ("eta0", "t"):
            return cmath.exp(s * 1j * PI * nu1) * gamma_ratio([-nu1], [lam - nu1, -lam])
    else:
        mu = spec.mu[ispec.k][0]
        if path == ("inf", "xi"):
            return (-cmath.exp(s * 1j * PI * nu1)
                    * gamma_ratio([nu1 + nu2 - mu + 1], [nu1 + 1, nu2 - mu + 1]))
        if path == ("eta0", "inf"):
            return gamma_ratio([-nu1], [mu - nu1 - nu2, nu2 - mu + 1])
    raise ValueError(f"no V normalization for {ispec.sing} path {path}")


def eval_V(ispec, xi, spec, frame, tol=1e-12, mode="lemma"):
    f = v_factor(ispec, spec)
    W = eval_W(ispec, xi, spec, frame, tol, mode)
    return QuadratureResult(f * W.value, abs(f) * W.error_estimate, W.nodes, W.meta)


# --------------------------------------------------------------------------
# relations

def default_xi(frame, i, sign, fraction=0.5):
    """A point of S'^sign_i at the sector's working angle."""
    from .branches import sector_angle
    lo, hi = frame.sector_xi(i, sign)
    psi = sector_angle(lo, hi)
    return frame.eta0 + fraction * abs(frame.tprime[i] - frame.eta0) * cmath.exp(1j * psi)


def _rel(a, b):
    den = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    return float(np.abs(a - b).max() / den)


def w_at_eta0(spec, frame, i, k, h, rho):
    """w_{t'_i,k,h}(rho; eta0) continued radially inside the plane cut beyond the t'_j."""
    basis = standard_basis("underlying", spec, frame, rho, sing=i)
    exp = basis.expansions[_label_index(basis, f"w_t'{i+1},{k+1},{h+1}")]
    t, th = frame.tprime[i], frame.theta_prime[i]
    r = min(NEAR_FRACTION * exp.radius, 0.5 * abs(t - frame.eta0))
    z0 = t + r * cmath.exp(1j * (th - PI))
    Y0 = cpow(z0 - t, exp.exponent, th - PI) * exp.series(z0 - t)[0]
    return _carry(basis.system, z0, Y0, frame.eta0)


def richardson(f, r):
    """Limit at 0 of f from f(r), f(r/2), f(r/4), removing the O(r) and O(r^2) terms."""
    f1, f2, f4 = f(r), f(r / 2), f(r / 4)
    return (8 * f4 - 6 * f2 + f1) / 3


def check_relation(rel, params, tol=1e-8):
    """Residual report for one relation.

    rel: "cauchy_minus", "cauchy_plus", "swap_symmetry", "euler_transform",
    "asymptotic", "sin_identity".  params holds spec, frame, i, k, h, nu1,
    nu2, xi (optional), source ("finite" or "inf"), and per relation: family
    (swap_symmetry), id (asymptotic), rho, rho_prime, zeta (euler_transform).
    """
    p = dict(params)
    rep = Report(f"euler-check:{rel}")
    if rel == "sin_identity":
        v = sin_identity(p["nu1"], p["nu2"])
        rep.compare("sin_identity", v, 1.0, tol)
        return rep
    spec, frame = p["spec"], p["frame"]
    i, k, h = p.get("i", 0), p.get("k", 0), p.get("h", 0)
    if rel in ("cauchy_minus", "cauchy_plus"):
        sign = -1 if rel == "cauchy_minus" else 1
        src = p.get("source", "finite")
        xi = p.get("xi") or default_xi(frame, i, sign)
        nu1, nu2 = p["nu1"], p["nu2"]
        mk = lambda path: IntegralSpec(src, i, k, h, nu1, nu2, path, sign)
        ctx = _Context(spec, frame, nu1)
        if src == "finite":
            A = eval_W(mk(("eta0", "xi")), xi, spec, frame, ctx=ctx).value
            B = eval_W(mk(("t", "xi")), xi, spec, frame, ctx=ctx).value
            C = eval_W(mk(("eta0", "t")), xi, spec, frame, ctx=ctx).value
            if sign > 0:
                A = cmath.exp(-2j * PI * complex(nu1)) * A
        else:
            A = eval_W(mk(("eta0", "xi")), xi, spec, frame, ctx=ctx).value
            B = eval_W(mk(("inf", "xi")), xi, spec, frame, ctx=ctx).value
            C = eval_W(mk(("eta0", "inf")), xi, spec, frame, ctx=ctx).value
        res = A - B - C
        scale = max(np.abs(A).max(), np.abs(B).max(), np.abs(C).max())
        r = float(np.abs(res).max() / scale)
        rep.add(f"{rel}[{src},i={i+1},k={k+1},h={h+1}]", complex(np.abs(res).max()), 0j,
                float(np.abs(res).max()), r, r <= tol)
        return rep
    if rel == "swap_symmetry":
        fam = tuple(p["family"])
        src = "finite" if "t" in fam else "inf"
        sign = p.get("sign", -1)
        xi = p.get("xi") or default_xi(frame, i, sign)
        nu1, nu2 = p["nu1"], p["nu2"]
        V12 = eval_V(IntegralSpec(src, i, k, h, nu1, nu2, fam, sign), xi, spec, frame).value
        V21 = eval_V(IntegralSpec(src, i, k, h, nu2, nu1, fam, sign), xi, spec, frame).value
        r = _rel(V12, V21)
        rep.add(f"swap[{src},{fam[0]}-{fam[1]},S'{'+' if sign > 0 else '-'}]",
                complex(np.abs(V12 - V21).max()), 0j, float(np.abs(V12 - V21).max()), r, r <= tol)
        return rep
    if rel == "euler_transform":
        r_ = euler_transform_residual(spec, frame, i, k, h, p["rho"], p["rho_prime"], p.get("zeta"))
        rep.add(f"euler_transform[i={i+1},k={k+1},h={h+1}]", r_, 0.0, r_, r_, r_ <= tol)
        return rep
    if rel == "asymptotic":
        got, want = asymptotic_coefficient(p["id"], p)
        r = _rel(got, want)
        rep.add(f"asymptotic[{p['id']}]", complex(got[np.abs(want).argmax()]),
                complex(want[np.abs(want).argmax()]), float(np.abs(got - want).max()), r, r <= tol)
        return rep
    raise ValueError(f"unknown relation {rel!r}")


def euler_transform_residual(spec, frame, i, k, h, rho, rho_p, zeta=None, tol=1e-12):
    """Relative residual of the Euler transform from w(rho') to w(rho) at zeta."""
    rho, rho_p = complex(rho), complex(rho_p)
    lam = spec.lam[i][k][0]
    if (rho_p + lam).real <= -1 or (rho - rho_p).real <= 0:
        raise DivergentIntegral("Euler transform needs Re(rho'+lambda) > -1 and Re(rho-rho') > 0")
    lab = f"w_t'{i+1},{k+1},{h+1}"
    bp = standard_basis("underlying", spec, frame, rho_p, sing=i)
    b = standard_basis("underlying", spec, frame, rho, sing=i)
    ep = bp.expansions[_label_index(bp, lab)]
    e = b.expansions[_label_index(b, lab)]
    t, th = frame.tprime[i], frame.theta_prime[i]
    if zeta is None:
        r = min(ep.radius, max(1.0, abs(t - frame.eta0)))
        zeta = t + 0.5 * r * cmath.exp(1j * (th - 0.75 * PI))
    win = ArgWindow(th - TWO_PI, th)
    arg = arg_in_window(zeta - t, win)
    wf = SegmentW(bp.system, t, zeta, ep, end=0, arg=arg)
    d = zeta - t
    c = cpow(d, rho_p + lam, arg) * cpow(d, rho - rho_p - 1, arg)

    def H(s, sc):
        return wf(s, sc)

    res = quad_segment(H, t, zeta, (rho_p + lam, rho - rho_p - 1), tol)
    lhs = gamma_ratio([rho + lam + 1], [rho - rho_p, rho_p + lam + 1]) * c * res.value
    rhs = e.evaluate(zeta, win)[0]
    return _rel(lhs, rhs)


def asymptotic_coefficient(ident, p):
    """(extrapolated, predicted) leading coefficients for one asymptotic law.

    ident: "W_eta0xi_t'i" (xi -> eta0), "W_xi_t'i" (xi -> t'_i),
    "W_xi_inf" (xi -> infinity).
    """
    spec, frame = p["spec"], p["frame"]
    i, k, h = p.get("i", 0), p.get("k", 0), p.get("h", 0)
    sign = p.get("sign", -1)
    nu1, nu2 = complex(p["nu1"]), complex(p["nu2"])
    eta0 = frame.eta0
    n = spec.n
    lo, hi = frame.sector_xi(i, sign)
    from .branches import sector_angle
    psi = sector_angle(lo, hi)
    u = cmath.exp(1j * psi)
    ctx = _Context(spec, frame, nu1)
    Tp = np.array([t for t, m in zip(frame.tprime, spec.sizes) for _ in range(m)])
    if ident == "W_eta0xi_t'i":
        isp = IntegralSpec("finite", i, k, h, nu1, nu2, ("eta0", "xi"), sign)

        def f(r):
            xi = eta0 + r * u
            return eval_W(isp, xi, spec, frame, ctx=ctx).value * cpow(xi - eta0, nu2, psi)

        r0 = p.get("r", 0.02 * abs(frame.tprime[i] - eta0))
        got = richardson(f, r0)
        w0 = w_at_eta0(spec, frame, i, k, h, -nu1 - 1)
        g = np.linalg.solve(spec.P, (eta0 - Tp) * w0)
        want = gamma_ratio([nu1 + 1, -nu2], [nu1 - nu2 + 1]) * np.concatenate(
            [spec.P @ g, (nu2 - np.diag(spec.Aprime)) * g])
        return got, want
    if ident == "W_xi_t'i":
        isp = IntegralSpec("finite", i, k, h, nu1, nu2, ("t", "xi"), sign)
        t, th = frame.tprime[i], frame.theta_prime[i]
        lam = spec.lam[i][k][0]
        # approach t'_i along the ray from t'_i towards the working point of the sector
        d = default_xi(frame, i, sign) - t
        v = d / abs(d)
        chi_win = ArgWindow(th - PI, th) if sign < 0 else ArgWindow(th - TWO_PI, th - PI)
        chi = arg_in_window(v, chi_win)

        def f(r):
            xi = t + r * v
            return eval_W(isp, xi, spec, frame, ctx=ctx).value / cpow(r * v, lam, chi)

        r0 = p.get("r", 0.01 * frame.radius_prime(i))
        got = richardson(f, r0)
        want = np.zeros(2 * n, dtype=complex)
        want[spec.lam_index(i, k) + h] = -(cpow(t - eta0, -nu1 - nu2, th)
                                           * gamma_ratio([nu1 + 1, lam - nu1], [lam + 1]))
        return got, want
    if ident == "W_xi_inf":
        isp = IntegralSpec("inf", i, k, h, nu1, nu2, ("inf", "xi"), sign)
        mu = spec.mu[k][0]

        def f(r):
            xi = eta0 + u / r
            return eval_W(isp, xi, spec, frame, ctx=ctx).value / cpow(xi - eta0, mu - nu1 - nu2, psi)

        r0 = p.get("r", 0.02 / frame.radius_prime_inf())
        got = richardson(f, r0)
        want = np.zeros(2 * n, dtype=complex)
        want[n + spec.mu_index(k) + h] = (-cmath.exp(-sign * 1j * PI * nu1)
                                          * gamma_ratio([nu1 + 1, nu2 - mu + 1], [nu1 + nu2 - mu + 1]))
        return got, want
    raise ValueError(f"unknown asymptotic law {ident!r}")


def ode_residual(ispec, xi, spec, frame, nodes=32):
    """Relative residual of dW/dxi = coefficient * W, with dW/dxi from the
    trapezoidal rule on a circle about xi."""
    n = spec.n
    eta0 = frame.eta0
    Tp = np.array([t for t, m in zip(frame.tprime, spec.sizes) for _ in range(m)])
    nu1, nu2 = ispec.nu1, ispec.nu2
    Ap = np.diag(spec.Aprime)
    big = np.block([[spec.A, spec.P],
                    [-(np.diag(Ap - nu1) @ np.diag(Ap - nu2)) @ np.linalg.inv(spec.P),
                     np.diag(nu1 + nu2 - Ap)]])
    r = _derivative_radius(frame, ispec.i, ispec.sign, xi)
    ctx = _Context(spec, frame, nu1)
    W0 = eval_W(ispec, xi, spec, frame, ctx=ctx).value
    dW = 0
    for j in range(nodes):
        e = cmath.exp(2j * PI * j / nodes)
        dW = dW + eval_W(ispec, xi + r * e, spec, frame, ctx=ctx).value / e
    dW = dW / (nodes * r)
    D = np.zeros((2 * n, 2 * n), dtype=complex)
    D[:n, :n] = np.diag(1.0 / (xi - Tp))
    rhs = (D - np.eye(2 * n) / (xi - eta0)) @ big @ W0
    return float(np.abs(dW - rhs).max() / np.abs(rhs).max())


# --------------------------------------------------------------------------
# verification suite

EULER_NU = {
    "finite": (0.2 + 0.05j, -0.4 + 0.1j),
    "inf": (0.2 + 0.05j, -0.15 + 0.1j),
}
SWAP_NU = {
    ("t", "xi"): (0.2 + 0.05j, 0.35 - 0.1j),
    ("eta0", "t"): (-0.2 + 0.05j, -0.45 - 0.1j),
    ("inf", "xi"): (0.2 + 0.05j, 0.35 - 0.1j),
    ("eta0", "inf"): (-0.1 + 0.05j, -0.2 - 0.1j),
}


def suite_euler(spec=None, frame=None, tol=1e-8):
    """Relations of the Euler integrals on a system with convergent windows
    for every path (default: instances.euler_instance()), plus scalar checks
    on the Gauss system."""
    from .instances import euler_instance, gauss_spec
    from .model import build_frame
    t0 = time.perf_counter()
    if spec is None:
        spec = euler_instance()
        frame = build_frame(spec)
    rep = Report("verify:euler")
    rep.meta["instance"] = "designed n=2" if spec.n == 2 else f"n={spec.n}"
    base = dict(spec=spec, frame=frame, k=0, h=0)
    for rel in ("cauchy_minus", "cauchy_plus"):
        for src, nu in EULER_NU.items():
            for i in range(spec.p):
                k = 0 if src == "finite" else _first_mu_below(spec, nu[1])
                p = dict(base, i=i, k=k, nu1=nu[0], nu2=nu[1], source=src)
                rep.extend(check_relation(rel, p, tol))
    for fam, nu in SWAP_NU.items():
        for sign in (-1, 1):
            k = 0 if "t" in fam else _first_mu_below(spec, max(nu, key=lambda z: -z.real))
            rep.extend(check_relation("swap_symmetry", dict(base, i=0, k=k, family=fam,
                                                            nu1=nu[0], nu2=nu[1], sign=sign), tol))
    for i in range(spec.p):
        rep.extend(check_relation("euler_transform", dict(base, i=i, rho=0.3 + 0.1j,
                                                          rho_prime=-0.2 + 0.05j), 1e-7))
    for ident, src in (("W_eta0xi_t'i", "finite"), ("W_xi_t'i", "finite"), ("W_xi_inf", "inf")):
        nu = EULER_NU[src]
        k = 0 if src == "finite" else _first_mu_below(spec, nu[1])
        for sign in (-1, 1):
            r = check_relation("asymptotic", dict(base, i=0, k=k, id=ident, nu1=nu[0],
                                                  nu2=nu[1], sign=sign), 1e-5)
            r.entries[-1].name += f"(S'{'+' if sign > 0 else '-'})"
            rep.extend(r)
    rep.extend(check_relation("sin_identity", dict(nu1=0.3, nu2=-0.7 + 0.2j), 1e-13))
    # the integrals satisfy the rank-2n system in xi
    for path, nu in ((("eta0", "xi"), EULER_NU["finite"]), (("t", "xi"), EULER_NU["finite"]),
                     (("t", "inf"), (0.2 + 0.05j, 1.5 + 0.1j))):
        isp = IntegralSpec("finite", 0, 0, 0, nu[0], nu[1], path, -1)
        for frac in (0.3, 0.5, 0.8):
            r = ode_residual(isp, default_xi(frame, 0, -1, frac), spec, frame)
            rep.add(f"ode[{path[0]}-{path[1]},xi@{frac}]", r, 0.0, r, r, r <= 1e-6)
    # second block: boundary-term identity against Cauchy-formula derivative
    isp = IntegralSpec("finite", 0, 0, 0, *EULER_NU["finite"], ("t", "xi"), -1)
    xi = default_xi(frame, 0, -1)
    a = eval_W(isp, xi, spec, frame).value
    b = eval_W(isp, xi, spec, frame, mode="direct").value
    r = _rel(a, b)
    rep.add("second_block[lemma vs direct]", r, 0.0, r, r, r <= 1e-7)
    rep.extend(vanishing_report(spec, frame, tol))
    # scalar case
    g = gauss_spec(0.3, 0.45, 0.7)
    gf = build_frame(g)
    r = check_relation("cauchy_minus", dict(spec=g, frame=gf, i=0, nu1=0.15 + 0.02j,
                                            nu2=-0.4 + 0.1j), tol)
    r.entries[-1].name = "scalar:" + r.entries[-1].name
    rep.extend(r)
    r = euler_transform_residual(g, gf, 0, 0, 0, 0.3 + 0.1j, -0.2 + 0.05j)
    rep.add("scalar:euler_transform", r, 0.0, r, r, r <= 1e-9)
    rep.timing["seconds"] = time.perf_counter() - t0
    return rep


def _first_mu_below(spec, nu2):
    """Index of an eigenvalue mu_k with Re mu_k < Re nu2 (tail converges with
    vanishing boundary term)."""
    for k, (m, _) in enumerate(spec.mu):
        if m.real < complex(nu2).real:
            return k
    raise DivergentIntegral("no mu_k with Re mu_k < Re nu2")


def vanishing_report(spec, frame, tol=1e-8):
    """Components n + mu_index(l) .. of W vanish for nu1 = mu_l or nu2 = mu_l."""
    rep = Report("euler:vanishing")
    xi = default_xi(frame, 0, -1)
    n = spec.n
    for l, (mu, ml) in enumerate(spec.mu):
        if not -1 < mu.real < 0:
            continue
        comps = slice(n + spec.mu_index(l), n + spec.mu_index(l) + ml)
        cases = [("finite", 0, p, mu, -0.4 + 0.1j) for p in PATHS["finite"][:3]]
        cases += [("finite", 0, p, 0.2 + 0.1j, mu) for p in PATHS["finite"][:3]]
        for src, k, path, n1, n2 in cases:
            for mode in ("lemma", "direct"):
                isp = IntegralSpec(src, 0, k, 0, n1, n2, path, -1)
                try:
                    W = eval_W(isp, xi, spec, frame, mode=mode).value
                except BoundaryTermError:
                    continue
                r = float(np.abs(W[comps]).max() / np.abs(W).max())
                which = "nu1" if n1 == mu else "nu2"
                rep.add(f"vanish[{which}=mu_{l+1},{path[0]}-{path[1]},{mode}]", r, 0.0, r, r,
                        r <= tol)
    return rep
