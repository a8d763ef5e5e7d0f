"""Connection coefficients: numerical measurement and closed-form prediction.

Numerically, a source basis is evaluated near its singular point, carried
along a planned path and expanded in the target basis at a matching point.
The predictions express the rank-2n coefficients through data of the
underlying rank-n system: its connection coefficients at rho = 0 and the
vectors gamma = P^-1 (eta0 - T') w(rho; eta0).
"""

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import branches as br
from .continuation import AnalyticElement, continue_matrix, monodromy, plan_path
from .errors import IllConditioned, MissingInput, OkuboError
from .local import normalized_coeff, standard_basis
from .model import (build_big, build_frame, build_underlying, reduce, riemann_scheme,
                    specialize)
from .numerics import gamma_ratio
from .report import Report

PI = math.pi
COND_MAX = 1e10


@dataclass
class Route:
    source_point: complex
    source_window: object
    target_point: complex
    target_window: object
    plan: object
    note: str = ""


@dataclass
class ConnectionTable:
    source_labels: list
    target_labels: list
    hol_labels: list
    C: np.ndarray              # target singular solutions x source solutions
    C_hol: np.ndarray          # target holomorphic solutions x source solutions
    point: complex = None
    residual: float = 0.0
    cond: float = 0.0
    context: str = ""

    @property
    def scale(self):
        return float(np.abs(self.C).max()) if self.C.size else 0.0


def connect_numeric(system, source, target, frame, context, tol=1e-11):
    """Express the singular solutions of the source basis in the target basis.

    context: iterable of Route candidates; the first with a well conditioned
    target fundamental matrix is used.
    """
    last = None
    for route in context:
        W0, _ = source.evaluate(route.source_point, route.source_window)
        W0 = W0[:, : source.n_singular]
        el = AnalyticElement(route.source_point, W0, system)
        el = continue_matrix(system, el, route.plan, tol)
        Wt, _ = target.evaluate(route.target_point, route.target_window)
        cond = np.linalg.cond(Wt)
        if not cond <= COND_MAX:
            last = cond
            continue
        C = np.linalg.solve(Wt, el.value)
        res = np.linalg.norm(el.value - Wt @ C) / np.linalg.norm(el.value)
        ns = target.n_singular
        return ConnectionTable(source.labels[: source.n_singular], target.labels[:ns],
                               target.labels[ns:], C[:ns], C[ns:], route.target_point,
                               float(res), float(cond), route.note)
    raise IllConditioned(f"target fundamental matrix condition {last}")


# --------------------------------------------------------------------------
# routes

def _r_under(frame, i):
    return min(0.25 * frame.radius_prime(i), 0.5 * abs(frame.tprime[i] - frame.eta0))


def routes_underlying_finite(frame, i, nu, tries=5):
    """t'_i -> t'_nu in the plane cut along the rays beyond the t'_k."""
    tp = frame.tprime
    zs = tp[i] + _r_under(frame, i) * cmath.exp(1j * (frame.theta_prime[i] - PI))
    for k in range(tries):
        beta = br.ROTATE * ((k + 1) // 2) * (1 if k % 2 else -1)
        zt = tp[nu] + _r_under(frame, nu) * cmath.exp(1j * (frame.theta_prime[nu] - PI + beta))
        plan = plan_path(frame, zs, zt, "Pprime")
        yield Route(zs, br.w_finite_Pprime(frame, i), zt, br.w_finite_Pprime(frame, nu),
                    plan, f"zeta-plane t'{i+1}->t'{nu+1}")


def routes_underlying_inf(frame, i, tries=5):
    """t'_i -> infinity along the ray at angle theta'_i (checked cut plane)."""
    th = frame.theta_prime[i]
    zs = frame.tprime[i] + _r_under(frame, i) * cmath.exp(1j * th)
    R = 4 * frame.radius_prime_inf()
    for k in range(tries):
        beta = br.ROTATE * ((k + 1) // 2) * (1 if k % 2 else -1)
        zt = frame.eta0 + R * cmath.exp(1j * (th + beta))
        plan = plan_path(frame, zs, zt, "Pcheck")
        yield Route(zs, br.w_finite_Pcheck(frame, i), zt, br.w_inf(frame),
                    plan, f"zeta-plane t'{i+1}->inf")


def _radius_at(system, t):
    others = [abs(t - s) for s in system.finite_sing if s != t]
    return min(others) if others else math.inf


def _far_radius(system, frame):
    return 4 * max(abs(s - frame.t_last) for s in system.finite_sing)


def routes_x(system, frame, family, i, sign, tries=5):
    """Candidate routes in the x plane for one family of big-system tables.

    family: "Ui_to_inf", "Up1_to_inf", "Ui_to_Up1" (x in S^sign_i) or
    "adjacent" (sign = +1: t_i -> t_{i+1}, sign = -1: t_i -> t_{i-1}).
    """
    tl = frame.t_last
    rl = 0.25 * min(abs(t - tl) for t in frame.t)
    for k in range(tries):
        if family == "adjacent":
            nu = i + sign
            win = br.x_adjacent(frame, i, sign)
            ri = 0.25 * _radius_at(system, frame.t[i])
            rn = 0.25 * _radius_at(system, frame.t[nu])
            xs = br.point_near_ti(frame, i, sign, ri, win)
            xt = br.point_near_ti(frame, nu, -sign, rn, win, k)
            plan = plan_path(frame, xs, xt, "x_sector", (win.lo, win.hi))
            yield Route(xs, br.x_ti(frame, i, sign), xt, br.x_ti(frame, nu, -sign), plan,
                        f"x-plane t{i+1}->t{nu+1}")
            continue
        win = br.x_sector(frame, i, sign)
        psi = br.sector_angle(win.lo, win.hi, k)
        far = tl + _far_radius(system, frame) * cmath.exp(1j * psi)
        near_last = tl + rl * cmath.exp(1j * psi)
        if family in ("Ui_to_inf", "Ui_to_Up1"):
            xs = br.point_near_ti(frame, i, sign, 0.25 * _radius_at(system, frame.t[i]), win)
            sw = br.x_ti(frame, i, sign)
            xt = far if family == "Ui_to_inf" else near_last
        elif family == "Up1_to_inf":
            xs, sw, xt = near_last, win, far
        else:
            raise ValueError(f"unknown family {family!r}")
        plan = plan_path(frame, xs, xt, "x_sector", (win.lo, win.hi))
        sgn = "+" if sign > 0 else "-"
        yield Route(xs, sw, xt, win, plan, f"x-plane {family} S{sgn}_{i+1}")


# --------------------------------------------------------------------------
# underlying data

def underlying_table(spec, frame, rho, i, target):
    """c-table of the underlying system: t'_i -> t'_target or -> inf."""
    src = standard_basis("underlying", spec, frame, rho, sing=i)
    tgt = standard_basis("underlying", spec, frame, rho, sing=target, system=src.system)
    if target == "inf":
        routes = routes_underlying_inf(frame, i)
    else:
        routes = routes_underlying_finite(frame, i, target)
    return connect_numeric(src.system, src, tgt, frame, routes)


def gamma_values(spec, frame, rho, source, tol=1e-11):
    """Matrix whose columns are the gamma vectors of the source solutions.

    source: ("finite", i) for w_{t'_i,k,h}, continued to eta0 inside the plane
    cut along the rays beyond the t'_k; ("inf", i, sign) for w_{inf,k,h},
    continued to eta0 through the sector S'^sign_i.
    """
    if source[0] == "finite":
        i = source[1]
        basis = standard_basis("underlying", spec, frame, rho, sing=i)
        z0 = frame.tprime[i] + _r_under(frame, i) * cmath.exp(1j * (frame.theta_prime[i] - PI))
        win = br.w_finite_Pprime(frame, i)
        plan = plan_path(frame, z0, frame.eta0, "Pprime")
    else:
        _, i, sign = source
        basis = standard_basis("underlying", spec, frame, rho, sing="inf")
        lo, hi = frame.sector_xi(i, sign)
        psi = br.sector_angle(lo, hi)
        z0 = frame.eta0 + 4 * frame.radius_prime_inf() * cmath.exp(1j * psi)
        win = br.w_inf(frame)
        plan = plan_path(frame, z0, frame.eta0, "sector", (lo, hi))
    W0, _ = basis.evaluate(z0, win)
    W0 = W0[:, : basis.n_singular]
    el = continue_matrix(basis.system, AnalyticElement(z0, W0, basis.system), plan, tol)
    eta = frame.eta0
    return np.linalg.solve(spec.P, (eta - basis.system.T_diag)[:, None] * el.value)


class UnderlyingData:
    """Lazily computed and cached inputs of the recursive formulas."""

    def __init__(self, spec, frame):
        self.spec = spec
        self.frame = frame
        self._cache = {}

    def _get(self, key, fn):
        if key not in self._cache:
            try:
                self._cache[key] = fn()
            except OkuboError as exc:
                raise MissingInput(f"{key}: {exc}") from exc
        return self._cache[key]

    def c_finite(self, i, nu, rho=0.0):
        return self._get(("cf", i, nu, complex(rho)),
                         lambda: underlying_table(self.spec, self.frame, rho, i, nu))

    def c_inf(self, i, rho=0.0):
        return self._get(("ci", i, complex(rho)),
                         lambda: underlying_table(self.spec, self.frame, rho, i, "inf"))

    def gamma_finite(self, i, rho):
        return self._get(("gf", i, complex(rho)),
                         lambda: gamma_values(self.spec, self.frame, rho, ("finite", i)))

    def gamma_inf(self, i, sign, rho):
        return self._get(("gi", i, sign, complex(rho)),
                         lambda: gamma_values(self.spec, self.frame, rho, ("inf", i, sign)))


# --------------------------------------------------------------------------
# predictions

def predict_rho_dependence(kind, c0, lambda_ik, target_param, rho, direction=1):
    """c(rho) from c(0).  target_param is lambda_{nu,k~} (finite target) or
    mu_{k~} (infinity).

    direction (finite targets only) is +1 when i < nu and -1 when i > nu: the
    phase is exp(direction * pi i rho).  Complex conjugation of a
    configuration reverses the order of the t'_i and flips this phase, so a
    single sign cannot hold for both orders.
    """
    lam, tgt, rho = complex(lambda_ik), complex(target_param), complex(rho)
    if kind == "finite_to_finite":
        if direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        f = cmath.exp(direction * 1j * PI * rho) * gamma_ratio([rho + lam + 1, -rho - tgt], [lam + 1, -tgt])
    elif kind == "finite_to_infinity":
        if abs((rho + tgt + 1) - round((rho + tgt + 1).real)) < 1e-12 and (rho + tgt + 1).real < 0.5:
            return 0j
        f = gamma_ratio([rho + lam + 1, tgt + 1], [rho + tgt + 1, lam + 1])
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return f * complex(c0)


def _cols_finite(spec, i):
    return [(k, h, lam) for k, (lam, m) in enumerate(spec.lam[i]) for h in range(m)]


def _up1_ks(spec, case):
    q = len(spec.mu)
    return range({"generic": q, "red_i": q - 1, "red_ii": q - 2}[case])


def _cols_up1(spec, case):
    return [(k, h, spec.mu[k][0]) for k in _up1_ks(spec, case) for h in range(spec.mu[k][1])]


def rows_inf(spec, case):
    """(j, h~) labels of the basis at infinity, in basis order."""
    n = spec.n
    mu = spec.mu
    if case == "generic":
        return [(0, h) for h in range(n)] + [(1, h) for h in range(n)]
    if case == "red_i":
        cq = mu[-1][1]
        return [(0, h) for h in range(n - cq)] + [(1, h) for h in range(n)]
    c1, c2 = mu[-2][1], mu[-1][1]
    return ([(0, h) for h in range(n - c2)]
            + [(1, h) for h in list(range(n - c1 - c2)) + list(range(n - c2, n))])


def _family_key(family):
    if isinstance(family, str):
        raise ValueError("family must be (name, i, sign)")
    return family


def predict_big_coefficients(spec, frame, family, case="generic", data=None):
    """Closed-form table for family = (name, i, sign), i zero based.

    name: "Ui_to_inf", "Up1_to_inf", "Ui_to_Up1" (x in S^sign_i) or
    "adjacent" (sign = +1 or -1 selects t_{i+1} or t_{i-1}).
    """
    name, i, sign = _family_key(family)
    spec = specialize(spec, case)
    if data is None:
        data = UnderlyingData(spec, frame)
    r1, r2 = spec.rho
    rho = (r1, r2)
    sr = r1 + r2

    def pw(idx, lam):
        return cmath.exp(1j * PI * lam) * br.ti_power(frame, idx, 2 * lam - sr)

    if name == "Ui_to_inf":
        cols = _cols_finite(spec, i)
        rows = rows_inf(spec, case)
        C = np.zeros((len(rows), len(cols)), dtype=complex)
        gam = {j: data.gamma_finite(i, -rho[1 - j] - 1) for j in (0, 1)}
        for a, (j, ht) in enumerate(rows):
            rj, rjp = rho[j], rho[1 - j]
            for b, (k, h, lam) in enumerate(cols):
                C[a, b] = (cmath.exp(1j * PI * (lam - rjp)) * br.ti_power(frame, i, 2 * lam - sr)
                           * gamma_ratio([rj - rjp, lam + 1], [rj + 1, lam - rjp])
                           * gam[j][ht, b])
        rl = [f"U_inf,{j+1},{h+1}" for j, h in rows]
        cl = [f"U_t{i+1},{k+1},{h+1}" for k, h, _ in cols]
    elif name == "Up1_to_inf":
        cols = _cols_up1(spec, case)
        rows = rows_inf(spec, case)
        C = np.zeros((len(rows), len(cols)), dtype=complex)
        gam = {j: data.gamma_inf(i, -sign, -rho[1 - j] - 1) for j in (0, 1)}
        for a, (j, ht) in enumerate(rows):
            rj, rjp = rho[j], rho[1 - j]
            for b, (k, h, mu) in enumerate(cols):
                C[a, b] = (gamma_ratio([rj - rjp, sr - mu + 1], [rj + 1, rj - mu + 1])
                           * gam[j][ht, spec.mu_index(k) + h])
        rl = [f"U_inf,{j+1},{h+1}" for j, h in rows]
        cl = [f"U_last,{k+1},{h+1}" for k, h, _ in cols]
    elif name == "adjacent":
        nu = i + sign
        cols = _cols_finite(spec, i)
        rows = _cols_finite(spec, nu)
        c0 = data.c_finite(i, nu).C
        C = np.zeros((len(rows), len(cols)), dtype=complex)
        for a, (kt, ht, lt) in enumerate(rows):
            for b, (k, h, lam) in enumerate(cols):
                C[a, b] = pw(i, lam) / pw(nu, lt) * c0[a, b]
        rl = [f"U_t{nu+1},{k+1},{h+1}" for k, h, _ in rows]
        cl = [f"U_t{i+1},{k+1},{h+1}" for k, h, _ in cols]
    elif name == "Ui_to_Up1":
        cols = _cols_finite(spec, i)
        rows = _cols_up1(spec, case)
        c0 = data.c_inf(i).C
        C = np.zeros((len(rows), len(cols)), dtype=complex)
        for a, (kt, ht, mu) in enumerate(rows):
            for b, (k, h, lam) in enumerate(cols):
                C[a, b] = (cmath.exp(sign * 1j * PI * lam) * br.ti_power(frame, i, 2 * lam - sr)
                           * gamma_ratio([mu + 1, mu - r1 - r2], [mu - r1, mu - r2])
                           * c0[spec.mu_index(kt) + ht, b])
        rl = [f"U_last,{k+1},{h+1}" for k, h, _ in rows]
        cl = [f"U_t{i+1},{k+1},{h+1}" for k, h, _ in cols]
    else:
        raise ValueError(f"unknown family {name!r}")
    return ConnectionTable(cl, rl, [], C, np.zeros((0, len(cl)), dtype=complex),
                           context=f"predicted {name} i={i+1} sign={sign} case={case}")


def big_system(spec, case):
    if case == "generic":
        return build_big(spec)
    return reduce(spec, case)


def measure_big(spec, frame, family, case="generic", system=None):
    """Numerical counterpart of predict_big_coefficients."""
    name, i, sign = _family_key(family)
    spec = specialize(spec, case)
    kind = {"generic": "big", "red_i": "red_i", "red_ii": "red_ii"}[case]
    if system is None:
        system = big_system(spec, case)
    if name in ("Ui_to_inf", "Ui_to_Up1", "adjacent"):
        src = standard_basis(kind, spec, frame, sing=i, system=system)
    else:
        src = standard_basis(kind, spec, frame, sing="last", system=system)
    if name == "adjacent":
        tgt = standard_basis(kind, spec, frame, sing=i + sign, system=system)
    elif name == "Ui_to_Up1":
        tgt = standard_basis(kind, spec, frame, sing="last", system=system)
    else:
        tgt = standard_basis(kind, spec, frame, sing="inf", system=system)
    return connect_numeric(system, src, tgt, frame, routes_x(system, frame, name, i, sign))


def families(spec, case="generic"):
    """All (name, i, sign) families available for the spec and case."""
    out = []
    p = spec.p
    has_up1 = len(_up1_ks(spec, case)) > 0
    for i in range(p):
        for sign in (1, -1):
            out.append(("Ui_to_inf", i, sign))
            if has_up1:
                out.append(("Up1_to_inf", i, sign))
                out.append(("Ui_to_Up1", i, sign))
        if i + 1 < p:
            out.append(("adjacent", i, 1))
        if i > 0:
            out.append(("adjacent", i, -1))
    return out


# --------------------------------------------------------------------------
# verification suites

def _compare_tables(rep, prefix, num, pred, tol):
    scale = max(pred.scale, num.scale)
    for a in range(pred.C.shape[0]):
        for b in range(pred.C.shape[1]):
            rep.compare(f"{prefix}[{pred.target_labels[a]};{pred.source_labels[b]}]",
                        num.C[a, b], pred.C[a, b], tol, scale)


def _random_rhos(spec, rng, count, margin=0.05):
    lam = [l for blk in spec.lam for l, _ in blk]
    mu = [m for m, _ in spec.mu]
    out = []
    while len(out) < count:
        rho = complex(rng.uniform(-0.9, 0.9), rng.uniform(-0.4, 0.4))
        vals = [rho + l for l in lam] + [rho + m for m in mu]
        if all(abs(v - round(v.real)) > margin for v in vals):
            out.append(rho)
    return out


def suite_scaling(spec, frame, tol=1e-8, rng=None, n_rho=5):
    rng = np.random.default_rng(0) if rng is None else rng
    rep = Report("verify:scaling")
    rhos = _random_rhos(spec, rng, n_rho)
    mu = [m for m, c in spec.mu for _ in range(c)]
    for i in range(spec.p):
        lam_i = [l for l, c in spec.lam[i] for _ in range(c)]
        base_inf = underlying_table(spec, frame, 0.0, i, "inf")
        base_fin = {nu: underlying_table(spec, frame, 0.0, i, nu)
                    for nu in range(spec.p) if nu != i}
        for rho in rhos:
            t = underlying_table(spec, frame, rho, i, "inf")
            sc = np.abs(t.C).max()
            for a in range(t.C.shape[0]):
                for b in range(t.C.shape[1]):
                    pred = predict_rho_dependence("finite_to_infinity", base_inf.C[a, b],
                                                  lam_i[b], mu[a], rho)
                    rep.compare(f"c_inf[{a+1};t'{i+1},{b+1}](rho={rho:.3f})", t.C[a, b],
                                pred, tol, sc)
            for nu, b0 in base_fin.items():
                lam_n = [l for l, c in spec.lam[nu] for _ in range(c)]
                t = underlying_table(spec, frame, rho, i, nu)
                sc = np.abs(t.C).max()
                for a in range(t.C.shape[0]):
                    for b in range(t.C.shape[1]):
                        pred = predict_rho_dependence("finite_to_finite", b0.C[a, b],
                                                      lam_i[b], lam_n[a], rho,
                                                      1 if i < nu else -1)
                        rep.compare(f"c_t'{nu+1}[{a+1};t'{i+1},{b+1}](rho={rho:.3f})",
                                    t.C[a, b], pred, tol, sc)
    return rep


def suite_vanishing(spec, frame, tol=1e-8):
    rep = Report("verify:vanishing")
    for i in range(spec.p):
        for l, (mul, ml) in enumerate(spec.mu):
            t = underlying_table(spec, frame, -mul - 1, i, "inf")
            scale = np.abs(t.C).max()
            o = spec.mu_index(l)
            for h in range(ml):
                for b in range(t.C.shape[1]):
                    v = t.C[o + h, b]
                    r = abs(v) / scale
                    rep.add(f"c_inf,{l+1},{h+1};t'{i+1},{b+1}(-mu_{l+1}-1)", v, 0j, abs(v), r,
                            r <= tol)
    return rep


def suite_big(spec, frame, case="generic", tol=1e-6, data=None, system=None):
    spec = specialize(spec, case)
    rep = Report(f"verify:big_{case}")
    data = UnderlyingData(spec, frame) if data is None else data
    system = big_system(spec, case) if system is None else system
    for fam in families(spec, case):
        name, i, sign = fam
        tag = f"{case}:{name}(i={i+1},{'+' if sign > 0 else '-'})"
        try:
            num = measure_big(spec, frame, fam, case, system)
            pred = predict_big_coefficients(spec, frame, fam, case, data)
        except OkuboError as exc:
            rep.add(tag, passed=False, note=f"{type(exc).__name__}: {exc}")
            continue
        _compare_tables(rep, tag, num, pred, tol)
        rep.add(tag + ":residual", num.residual, 0j, num.residual, num.residual,
                num.residual <= 1e-8)
    return rep


def suite_eta0(spec, frame, tol=1e-7, eta_alt=None, rho=None):
    rep = Report("verify:eta0_independence")
    if eta_alt is None:
        eta_alt = frame.eta0 + 0.37 - 0.21j
    f2 = build_frame(spec, eta0=eta_alt, delta=frame.delta, theta_last=frame.theta[-1])
    if rho is None:
        rho = 0.23 - 0.11j
    for i in range(spec.p):
        for target in [nu for nu in range(spec.p) if nu != i] + ["inf"]:
            a = underlying_table(spec, frame, 0.0, i, target)
            b = underlying_table(spec, f2, 0.0, i, target)
            sc = np.abs(a.C).max()
            for (r, c), v in np.ndenumerate(a.C):
                rep.compare(f"c[{target};t'{i+1}][{r+1},{c+1}]", b.C[r, c], v, tol, sc)
        srcs = [("finite", i), ("inf", i, 1), ("inf", i, -1)]
        for s in srcs:
            ga = gamma_values(spec, frame, rho, s)
            gb = gamma_values(spec, f2, rho, s)
            sc = np.abs(ga).max()
            for (r, c), v in np.ndenumerate(ga):
                rep.compare(f"gamma{s}[{r+1},{c+1}]", gb[r, c], v, tol, sc)
    return rep


def _match_unimodular(got, want):
    """Largest distance in a greedy pairing of two equal-size point sets."""
    left = list(want)
    worst = 0.0
    for g in sorted(got, key=lambda z: (z.real, z.imag)):
        j = min(range(len(left)), key=lambda k: abs(left[k] - g))
        worst = max(worst, abs(left[j] - g) / max(1.0, abs(left[j])))
        left.pop(j)
    return worst


def _monodromy_checks(rep, system, tag, tol):
    scheme = riemann_scheme(system)
    fin = np.array(system.finite_sing, dtype=complex)
    center = fin.mean()
    for label, t, ex in scheme.points:
        want = [cmath.exp(2j * PI * e) for e, m in ex for _ in range(m)]
        if t == "inf":
            base = center + 1.5 * np.abs(fin - center).max() + 0.5
        else:
            others = [abs(t - u) for u in fin if u != t]
            base = t + 0.4 * min(others)
        got = np.linalg.eigvals(monodromy(system, t, base))
        err = _match_unimodular(got, want)
        rep.add(f"monodromy[{tag}:{label}]", complex(err), 0j, err, err, err <= tol)


def suite_structure(spec, frame, tol=1e-8, rho=(0.0, 0.23 - 0.11j), m_max=20):
    """Monodromy spectra, rho-independence of the normalized coefficients g(m),
    and path-homotopy invariance of continuation."""
    rep = Report("verify:structure")
    _monodromy_checks(rep, build_big(spec), "big", tol)
    _monodromy_checks(rep, build_underlying(spec, frame, rho[1]), "underlying", tol)
    for sing in list(range(spec.p)) + ["inf"]:
        b0 = standard_basis("underlying", spec, frame, rho[0], sing=sing)
        b1 = standard_basis("underlying", spec, frame, rho[1], sing=sing)
        worst = 0.0
        for c in range(b0.n_singular):
            g0 = np.array([normalized_coeff(b0.expansions[c], rho[0], m) for m in range(m_max + 1)])
            g1 = np.array([normalized_coeff(b1.expansions[c], rho[1], m) for m in range(m_max + 1)])
            worst = max(worst, float(np.abs(g0 - g1).max() / np.abs(g0).max()))
        name = f"t'{sing+1}" if sing != "inf" else "inf"
        rep.add(f"g(m)_rho_independence[{name},m<={m_max}]", worst, 0.0, worst, worst,
                worst <= 1e-10)
    system = build_underlying(spec, frame, rho[1])
    for i in range(spec.p):
        # two arcs about eta0 of different radii; both stay in the cut plane
        z0 = frame.tprime[i] + _r_under(frame, i) * cmath.exp(1j * (frame.theta_prime[i] - PI))
        psi = br.sector_angle(*frame.sector_xi(i, -1))
        z1 = frame.eta0 + 0.5 * abs(frame.tprime[i] - frame.eta0) * cmath.exp(1j * psi)
        Y0 = np.eye(spec.n, dtype=complex)
        r0 = 0.5 * min(abs(t - frame.eta0) for t in frame.tprime)
        vals = []
        for r in (0.5 * r0, 0.9 * r0):
            plan = plan_path(frame, z0, z1, "Pprime", r_arc=r)
            vals.append(continue_matrix(system, AnalyticElement(z0, Y0, system), plan).value)
        err = float(np.abs(vals[0] - vals[1]).max() / np.abs(vals[0]).max())
        rep.add(f"homotopy[t'{i+1}]", err, 0.0, err, err, err <= 1e-9)
    return rep


SUITES = ("scaling", "vanishing", "big_generic", "big_red_i", "big_red_ii",
          "eta0_independence", "structure")


def verify(spec, frame, suite, tol=None, rng=None):
    t0 = time.perf_counter()
    if suite == "scaling":
        rep = suite_scaling(spec, frame, tol or 1e-8, rng)
    elif suite == "vanishing":
        rep = suite_vanishing(spec, frame, tol or 1e-8)
    elif suite == "big_generic":
        rep = suite_big(spec, frame, "generic", tol or 1e-6)
    elif suite == "big_red_i":
        rep = suite_big(spec, frame, "red_i", tol or 1e-6)
    elif suite == "big_red_ii":
        rep = suite_big(spec, frame, "red_ii", tol or 1e-6)
    elif suite == "eta0_independence":
        rep = suite_eta0(spec, frame, tol or 1e-7)
    elif suite == "structure":
        rep = suite_structure(spec, frame, tol or 1e-8)
    else:
        raise ValueError(f"unknown suite {suite!r}")
    rep.timing["seconds"] = time.perf_counter() - t0
    return rep
