"""Frobenius solutions of Okubo systems (x - T) u' = A u.

At a finite singular point t with block E (rows where T = t) and
D = t - T on the complementary rows F, a solution

    u = s^e sum_m G(m) s^m,   s = x - t,

obeys the two-term recursion

    G_F(m) = [(A - (e+m-1)) G(m-1)]_F / (D_F (e+m))
    ((e+m) - A_EE) G_E(m) = A_EF G_F(m).

At infinity (anchor c, y = x - c, s = 1/y) a solution y^{-e} sum G(m) y^{-m}
obeys (A + e + m) G(m) = (e+m-1)(T - c) G(m-1) with (A + e) G(0) = 0.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditioned, OutsideDisk, ResonanceError, TailTooLarge
from .model import build_big, build_underlying, reduce, specialize
from .numerics import arg_in_window, cpow, pochhammer, unit

EVAL_FRACTION = 0.75
M_START = 16
M_CAP = 512


def _check_matrix(Mx, what):
    if Mx.size == 0:
        return
    sv = np.linalg.svd(Mx, compute_uv=False)
    if sv[-1] <= 1e-10 * max(1.0, sv[0]):
        raise ResonanceError(f"{what} is singular")
    if sv[0] / sv[-1] > 1e12:
        raise IllConditioned(f"{what} has condition {sv[0] / sv[-1]:.3g}")


def null_basis(M, tol=1e-10):
    """Orthonormal basis (columns) of ker M by SVD."""
    _, sv, vh = np.linalg.svd(M)
    scale = max(1.0, sv[0] if sv.size else 0.0)
    rank = int(np.sum(sv > tol * scale))
    return vh[rank:].conj().T


class LocalExpansion:
    """One Frobenius series; coefficients are produced lazily."""

    def __init__(self, system, center, exponent, seed, anchor=None, label=""):
        self.system = system
        self.center = center
        self.exponent = complex(exponent)
        self.label = label
        seed = np.asarray(seed, dtype=complex)
        if not np.any(seed):
            raise ValueError("seed must be nonzero")
        A = system.A
        if center == "inf":
            self.anchor = complex(anchor)
            d = system.T_diag - self.anchor
            self._d = d
            rmax = np.abs(d).max()
            self.radius = math.inf if rmax == 0 else 1.0 / rmax
            res = (A + self.exponent * np.eye(system.rank)) @ seed
        else:
            self.center = complex(center)
            self.anchor = None
            idx = system.block(self.center)
            if idx.size == 0:
                raise ValueError(f"{center} is not a singular point")
            mask = np.zeros(system.rank, dtype=bool)
            mask[idx] = True
            self._E = np.nonzero(mask)[0]
            self._F = np.nonzero(~mask)[0]
            self._dF = self.center - system.T_diag[self._F]
            others = [abs(self.center - v) for v in system.finite_sing if v != self.center]
            self.radius = min(others) if others else math.inf
            AE = A[self._E]
            if self.exponent == 0:
                res = AE @ seed
            else:
                res = np.concatenate([seed[self._F],
                                      (self.exponent * seed - A @ seed)[self._E]])
        if np.abs(res).max() > 1e-8 * max(1.0, np.abs(A).max()) * np.abs(seed).max():
            raise ValueError(f"seed is not admissible for exponent {self.exponent}")
        self.coeffs = [seed]
        self._checked = -1

    # -- recursion
    def _step(self, m):
        A = self.system.A
        e = self.exponent
        g = self.coeffs[m - 1]
        n = self.system.rank
        if self.center == "inf":
            Mx = A + (e + m) * np.eye(n)
            if m <= self._check_upto():
                _check_matrix(Mx, f"recursion matrix at m={m}")
            return np.linalg.solve(Mx, (e + m - 1) * (self._d * g))
        E, F = self._E, self._F
        out = np.zeros(n, dtype=complex)
        out[F] = ((A @ g)[F] - (e + m - 1) * g[F]) / (self._dF * (e + m))
        Mx = (e + m) * np.eye(E.size) - A[np.ix_(E, E)]
        if m <= self._check_upto():
            _check_matrix(Mx, f"recursion matrix at m={m}")
        out[E] = np.linalg.solve(Mx, A[np.ix_(E, F)] @ out[F])
        return out

    def _check_upto(self):
        # beyond this order (e+m) dominates the matrix and the check is moot
        if self._checked < 0:
            self._checked = int(2 * np.abs(self.system.A).sum() + abs(self.exponent) + 4)
        return self._checked

    def ensure(self, M):
        while len(self.coeffs) <= M:
            self.coeffs.append(self._step(len(self.coeffs)))
        return self.coeffs[: M + 1]

    # -- evaluation
    def local_variable(self, x):
        if self.center == "inf":
            return 1.0 / (complex(x) - self.anchor)
        return complex(x) - self.center

    def prefactor(self, x, window):
        """s^e with the branch of arg pinned by window.  For the expansion at
        infinity the window applies to arg(x - anchor) and the factor is
        (x - anchor)^(-e)."""
        if self.center == "inf":
            y = complex(x) - self.anchor
            return cpow(y, -self.exponent, arg_in_window(y, window))
        s = complex(x) - self.center
        if self.exponent == 0:
            return 1.0 + 0j
        return cpow(s, self.exponent, arg_in_window(s, window))

    def series(self, s, tol=1e-15):
        """sum_m G(m) s^m with adaptive order; returns (value, error)."""
        if abs(s) > EVAL_FRACTION * self.radius * (1 + 1e-12):
            raise OutsideDisk(f"|s|={abs(s):.4g} beyond {EVAL_FRACTION} of radius {self.radius:.4g}")
        M = M_START
        prev = self._partial(s, M)
        while True:
            M2 = 2 * M
            cur = self._partial(s, M2)
            err = np.abs(cur - prev).max()
            scale = max(np.abs(cur).max(), 1e-300)
            if err <= tol * scale:
                return cur, err
            if M2 >= M_CAP:
                raise TailTooLarge(f"series not converged at M={M2} (err {err / scale:.2e})")
            M, prev = M2, cur

    def _partial(self, s, M):
        G = self.ensure(M)
        out = np.zeros_like(G[0])
        for g in reversed(G):
            out = out * s + g
        return out

    def series_many(self, svals, tol=1e-15):
        """Vectorized series at many local-variable values: (npts, rank)."""
        svals = np.asarray(svals, dtype=complex)
        if svals.size == 0:
            return np.zeros((0, self.system.rank), dtype=complex)
        smax = np.abs(svals).max()
        if smax > EVAL_FRACTION * self.radius * (1 + 1e-12):
            raise OutsideDisk("point outside the evaluation disk")
        ratio = smax / self.radius if math.isfinite(self.radius) else 0.0
        M = M_START
        if ratio > 0:
            M = max(M, int(math.ceil(40.0 / -math.log(ratio))) + 8)
        M = min(M, M_CAP)
        G = np.array(self.ensure(M))
        out = np.zeros((svals.size, G.shape[1]), dtype=complex)
        for g in G[::-1]:
            out = out * svals[:, None] + g
        return out

    def evaluate(self, x, window, tol=1e-15):
        val, err = self.series(self.local_variable(x), tol)
        f = self.prefactor(x, window)
        return f * val, abs(f) * err


def frobenius_expansion(system, sing, exponent, seed, M=40, anchor=None, label=""):
    exp = LocalExpansion(system, sing, exponent, seed, anchor=anchor, label=label)
    exp.ensure(M)
    return exp


def general_recursion(system, center, exponent, seed, M):
    """Reference Frobenius recursion in residue form at a finite point,
        ((e+m) I - B) G(m) = sum_{m'<m} D_{m-1-m'} G(m'),
    with B = E A and D_j the Taylor coefficients of the regular part of
    (x - T)^-1 A.  Used to cross-check the two-term recursion."""
    A = system.A
    n = system.rank
    T = system.T_diag
    E = (T == center).astype(float)
    B = E[:, None] * A
    d = np.where(T == center, 1.0, center - T)
    F = 1.0 - E
    D = [((-1.0) ** j * F / d ** (j + 1))[:, None] * A for j in range(M)]
    G = [np.asarray(seed, dtype=complex)]
    for m in range(1, M + 1):
        rhs = sum(D[m - 1 - mp] @ G[mp] for mp in range(m))
        G.append(np.linalg.solve((exponent + m) * np.eye(n) - B, rhs))
    return G


@dataclass
class LocalBasis:
    system: object
    sing: object
    expansions: list
    n_singular: int
    labels: list = field(default_factory=list)

    @property
    def center(self):
        return self.expansions[0].center

    @property
    def radius(self):
        return self.expansions[0].radius

    @property
    def singular(self):
        return self.expansions[: self.n_singular]

    @property
    def holomorphic(self):
        return self.expansions[self.n_singular:]

    def local_variable(self, x):
        return self.expansions[0].local_variable(x)

    def evaluate(self, x, window, tol=1e-15):
        cols, errs = [], []
        for e in self.expansions:
            v, err = e.evaluate(x, window, tol)
            cols.append(v)
            errs.append(err)
        return np.array(cols).T, max(errs)


def evaluate(obj, point, branch, tol=1e-15):
    """Value (vector or matrix) and error estimate of an expansion or basis."""
    return obj.evaluate(point, branch, tol)


def _system_for(kind, spec, frame, rho):
    if kind == "big":
        return build_big(spec)
    if kind == "underlying":
        if rho is None:
            raise ValueError("rho required for the underlying system")
        return build_underlying(spec, frame, rho)
    if kind in ("red_i", "reduced_i"):
        return reduce(spec, "red_i")
    if kind in ("red_ii", "reduced_ii"):
        return reduce(spec, "red_ii")
    raise ValueError(f"unknown kind {kind!r}")


def standard_basis(kind, spec, frame, rho=None, sing=0, M=40, system=None):
    """Paper-normalized local basis.

    sing: zero-based block index i (point t_i, or t'_i for the underlying
    system), "last" for t_{p+1}, or "inf".
    """
    if kind in ("red_i", "reduced_i"):
        spec = specialize(spec, "red_i")
        kind = "red_i"
    elif kind in ("red_ii", "reduced_ii"):
        spec = specialize(spec, "red_ii")
        kind = "red_ii"
    if system is None:
        system = _system_for(kind, spec, frame, rho)
    r = system.rank
    n = spec.n
    mu = spec.mu
    exps, labels = [], []

    def add(center, e, seed, label, anchor=None):
        exps.append(frobenius_expansion(system, center, e, seed, M, anchor, label))
        labels.append(label)

    if kind == "underlying":
        rho = complex(rho)
        if sing == "inf":
            for k, (m_k, mult) in enumerate(mu):
                for h in range(mult):
                    add("inf", -rho - m_k, spec.P[:, spec.mu_index(k) + h],
                        f"w_inf,{k+1},{h+1}", anchor=frame.eta0)
            return LocalBasis(system, sing, exps, len(exps), labels)
        center = frame.tprime[sing]
        for k, (lam, mult) in enumerate(spec.lam[sing]):
            for h in range(mult):
                add(center, rho + lam, unit(n, spec.lam_index(sing, k) + h),
                    f"w_t'{sing+1},{k+1},{h+1}")
        nsing = len(exps)
        idx = system.block(center)
        for h, v in enumerate(null_basis(system.A[idx]).T):
            add(center, 0, v, f"hol,{h+1}")
        return LocalBasis(system, sing, exps, nsing, labels)

    r1, r2 = spec.rho
    if sing == "inf":
        c = spec.t_last
        A = system.A
        I = np.eye(r)
        if kind == "big":
            for j, (rj, rjp) in enumerate(((r1, r2), (r2, r1))):
                for h in range(n):
                    add("inf", -rj, (A - rjp * I)[:, n + h], f"U_inf,{j+1},{h+1}", c)
        elif kind == "red_i":
            mq, cq = mu[-1]
            for h in range(n - cq):
                add("inf", -r1, (A - mq * I)[:, n + h], f"U_inf,1,{h+1}", c)
            for h in range(n):
                if h < n - cq:
                    seed = (A - r1 * I)[:, n + h]
                else:
                    seed = np.concatenate([spec.P[:, h], np.zeros(r - n)])
                add("inf", -mq, seed, f"U_inf,mu_q,{h+1}", c)
        else:
            (m1, c1), (m2, c2) = mu[-2], mu[-1]
            for h in range(n - c2):
                if h < n - c1 - c2:
                    seed = (A - m2 * I)[:, n + h]
                else:
                    seed = np.concatenate([spec.P[:, h], np.zeros(r - n)])
                add("inf", -m1, seed, f"U_inf,mu_q-1,{h+1}", c)
            for h in list(range(n - c1 - c2)) + list(range(n - c2, n)):
                if h < n - c1 - c2:
                    seed = (A - m1 * I)[:, n + h]
                else:
                    seed = np.concatenate([spec.P[:, h], np.zeros(r - n)])
                add("inf", -m2, seed, f"U_inf,mu_q,{h+1}", c)
        return LocalBasis(system, sing, exps, len(exps), labels)

    if sing == "last":
        center = spec.t_last
        if kind == "big":
            ks = range(len(mu))
            shift = r1 + r2
        elif kind == "red_i":
            ks = range(len(mu) - 1)
            shift = r1 + mu[-1][0]
        else:
            ks = range(len(mu) - 2)
            shift = mu[-2][0] + mu[-1][0]
        for k in ks:
            for h in range(mu[k][1]):
                add(center, shift - mu[k][0], unit(r, n + spec.mu_index(k) + h),
                    f"U_last,{k+1},{h+1}")
    else:
        center = spec.t[sing]
        for k, (lam, mult) in enumerate(spec.lam[sing]):
            for h in range(mult):
                add(center, lam, unit(r, spec.lam_index(sing, k) + h),
                    f"U_t{sing+1},{k+1},{h+1}")
    nsing = len(exps)
    idx = system.block(center)
    for h, v in enumerate(null_basis(system.A[idx]).T):
        add(center, 0, v, f"hol,{h+1}")
    return LocalBasis(system, sing, exps, nsing, labels)


def normalized_coeff(exp, rho, m):
    """Gamma-weighted coefficient g(m) of an underlying-system expansion."""
    G = exp.ensure(m)[m]
    if exp.center == "inf":
        return G / pochhammer(exp.exponent, m)
    return G * pochhammer(exp.exponent + 1, m)
