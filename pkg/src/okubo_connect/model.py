"""Input data, assumption checks and the Okubo systems built from them.

A rank-n datum (T, A, P, rho1, rho2, t_last) determines the rank-2n system

    (x I - diag(T, t_last I)) U' = [[A, P], [-(A'-rho1)(A'-rho2) P^-1, (rho1+rho2) - A']] U

with A' = P^-1 A P diagonal, the rank-n underlying system
(zeta - T') w' = (rho + A) w with t'_i = eta0 + 1/(t_i - t_last), and the
lower-rank systems obtained when rho2 (and rho1) hit eigenvalues of A'.
"""

import cmath
import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (BlockStructureError, DegenerateFrame, SchemeMismatch,
                     SingularP, StructureError)
from .numerics import TWO_PI, dist_to_int

CASES = ("generic", "red_i", "red_ii")


def _runs(values, tol=1e-10):
    """Group a sequence into runs of equal values: [(value, count), ...].
    Raises StructureError if a value reappears after its run ended."""
    runs = []
    for v in values:
        if runs and abs(v - runs[-1][0]) <= tol * max(1.0, abs(v)):
            runs[-1][1] += 1
            continue
        for r in runs:
            if abs(v - r[0]) <= tol * max(1.0, abs(v)):
                raise StructureError(
                    f"equal eigenvalues {v} must be listed contiguously")
        runs.append([complex(v), 1])
    return [(v, m) for v, m in runs]


@dataclass(frozen=True)
class BigSystemSpec:
    blocks: tuple           # ((t_i, n_i), ...)
    t_last: complex
    A: np.ndarray
    P: np.ndarray
    rho1: complex
    rho2: complex
    case: str = "generic"
    eta0: complex = None
    delta: float = None

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        P = np.array(self.P, dtype=complex)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "blocks",
                           tuple((complex(t), int(m)) for t, m in self.blocks))
        object.__setattr__(self, "t_last", complex(self.t_last))
        object.__setattr__(self, "rho1", complex(self.rho1))
        object.__setattr__(self, "rho2", complex(self.rho2))
        if self.case not in CASES:
            raise StructureError(f"unknown case {self.case!r}")
        n = self.n
        if A.shape != (n, n) or P.shape != (n, n):
            raise StructureError(f"A and P must be {n}x{n}")
        if any(m <= 0 for _, m in self.blocks):
            raise StructureError("block sizes must be positive")
        ts = [t for t, _ in self.blocks] + [self.t_last]
        for a, b in itertools.combinations(ts, 2):
            if abs(a - b) < 1e-12:
                raise StructureError("singular points must be distinct")

    # basic shape data
    @property
    def p(self):
        return len(self.blocks)

    @property
    def n(self):
        return sum(m for _, m in self.blocks)

    @property
    def sizes(self):
        return [m for _, m in self.blocks]

    @property
    def offsets(self):
        return [int(o) for o in np.cumsum([0] + self.sizes[:-1])]

    @property
    def t(self):
        return [t for t, _ in self.blocks]

    @property
    def T(self):
        return np.concatenate([np.full(m, t, dtype=complex) for t, m in self.blocks])

    @property
    def Pinv(self):
        return np.linalg.inv(self.P)

    @property
    def Aprime(self):
        return np.linalg.solve(self.P, self.A @ self.P)

    @property
    def lam(self):
        """Per block: list of (lambda_{i,k}, l_{i,k})."""
        out = []
        for o, m in zip(self.offsets, self.sizes):
            out.append(_runs(np.diag(self.A)[o:o + m]))
        return out

    @property
    def mu(self):
        """List of (mu_k, m_k) read from the diagonal of A'."""
        return _runs(np.diag(self.Aprime))

    @property
    def rho(self):
        return (self.rho1, self.rho2)

    def lam_index(self, i, k):
        """Zero-based position (within C^n) of the first lambda_{i,k} entry."""
        return self.offsets[i] + sum(l for _, l in self.lam[i][:k])

    def mu_index(self, k):
        return sum(m for _, m in self.mu[:k])

    def check_structure(self):
        A = self.A
        scale = max(1.0, np.abs(A).max())
        for o, m in zip(self.offsets, self.sizes):
            blk = A[o:o + m, o:o + m]
            off = blk - np.diag(np.diag(blk))
            if np.abs(off).max(initial=0.0) > 1e-12 * scale:
                raise StructureError("diagonal block of A is not diagonal")
        cond = np.linalg.cond(self.P)
        if not np.isfinite(cond) or cond > 1e12:
            raise SingularP(f"P is singular (condition {cond:.3g})")
        Ap = self.Aprime
        off = Ap - np.diag(np.diag(Ap))
        if np.abs(off).max(initial=0.0) > 1e-12 * scale * max(1.0, cond):
            raise StructureError("P^-1 A P is not diagonal")
        self.lam
        self.mu

    def with_rho(self, rho1=None, rho2=None, case=None):
        return replace(self,
                       rho1=self.rho1 if rho1 is None else rho1,
                       rho2=self.rho2 if rho2 is None else rho2,
                       case=self.case if case is None else case)


def specialize(spec, case):
    """Overwrite rho1/rho2 as the reducible case demands."""
    mu = spec.mu
    if case == "red_i":
        return spec.with_rho(rho2=mu[-1][0], case=case)
    if case == "red_ii":
        if len(mu) < 2:
            raise StructureError("case red_ii needs at least two distinct mu")
        return spec.with_rho(rho1=mu[-2][0], rho2=mu[-1][0], case=case)
    return spec.with_rho(case=case)


def apply_block_transform(spec, Q):
    """Replace (A, P) by (Q^-1 A Q, Q^-1 P) for a block diagonal Q."""
    Q = np.asarray(Q, dtype=complex)
    mask = np.zeros_like(Q, dtype=bool)
    for o, m in zip(spec.offsets, spec.sizes):
        mask[o:o + m, o:o + m] = True
    if np.abs(Q[~mask]).max(initial=0.0) > 0:
        raise StructureError("Q must be block diagonal")
    Qi = np.linalg.inv(Q)
    return replace(spec, A=Qi @ spec.A @ Q, P=Qi @ spec.P)


# --------------------------------------------------------------------------
# assumptions

@dataclass
class AssumptionCheck:
    name: str
    margin: float
    passed: bool
    detail: str = ""


@dataclass
class AssumptionReport:
    case: str
    eps: float
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def margin(self, name):
        return min((c.margin for c in self.checks if c.name == name), default=math.inf)


def _nonint(report, name, items):
    """items: iterable of (value, label); margin = min distance to integers."""
    margin = math.inf
    worst = ""
    for v, label in items:
        d = dist_to_int(v)
        if d < margin:
            margin, worst = d, label
    report.checks.append(AssumptionCheck(name, margin, margin >= report.eps, worst))


def collinearity_margin(points):
    """min over triples of |sin| of the smallest angle of the triangle."""
    margin = math.inf
    for a, b, c in itertools.combinations(points, 3):
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            z = (v - u) * (w - u).conjugate()
            margin = min(margin, abs(z.imag) / abs(z))
    return margin


def validate(spec, eps=1e-8, case=None):
    case = spec.case if case is None else case
    spec.check_structure()
    lam = [[v for v, _ in blk] for blk in spec.lam]
    mu = [v for v, _ in spec.mu]
    rho = spec.rho
    rep = AssumptionReport(case, eps)

    items = [(l, f"lambda_{i+1},{k+1}") for i, b in enumerate(lam) for k, l in enumerate(b)]
    for i, b in enumerate(lam):
        for k, h in itertools.permutations(range(len(b)), 2):
            items.append((b[k] - b[h], f"lambda_{i+1},{k+1}-lambda_{i+1},{h+1}"))
    _nonint(rep, "E2_1", items)
    _nonint(rep, "E2_2", [(mu[k] - mu[h], f"mu_{k+1}-mu_{h+1}")
                          for k, h in itertools.permutations(range(len(mu)), 2)])
    _nonint(rep, "E2_3", [(rho[0], "rho1"), (rho[1], "rho2"), (rho[0] - rho[1], "rho1-rho2")])
    _nonint(rep, "E2_4", [(r - l, f"rho{j+1}-lambda_{i+1},{k+1}")
                          for j, r in enumerate(rho)
                          for i, b in enumerate(lam) for k, l in enumerate(b)])
    if case == "generic":
        _nonint(rep, "E2_0", [(r - m, f"rho{j+1}-mu_{k+1}")
                              for j, r in enumerate(rho) for k, m in enumerate(mu)])
    elif case == "red_i":
        ok = abs(rho[1] - mu[-1]) <= 1e-12 * max(1, abs(mu[-1]))
        rep.checks.append(AssumptionCheck("red_i:rho2=mu_q", 0.0 if ok else math.inf, ok))
        _nonint(rep, "E1_0", [(rho[0] - m, f"rho1-mu_{k+1}") for k, m in enumerate(mu)])
    elif case == "red_ii":
        ok = (len(mu) >= 2 and abs(rho[0] - mu[-2]) <= 1e-12 * max(1, abs(mu[-2]))
              and abs(rho[1] - mu[-1]) <= 1e-12 * max(1, abs(mu[-1])))
        rep.checks.append(AssumptionCheck("red_ii:rho=(mu_q-1,mu_q)", 0.0 if ok else math.inf, ok))
    items = [(m, f"mu_{k+1}") for k, m in enumerate(mu)]
    # for n = 1 the underlying system is a pure power and lambda = mu identically
    if spec.n > 1:
        items += [(l - m, f"lambda_{i+1},{k+1}-mu_{j+1}")
                  for i, b in enumerate(lam) for k, l in enumerate(b) for j, m in enumerate(mu)]
    _nonint(rep, "underlying", items)
    cm = collinearity_margin(spec.t + [spec.t_last])
    rep.checks.append(AssumptionCheck("no_three_collinear", cm, cm >= eps))
    return rep


# --------------------------------------------------------------------------
# geometry

@dataclass(frozen=True)
class GeometryFrame:
    t: tuple                 # finite t_1..t_p
    t_last: complex
    theta: tuple             # theta_1..theta_{p+1}
    eta0: complex
    tprime: tuple
    theta_prime: tuple       # theta'_1..theta'_p
    theta_prime_inf: float
    delta: float
    phi_minus: tuple
    phi_plus: tuple

    @property
    def p(self):
        return len(self.t)

    def sector_xi(self, i, sign):
        """Angular window of arg(xi - eta0) for S'^sign_i (i zero based)."""
        if sign < 0:
            return (self.phi_minus[i], self.theta_prime[i])
        return (self.theta_prime[i], self.phi_plus[i])

    def sector_x(self, i, sign):
        """Angular window of arg(x - t_last) for S^sign_i; S^+ <-> S'^-."""
        lo, hi = self.sector_xi(i, -sign)
        return (-hi, -lo)

    def radius_prime(self, i):
        """Distance from t'_i to the other finite singular points of the
        underlying system (inf for a single block)."""
        d = [abs(self.tprime[i] - s) for j, s in enumerate(self.tprime) if j != i]
        return min(d) if d else math.inf

    def radius_prime_inf(self):
        return max(abs(s - self.eta0) for s in self.tprime)


def build_frame(spec, eta0=None, delta=None, theta_last=None):
    t = spec.t
    tl = spec.t_last
    T = spec.T
    if np.any(np.abs(tl - T) == 0):
        raise DegenerateFrame("t_last coincides with an eigenvalue of T")
    th = [cmath.phase(t[0] - tl)]
    for ti in t[1:]:
        a = cmath.phase(ti - tl)
        th.append(th[0] + (a - th[0]) % TWO_PI)
    for a, b in zip(th, th[1:] + [th[0] + TWO_PI]):
        if b - a < 1e-10:
            raise DegenerateFrame(
                "arguments of t_i - t_last are not strictly increasing in block order")
    if theta_last is None:
        theta_last = 0.5 * (th[-1] + th[0] + TWO_PI)
    elif not th[-1] < theta_last < th[0] + TWO_PI:
        raise DegenerateFrame("theta_{p+1} outside (theta_p, theta_1 + 2 pi)")
    if eta0 is None:
        eta0 = spec.eta0 if spec.eta0 is not None else 0j
    eta0 = complex(eta0)
    tp = tuple(eta0 + 1.0 / (ti - tl) for ti in t)
    if any(abs(eta0 - s) < 1e-12 for s in tp):
        raise DegenerateFrame("eta0 coincides with some t'_i")
    thp = [-a for a in th]
    thinf = -theta_last
    seq = [thinf + TWO_PI] + thp + [thinf]
    gaps = [a - b for a, b in zip(seq, seq[1:])]
    if delta is None:
        delta = spec.delta if spec.delta is not None else 0.05 * min(gaps)
    if not 0 < delta < min(gaps):
        raise DegenerateFrame("delta must be positive and below the angular gaps")
    p = len(t)
    phim = tuple(max(seq[i + 2] + delta, thp[i] - math.pi) for i in range(p))
    phip = tuple(min(seq[i] - delta, thp[i] + math.pi) for i in range(p))
    return GeometryFrame(tuple(t), tl, tuple(th) + (theta_last,), eta0, tp,
                         tuple(thp), thinf, float(delta), phim, phip)


# --------------------------------------------------------------------------
# systems

@dataclass
class OkuboSystem:
    rank: int
    T_diag: np.ndarray
    A: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.T_diag = np.asarray(self.T_diag, dtype=complex)
        self.A = np.asarray(self.A, dtype=complex)
        if self.A.shape != (self.rank, self.rank) or self.T_diag.shape != (self.rank,):
            raise StructureError("inconsistent system dimensions")

    @property
    def sing(self):
        """Distinct finite singular values with multiplicities, then inf."""
        out = []
        for v in self.T_diag:
            for s in out:
                if s[0] == v:
                    s[1] += 1
                    break
            else:
                out.append([complex(v), 1])
        return [tuple(s) for s in out] + [("inf", self.rank)]

    @property
    def finite_sing(self):
        return [v for v, _ in self.sing[:-1]]

    def block(self, t):
        """Index array of the rows where T equals t."""
        return np.nonzero(self.T_diag == t)[0]

    def residue(self, t):
        if t == "inf":
            return -self.A
        E = np.zeros(self.rank)
        E[self.block(t)] = 1.0
        return E[:, None] * self.A

    def coefficient(self, x):
        """(x I - T)^-1 A."""
        return self.A / (x - self.T_diag)[:, None]


def big_matrix(spec):
    P = spec.P
    Pinv = np.linalg.inv(P)
    Ap = np.diag(np.diag(spec.Aprime))
    n = spec.n
    I = np.eye(n)
    r1, r2 = spec.rho
    low = -(Ap - r1 * I) @ (Ap - r2 * I) @ Pinv
    return np.block([[spec.A, P], [low, (r1 + r2) * I - Ap]])


def build_big(spec):
    cond = np.linalg.cond(spec.P)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularP(f"P is singular (condition {cond:.3g})")
    T = np.concatenate([spec.T, np.full(spec.n, spec.t_last)])
    return OkuboSystem(2 * spec.n, T, big_matrix(spec),
                       meta={"kind": "big", "spec": spec, "condP": cond})


def build_underlying(spec, frame, rho):
    rho = complex(rho)
    Tp = np.concatenate([np.full(m, tp) for tp, m in zip(frame.tprime, spec.sizes)])
    return OkuboSystem(spec.n, Tp, rho * np.eye(spec.n) + spec.A,
                       meta={"kind": "underlying", "spec": spec, "rho": rho,
                             "eta0": frame.eta0})


def reduced_rank(spec, case):
    mu = spec.mu
    if case == "red_i":
        return 2 * spec.n - mu[-1][1]
    return 2 * spec.n - mu[-1][1] - mu[-2][1]


def reduce(spec, case):
    if case not in ("red_i", "red_ii"):
        raise ValueError("case must be red_i or red_ii")
    spec = specialize(spec, case)
    big = big_matrix(spec)
    r = reduced_rank(spec, case)
    scale = np.abs(big).max()
    if np.abs(big[r:, :r]).max(initial=0.0) > 1e-10 * scale:
        raise BlockStructureError("lower-left block of the big matrix is not zero")
    T = np.concatenate([spec.T, np.full(spec.n, spec.t_last)])[:r]
    kind = "reduced_i" if case == "red_i" else "reduced_ii"
    return OkuboSystem(r, T, big[:r, :r], meta={"kind": kind, "spec": spec})


# --------------------------------------------------------------------------
# Riemann schemes

@dataclass
class RiemannScheme:
    points: list                 # [(label, location, [(exponent, mult), ...])]

    def exponents(self, label):
        for lab, _, ex in self.points:
            if lab == label:
                return ex
        raise KeyError(label)

    def total(self):
        return sum(e * m for _, _, ex in self.points for e, m in ex)


def _group(vals, tol=1e-8):
    out = []
    for v in vals:
        for o in out:
            if abs(o[0] - v) <= tol * max(1.0, abs(v)):
                o[1] += 1
                break
        else:
            out.append([complex(v), 1])
    return [tuple(o) for o in out]


def _expected(system, kind):
    spec = system.meta.get("spec")
    if spec is None:
        return None
    n = spec.n
    lam = spec.lam
    mu = spec.mu
    r1, r2 = spec.rho
    exp = {}
    if kind == "underlying":
        rho = system.meta["rho"]
        for i, (blk, ni) in enumerate(zip(lam, spec.sizes)):
            exp[i] = [(rho + l, c) for l, c in blk] + ([(0j, n - ni)] if n > ni else [])
        exp["inf"] = [(-rho - m, c) for m, c in mu]
        return exp
    rank = system.rank
    for i, (blk, ni) in enumerate(zip(lam, spec.sizes)):
        exp[i] = [(l, c) for l, c in blk] + [(0j, rank - ni)]
    if kind == "big":
        exp["last"] = [(r1 + r2 - m, c) for m, c in mu] + [(0j, n)]
        exp["inf"] = [(-r1, n), (-r2, n)]
    elif kind == "reduced_i":
        mq, cq = mu[-1]
        exp["last"] = [(r1 + mq - m, c) for m, c in mu[:-1]] + [(0j, n)]
        exp["inf"] = [(-r1, n - cq), (-mq, n)]
    elif kind == "reduced_ii":
        (m1, c1), (m2, c2) = mu[-2], mu[-1]
        exp["last"] = [(m1 + m2 - m, c) for m, c in mu[:-2]] + [(0j, n)]
        exp["inf"] = [(-m1, n - c2), (-m2, n - c1)]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return exp


def _match(computed, expected, label, tol=1e-8):
    a = sorted([e for e, m in computed for _ in range(m)], key=lambda z: (z.real, z.imag))
    b = [e for e, m in expected for _ in range(m)]
    if len(a) != len(b):
        raise SchemeMismatch(f"{label}: multiplicities differ")
    left = list(b)
    for e in a:
        j = min(range(len(left)), key=lambda k: abs(left[k] - e))
        if abs(left[j] - e) > tol * max(1.0, abs(e)):
            raise SchemeMismatch(f"{label}: exponent {e} not in the expected list")
        left.pop(j)


def riemann_scheme(system, kind=None):
    """Exponents from residue eigenvalues, checked against the closed-form
    lists when the system carries its construction data."""
    kind = kind or system.meta.get("kind")
    spec = system.meta.get("spec")
    points = []
    for t, mult in system.sing[:-1]:
        idx = system.block(t)
        ev = list(np.linalg.eigvals(system.A[np.ix_(idx, idx)]))
        ev += [0j] * (system.rank - len(idx))
        points.append((t, _group(ev)))
    points.append(("inf", _group(list(-np.linalg.eigvals(system.A)))))

    labelled = []
    for t, ex in points:
        if t == "inf":
            label = "inf"
        elif spec is not None and kind != "underlying" and t == spec.t_last:
            label = "last"
        elif spec is not None:
            ref = spec.t if kind != "underlying" else [
                system.meta["eta0"] + 1.0 / (ti - spec.t_last) for ti in spec.t]
            label = int(np.argmin([abs(t - r) for r in ref]))
        else:
            label = t
        labelled.append((label, t, ex))

    expected = _expected(system, kind) if kind else None
    if expected is not None:
        seen = set()
        for label, _, ex in labelled:
            if label not in expected:
                raise SchemeMismatch(f"unexpected singular point {label}")
            _match(ex, expected[label], label)
            seen.add(label)
        for label, ex in expected.items():
            if label not in seen and any(e != 0 for e, _ in ex):
                raise SchemeMismatch(f"missing singular point {label}")
    tr = np.trace(system.A)
    finite = sum(e * m for lab, _, ex in labelled if lab != "inf" for e, m in ex)
    if abs(finite - tr) > 1e-8 * max(1.0, abs(tr)):
        raise SchemeMismatch("Fuchs relation fails")
    return RiemannScheme(labelled)
