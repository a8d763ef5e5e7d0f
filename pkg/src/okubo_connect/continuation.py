"""Analytic continuation of solutions of (x - T) Y' = A Y by Taylor steps.

At a regular point x0 with D = x0 - T the Taylor coefficients of a solution
satisfy Y_{k+1} = D^-1 (A - k) Y_k / (k + 1); the series converges up to the
nearest singular point and each step uses at most 0.4 of that distance.
Paths are polygonal chains of radial segments and arcs about a hub point.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClearanceError, ToleranceNotMet, UnreachableError
from .numerics import TWO_PI

STEP_FRACTION = 0.4
MIN_FRACTION = STEP_FRACTION / 64
ARC_PIECE = math.pi / 24


# --------------------------------------------------------------------------
# Taylor stepping

def _nearest(sing, x):
    return np.abs(sing - x).min() if sing.size else math.inf


def taylor_series(system, x0, Y0, h, extra=()):
    """Sum the Taylor series of the solution with value Y0 at x0 at x0 + h and
    at x0 + each offset in extra.  Returns (value at x0+h, list of values)."""
    A = system.A
    D = x0 - system.T_diag
    if np.any(D == 0):
        raise ClearanceError("Taylor step centred on a singular point")
    Dinv = (1.0 / D)[:, None]
    offs = np.concatenate([[h], np.asarray(extra, dtype=complex)])
    rmax = np.abs(offs).max()
    Yk = np.array(Y0, dtype=complex)
    vec = Yk.ndim == 1
    if vec:
        Yk = Yk[:, None]
    tot = np.zeros((offs.size,) + Yk.shape, dtype=complex)
    pw = np.ones(offs.size, dtype=complex)
    scale = np.abs(Yk).max() + 1e-300
    small = 0
    for k in range(400):
        shape = (offs.size,) + (1,) * Yk.ndim
        tot += pw.reshape(shape) * Yk
        mag = np.abs(Yk).max() * rmax ** k
        small = small + 1 if mag <= 1e-18 * scale else 0
        if small >= 3:
            break
        Yk = Dinv * (A @ Yk - k * Yk) / (k + 1)
        pw = pw * offs
        scale = max(scale, np.abs(tot).max())
    else:
        raise ToleranceNotMet("Taylor series did not converge")
    if vec:
        tot = tot[..., 0]
    return tot[0], list(tot[1:])


def march_line(system, z0, Y0, z1, frac=STEP_FRACTION, taus=None):
    """Carry Y0 from z0 to z1 along the straight segment.  taus: sorted
    parameters in (0, 1] at which values are also returned."""
    sing = system.finite_sing
    sing = np.array(sing, dtype=complex) if sing else np.zeros(0, dtype=complex)
    L = abs(z1 - z0)
    Y = np.array(Y0, dtype=complex)
    out = []
    taus = [] if taus is None else list(taus)
    if L == 0:
        return Y, [Y.copy() for _ in taus]
    u = (z1 - z0) / L
    if sing.size:
        # distance from the closed segment to each singular point
        proj = np.clip(((sing - z0) / u).real, 0.0, L)
        if np.abs(z0 + u * proj - sing).min() <= 1e-12 * max(1.0, L):
            raise ClearanceError("segment passes through a singular point")
    pos = 0.0
    j = 0
    while pos < L:
        x = z0 + u * pos
        d = _nearest(sing, x)
        if frac * d <= 1e-14 * max(1.0, L):
            raise ClearanceError("path runs into a singular point")
        step = min(L - pos, frac * d)
        end = pos + step
        offs = []
        while j < len(taus) and taus[j] * L <= end + 1e-15 * L:
            offs.append(u * (taus[j] * L - pos))
            j += 1
        Y, vals = taylor_series(system, x, Y, u * step, offs)
        out.extend(vals)
        pos = end
    while j < len(taus):
        out.append(Y.copy())
        j += 1
    return Y, out


# --------------------------------------------------------------------------
# paths

@dataclass
class Segment:
    kind: str              # "line" or "arc"
    start: complex
    end: complex
    center: complex = None
    radius: float = None
    a0: float = None
    a1: float = None

    def points(self):
        """Polygon vertices approximating the segment (arcs by chords)."""
        if self.kind == "line":
            return [self.start, self.end]
        npc = max(1, int(math.ceil(abs(self.a1 - self.a0) / ARC_PIECE)))
        angs = np.linspace(self.a0, self.a1, npc + 1)
        pts = [self.center + self.radius * cmath.exp(1j * a) for a in angs]
        pts[0], pts[-1] = self.start, self.end
        return pts

    def arg_increment(self, s):
        if self.kind == "arc" and s == self.center:
            return self.a1 - self.a0
        pts = self.points() if self.kind == "line" else self._fine_points()
        tot = 0.0
        for a, b in zip(pts, pts[1:]):
            tot += cmath.phase((b - s) / (a - s))
        return tot

    def _fine_points(self):
        npc = max(8, int(math.ceil(abs(self.a1 - self.a0) / (math.pi / 256))))
        angs = np.linspace(self.a0, self.a1, npc + 1)
        return [self.center + self.radius * cmath.exp(1j * a) for a in angs]

    def distance_to(self, s):
        if self.kind == "line":
            a, b = self.start, self.end
            if a == b:
                return abs(s - a)
            t = ((s - a) * (b - a).conjugate()).real / abs(b - a) ** 2
            t = min(1.0, max(0.0, t))
            return abs(s - (a + t * (b - a)))
        pts = self._fine_points()
        return min(abs(s - p) for p in pts)


@dataclass
class PathPlan:
    start: complex
    end: complex
    segments: list
    singularities: list
    hub: complex = None
    clearance: float = math.inf
    records: dict = field(default_factory=dict)

    def polygon(self):
        pts = [self.start]
        for seg in self.segments:
            pts.extend(seg.points()[1:])
        return pts

    def arg_increment(self, s):
        return sum(seg.arg_increment(s) for seg in self.segments)

    def winding(self, s):
        """Winding number about s from segment geometry (closed paths)."""
        return round(self.arg_increment(s) / TWO_PI)


def _record(plan, points):
    for s in points:
        run = [cmath.phase(plan.start - s)]
        for seg in plan.segments:
            run.append(run[-1] + seg.arg_increment(s))
        plan.records[s] = run
    return plan


def _on_cut_Pprime(z, hub, sing_dirs):
    for s in sing_dirs:
        w = (z - hub) / (s - hub)
        if abs(w.imag) <= 1e-12 * abs(w) and w.real >= 1 - 1e-12:
            return True
    return False


def _on_cut_Pcheck(z, hub, sing_dirs, theta_inf):
    for s in sing_dirs:
        w = (z - hub) / (s - hub)
        if abs(w.imag) <= 1e-12 * abs(w) and -1e-12 <= w.real <= 1 + 1e-12:
            return True
    if z == hub:
        return True
    a = cmath.phase(z - hub)
    return abs(((a - theta_inf + math.pi) % TWO_PI) - math.pi) < 1e-12


def _radial(a, b):
    return Segment("line", a, b)


def _three_stage(start, end, hub, r_arc, a_start, a_end):
    segs = []
    tiny = 1e-13 * max(1.0, abs(hub) + r_arc)
    p1 = hub + r_arc * cmath.exp(1j * a_start)
    p2 = hub + r_arc * cmath.exp(1j * a_end)
    if abs(p1 - start) > tiny:
        segs.append(_radial(start, p1))
    else:
        p1 = start
    if abs(a_end - a_start) > 1e-13:
        segs.append(Segment("arc", p1, p2, hub, r_arc, a_start, a_end))
    else:
        p2 = p1
    if abs(end - p2) > tiny:
        segs.append(_radial(p2, end))
    return segs


def _angle_in(z, hub, lo, hi):
    a = cmath.phase(z - hub)
    a = a + TWO_PI * (math.floor((lo - a) / TWO_PI) + 1)
    if a >= hi:
        raise UnreachableError(f"{z} is outside the angular window ({lo}, {hi})")
    return a


def plan_path(frame, start, end, mode, window=None, r_arc=None):
    """Route from start to end.

    mode: "Pprime" (zeta plane minus the rays beyond each t'_i),
          "Pcheck" (zeta plane minus the segments [eta0, t'_i] and the ray
          from eta0 at angle theta'_inf; routed around the outside),
          "sector" (xi plane, angular window (lo, hi) about eta0),
          "x_sector" (x plane, angular window about t_{p+1}).
    """
    start, end = complex(start), complex(end)
    if mode == "x_sector":
        hub = frame.t_last
        sings = list(frame.t) + [frame.t_last]
    else:
        hub = frame.eta0
        sings = list(frame.tprime)
    others = [s for s in sings if s != hub]
    plan = PathPlan(start, end, [], sings, hub)
    if start == end:
        return _record(plan, sings + ([hub] if hub not in sings else []))
    r0 = 0.5 * min(abs(s - hub) for s in others)

    if mode == "Pprime":
        for z in (start, end):
            if _on_cut_Pprime(z, hub, others) or any(z == s for s in sings):
                raise UnreachableError(f"{z} is not in the cut plane")
        if end == hub or start == hub:
            plan.segments = [_radial(start, end)]
        else:
            a0 = cmath.phase(start - hub)
            a1 = a0 + cmath.phase((end - hub) / (start - hub))
            r = min(r0, abs(start - hub), abs(end - hub)) if r_arc is None else r_arc
            plan.segments = _three_stage(start, end, hub, r, a0, a1)
    elif mode == "Pcheck":
        thinf = frame.theta_prime_inf
        for z in (start, end):
            if _on_cut_Pcheck(z, hub, others, thinf):
                raise UnreachableError(f"{z} is not in the checked cut plane")
        a0 = _angle_in(start, hub, thinf, thinf + TWO_PI)
        a1 = _angle_in(end, hub, thinf, thinf + TWO_PI)
        if abs(a1 - a0) < 1e-14:
            plan.segments = [_radial(start, end)]
        else:
            R = max(abs(s - hub) for s in others) * 1.5 if r_arc is None else r_arc
            R = max(R, abs(start - hub), abs(end - hub))
            plan.segments = _three_stage(start, end, hub, R, a0, a1)
    elif mode in ("sector", "x_sector"):
        lo, hi = window
        if end == hub or start == hub:
            z = start if end == hub else end
            _angle_in(z, hub, lo, hi)
            plan.segments = [_radial(start, end)]
        else:
            a0 = _angle_in(start, hub, lo, hi)
            a1 = _angle_in(end, hub, lo, hi)
            r = min(r0, abs(start - hub), abs(end - hub)) if r_arc is None else r_arc
            plan.segments = _three_stage(start, end, hub, r, a0, a1)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    clear = math.inf
    for s in sings:
        if s in (start, end):
            continue
        for seg in plan.segments:
            clear = min(clear, seg.distance_to(s))
    plan.clearance = clear
    dmin = min([r0] + [abs(z - s) for z in (start, end) for s in sings if s != z])
    if clear < 0.25 * dmin:
        raise ClearanceError(f"path passes within {clear:.3g} of a singular point")
    return _record(plan, sings + ([hub] if hub not in sings else []))


# --------------------------------------------------------------------------
# continuation

@dataclass
class AnalyticElement:
    base: complex
    value: np.ndarray
    system: object
    args: dict = field(default_factory=dict)


def _traverse(system, Y, plan, frac):
    for seg in plan.segments:
        pts = seg.points()
        for a, b in zip(pts, pts[1:]):
            Y, _ = march_line(system, a, Y, b, frac)
    return Y


def continue_matrix(system, element, path, tol=1e-11):
    if path.segments and abs(element.base - path.start) > 1e-14 * max(1.0, abs(path.start)):
        raise ValueError("element is not based at the path start")
    Y0 = np.asarray(element.value, dtype=complex)
    args = {s: element.args.get(s, cmath.phase(path.start - s)) + path.arg_increment(s)
            for s in set(element.args) | set(path.records)}
    if not path.segments:
        return AnalyticElement(path.end, Y0.copy(), system, args)
    frac = STEP_FRACTION
    prev = _traverse(system, Y0, path, frac)
    while True:
        frac /= 2
        cur = _traverse(system, Y0, path, frac)
        diff = np.abs(cur - prev).max()
        if diff <= tol * max(np.abs(cur).max(), 1e-300):
            return AnalyticElement(path.end, cur, system, args)
        if frac < MIN_FRACTION:
            raise ToleranceNotMet(f"continuation error {diff:.2e} above tolerance")
        prev = cur


def dense_line(system, z0, Y0, z1, taus, tol=1e-11):
    """Values along a straight segment at parameters taus (sorted, in (0,1]),
    with the same two-traversal error control as continue_matrix."""
    frac = STEP_FRACTION
    Ya, va = march_line(system, z0, Y0, z1, frac, taus)
    while True:
        frac /= 2
        Yb, vb = march_line(system, z0, Y0, z1, frac, taus)
        allv = [Yb] + vb
        diff = max(np.abs(x - y).max() for x, y in zip([Ya] + va, allv))
        scale = max(np.abs(x).max() for x in allv)
        if diff <= tol * max(scale, 1e-300):
            return Yb, vb
        if frac < MIN_FRACTION:
            raise ToleranceNotMet(f"dense continuation error {diff:.2e}")
        Ya, va = Yb, vb


def loop_plan(center, base, clockwise=False, singularities=()):
    r = abs(base - center)
    a0 = cmath.phase(base - center)
    a1 = a0 - TWO_PI if clockwise else a0 + TWO_PI
    seg = Segment("arc", complex(base), complex(base), complex(center), r, a0, a1)
    plan = PathPlan(complex(base), complex(base), [seg], list(singularities), complex(center))
    return _record(plan, list(singularities))


def monodromy(system, sing, base, frame=None, tol=1e-11):
    """Monodromy matrix of the loop about sing through base (positively
    oriented; clockwise in the plane for sing = "inf"), relative to the
    fundamental matrix equal to the identity at base."""
    base = complex(base)
    fin = np.array(system.finite_sing, dtype=complex)
    if sing == "inf":
        center = fin.mean() if fin.size else 0j
        if abs(base - center) <= np.abs(fin - center).max():
            raise ValueError("base must lie outside the circle containing all finite singular points")
        plan = loop_plan(center, base, clockwise=True, singularities=list(fin))
    else:
        sing = complex(sing)
        r = abs(base - sing)
        others = [abs(sing - s) for s in fin if s != sing]
        if others and r >= min(others):
            raise ValueError("loop would enclose another singular point")
        plan = loop_plan(sing, base, clockwise=False, singularities=list(fin))
    el = AnalyticElement(base, np.eye(system.rank, dtype=complex), system)
    return continue_matrix(system, el, plan, tol).value
