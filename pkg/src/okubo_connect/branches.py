"""Single table of branch windows and matching geometry.

zeta/xi plane (hub eta0):
  w_{t'_i} on the plane cut along the rays beyond each t'_i:
      arg(zeta - t'_i) in (theta'_i - 2 pi, theta'_i)
  w_{t'_i} on the plane cut along [eta0, t'_k] and the ray at theta'_inf:
      arg(zeta - t'_i) in (theta'_i - pi, theta'_i + pi)
  w_inf:  arg(zeta - eta0) in (theta'_inf, theta'_inf + 2 pi)

x plane (hub t_{p+1}), x in S^+_i or S^-_i:
  U_{t_i}:  arg(x - t_i) in (theta_i, theta_i + pi) on S^+_i,
            (theta_i - pi, theta_i) on S^-_i
  U_{t_{p+1}}, U_inf:  arg(x - t_{p+1}) in the sector itself
  constants (t_i - t_{p+1})^c use arg = theta_i.

The two planes are related by xi = eta0 + 1/(x - t_{p+1}), so
arg(xi - eta0) = -arg(x - t_{p+1}) and S^(+/-)_i corresponds to S'^(-/+)_i.
"""

import cmath
import math

from .numerics import TWO_PI, ArgWindow, cpow

DEG = math.pi / 180.0
MATCH_FRACTION = 0.25
OFF_CUT = 15 * DEG
ROTATE = 10 * DEG


def w_finite_Pprime(frame, i):
    th = frame.theta_prime[i]
    return ArgWindow(th - TWO_PI, th)


def w_finite_Pcheck(frame, i):
    th = frame.theta_prime[i]
    return ArgWindow(th - math.pi, th + math.pi)


def w_inf(frame):
    th = frame.theta_prime_inf
    return ArgWindow(th, th + TWO_PI)


def x_ti(frame, i, sign):
    th = frame.theta[i]
    return ArgWindow(th, th + math.pi) if sign > 0 else ArgWindow(th - math.pi, th)


def x_sector(frame, i, sign):
    lo, hi = frame.sector_x(i, sign)
    return ArgWindow(lo, hi)


def x_adjacent(frame, i, step):
    """Angular window of arg(x - t_{p+1}) for S^+_i u S^-_{i+1} (step=+1) or
    S^-_i u S^+_{i-1} (step=-1)."""
    if step > 0:
        return ArgWindow(frame.theta[i], frame.theta[i + 1])
    return ArgWindow(frame.theta[i - 1], frame.theta[i])


def ti_power(frame, i, expo):
    """(t_i - t_{p+1})^expo with arg = theta_i."""
    return cpow(frame.t[i] - frame.t_last, expo, frame.theta[i])


def xi_of_x(frame, x):
    return frame.eta0 + 1.0 / (x - frame.t_last)


def sector_angle(lo, hi, k=0):
    """Direction inside (lo, hi): the midpoint, moved off the cut by at least
    OFF_CUT when the sector is wide enough; k-th retry rotates by ROTATE."""
    psi = 0.5 * (lo + hi)
    if k:
        step = ROTATE * ((k + 1) // 2) * (1 if k % 2 else -1)
        psi = psi + step
    margin = min(OFF_CUT, 0.25 * (hi - lo))
    return min(max(psi, lo + margin), hi - margin)


def point_near_ti(frame, i, sign, r, window, k=0):
    """Point at distance <= r from t_i on the circle |x - t_{p+1}| = |t_i - t_{p+1}|,
    displaced to the sign side of the cut direction theta_i and lying inside
    window (angular window about t_{p+1})."""
    R = abs(frame.t[i] - frame.t_last)
    r = min(r, 0.5 * R)
    width = window.hi - window.lo
    r *= 1.0 / (1 + 0.5 * k)
    while True:
        eps = 2 * math.asin(r / (2 * R))
        if eps < 0.5 * width:
            break
        r *= 0.5
    return frame.t_last + R * cmath.exp(1j * (frame.theta[i] + sign * eps))
