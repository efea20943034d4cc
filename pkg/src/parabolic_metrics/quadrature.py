"""Adaptive Simpson quadrature and the curve integrals built on it.

These are the numerical oracles that the closed-form metrics are checked
against, so they deliberately know nothing about conic sections.
"""

from __future__ import annotations

import math
import sys
from typing import Callable, Sequence

from .errors import NoConvergence

EPS = sys.float_info.epsilon

MAX_DEPTH = 40
INITIAL_PANELS = 8
# a panel whose halving moves the estimate by less than this many ulps of
# its own value is at roundoff; refining further cannot help
ROUNDOFF_ULPS = 64.0

Vector = Sequence[float]
Path = Callable[[float], Vector]


def adaptive_simpson(
    func: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-14,
    max_depth: int = MAX_DEPTH,
) -> float:
    """Integrate ``func`` over ``[a, b]`` by recursive interval halving.

    A panel is accepted once the halved estimate moves by less than
    ``15 * eps`` (with the usual Richardson correction added), or by less
    than a few ulps of itself. ``eps`` is
    the larger of ``abs_tol`` and ``rel_tol`` times a coarse first estimate
    of the integral of ``|func|``, shared out over the panels.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    h = (b - a) / INITIAL_PANELS
    xs = [a + i * h for i in range(INITIAL_PANELS)] + [b]
    mids = [0.5 * (xs[i] + xs[i + 1]) for i in range(INITIAL_PANELS)]
    fx = [func(x) for x in xs]
    fm = [func(x) for x in mids]
    wholes = [(xs[i + 1] - xs[i]) / 6.0 * (fx[i] + 4.0 * fm[i] + fx[i + 1]) for i in range(INITIAL_PANELS)]
    scale = sum(abs(w) for w in wholes)
    eps = max(abs_tol, rel_tol * scale)

    total = 0.0
    for i in range(INITIAL_PANELS):
        # explicit stack; entries are (a, b, fa, fm, fb, whole, eps, depth)
        stack = [(xs[i], xs[i + 1], fx[i], fm[i], fx[i + 1], wholes[i], eps / INITIAL_PANELS, 0)]
        while stack:
            lo, hi, flo, fmid, fhi, whole, tol, depth = stack.pop()
            mid = 0.5 * (lo + hi)
            lm = 0.5 * (lo + mid)
            rm = 0.5 * (mid + hi)
            flm = func(lm)
            frm = func(rm)
            left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
            right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
            delta = left + right - whole
            if abs(delta) <= max(15.0 * tol, ROUNDOFF_ULPS * EPS * (abs(left) + abs(right))):
                total += left + right + delta / 15.0
            elif depth >= max_depth:
                raise NoConvergence(
                    f"adaptive Simpson exceeded depth {max_depth} near [{lo:.6g}, {hi:.6g}]"
                )
            else:
                stack.append((lo, mid, flo, flm, fmid, left, tol / 2.0, depth + 1))
                stack.append((mid, hi, fmid, frm, fhi, right, tol / 2.0, depth + 1))
    return sign * total


def numerical_derivative(curve: Path, scale: float) -> Path:
    """Fourth-order central difference of a vector-valued path.

    The stencil reaches ``2 h`` beyond the evaluation point, so ``curve``
    must be defined slightly past the integration limits.
    """
    h = 1e-3 * scale

    def derivative(t: float) -> tuple[float, ...]:
        p2 = curve(t + 2 * h)
        p1 = curve(t + h)
        m1 = curve(t - h)
        m2 = curve(t - 2 * h)
        return tuple((-a + 8 * b - 8 * c + d) / (12 * h) for a, b, c, d in zip(p2, p1, m1, m2))

    return derivative


def arc_length_quadrature(
    curve: Path,
    t1: float,
    t2: float,
    tol: float = 1e-10,
    derivative: Path | None = None,
    abs_tol: float = 1e-14,
) -> float:
    """Length of ``curve`` between parameters ``t1 <= t2``.

    Integrates the speed ``|curve'(t)|``; pass ``derivative`` when it is
    known in closed form, otherwise a finite-difference one is used.
    """
    if t2 < t1:
        raise ValueError(f"t1={t1} must not exceed t2={t2}")
    if t1 == t2:
        return 0.0
    if derivative is None:
        derivative = numerical_derivative(curve, t2 - t1)

    def speed(t: float) -> float:
        return math.sqrt(sum(c * c for c in derivative(t)))

    return adaptive_simpson(speed, t1, t2, rel_tol=tol, abs_tol=abs_tol)


def boundary_area(
    pieces: Sequence[tuple[Path, Path, float, float]],
    tol: float = 1e-12,
    abs_tol: float = 1e-15,
) -> float:
    """Signed area enclosed by a closed chain of planar paths (Green's theorem).

    Each piece is ``(path, derivative, s0, s1)`` with ``path(s) -> (u, v)``;
    the pieces must join end to end. Counter-clockwise chains give positive
    area.
    """
    # Radial pieces integrate to zero, so a purely relative tolerance would
    # chase roundoff there; scale the absolute tolerance by the whole chain.
    scale = 0.0
    for path, deriv, s0, s1 in pieces:
        h = (s1 - s0) / 16
        for i in range(16):
            s = s0 + (i + 0.5) * h
            u, v = path(s)[:2]
            du, dv = deriv(s)[:2]
            scale += 0.5 * (abs(u * dv) + abs(v * du)) * abs(h)
    eps = max(abs_tol, tol * scale)

    total = []
    for path, deriv, s0, s1 in pieces:

        def integrand(s, path=path, deriv=deriv):
            u, v = path(s)[:2]
            du, dv = deriv(s)[:2]
            return 0.5 * (u * dv - v * du)

        total.append(adaptive_simpson(integrand, s0, s1, rel_tol=tol, abs_tol=eps))
    return math.fsum(total)
