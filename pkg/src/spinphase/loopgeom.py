"""Loops in the Bloch ball, their visits to the center, and their projections.

A :class:`Loop` is a chain of pieces on consecutive parameter intervals
covering ``[0, 1]``.  Each piece knows its position, velocity and
acceleration, so quantities that only exist as one-sided limits (the
direction in which a loop leaves or enters the center, say) can be evaluated
exactly at the joints.
"""

from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import InputError, NonIsolatedZeroError, NotLiftableError
from .rotations import _rodrigues

TOL_ZERO = 1e-8
TOL_KINK = 1e-6
TOL_SPEED = 1e-8
TOL_CLOSE = 1e-9
TOL_RADIUS = 1e-9

# a jet maps local times (n,) to position, velocity, acceleration, each (n, 3)
Jet = Callable[[np.ndarray], tuple]


@dataclass(frozen=True)
class Piece:
    t0: float
    t1: float
    jet: Jet


def _unit(x):
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


class Loop:
    """Piecewise-smooth closed path ``gamma : [0, 1] -> ball``."""

    def __init__(self, pieces, kind="analytic", name=None, check_closed=True):
        pieces = list(pieces)
        if not pieces:
            raise InputError("a loop needs at least one piece")
        if pieces[0].t0 != 0.0 or pieces[-1].t1 != 1.0:
            raise InputError("loop pieces must cover [0, 1]")
        for a, b in zip(pieces, pieces[1:]):
            if a.t1 != b.t0:
                raise InputError("loop pieces must be contiguous")
        for p in pieces:
            if not p.t1 > p.t0:
                raise InputError("loop pieces must have positive duration")
        self.pieces = pieces
        self.kind = kind
        self.name = name
        self.breakpoints = np.array([p.t0 for p in pieces] + [1.0])

        for a, b in zip(pieces, pieces[1:]):
            pa = a.jet(np.array([a.t1]))[0][0]
            pb = b.jet(np.array([b.t0]))[0][0]
            if np.linalg.norm(pa - pb) > TOL_CLOSE:
                raise InputError(f"loop is discontinuous at t = {a.t1:g}")
        if check_closed:
            gap = np.linalg.norm(self.position(0.0) - self.position(1.0))
            if gap > TOL_CLOSE:
                raise InputError(f"loop is not closed: |gamma(1) - gamma(0)| = {gap:.3g}")
        grid = np.linspace(0.0, 1.0, 4097)
        radius = np.linalg.norm(self.position(grid), axis=-1).max()
        if radius > 1.0 + TOL_RADIUS:
            raise InputError(f"loop leaves the Bloch ball (max |gamma| = {radius:.6g})")

    def __repr__(self):
        return f"Loop(name={self.name!r}, kind={self.kind!r}, pieces={len(self.pieces)})"

    def piece_index(self, t, side=1):
        """Index of the piece used at ``t``; ``side=-1`` picks the left piece at joints."""
        t = np.asarray(t, dtype=float)
        how = "right" if side > 0 else "left"
        idx = np.searchsorted(self.breakpoints, t, side=how) - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def jet(self, t, side=1):
        """Position, velocity and acceleration at ``t`` (scalar or array)."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if np.any((t < 0.0) | (t > 1.0)):
            raise InputError("loop parameter must lie in [0, 1]")
        side = np.broadcast_to(np.asarray(side), t.shape)
        idx = np.where(side > 0, self.piece_index(t, 1), self.piece_index(t, -1))
        out = [np.empty(t.shape + (3,)) for _ in range(3)]
        for i in np.unique(idx):
            mask = idx == i
            for o, val in zip(out, self.pieces[i].jet(t[mask])):
                o[mask] = val
        if scalar:
            return tuple(o[0] for o in out)
        return tuple(out)

    def position(self, t, side=1):
        return self.jet(t, side)[0]

    def velocity(self, t, side=1):
        return self.jet(t, side)[1]

    def acceleration(self, t, side=1):
        return self.jet(t, side)[2]

    __call__ = position

    def reversed(self):
        """The same loop traversed backwards, ``t -> 1 - t``."""
        pieces = []
        for p in reversed(self.pieces):
            def jet(t, f=p.jet):
                x, v, a = f(1.0 - t)
                return x, -v, a
            pieces.append(Piece(1.0 - p.t1, 1.0 - p.t0, jet))
        return Loop(pieces, kind=self.kind, name=_suffix(self.name, "reversed"))

    def reparametrized(self, phi, dphi, ddphi):
        """Loop ``gamma(phi(t))`` for an increasing bijection ``phi`` of [0, 1].

        ``phi`` must map the breakpoints of the new loop onto those of this
        one; the new breakpoints are found by inverting ``phi``.
        """
        new_breaks = [0.0]
        for b in self.breakpoints[1:-1]:
            new_breaks.append(brentq(lambda s: phi(s) - b, 0.0, 1.0, xtol=1e-15))
        new_breaks.append(1.0)
        pieces = []
        for p, s0, s1 in zip(self.pieces, new_breaks, new_breaks[1:]):
            def jet(s, f=p.jet):
                x, v, a = f(phi(s))
                d1 = dphi(s)[:, None]
                d2 = ddphi(s)[:, None]
                return x, v * d1, a * d1 ** 2 + v * d2
            pieces.append(Piece(s0, s1, jet))
        return Loop(pieces, kind=self.kind, name=_suffix(self.name, "reparametrized"))

    def sample(self, n):
        """``n`` evenly spaced samples as rows ``(t, x, y, z)``."""
        t = np.linspace(0.0, 1.0, n)
        return np.column_stack([t, self.position(t)])


def _suffix(name, tag):
    return None if name is None else f"{name}:{tag}"


# --- building loops -------------------------------------------------------

def _piece_on(t0, t1, local):
    """Wrap a jet defined on s in [0, 1] into a piece on [t0, t1]."""
    dt = t1 - t0

    def jet(t):
        x, v, a = local((np.asarray(t, dtype=float) - t0) / dt)
        return x, v / dt, a / dt ** 2

    return Piece(t0, t1, jet)


def function_loop(f, df, ddf, name=None, kind="analytic"):
    """Single-piece loop from vectorized callables for gamma and its derivatives."""
    def jet(t):
        return f(t), df(t), ddf(t)

    return Loop([Piece(0.0, 1.0, jet)], kind=kind, name=name)


def radial(direction, r0, r1):
    """Local jet of ``(r0 + (r1 - r0) s) * direction``."""
    d = _unit(np.asarray(direction, dtype=float))

    def jet(s):
        s = np.asarray(s, dtype=float)[:, None]
        return (r0 + (r1 - r0) * s) * d, np.broadcast_to((r1 - r0) * d, s.shape[:1] + (3,)), np.zeros(s.shape[:1] + (3,))

    return jet


def line(start, end):
    p0 = np.asarray(start, dtype=float)
    p1 = np.asarray(end, dtype=float)

    def jet(s):
        s = np.asarray(s, dtype=float)[:, None]
        n = s.shape[:1] + (3,)
        return p0 + (p1 - p0) * s, np.broadcast_to(p1 - p0, n), np.zeros(n)

    return jet


def arc(axis, start, angle, center=(0.0, 0.0, 0.0)):
    """Local jet of ``center + R_axis(angle * s) (start - center)``."""
    n = _unit(np.asarray(axis, dtype=float))
    c = np.asarray(center, dtype=float)
    w = np.asarray(start, dtype=float) - c

    def jet(s):
        s = np.asarray(s, dtype=float)
        rw = _rodrigues(np.broadcast_to(n, s.shape + (3,)), angle * s) @ w
        v = angle * np.cross(n, rw)
        a = angle * np.cross(n, v)
        return c + rw, v, a

    return jet


def piecewise_loop(locals_, durations=None, name=None):
    """Concatenate local jets, each run over its share of [0, 1]."""
    k = len(locals_)
    if durations is None:
        durations = np.ones(k)
    durations = np.asarray(durations, dtype=float)
    if durations.shape != (k,) or np.any(durations <= 0):
        raise InputError("piece durations must be positive, one per piece")
    edges = np.concatenate([[0.0], np.cumsum(durations) / durations.sum()])
    edges[-1] = 1.0
    pieces = [_piece_on(edges[i], edges[i + 1], locals_[i]) for i in range(k)]
    return Loop(pieces, kind="piecewise", name=name)


def sampled_loop(times, points, closed=True, name=None):
    """Loop interpolating samples with a cubic spline (C2, so derivatives exist)."""
    times = np.asarray(times, dtype=float)
    points = np.asarray(points, dtype=float)
    if times.ndim != 1 or points.shape != times.shape + (3,):
        raise InputError("samples must be rows (t, x, y, z)")
    if len(times) < 4:
        raise InputError("a sampled loop needs at least 4 samples")
    if np.any(np.diff(times) <= 0):
        raise InputError("sample times must be strictly increasing")
    if times[0] != 0.0 or times[-1] != 1.0:
        raise InputError("sample times must start at 0 and end at 1")
    gap = np.linalg.norm(points[0] - points[-1])
    if closed and gap > TOL_CLOSE:
        raise InputError(f"samples are declared closed but |gamma(1) - gamma(0)| = {gap:.3g}")
    if not closed:
        raise InputError("only closed sampled paths describe loops")
    spline = CubicSpline(times, points, axis=0)
    d1, d2 = spline.derivative(1), spline.derivative(2)

    def jet(t):
        return spline(t), d1(t), d2(t)

    return Loop([Piece(0.0, 1.0, jet)], kind="sampled", name=name)


# --- zeros and liftability --------------------------------------------------

@dataclass(frozen=True)
class ZeroSet:
    """Times ``0 = a_0 < a_1 < ... < a_{n+1} = 1``; ``at_center`` flags zeros."""

    times: np.ndarray
    at_center: np.ndarray

    @property
    def interior(self):
        return self.times[1:-1]


def find_zeros(loop, tol_zero=TOL_ZERO, grid=2049):
    """Locate the visits of ``loop`` to the center of the ball."""
    found = []
    for i, p in enumerate(loop.pieces):
        t = np.linspace(p.t0, p.t1, grid)
        x, v, _ = p.jet(t)
        r = np.linalg.norm(x, axis=-1)
        small = r < tol_zero
        if np.any(small[1:] & small[:-1]):
            bad = t[1:][small[1:] & small[:-1]][0]
            raise NonIsolatedZeroError(
                f"loop rests at the center over an interval near t = {bad:.6g}"
            )
        for end in (0, -1):
            if small[end]:
                found.append(t[end])
        g = np.einsum("ij,ij->i", x, v)  # half the derivative of |gamma|^2

        def dg(s, jet=p.jet):
            xs, vs, _ = jet(np.array([s]))
            return float(xs[0] @ vs[0])

        for k in range(1, grid):
            # |gamma|^2 has a local minimum in (t[k-1], t[k]]
            if g[k - 1] < 0.0 < g[k]:
                ts = brentq(dg, t[k - 1], t[k], xtol=1e-15, rtol=4 * np.finfo(float).eps)
                if np.linalg.norm(p.jet(np.array([ts]))[0][0]) < tol_zero:
                    found.append(ts)
            elif g[k] == 0.0 and g[k - 1] < 0.0 and small[k]:
                found.append(t[k])
        # minima right next to the piece ends are caught by the endpoint test
        # or by the neighbouring piece
    found = np.sort(np.array(found + [0.0, 1.0]))
    keep = [found[0]]
    for a in found[1:]:
        if a - keep[-1] > 1e-9:
            keep.append(a)
        elif a == 1.0:
            keep[-1] = 1.0
    keep[0] = 0.0
    times = np.array(keep)
    if len(times) == 1:
        times = np.array([0.0, 1.0])
    at_center = np.linalg.norm(loop.position(times), axis=-1) < tol_zero
    return ZeroSet(times, at_center)


@dataclass
class LiftabilityReport:
    liftable: bool
    zeros: ZeroSet
    kinks: List[tuple] = field(default_factory=list)  # (t, angle between tangents)
    stalls: List[float] = field(default_factory=list)  # zero times without a tangent

    def describe(self):
        if self.liftable:
            return "liftable"
        parts = [f"kink at t={t:.12g} (tangents differ by {a:.3g} rad)" for t, a in self.kinks]
        parts += [f"no tangent at center visit t={t:.12g}" for t in self.stalls]
        return "not liftable: " + "; ".join(parts)


def check_liftable(loop, zeros=None, tol_zero=TOL_ZERO, tol_kink=TOL_KINK, tol_speed=TOL_SPEED):
    """Whether the loop is differentiable at each of its visits to the center."""
    if zeros is None:
        zeros = find_zeros(loop, tol_zero)
    kinks, stalls = [], []
    for t, at0 in zip(zeros.times, zeros.at_center):
        if not at0:
            continue
        sides = [s for s, ok in ((-1, t > 0.0), (1, t < 1.0)) if ok]
        tangents = {}
        for s in sides:
            vel = loop.velocity(t, s)
            speed = np.linalg.norm(vel)
            if speed <= tol_speed:
                stalls.append(float(t))
                break
            tangents[s] = vel / speed
        else:
            if len(tangents) == 2:
                c = np.clip(tangents[-1] @ tangents[1], -1.0, 1.0)
                angle = float(np.arccos(c))
                if angle > tol_kink:
                    kinks.append((float(t), angle))
    return LiftabilityReport(not kinks and not stalls, zeros, kinks, sorted(set(stalls)))


# --- segments ---------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """Piece of a loop between consecutive visits to the center."""

    index: int
    t0: float
    t1: float
    loop: Loop
    start_at_center: bool
    end_at_center: bool

    def subintervals(self):
        """Split points: the loop's breakpoints falling inside the segment."""
        b = self.loop.breakpoints
        inner = b[(b > self.t0) & (b < self.t1)]
        return np.concatenate([[self.t0], inner, [self.t1]])

    def beta_jet(self, t, side=1):
        """``beta`` and its time derivative, using one-sided limits at the center."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        side = np.broadcast_to(np.asarray(side), t.shape).copy()
        side[t <= self.t0] = 1
        side[t >= self.t1] = -1
        x, v, a = self.loop.jet(t, side)
        r = np.linalg.norm(x, axis=-1)
        beta = np.empty_like(x)
        dbeta = np.empty_like(x)
        ok = r > 0.0
        start = (t <= self.t0) & self.start_at_center
        end = (t >= self.t1) & self.end_at_center
        ok &= ~(start | end)
        if np.any(ok):
            b = x[ok] / r[ok, None]
            vv = v[ok]
            beta[ok] = b
            dbeta[ok] = (vv - b * np.einsum("ij,ij->i", b, vv)[:, None]) / r[ok, None]
        for mask, sign in ((start, 1.0), (end, -1.0)):
            if np.any(mask):
                vv, aa = v[mask], a[mask]
                speed = np.linalg.norm(vv, axis=-1)
                if np.any(speed <= TOL_SPEED):
                    raise NotLiftableError("no tangent direction at a visit to the center")
                tan = vv / speed[:, None]
                perp = aa - tan * np.einsum("ij,ij->i", tan, aa)[:, None]
                beta[mask] = sign * tan
                dbeta[mask] = sign * perp / (2.0 * speed[:, None])
        stray = ~ok & ~start & ~end
        if np.any(stray):
            raise InputError("loop passes through the center away from a located zero")
        return beta, dbeta

    def beta(self, t, side=1):
        return self.beta_jet(t, side)[0]


def segment_loop(loop, zeros=None, report=None, **tols):
    """Cut a liftable loop at its visits to the center."""
    if report is None:
        report = check_liftable(loop, zeros, **tols)
    if not report.liftable:
        raise NotLiftableError(report.describe(), report)
    z = report.zeros
    segs = []
    # only genuine visits to the center split the loop; 0 and 1 are always ends
    cuts = [i for i in range(len(z.times)) if i in (0, len(z.times) - 1) or z.at_center[i]]
    for j, (i0, i1) in enumerate(zip(cuts, cuts[1:]), start=1):
        segs.append(Segment(j, float(z.times[i0]), float(z.times[i1]), loop,
                            bool(z.at_center[i0]), bool(z.at_center[i1])))
    return segs


# --- projection to RP2 ------------------------------------------------------

@dataclass(frozen=True)
class RP2Path:
    """Continuous representative ``w`` of the projection of a loop to RP2.

    ``w = signs[j] * beta_j`` on segment ``j``; the sign flips at every
    interior visit to the center, which makes ``w`` continuous.
    """

    segments: tuple
    signs: tuple

    @property
    def flips(self):
        return [s.t1 for s in self.segments[:-1]]

    def segment_at(self, t):
        for s, sign in zip(self.segments, self.signs):
            if t <= s.t1:
                return s, sign
        return self.segments[-1], self.signs[-1]

    def direction_jet(self, seg_index, t, side=1):
        seg = self.segments[seg_index]
        b, db = seg.beta_jet(t, side)
        sign = self.signs[seg_index]
        return sign * b, sign * db

    def start(self):
        return self.direction_jet(0, 0.0)[0][0]

    def end(self):
        return self.direction_jet(len(self.segments) - 1, 1.0)[0][0]

    @property
    def closed(self):
        return abs(abs(self.start() @ self.end()) - 1.0) < 1e-9

    def evaluate(self, t):
        """Representative directions at the times ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(t.shape + (3,))
        for k, (s, sign) in enumerate(zip(self.segments, self.signs)):
            lo = s.t0 if k == 0 else np.nextafter(s.t0, 2.0)
            mask = (t >= lo) & (t <= s.t1)
            if np.any(mask):
                out[mask] = sign * s.beta(t[mask])
        return out


def project_to_rp2(loop, segments=None, **tols):
    if segments is None:
        segments = segment_loop(loop, **tols)
    signs = tuple((-1.0) ** k for k in range(len(segments)))
    path = RP2Path(tuple(segments), signs)
    for k in range(len(segments) - 1):
        left = path.direction_jet(k, segments[k].t1)[0][0]
        right = path.direction_jet(k + 1, segments[k + 1].t0)[0][0]
        if np.linalg.norm(left - right) > 1e-8:
            raise InputError(f"projection is discontinuous at t = {segments[k].t1:.6g}")
    return path
