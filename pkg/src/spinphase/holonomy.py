"""Horizontal transport, the SO(3) geometric phase and the generalized solid angle.

Along a segment with direction ``v(t) = beta(t)`` the transverse axis obeys

    du/dt = -(dv/dt . u) v

and the frame rotation ``X`` with ``u(t) = X(t) u(0)``, ``v(t) = X(t) v(0)``
obeys ``dX/dt = (dv/dt v^T - v dv/dt^T) X``.  Both are linear, so one RK4 step
is a 3x3 matrix built from the generator at the step's start, midpoint and
end.  Products of step matrices are formed in chunks of 64 steps; the carried
frame is projected back onto SO(3) (and ``u`` renormalized) after every chunk.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InputError, NotLiftableError
from .loopgeom import check_liftable, find_zeros, project_to_rp2, segment_loop
from .rotations import (
    any_perpendicular,
    axis_angle_of,
    project_to_rotation,
    rotation_from_axis_angle,
)
from .spinstate import (
    bloch_vector,
    chord_from_state,
    fubini_study_distance,
    states_from_chords,
)

DEFAULT_STEPS = 10_000
CHUNK = 64
BLOCK = 1 << 15  # steps evaluated at once; bounds memory for long runs
TOL_LIFT = 1e-7
RP2_STEPS = 256  # minimum number of adaptive steps across the whole path


# --- RK4 for linear systems -------------------------------------------------

def rk4_step_increments(A1, A2, A4, h):
    """Increments ``E = M - I`` of the RK4 step matrices for ``y' = A(t) y``.

    One step is ``y_{k+1} = (I + E_k) y_k``.  ``A1, A2, A4`` hold the generator
    at the start, midpoint and end of each step, shape ``(n, 3, 3)``.  Keeping
    the identity out of the arithmetic preserves the low-order bits of the
    small increments, which matters for runs of a million steps.
    """
    A21 = A2 @ A1
    A22 = A2 @ A2
    A42 = A4 @ A2
    A221 = A2 @ A21
    A422 = A4 @ A22
    return (
        h / 6.0 * (A1 + 4.0 * A2 + A4)
        + h * h / 6.0 * (A21 + A22 + A42)
        + h ** 3 / 12.0 * (A221 + A422)
        + h ** 4 / 24.0 * (A4 @ A221)
    )


def _chunk_prefix(E):
    """Running products within consecutive chunks of ``CHUNK`` steps, as increments.

    Returns ``D`` with ``I + D[k] = (I + E[k]) ... (I + E[c])`` where ``c``
    starts k's chunk.
    """
    D = E.copy()
    pos = np.arange(len(E)) % CHUNK
    for offset in range(1, CHUNK):
        idx = np.nonzero(pos == offset)[0]
        if len(idx) == 0:
            break
        D[idx] = E[idx] + D[idx - 1] + E[idx] @ D[idx - 1]
    return D


def _reorthonormalize(X):
    """One Newton-Schulz step toward the polar factor of a nearly orthogonal ``X``.

    For ``X^T X = I + O(d)`` this lands within ``O(d^2)`` of the nearest
    rotation while rounding only the tiny correction term, unlike an SVD
    which perturbs every entry at the level of machine precision.
    """
    return X + 0.5 * X @ (np.eye(3) - X.T @ X)


def _generators(seg, t, side):
    v, dv = seg.beta_jet(t, side)
    A = dv[:, :, None] * v[:, None, :] - v[:, :, None] * dv[:, None, :]
    B = -v[:, :, None] * dv[:, None, :]
    return v, A, B


def _normalize_transverse(u, v):
    u = u - v * np.sum(u * v, axis=-1, keepdims=True)
    return u / np.linalg.norm(u, axis=-1, keepdims=True)


def _integrate_interval(seg, a, b, m, X, u, keep):
    """Advance ``(X, u)`` over ``[a, b]`` in ``m`` RK4 steps."""
    h = (b - a) / m
    times, us, Xs = [], [], []
    for k0 in range(0, m, BLOCK):
        k1 = min(m, k0 + BLOCK)
        tk = a + h * np.arange(k0, k1 + 1)
        tk[-1] = b if k1 == m else tk[-1]
        side = np.ones(len(tk), dtype=int)
        side[-1] = -1 if k1 == m else 1
        v_nodes, A_nodes, B_nodes = _generators(seg, tk, side)
        _, A_mid, B_mid = _generators(seg, tk[:-1] + 0.5 * h, 1)
        DA = _chunk_prefix(rk4_step_increments(A_nodes[:-1], A_mid, A_nodes[1:], h))
        DB = _chunk_prefix(rk4_step_increments(B_nodes[:-1], B_mid, B_nodes[1:], h))
        n = k1 - k0
        ends = list(range(CHUNK - 1, n, CHUNK))
        if not ends or ends[-1] != n - 1:
            ends.append(n - 1)
        if keep:
            Xb = np.empty((n, 3, 3))
            ub = np.empty((n, 3))
        start = 0
        for e in ends:
            if keep:
                Xb[start:e + 1] = X + DA[start:e + 1] @ X
                ub[start:e + 1] = u + DB[start:e + 1] @ u
            X = _reorthonormalize(X + DA[e] @ X)
            u = _normalize_transverse(u + DB[e] @ u, v_nodes[e + 1])
            start = e + 1
        if keep:
            times.append(tk[1:])
            us.append(_normalize_transverse(ub, v_nodes[1:]))
            Xs.append(Xb)
    return X, u, times, us, Xs


@dataclass
class FrameTransport:
    """Horizontal transport along one segment."""

    times: np.ndarray
    u: np.ndarray  # (n, 3) transverse axis at each time
    X: Optional[np.ndarray]  # (n, 3, 3) frame rotations, or None when not kept
    R: np.ndarray  # X at the segment end
    consistency: float  # |u(end) - R u(start)|


def transport_frame(seg, u0, steps=DEFAULT_STEPS, keep_samples=True):
    """Integrate the horizontal transport equations along one segment."""
    if steps < 16:
        raise InputError("transport needs at least 16 steps")
    u0 = np.asarray(u0, dtype=float)
    v0 = seg.beta(np.array([seg.t0]))[0]
    if abs(np.linalg.norm(u0) - 1.0) > 1e-9 or abs(u0 @ v0) > 1e-9:
        raise InputError("seed direction must be a unit vector normal to beta at the segment start")
    cuts = seg.subintervals()
    lengths = np.diff(cuts)
    counts = np.maximum(16, np.round(steps * lengths / lengths.sum()).astype(int))
    X = np.eye(3)
    u = u0.copy()
    times, us, Xs = [np.array([seg.t0])], [u0[None]], [np.eye(3)[None]]
    for a, b, m in zip(cuts[:-1], cuts[1:], counts):
        X, u, t_i, u_i, X_i = _integrate_interval(seg, a, b, int(m), X, u, keep_samples)
        times += t_i
        us += u_i
        Xs += X_i
    if not keep_samples:
        times = [np.array([seg.t0, seg.t1])]
        us = [u0[None], u[None]]
        Xs = None
    return FrameTransport(
        times=np.concatenate(times),
        u=np.concatenate(us),
        X=None if Xs is None else np.concatenate(Xs),
        R=X,
        consistency=float(np.linalg.norm(u - X @ u0)),
    )


# --- geometric phase ----------------------------------------------------------

@dataclass
class HolonomyResult:
    """SO(3) geometric phase of a loop and its solid-angle decomposition.

    ``R = R_{alpha_end}(twist) R_k(omega1)`` where ``alpha_end = R alpha_start``;
    ``omega2 = |twist| = arccos(k . R k)`` is the generalized solid angle.
    """

    R: np.ndarray
    factors: List[np.ndarray]
    zeros: np.ndarray
    alpha_start: np.ndarray
    alpha_end: np.ndarray
    k: np.ndarray
    omega1: float
    omega2: float
    twist: float
    u0: np.ndarray
    transports: List[FrameTransport] = field(repr=False, default_factory=list)

    @property
    def axis(self):
        return axis_angle_of(self.R).axis

    @property
    def angle(self):
        return axis_angle_of(self.R).angle

    def decomposition(self):
        """``R_{alpha_end}(twist) @ R_k(omega1)``, equal to ``R`` up to round-off."""
        return rotation_from_axis_angle(self.alpha_end, self.twist) @ rotation_from_axis_angle(
            self.k, self.omega1
        )


def solid_angle_decomposition(R, a0, k=None):
    """``(a1, k, omega1, omega2, twist)`` for a rotation carrying ``a0`` to ``a1 = R a0``.

    ``k`` is the unit normal to ``a0`` and ``a1``.  When they are (anti)parallel
    any normal works; a deterministic one is chosen unless ``k`` is given.
    """
    a0 = np.asarray(a0, dtype=float)
    a1 = R @ a0
    n = np.cross(a0, a1)
    if k is None:
        k = n / np.linalg.norm(n) if np.linalg.norm(n) > 1e-9 else any_perpendicular(a0)
    omega1 = float(np.arctan2(np.linalg.norm(np.cross(a0, a1)), a0 @ a1))
    Rk = R @ k
    omega2 = float(np.arccos(np.clip(k @ Rk, -1.0, 1.0)))
    twist = float(np.arctan2(np.cross(k, Rk) @ a1, k @ Rk))
    return a1, k, omega1, omega2, twist


def geometric_phase(loop, steps_per_segment=DEFAULT_STEPS, u0=None, keep_samples=False, **tols):
    """Geometric phase ``R = R_{n+1} ... R_1`` of a liftable loop."""
    zeros = find_zeros(loop, tols.get("tol_zero", 1e-8))
    report = check_liftable(loop, zeros, **tols)
    if not report.liftable:
        raise NotLiftableError(report.describe(), report)
    segs = segment_loop(loop, report=report)
    a0 = segs[0].beta(np.array([0.0]))[0]
    u = any_perpendicular(a0) if u0 is None else np.asarray(u0, dtype=float)
    seed = u.copy()
    R = np.eye(3)
    factors, transports = [], []
    for j, seg in enumerate(segs):
        if j > 0:
            # the transverse axis is shared across a visit to the center
            vstart = seg.beta(np.array([seg.t0]))[0]
            if abs(u @ vstart) > 1e-8:
                raise RuntimeError("transverse axis lost orthogonality across a center visit")
            u = _normalize_transverse(u, vstart)
        ft = transport_frame(seg, u, steps_per_segment, keep_samples)
        transports.append(ft)
        factors.append(ft.R)
        R = ft.R @ R
        u = ft.u[-1]
    R = project_to_rotation(R)
    a1, k, omega1, omega2, twist = solid_angle_decomposition(R, a0)
    return HolonomyResult(R, factors, zeros.times, a0, a1, k, omega1, omega2, twist, seed, transports)


def generalized_solid_angle(result):
    """``arccos(k . R k)`` for a holonomy result, in ``[0, pi]``."""
    k = result.k
    return float(np.arccos(np.clip(k @ result.R @ k, -1.0, 1.0)))


# --- horizontal lift ------------------------------------------------------------

@dataclass
class LiftPath:
    times: np.ndarray
    states: np.ndarray  # (n, 3) complex, normalized
    r: np.ndarray
    v: np.ndarray
    u: np.ndarray
    phase: HolonomyResult = field(repr=False, default=None)

    def bloch(self):
        return bloch_vector(self.states)

    def fs_length(self):
        return fs_length(self.states)


def fs_length(states):
    """Fubini-Study length of a sampled state path."""
    return float(np.sum(fubini_study_distance(states[:-1], states[1:])))


def horizontal_lift(loop, psi0, steps=DEFAULT_STEPS, **tols):
    """Horizontal lift of ``loop`` starting at the state ``psi0``."""
    x0 = loop.position(0.0)
    s0 = bloch_vector(psi0)
    if np.linalg.norm(s0 - x0) > 1e-8:
        raise InputError("initial state does not lie over gamma(0)")
    zeros = find_zeros(loop, tols.get("tol_zero", 1e-8))
    report = check_liftable(loop, zeros, **tols)
    if not report.liftable:
        raise NotLiftableError(report.describe(), report)
    segs = segment_loop(loop, report=report)
    a0 = segs[0].beta(np.array([0.0]))[0]
    chord = chord_from_state(psi0)
    if chord.u is None:
        u0 = any_perpendicular(a0)
    else:
        u0 = chord.u
        if abs(u0 @ a0) > 1e-7:
            raise InputError(
                "initial state over the center must have its axis normal to the exit direction"
            )
        u0 = _normalize_transverse(u0, a0)
    result = geometric_phase(loop, steps, u0=u0, keep_samples=True, **tols)
    times, r, v, u = [], [], [], []
    for j, (seg, ft) in enumerate(zip(segs, result.transports)):
        t = ft.times if j == 0 else ft.times[1:]
        uu = ft.u if j == 0 else ft.u[1:]
        times.append(t)
        u.append(uu)
        v.append(seg.beta(t))
        r.append(np.linalg.norm(loop.position(t, np.where(t >= seg.t1, -1, 1)), axis=-1))
    times, r, v, u = (np.concatenate(x) for x in (times, r, v, u))
    r = np.clip(r, 0.0, 1.0)
    states = states_from_chords(r, v, u)
    return LiftPath(times, states, r, v, u, result)


# --- Theorem-2 cross-check: transport over the RP2 projection ---------------

def vertical_displacement_rp2(alpha, steps=RP2_STEPS, p0=None):
    """Vertical displacement of a path in RP2 given by a continuous representative.

    A point ``p`` normal to the direction ``w`` is carried with
    ``dp/dt = -(dw/dt . p) w``; the result is the rotation taking the frame
    ``(w, p)`` at the start to the frame at the end.  Integrated with an
    adaptive Dormand-Prince scheme, independently of :func:`transport_frame`.
    """
    w0 = alpha.start()
    p0 = any_perpendicular(w0) if p0 is None else np.asarray(p0, dtype=float)
    p = p0
    if abs(p @ w0) > 1e-9:
        raise InputError("transported point must be normal to the starting direction")
    total = alpha.segments[-1].t1 - alpha.segments[0].t0
    prev_end = None
    for j, seg in enumerate(alpha.segments):
        w_start = alpha.direction_jet(j, seg.t0)[0][0]
        if prev_end is not None and np.linalg.norm(w_start - prev_end) > 1e-8:
            raise InputError("representative path is discontinuous")
        cuts = seg.subintervals()
        for a, b in zip(cuts[:-1], cuts[1:]):
            def rhs(t, y, j=j, a=a, b=b):
                side = -1 if t >= b else 1
                tt = min(max(t, a), b)
                w, dw = alpha.direction_jet(j, np.array([tt]), side)
                return -(dw[0] @ y) * w[0]

            sol = solve_ivp(rhs, (a, b), p, method="DOP853", rtol=1e-12, atol=1e-13,
                            max_step=max(total / steps, 1e-12))
            p = sol.y[:, -1]
            wb = alpha.direction_jet(j, np.array([b]), -1)[0][0]
            p = p - wb * (p @ wb)
            p /= np.linalg.norm(p)
        prev_end = alpha.direction_jet(j, np.array([seg.t1]), -1)[0][0]
    w1 = alpha.end()
    F0 = np.column_stack([w0, p0, np.cross(w0, p0)])
    F1 = np.column_stack([w1, p, np.cross(w1, p)])
    return project_to_rotation(F1 @ F0.T)


def rp2_phase(loop, steps=RP2_STEPS, **tols):
    return vertical_displacement_rp2(project_to_rp2(loop, **tols), steps)
