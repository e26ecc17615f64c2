"""Brute-force references that share no code with the transport integrator."""

import numpy as np

from .errors import DegeneracyError, InputError
from .rotations import rotation_between, spin1_rep
from .spinstate import DEGENERACY_TOL, bloch_vector, normalize

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
_EZ = np.array([0.0, 0.0, 1.0])


def _fiber_frames(points):
    """For each Bloch vector: the spin-1 rotation D(Q) with Q z = s/|s|, and |s|."""
    n = np.linalg.norm(points, axis=-1)
    if np.any(n >= 1.0 - DEGENERACY_TOL):
        raise DegeneracyError("loop reaches the boundary, where the fiber is a single state")
    if np.any(n <= DEGENERACY_TOL):
        raise InputError("greedy oracle needs a loop that avoids the center")
    Q = np.stack([rotation_between(_EZ, p / m) for p, m in zip(points, n)])
    return spin1_rep(Q), n


def _fiber_distance(c, a, b, t):
    """FS distance from ``c`` to ``(a e^{-it}, 0, b e^{it})`` (both normalized)."""
    cand = np.array([a * np.exp(-1j * t), 0.0, b * np.exp(1j * t)])
    overlap = np.vdot(c, cand)
    gap = np.linalg.norm(cand - np.exp(1j * np.angle(overlap)) * c)
    return 2.0 * np.arcsin(min(0.5 * gap, 1.0))


def _nearest_angle(c, a, b, grid):
    """Fiber angle in [0, pi) nearest to ``c``: coarse grid, then golden section."""
    thetas = np.arange(grid) * (np.pi / grid)
    overlaps = np.abs(np.conj(c[0]) * a * np.exp(-1j * thetas) + np.conj(c[2]) * b * np.exp(1j * thetas))
    i = int(np.argmax(overlaps))
    lo, hi = thetas[i] - np.pi / grid, thetas[i] + np.pi / grid
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = _fiber_distance(c, a, b, x1), _fiber_distance(c, a, b, x2)
    while hi - lo > 1e-12:
        if f1 > f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = _fiber_distance(c, a, b, x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = _fiber_distance(c, a, b, x1)
    return 0.5 * (lo + hi)


def greedy_lift_oracle(loop, psi0, steps=10_000, fiber_grid=64):
    """Lift built by repeatedly jumping to the nearest state on the next fiber.

    Returns ``(times, states)``.  Each step searches the fiber circle over
    ``gamma(t_{k+1})`` for the state closest in Fubini-Study distance to the
    current one.
    """
    times = np.linspace(0.0, 1.0, steps + 1)
    points = loop.position(times)
    if np.linalg.norm(bloch_vector(psi0) - points[0]) > 1e-8:
        raise InputError("initial state does not lie over gamma(0)")
    D, n = _fiber_frames(points)
    a = np.sqrt(0.5 * (1.0 - n))
    b = np.sqrt(0.5 * (1.0 + n))
    states = np.empty((steps + 1, 3), dtype=complex)
    states[0] = normalize(psi0)
    for k in range(steps):
        c = D[k + 1].conj().T @ states[k]
        th = _nearest_angle(c, a[k + 1], b[k + 1], fiber_grid)
        base = np.array([a[k + 1] * np.exp(-1j * th), 0.0, b[k + 1] * np.exp(1j * th)])
        states[k + 1] = D[k + 1] @ base
    return times, states


def solid_angle_oracle(points):
    """Signed solid angle enclosed by a closed spherical polyline, in [0, 4 pi).

    The polygon is fanned into triangles from its first vertex and the
    signed area of each triangle is taken from the Van Oosterom-Strackee
    formula.  Counterclockwise traversal seen from outside counts positive.
    """
    p = np.asarray(points, dtype=float)
    p = p / np.linalg.norm(p, axis=-1, keepdims=True)
    if len(p) > 1 and np.allclose(p[0], p[-1], atol=1e-15, rtol=0):
        p = p[:-1]
    if len(p) < 3:
        return 0.0
    nxt = np.roll(p, -1, axis=0)
    if np.any(np.einsum("ij,ij->i", p, nxt) < -1.0 + 1e-12):
        raise InputError("consecutive antipodal points: the connecting arc is ambiguous")
    a = p[0]
    b, c = p[1:-1], p[2:]
    num = np.einsum("j,ij->i", a, np.cross(b, c))
    den = 1.0 + b @ a + np.einsum("ij,ij->i", b, c) + c @ a
    total = 2.0 * np.arctan2(num, den).sum()
    return float(np.mod(total, 4.0 * np.pi))
