"""Spin-1 pure states: moments, Fubini-Study geometry and the chord picture.

A state is any nonzero complex 3-vector ``(z_-1, z_0, z_+1)``; every function
here treats it as a ray, so representatives may be rescaled freely.

The chord ``(r, v, +-u)`` of a state is the chord of the unit sphere whose
midpoint is the spin vector ``r v`` and whose direction is ``u``.  The base
chord ``(r, z, +-y)`` corresponds to ``(sqrt((1-r)/2), 0, sqrt((1+r)/2))``;
at ``r = 0`` that state is annihilated by ``S_y``, so ``u`` is the axis about
which the state is rotation invariant (its Majorana axis).  Every other chord
follows by rotating both sides.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegeneracyError, InputError
from .rotations import (
    SPIN,
    any_perpendicular,
    cartesian_to_spherical,
    frame_rotation,
    rotation_between,
    spin1_rep,
)

DEGENERACY_TOL = 1e-9


def as_state(psi):
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != 3:
        raise InputError(f"spin-1 state needs 3 amplitudes, got shape {psi.shape}")
    norms = np.linalg.norm(psi, axis=-1)
    if np.any(norms == 0):
        raise InputError("the zero vector is not a quantum state")
    return psi


def normalize(psi):
    psi = as_state(psi)
    return psi / np.linalg.norm(psi, axis=-1, keepdims=True)


def bloch_vector(psi):
    """Spin vector ``<S>`` of a state (or a stack of states)."""
    psi = normalize(psi)
    w = psi[..., 0] * np.conj(psi[..., 1]) + psi[..., 1] * np.conj(psi[..., 2])
    sz = np.abs(psi[..., 2]) ** 2 - np.abs(psi[..., 0]) ** 2
    return np.stack([np.sqrt(2.0) * w.real, np.sqrt(2.0) * w.imag, sz], axis=-1)


def second_moments(psi):
    """Matrix of symmetrized second moments ``<{S_i, S_j}>/2``."""
    psi = normalize(psi)
    sp = np.einsum("kab,...b->...ka", SPIN, psi)  # S_k psi
    gram = np.einsum("...ia,...ja->...ij", np.conj(sp), sp)  # <S_i S_j>
    return gram.real


def fluctuation_tensor(psi):
    """Covariance of the spin components in the state."""
    s = bloch_vector(psi)
    return second_moments(psi) - s[..., :, None] * s[..., None, :]


def fubini_study_distance(psi1, psi2):
    """Angle between two rays, in ``[0, pi/2]``.

    Evaluated as ``2 arcsin(|psi2 - e^{i phi} psi1| / 2)`` with the phase
    ``phi`` that aligns the two representatives.  This equals
    ``arccos |<psi1, psi2>|`` but stays accurate for nearby states, where the
    overlap is within rounding of 1.
    """
    a = normalize(psi1)
    b = normalize(psi2)
    overlap = np.sum(np.conj(a) * b, axis=-1)
    phase = np.exp(1j * np.angle(overlap))
    gap = np.linalg.norm(b - phase[..., None] * a, axis=-1)
    return 2.0 * np.arcsin(np.clip(0.5 * gap, 0.0, np.sqrt(0.5)))


def tensor_spectrum(s_norm):
    """Eigenvalues of the fluctuation tensor for a spin vector of length ``s_norm``.

    Returned as ``(1 - s^2, (1 + c)/2, (1 - c)/2)`` with ``c = sqrt(1 - s^2)``;
    the first belongs to the eigenvector along the spin vector.
    """
    s = float(s_norm)
    if not 0.0 <= s <= 1.0:
        raise InputError(f"spin vector length must lie in [0, 1], got {s}")
    c = np.sqrt(1.0 - s * s)
    return np.array([1.0 - s * s, 0.5 * (1.0 + c), 0.5 * (1.0 - c)])


def majorana_axis(psi):
    """Axis ``d`` with ``(d.S) psi = 0`` for a state whose spin vector vanishes."""
    T = fluctuation_tensor(psi)
    _, vecs = np.linalg.eigh(T)
    return _canonical_sign(vecs[:, 0])


def _canonical_sign(u):
    # representative of +-u whose first clearly nonzero component is positive
    for c in u:
        if abs(c) > 1e-12:
            return u if c > 0 else -u
    return u


@dataclass(frozen=True)
class Chord:
    """Chord ``(r, v, +-u)``; ``u`` is ``None`` only for boundary chords (r = 1)."""

    r: float
    v: np.ndarray
    u: Optional[np.ndarray]

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise InputError(f"chord distance must lie in [0, 1], got {self.r}")
        v = np.asarray(self.v, dtype=float)
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise InputError("chord center direction must be a unit vector")
        object.__setattr__(self, "v", v)
        if self.u is not None:
            u = np.asarray(self.u, dtype=float)
            if abs(np.linalg.norm(u) - 1.0) > 1e-9 or abs(u @ v) > 1e-9:
                raise InputError("chord direction must be a unit vector normal to v")
            object.__setattr__(self, "u", u)

    def same_as(self, other, tol=1e-9):
        """Equality with ``u`` identified with ``-u``."""
        if abs(self.r - other.r) > tol:
            return False
        if self.r > DEGENERACY_TOL and np.abs(self.v - other.v).max() > tol:
            return False
        if self.u is None or other.u is None:
            return self.u is None and other.u is None
        return min(np.abs(self.u - other.u).max(), np.abs(self.u + other.u).max()) <= tol


def states_from_chords(r, v, u):
    """Vectorized chord -> state map (no validation).

    ``r`` has shape ``(n,)``, ``v`` and ``u`` shape ``(n, 3)``.  Boundary
    chords ignore ``u``.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    a = np.sqrt(np.clip(0.5 * (1.0 - r), 0.0, None))
    b = np.sqrt(np.clip(0.5 * (1.0 + r), 0.0, None))
    w = np.cross(u, v)
    cart = ((a - b) / np.sqrt(2.0))[..., None] * w - 1j * ((a + b) / np.sqrt(2.0))[..., None] * u
    return cartesian_to_spherical(cart)


def state_from_chord(chord):
    """State whose spin vector is ``r v`` and whose transverse axis is ``+-u``."""
    if chord.r >= 1.0 - DEGENERACY_TOL:
        # coherent state along v; the transverse direction is irrelevant
        u = any_perpendicular(chord.v)
        return states_from_chords(np.array([1.0]), chord.v[None], u[None])[0]
    if chord.u is None:
        raise InputError("interior chord needs a transverse direction u")
    v = chord.v
    if chord.r <= DEGENERACY_TOL:
        v = any_perpendicular(chord.u)
    return states_from_chords(np.array([chord.r]), v[None], chord.u[None])[0]


def chord_from_state(psi):
    """Chord of a state.  ``u`` is ``None`` when the state is coherent (r = 1)."""
    s = bloch_vector(psi)
    r = float(np.linalg.norm(s))
    if r >= 1.0 - DEGENERACY_TOL:
        return Chord(1.0, s / r, None)
    T = fluctuation_tensor(psi)
    if r <= DEGENERACY_TOL:
        u = majorana_axis(psi)
        return Chord(0.0, any_perpendicular(u), u)
    v = s / r
    P = np.eye(3) - np.outer(v, v)
    # push the eigenvalue along v out of the way, keep the smaller transverse one
    _, vecs = np.linalg.eigh(P @ T @ P + 10.0 * np.outer(v, v))
    u = vecs[:, 0]
    u = u - v * (u @ v)
    return Chord(r, v, _canonical_sign(u / np.linalg.norm(u)))


def fs_speed_chord(chord, dr, dv, du):
    """Fubini-Study speed of a chord moving with velocity ``(dr, dv, du)``."""
    r = chord.r
    if r >= 1.0 - DEGENERACY_TOL:
        raise DegeneracyError("chord coordinates are singular on the boundary r = 1")
    if chord.u is None:
        raise InputError("chord needs a transverse direction")
    v, u = chord.v, chord.u
    dv = np.asarray(dv, dtype=float)
    du = np.asarray(du, dtype=float)
    scale = max(1.0, np.linalg.norm(dv), np.linalg.norm(du))
    if abs(dv @ v) > 1e-9 * scale:
        raise InputError("dv must be tangent to the sphere at v")
    if abs(du @ v + u @ dv) > 1e-9 * scale:
        raise InputError("velocity does not preserve u . v = 0")
    c = np.sqrt(1.0 - r * r)
    ds2 = (
        0.5 * (1.0 - c) * (dv @ dv)
        + c * (u @ dv) ** 2
        + (1.0 - r * r) * (du @ du - (v @ du) ** 2)
        + float(dr) ** 2 / (4.0 * (1.0 - r * r))
    )
    return float(np.sqrt(max(ds2, 0.0)))


@dataclass(frozen=True)
class FiberPoint:
    s: np.ndarray
    theta: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "s", np.asarray(self.s, dtype=float))
        object.__setattr__(self, "theta", float(self.theta) % np.pi)


def fiber_basis(s):
    """Rotation taking z to the direction of ``s`` used to parametrize its fiber."""
    s = np.asarray(s, dtype=float)
    n = np.linalg.norm(s)
    if n <= DEGENERACY_TOL or n >= 1.0 - DEGENERACY_TOL:
        raise DegeneracyError(
            f"|s| = {n:.3g}: the fiber is not a circle; use chord coordinates instead"
        )
    return rotation_between(np.array([0.0, 0.0, 1.0]), s / n), n


def fiber_state(point):
    """The state on the fiber circle over ``point.s`` labelled by ``point.theta``."""
    Q, n = fiber_basis(point.s)
    th = point.theta
    base = np.array([
        np.sqrt(0.5 * (1.0 - n)) * np.exp(-1j * th),
        0.0,
        np.sqrt(0.5 * (1.0 + n)) * np.exp(1j * th),
    ])
    return spin1_rep(Q) @ base


def random_state(rng):
    """Haar-random normalized state."""
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    return z / np.linalg.norm(z)


def state_to_floats(psi):
    """Six floats, real and imaginary parts interleaved, basis order (-1, 0, +1)."""
    psi = as_state(psi)
    return [float(x) for c in psi for x in (c.real, c.imag)]


def state_from_floats(values):
    values = np.asarray(values, dtype=float)
    if values.shape != (6,):
        raise InputError("a serialized state has exactly six floats")
    return as_state(values[0::2] + 1j * values[1::2])


def frame_of_chord(chord):
    """Rotation carrying the base chord frame ``(z, y)`` onto ``(v, u)``."""
    return frame_rotation(chord.v, chord.u)
