"""Tangent lines to the unit sphere as the lens space L(4,1).

A tangent line is a point of tangency ``v`` together with a direction ``+-u``
normal to it.  Rotations act transitively on tangent lines, the stabilizer of
the reference line ``(z, +-x)`` is ``{1, R_z(pi)}``, and pulling back through
the double cover SU(2) -> SO(3) makes every line correspond to a coset of a
cyclic group of order four.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .rotations import PAULI, quaternion_from_rotation

_EX = np.array([1.0, 0.0, 0.0])
_EZ = np.array([0.0, 0.0, 1.0])
I_SIGMA_Z = 1j * PAULI[2]
Z4 = np.stack([np.eye(2), I_SIGMA_Z, -np.eye(2), -I_SIGMA_Z]).astype(complex)


@dataclass(frozen=True)
class TangentLine:
    """Line touching the unit sphere at ``v`` with direction ``+-u``."""

    v: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if abs(np.linalg.norm(v) - 1) > 1e-9 or abs(np.linalg.norm(u) - 1) > 1e-9 or abs(u @ v) > 1e-9:
            raise InputError("tangent line needs orthonormal (v, u)")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "u", u)

    def same_as(self, other, tol=1e-9):
        if np.abs(self.v - other.v).max() > tol:
            return False
        return min(np.abs(self.u - other.u).max(), np.abs(self.u + other.u).max()) <= tol

    def to_floats(self):
        return [float(x) for x in np.concatenate([self.v, self.u])]


REFERENCE_LINE = TangentLine(_EZ, _EX)


def su2_to_so3(U):
    """Rotation ``R_ij = tr(sigma_i U sigma_j U^dagger) / 2`` of an SU(2) matrix."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise InputError("expected a 2x2 matrix")
    if np.abs(U @ U.conj().T - np.eye(2)).max() > 1e-9 or abs(np.linalg.det(U) - 1) > 1e-9:
        raise InputError("matrix is not in SU(2)")
    adj = np.einsum("iab,bc,jcd,da->ij", PAULI, U, PAULI, U.conj().T)
    return 0.5 * adj.real


def so3_to_su2(R):
    """One of the two SU(2) preimages: ``cos(t/2) - i sin(t/2) n.sigma`` for ``R_n(t)``."""
    w, x, y, z = quaternion_from_rotation(R)
    return w * np.eye(2) - 1j * (x * PAULI[0] + y * PAULI[1] + z * PAULI[2])


def tangent_line_of(R):
    """Image ``(R z, +-R x)`` of the reference line."""
    R = np.asarray(R, dtype=float)
    return TangentLine(R @ _EZ, R @ _EX)


def rotation_of_line(line):
    """A rotation taking the reference line to ``line`` (the other is ``R R_z(pi)``)."""
    return np.column_stack([line.u, np.cross(line.v, line.u), line.v])


def bundle_projections(line):
    """Point of tangency (to S2) and the direction class ``+-u`` (to RP2).

    The direction is returned as the representative with its first clearly
    nonzero component positive.
    """
    u = line.u
    for c in u:
        if abs(c) > 1e-12:
            u = u if c > 0 else -u
            break
    return line.v.copy(), u


def z4_preimages(line):
    """The four SU(2) matrices mapping to ``line``: ``U {1, i sz, -1, -i sz}``."""
    U = so3_to_su2(rotation_of_line(line))
    return U[None] @ Z4


def l41_path_length(vs, us):
    """Length of a sampled path of tangent lines in the metric
    ``dv.dv + du.du - (v.du)^2``.

    Consecutive directions are sign-chained (the representative closer to the
    previous one is used); each step contributes the metric evaluated on the
    finite difference at the step midpoint.
    """
    vs = np.asarray(vs, dtype=float)
    us = np.asarray(us, dtype=float).copy()
    if vs.shape != us.shape or vs.ndim != 2 or vs.shape[1] != 3:
        raise InputError("need matching (n, 3) arrays of points and directions")
    for k in range(1, len(us)):
        d = us[k] @ us[k - 1]
        if abs(d) < 1e-9:
            raise InputError(f"cannot chain the direction sign at sample {k}")
        if d < 0:
            us[k] = -us[k]
    dv = np.diff(vs, axis=0)
    du = np.diff(us, axis=0)
    if np.any(np.linalg.norm(dv, axis=1) > 0.1) or np.any(np.linalg.norm(du, axis=1) > 0.1):
        raise InputError("consecutive samples must lie within 0.1 rad of each other")
    vm = vs[:-1] + 0.5 * dv
    vm /= np.linalg.norm(vm, axis=1, keepdims=True)
    ds2 = np.einsum("ij,ij->i", dv, dv) + np.einsum("ij,ij->i", du, du) - np.einsum("ij,ij->i", vm, du) ** 2
    return float(np.sum(np.sqrt(np.clip(ds2, 0.0, None))))
