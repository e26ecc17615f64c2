"""SO(3) algebra and the spin-1 representation of rotations.

Conventions
-----------
Spin-1 amplitudes are ordered ``(z_-1, z_0, z_+1)`` with ``S_z = diag(-1, 0, 1)``.
``S_x`` and ``S_y`` come from the Condon-Shortley ladder operators; with this
choice the spin expectation values reproduce

    s_x + i s_y = sqrt(2) (z_-1 conj(z_0) + z_0 conj(z_+1))

and ``D(R) = exp(-i theta n.S)`` carries the Bloch vector to ``R s``.
Rotations are right-handed: ``rotation_from_axis_angle(z, pi/2)`` maps x to y.
"""

from typing import NamedTuple

import numpy as np

from .errors import DegeneracyError, InputError

_S2 = np.sqrt(2.0)

SPIN_X = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _S2
SPIN_Y = np.array([[0, 1j, 0], [-1j, 0, 1j], [0, -1j, 0]], dtype=complex) / _S2
SPIN_Z = np.diag([-1.0, 0.0, 1.0]).astype(complex)
SPIN = np.stack([SPIN_X, SPIN_Y, SPIN_Z])

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([PAULI_X, PAULI_Y, PAULI_Z])

# Columns are the Cartesian components of |-1>, |0>, |+1>.  The spin matrices
# above are CART.conj().T @ L_k @ CART with (L_k)_ij = -i eps_kij, so the
# spin-1 representation of R is CART^dagger R CART.
_CART = np.array(
    [[1 / _S2, 0, -1 / _S2], [-1j / _S2, 0, -1j / _S2], [0, 1, 0]], dtype=complex
)

ORTHO_TOL = 1e-12
UNIT_TOL = 1e-9


class AxisAngle(NamedTuple):
    axis: np.ndarray
    angle: float


def skew(n):
    """Cross-product matrix: ``skew(n) @ w == cross(n, w)``."""
    n = np.asarray(n, dtype=float)
    out = np.zeros(n.shape[:-1] + (3, 3))
    out[..., 0, 1] = -n[..., 2]
    out[..., 0, 2] = n[..., 1]
    out[..., 1, 0] = n[..., 2]
    out[..., 1, 2] = -n[..., 0]
    out[..., 2, 0] = -n[..., 1]
    out[..., 2, 1] = n[..., 0]
    return out


def _rodrigues(axis, angle):
    # batch-capable, no validation
    k = skew(axis)
    angle = np.asarray(angle, dtype=float)[..., None, None]
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def rotation_from_axis_angle(axis, angle):
    """Right-handed rotation by ``angle`` radians about the unit vector ``axis``."""
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > UNIT_TOL:
        raise InputError(f"rotation axis must be a unit 3-vector, got {axis!r}")
    return _rodrigues(axis, float(angle))


def rot_x(angle):
    return _rodrigues(np.array([1.0, 0.0, 0.0]), angle)


def rot_y(angle):
    return _rodrigues(np.array([0.0, 1.0, 0.0]), angle)


def rot_z(angle):
    return _rodrigues(np.array([0.0, 0.0, 1.0]), angle)


def is_rotation(R, tol=ORTHO_TOL):
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    return (
        np.abs(R.T @ R - np.eye(3)).max() <= tol
        and abs(np.linalg.det(R) - 1.0) <= tol
    )


def quaternion_from_rotation(R):
    """Unit quaternion ``(w, x, y, z)`` with ``w >= 0`` (Shepperd's method)."""
    R = np.asarray(R, dtype=float)
    tr = np.trace(R)
    diag = np.diag(R)
    i = int(np.argmax(np.r_[tr, diag]))
    if i == 0:
        w = 0.5 * np.sqrt(max(1.0 + tr, 0.0))
        f = 0.25 / w
        q = np.array([w, (R[2, 1] - R[1, 2]) * f, (R[0, 2] - R[2, 0]) * f,
                      (R[1, 0] - R[0, 1]) * f])
    else:
        a = i - 1
        b, c = (a + 1) % 3, (a + 2) % 3
        qa = 0.5 * np.sqrt(max(1.0 + R[a, a] - R[b, b] - R[c, c], 0.0))
        f = 0.25 / qa
        q = np.empty(4)
        q[0] = (R[c, b] - R[b, c]) * f
        q[1 + a] = qa
        q[1 + b] = (R[b, a] + R[a, b]) * f
        q[1 + c] = (R[c, a] + R[a, c]) * f
    if q[0] < 0:
        q = -q
    return q / np.linalg.norm(q)


def rotation_from_quaternion(q):
    w, x, y, z = np.asarray(q, dtype=float) / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def axis_angle_of(R):
    """Canonical axis-angle pair with the angle in ``[0, pi]``.

    The identity is reported as ``(z, 0)``.  At exactly ``pi`` the axis sign
    is whatever the quaternion extraction yields; both signs describe R.
    """
    q = quaternion_from_rotation(R)
    vec = q[1:]
    s = np.linalg.norm(vec)
    if s < 1e-15:
        return AxisAngle(np.array([0.0, 0.0, 1.0]), 0.0)
    angle = 2.0 * np.arctan2(s, q[0])
    return AxisAngle(vec / s, float(angle))


def spin1_rep(R):
    """Spin-1 unitary ``D(R) = exp(-i theta n.S)`` for rotation(s) ``R``.

    Accepts a single 3x3 matrix or a stack ``(..., 3, 3)``.
    """
    R = np.asarray(R, dtype=float)
    return _CART.conj().T @ R @ _CART


def cartesian_to_spherical(vec):
    """Complex Cartesian 3-vector(s) -> amplitudes ``(z_-1, z_0, z_+1)``."""
    return np.asarray(vec) @ _CART.conj()


def spherical_to_cartesian(psi):
    """Amplitudes ``(z_-1, z_0, z_+1)`` -> complex Cartesian 3-vector(s)."""
    return np.asarray(psi) @ _CART.T


def project_to_rotation(M):
    """Nearest rotation to ``M`` in Frobenius norm (orthogonal polar factor).

    Works on a single matrix or a stack.  Raises DegeneracyError when
    ``det M <= 0`` since the nearest orthogonal matrix is then improper or
    not unique.
    """
    M = np.asarray(M, dtype=float)
    det = np.linalg.det(M)
    if np.any(det <= 0):
        raise DegeneracyError("cannot project a matrix with det <= 0 onto SO(3)")
    u, _, vt = np.linalg.svd(M)
    return u @ vt


def rotation_between(a, b):
    """Minimal rotation carrying unit vector ``a`` onto unit vector ``b``.

    For antiparallel inputs the half turn is taken about a fixed axis
    perpendicular to ``a``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    axis = np.cross(a, b)
    s = np.linalg.norm(axis)
    c = float(np.dot(a, b))
    if s < 1e-14:
        if c > 0:
            return np.eye(3)
        return _rodrigues(any_perpendicular(a), np.pi)
    return _rodrigues(axis / s, np.arctan2(s, c))


def any_perpendicular(a):
    """A deterministic unit vector perpendicular to ``a``."""
    a = np.asarray(a, dtype=float)
    trial = np.eye(3)[int(np.argmin(np.abs(a)))]
    p = trial - a * np.dot(a, trial) / np.dot(a, a)
    return p / np.linalg.norm(p)


def frame_rotation(v, u):
    """Rotation ``Q`` with ``Q z = v`` and ``Q y = u`` for orthonormal ``v, u``."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.stack([np.cross(u, v), u, v], axis=-1)
