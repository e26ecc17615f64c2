"""Simulated Stern-Gerlach tomography of spin-1 states.

A measurement in the basis rotated by ``B`` records how many of ``shots``
atoms land in each of the three clouds ``m = -1, 0, +1``; the population of
cloud ``m`` is ``|<m| D(B)^dagger psi>|^2``.  With ``n = B z`` this measures
the spin component along ``n``: ``<S_n> = p_+ - p_-`` and
``<S_n^2> = p_+ + p_-``.  Six well-chosen axes determine every second moment.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .rotations import rotation_between, spin1_rep
from .spinstate import normalize

_EZ = np.array([0.0, 0.0, 1.0])
_S2 = np.sqrt(0.5)
DEFAULT_AXES = np.array([
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [_S2, _S2, 0.0],
    [0.0, _S2, _S2],
    [_S2, 0.0, _S2],
])


@dataclass(frozen=True)
class MeasurementRecord:
    basis: np.ndarray  # rotation taking z to the measured axis
    shots: int
    counts: tuple  # (n_-1, n_0, n_+1)
    seed: int
    index: int = 0

    @property
    def axis(self):
        return self.basis @ _EZ

    @property
    def frequencies(self):
        return np.asarray(self.counts, dtype=float) / self.shots

    def to_dict(self):
        return {
            "basis": [float(x) for x in self.basis.ravel()],
            "shots": self.shots,
            "counts": [int(c) for c in self.counts],
            "seed": self.seed,
            "index": self.index,
        }


def default_bases(axes=DEFAULT_AXES):
    """Measurement rotations taking z to each axis."""
    return [rotation_between(_EZ, a / np.linalg.norm(a)) for a in np.asarray(axes, dtype=float)]


def populations(psi, basis):
    """Exact cloud populations ``(p_-1, p_0, p_+1)`` in the given basis."""
    amp = spin1_rep(basis).conj().T @ normalize(psi)
    p = np.abs(amp) ** 2
    return p / p.sum()


def _rng(seed, index):
    # counter-based generator: each (seed, record index) pair is its own stream
    return np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), int(index)]))


def simulate_counts(psi, basis, shots, seed, index=0):
    """Draw ``shots`` multinomial outcomes for ``psi`` measured in ``basis``."""
    if shots < 1:
        raise InputError("shots must be at least 1")
    p = populations(psi, basis)
    counts = _rng(seed, index).multinomial(int(shots), p)
    return MeasurementRecord(np.asarray(basis, dtype=float), int(shots), tuple(int(c) for c in counts), int(seed), int(index))


def measure(psi, shots, seed, bases=None):
    """One record per basis, each with its own random stream."""
    bases = default_bases() if bases is None else bases
    return [simulate_counts(psi, B, shots, seed, i) for i, B in enumerate(bases)]


def _quadratic_design(axes):
    # n^T M n = sum_ij n_i n_j M_ij in terms of (Mxx, Myy, Mzz, Mxy, Myz, Mxz)
    x, y, z = axes.T
    return np.column_stack([x * x, y * y, z * z, 2 * x * y, 2 * y * z, 2 * x * z])


@dataclass(frozen=True)
class MomentEstimate:
    s: np.ndarray
    T: np.ndarray
    clipped: bool  # |s| exceeded 1 and was scaled back


def moments_from_frequencies(axes, freqs):
    """Least-squares spin vector and fluctuation tensor from per-axis frequencies.

    ``freqs`` rows are ``(p_-1, p_0, p_+1)`` for the corresponding axis.
    """
    axes = np.asarray(axes, dtype=float)
    freqs = np.asarray(freqs, dtype=float)
    first = freqs[:, 2] - freqs[:, 0]
    second = freqs[:, 2] + freqs[:, 0]
    if np.linalg.matrix_rank(axes) < 3:
        raise InputError("measurement axes do not span space; spin vector is undetermined")
    design = _quadratic_design(axes)
    if np.linalg.matrix_rank(design) < 6:
        raise InputError("measurement axes do not determine all six second moments")
    s = np.linalg.lstsq(axes, first, rcond=None)[0]
    m = np.linalg.lstsq(design, second, rcond=None)[0]
    M = np.array([[m[0], m[3], m[5]], [m[3], m[1], m[4]], [m[5], m[4], m[2]]])
    norm = np.linalg.norm(s)
    clipped = bool(norm > 1.0)
    if clipped:
        s = s / norm
    T = M - np.outer(s, s)
    return MomentEstimate(s, 0.5 * (T + T.T), clipped)


def reconstruct_moments(records):
    """Estimate ``(s, T)`` from a list of measurement records."""
    if not records:
        raise InputError("no measurement records")
    axes = np.array([r.axis for r in records])
    freqs = np.array([r.frequencies for r in records])
    return moments_from_frequencies(axes, freqs)


def exact_moments(psi, bases=None):
    """Reconstruction from exact populations (the infinite-shot limit)."""
    bases = default_bases() if bases is None else bases
    axes = np.array([B @ _EZ for B in bases])
    freqs = np.array([populations(psi, B) for B in bases])
    return moments_from_frequencies(axes, freqs)
