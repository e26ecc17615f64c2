import numpy as np
import pytest

from spinphase.catalog import builtin, gamma_a
from spinphase.errors import DegeneracyError, InputError
from spinphase.holonomy import geometric_phase, horizontal_lift
from spinphase.loopgeom import function_loop
from spinphase.oracles import greedy_lift_oracle, solid_angle_oracle
from spinphase.rotations import any_perpendicular, axis_angle_of
from spinphase.spinstate import Chord, bloch_vector, fubini_study_distance, state_from_chord, states_from_chords


def cap_polyline(theta0, n=20001, ccw=True):
    phi = np.linspace(0, 2 * np.pi, n)
    if not ccw:
        phi = -phi
    return np.column_stack([np.sin(theta0) * np.cos(phi), np.sin(theta0) * np.sin(phi),
                            np.full_like(phi, np.cos(theta0))])


def test_cap_solid_angle():
    assert solid_angle_oracle(cap_polyline(np.pi / 3)) == pytest.approx(np.pi, abs=1e-7)
    # clockwise traversal gives the complement modulo 4 pi
    assert solid_angle_oracle(cap_polyline(np.pi / 3, ccw=False)) == pytest.approx(3 * np.pi, abs=1e-7)


def test_octant():
    pts = np.eye(3)
    assert solid_angle_oracle(pts) == pytest.approx(np.pi / 2)


def test_degenerate_inputs():
    assert solid_angle_oracle([[0, 0, 1.0]] * 5) == 0.0
    with pytest.raises(InputError):
        solid_angle_oracle([[0, 0, 1.0], [0, 0, -1.0], [1.0, 0, 0]])


def test_cap_matches_phase_at_same_latitude():
    # circle at polar angle pi/6: rho / h = tan(pi/6)
    loop = builtin("circle", rho=0.25, h=0.25 * np.sqrt(3))
    aa = axis_angle_of(geometric_phase(loop).R)
    assert aa.angle == pytest.approx(2 * np.pi * (1 - np.sqrt(3) / 2), abs=1e-5)
    assert solid_angle_oracle(cap_polyline(np.pi / 6)) == pytest.approx(aa.angle, abs=1e-5)


def _start(loop):
    x0 = loop(0.0)
    v = x0 / np.linalg.norm(x0)
    u = np.cross(v, [0, 0, 1.0])
    u /= np.linalg.norm(u)
    return states_from_chords(np.array([np.linalg.norm(x0)]), v[None], u[None])[0]


def test_greedy_stays_over_the_loop():
    loop = builtin("circle")
    times, states = greedy_lift_oracle(loop, _start(loop), 500)
    assert np.abs(bloch_vector(states) - loop(times)).max() < 1e-9


def test_greedy_converges_to_ode_lift():
    loop = builtin("circle")
    psi0 = _start(loop)
    ode = horizontal_lift(loop, psi0, 4000).states[-1]
    errs = [fubini_study_distance(greedy_lift_oracle(loop, psi0, n)[1][-1], ode) for n in (1000, 2000)]
    assert errs[1] < errs[0] < 5e-3


def test_greedy_constant_loop():
    c = np.array([0.1, 0.2, 0.3])
    loop = function_loop(lambda t: np.tile(c, (len(t), 1)), lambda t: np.zeros((len(t), 3)),
                         lambda t: np.zeros((len(t), 3)))
    v = c / np.linalg.norm(c)
    psi0 = states_from_chords(np.array([np.linalg.norm(c)]), v[None], any_perpendicular(v)[None])[0]
    _, states = greedy_lift_oracle(loop, psi0, 50)
    assert fubini_study_distance(states[-1], psi0) < 1e-9


def test_greedy_rejects_singular_and_boundary_loops():
    with pytest.raises(InputError):
        greedy_lift_oracle(gamma_a(), np.array([1, 0, 1.0]) / np.sqrt(2), 100)
    boundary = function_loop(
        lambda t: np.column_stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t), 0 * t]),
        lambda t: 2 * np.pi * np.column_stack([-np.sin(2 * np.pi * t), np.cos(2 * np.pi * t), 0 * t]),
        lambda t: -(2 * np.pi) ** 2 * np.column_stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t), 0 * t]))
    with pytest.raises(DegeneracyError):
        greedy_lift_oracle(boundary, state_from_chord(Chord(1.0, np.array([1.0, 0, 0]), None)), 10)
