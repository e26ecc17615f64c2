import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from spinphase.errors import InputError
from spinphase.lens import (
    REFERENCE_LINE,
    Z4,
    TangentLine,
    bundle_projections,
    l41_path_length,
    rotation_of_line,
    so3_to_su2,
    su2_to_so3,
    tangent_line_of,
    z4_preimages,
)
from spinphase.rotations import PAULI, rot_z, rotation_from_axis_angle


def test_reference_line():
    assert tangent_line_of(np.eye(3)).same_as(REFERENCE_LINE)
    # the stabilizer of the reference line is {1, R_z(pi)}
    assert tangent_line_of(rot_z(np.pi)).same_as(REFERENCE_LINE)
    assert not tangent_line_of(rot_z(np.pi / 2)).same_as(REFERENCE_LINE)


def test_su2_convention():
    t = 0.7
    n = np.array([0.0, 0.0, 1.0])
    U = np.cos(t / 2) * np.eye(2) - 1j * np.sin(t / 2) * PAULI[2]
    assert np.allclose(su2_to_so3(U), rotation_from_axis_angle(n, t))
    assert np.allclose(so3_to_su2(rotation_from_axis_angle(n, t)), U)


def test_su2_rejects_non_unitary():
    with pytest.raises(InputError):
        su2_to_so3(2 * np.eye(2))
    with pytest.raises(InputError):
        su2_to_so3(np.eye(3))


def test_rotation_of_line(rng):
    for R in Rotation.random(20, random_state=rng).as_matrix():
        line = tangent_line_of(R)
        assert tangent_line_of(rotation_of_line(line)).same_as(line)


def test_z4_group():
    for a in Z4:
        for b in Z4:
            assert min(np.abs(Z4 - a @ b).max(axis=(1, 2))) < 1e-15
    assert all(np.allclose(su2_to_so3(g) @ [0, 0, 1], [0, 0, 1]) for g in Z4)


def test_z4_preimages(rng):
    for R in Rotation.random(20, random_state=rng).as_matrix():
        line = tangent_line_of(R)
        for U in z4_preimages(line):
            assert tangent_line_of(su2_to_so3(U)).same_as(line)


def test_bundle_projections():
    line = TangentLine(np.array([0, 0, 1.0]), np.array([-1.0, 0, 0]))
    v, u = bundle_projections(line)
    assert np.allclose(v, [0, 0, 1]) and np.allclose(u, [1, 0, 0])


def test_tangent_line_validation():
    with pytest.raises(InputError):
        TangentLine(np.array([0, 0, 1.0]), np.array([0, 0, 1.0]))


def test_l41_length_of_rotation_about_contact_point():
    # spinning the line about its point of contact by 2 pi has length 2 pi
    t = np.linspace(0, 2 * np.pi, 2001)
    vs = np.tile([0, 0, 1.0], (len(t), 1))
    us = np.column_stack([np.cos(t), np.sin(t), 0 * t])
    assert l41_path_length(vs, us) == pytest.approx(2 * np.pi, rel=1e-6)


def test_l41_length_of_parallel_transport_on_equator():
    # rolling along the equator with u = z fixed: the length is that of the base path
    t = np.linspace(0, np.pi, 2001)
    vs = np.column_stack([np.cos(t), np.sin(t), 0 * t])
    us = np.tile([0, 0, 1.0], (len(t), 1))
    assert l41_path_length(vs, us) == pytest.approx(np.pi, rel=1e-6)


def test_l41_length_rejects_jumps():
    with pytest.raises(InputError):
        l41_path_length(np.array([[0, 0, 1.0], [1.0, 0, 0]]), np.array([[1.0, 0, 0], [0, 0, 1.0]]))
