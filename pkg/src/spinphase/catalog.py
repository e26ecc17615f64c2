"""Built-in loops: the worked examples plus a few simple families."""

import numpy as np

from .errors import InputError
from .loopgeom import Loop, Piece, arc, function_loop, piecewise_loop, radial
from .rotations import rot_z

TWO_PI = 2.0 * np.pi
EX, EY, EZ = np.eye(3)


def _cone_lobe_jet(t):
    # sin(2 pi t) * n(t) with n on the cone of half-angle pi/6 about z
    w = TWO_PI
    c, s = np.cos(w * t)[:, None], np.sin(w * t)[:, None]
    n = np.column_stack([0.5 * c[:, 0], -0.5 * s[:, 0], np.full(len(t), np.sqrt(3) / 2)])
    dn = w * np.column_stack([-0.5 * s[:, 0], -0.5 * c[:, 0], np.zeros(len(t))])
    ddn = w * w * np.column_stack([-0.5 * c[:, 0], 0.5 * s[:, 0], np.zeros(len(t))])
    x = s * n
    v = w * c * n + s * dn
    a = -w * w * s * n + 2 * w * c * dn + s * ddn
    return x, v, a


def _rotated_jet(jet, Q):
    def out(t):
        return tuple(y @ Q.T for y in jet(t))
    return out


def gamma_a():
    """Loop through the center twice, tracing the cone of half-angle pi/6 about z."""
    return Loop([Piece(0.0, 1.0, _cone_lobe_jet)], name="gamma_a")


def gamma_b():
    """``gamma_a`` turned by a quarter turn about z."""
    return Loop([Piece(0.0, 1.0, _rotated_jet(_cone_lobe_jet, rot_z(np.pi / 2)))], name="gamma_b")


def gamma_c():
    """Out along z, quarter arcs z -> y -> x at radius 1/2, back in along x."""
    return piecewise_loop([
        radial(EZ, 0.0, 0.5),
        arc(EX, 0.5 * EZ, -np.pi / 2),
        arc(EZ, 0.5 * EY, -np.pi / 2),
        radial(EX, 0.5, 0.0),
    ], name="gamma_c")


def gamma_d():
    """Out along -x, quarter arcs -x -> y -> z at radius 1/2, back in along z."""
    return piecewise_loop([
        radial(-EX, 0.0, 0.5),
        arc(EZ, -0.5 * EX, -np.pi / 2),
        arc(EX, 0.5 * EY, np.pi / 2),
        radial(EZ, 0.5, 0.0),
    ], name="gamma_d")


def circle(rho=0.5, h=0.5):
    """Horizontal circle of radius ``rho`` at height ``h``, counterclockwise about z."""
    if rho < 0 or rho * rho + h * h > 1.0:
        raise InputError("circle must have rho >= 0 and lie inside the ball")

    def f(t):
        return np.column_stack([rho * np.cos(TWO_PI * t), rho * np.sin(TWO_PI * t), np.full(len(t), h)])

    def df(t):
        return TWO_PI * np.column_stack([-rho * np.sin(TWO_PI * t), rho * np.cos(TWO_PI * t), np.zeros(len(t))])

    def ddf(t):
        return -TWO_PI ** 2 * np.column_stack([rho * np.cos(TWO_PI * t), rho * np.sin(TWO_PI * t), np.zeros(len(t))])

    return function_loop(f, df, ddf, name=f"circle({rho:g},{h:g})")


def cap(theta0=np.pi / 3, radius=0.5):
    """Circle of colatitude ``theta0`` on the sphere of the given radius."""
    if not 0.0 < radius <= 1.0:
        raise InputError("cap radius must lie in (0, 1]")
    loop = circle(radius * np.sin(theta0), radius * np.cos(theta0))
    loop.name = f"cap({theta0:g})"
    return loop


def fig3b():
    """Wedge from the center: out along z, arc to x, back in along x.

    Leaves and returns along different lines, so its projection to RP2 is open.
    """
    return piecewise_loop([
        radial(EZ, 0.0, 0.5),
        arc(EY, 0.5 * EZ, np.pi / 2),
        radial(EX, 0.5, 0.0),
    ], name="fig3b")


def fig3c():
    """Two cone lobes meeting at the center at an angle (not liftable)."""
    second = _rotated_jet(_cone_lobe_jet, rot_z(np.pi / 2))
    return Loop([Piece(0.0, 0.5, _cone_lobe_jet), Piece(0.5, 1.0, second)], name="fig3c")


CATALOG = {
    "gamma_a": (gamma_a, {}),
    "gamma_b": (gamma_b, {}),
    "gamma_c": (gamma_c, {}),
    "gamma_d": (gamma_d, {}),
    "circle": (circle, {"rho": 0.5, "h": 0.5}),
    "cap": (cap, {"theta0": np.pi / 3, "radius": 0.5}),
    "fig3b": (fig3b, {}),
    "fig3c": (fig3c, {}),
}

LIFTABLE = ("gamma_a", "gamma_b", "gamma_c", "gamma_d", "circle", "cap", "fig3b")
NON_SINGULAR = ("circle", "cap")


def builtin(name, **params):
    """Construct a catalog loop by name, e.g. ``builtin("circle", rho=0.3, h=0.4)``."""
    if name not in CATALOG:
        raise InputError(f"unknown loop {name!r}; catalog: {', '.join(CATALOG)}")
    factory, defaults = CATALOG[name]
    unknown = set(params) - set(defaults)
    if unknown:
        raise InputError(f"loop {name!r} takes no parameter(s) {sorted(unknown)}")
    return factory(**{**defaults, **params})
