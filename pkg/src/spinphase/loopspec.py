"""Loop-spec documents and result serialization.

A loop spec is a JSON object with ``"spec_version": 1`` and one of three
types::

    {"type": "builtin", "name": "circle", "rho": 0.3, "h": 0.4}
    {"type": "samples", "closed": true, "points": [[t, x, y, z], ...]}
    {"type": "piecewise", "pieces": [
        {"kind": "radial", "direction": [0, 0, 1], "r0": 0, "r1": 0.5},
        {"kind": "arc", "axis": [1, 0, 0], "start": [0, 0, 0.5], "angle": -1.5708},
        {"kind": "line", "start": [0, 0.5, 0], "end": [0, 0, 0]}]}

Pieces may carry a ``"duration"`` weight (default 1); the weights are
normalized to share out ``[0, 1]``.
"""

import csv
import io
import json
import re
from pathlib import Path

import numpy as np

from .catalog import CATALOG, builtin
from .errors import InputError
from .loopgeom import arc, line, piecewise_loop, radial, sampled_loop
from .rotations import axis_angle_of
from .spinstate import state_to_floats

SPEC_VERSION = 1


def _vector(doc, key, where):
    if key not in doc:
        raise InputError(f"{where}: missing {key!r}")
    try:
        v = np.asarray(doc[key], dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{where}: {key!r} must be a list of numbers") from None
    if v.shape != (3,):
        raise InputError(f"{where}: {key!r} must have three components")
    return v


def _number(doc, key, where, default=None):
    if key not in doc:
        if default is None:
            raise InputError(f"{where}: missing {key!r}")
        return default
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: {key!r} must be a number")
    return float(value)


def _primitive(doc, where):
    if not isinstance(doc, dict):
        raise InputError(f"{where}: piece must be an object")
    kind = doc.get("kind")
    if kind == "radial":
        d = _vector(doc, "direction", where)
        if np.linalg.norm(d) == 0:
            raise InputError(f"{where}: radial direction must be nonzero")
        return radial(d, _number(doc, "r0", where), _number(doc, "r1", where))
    if kind == "arc":
        axis = _vector(doc, "axis", where)
        if np.linalg.norm(axis) == 0:
            raise InputError(f"{where}: arc axis must be nonzero")
        center = _vector(doc, "center", where) if "center" in doc else np.zeros(3)
        return arc(axis, _vector(doc, "start", where), _number(doc, "angle", where), center)
    if kind == "line":
        return line(_vector(doc, "start", where), _vector(doc, "end", where))
    raise InputError(f"{where}: unknown piece kind {kind!r} (radial, arc, line)")


def loop_from_spec(doc):
    """Build a loop from a parsed loop-spec object."""
    if not isinstance(doc, dict):
        raise InputError("loop spec must be a JSON object")
    version = doc.get("spec_version", SPEC_VERSION)
    if version != SPEC_VERSION:
        raise InputError(f"unsupported spec_version {version!r}")
    kind = doc.get("type")
    if kind == "builtin":
        name = doc.get("name")
        params = {k: v for k, v in doc.items() if k not in ("type", "name", "spec_version")}
        return builtin(name, **params)
    if kind == "samples":
        pts = np.asarray(doc.get("points", []), dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise InputError("samples: points must be rows [t, x, y, z]")
        return sampled_loop(pts[:, 0], pts[:, 1:], closed=bool(doc.get("closed", True)),
                            name=doc.get("name", "samples"))
    if kind == "piecewise":
        pieces = doc.get("pieces")
        if not isinstance(pieces, list) or not pieces:
            raise InputError("piecewise: 'pieces' must be a nonempty list")
        jets = [_primitive(p, f"pieces[{i}]") for i, p in enumerate(pieces)]
        durations = [_number(p, "duration", f"pieces[{i}]", 1.0) for i, p in enumerate(pieces)]
        return piecewise_loop(jets, durations, name=doc.get("name", "piecewise"))
    raise InputError(f"unknown loop spec type {kind!r} (builtin, samples, piecewise)")


def parse_loop_spec(text):
    """Parse a loop-spec JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"loop spec is not valid JSON: {exc}") from None
    return loop_from_spec(doc)


_CALL = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\((.*)\))?\s*$")


def resolve_loop(arg):
    """Loop from a command-line argument.

    Accepts a catalog name with optional positional parameters
    (``circle(0.3,0.4)``), a path to a loop-spec file, or inline JSON.
    """
    text = arg.strip()
    if text.startswith("{"):
        return parse_loop_spec(text)
    m = _CALL.match(text)
    if m and m.group(1) in CATALOG:
        name, args = m.group(1), m.group(2)
        params = {}
        if args and args.strip():
            names = list(CATALOG[name][1])
            values = [a.strip() for a in args.split(",")]
            if len(values) > len(names):
                raise InputError(f"{name} takes at most {len(names)} parameter(s): {', '.join(names)}")
            try:
                params = {k: float(v) for k, v in zip(names, values)}
            except ValueError:
                raise InputError(f"bad parameters for {name}: {args!r}") from None
        return builtin(name, **params)
    path = Path(text)
    if path.exists():
        return parse_loop_spec(path.read_text())
    raise InputError(f"unknown loop {text!r}; catalog: {', '.join(CATALOG)}")


def loop_to_samples_spec(loop, n=4096):
    """Sampled loop-spec object with ``n`` evenly spaced points."""
    pts = loop.sample(n)
    return {
        "spec_version": SPEC_VERSION,
        "type": "samples",
        "closed": True,
        "name": f"{loop.name}:sampled" if loop.name else "sampled",
        "points": [[float(x) for x in row] for row in pts],
    }


# --- results ----------------------------------------------------------------

def _floats(a):
    return [float(x) for x in np.asarray(a, dtype=float).ravel()]


def holonomy_to_dict(result, loop_name=None):
    aa = axis_angle_of(result.R)
    return {
        "loop": loop_name,
        "rotation": _floats(result.R),
        "axis": _floats(aa.axis),
        "angle": float(aa.angle),
        "factors": [_floats(F) for F in result.factors],
        "zeros": _floats(result.zeros),
        "alpha_start": _floats(result.alpha_start),
        "alpha_end": _floats(result.alpha_end),
        "k": _floats(result.k),
        "Omega1": result.omega1,
        "Omega2": result.omega2,
        "twist": result.twist,
    }


def dumps(doc):
    """Canonical JSON: sorted keys, fixed separators, so equal inputs give equal bytes."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


LIFT_COLUMNS = [
    "t", "re_m1", "im_m1", "re_0", "im_0", "re_p1", "im_p1",
    "s_x", "s_y", "s_z", "r", "v_x", "v_y", "v_z", "u_x", "u_y", "u_z",
]


def lift_to_csv(lift):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LIFT_COLUMNS)
    s = lift.bloch()
    for i, t in enumerate(lift.times):
        row = [t] + state_to_floats(lift.states[i]) + list(s[i]) + [lift.r[i]] + list(lift.v[i]) + list(lift.u[i])
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()
