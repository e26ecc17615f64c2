"""Command-line interface: ``spinphase <command> --loop LOOP [options]``.

Data documents go to stdout (or ``--out``); diagnostics go to stderr.
Exit status is 0 on success, 2 for bad input and 3 for loops that cannot be
lifted.
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import loopspec
from .catalog import CATALOG, LIFTABLE
from .errors import InputError, NotLiftableError
from .holonomy import (
    DEFAULT_STEPS,
    RP2_STEPS,
    fs_length,
    geometric_phase,
    horizontal_lift,
    rp2_phase,
)
from .loopgeom import TOL_KINK, TOL_ZERO, check_liftable, find_zeros, segment_loop
from .oracles import greedy_lift_oracle
from .rotations import any_perpendicular
from .spinstate import fubini_study_distance, states_from_chords
from .tomography import exact_moments, measure, reconstruct_moments

EXIT_INPUT = 2
EXIT_NOT_LIFTABLE = 3


# --- helpers ----------------------------------------------------------------

def _tols(args):
    return {"tol_zero": args.tol_zero, "tol_kink": args.tol_kink}


def initial_state(loop, **tols):
    """Default start of a lift: the chord over ``gamma(0)`` pointing along the
    first segment's direction, with a deterministic transverse axis."""
    seg = segment_loop(loop, **tols)[0]
    v = seg.beta(np.array([0.0]))[0]
    r = min(float(np.linalg.norm(loop.position(0.0))), 1.0)
    u = any_perpendicular(v)
    return states_from_chords(np.array([r]), v[None], u[None])[0]


def _flatten(doc, prefix=""):
    for key in sorted(doc):
        value = doc[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, name + ".")
        elif isinstance(value, (list, tuple)):
            flat = np.asarray(value, dtype=object).ravel()
            for i, x in enumerate(flat):
                yield f"{name}[{i}]", x
        else:
            yield name, value


def doc_to_csv(doc):
    """One header row and one value row; list fields expand to ``name[i]``."""
    pairs = list(_flatten(doc))
    return loopspec.rows_to_csv([k for k, _ in pairs], [[v for _, v in pairs]])


def _emit(args, doc, csv_text=None):
    if args.format == "csv":
        text = csv_text if csv_text is not None else doc_to_csv(doc)
    else:
        text = loopspec.dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands ---------------------------------------------------------------

def cmd_catalog(args):
    doc = {name: {k: float(v) for k, v in defaults.items()} for name, (_, defaults) in CATALOG.items()}
    _emit(args, {"catalog": doc, "liftable": list(LIFTABLE)})
    return 0


def cmd_zeros(args):
    loop = loopspec.resolve_loop(args.loop)
    zs = find_zeros(loop, args.tol_zero)
    _emit(args, {"loop": loop.name, "zeros": [float(t) for t in zs.times]})
    return 0


def cmd_liftable(args):
    loop = loopspec.resolve_loop(args.loop)
    report = check_liftable(loop, **_tols(args))
    doc = {
        "loop": loop.name,
        "liftable": report.liftable,
        "zeros": [float(t) for t in report.zeros.times],
        "kinks": [{"t": float(t), "angle": float(a)} for t, a in report.kinks],
        "stalls": [float(t) for t in report.stalls],
    }
    _emit(args, doc)
    if not report.liftable:
        print(report.describe(), file=sys.stderr)
        return EXIT_NOT_LIFTABLE
    return 0


def cmd_phase(args):
    loop = loopspec.resolve_loop(args.loop)
    result = geometric_phase(loop, args.steps, **_tols(args))
    _emit(args, loopspec.holonomy_to_dict(result, loop.name))
    return 0


def cmd_solid_angle(args):
    loop = loopspec.resolve_loop(args.loop)
    result = geometric_phase(loop, args.steps, **_tols(args))
    doc = {
        "loop": loop.name,
        "Omega1": result.omega1,
        "Omega2": result.omega2,
        "twist": result.twist,
        "k": [float(x) for x in result.k],
    }
    _emit(args, doc)
    return 0


def cmd_lift(args):
    loop = loopspec.resolve_loop(args.loop)
    psi0 = initial_state(loop, **_tols(args))
    lift = horizontal_lift(loop, psi0, args.steps, **_tols(args))
    if args.format == "csv":
        _emit(args, None, loopspec.lift_to_csv(lift))
    else:
        doc = {
            "loop": loop.name,
            "times": [float(t) for t in lift.times],
            "states": [[float(x) for c in s for x in (c.real, c.imag)] for s in lift.states],
            "fs_length": lift.fs_length(),
        }
        _emit(args, doc)
    return 0


def cmd_rp2_check(args):
    loop = loopspec.resolve_loop(args.loop)
    R = geometric_phase(loop, args.steps, **_tols(args)).R
    V = rp2_phase(loop, RP2_STEPS, **_tols(args))
    doc = {
        "loop": loop.name,
        "holonomy": [float(x) for x in R.ravel()],
        "rp2_displacement": [float(x) for x in V.ravel()],
        "frobenius_gap": float(np.linalg.norm(R - V)),
    }
    _emit(args, doc)
    return 0


def cmd_oracle(args):
    loop = loopspec.resolve_loop(args.loop)
    psi0 = initial_state(loop, **_tols(args))
    lift = horizontal_lift(loop, psi0, args.steps, **_tols(args))
    _, greedy = greedy_lift_oracle(loop, psi0, args.steps)
    doc = {
        "loop": loop.name,
        "steps": args.steps,
        "endpoint_distance": float(fubini_study_distance(greedy[-1], lift.states[-1])),
        "greedy_length": fs_length(greedy),
        "ode_length": lift.fs_length(),
    }
    _emit(args, doc)
    return 0


def tomography_doc(loop, shots, seed, steps=DEFAULT_STEPS, **tols):
    """Simulated tomography before and after transport around ``loop``."""
    psi0 = initial_state(loop, **tols)
    lift = horizontal_lift(loop, psi0, steps, **tols)
    R = lift.phase.R
    before = measure(psi0, shots, seed)
    after = measure(lift.states[-1], shots, seed + 1)
    est0 = reconstruct_moments(before)
    est1 = reconstruct_moments(after)
    predicted = R @ est0.T @ R.T
    return {
        "loop": loop.name,
        "shots": shots,
        "seed": seed,
        "records_before": [r.to_dict() for r in before],
        "records_after": [r.to_dict() for r in after],
        "s_before": [float(x) for x in est0.s],
        "T_before": [float(x) for x in est0.T.ravel()],
        "s_after": [float(x) for x in est1.s],
        "T_after": [float(x) for x in est1.T.ravel()],
        "T_predicted": [float(x) for x in predicted.ravel()],
        "T_exact_after": [float(x) for x in exact_moments(lift.states[-1]).T.ravel()],
        "closure_gap": float(np.abs(predicted - est1.T).max()),
    }


def cmd_tomography(args):
    loop = loopspec.resolve_loop(args.loop)
    doc = tomography_doc(loop, args.shots, args.seed, args.steps, **_tols(args))
    if args.format == "csv":
        rows = []
        for stage in ("before", "after"):
            s = doc[f"s_{stage}"]
            rows.append([stage] + s + doc[f"T_{stage}"])
        header = ["stage", "s_x", "s_y", "s_z"] + [f"T_{i}{j}" for i in "xyz" for j in "xyz"]
        _emit(args, None, loopspec.rows_to_csv(header, rows))
    else:
        _emit(args, doc)
    return 0


def _report_one(name, steps, tols, out):
    # worker for one loop; returns the paths it wrote, in a fixed order
    from .loopgeom import project_to_rp2
    from .plotting import plot_lift, plot_loop

    loop = loopspec.resolve_loop(name)
    stem = name.replace("(", "_").replace(")", "").replace(",", "_")
    psi0 = initial_state(loop, **tols)
    lift = horizontal_lift(loop, psi0, steps, **tols)
    paths = [out / f"{stem}_phase.json", out / f"{stem}_lift.csv", out / f"{stem}_loop.png", out / f"{stem}_lift.png"]
    paths[0].write_text(loopspec.dumps(loopspec.holonomy_to_dict(lift.phase, loop.name)))
    paths[1].write_text(loopspec.lift_to_csv(lift))
    plot_loop(loop, paths[2], project_to_rp2(loop, **tols))
    plot_lift(lift, paths[3])
    return [str(p) for p in paths]


def cmd_report(args):
    if not args.out:
        raise InputError("report needs --out DIRECTORY")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = list(LIFTABLE) if args.loop == "all" else [args.loop]
    tols = _tols(args)
    if args.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            futures = [pool.submit(_report_one, n, args.steps, tols, out) for n in names]
            written = [f.result() for f in futures]
    else:
        written = [_report_one(n, args.steps, tols, out) for n in names]
    index = {"loops": names, "files": written}
    (out / "index.json").write_text(loopspec.dumps(index))
    sys.stdout.write(loopspec.dumps(index))
    return 0


COMMANDS = {
    "catalog": (cmd_catalog, "list built-in loops and their default parameters"),
    "zeros": (cmd_zeros, "times at which the loop visits the center"),
    "liftable": (cmd_liftable, "check differentiability at every center visit"),
    "phase": (cmd_phase, "SO(3) geometric phase and its decomposition"),
    "solid-angle": (cmd_solid_angle, "generalized solid angle"),
    "lift": (cmd_lift, "horizontal lift samples (CSV by default)"),
    "rp2-check": (cmd_rp2_check, "compare the phase with the RP2 vertical displacement"),
    "oracle": (cmd_oracle, "greedy nearest-state lift against the ODE lift"),
    "tomography": (cmd_tomography, "simulated Stern-Gerlach tomography before and after the loop"),
    "report": (cmd_report, "write phase, lift and figures for one loop or 'all' to --out"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="spinphase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        if name != "catalog":
            p.add_argument("--loop", required=True,
                           help="catalog name such as circle(0.3,0.4), a loop-spec file, or inline JSON")
        p.add_argument("--steps", type=int, default=DEFAULT_STEPS, help="RK4 steps per segment")
        p.add_argument("--tol-zero", type=float, default=TOL_ZERO)
        p.add_argument("--tol-kink", type=float, default=TOL_KINK)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--shots", type=int, default=1_000_000)
        p.add_argument("--format", choices=("json", "csv"), default="csv" if name == "lift" else "json")
        p.add_argument("--out", help="output file (a directory for report)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for report --loop all")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    if args.steps < 1 or args.shots < 1 or args.jobs < 1:
        print("error: --steps, --shots and --jobs must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return func(args)
    except NotLiftableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_LIFTABLE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
