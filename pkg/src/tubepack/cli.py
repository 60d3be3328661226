"""Command line front end.

Exit codes: 0 success, 1 violations found, 2 parse or schema error,
3 unpackable instance, 4 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .bench import bench, format_csv, format_table
from .generate import PRESETS, GenProfile, generate_instance
from .io_format import (NotABoxHolder, NotATubeHolder, ParseError, SchemaError, box_manifest,
                        find_holder, format_instance, parse_instance, read_solution,
                        render_longitudinal, render_transversal, write_solution)
from .model import TUBES
from .partition import Unpackable, solve
from .validate import MalformedSolution, validate

EXIT_OK, EXIT_VIOLATIONS, EXIT_PARSE, EXIT_UNPACKABLE, EXIT_INTERNAL = range(5)


def _write(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    inst = parse_instance(Path(args.instance).read_text())
    sol = solve(inst, seed=args.seed, noise=args.noise, time_limit=args.time_limit,
                wallclock=args.wallclock, workers=args.workers, upright_only=args.upright_only)
    _write(write_solution(sol), args.out)
    m = sol.metrics
    fills = ", ".join(f"{f:.3f}" for f in m["fill_ratio"])
    print(f"containers: {m['containers_used']}  fill: [{fills}]  time: {m['wall_time']:.2f}s",
          file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = parse_instance(Path(args.instance).read_text())
    sol = read_solution(Path(args.solution).read_text())
    found = validate(inst, sol, tolerance=args.tolerance)
    for v in found:
        print(f"{v.code.value}\t{v.subject}\t{v.magnitude:.4f}\t{v.detail}")
    if found:
        print(f"{len(found)} violation(s)", file=sys.stderr)
        return EXIT_VIOLATIONS
    print("ok", file=sys.stderr)
    return EXIT_OK


def cmd_render(args) -> int:
    sol = read_solution(Path(args.solution).read_text())
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.holder:
        ci, h = find_holder(sol, args.holder)
        targets = [(ci, h)]
    else:
        targets = [(ci, h) for ci, pc in enumerate(sol.containers, start=1) for h in pc.holders]
        for ci in range(1, len(sol.containers) + 1):
            (out_dir / f"container{ci}.svg").write_text(render_longitudinal(sol, ci))
    for ci, h in targets:
        ref = f"C{ci}:{h.id}"
        if h.kind == TUBES:
            (out_dir / f"C{ci}_{h.id}.svg").write_text(render_transversal(sol, ref))
        else:
            (out_dir / f"C{ci}_{h.id}.txt").write_text(box_manifest(sol, ref))
    return EXIT_OK


def _profile(pairs, seed) -> GenProfile:
    fields = {f.name: f for f in dataclasses.fields(GenProfile)}
    values: dict = {}
    for item in pairs or []:
        key, sep, val = item.partition("=")
        if key == "preset":
            if val not in PRESETS:
                raise SystemExit(f"unknown preset {val!r}; choose from {', '.join(PRESETS)}")
            n, t, m, b = PRESETS[val]
            values.update(n_tube_types=n, total_tubes=t, n_box_types=m, total_boxes=b)
            continue
        if not sep or key not in fields or key in ("container", "seed"):
            raise SystemExit(f"bad profile setting {item!r}")
        if key in ("lengths", "ediam_range", "bore_ratio", "box_side_range"):
            values[key] = tuple(float(x) for x in val.split(","))
        else:
            values[key] = int(val)
    base = dict(zip(("n_tube_types", "total_tubes", "n_box_types", "total_boxes"), PRESETS["occ-cie-1"]))
    base.update(values)
    return GenProfile(seed=seed, **base)


def cmd_gen(args) -> int:
    try:
        profile = _profile(args.profile, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _write(format_instance(generate_instance(profile)), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    paths = sorted(Path(args.dir).glob("*.txt"))
    rows = bench(paths, time_limit=args.time_limit, seed=args.seed, wallclock=args.wallclock)
    sys.stdout.write(format_table(rows))
    if args.csv:
        Path(args.csv).write_text(format_csv(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tubepack", description="Pack tubes and boxes into containers.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--time-limit", type=float, default=30.0,
                   help="seconds, converted to a fixed node quota unless --wallclock")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise", type=float, default=0.2)
    s.add_argument("--out", help="solution file (default: stdout)")
    s.add_argument("--wallclock", action="store_true", help="use a real-time deadline")
    s.add_argument("--workers", type=int, default=1, help="processes for tube restarts")
    s.add_argument("--upright-only", action="store_true",
                   help="rotate boxes about the vertical axis only")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a solution against its instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.add_argument("--tolerance", type=float, default=1e-4)
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("render", help="write SVG sections and box manifests")
    r.add_argument("solution")
    r.add_argument("--holder", help="holder reference such as H3 or C2:H3")
    r.add_argument("--out-dir", default=".")
    r.set_defaults(func=cmd_render)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--profile", nargs="*", metavar="KEY=VAL",
                   help="profile settings, e.g. preset=occ-cie-5 or total_tubes=500")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="solve every *.txt instance in a directory")
    b.add_argument("dir")
    b.add_argument("--time-limit", type=float, default=30.0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--wallclock", action="store_true")
    b.add_argument("--csv", help="also write the table as CSV")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SchemaError, MalformedSolution) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Unpackable as exc:
        print(f"unpackable: {exc}", file=sys.stderr)
        return EXIT_UNPACKABLE
    except (NotATubeHolder, NotABoxHolder, KeyError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # anything else is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
