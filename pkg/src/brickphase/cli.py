"""``brickphase`` command line: plan, validate, simulate, step, render, measure.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config
from .metrics import NAMED_VIEWS
from .model import ModelError, PartPlacement, parse_model
from .plan_format import PlanFormatError, PlanValidationError, build_plan, load_plan, save_plan, validate_plan
from .render import render_svg
from .runtime import (
    AnchorPlaced,
    Next,
    Prev,
    RuntimeEventError,
    ToggleWireframe,
    TraceError,
    Warn,
    apply,
    check_invariants,
    init,
    parse_events,
    trace,
    trace_record,
)
from .sequencer import PlanningError, plan_draft
from .shapes import PART_DICTIONARY
from .tracking import CameraModel, Pose, reprojection_gap

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

LDRAW_SUFFIXES = {".ldr", ".mpd", ".dat"}


class UsageError(Exception):
    pass


class Failure(Exception):
    """Expected failure on bad input; maps to exit code 1."""


def _read_model(path: str, fmt: str | None):
    fmt = fmt or ("ldraw" if Path(path).suffix.lower() in LDRAW_SUFFIXES else "native")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise Failure(f"{path}: {exc.strerror}") from None
    try:
        return parse_model(text, format=fmt)
    except ModelError as exc:
        raise Failure(f"{path}: {exc}") from None


def _read_plan(path: str):
    try:
        return load_plan(path)
    except OSError as exc:
        raise Failure(f"{path}: {exc.strerror}") from None
    except (PlanFormatError, PlanValidationError) as exc:
        raise Failure(f"{path}: {exc}") from None


def _configs(args):
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    try:
        return load_config(args.config, overrides)
    except OSError as exc:
        raise UsageError(f"{args.config}: {exc.strerror}") from None
    except ConfigError as exc:
        raise UsageError(f"config: {exc}") from None


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.3f}"


# --- commands -----------------------------------------------------------------------


def cmd_plan(args, out) -> int:
    seq_cfg, _ = _configs(args)
    model = _read_model(args.model, args.format)
    try:
        draft = plan_draft(model, seq_cfg)
    except PlanningError as exc:
        raise Failure(str(exc)) from None
    result = build_plan(model, draft.order, draft.boundaries)
    save_plan(result, args.out)
    print(f"bootstrap  steps 1..{draft.bootstrap_end}", file=out)
    print(f"{'phase':>5} {'start':>5} {'end':>5} {'symmetry':>9} {'distinct':>9} {'confuse':>9}", file=out)
    for ph, (sym, dist, conf) in zip(result.phases, draft.phase_scores):
        print(f"{ph.phase_id:>5} {ph.start_step:>5} {ph.end_step:>5} {_fmt(sym):>9} {_fmt(dist):>9} {_fmt(conf):>9}",
              file=out)
    print(f"wrote {args.out}", file=out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    try:
        plan = load_plan(args.plan)
    except OSError as exc:
        raise Failure(f"{args.plan}: {exc.strerror}") from None
    except PlanFormatError as exc:
        raise Failure(f"{args.plan}: {exc}") from None
    except PlanValidationError as exc:
        for v in exc.violations:
            print(f"{args.plan}: {v}", file=out)
        return EXIT_INVALID
    problems = validate_plan(plan)
    for v in problems:  # pragma: no cover - load_plan already rejects these
        print(f"{args.plan}: {v}", file=out)
    if problems:  # pragma: no cover
        return EXIT_INVALID
    print(f"{args.plan}: valid ({plan.part_count} steps, {len(plan.phases)} model-target phases)", file=out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    plan = _read_plan(args.plan)
    try:
        events = parse_events(Path(args.script).read_text(encoding="utf-8"))
    except OSError as exc:
        raise Failure(f"{args.script}: {exc.strerror}") from None
    except ValueError as exc:
        raise Failure(f"{args.script}: {exc}") from None
    try:
        records = trace(plan, events)
    except TraceError as exc:
        raise Failure(str(exc)) from None
    status = EXIT_OK
    for i, (state, directives) in enumerate(records):
        event = events[i - 1] if i else None
        print(json.dumps(trace_record(i - 1 if i else None, event, state, directives), sort_keys=True), file=out)
        for problem in check_invariants(state, plan):
            print(f"invariant violated after event {i - 1}: {problem}", file=sys.stderr)
            status = EXIT_INVALID
    return status


def _summary(state, plan) -> str:
    phase = plan.phase_at(state.step)
    wf = "on" if state.wireframe_visible else "off"
    viz = state.viz
    return (f"step {state.step}/{plan.part_count} phase {'bootstrap' if phase is None else phase.phase_id} "
            f"mode {state.mode} targets {sorted(state.active_targets)} wireframe {wf} "
            f"current {sorted(viz.rendered_current)} outlines {len(viz.wireframe_previous)} "
            f"hidden {len(viz.hidden)}")


def cmd_step(args, out) -> int:
    plan = _read_plan(args.plan)
    state, _ = init(plan)
    state, _ = apply(state, AnchorPlaced(), plan)
    keys = {"n": Next(), "p": Prev(), "w": ToggleWireframe()}
    status = EXIT_OK
    print(_summary(state, plan), file=out)
    for line in sys.stdin:
        key = line.strip().lower()
        if not key:
            continue
        if key == "q":
            break
        if key not in keys:
            print(f"unknown key {key!r}; use n, p, w or q", file=out)
            continue
        try:
            state, directives = apply(state, keys[key], plan)
        except RuntimeEventError as exc:
            print(f"error: {exc}", file=out)
            status = EXIT_INVALID
            continue
        for d in directives:
            if isinstance(d, Warn):
                print(f"warning: {d.message}", file=out)
        print(_summary(state, plan), file=out)
    return status


def cmd_render(args, out) -> int:
    plan = _read_plan(args.plan)
    if not 1 <= args.step <= plan.part_count:
        raise UsageError(f"--step must lie in 1..{plan.part_count}")
    svg = render_svg(plan, args.step, args.view)
    Path(args.out).write_text(svg, encoding="utf-8", newline="\n")
    print(f"wrote {args.out}", file=out)
    return EXIT_OK


def _read_poses(path: str) -> list[Pose]:
    poses = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise Failure(f"{path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            poses.append(Pose.from_row([float(t) for t in line.replace(",", " ").split()]))
        except ValueError as exc:
            raise Failure(f"{path}:{lineno}: {exc}") from None
    if not poses or len(poses) % 2:
        raise Failure(f"{path}: expected pairs of pose rows (true, estimated), got {len(poses)} rows")
    return poses


def cmd_measure(args, out) -> int:
    poses = _read_poses(args.poses)
    if args.model:
        model = _read_model(args.model, args.format)
        k = args.prefix or model.part_count
        if not 1 <= k <= model.part_count:
            raise UsageError(f"--prefix must lie in 1..{model.part_count}")
        parts = list(model)[:k]
    else:
        parts = [PartPlacement(1, PART_DICTIONARY["3001"], 4, "identity", (0, 0, 0))]
    try:
        pp = None if args.principal is None else tuple(args.principal)
        camera = CameraModel(args.focal, tuple(args.resolution), pp)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    gaps = []
    for true, est in zip(poses[::2], poses[1::2]):
        try:
            gaps.append(reprojection_gap(true, est, camera, parts, args.samples))
        except ValueError as exc:
            raise Failure(str(exc)) from None
    mean = float(np.mean([g.mean_px for g in gaps]))
    peak = max(g.max_px for g in gaps)
    print(f"mean {mean:.3f} max {peak:.3f}", file=out)
    return EXIT_OK


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", default=argparse.SUPPRESS,
                        help="key=value file of planner and tracker settings")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="local-search seed")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", default=argparse.SUPPRESS,
                        help="override one setting (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="brickphase", parents=[common],
                                     description="Phased brick-assembly instruction planning and replay.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("plan", parents=[common], help="order and partition a model into a .plan.json")
    p.add_argument("model")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--format", choices=("native", "ldraw"), help="default: by file suffix")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", parents=[common], help="check a plan file")
    p.add_argument("plan")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", parents=[common], help="replay an event script, print a JSON-lines trace")
    p.add_argument("plan")
    p.add_argument("script")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("step", parents=[common], help="interactive stepping: n, p, w, q on stdin")
    p.add_argument("plan")
    p.set_defaults(func=cmd_step)

    p = sub.add_parser("render", parents=[common], help="SVG preview of one step")
    p.add_argument("plan")
    p.add_argument("--step", type=int, required=True)
    p.add_argument("--view", choices=sorted(NAMED_VIEWS), default="iso")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("measure", parents=[common], help="reprojection gap for pose pairs")
    p.add_argument("poses", help="rows of 12 numbers (rotation row-major, translation mm); true then estimated")
    p.add_argument("--model")
    p.add_argument("--format", choices=("native", "ldraw"))
    p.add_argument("--prefix", type=int)
    p.add_argument("--focal", type=float, default=1400.0)
    p.add_argument("--resolution", type=int, nargs=2, default=(1792, 828), metavar=("W", "H"))
    p.add_argument("--principal", type=float, nargs=2, metavar=("PX", "PY"))
    p.add_argument("--samples", type=int, default=10, help="samples per box edge")
    p.set_defaults(func=cmd_measure)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name, default in (("config", None), ("seed", None), ("set", None), ("verbose", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"brickphase: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the internal-error code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
