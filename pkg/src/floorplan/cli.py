"""Command-line entry point: ``floorplan <command> ...``.

Structured input and output is JSON; sequences and instructions are plain
text. Every command exits 0 on success and 1 with a one-line diagnostic on
stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import replace
from pathlib import Path
from typing import Optional

from .boundary import BoundarySpec, decompose, reconstruct
from .config import CostWeights, ScaleConfig, Settings, load_settings
from .dataset import (
    SPLITS,
    compute_stats,
    import_upstream,
    load_corpus,
    plan_from_json,
    plan_to_json,
    save_corpus,
)
from .geometry import FloorPlan
from .imaging import render_png
from .instruction import constraints_from_json, constraints_to_json, generate, generate_sections, parse
from .metrics import DEFAULT_MAX_SHIFT, MACRO_MODES
from .pipeline import evaluate_plans, run_pipeline, synthetic_corpus
from .sequence import decode_boundary, decode_plan, encode_boundary, encode_plan
from .solver import solve


class CommandError(Exception):
    pass


# -- helpers ------------------------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str, allow_empty: bool = False):
    text = _read_text(path)
    if allow_empty and not text.strip():
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CommandError(f"{path}: schema error: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _write(text: str, output: Optional[str]) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _dump(obj, output: Optional[str]) -> None:
    _write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", output)


def _load_plan(path: str) -> FloorPlan:
    data = _read_json(path, allow_empty=True)
    if data is None:
        return FloorPlan(())
    try:
        return plan_from_json(data)
    except ValueError as exc:
        raise CommandError(f"{path}: {exc}") from None


def _load_boundary(path: str) -> BoundarySpec:
    text = _read_text(path).strip()
    if text.startswith("+"):
        return decode_boundary(text)
    data = _read_json(path)
    if isinstance(data, dict) and isinstance(data.get("boundary"), str):
        return decode_boundary(data["boundary"])
    raise CommandError(f"{path}: expected a boundary sequence or a JSON object with a 'boundary' string")


def _plans_in_dir(path: str) -> dict[str, FloorPlan]:
    d = Path(path)
    if not d.is_dir():
        raise CommandError(f"{path} is not a directory")
    return {p.stem: _load_plan(str(p)) for p in sorted(d.glob("*.json"))}


def _settings(args) -> Settings:
    s = load_settings(Path(args.config) if args.config else None)
    solver = s.solver
    for key in ("seed", "iterations", "restarts"):
        value = getattr(args, key, None)
        if value is not None:
            solver = replace(solver, **{key: value})
    s = replace(s, solver=solver)
    if getattr(args, "weights", None):
        s = replace(s, weights=CostWeights.parse(args.weights))
    if getattr(args, "feet_per_pixel", None) is not None:
        s = replace(s, scale=ScaleConfig(args.feet_per_pixel))
    return s


# -- commands -----------------------------------------------------------------


def cmd_encode(args) -> None:
    fp = _load_plan(args.plan)
    lines = [encode_plan(fp)]
    if fp.boundary is not None and fp.boundary.any():
        lines.append(encode_boundary(decompose(fp.boundary)))
    _write("\n".join(lines) + "\n", args.output)


def cmd_decode(args) -> None:
    lines = [ln for ln in _read_text(args.sequence).splitlines() if ln.strip()]
    if not lines:
        raise CommandError("empty sequence input")
    report = decode_plan(lines[0], "lenient" if args.lenient else "strict")
    for issue in report.issues:
        print(f"issue at offset {issue.position}: {issue.kind.value}", file=sys.stderr)
    fp = report.plan
    if len(lines) > 1 and lines[1].lstrip().startswith("+"):
        fp = fp.with_boundary(reconstruct(decode_boundary(lines[1]), strict=not args.lenient))
    if args.report:
        _dump({"ok": report.ok, "issues": [{"position": i.position, "kind": i.kind.value} for i in report.issues]}, args.report)
    _dump(plan_to_json(fp), args.output)


def cmd_parse(args) -> None:
    _dump(constraints_to_json(parse(_read_text(args.instructions))), args.output)


def cmd_gen_instr(args) -> None:
    fp = _load_plan(args.plan)
    s = _settings(args)
    if args.sections:
        text = "\n".join(generate_sections(fp, s.scale, args.seed, s.tolerance.adjacency_gap))
    else:
        text = generate(fp, s.scale, args.seed, s.tolerance.adjacency_gap)
    _write(text + "\n", args.output)


def cmd_solve(args) -> None:
    s = _settings(args)
    cs = constraints_from_json(_read_json(args.constraints))
    bs = _load_boundary(args.boundary)
    fp = solve(cs, bs, s.solver, s.weights, s.scale, s.tolerance.adjacency_gap)
    _dump(plan_to_json(fp), args.output)


def cmd_render(args) -> None:
    render_png(_load_plan(args.plan), args.output, clip_to_boundary=args.clip_to_boundary)


def cmd_eval(args) -> None:
    gt = _plans_in_dir(args.gt_dir)
    pred = _plans_in_dir(args.pred_dir)
    scores = evaluate_plans(gt, pred, args.shift_max, args.macro_mode, args.jobs)
    _dump(scores.to_json(), args.output)


def _corpus(args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        records = load_corpus(args.corpus, args.images)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return records


def cmd_stats(args) -> None:
    _dump(compute_stats(_corpus(args)).to_json(), args.output)


def cmd_pipeline(args) -> None:
    records = [r for r in _corpus(args) if args.split == "all" or r.split == args.split]
    s = _settings(args)
    scores, plans = run_pipeline(records, s, args.instruction, args.shift_max, args.macro_mode, args.jobs)
    if args.save_plans:
        out = Path(args.save_plans)
        out.mkdir(parents=True, exist_ok=True)
        for rid, fp in plans.items():
            (out / f"{rid}.json").write_text(json.dumps(plan_to_json(fp), indent=2) + "\n", encoding="utf-8")
    _dump(scores.to_json(), args.output)


def cmd_synth(args) -> None:
    s = _settings(args)
    shapes = tuple(x.strip() for x in args.shapes.split(",") if x.strip())
    records = synthetic_corpus(args.n, args.seed, args.min_rooms, args.max_rooms, shapes, args.split, s)
    save_corpus(records, args.output, args.images)


def cmd_import(args) -> None:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        records = import_upstream(args.images_dir, args.palette, args.instructions, args.split)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    save_corpus(records, args.output, args.images)


# -- argument parsing ---------------------------------------------------------


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="solver seed (default from config, else 0)")
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--weights", default=None, help="comma list such as 'w_area=1,w_relation=4'")
    p.add_argument("--feet-per-pixel", type=float, default=None)


def _eval_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--shift-max",
        type=int,
        default=0,
        help=f"search translations up to this many pixels (0 disables; {DEFAULT_MAX_SHIFT} is typical)",
    )
    p.add_argument("--macro-mode", choices=MACRO_MODES, default="present")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="floorplan", description="Floor-plan sequences, instructions, layout and scoring.")
    parser.add_argument("--config", help="JSON config file (default: $FLOORPLAN_CONFIG or ./floorplan.json)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="plan JSON -> target sequence (and boundary sequence)")
    p.add_argument("plan")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="sequence text -> plan JSON")
    p.add_argument("sequence")
    p.add_argument("--lenient", action="store_true", help="recover what parses and report issues")
    p.add_argument("--report", help="write the issue report as JSON here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("parse", help="instruction text -> constraints JSON")
    p.add_argument("instructions")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("gen-instr", help="plan JSON -> template instructions")
    p.add_argument("plan")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--feet-per-pixel", type=float, default=None)
    p.add_argument("--sections", action="store_true", help="one line per room")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_instr)

    p = sub.add_parser("solve", help="constraints + boundary -> plan JSON")
    p.add_argument("constraints")
    p.add_argument("boundary", help="boundary sequence file, or JSON with a 'boundary' string")
    _solver_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("render", help="plan JSON -> PNG label map")
    p.add_argument("plan")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--clip-to-boundary", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("eval", help="score prediction plans against GT plans (matched by file name)")
    p.add_argument("gt_dir")
    p.add_argument("pred_dir")
    _eval_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("corpus", help="annotation JSON-lines file")
    p.add_argument("--images", help="label-map directory (default: next to the annotations)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("pipeline", help="parse -> solve -> score for every record of a split")
    p.add_argument("corpus")
    p.add_argument("--images")
    p.add_argument("--split", choices=SPLITS + ("all",), default="test")
    p.add_argument("--instruction", choices=("auto", "human", "artificial"), default="auto")
    p.add_argument("--save-plans", help="directory for the solved plans")
    _solver_flags(p)
    _eval_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("synth", help="write a random corpus with template instructions")
    p.add_argument("-n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-rooms", type=int, default=4)
    p.add_argument("--max-rooms", type=int, default=8)
    p.add_argument("--shapes", default="rect,L")
    p.add_argument("--split", choices=SPLITS, default="test")
    p.add_argument("--feet-per-pixel", type=float, default=None)
    p.add_argument("--images")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("import", help="convert upstream label images into a corpus")
    p.add_argument("images_dir")
    p.add_argument("--palette", required=True, help="JSON palette mapping pixel values to room types")
    p.add_argument("--instructions", help="JSON object keyed by image stem")
    p.add_argument("--split", choices=SPLITS, default="train")
    p.add_argument("--images", help="output label-map directory")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_import)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CommandError, ValueError, OSError, KeyError) as exc:
        msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        print(f"floorplan {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
