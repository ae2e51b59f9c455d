"""`scene2locale` command line: run, eval, import-db."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_config
from .evaluate import EvalPair, eval_detection, eval_location, eval_recognition
from .importdb import convert
from .runner import EXIT_FAILED, Pipeline, list_images


def _add_run(sub):
    p = sub.add_parser("run", help="run the pipeline on one image or a directory")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--image", type=Path)
    src.add_argument("--batch", type=Path, help="directory of images")
    p.add_argument("--config", type=Path, help="flat key = value file")
    p.add_argument("--debug-dir", type=Path)
    p.add_argument("--maps-dir", type=Path, help="directory of <image_id>.s2lr detector maps")
    p.add_argument("--report", type=Path, help="append JSON-line reports here instead of stdout")
    p.add_argument("--geotag-path", type=Path)
    p.add_argument("--score-thresh", type=float)
    p.add_argument("--nms-iou", type=float)
    p.add_argument("--grow-step", type=float)
    p.add_argument("--max-growth", type=float)
    p.add_argument("--heads", help="comma-separated head languages, e.g. en,hi")
    p.add_argument("--heads-dir", type=Path)
    p.add_argument("--gate-threshold", type=float)
    p.add_argument("--csdb", type=Path)
    p.add_argument("--lldb", type=Path)
    p.add_argument("--rldb", type=Path)


def _add_eval(sub):
    p = sub.add_parser("eval", help="score predictions against ground truth (JSON lines)")
    p.add_argument("--pred", type=Path, required=True)
    p.add_argument("--gt", type=Path, required=True)
    p.add_argument("--mode", choices=("det", "rec", "loc"), required=True)
    p.add_argument("--iou", type=float, default=0.5, help="detection match threshold")


def _add_import(sub):
    p = sub.add_parser("import-db", help="normalize a gazetteer CSV to the canonical schema")
    p.add_argument("--source", choices=("csdb", "lldb", "rldb"), required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scene2locale", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run(sub)
    _add_eval(sub)
    _add_import(sub)
    return parser


def cmd_run(args) -> int:
    heads = tuple(h.strip() for h in args.heads.split(",")) if args.heads else None
    try:
        cfg = load_config(args.config, debug_dir=args.debug_dir, maps_dir=args.maps_dir,
                          geotag_path=args.geotag_path, score_thresh=args.score_thresh,
                          nms_iou=args.nms_iou, grow_step=args.grow_step, max_growth=args.max_growth,
                          heads=heads, heads_dir=args.heads_dir, gate_threshold=args.gate_threshold,
                          csdb=args.csdb, lldb=args.lldb, rldb=args.rldb)
        pipe = Pipeline.from_config(cfg)
    except (OSError, ValueError, KeyError) as e:
        print(f"scene2locale: configuration error: {e}", file=sys.stderr)
        return EXIT_FAILED
    if args.image is not None:
        paths = [args.image]
    else:
        if not args.batch.is_dir():
            print(f"scene2locale: {args.batch} is not a directory", file=sys.stderr)
            return EXIT_FAILED
        paths = list_images(args.batch)
    out = open(args.report, "a", encoding="utf-8") if args.report else sys.stdout
    try:
        def sink(rep):
            out.write(rep.to_json() + "\n")
            out.flush()
        reports = pipe.run_batch(paths, sink)
    finally:
        if args.report:
            out.close()
    return max((r.exit_code for r in reports), default=0)


def _read_jsonl(path: Path) -> dict[str, dict]:
    rows = {}
    for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        obj = json.loads(line)
        if "image_id" not in obj:
            raise ValueError(f"{path}:{n}: missing image_id")
        rows[obj["image_id"]] = obj
    return rows


def _field(obj: dict, mode: str):
    """Accepts plain records or pipeline reports."""
    stages = obj.get("stages")
    if mode == "det":
        if "quads" in obj:
            return obj["quads"]
        return [q["points"] for q in (stages or {}).get("detect") or []]
    if mode == "rec":
        if "text" in obj:
            return obj["text"]
        return ((stages or {}).get("recognize") or {}).get("text", "")
    if "latitude" in obj:
        return None if obj["latitude"] is None else (obj["latitude"], obj["longitude"])
    stages = stages or {}
    t = (stages.get("resolve") or {}).get("tuple")
    if t is None and obj.get("status") == "resolved":
        t = stages.get("exif")  # GPS short-circuit
    return None if t is None else (t["latitude"], t["longitude"])


def cmd_eval(args) -> int:
    pred, gt = _read_jsonl(args.pred), _read_jsonl(args.gt)
    if set(pred) != set(gt):
        print(f"scene2locale: image ids differ: {sorted(set(pred) ^ set(gt))}", file=sys.stderr)
        return EXIT_FAILED
    pairs = [EvalPair(i, _field(pred[i], args.mode), _field(gt[i], args.mode)) for i in sorted(gt)]
    if args.mode == "det":
        p, r, f = eval_detection(pairs, args.iou)
        result = {"precision": p, "recall": r, "f_score": f}
    elif args.mode == "rec":
        p, r = eval_recognition(pairs)
        result = {"precision": p, "recall": r}
    else:
        try:
            s = eval_location(pairs)
        except ValueError as e:
            print(f"scene2locale: {e}", file=sys.stderr)
            return EXIT_FAILED
        result = {"mean_km": s.mean_km, "resolved": s.resolved, "total": s.total,
                  "resolution_rate": s.resolution_rate}
    print(json.dumps(result, sort_keys=True))
    return 0


def cmd_import(args) -> int:
    try:
        n = convert(args.source, args.input, args.output)
    except (OSError, ValueError) as e:
        print(f"scene2locale: {e}", file=sys.stderr)
        return EXIT_FAILED
    print(f"wrote {n} {args.source} rows to {args.output}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return {"run": cmd_run, "eval": cmd_eval, "import-db": cmd_import}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
