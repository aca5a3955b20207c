"""Command-line entry points.

    lidarprep run      --config cfg.json --input frames/ --output out/
    lidarprep validate --config cfg.json
    lidarprep losses   --pv1 f/pv1.bin --mask f/ckps.mask --proposals p1.txt p2.txt p3.txt \
                       --gt gt.txt --out losses.json

Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 frame error
(fail-fast mode).
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .cloud import read_frame
from .config import load_config, preset_config, validate_config
from .errors import ConfigError, LidarPrepError
from .foreground import foreground_sample_points
from .keypoints import attach_anchors, read_mask
from .labels import gt_boxes, proposals_from_labels, read_label_file
from .losses import LossBreakdown
from .pipeline import EXIT_CONFIG, EXIT_IO, run_pipeline


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lidarprep")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="process a directory of .bin frames")
    run.add_argument("--config", type=Path, help="JSON pipeline config")
    run.add_argument("--preset", choices=("kitti", "wod"), help="use a preset instead of a config file")
    run.add_argument("--input", type=Path, required=True)
    run.add_argument("--output", type=Path,
                     help="output directory (overrides the config's output_dir)")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--stages", help="comma-separated subset of sms,ckps,stats")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--keep-going", action="store_true", help="skip bad frames instead of aborting")
    run.add_argument("--emit-stats", action="store_true", help="also write the ratio report")

    val = sub.add_parser("validate", help="check a config file, reporting every violation")
    val.add_argument("--config", type=Path, required=True)

    loss = sub.add_parser("losses", help="consistency loss breakdown for one frame")
    loss.add_argument("--pv1", type=Path, help="view-1 frame (.bin) for keypoint anchors")
    loss.add_argument("--mask", type=Path, help="consistent keypoint mask file")
    loss.add_argument("--proposals", type=Path, nargs=3, metavar=("P1", "P2", "P3"),
                      help="per-view proposal files (score column = raw logit)")
    loss.add_argument("--gt", type=Path, help="ground-truth label file")
    loss.add_argument("--n-mv", type=int, default=3)
    loss.add_argument("--lambdas", default="1,1,0", help="stage-1 weights l1,l2,l3")
    loss.add_argument("--l-cls", type=float, default=0.0)
    loss.add_argument("--l-box", type=float, default=0.0)
    loss.add_argument("--l-dir", type=float, default=0.0)
    loss.add_argument("--l-rcnn", type=float, default=0.0)
    loss.add_argument("--out", type=Path, help="write the JSON record here instead of stdout")
    loss.add_argument("--cases", type=Path,
                      help="batch mode: process every subdirectory with pv1.bin, ckps.mask, "
                           "proposals_v{1,2,3}.txt, gt.txt, writing losses.json into each")
    return parser


def _cmd_run(args) -> int:
    if args.config is None and args.preset is None:
        print("error: run needs --config or --preset", file=sys.stderr)
        return EXIT_CONFIG
    if args.preset and args.config:
        print("error: pass either --config or --preset, not both", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config) if args.config else preset_config(args.preset)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg.seed = args.seed
    if args.stages:
        stages = tuple(s for s in args.stages.split(",") if s)
        unknown = [s for s in stages if s not in ("sms", "ckps", "stats")]
        if unknown:
            print(f"config error: unknown stages {unknown}", file=sys.stderr)
            return EXIT_CONFIG
        cfg.stages = stages
    if not args.input.is_dir():
        print(f"I/O error: input directory {args.input} not found", file=sys.stderr)
        return EXIT_IO
    output = args.output or (Path(cfg.output_dir) if cfg.output_dir else None)
    if output is None:
        print("error: run needs --output or an output_dir in the config", file=sys.stderr)
        return EXIT_CONFIG

    result = run_pipeline(
        cfg, args.input, output,
        workers=args.workers, keep_going=args.keep_going, emit_stats=args.emit_stats,
    )
    if result.exit_code != 0:
        detail = result.manifest.get("error") or result.manifest.get("errors")
        print(f"pipeline failed: {detail}", file=sys.stderr)
    else:
        n = len(result.manifest["frames"])
        print(f"processed {n} frame(s) -> {result.output_dir}")
    return result.exit_code


def _cmd_validate(args) -> int:
    report = validate_config(args.config)
    if report.ok:
        print("config valid")
        return 0
    for violation in report.violations:
        print(f"violation: {violation}")
    return EXIT_CONFIG


def _loss_record(pv1_path, mask_path, proposal_paths, gt_path, args) -> dict:
    cloud1 = read_frame(pv1_path.read_bytes(), pv1_path.stem)
    mask = attach_anchors(read_mask(mask_path), cloud1)
    views = [proposals_from_labels(read_label_file(p)) for p in proposal_paths]
    gt = gt_boxes(read_label_file(gt_path))

    cf = foreground_sample_points(views, gt, mask)
    lambdas = tuple(float(v) for v in args.lambdas.split(","))
    breakdown = LossBreakdown.compute(
        cf, args.n_mv, lambdas,
        l_cls=args.l_cls, l_box=args.l_box, l_dir=args.l_dir, l_rcnn=args.l_rcnn,
    )
    record = {"frame_id": mask.frame_id or pv1_path.stem}
    record.update(breakdown.to_record())
    record["fg_view_indices"] = mask.view_indices[cf.mask.indices].tolist()
    return record


def _cmd_losses(args) -> int:
    try:
        if args.cases:
            for case in sorted(p for p in args.cases.iterdir() if p.is_dir()):
                record = _loss_record(
                    case / "pv1.bin", case / "ckps.mask",
                    [case / f"proposals_v{i}.txt" for i in (1, 2, 3)],
                    case / "gt.txt", args,
                )
                (case / "losses.json").write_text(
                    json.dumps(record, indent=2, sort_keys=True) + "\n")
            return 0
        missing = [n for n, v in (("--pv1", args.pv1), ("--mask", args.mask),
                                  ("--proposals", args.proposals), ("--gt", args.gt)) if not v]
        if missing:
            print(f"error: losses needs {', '.join(missing)} (or --cases)", file=sys.stderr)
            return EXIT_CONFIG
        record = _loss_record(args.pv1, args.mask, args.proposals, args.gt, args)
        text = json.dumps(record, indent=2, sort_keys=True) + "\n"
        if args.out:
            args.out.write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except LidarPrepError as e:
        print(f"frame error: {e}", file=sys.stderr)
        return 3


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "validate":
        return _cmd_validate(args)
    return _cmd_losses(args)


if __name__ == "__main__":
    sys.exit(main())
