"""Config-driven batch runner over a directory of binary frames.

Per frame: read and validate, crop to the detection range, produce the three
views (random budget, density-equalized, ground-removed - all normalized to
n_p points), optionally select consistent keypoints, and write the artifacts
atomically under one directory per frame.  A manifest records per-frame
counts, the canonical config hash, and the seeds; frames are processed by a
bounded worker pool but the manifest is assembled in frame order, so outputs
are byte-identical for any worker count.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .cloud import crop, random_fixed_count, read_frame, write_frame
from .config import PipelineConfig
from .density import des_sample
from .errors import LidarPrepError
from .ground import gas_filter
from .keypoints import select_keypoints, write_mask
from .labels import gt_boxes, read_label_file
from .rng import BRANCH_PV1, BRANCH_PV2, BRANCH_PV3, RNG_NAME, derive_frame_seed

MANIFEST_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_FRAME = 3


@dataclass
class FrameResult:
    frame_id: str
    seed: int
    counts: dict
    keypoints: int | None
    error: str | None = None


@dataclass
class PipelineResult:
    exit_code: int
    manifest: dict
    output_dir: Path


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def process_frame(cfg: PipelineConfig, frame_path: Path, out_dir: Path) -> FrameResult:
    """Run every enabled stage for one frame and write its artifacts."""
    frame_id = frame_path.stem
    fseed = derive_frame_seed(cfg.seed, frame_id)
    cloud = read_frame(frame_path.read_bytes(), frame_id)
    cropped = crop(cloud, cfg.crop)

    pv1 = random_fixed_count(cropped, cfg.n_p, fseed, BRANCH_PV1)
    pv2 = random_fixed_count(des_sample(cropped, cfg.des, fseed), cfg.n_p, fseed, BRANCH_PV2)
    pv3 = random_fixed_count(gas_filter(cropped, cfg.gas), cfg.n_p, fseed, BRANCH_PV3)

    frame_dir = out_dir / frame_id
    frame_dir.mkdir(parents=True, exist_ok=True)
    for name, view in (("pv1", pv1), ("pv2", pv2), ("pv3", pv3)):
        _atomic_write(frame_dir / f"{name}.bin", write_frame(view))

    n_keypoints = None
    if "ckps" in cfg.stages:
        mask = select_keypoints(pv1, pv2, pv3, cfg.ckps)
        write_mask(mask, frame_dir / "ckps.mask")
        n_keypoints = len(mask)

    return FrameResult(
        frame_id, fseed,
        {"pv1": len(pv1), "pv2": len(pv2), "pv3": len(pv3)},
        n_keypoints,
    )


def _labels_for(frame_path: Path):
    label_path = frame_path.with_suffix(".txt")
    if label_path.exists():
        return gt_boxes(read_label_file(label_path))
    return None


def run_pipeline(
    cfg: PipelineConfig,
    input_dir,
    output_dir,
    workers: int = 1,
    keep_going: bool = False,
    emit_stats: bool = False,
) -> PipelineResult:
    input_dir, output_dir = Path(input_dir), Path(output_dir)
    frames = sorted(input_dir.glob("*.bin"))
    if not frames:
        return PipelineResult(EXIT_IO, {"error": f"no frames found in {input_dir}"}, output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    def worker(path: Path) -> FrameResult:
        try:
            return process_frame(cfg, path, output_dir)
        except (LidarPrepError, OSError) as e:
            return FrameResult(path.stem, 0, {}, None, error=f"{type(e).__name__}: {e}")

    if workers <= 1:
        results = [worker(p) for p in frames]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(worker, frames))

    results.sort(key=lambda r: r.frame_id)
    failed = [r for r in results if r.error]
    succeeded = [r for r in results if not r.error]

    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "rng": RNG_NAME,
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "n_p": cfg.n_p,
        "frames": [
            {"frame_id": r.frame_id, "seed": r.seed, "counts": r.counts,
             "keypoints": r.keypoints}
            for r in succeeded
        ],
        "errors": [{"frame_id": r.frame_id, "error": r.error} for r in failed],
    }

    if failed and not keep_going:
        first = failed[0]
        manifest["aborted_on"] = first.frame_id
        _atomic_write(output_dir / "manifest.json",
                      (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode())
        return PipelineResult(EXIT_FRAME, manifest, output_dir)

    if emit_stats or "stats" in cfg.stages:
        from .analysis import emit_report, ratio_report

        failed_ids = {r.frame_id for r in failed}
        labeled = []
        for path in frames:
            if path.stem in failed_ids:
                continue
            boxes = _labels_for(path)
            if boxes is None and keep_going:
                manifest["errors"].append(
                    {"frame_id": path.stem, "error": "NoGroundTruth: skipped in stats"}
                )
                continue
            labeled.append((read_frame(path.read_bytes(), path.stem), boxes))
        try:
            report = ratio_report(labeled, cfg.des, cfg.gas, cfg.crop, cfg.n_p, cfg.seed)
            for fmt in cfg.emit:
                _atomic_write(output_dir / f"stats.{fmt}", emit_report(report, fmt))
        except (LidarPrepError, ValueError) as e:
            manifest["errors"].append({"frame_id": None, "error": f"stats: {e}"})
            _atomic_write(output_dir / "manifest.json",
                          (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode())
            return PipelineResult(EXIT_FRAME, manifest, output_dir)

    _atomic_write(output_dir / "manifest.json",
                  (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode())
    exit_code = EXIT_OK if succeeded else EXIT_FRAME
    return PipelineResult(exit_code, manifest, output_dir)
