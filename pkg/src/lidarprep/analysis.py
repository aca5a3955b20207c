"""Foreground ratio reports and per-ring percentage shifts.

Over a corpus of labeled frames, each sampling operator (crop only, random
budget, density equalization, ground removal) is applied and every surviving
point is classified as foreground when it lies inside a ground-truth box.
Counts are split into the near high-density rings and the far low-density
rings, averaged over frames, and summarized by two ratios:

* R1 - foreground retention relative to the crop-only baseline;
* R2 - foreground share of all points under the same operator.

Reports serialize to CSV (columns: region, op, n_all, n_fg, r1, r2) and to a
schema-validated JSON document that parses back to an equal report.
"""

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .boxes import points_in_any_box
from .cloud import PointCloud, crop, random_fixed_count
from .density import DesConfig, des_sample, partition_rings
from .errors import NoGroundTruth
from .ground import GasConfig, gas_filter
from .rng import BRANCH_PV1, BRANCH_PV2, BRANCH_PV3, derive_frame_seed

OPS = ("none", "random", "des", "gas")
REGIONS = ("hd", "ld")


@dataclass(frozen=True)
class RegionSplit:
    """Ring indices of the near (high-density) and far (low-density) regions."""

    hd_rings: tuple
    ld_rings: tuple

    def __post_init__(self):
        hd, ld = set(self.hd_rings), set(self.ld_rings)
        if hd & ld:
            raise ValueError("hd and ld rings must be disjoint")
        n_r = len(hd) + len(ld)
        if hd | ld != set(range(1, n_r + 1)):
            raise ValueError("hd and ld rings together must cover 1..n_r")

    @staticmethod
    def default(n_r: int) -> "RegionSplit":
        if n_r < 4:
            raise ValueError("default split needs at least 4 rings")
        return RegionSplit(tuple(range(1, 4)), tuple(range(4, n_r + 1)))


@dataclass
class ReportRow:
    region: str
    op: str
    n_all: float
    n_fg: float
    r1: float | None
    r2: float


@dataclass
class RatioReport:
    rows: list
    n_frames: int = 0

    def row(self, region: str, op: str) -> ReportRow:
        for r in self.rows:
            if r.region == region and r.op == op:
                return r
        raise KeyError((region, op))


@dataclass
class PercentShift:
    """Per-ring percentage of in-ring points before and after an operator."""

    before: np.ndarray
    after: np.ndarray


def region_percentages(before: PointCloud, after: PointCloud, cfg: DesConfig) -> PercentShift:
    """Ring-share percentages of two clouds under the same ring partition."""
    out = []
    for cloud in (before, after):
        counts = partition_rings(cloud, cfg).counts.astype(np.float64)
        total = counts.sum()
        out.append(counts / total * 100.0 if total > 0 else np.zeros_like(counts))
    return PercentShift(out[0], out[1])


def _region_counts(cloud: PointCloud, ring_of_point, fg_mask, split: RegionSplit):
    """(n_all, n_fg) per region for one sampled cloud."""
    result = {}
    for name, rings in (("hd", split.hd_rings), ("ld", split.ld_rings)):
        member = np.isin(ring_of_point, list(rings))
        result[name] = (int(member.sum()), int((member & fg_mask).sum()))
    return result


def ratio_report(
    frames,
    des_cfg: DesConfig,
    gas_cfg: GasConfig,
    crop_range,
    n_p: int,
    seed: int,
    split: RegionSplit | None = None,
) -> RatioReport:
    """Average foreground ratios of the four sampling operators over labeled frames.

    ``frames`` yields (cloud, gt_boxes) pairs; a None box list is an error
    while an empty list is a legitimate frame with no objects.
    """
    split = split or RegionSplit.default(des_cfg.n_r)
    sums = {(reg, op): [0, 0] for reg in REGIONS for op in OPS}
    n_frames = 0

    for i, (cloud, boxes) in enumerate(frames):
        if boxes is None:
            raise NoGroundTruth(f"frame {cloud.frame_id or i} has no ground-truth labels")
        fseed = derive_frame_seed(seed, cloud.frame_id or str(i))
        cropped = crop(cloud, crop_range)
        sampled = {
            "none": cropped,
            "random": random_fixed_count(cropped, n_p, fseed, BRANCH_PV1),
            "des": random_fixed_count(des_sample(cropped, des_cfg, fseed), n_p, fseed, BRANCH_PV2),
            "gas": random_fixed_count(gas_filter(cropped, gas_cfg), n_p, fseed, BRANCH_PV3),
        }
        for op, out in sampled.items():
            rings = partition_rings(out, des_cfg).ring
            fg = points_in_any_box(out.points[:, :3].astype(np.float64), boxes)
            for reg, (n_all, n_fg) in _region_counts(out, rings, fg, split).items():
                sums[(reg, op)][0] += n_all
                sums[(reg, op)][1] += n_fg
        n_frames += 1

    if n_frames == 0:
        raise ValueError("ratio_report needs at least one frame")

    rows = []
    for reg in REGIONS:
        base_fg = sums[(reg, "none")][1] / n_frames
        for op in OPS:
            n_all = sums[(reg, op)][0] / n_frames
            n_fg = sums[(reg, op)][1] / n_frames
            r1 = None if op == "none" or base_fg == 0 else n_fg / base_fg
            r2 = n_fg / n_all if n_all > 0 else 0.0
            rows.append(ReportRow(reg, op, n_all, n_fg, r1, r2))
    return RatioReport(rows, n_frames)


REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "n_frames", "rows"],
    "properties": {
        "schema_version": {"const": 1},
        "n_frames": {"type": "integer", "minimum": 0},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["region", "op", "n_all", "n_fg", "r1", "r2"],
                "properties": {
                    "region": {"enum": list(REGIONS)},
                    "op": {"enum": list(OPS)},
                    "n_all": {"type": "number"},
                    "n_fg": {"type": "number"},
                    "r1": {"type": ["number", "null"]},
                    "r2": {"type": "number", "minimum": 0, "maximum": 1},
                },
            },
        },
    },
}


def emit_report(report: RatioReport, fmt: str = "csv") -> bytes:
    """Serialize a report; counts are rounded for display, ratios stay exact."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["region", "op", "n_all", "n_fg", "r1", "r2"])
        for r in report.rows:
            writer.writerow([
                r.region, r.op, round(r.n_all), round(r.n_fg),
                "" if r.r1 is None else repr(r.r1), repr(r.r2),
            ])
        return buf.getvalue().encode()
    if fmt == "json":
        doc = {
            "schema_version": 1,
            "n_frames": report.n_frames,
            "rows": [
                {"region": r.region, "op": r.op, "n_all": r.n_all, "n_fg": r.n_fg,
                 "r1": r.r1, "r2": r.r2}
                for r in report.rows
            ],
        }
        import jsonschema

        jsonschema.validate(doc, REPORT_SCHEMA)
        return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()
    raise ValueError(f"unknown report format: {fmt}")


def parse_report(data: bytes) -> RatioReport:
    """Parse the JSON form back into an equal RatioReport."""
    import jsonschema

    doc = json.loads(data.decode())
    jsonschema.validate(doc, REPORT_SCHEMA)
    rows = [
        ReportRow(r["region"], r["op"], r["n_all"], r["n_fg"], r["r1"], r["r2"])
        for r in doc["rows"]
    ]
    return RatioReport(rows, doc["n_frames"])
