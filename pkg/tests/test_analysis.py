"""Ratio reports, ring percentage shifts, and their serializations."""

import numpy as np
import pytest

from lidarprep.analysis import (
    OPS,
    RatioReport,
    RegionSplit,
    ReportRow,
    emit_report,
    parse_report,
    ratio_report,
    region_percentages,
)
from lidarprep.boxes import points_in_any_box
from lidarprep.cloud import CropRange, PointCloud, crop, random_fixed_count
from lidarprep.density import DesConfig, des_sample, partition_rings
from lidarprep.errors import NoGroundTruth
from lidarprep.ground import GasConfig, gas_filter
from lidarprep.rng import BRANCH_PV1, BRANCH_PV2, BRANCH_PV3, derive_frame_seed
from lidarprep.synthetic import SceneSpec, corpus

DES = DesConfig()
GAS = GasConfig()
CROP = CropRange(0.0, 70.4, -40.0, 40.0, -3.0, 1.0)


def test_region_split_default_and_invariants():
    split = RegionSplit.default(8)
    assert split.hd_rings == (1, 2, 3)
    assert split.ld_rings == (4, 5, 6, 7, 8)
    with pytest.raises(ValueError):
        RegionSplit((1, 2), (2, 3))
    with pytest.raises(ValueError):
        RegionSplit((1, 2), (4, 5))  # hole at 3


def test_identical_clouds_identical_percentages(rng):
    from conftest import random_cloud

    cloud = random_cloud(rng, 2000, extent=((0, 45), (-45, 45), (-2, 1)))
    shift = region_percentages(cloud, cloud, DES)
    assert np.array_equal(shift.before, shift.after)
    assert shift.before.sum() == pytest.approx(100.0, abs=1e-9)


def test_all_points_in_first_ring():
    pts = np.array([[1, 0, 0, 0], [2, 0, 0, 0], [0, 3, 0, 0]], dtype=np.float32)
    shift = region_percentages(PointCloud(pts), PointCloud(pts), DES)
    assert shift.before.tolist() == [100, 0, 0, 0, 0, 0, 0, 0]


def test_des_shifts_percentages_outward():
    frames = corpus(seed=5, n_frames=3)
    for cloud, _boxes in frames:
        cropped = crop(cloud, CROP)
        out = des_sample(cropped, DES, seed=11)
        shift = region_percentages(cropped, out, DES)
        assert shift.after[:3].sum() < shift.before[:3].sum()
        assert shift.after[3:].sum() > shift.before[3:].sum()


def test_missing_labels_raise():
    frames = [(corpus(seed=1, n_frames=1)[0][0], None)]
    with pytest.raises(NoGroundTruth):
        ratio_report(frames, DES, GAS, CROP, 4096, seed=0)


def test_zero_gt_frame_gives_null_r1_zero_r2():
    cloud = corpus(seed=2, n_frames=1)[0][0]
    report = ratio_report([(cloud, [])], DES, GAS, CROP, 4096, seed=0)
    for row in report.rows:
        assert row.n_fg == 0
        assert row.r2 == 0.0
        assert row.r1 is None


def test_baseline_row_r1_is_null():
    frames = corpus(seed=3, n_frames=2)
    report = ratio_report(frames, DES, GAS, CROP, 4096, seed=0)
    for region in ("hd", "ld"):
        assert report.row(region, "none").r1 is None
        for op in ("random", "des", "gas"):
            assert report.row(region, op).r1 is not None


def test_report_counts_match_recount_oracle():
    frames = corpus(seed=4, n_frames=2)
    n_p, seed = 4096, 7
    report = ratio_report(frames, DES, GAS, CROP, n_p, seed)

    sums = {(reg, op): [0.0, 0.0] for reg in ("hd", "ld") for op in OPS}
    for i, (cloud, boxes) in enumerate(frames):
        fseed = derive_frame_seed(seed, cloud.frame_id or str(i))
        cropped = crop(cloud, CROP)
        outs = {
            "none": cropped,
            "random": random_fixed_count(cropped, n_p, fseed, BRANCH_PV1),
            "des": random_fixed_count(des_sample(cropped, DES, fseed), n_p, fseed, BRANCH_PV2),
            "gas": random_fixed_count(gas_filter(cropped, GAS), n_p, fseed, BRANCH_PV3),
        }
        for op, out in outs.items():
            ring = partition_rings(out, DES).ring
            fg = points_in_any_box(out.points[:, :3].astype(np.float64), boxes)
            hd = np.isin(ring, [1, 2, 3])
            ld = np.isin(ring, [4, 5, 6, 7, 8])
            sums[("hd", op)][0] += hd.sum()
            sums[("hd", op)][1] += (hd & fg).sum()
            sums[("ld", op)][0] += ld.sum()
            sums[("ld", op)][1] += (ld & fg).sum()

    for reg in ("hd", "ld"):
        for op in OPS:
            row = report.row(reg, op)
            assert row.n_all == pytest.approx(sums[(reg, op)][0] / 2)
            assert row.n_fg == pytest.approx(sums[(reg, op)][1] / 2)
            assert 0.0 <= row.r2 <= 1.0
            if row.r1 is not None:
                assert row.r1 >= 0.0


def test_gas_improves_foreground_share():
    frames = corpus(seed=6, n_frames=4)
    report = ratio_report(frames, DES, GAS, CROP, 8192, seed=1)
    for region in ("hd", "ld"):
        assert report.row(region, "gas").r2 > report.row(region, "none").r2


def test_des_improves_far_foreground_retention_over_random():
    frames = corpus(seed=7, n_frames=4)
    report = ratio_report(frames, DES, GAS, CROP, 8192, seed=1)
    assert report.row("ld", "des").r1 > report.row("ld", "random").r1


def test_empty_report_serializes_to_header_only_csv():
    out = emit_report(RatioReport([], 0), "csv")
    assert out.decode() == "region,op,n_all,n_fg,r1,r2\n"


def test_csv_layout_two_regions_by_four_ops():
    frames = corpus(seed=8, n_frames=1)
    report = ratio_report(frames, DES, GAS, CROP, 4096, seed=0)
    lines = emit_report(report, "csv").decode().strip().split("\n")
    assert lines[0] == "region,op,n_all,n_fg,r1,r2"
    assert len(lines) == 1 + 8  # hd/ld x none/random/des/gas
    assert lines[1].startswith("hd,none,")
    assert lines[1].split(",")[4] == ""  # baseline r1 rendered empty
    # Counts render as integers.
    assert "." not in lines[1].split(",")[2]


def test_json_roundtrip_equality():
    frames = corpus(seed=9, n_frames=2)
    report = ratio_report(frames, DES, GAS, CROP, 4096, seed=3)
    blob = emit_report(report, "json")
    again = parse_report(blob)
    assert again.n_frames == report.n_frames
    assert again.rows == report.rows


def test_json_schema_rejects_malformed():
    import jsonschema

    with pytest.raises(jsonschema.ValidationError):
        parse_report(b'{"schema_version": 1, "rows": []}')


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        emit_report(RatioReport([], 0), "xml")
