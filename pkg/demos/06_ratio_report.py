#!/usr/bin/env python3
"""Foreground ratio analysis over a small labeled corpus.

Applies all four sampling operators to every frame, splits counts into the
near high-density rings (1-3) and the far low-density rings (4-8), and
prints the R1/R2 ratio table plus its CSV serialization.
"""

from lidarprep import CropRange, DesConfig, GasConfig
from lidarprep.analysis import emit_report, ratio_report
from lidarprep.synthetic import corpus

frames = corpus(seed=31, n_frames=10)
report = ratio_report(
    frames,
    DesConfig(),
    GasConfig(),
    CropRange(0.0, 70.4, -40.0, 40.0, -3.0, 1.0),
    n_p=16384,
    seed=8,
)

print(f"{'region':8s} {'op':8s} {'n_all':>8s} {'n_fg':>8s} {'R1':>8s} {'R2':>8s}")
for row in report.rows:
    r1 = "-" if row.r1 is None else f"{row.r1 * 100:.1f}%"
    print(f"{row.region:8s} {row.op:8s} {row.n_all:8.0f} {row.n_fg:8.0f} "
          f"{r1:>8s} {row.r2 * 100:7.1f}%")

print("\nsame table as CSV:\n")
print(emit_report(report, "csv").decode())
