"""Line-oriented text format for ground-truth boxes and proposals.

One box per line: ``class cx cy cz l w h yaw score``.  Floats are meters and
radians.  For ground truth the trailing score is conventionally 1.0 and
ignored; for proposal files it carries the raw classification logit.
"""

from dataclasses import dataclass
from pathlib import Path

from .boxes import Box7, Proposal, ProposalSet

# Class tokens are free-form; the common KITTI trio gets stable small ids and
# anything else hashes onto the id space after them.
KNOWN_CLASSES = {"Car": 0, "Pedestrian": 1, "Cyclist": 2}


def class_id_for(token: str) -> int:
    if token in KNOWN_CLASSES:
        return KNOWN_CLASSES[token]
    try:
        return int(token)
    except ValueError:
        return 3 + (hash(token) % 1000)


@dataclass(frozen=True)
class LabeledBox:
    name: str
    box: Box7
    score: float


def parse_label_line(line: str) -> LabeledBox:
    parts = line.split()
    if len(parts) != 9:
        raise ValueError(f"expected 9 fields per label line, got {len(parts)}: {line!r}")
    vals = [float(v) for v in parts[1:]]
    return LabeledBox(parts[0], Box7(*vals[:7]), vals[7])


def read_label_file(path) -> list:
    """All labeled boxes in a file; blank lines are skipped."""
    out = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            out.append(parse_label_line(line))
    return out


def format_label_line(label: LabeledBox) -> str:
    b = label.box
    fields = [label.name] + [repr(float(v)) for v in (b.cx, b.cy, b.cz, b.l, b.w, b.h, b.yaw, label.score)]
    return " ".join(fields)


def write_label_file(labels, path) -> None:
    Path(path).write_text("".join(format_label_line(l) + "\n" for l in labels))


def gt_boxes(labels) -> list:
    return [l.box for l in labels]


def proposals_from_labels(labels) -> ProposalSet:
    """Interpret labeled boxes as proposals whose score column is the raw logit."""
    return ProposalSet.from_proposals(
        [Proposal(l.box, l.score, class_id_for(l.name)) for l in labels]
    )
