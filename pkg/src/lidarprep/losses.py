"""Multi-view consistency losses and the overall loss composition.

The box term compares each non-reference view's boxes against view 1 with a
Smooth-L1 over the absolute per-component differences, averaged over the 7
box components and the foreground count.  The score term applies a focal
weighting to the absolute difference of sigmoid scores, treating that
difference as a probability of inconsistency with target zero:

    FL(d) = alpha * d**gamma * (-log(1 - min(d, 1 - EPS)))

Both losses sum the two non-reference views per entry; the view-count
normalization happens once in the overall consistency weight 1/(N_mv - 1).
Scalar reductions are sequential left-to-right in float64 so results are
reproducible.  Derivatives of both scalar kernels are exposed for callers
that need them.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateViews

SMOOTH_L1_BETA = 1.0
FOCAL_ALPHA = 0.25
FOCAL_GAMMA = 2.0
FOCAL_EPS = 1e-6


def smooth_l1(delta, beta: float = SMOOTH_L1_BETA):
    """Smooth-L1 of a nonnegative difference: quadratic below beta, linear above."""
    d = np.asarray(delta, dtype=np.float64)
    return np.where(d < beta, 0.5 * d * d / beta, d - 0.5 * beta)


def smooth_l1_grad(delta, beta: float = SMOOTH_L1_BETA):
    d = np.asarray(delta, dtype=np.float64)
    return np.where(d < beta, d / beta, 1.0)


def focal(delta, alpha: float = FOCAL_ALPHA, gamma: float = FOCAL_GAMMA):
    """Focal weighting of a score difference in [0, 1); clamped near 1."""
    d = np.asarray(delta, dtype=np.float64)
    dc = np.minimum(d, 1.0 - FOCAL_EPS)
    return alpha * np.power(d, gamma) * (-np.log(1.0 - dc))


def focal_grad(delta, alpha: float = FOCAL_ALPHA, gamma: float = FOCAL_GAMMA):
    d = np.asarray(delta, dtype=np.float64)
    dc = np.minimum(d, 1.0 - FOCAL_EPS)
    term = alpha * gamma * np.power(d, gamma - 1.0) * (-np.log(1.0 - dc))
    inner = np.where(d < 1.0 - FOCAL_EPS, alpha * np.power(d, gamma) / (1.0 - dc), 0.0)
    return term + inner


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    return 1.0 / (1.0 + np.exp(-x))


def _cf_boxes(cf):
    try:
        sets = (cf.view1, cf.view2, cf.view3)
    except AttributeError:
        sets = tuple(cf)
    n = len(sets[0])
    if any(len(s) != n for s in sets):
        raise ValueError("CF lists must be aligned with equal length")
    return sets, n


def consistency_box_loss(cf, beta: float = SMOOTH_L1_BETA) -> float:
    """Mean Smooth-L1 disagreement of views 2 and 3 against view 1."""
    (v1, v2, v3), n_fg = _cf_boxes(cf)
    if n_fg == 0:
        return 0.0
    b1 = v1.boxes.astype(np.float64)
    per = smooth_l1(np.abs(v2.boxes.astype(np.float64) - b1), beta) + smooth_l1(
        np.abs(v3.boxes.astype(np.float64) - b1), beta
    )
    per_entry = np.zeros(n_fg)
    for comp in range(7):  # fixed-order accumulation, see module docstring
        per_entry += per[:, comp]
    per_entry /= 7.0
    return sum(per_entry.tolist()) / n_fg


def consistency_cls_loss(cf, alpha: float = FOCAL_ALPHA, gamma: float = FOCAL_GAMMA) -> float:
    """Mean focal disagreement of sigmoid scores against view 1."""
    (v1, v2, v3), n_fg = _cf_boxes(cf)
    if n_fg == 0:
        return 0.0
    s1 = sigmoid(v1.logits)
    per_entry = focal(np.abs(sigmoid(v2.logits) - s1), alpha, gamma) + focal(
        np.abs(sigmoid(v3.logits) - s1), alpha, gamma
    )
    return sum(per_entry.tolist()) / n_fg


def consistency_total(l_cls_c: float, l_box_c: float, n_mv: int):
    """Inverse-proportion view weight and the combined consistency loss."""
    if n_mv < 2:
        raise DegenerateViews("consistency weighting needs at least two views")
    gamma = 1.0 / (n_mv - 1)
    return gamma, gamma * (l_cls_c + l_box_c)


def total_loss(
    l_cons: float,
    l_cls: float,
    l_box: float,
    l_dir: float,
    l_rcnn: float,
    lambdas,
    n_mv: int,
) -> float:
    """Overall objective: consistency + view-averaged stage-1 terms + stage-2 term.

    The stage-1 detection losses arrive as externally computed scalars; their
    weights are the backbone-specific lambdas and the view average uses
    1/n_mv.  The consistency and stage-2 weights are fixed at one.
    """
    if n_mv < 1:
        raise DegenerateViews("total loss needs at least one view")
    l1, l2, l3 = (float(v) for v in lambdas)
    stage1 = l1 * l_cls + l2 * l_box + l3 * l_dir
    return l_cons + (1.0 / n_mv) * stage1 + l_rcnn


# Backbone-specific stage-1 loss weights (l_cls, l_box, l_dir).
LAMBDA_PRESETS = {
    "pointrcnn": (1.0, 1.0, 0.0),
    "pvrcnn": (1.0, 2.0, 0.2),
    "pvrcnn++": (1.0, 2.0, 0.0),
}


@dataclass
class LossBreakdown:
    """Per-frame consistency loss record, plus the composed total."""

    n_fg: int
    l_box_c: float
    l_cls_c: float
    gamma_mv_c: float
    l_cons: float
    n_mv: int
    lambdas: tuple
    stage1: dict
    total: float

    @staticmethod
    def compute(cf, n_mv: int, lambdas, l_cls=0.0, l_box=0.0, l_dir=0.0, l_rcnn=0.0):
        _, n_fg = _cf_boxes(cf)
        l_box_c = consistency_box_loss(cf)
        l_cls_c = consistency_cls_loss(cf)
        gamma, l_cons = consistency_total(l_cls_c, l_box_c, n_mv)
        lam = tuple(float(v) for v in lambdas)
        return LossBreakdown(
            n_fg=n_fg,
            l_box_c=l_box_c,
            l_cls_c=l_cls_c,
            gamma_mv_c=gamma,
            l_cons=l_cons,
            n_mv=n_mv,
            lambdas=lam,
            stage1={"l_cls": l_cls, "l_box": l_box, "l_dir": l_dir, "l_rcnn": l_rcnn},
            total=total_loss(l_cons, l_cls, l_box, l_dir, l_rcnn, lam, n_mv),
        )

    def to_record(self) -> dict:
        return {
            "n_fg": self.n_fg,
            "l_box_c": self.l_box_c,
            "l_cls_c": self.l_cls_c,
            "gamma_mv_c": self.gamma_mv_c,
            "l_cons": self.l_cons,
            "n_mv": self.n_mv,
            "lambdas": list(self.lambdas),
            "stage1": dict(self.stage1),
            "total": self.total,
        }
