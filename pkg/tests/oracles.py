"""Independent reference implementations used to cross-check the package.

Everything here deliberately avoids the library's own code paths:
geometry is counted on a unit grid, matching is found by exhaustive
assignment enumeration, average precision is re-derived from scratch at
every confidence cut, and convolutions/resampling are straight scalar
loops. Slow is fine; independent is the point.
"""

from __future__ import annotations

import itertools
import math


def iou_rasterized(a, b) -> float:
    """IoU by counting unit-grid cells; exact for integer-coordinate boxes."""
    ax0, ay0, ax1, ay1 = (int(v) for v in a)
    bx0, by0, bx1, by1 = (int(v) for v in b)
    inter = 0
    union = 0
    x_lo, x_hi = min(ax0, bx0), max(ax1, bx1)
    y_lo, y_hi = min(ay0, by0), max(ay1, by1)
    for y in range(y_lo, y_hi):
        for x in range(x_lo, x_hi):
            in_a = ax0 <= x < ax1 and ay0 <= y < ay1
            in_b = bx0 <= x < bx1 and by0 <= y < by1
            inter += in_a and in_b
            union += in_a or in_b
    if union == 0:
        return 0.0
    return inter / union


def iou_plain(a, b) -> float:
    """Scalar corner-form IoU, written independently of the library."""
    ox = min(a[2], b[2]) - max(a[0], b[0])
    oy = min(a[3], b[3]) - max(a[1], b[1])
    if ox <= 0 or oy <= 0:
        return 0.0
    inter = ox * oy
    area_a = (a[2] - a[0]) * (a[3] - a[1])
    area_b = (b[2] - b[0]) * (b[3] - b[1])
    denom = area_a + area_b - inter
    if denom <= 0:
        return 0.0
    return inter / denom


def match_exhaustive(det_boxes, confidences, gt_boxes, threshold):
    """Greedy-equivalent matching found by full assignment enumeration.

    Detections are considered in descending confidence (ties by index).
    Over every feasible one-to-one assignment (each detection matched to a
    distinct ground truth with IoU >= threshold, or left unmatched), the
    greedy outcome is the lexicographic maximum of the per-detection keys
    (iou, -gt_index) in that processing order. Returns a list of matched
    gt indices (or None) aligned with the input detection order.
    """
    n_det = len(det_boxes)
    order = sorted(range(n_det), key=lambda i: (-confidences[i], i))
    options = []
    for i in order:
        feasible = [
            j for j in range(len(gt_boxes))
            if iou_plain(det_boxes[i], gt_boxes[j]) >= threshold
        ]
        options.append([None] + feasible)
    best_key = None
    best_assignment = None
    for combo in itertools.product(*options):
        chosen = [j for j in combo if j is not None]
        if len(set(chosen)) != len(chosen):
            continue
        key = tuple(
            (iou_plain(det_boxes[i], gt_boxes[j]), -j) if j is not None else (-1.0, 0)
            for i, j in zip(order, combo)
        )
        if best_key is None or key > best_key:
            best_key = key
            best_assignment = combo
    result = [None] * n_det
    for i, j in zip(order, best_assignment):
        result[i] = j
    return result


def ap_threshold_sweep(det_boxes, confidences, gt_boxes, iou_threshold) -> float:
    """Average precision re-derived at every distinct confidence cut.

    Each cut keeps the detections at or above that confidence, re-matches
    them from scratch with :func:`match_exhaustive`, recomputes precision
    and recall, and accumulates (R_k - R_{k-1}) * P_k over cuts in
    descending confidence order. Assumes distinct confidences.
    """
    if not det_boxes:
        return 0.0
    cuts = sorted(set(confidences), reverse=True)
    ap = 0.0
    prev_recall = 0.0
    for cut in cuts:
        kept = [i for i, c in enumerate(confidences) if c >= cut]
        boxes = [det_boxes[i] for i in kept]
        confs = [confidences[i] for i in kept]
        assignment = match_exhaustive(boxes, confs, gt_boxes, iou_threshold)
        tp = sum(1 for j in assignment if j is not None)
        precision_k = tp / len(kept)
        recall_k = tp / len(gt_boxes) if gt_boxes else 0.0
        ap += (recall_k - prev_recall) * precision_k
        prev_recall = recall_k
    return ap


def conv2d_loops(x, weights, bias):
    """Direct same-padding cross-correlation with explicit scalar loops."""
    n_batch = len(x)
    n_in = len(x[0])
    height = len(x[0][0])
    width = len(x[0][0][0])
    n_out = len(weights)
    kh = len(weights[0][0])
    kw = len(weights[0][0][0])
    out = [
        [[[0.0] * width for _ in range(height)] for _ in range(n_out)]
        for _ in range(n_batch)
    ]
    for b in range(n_batch):
        for o in range(n_out):
            for y in range(height):
                for xx in range(width):
                    acc = float(bias[o])
                    for c in range(n_in):
                        for ky in range(kh):
                            for kx in range(kw):
                                sy = y + ky - kh // 2
                                sx = xx + kx - kw // 2
                                if 0 <= sy < height and 0 <= sx < width:
                                    acc += float(x[b][c][sy][sx]) * float(weights[o][c][ky][kx])
                    out[b][o][y][xx] = acc
    return out


def _cubic_weight(t: float) -> float:
    # Catmull-Rom written in its a = -0.5 polynomial form
    t = abs(t)
    if t <= 1.0:
        return 1.5 * t**3 - 2.5 * t**2 + 1.0
    if t < 2.0:
        return -0.5 * t**3 + 2.5 * t**2 - 4.0 * t + 2.0
    return 0.0


def resize_direct(plane, out_w: int, out_h: int, method: str):
    """Per-pixel resampling with scalar loops and clamped taps."""
    in_h = len(plane)
    in_w = len(plane[0])
    out = [[0.0] * out_w for _ in range(out_h)]
    for y in range(out_h):
        sy = (y + 0.5) * (in_h / out_h) - 0.5
        for x in range(out_w):
            sx = (x + 0.5) * (in_w / out_w) - 0.5
            if method == "nearest":
                iy = min(max(int(math.floor(sy + 0.5)), 0), in_h - 1)
                ix = min(max(int(math.floor(sx + 0.5)), 0), in_w - 1)
                out[y][x] = float(plane[iy][ix])
                continue
            by = math.floor(sy)
            bx = math.floor(sx)
            if method == "bilinear":
                offsets = (0, 1)
                wy = (1.0 - (sy - by), sy - by)
                wx = (1.0 - (sx - bx), sx - bx)
            else:
                offsets = (-1, 0, 1, 2)
                wy = tuple(_cubic_weight(sy - (by + o)) for o in offsets)
                wx = tuple(_cubic_weight(sx - (bx + o)) for o in offsets)
            acc = 0.0
            for j, oy in enumerate(offsets):
                ty = min(max(int(by + oy), 0), in_h - 1)
                for i, ox in enumerate(offsets):
                    tx = min(max(int(bx + ox), 0), in_w - 1)
                    acc += wy[j] * wx[i] * float(plane[ty][tx])
            out[y][x] = acc
    return out


def quantize_half_away(value: float) -> int:
    """Clamp to [0, 255] and round half away from zero."""
    v = min(max(value, 0.0), 255.0)
    return int(math.floor(v + 0.5))
