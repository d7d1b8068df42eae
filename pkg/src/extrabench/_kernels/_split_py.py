"""Pure-numpy split-scan kernels (reference backend).

Inputs are feature-sorted, C-contiguous float64 arrays.  A split at
position i sends elements [0..i] left and [i+1..n-1] right; it is a
candidate only where consecutive feature values differ.  Both functions
return ``(pos, gain)`` with ``pos = -1`` when no admissible split has a
strictly positive gain.  Ties on gain resolve to the smallest position,
i.e. the smallest threshold.

The arithmetic deliberately mirrors the compiled backend: prefix sums
are accumulated left to right (np.cumsum is a sequential accumulate) and
the gain expression is evaluated in the same operation order, so the two
backends agree bit for bit.
"""

import numpy as np


def best_split_sse(x, y, w, min_samples_leaf):
    """Weighted sum-of-squared-error improvement scan.

    gain(i) = L^2/Wl + R^2/Wr - T^2/W with L, R, T prefix/suffix/total
    sums of w*y and Wl, Wr, W the matching sums of w.  This equals the
    drop in weighted SSE from splitting, so gains are comparable across
    nodes.
    """
    n = x.shape[0]
    if n < 2 * min_samples_leaf or n < 2:
        return -1, 0.0
    wy = np.cumsum(w * y)
    ww = np.cumsum(w)
    total_wy = wy[-1]
    total_w = ww[-1]
    left_wy = wy[:-1]
    left_w = ww[:-1]
    right_wy = total_wy - left_wy
    right_w = total_w - left_w
    parent = (total_wy * total_wy) / total_w
    gain = (left_wy * left_wy) / left_w + (right_wy * right_wy) / right_w - parent

    valid = x[1:] > x[:-1]
    if min_samples_leaf > 1:
        valid[: min_samples_leaf - 1] = False
        valid[n - min_samples_leaf :] = False
    gain[~valid] = -np.inf

    pos = int(np.argmax(gain))
    best = float(gain[pos])
    if not best > 0.0:
        return -1, 0.0
    return pos, best


def best_split_grad_hess(x, g, h, reg_lambda, min_child_weight, min_samples_leaf):
    """Second-order gain scan over per-sample gradient/hessian sums.

    gain(i) = 0.5 * (Gl^2/(Hl+lam) + Gr^2/(Hr+lam) - G^2/(H+lam)),
    with splits forbidden when either side's hessian sum falls below
    min_child_weight.
    """
    n = x.shape[0]
    if n < 2 * min_samples_leaf or n < 2:
        return -1, 0.0
    cg = np.cumsum(g)
    ch = np.cumsum(h)
    total_g = cg[-1]
    total_h = ch[-1]
    left_g = cg[:-1]
    left_h = ch[:-1]
    right_g = total_g - left_g
    right_h = total_h - left_h
    parent = (total_g * total_g) / (total_h + reg_lambda)
    gain = 0.5 * (
        (left_g * left_g) / (left_h + reg_lambda)
        + (right_g * right_g) / (right_h + reg_lambda)
        - parent
    )

    valid = x[1:] > x[:-1]
    valid &= (left_h >= min_child_weight) & (right_h >= min_child_weight)
    if min_samples_leaf > 1:
        valid[: min_samples_leaf - 1] = False
        valid[n - min_samples_leaf :] = False
    gain[~valid] = -np.inf

    pos = int(np.argmax(gain))
    best = float(gain[pos])
    if not best > 0.0:
        return -1, 0.0
    return pos, best
