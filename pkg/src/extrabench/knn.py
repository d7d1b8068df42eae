"""Distance-weighted k-nearest-neighbor regression.

Three interchangeable search modes (brute-force linear scan, a sorted
array for scalar inputs, and a ball tree) feed one shared selection and
aggregation step, so predictions are identical across modes.  Neighbor
ties at the k-th distance resolve to the lower training-row index.
"""

import bisect
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KnnConfig:
    k: int = 2
    weighting: str = "inverse-distance"
    search: str = "ball-tree"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.weighting not in ("uniform", "inverse-distance"):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.search not in ("linear", "sorted-1d", "ball-tree"):
            raise ValueError(f"unknown search mode {self.search!r}")


_BALL_LEAF_SIZE = 16


@dataclass
class _BallNode:
    center: np.ndarray
    radius: float
    start: int
    end: int
    left: "_BallNode | None" = None
    right: "_BallNode | None" = None


@dataclass
class KnnModel:
    xs: np.ndarray
    ys: np.ndarray
    config: KnnConfig
    _sorted_order: np.ndarray | None = None
    _ball_root: _BallNode | None = None
    _ball_index: np.ndarray | None = None


def _build_ball_tree(X, index, start, end):
    pts = X[index[start:end]]
    center = pts.mean(axis=0)
    dists = np.sqrt(((pts - center) ** 2).sum(axis=1))
    node = _BallNode(center=center, radius=float(dists.max()), start=start, end=end)
    n = end - start
    if n <= _BALL_LEAF_SIZE:
        return node
    spread = pts.max(axis=0) - pts.min(axis=0)
    dim = int(np.argmax(spread))
    mid = n // 2
    # partition around the median of the split dimension; ties keep the
    # ordering stable so the build is deterministic
    order = np.argsort(X[index[start:end], dim], kind="stable")
    index[start:end] = index[start:end][order]
    node.left = _build_ball_tree(X, index, start, start + mid)
    node.right = _build_ball_tree(X, index, start + mid, end)
    return node


def fit_knn(xs, ys, cfg: KnnConfig) -> KnnModel:
    X = np.asarray(xs, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(ys, dtype=np.float64)
    n, d = X.shape
    if y.shape != (n,):
        raise ValueError("ys must be a vector matching xs rows")
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds the {n} stored samples")
    model = KnnModel(xs=X.copy(), ys=y.copy(), config=cfg)
    if cfg.search == "sorted-1d":
        if d != 1:
            raise ValueError("sorted-1d search requires scalar inputs")
        model._sorted_order = np.argsort(X[:, 0], kind="stable")
    elif cfg.search == "ball-tree":
        index = np.arange(n)
        model._ball_root = _build_ball_tree(X, index, 0, n)
        model._ball_index = index
    return model


def _point_dist(X, i, q):
    diff = X[i] - q
    return float(np.sqrt(np.dot(diff, diff)))


def _select_k(candidates, k):
    """Keep the k best (distance, index) pairs; ties prefer lower index."""
    candidates.sort()
    return candidates[:k]


def _linear_candidates(model, q):
    diff = model.xs - q
    dists = np.sqrt((diff * diff).sum(axis=1))
    return list(zip(dists.tolist(), range(len(dists))))


def _sorted_candidates(model, q, k):
    order = model._sorted_order
    col = model.xs[order, 0]
    n = len(order)
    pos = int(np.searchsorted(col, q[0]))
    lo, hi = pos - 1, pos
    picked = []
    for _ in range(k):
        if hi >= n or (lo >= 0 and q[0] - col[lo] <= col[hi] - q[0]):
            picked.append(lo)
            lo -= 1
        else:
            picked.append(hi)
            hi += 1
    # distances below use the same formula as every other search mode;
    # pull in every point tied with the current k-th distance so the
    # shared index tie rule decides, not scan direction
    cands = [(_point_dist(model.xs, int(order[i]), q), int(order[i])) for i in picked]
    kth = max(d for d, _ in cands)
    while lo >= 0:
        d = _point_dist(model.xs, int(order[lo]), q)
        if d > kth:
            break
        cands.append((d, int(order[lo])))
        lo -= 1
    while hi < n:
        d = _point_dist(model.xs, int(order[hi]), q)
        if d > kth:
            break
        cands.append((d, int(order[hi])))
        hi += 1
    return cands


def _ball_candidates(model, q, k):
    X = model.xs
    index = model._ball_index
    best = []  # sorted list of (dist, idx), length <= k

    def visit(node):
        d_center = float(np.sqrt(((q - node.center) ** 2).sum()))
        if len(best) == k:
            # conservative slack keeps exact-tie candidates reachable
            # despite rounding in the triangle-inequality bound
            bound = best[-1][0] + 1e-9 * (best[-1][0] + 1.0)
            if d_center - node.radius > bound:
                return
        if node.left is None:
            for i in index[node.start : node.end]:
                i = int(i)
                entry = (_point_dist(X, i, q), i)
                if len(best) < k:
                    bisect.insort(best, entry)
                elif entry < best[-1]:
                    bisect.insort(best, entry)
                    best.pop()
            return
        # descend into the closer child first to tighten the bound early
        dl = float(np.sqrt(((q - node.left.center) ** 2).sum()))
        dr = float(np.sqrt(((q - node.right.center) ** 2).sum()))
        first, second = (node.left, node.right) if dl <= dr else (node.right, node.left)
        visit(first)
        visit(second)

    visit(model._ball_root)
    return best


def _aggregate(model, neighbors):
    dists = np.array([d for d, _ in neighbors])
    vals = model.ys[[i for _, i in neighbors]]
    if model.config.weighting == "uniform":
        return float(vals.mean())
    zero = dists == 0.0
    if zero.any():
        return float(vals[zero].mean())
    inv = 1.0 / dists
    return float(np.dot(inv, vals) / inv.sum())


def predict_knn(model: KnnModel, xs) -> np.ndarray:
    """Predict each query from its k nearest stored points.

    Inverse-distance weighting returns (sum y_i/d_i) / (sum 1/d_i); a
    query coinciding with stored points returns the mean of exactly
    those points' targets.
    """
    X = np.asarray(xs, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    k = model.config.k
    mode = model.config.search
    out = np.empty(X.shape[0])
    for row, q in enumerate(X):
        if mode == "linear":
            cands = _linear_candidates(model, q)
        elif mode == "sorted-1d":
            cands = _sorted_candidates(model, q, k)
        else:
            cands = _ball_candidates(model, q, k)
        out[row] = _aggregate(model, _select_k(cands, k))
    return out
