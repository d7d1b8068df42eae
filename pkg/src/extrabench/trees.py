"""CART regression trees and the ensembles built on them: bootstrap
forests and gradient boosting in four flavours (first- or second-order
objective, level-wise or leaf-wise growth).

All tree construction funnels through the split-scan kernels in
``extrabench._kernels``.  Determinism rules: candidate thresholds are
midpoints between consecutive distinct sorted feature values; gain ties
resolve to the smallest (feature_index, threshold); routing sends
x < threshold left and x >= threshold right, everywhere.
"""

import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np

from extrabench._kernels import best_split_grad_hess, best_split_sse
from extrabench.seeding import derive_rng


@dataclass
class TreeNode:
    """Internal node (children set) or leaf (value set)."""

    feature_index: int = -1
    threshold: float = float("nan")
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = float("nan")
    n_samples: int = 0

    @property
    def is_leaf(self):
        return self.left is None


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0 or None")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class ForestConfig:
    n_estimators: int = 195
    tree: TreeConfig = field(
        default_factory=lambda: TreeConfig(max_depth=9, min_samples_split=2)
    )
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")


@dataclass(frozen=True)
class GbmConfig:
    n_estimators: int = 100
    learning_rate: float = 0.1
    max_depth: int | None = 3
    min_samples_split: int = 2
    subsample: float = 1.0
    colsample: float = 1.0
    min_child_weight: float = 0.0
    reg_lambda: float = 1.0
    growth: str = "level-wise"
    objective_order: str = "first"
    max_leaves: int = 31
    seed: int = 0

    def __post_init__(self):
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must be in (0, 1]")
        if not 0.0 < self.colsample <= 1.0:
            raise ValueError("colsample must be in (0, 1]")
        if self.min_child_weight < 0.0:
            raise ValueError("min_child_weight must be >= 0")
        if self.reg_lambda < 0.0:
            raise ValueError("reg_lambda must be >= 0")
        if self.growth not in ("level-wise", "leaf-wise"):
            raise ValueError(f"unknown growth mode {self.growth!r}")
        if self.objective_order not in ("first", "second"):
            raise ValueError(f"unknown objective order {self.objective_order!r}")
        if self.max_leaves < 2:
            raise ValueError("max_leaves must be >= 2")


@dataclass
class ForestModel:
    trees: list
    config: ForestConfig


@dataclass
class GbmModel:
    base_prediction: float
    trees: list
    learning_rate: float


def _as_matrix(xs):
    X = np.asarray(xs, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return X


def _midpoint(a, b):
    # Guard against the midpoint rounding down onto the left value,
    # which would silently change the partition under x < t routing.
    t = 0.5 * (a + b)
    if t <= a:
        t = b
    return t


def _sse_splitter(X, y, w, min_samples_leaf):
    """Split finder + leaf valuer for variance-reduction trees."""

    def find(idx, feats):
        best_gain = 0.0
        best = None
        for f in feats:
            col = X[idx, f]
            order = np.argsort(col, kind="stable")
            xs = np.ascontiguousarray(col[order])
            ys = np.ascontiguousarray(y[idx][order])
            ws = np.ascontiguousarray(w[idx][order])
            pos, gain = best_split_sse(xs, ys, ws, min_samples_leaf)
            if pos >= 0 and gain > best_gain:
                best_gain = gain
                best = (int(f), _midpoint(xs[pos], xs[pos + 1]), gain)
        return best

    def leaf_value(idx):
        wi = w[idx]
        return float(np.dot(wi, y[idx]) / wi.sum())

    def is_pure(idx):
        yi = y[idx]
        return yi.max() == yi.min()

    return find, leaf_value, is_pure


def _gh_splitter(X, g, h, reg_lambda, min_child_weight, min_samples_leaf):
    """Split finder + leaf valuer for second-order (gradient/hessian) trees."""

    def find(idx, feats):
        best_gain = 0.0
        best = None
        for f in feats:
            col = X[idx, f]
            order = np.argsort(col, kind="stable")
            xs = np.ascontiguousarray(col[order])
            gs = np.ascontiguousarray(g[idx][order])
            hs = np.ascontiguousarray(h[idx][order])
            pos, gain = best_split_grad_hess(
                xs, gs, hs, reg_lambda, min_child_weight, min_samples_leaf
            )
            if pos >= 0 and gain > best_gain:
                best_gain = gain
                best = (int(f), _midpoint(xs[pos], xs[pos + 1]), gain)
        return best

    def leaf_value(idx):
        return float(-g[idx].sum() / (h[idx].sum() + reg_lambda))

    def is_pure(idx):
        gi = g[idx]
        return gi.max() == gi.min()

    return find, leaf_value, is_pure


def _grow_level_wise(
    X, idx, feats, depth, max_depth, min_samples_split, find, leaf_value, is_pure
):
    n = idx.size
    node = TreeNode(n_samples=int(n))
    splittable = (
        (max_depth is None or depth < max_depth)
        and n >= min_samples_split
        and not is_pure(idx)
    )
    best = find(idx, feats) if splittable else None
    if best is None:
        node.value = leaf_value(idx)
        return node
    f, t, _ = best
    left_mask = X[idx, f] < t
    node.feature_index = f
    node.threshold = float(t)
    node.left = _grow_level_wise(
        X, idx[left_mask], feats, depth + 1, max_depth, min_samples_split,
        find, leaf_value, is_pure,
    )
    node.right = _grow_level_wise(
        X, idx[~left_mask], feats, depth + 1, max_depth, min_samples_split,
        find, leaf_value, is_pure,
    )
    return node


def _grow_leaf_wise(
    X, root_idx, feats, max_depth, min_samples_split, max_leaves,
    find, leaf_value, is_pure,
):
    """Repeatedly split the pending leaf with the largest gain.

    Gains are SSE / regularized-objective improvements, so they are
    comparable across leaves.  Heap ties resolve by insertion order.
    """
    counter = itertools.count()
    root = TreeNode(n_samples=int(root_idx.size))
    heap = []

    def consider(node, idx, depth):
        splittable = (
            (max_depth is None or depth < max_depth)
            and idx.size >= min_samples_split
            and not is_pure(idx)
        )
        best = find(idx, feats) if splittable else None
        if best is None:
            node.value = leaf_value(idx)
        else:
            f, t, gain = best
            heapq.heappush(heap, (-gain, next(counter), node, idx, depth, f, t))

    consider(root, root_idx, 0)
    n_leaves = 1
    while heap and n_leaves < max_leaves:
        _, _, node, idx, depth, f, t = heapq.heappop(heap)
        left_mask = X[idx, f] < t
        node.feature_index = f
        node.threshold = float(t)
        node.left = TreeNode(n_samples=int(left_mask.sum()))
        node.right = TreeNode(n_samples=int(idx.size - left_mask.sum()))
        n_leaves += 1
        consider(node.left, idx[left_mask], depth + 1)
        consider(node.right, idx[~left_mask], depth + 1)
    while heap:
        _, _, node, idx, _, _, _ = heapq.heappop(heap)
        node.value = leaf_value(idx)
    return root


def fit_tree(xs, ys, cfg: TreeConfig, sample_weight=None) -> TreeNode:
    """Greedy CART regression tree maximizing weighted variance reduction."""
    X = _as_matrix(xs)
    y = np.asarray(ys, dtype=np.float64)
    n, d = X.shape
    if y.shape != (n,):
        raise ValueError("ys must be a vector matching xs rows")
    if n < 1:
        raise ValueError("need at least one sample")
    if sample_weight is None:
        w = np.ones(n)
    else:
        w = np.asarray(sample_weight, dtype=np.float64)
        if w.shape != (n,) or (w <= 0).any():
            raise ValueError("sample_weight must be positive, one per row")
    find, leaf_value, is_pure = _sse_splitter(X, y, w, cfg.min_samples_leaf)
    return _grow_level_wise(
        X, np.arange(n), range(d), 0, cfg.max_depth, cfg.min_samples_split,
        find, leaf_value, is_pure,
    )


def predict_tree(root: TreeNode, xs) -> np.ndarray:
    """Route every row to its leaf: x < threshold left, x >= threshold right."""
    X = _as_matrix(xs)
    out = np.empty(X.shape[0])
    stack = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if node.is_leaf:
            out[idx] = node.value
        else:
            left_mask = X[idx, node.feature_index] < node.threshold
            stack.append((node.left, idx[left_mask]))
            stack.append((node.right, idx[~left_mask]))
    return out


def fit_random_forest(xs, ys, cfg: ForestConfig) -> ForestModel:
    """Bootstrap ensemble of CART trees; per-tree RNG derives from
    (seed, tree_index) so trees could be fit in any order."""
    X = _as_matrix(xs)
    y = np.asarray(ys, dtype=np.float64)
    n = X.shape[0]
    trees = []
    for i in range(cfg.n_estimators):
        if cfg.bootstrap:
            idx = derive_rng(cfg.seed, i).integers(0, n, size=n)
            trees.append(fit_tree(X[idx], y[idx], cfg.tree))
        else:
            trees.append(fit_tree(X, y, cfg.tree))
    return ForestModel(trees=trees, config=cfg)


def predict_forest(model: ForestModel, xs) -> np.ndarray:
    X = _as_matrix(xs)
    acc = np.zeros(X.shape[0])
    for tree in model.trees:
        acc += predict_tree(tree, X)
    return acc / len(model.trees)


def fit_gbm(xs, ys, cfg: GbmConfig) -> GbmModel:
    """Gradient boosting over squared error.

    Each round fits a tree to the residuals of the running prediction on
    a per-round subsample (drawn without replacement).  First-order
    trees are plain CART on residuals; second-order trees score splits
    with gradient/hessian sums (g = -residual, h = 1) and value leaves
    as -G/(H+lambda).  Rounds with no admissible split append a
    zero-value stump.
    """
    X = _as_matrix(xs)
    y = np.asarray(ys, dtype=np.float64)
    n, d = X.shape
    base = float(np.mean(y))
    pred = np.full(n, base)
    trees = []
    all_rows = np.arange(n)
    all_feats = np.arange(d)
    for m in range(cfg.n_estimators):
        rng = derive_rng(cfg.seed, m)
        if cfg.subsample < 1.0:
            count = max(1, int(round(cfg.subsample * n)))
            sub = np.sort(rng.choice(n, size=count, replace=False))
        else:
            sub = all_rows
        if cfg.colsample < 1.0 and d > 1:
            fcount = max(1, int(round(cfg.colsample * d)))
            feats = np.sort(rng.choice(d, size=fcount, replace=False))
        else:
            feats = all_feats
        Xs = X[sub]
        residual = y[sub] - pred[sub]
        local = np.arange(sub.size)
        if cfg.objective_order == "second":
            g = -residual
            h = np.ones(sub.size)
            find, leaf_value, is_pure = _gh_splitter(
                Xs, g, h, cfg.reg_lambda, cfg.min_child_weight, 1
            )
        else:
            find, leaf_value, is_pure = _sse_splitter(
                Xs, residual, np.ones(sub.size), 1
            )
        if cfg.growth == "leaf-wise":
            tree = _grow_leaf_wise(
                Xs, local, feats, cfg.max_depth, cfg.min_samples_split,
                cfg.max_leaves, find, leaf_value, is_pure,
            )
        else:
            tree = _grow_level_wise(
                Xs, local, feats, 0, cfg.max_depth, cfg.min_samples_split,
                find, leaf_value, is_pure,
            )
        if tree.is_leaf:
            tree.value = 0.0
        pred += cfg.learning_rate * predict_tree(tree, X)
        trees.append(tree)
    return GbmModel(base_prediction=base, trees=trees, learning_rate=cfg.learning_rate)


def predict_gbm(model: GbmModel, xs) -> np.ndarray:
    X = _as_matrix(xs)
    out = np.full(X.shape[0], model.base_prediction)
    for tree in model.trees:
        out += model.learning_rate * predict_tree(tree, X)
    return out
