"""Benchmark data generation: sample an exponential-growth target on a
deterministic grid and partition it at a domain boundary into an
in-range training set and an out-of-range test set.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from extrabench.errors import DegenerateSplitError, NumericOverflowError
from extrabench.seeding import derive_rng


@dataclass(frozen=True)
class TargetFunction:
    """A named scalar function, evaluated elementwise on sample inputs."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]


def _expgrowth(x):
    return np.exp(x * x + x)


_REGISTRY = {
    "expgrowth": TargetFunction("expgrowth", _expgrowth),
}


def register_function(tf: TargetFunction):
    _REGISTRY[tf.name] = tf


def get_function(name: str) -> TargetFunction:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown target function {name!r}") from None


@dataclass
class SampleSet:
    """Feature matrix (n, d) paired with a target vector (n,)."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        self.xs = np.atleast_2d(np.asarray(self.xs, dtype=np.float64))
        if self.xs.shape[0] == 1 and self.xs.shape[1] > 1:
            # accept a plain 1-d vector of scalar samples
            self.xs = self.xs.T
        self.ys = np.asarray(self.ys, dtype=np.float64)
        if self.xs.shape[0] != self.ys.shape[0]:
            raise ValueError(
                f"xs has {self.xs.shape[0]} rows but ys has {self.ys.shape[0]}"
            )
        if self.xs.shape[0] < 1:
            raise ValueError("SampleSet needs at least one sample")
        if not (np.isfinite(self.xs).all() and np.isfinite(self.ys).all()):
            raise ValueError("SampleSet entries must be finite")

    def __len__(self):
        return self.xs.shape[0]

    @property
    def x1(self):
        """First feature column, the only one in the scalar study."""
        return self.xs[:, 0]


@dataclass(frozen=True)
class SplitSpec:
    """How to sample the domain and where to cut train from test."""

    lo: float = 0.0
    hi: float = 1.0
    boundary: float = 0.7
    n_points: int = 1001
    mode: str = "grid"
    seed: int = 0

    def __post_init__(self):
        if not (self.lo < self.boundary < self.hi):
            raise ValueError("need lo < boundary < hi")
        if self.n_points < 2:
            raise ValueError("need n_points >= 2")
        if self.mode not in ("grid", "uniform-random"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")


@dataclass
class SplitDataset:
    train: SampleSet
    test: SampleSet


def generate_grid(n: int, lo: float, hi: float) -> np.ndarray:
    """Inclusive uniform grid of n points; element i is lo + i*(hi-lo)/(n-1).

    The multiply-before-divide order keeps rational grid points exact,
    e.g. index 700 of a 1001-point unit grid is exactly 0.7.
    """
    if n < 2:
        raise ValueError("need n >= 2 grid points")
    if not lo < hi:
        raise ValueError("need lo < hi")
    return lo + (np.arange(n, dtype=np.float64) * (hi - lo)) / (n - 1)


def evaluate(f: TargetFunction, xs: np.ndarray) -> np.ndarray:
    """Apply f elementwise, rejecting inputs that overflow to non-finite."""
    xs = np.asarray(xs, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        ys = np.asarray(f.fn(xs), dtype=np.float64)
    bad = ~np.isfinite(ys)
    if bad.any():
        x_bad = xs[bad].flat[0]
        raise NumericOverflowError(f"{f.name} is non-finite at x={x_bad!r}")
    return ys


def split(full: SampleSet, boundary: float) -> SplitDataset:
    """Partition rows on the first feature: x < boundary goes to train,
    x >= boundary to test, preserving row order on both sides."""
    mask = full.x1 < boundary
    if not mask.any():
        raise DegenerateSplitError(f"no samples below boundary {boundary}")
    if mask.all():
        raise DegenerateSplitError(f"no samples at or above boundary {boundary}")
    return SplitDataset(
        train=SampleSet(full.xs[mask], full.ys[mask]),
        test=SampleSet(full.xs[~mask], full.ys[~mask]),
    )


def build_dataset(spec: SplitSpec, function: str = "expgrowth") -> SplitDataset:
    """Sample the target per spec and split it at the boundary."""
    f = get_function(function)
    if spec.mode == "grid":
        xs = generate_grid(spec.n_points, spec.lo, spec.hi)
    else:
        rng = derive_rng(spec.seed, 0)
        xs = np.sort(rng.uniform(spec.lo, spec.hi, spec.n_points))
    ys = evaluate(f, xs)
    return split(SampleSet(xs[:, None], ys), spec.boundary)
