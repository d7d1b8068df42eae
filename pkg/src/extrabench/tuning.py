"""Hyperparameter search: randomized sampling over declared spaces,
k-fold cross validation, successive halving, and Hyperband.

Tuners treat the evaluator as a black box scored lower-is-better.  An
evaluator exception marks that candidate +inf rather than aborting the
search.  Ties everywhere resolve to the earliest draw index.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from extrabench.seeding import derive_rng


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("need lo <= hi")

    def sample(self, rng):
        return int(rng.integers(self.lo, self.hi + 1))


@dataclass(frozen=True)
class RealRange:
    lo: float
    hi: float
    log: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("need lo <= hi")
        if self.log and self.lo <= 0:
            raise ValueError("log scale needs positive bounds")

    def sample(self, rng):
        if self.log:
            return float(np.exp(rng.uniform(np.log(self.lo), np.log(self.hi))))
        return float(rng.uniform(self.lo, self.hi))


@dataclass(frozen=True)
class Categorical:
    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ValueError("categorical values must be nonempty")

    def sample(self, rng):
        return self.values[int(rng.integers(len(self.values)))]


@dataclass(frozen=True)
class ParamSpace:
    """Named sampling dimensions; draw order follows declaration order."""

    dimensions: dict


@dataclass(frozen=True)
class CandidateConfig:
    values: dict
    seed: int
    draw_index: int


@dataclass(frozen=True)
class HalvingSpec:
    n_initial: int
    min_resource: float
    max_resource: float
    eta: int = 3
    resource: str = "training-fraction"
    cv_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.n_initial < 1:
            raise ValueError("n_initial must be >= 1")
        if self.eta < 2:
            raise ValueError("eta must be >= 2")
        if self.min_resource > self.max_resource:
            raise ValueError("need min_resource <= max_resource")
        if self.resource not in ("training-fraction", "boosting-rounds"):
            raise ValueError(f"unknown resource kind {self.resource!r}")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")


@dataclass(frozen=True)
class HyperbandSpec:
    max_resource: int
    eta: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.eta < 2:
            raise ValueError("eta must be >= 2")
        if self.max_resource < self.eta:
            raise ValueError("max_resource must be >= eta")


@dataclass
class HistoryEntry:
    candidate: CandidateConfig
    resource: float
    score: float


@dataclass
class TuneResult:
    best: CandidateConfig
    best_score: float
    history: list = field(default_factory=list)


def _sample_values(space: ParamSpace, rng):
    return {name: dim.sample(rng) for name, dim in space.dimensions.items()}


def sample_configs(space: ParamSpace, n: int, seed: int):
    """n independent draws; log-scaled reals are uniform in the exponent."""
    if n < 1:
        raise ValueError("need n >= 1 draws")
    rng = derive_rng(seed, 0xD0)
    return [
        CandidateConfig(values=_sample_values(space, rng), seed=seed, draw_index=i)
        for i in range(n)
    ]


def kfold_split(n: int, k: int, seed: int):
    """Seeded shuffle then contiguous chunks; sizes differ by at most one."""
    if k < 1:
        raise ValueError("need k >= 1")
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} samples")
    perm = derive_rng(seed, 0xF0).permutation(n)
    base, extra = divmod(n, k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(perm[start : start + size])
        start += size
    return folds


def _score_candidates(candidates, resource, evaluate, history):
    scored = []
    for cand in candidates:
        try:
            score = float(evaluate(cand, resource))
        except Exception:
            score = float("inf")
        history.append(HistoryEntry(candidate=cand, resource=resource, score=score))
        scored.append((score, cand.draw_index, cand))
    scored.sort(key=lambda t: (t[0], t[1]))
    return scored


def _next_resource(resource, eta, max_resource):
    nxt = resource * eta
    if nxt >= max_resource * (1.0 - 1e-12):
        return max_resource
    return nxt


def _halving_rounds(candidates, resource, eta, max_resource, evaluate, history):
    """Shared inner loop: evaluate, keep the top ceil(n/eta), raise the
    resource by eta, until one candidate remains or the cap is reached.
    Returns the final round's scored list."""
    while True:
        scored = _score_candidates(candidates, resource, evaluate, history)
        if len(candidates) == 1 or resource >= max_resource:
            return scored, resource
        keep = math.ceil(len(candidates) / eta)
        candidates = [cand for _, _, cand in scored[:keep]]
        resource = _next_resource(resource, eta, max_resource)


def successive_halving(evaluate, space: ParamSpace, spec: HalvingSpec) -> TuneResult:
    candidates = sample_configs(space, spec.n_initial, spec.seed)
    history = []
    scored, _ = _halving_rounds(
        candidates, spec.min_resource, spec.eta, spec.max_resource, evaluate, history
    )
    best_score, _, best = scored[0]
    return TuneResult(best=best, best_score=best_score, history=history)


def hyperband_brackets(max_resource: int, eta: int):
    """The (n_initial, initial_resource) table, widest bracket first."""
    s_max = 0
    power = 1
    while power * eta <= max_resource:
        power *= eta
        s_max += 1
    out = []
    for s in range(s_max, -1, -1):
        n = math.ceil((s_max + 1) / (s + 1) * eta**s)
        r = max_resource / eta**s
        out.append((n, r))
    return out


def hyperband(evaluate, space: ParamSpace, spec: HyperbandSpec) -> TuneResult:
    """Run one successive-halving tournament per bracket, trading off
    many-cheap against few-expensive, and return the best evaluation
    made at the full resource."""
    rng = derive_rng(spec.seed, 0xB0)
    history = []
    best = None
    best_score = float("inf")
    draw_index = 0
    for n, r in hyperband_brackets(spec.max_resource, spec.eta):
        candidates = []
        for _ in range(n):
            candidates.append(
                CandidateConfig(
                    values=_sample_values(space, rng),
                    seed=spec.seed,
                    draw_index=draw_index,
                )
            )
            draw_index += 1
        scored, final_resource = _halving_rounds(
            candidates, r, spec.eta, spec.max_resource, evaluate, history
        )
        if final_resource >= spec.max_resource:
            score, _, cand = scored[0]
            if score < best_score:
                best_score = score
                best = cand
    return TuneResult(best=best, best_score=best_score, history=history)


# Shipped per-model search spaces.  The boosted-tree spaces omit
# n_estimators on purpose: boosting rounds are the halving resource for
# those families, so the tuner sets the round count, not the sampler.
SEARCH_SPACES = {
    "xgboost": ParamSpace(
        {
            "max_depth": IntRange(2, 9),
            "learning_rate": RealRange(0.01, 0.3, log=True),
            "subsample": RealRange(0.5, 1.0),
            "colsample": RealRange(0.5, 1.0),
            "min_child_weight": RealRange(1e-3, 1.0, log=True),
        }
    ),
    "lightgbm": ParamSpace(
        {
            "max_depth": IntRange(2, 9),
            "learning_rate": RealRange(0.01, 0.3, log=True),
            "subsample": RealRange(0.5, 1.0),
            "colsample": RealRange(0.5, 1.0),
            "min_child_weight": RealRange(1e-3, 1.0, log=True),
            "max_leaves": IntRange(8, 64),
        }
    ),
    "gradient_boosting": ParamSpace(
        {
            "max_depth": IntRange(2, 6),
            "learning_rate": RealRange(0.01, 0.3, log=True),
            "min_samples_split": IntRange(2, 16),
        }
    ),
    "random_forest": ParamSpace(
        {
            "n_estimators": IntRange(50, 300),
            "max_depth": IntRange(3, 12),
            "min_samples_split": IntRange(2, 16),
            "min_samples_leaf": IntRange(1, 8),
        }
    ),
    "knn": ParamSpace(
        {
            "k": IntRange(1, 10),
            "weighting": Categorical(("uniform", "inverse-distance")),
        }
    ),
    "linear": ParamSpace({}),
    "ridge": ParamSpace({"alpha": RealRange(1e-4, 10.0, log=True)}),
    "huber": ParamSpace(
        {
            "epsilon": RealRange(1.05, 2.0),
            "alpha": RealRange(1e-4, 10.0, log=True),
        }
    ),
    "bayesian_ridge": ParamSpace(
        {
            "alpha_1": RealRange(1e-8, 1e-3, log=True),
            "alpha_2": RealRange(1e-8, 1e-3, log=True),
            "lambda_1": RealRange(1e-8, 1e-3, log=True),
            "lambda_2": RealRange(1e-8, 1e-3, log=True),
        }
    ),
    "dnn": ParamSpace(
        {
            "hidden1": IntRange(64, 512),
            "hidden2": IntRange(64, 512),
            "learning_rate": RealRange(1e-3, 0.03, log=True),
        }
    ),
}
