"""Fully connected ReLU regression network trained with Adam on MSE.

The architecture is deliberately plain: affine -> relu -> affine ->
relu -> affine with a linear head, 64-bit parameters throughout, and a
validation split carved from the shuffled training set for monitoring
and early stopping.

Training returns late-training parameters rather than a best-validation
checkpoint.  On this benchmark the validation loss reaches its numerical
noise floor within a couple of hundred epochs while out-of-range
behaviour keeps improving long after, so snapping back to the
minimum-validation epoch would systematically return a sharp early
iterate; the shipped patience therefore equals max_epochs, stopping only
engages when validation genuinely stalls for that long, and the returned
weights are an exponential moving average over the final epochs.
"""

from dataclasses import dataclass, field

import numpy as np

from extrabench.dataset import SampleSet
from extrabench.errors import NumericOverflowError
from extrabench.seeding import derive_rng


@dataclass(frozen=True)
class MlpConfig:
    hidden_widths: tuple = (512, 448)
    activation: str = "relu"
    learning_rate: float = 0.01
    batch_size: int = 32
    max_epochs: int = 800
    patience: int = 800
    val_fraction: float = 0.2
    init: str = "glorot-uniform"
    ema_decay: float = 0.98
    seed: int = 0

    def __post_init__(self):
        if not self.hidden_widths or any(wd < 1 for wd in self.hidden_widths):
            raise ValueError("hidden_widths must be positive")
        if self.activation != "relu":
            raise ValueError("only relu is supported")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("batch_size, max_epochs, patience must be >= 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in (0, 1)")
        if self.init not in ("glorot-uniform", "he-normal"):
            raise ValueError(f"unknown init scheme {self.init!r}")
        if not 0.0 <= self.ema_decay < 1.0:
            raise ValueError("ema_decay must be in [0, 1)")


@dataclass
class MlpModel:
    weights: list
    biases: list

    @property
    def layer_sizes(self):
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def copy(self):
        return MlpModel(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


@dataclass
class Gradients:
    weights: list
    biases: list


@dataclass
class AdamState:
    m_weights: list
    m_biases: list
    v_weights: list
    v_biases: list
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_model(cls, model: MlpModel):
        return cls(
            m_weights=[np.zeros_like(w) for w in model.weights],
            m_biases=[np.zeros_like(b) for b in model.biases],
            v_weights=[np.zeros_like(w) for w in model.weights],
            v_biases=[np.zeros_like(b) for b in model.biases],
        )


@dataclass
class TrainTrace:
    train_losses: list = field(default_factory=list)
    val_losses: list = field(default_factory=list)
    best_epoch: int = -1
    stopped_early: bool = False

    @property
    def best_val_loss(self):
        return self.val_losses[self.best_epoch]


def init_mlp(cfg: MlpConfig, d: int) -> MlpModel:
    """Seeded zero-mean weight init, zero biases.

    glorot-uniform draws from +-sqrt(6/(fan_in+fan_out)); he-normal from
    N(0, 2/fan_in).
    """
    rng = derive_rng(cfg.seed, 0x1217)
    sizes = [d, *cfg.hidden_widths, 1]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        if cfg.init == "he-normal":
            W = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out))
        else:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            W = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        weights.append(W)
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=weights, biases=biases)


def _as_column(xs):
    a = np.asarray(xs, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    return a


def forward(model: MlpModel, xs, keep_activations: bool = False):
    """Run the network; optionally return the post-activation cache."""
    a = _as_column(xs)
    acts = [a]
    last = len(model.weights) - 1
    with np.errstate(over="ignore", invalid="ignore"):
        for i, (W, b) in enumerate(zip(model.weights, model.biases)):
            z = a @ W + b
            a = np.maximum(z, 0.0) if i < last else z
            acts.append(a)
    if not np.isfinite(a).all():
        raise NumericOverflowError("non-finite network output")
    if keep_activations:
        return a, acts
    return a


def _loss_and_grads(model: MlpModel, X, y):
    out, acts = forward(model, X, keep_activations=True)
    n = X.shape[0]
    loss = float(np.mean((out - y) ** 2))
    delta = 2.0 * (out - y) / n
    g_w = [None] * len(model.weights)
    g_b = [None] * len(model.biases)
    for i in range(len(model.weights) - 1, -1, -1):
        g_w[i] = acts[i].T @ delta
        g_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (acts[i] > 0)
    return loss, Gradients(weights=g_w, biases=g_b)


def backward(model: MlpModel, xs, ys) -> Gradients:
    """Exact MSE gradients for a batch; the relu subgradient at 0 is 0."""
    X = _as_column(xs)
    y = _as_column(ys)
    if X.shape[0] == 0:
        raise ValueError("empty batch")
    return _loss_and_grads(model, X, y)[1]


def adam_step(state: AdamState, model: MlpModel, grads: Gradients, learning_rate: float):
    """One in-place Adam update with bias correction."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    for W, mW, vW, gW in zip(model.weights, state.m_weights, state.v_weights, grads.weights):
        mW *= b1
        mW += (1.0 - b1) * gW
        vW *= b2
        vW += (1.0 - b2) * gW**2
        W -= learning_rate * (mW / c1) / (np.sqrt(vW / c2) + state.eps)
    for b, mb, vb, gb in zip(model.biases, state.m_biases, state.v_biases, grads.biases):
        mb *= b1
        mb += (1.0 - b1) * gb
        vb *= b2
        vb += (1.0 - b2) * gb**2
        b -= learning_rate * (mb / c1) / (np.sqrt(vb / c2) + state.eps)
    return model, state


def mse_loss(model: MlpModel, xs, ys) -> float:
    out = forward(model, xs)
    return float(np.mean((out - _as_column(ys)) ** 2))


def train_mlp(train: SampleSet, cfg: MlpConfig):
    """Train on a shuffled split of the given samples.

    The last ceil(val_fraction * n) of one seeded shuffle form the
    validation set; minibatch epochs run over the remainder with a fresh
    per-epoch order derived from (seed, epoch).  Stops at max_epochs or
    once validation has not improved for `patience` epochs.

    The returned parameters are a bias-corrected exponential moving
    average of the end-of-epoch weights (plain final weights when
    ema_decay is 0).  Constant-rate Adam keeps bouncing around the loss
    basin on this benchmark, and the averaged iterate is a markedly more
    stable representative of the late-training model than any single
    epoch's weights.
    """
    X = train.xs
    y = train.ys[:, None]
    n = X.shape[0]
    n_val = int(np.ceil(cfg.val_fraction * n))
    if n_val < 1 or n - n_val < 1:
        raise ValueError("validation split leaves an empty partition")
    perm = derive_rng(cfg.seed, 0x5811).permutation(n)
    fit_idx, val_idx = perm[:-n_val], perm[-n_val:]
    X_fit, y_fit = X[fit_idx], y[fit_idx]
    X_val, y_val = X[val_idx], y[val_idx]

    model = init_mlp(cfg, X.shape[1])
    state = AdamState.for_model(model)
    trace = TrainTrace()
    best_val = np.inf
    n_fit = X_fit.shape[0]
    decay = cfg.ema_decay
    ema_w = [np.zeros_like(w) for w in model.weights]
    ema_b = [np.zeros_like(b) for b in model.biases]
    ema_steps = 0

    for epoch in range(cfg.max_epochs):
        order = derive_rng(cfg.seed, 1, epoch).permutation(n_fit)
        batch_losses = []
        for start in range(0, n_fit, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, grads = _loss_and_grads(model, X_fit[idx], y_fit[idx])
            batch_losses.append(loss)
            adam_step(state, model, grads, cfg.learning_rate)
        if decay > 0.0:
            ema_steps += 1
            for ew, w in zip(ema_w, model.weights):
                ew *= decay
                ew += (1 - decay) * w
            for eb, b in zip(ema_b, model.biases):
                eb *= decay
                eb += (1 - decay) * b
        trace.train_losses.append(float(np.mean(batch_losses)))
        val_loss = mse_loss(model, X_val, y_val)
        trace.val_losses.append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            trace.best_epoch = epoch
        elif epoch - trace.best_epoch >= cfg.patience:
            trace.stopped_early = True
            break
    if decay > 0.0:
        correction = 1.0 - decay**ema_steps
        model = MlpModel(
            weights=[w / correction for w in ema_w],
            biases=[b / correction for b in ema_b],
        )
    return model, trace
