"""End-to-end study orchestration.

Builds the dataset, trains every model in the roster (either at shipped
appendix defaults or with its tuner), evaluates the three error norms on
both partitions, and emits the artifacts: a gap table (text + CSV),
prediction curves over a dense window (CSV), and one SVG figure per
model group.

No model sees test targets before its final evaluation: tuning and
fitting consume the train partition only.
"""

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from extrabench import knn as knn_mod
from extrabench import linear, neural, trees
from extrabench.dataset import SampleSet, SplitSpec, build_dataset, evaluate as eval_fn
from extrabench.dataset import generate_grid, get_function
from extrabench.metrics import MetricsRow, gap_row
from extrabench.seeding import derive_rng, derive_seed
from extrabench.tuning import (
    SEARCH_SPACES,
    HalvingSpec,
    HyperbandSpec,
    hyperband,
    kfold_split,
    successive_halving,
)

PLOT_WINDOW = (0.4, 1.0)
PLOT_POINTS = 601


# ---------------------------------------------------------------------------
# Model registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelEntry:
    key: str
    display: str
    group: str  # "dnn" | "tree" | "linear"
    defaults: dict
    fit: callable
    predict: callable
    resource: str  # "epochs" | "boosting-rounds" | "training-fraction"


def _fit_linear(X, y, params, seed):
    return linear.fit_ols(X, y)


def _fit_ridge(X, y, params, seed):
    return linear.fit_ridge(X, y, linear.RidgeConfig(alpha=params["alpha"]))


def _fit_bayesian_ridge(X, y, params, seed):
    cfg = linear.BayesRidgeConfig(
        max_iter=params["max_iter"],
        alpha_1=params["alpha_1"],
        alpha_2=params["alpha_2"],
        lambda_1=params["lambda_1"],
        lambda_2=params["lambda_2"],
    )
    return linear.fit_bayesian_ridge(X, y, cfg)


def _fit_huber(X, y, params, seed):
    cfg = linear.HuberConfig(epsilon=params["epsilon"], alpha=params["alpha"])
    return linear.fit_huber(X, y, cfg)


def _fit_knn(X, y, params, seed):
    cfg = knn_mod.KnnConfig(
        k=params["k"], weighting=params["weighting"], search=params["search"]
    )
    return knn_mod.fit_knn(X, y, cfg)


def _fit_random_forest(X, y, params, seed):
    cfg = trees.ForestConfig(
        n_estimators=params["n_estimators"],
        tree=trees.TreeConfig(
            max_depth=params["max_depth"],
            min_samples_split=params["min_samples_split"],
            min_samples_leaf=params["min_samples_leaf"],
        ),
        bootstrap=True,
        seed=seed,
    )
    return trees.fit_random_forest(X, y, cfg)


def _gbm_fitter(growth, objective_order):
    def fit(X, y, params, seed):
        cfg = trees.GbmConfig(
            n_estimators=params["n_estimators"],
            learning_rate=params["learning_rate"],
            max_depth=params["max_depth"],
            min_samples_split=params.get("min_samples_split", 2),
            subsample=params.get("subsample", 1.0),
            colsample=params.get("colsample", 1.0),
            min_child_weight=params.get("min_child_weight", 0.0),
            reg_lambda=params.get("reg_lambda", 1.0),
            max_leaves=params.get("max_leaves", 31),
            growth=growth,
            objective_order=objective_order,
            seed=seed,
        )
        return trees.fit_gbm(X, y, cfg)

    return fit


def _fit_dnn(X, y, params, seed):
    cfg = neural.MlpConfig(
        hidden_widths=tuple(params["hidden_widths"]),
        learning_rate=params["learning_rate"],
        batch_size=params.get("batch_size", 32),
        max_epochs=params.get("max_epochs", 800),
        patience=params.get("patience", 800),
        val_fraction=params.get("val_fraction", 0.2),
        ema_decay=params.get("ema_decay", 0.98),
        seed=seed,
    )
    model, _ = neural.train_mlp(SampleSet(X, y), cfg)
    return model


MODELS = {
    e.key: e
    for e in [
        ModelEntry(
            key="dnn",
            display="Deep Neural Network",
            group="dnn",
            defaults={
                "hidden_widths": [512, 448],
                "learning_rate": 0.01,
                "batch_size": 32,
                "max_epochs": 800,
                "patience": 800,
                "val_fraction": 0.2,
                "ema_decay": 0.98,
            },
            fit=_fit_dnn,
            predict=lambda m, xs: np.asarray(neural.forward(m, xs)).ravel(),
            resource="epochs",
        ),
        ModelEntry(
            key="xgboost",
            display="XGBoost-style",
            group="tree",
            defaults={
                "n_estimators": 157,
                "max_depth": 3,
                "learning_rate": 0.20,
                "subsample": 0.73,
                "colsample": 0.88,
                "min_child_weight": 0.1,
                "reg_lambda": 1.0,
            },
            fit=_gbm_fitter("level-wise", "second"),
            predict=trees.predict_gbm,
            resource="boosting-rounds",
        ),
        ModelEntry(
            key="lightgbm",
            display="LightGBM-style",
            group="tree",
            defaults={
                "n_estimators": 279,
                "max_depth": 8,
                "learning_rate": 0.17,
                "subsample": 0.83,
                "colsample": 0.75,
                "min_child_weight": 0.01,
                "reg_lambda": 0.0,
                "max_leaves": 31,
            },
            fit=_gbm_fitter("leaf-wise", "second"),
            predict=trees.predict_gbm,
            resource="boosting-rounds",
        ),
        ModelEntry(
            key="gradient_boosting",
            display="Gradient Boosting",
            group="tree",
            defaults={
                "n_estimators": 259,
                "max_depth": 3,
                "learning_rate": 0.10,
                "min_samples_split": 8,
            },
            fit=_gbm_fitter("level-wise", "first"),
            predict=trees.predict_gbm,
            resource="boosting-rounds",
        ),
        ModelEntry(
            key="random_forest",
            display="Random Forest",
            group="tree",
            defaults={
                "n_estimators": 195,
                "max_depth": 9,
                "min_samples_split": 2,
                "min_samples_leaf": 1,
            },
            fit=_fit_random_forest,
            predict=trees.predict_forest,
            resource="training-fraction",
        ),
        ModelEntry(
            key="knn",
            display="KNN Regression",
            group="tree",
            defaults={"k": 2, "weighting": "inverse-distance", "search": "ball-tree"},
            fit=_fit_knn,
            predict=knn_mod.predict_knn,
            resource="training-fraction",
        ),
        ModelEntry(
            key="linear",
            display="Linear Regression",
            group="linear",
            defaults={},
            fit=_fit_linear,
            predict=linear.predict_linear,
            resource="training-fraction",
        ),
        ModelEntry(
            key="huber",
            display="Huber Regression",
            group="linear",
            defaults={"epsilon": 1.35, "alpha": 0.1},
            fit=_fit_huber,
            predict=linear.predict_linear,
            resource="training-fraction",
        ),
        ModelEntry(
            key="ridge",
            display="Ridge Regression",
            group="linear",
            defaults={"alpha": 0.1},
            fit=_fit_ridge,
            predict=linear.predict_linear,
            resource="training-fraction",
        ),
        ModelEntry(
            key="bayesian_ridge",
            display="Bayesian Ridge",
            group="linear",
            defaults={
                "max_iter": 100,
                "alpha_1": 1e-7,
                "alpha_2": 1e-5,
                "lambda_1": 1e-5,
                "lambda_2": 1e-7,
            },
            fit=_fit_bayesian_ridge,
            predict=linear.predict_linear,
            resource="training-fraction",
        ),
    ]
}

DEFAULT_ROSTER = tuple(MODELS)


# ---------------------------------------------------------------------------
# Experiment configuration and report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    function: str = "expgrowth"
    n_points: int = 1001
    lo: float = 0.0
    hi: float = 1.0
    boundary: float = 0.7
    models: tuple = DEFAULT_ROSTER
    mode: str = "defaults"
    mode_overrides: dict = field(default_factory=dict)
    seed: int = 0
    n_candidates: int = 81
    cv_folds: int = 5
    eta: int = 3
    mlp_max_resource: int = 243
    out_dir: str | None = None

    def __post_init__(self):
        if not self.models:
            raise ValueError("model roster is empty")
        unknown = [m for m in self.models if m not in MODELS]
        if unknown:
            raise ValueError(f"unknown models: {', '.join(unknown)}")
        for mode in (self.mode, *self.mode_overrides.values()):
            if mode not in ("defaults", "tuned"):
                raise ValueError(f"unknown mode {mode!r}")
        if not self.lo < self.boundary < self.hi:
            raise ValueError("boundary must lie strictly inside the domain")

    def mode_for(self, model_name: str) -> str:
        return self.mode_overrides.get(model_name, self.mode)


@dataclass
class RunReport:
    config: ExperimentConfig
    rows: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    plot_xs: np.ndarray | None = None
    plot_true: np.ndarray | None = None
    curves: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Tuning wiring
# ---------------------------------------------------------------------------

def _cv_evaluator(entry: ModelEntry, train: SampleSet, spec: HalvingSpec):
    """Mean validation MSE across folds; fraction resources subsample the
    fold's fit split, round resources override the boosting length."""
    folds = kfold_split(len(train), spec.cv_folds, spec.seed)
    X, y = train.xs, train.ys

    def evaluate(candidate, resource):
        params = {**entry.defaults, **candidate.values}
        if spec.resource == "boosting-rounds":
            params["n_estimators"] = max(1, int(round(resource)))
        losses = []
        for fi, val_idx in enumerate(folds):
            fit_idx = np.concatenate([f for j, f in enumerate(folds) if j != fi])
            if spec.resource == "training-fraction" and resource < 1.0:
                count = max(1, int(round(resource * fit_idx.size)))
                rng = derive_rng(spec.seed, candidate.draw_index, fi)
                fit_idx = np.sort(rng.choice(fit_idx, size=count, replace=False))
            seed = derive_seed(spec.seed, candidate.draw_index)
            model = entry.fit(X[fit_idx], y[fit_idx], params, seed)
            pred = entry.predict(model, X[val_idx])
            losses.append(float(np.mean((pred - y[val_idx]) ** 2)))
        return float(np.mean(losses))

    return evaluate


def _mlp_evaluator(train: SampleSet, master_seed: int):
    """Score a width/learning-rate candidate by final validation MSE
    after training for the allotted epochs (re-trained from scratch)."""

    def evaluate(candidate, epochs):
        cfg = neural.MlpConfig(
            hidden_widths=(candidate.values["hidden1"], candidate.values["hidden2"]),
            learning_rate=candidate.values["learning_rate"],
            max_epochs=max(1, int(round(epochs))),
            patience=max(1, int(round(epochs))),
            seed=derive_seed(master_seed, candidate.draw_index),
        )
        _, trace = neural.train_mlp(train, cfg)
        return trace.val_losses[-1]

    return evaluate


def _tune_model(entry: ModelEntry, train: SampleSet, cfg: ExperimentConfig):
    """Run the family's tuner and return the chosen parameter map."""
    if entry.key == "dnn":
        spec = HyperbandSpec(max_resource=cfg.mlp_max_resource, eta=cfg.eta, seed=cfg.seed)
        result = hyperband(_mlp_evaluator(train, cfg.seed), SEARCH_SPACES[entry.key], spec)
        chosen = dict(entry.defaults)
        chosen["hidden_widths"] = [
            result.best.values["hidden1"],
            result.best.values["hidden2"],
        ]
        chosen["learning_rate"] = result.best.values["learning_rate"]
        return chosen
    if entry.resource == "boosting-rounds":
        spec = HalvingSpec(
            n_initial=cfg.n_candidates,
            min_resource=9,
            max_resource=243,
            eta=cfg.eta,
            resource="boosting-rounds",
            cv_folds=cfg.cv_folds,
            seed=cfg.seed,
        )
    else:
        spec = HalvingSpec(
            n_initial=cfg.n_candidates,
            min_resource=1.0 / 27.0,
            max_resource=1.0,
            eta=cfg.eta,
            resource="training-fraction",
            cv_folds=cfg.cv_folds,
            seed=cfg.seed,
        )
    result = successive_halving(_cv_evaluator(entry, train, spec), SEARCH_SPACES[entry.key], spec)
    chosen = {**entry.defaults, **result.best.values}
    if spec.resource == "boosting-rounds":
        chosen["n_estimators"] = int(spec.max_resource)
    return chosen


# ---------------------------------------------------------------------------
# The experiment itself
# ---------------------------------------------------------------------------

def run_experiment(cfg: ExperimentConfig) -> RunReport:
    """Generate data, train the roster, and collect metrics and curves.

    A failing model is recorded under ``failures`` and the run continues
    with the remaining roster.
    """
    split_spec = SplitSpec(
        lo=cfg.lo, hi=cfg.hi, boundary=cfg.boundary, n_points=cfg.n_points,
        mode="grid", seed=cfg.seed,
    )
    data = build_dataset(split_spec, cfg.function)
    train, test = data.train, data.test

    plot_xs = generate_grid(PLOT_POINTS, *PLOT_WINDOW)
    plot_true = eval_fn(get_function(cfg.function), plot_xs)

    report = RunReport(config=cfg, plot_xs=plot_xs, plot_true=plot_true)
    for name in cfg.models:
        entry = MODELS[name]
        timing = {}
        try:
            t0 = time.perf_counter()
            if cfg.mode_for(name) == "tuned":
                params = _tune_model(entry, train, cfg)
            else:
                params = dict(entry.defaults)
            timing["tune"] = time.perf_counter() - t0

            t0 = time.perf_counter()
            model = entry.fit(train.xs, train.ys, params, cfg.seed)
            timing["fit"] = time.perf_counter() - t0

            t0 = time.perf_counter()
            pred_train = entry.predict(model, train.xs)
            pred_test = entry.predict(model, test.xs)
            pred_plot = entry.predict(model, plot_xs[:, None])
            timing["predict"] = time.perf_counter() - t0
        except Exception as exc:
            report.failures[name] = f"{type(exc).__name__}: {exc}"
            continue
        report.rows.append(gap_row(name, train.ys, pred_train, test.ys, pred_test))
        report.params[name] = params
        report.timings[name] = timing
        report.curves[name] = pred_plot
    return report


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_TABLE_COLUMNS = [
    ("l1_train", "L1 Train"),
    ("l1_test", "L1 Test"),
    ("d_l1", "|dL1|"),
    ("l2_train", "L2 Train"),
    ("l2_test", "L2 Test"),
    ("d_l2", "|dL2|"),
    ("linf_train", "Linf Train"),
    ("linf_test", "Linf Test"),
    ("d_linf", "|dLinf|"),
]


def _sci(v: float) -> str:
    return f"{v:.1E}"


def render_table(report: RunReport):
    """Aligned text table and a full-precision CSV, in roster order."""
    if not report.rows:
        raise ValueError("report has no metric rows")
    header = ["Model"] + [label for _, label in _TABLE_COLUMNS]
    body = []
    for row in report.rows:
        display = MODELS[row.model_name].display if row.model_name in MODELS else row.model_name
        body.append([display] + [_sci(getattr(row, f)) for f, _ in _TABLE_COLUMNS])
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = []
    for r in [header] + body:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    text = "\n".join(lines) + "\n"

    csv_lines = ["model," + ",".join(f for f, _ in _TABLE_COLUMNS)]
    for row in report.rows:
        csv_lines.append(
            row.model_name + "," + ",".join(repr(getattr(row, f)) for f, _ in _TABLE_COLUMNS)
        )
    return text, "\n".join(csv_lines) + "\n"


_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def _svg_curves(title, xs, y_true, series, boundary, window):
    """Minimal hand-rolled SVG: shaded extrapolation band, the true
    curve dashed, one colored polyline per model, text legend."""
    W, H = 720, 480
    ml, mr, mt, mb = 62, 16, 46, 52
    ys_all = np.concatenate([y_true] + [ys for _, ys in series])
    y0, y1 = float(ys_all.min()), float(ys_all.max())
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    x0, x1 = window

    def xm(x):
        return ml + (x - x0) / (x1 - x0) * (W - ml - mr)

    def ym(y):
        return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb)

    def pts(xv, yv):
        return " ".join(f"{xm(x):.2f},{ym(y):.2f}" for x, y in zip(xv, yv))

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" data-x-window="{x0},{x1}">'
    )
    out.append(f'<rect width="{W}" height="{H}" fill="white"/>')
    out.append(
        f'<rect x="{xm(boundary):.2f}" y="{mt}" width="{xm(x1) - xm(boundary):.2f}" '
        f'height="{H - mt - mb}" fill="#fdeaea"/>'
    )
    out.append(
        f'<text x="{W / 2:.0f}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title} (x in [{x0}, {x1}])</text>'
    )
    # axes
    out.append(
        f'<line x1="{ml}" y1="{H - mb}" x2="{W - mr}" y2="{H - mb}" stroke="black"/>'
    )
    out.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{H - mb}" stroke="black"/>')
    for tx in np.linspace(x0, x1, 7):
        out.append(
            f'<line x1="{xm(tx):.2f}" y1="{H - mb}" x2="{xm(tx):.2f}" y2="{H - mb + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{xm(tx):.2f}" y="{H - mb + 20}" text-anchor="middle" '
            f'font-size="11" font-family="sans-serif">{tx:.1f}</text>'
        )
    for ty in np.linspace(y0, y1, 6):
        out.append(
            f'<line x1="{ml - 5}" y1="{ym(ty):.2f}" x2="{ml}" y2="{ym(ty):.2f}" stroke="black"/>'
        )
        out.append(
            f'<text x="{ml - 8}" y="{ym(ty) + 4:.2f}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif">{ty:.2f}</text>'
        )
    out.append(
        f'<polyline fill="none" stroke="#c21866" stroke-width="2.5" '
        f'stroke-dasharray="7,4" points="{pts(xs, y_true)}"/>'
    )
    legend_y = mt + 16
    out.append(
        f'<text x="{ml + 10}" y="{legend_y}" font-size="12" font-family="sans-serif" '
        f'fill="#c21866">true function</text>'
    )
    for i, (name, ys) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{pts(xs, ys)}"/>'
        )
        legend_y += 15
        out.append(
            f'<text x="{ml + 10}" y="{legend_y}" font-size="12" '
            f'font-family="sans-serif" fill="{color}">{name}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_figure(report: RunReport, x_window=PLOT_WINDOW):
    """Per-group SVG figures plus one curves CSV covering all models."""
    if report.plot_xs is None or not report.curves:
        raise ValueError("report carries no dense-grid predictions")
    xs, y_true = report.plot_xs, report.plot_true
    boundary = report.config.boundary

    groups = {"tree": [], "linear": []}
    dnn_series = []
    for name in report.curves:
        entry_group = MODELS[name].group if name in MODELS else "linear"
        display = MODELS[name].display if name in MODELS else name
        if entry_group == "dnn":
            dnn_series.append((display, report.curves[name]))
        else:
            groups[entry_group].append((display, report.curves[name]))

    figures = {}
    if groups["tree"] or dnn_series:
        figures["trees"] = _svg_curves(
            "Tree and KNN models vs true function",
            xs, y_true, dnn_series + groups["tree"], boundary, x_window,
        )
    if groups["linear"] or dnn_series:
        figures["linear"] = _svg_curves(
            "Linear models vs true function",
            xs, y_true, dnn_series + groups["linear"], boundary, x_window,
        )

    names = list(report.curves)
    lines = ["x,y_true," + ",".join(names)]
    for i, x in enumerate(xs):
        cells = [repr(float(x)), repr(float(y_true[i]))]
        cells += [repr(float(report.curves[n][i])) for n in names]
        lines.append(",".join(cells))
    return figures, "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def save_report(report: RunReport, out_dir):
    """Write results.json, table.txt/csv, curves.csv and the figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    text, csv_text = render_table(report)
    figures, curves_csv = render_figure(report)

    payload = {
        "config": {**asdict(report.config), "models": list(report.config.models)},
        "rows": [row.to_dict() for row in report.rows],
        "params": report.params,
        "curves": "curves.csv",
        "failures": report.failures,
    }
    (out / "results.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
    (out / "table.txt").write_text(text)
    (out / "table.csv").write_text(csv_text)
    (out / "curves.csv").write_text(curves_csv)
    for gname, svg in figures.items():
        (out / f"figure_{gname}.svg").write_text(svg)
    return out / "results.json"


def load_report(out_dir) -> RunReport:
    """Rebuild a report from saved artifacts (for re-rendering)."""
    out = Path(out_dir)
    payload = json.loads((out / "results.json").read_text())
    cfg_d = dict(payload["config"])
    cfg_d["models"] = tuple(cfg_d["models"])
    cfg = ExperimentConfig(**cfg_d)
    report = RunReport(config=cfg)
    report.rows = [MetricsRow.from_dict(d) for d in payload["rows"]]
    report.params = payload["params"]
    report.failures = payload.get("failures", {})

    curves_path = out / payload["curves"]
    if curves_path.exists():
        rows = [line.split(",") for line in curves_path.read_text().strip().splitlines()]
        header, data = rows[0], np.array([[float(c) for c in r] for r in rows[1:]])
        report.plot_xs = data[:, 0]
        report.plot_true = data[:, 1]
        for j, name in enumerate(header[2:], start=2):
            report.curves[name] = data[:, j]
    return report
