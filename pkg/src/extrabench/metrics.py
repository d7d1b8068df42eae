"""Error norms and the per-model train/test gap row.

Three norms are reported per split: mean absolute error, root mean
squared error, and maximum absolute error, together with the absolute
train-to-test gap of each.
"""

from dataclasses import dataclass, fields

import numpy as np


def _residuals(y_true, y_pred):
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise ValueError("empty vectors have no error norm")
    return y_true - y_pred


def mae(y_true, y_pred) -> float:
    """Mean absolute error."""
    return float(np.mean(np.abs(_residuals(y_true, y_pred))))


def rmse(y_true, y_pred) -> float:
    """Root mean squared error."""
    return float(np.sqrt(np.mean(_residuals(y_true, y_pred) ** 2)))


def max_abs_err(y_true, y_pred) -> float:
    """Maximum absolute error."""
    return float(np.max(np.abs(_residuals(y_true, y_pred))))


@dataclass
class MetricsRow:
    """One table row: the three norms on both splits plus absolute gaps."""

    model_name: str
    l1_train: float
    l1_test: float
    l2_train: float
    l2_test: float
    linf_train: float
    linf_test: float
    d_l1: float
    d_l2: float
    d_linf: float

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d):
        return cls(**{f.name: d[f.name] for f in fields(cls)})


def gap_row(model_name, train_true, train_pred, test_true, test_pred) -> MetricsRow:
    """Compute all nine numbers for one model."""
    l1_tr, l1_te = mae(train_true, train_pred), mae(test_true, test_pred)
    l2_tr, l2_te = rmse(train_true, train_pred), rmse(test_true, test_pred)
    li_tr, li_te = max_abs_err(train_true, train_pred), max_abs_err(test_true, test_pred)
    return MetricsRow(
        model_name=model_name,
        l1_train=l1_tr,
        l1_test=l1_te,
        l2_train=l2_tr,
        l2_test=l2_te,
        linf_train=li_tr,
        linf_test=li_te,
        d_l1=abs(l1_te - l1_tr),
        d_l2=abs(l2_te - l2_tr),
        d_linf=abs(li_te - li_tr),
    )
