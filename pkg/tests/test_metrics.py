import numpy as np
import pytest

from extrabench.metrics import gap_row, mae, max_abs_err, rmse


class TestNorms:
    def test_mae_symmetric_residuals(self):
        assert mae([1.0, -1.0], [0.0, 0.0]) == 1.0

    def test_mae_hand_arithmetic(self):
        assert mae([0.0, 2.0], [0.0, 0.0]) == 1.0

    def test_rmse_values(self):
        assert rmse([0.0, 2.0], [0.0, 0.0]) == pytest.approx(np.sqrt(2.0), rel=1e-15)
        assert rmse([1.0, -1.0], [0.0, 0.0]) == 1.0

    def test_max_abs(self):
        assert max_abs_err([0.0, 2.0], [0.0, 0.0]) == 2.0
        assert max_abs_err([-3.0, 1.0], [0.0, 0.0]) == 3.0

    def test_identity_cases(self):
        y = np.linspace(-5, 5, 17)
        assert mae(y, y) == 0.0
        assert rmse(y, y) == 0.0
        assert max_abs_err(y, y) == 0.0

    def test_rejects_mismatch_and_empty(self):
        with pytest.raises(ValueError):
            mae([1.0], [1.0, 2.0])
        for fn in (mae, rmse, max_abs_err):
            with pytest.raises(ValueError):
                fn([], [])


class TestGapRow:
    def test_dnn_row_values(self):
        # constant residual vectors realize the reported norms exactly
        row = gap_row(
            "dnn",
            np.zeros(4), np.full(4, 4.3e-3),
            np.zeros(4), np.full(4, 5.3e-2),
        )
        assert row.l1_train == pytest.approx(4.3e-3)
        assert row.d_l1 == pytest.approx(5.3e-2 - 4.3e-3)
        assert f"{row.d_l1:.1E}" == "4.9E-02"

    def test_xgboost_linf_gap(self):
        row = gap_row(
            "xgb",
            np.zeros(3), np.array([0.0, 1.8e-2, 1e-3]),
            np.zeros(3), np.array([0.0, 4.1, 2.0]),
        )
        assert row.d_linf == pytest.approx(4.1 - 1.8e-2)
        assert f"{row.d_linf:.1E}" == "4.1E+00"

    def test_identical_splits_zero_deltas(self):
        y = np.linspace(0, 1, 9)
        p = y + 0.25
        row = gap_row("m", y, p, y, p)
        assert row.d_l1 == row.d_l2 == row.d_linf == 0.0

    def test_all_fields_nonnegative(self):
        rng = np.random.default_rng(3)
        row = gap_row("m", rng.normal(size=10), rng.normal(size=10),
                      rng.normal(size=20), rng.normal(size=20))
        for f in ("l1_train", "l1_test", "l2_train", "l2_test",
                  "linf_train", "linf_test", "d_l1", "d_l2", "d_linf"):
            assert getattr(row, f) >= 0.0


class TestNormProperties:
    def test_ordering_on_random_vectors(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(1, 40))
            y = rng.normal(scale=rng.uniform(0.01, 100), size=n)
            p = np.zeros(n)
            a, b, c = mae(y, p), rmse(y, p), max_abs_err(y, p)
            assert a <= b * (1 + 1e-12)
            assert b <= c * (1 + 1e-12)

    def test_scale_equivariance(self):
        rng = np.random.default_rng(5)
        y = rng.normal(size=31)
        p = np.zeros(31)
        for c in (0.0, 0.5, 3.0, 1e6):
            assert mae(c * y, p) == pytest.approx(c * mae(y, p), rel=1e-12, abs=1e-300)
            assert rmse(c * y, p) == pytest.approx(c * rmse(y, p), rel=1e-12, abs=1e-300)
            assert max_abs_err(c * y, p) == pytest.approx(
                c * max_abs_err(y, p), rel=1e-12, abs=1e-300
            )

    def test_permutation_invariance(self):
        rng = np.random.default_rng(6)
        y = rng.normal(size=50)
        p = rng.normal(size=50)
        perm = rng.permutation(50)
        assert mae(y, p) == pytest.approx(mae(y[perm], p[perm]), rel=1e-12)
        assert rmse(y, p) == pytest.approx(rmse(y[perm], p[perm]), rel=1e-12)
        assert max_abs_err(y, p) == max_abs_err(y[perm], p[perm])
