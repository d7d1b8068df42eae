import numpy as np
import pytest

from extrabench.knn import KnnConfig, fit_knn, predict_knn

MODES = ["linear", "sorted-1d", "ball-tree"]


class TestFit:
    def test_stores_both_points(self):
        model = fit_knn(np.array([0.0, 1.0]), np.array([0.0, 1.0]), KnnConfig(k=2))
        assert model.xs.shape == (2, 1)

    def test_k_larger_than_n_rejected(self):
        with pytest.raises(ValueError):
            fit_knn(np.array([0.0, 1.0]), np.array([0.0, 1.0]), KnnConfig(k=3))

    def test_fit_is_deterministic(self):
        x = np.linspace(0, 1, 20)
        y = np.exp(x)
        a = fit_knn(x, y, KnnConfig(k=3))
        b = fit_knn(x, y, KnnConfig(k=3))
        q = np.linspace(-1, 2, 50)
        assert (predict_knn(a, q) == predict_knn(b, q)).all()


class TestPredict:
    @pytest.mark.parametrize("mode", MODES)
    def test_two_point_closed_form(self, mode):
        model = fit_knn(np.array([0.0, 1.0]), np.array([0.0, 1.0]),
                        KnnConfig(k=2, search=mode))
        # inverse-distance: (y1 d2 + y2 d1) / (d1 + d2)
        assert predict_knn(model, np.array([0.25]))[0] == pytest.approx(0.25)

    @pytest.mark.parametrize("mode", MODES)
    def test_exact_match_returns_training_target(self, mode):
        x = np.linspace(0, 1, 11)
        y = np.exp(x)
        model = fit_knn(x, y, KnnConfig(k=2, search=mode))
        assert (predict_knn(model, x) == y).all()

    @pytest.mark.parametrize("mode", MODES)
    def test_far_query_closed_form(self, mode):
        model = fit_knn(np.array([0.0, 1.0]), np.array([0.0, 1.0]),
                        KnnConfig(k=2, search=mode))
        # d1 = 2, d2 = 1 -> (0*1 + 1*2) / 3
        assert predict_knn(model, np.array([2.0]))[0] == pytest.approx(2.0 / 3.0)

    def test_uniform_weighting_is_plain_mean(self):
        x = np.array([0.0, 1.0, 2.0])
        y = np.array([0.0, 3.0, 30.0])
        model = fit_knn(x, y, KnnConfig(k=2, weighting="uniform"))
        assert predict_knn(model, np.array([0.4]))[0] == pytest.approx(1.5)

    def test_duplicate_exact_matches_average(self):
        x = np.array([0.0, 0.0, 1.0])
        y = np.array([2.0, 4.0, 9.0])
        model = fit_knn(x, y, KnnConfig(k=3))
        assert predict_knn(model, np.array([0.0]))[0] == pytest.approx(3.0)


class TestModeEquivalence:
    def test_identical_predictions_across_modes(self):
        rng = np.random.default_rng(8)
        x = np.sort(rng.uniform(0, 1, 80))
        y = np.exp(x**2 + x)
        # queries include exact training points and exact midpoints,
        # which force distance ties
        mids = 0.5 * (x[:-1] + x[1:])
        queries = np.concatenate([x, mids, rng.uniform(-0.5, 1.5, 100)])
        for k in (1, 2, 5):
            preds = [
                predict_knn(fit_knn(x, y, KnnConfig(k=k, search=m)), queries)
                for m in MODES
            ]
            assert (preds[0] == preds[1]).all()
            assert (preds[0] == preds[2]).all()

    def test_equivalence_with_duplicate_training_points(self):
        rng = np.random.default_rng(9)
        x = np.round(rng.uniform(0, 1, 60), 1)
        y = rng.normal(size=60)
        queries = np.concatenate([np.unique(x), rng.uniform(0, 1, 40)])
        for k in (1, 3):
            preds = [
                predict_knn(fit_knn(x, y, KnnConfig(k=k, search=m)), queries)
                for m in MODES
            ]
            assert (preds[0] == preds[1]).all()
            assert (preds[0] == preds[2]).all()

    def test_ball_tree_on_larger_set(self):
        rng = np.random.default_rng(10)
        x = rng.uniform(0, 1, 700)
        y = np.exp(x)
        queries = rng.uniform(-0.2, 1.2, 200)
        a = predict_knn(fit_knn(x, y, KnnConfig(k=2, search="ball-tree")), queries)
        b = predict_knn(fit_knn(x, y, KnnConfig(k=2, search="linear")), queries)
        assert (a == b).all()


class TestExtrapolation:
    def test_bounded_and_converges_to_top_k_mean(self):
        x = np.linspace(0, 1, 50)
        y = np.exp(x**2 + x)
        model = fit_knn(x, y, KnnConfig(k=2))
        top2 = y[-2:]
        far = predict_knn(model, np.array([1.5, 10.0, 1e7]))
        assert (far >= top2.min() - 1e-12).all()
        assert (far <= top2.max() + 1e-12).all()
        assert far[-1] == pytest.approx(top2.mean(), rel=1e-6)

    def test_interpolation_on_train_is_exact(self):
        rng = np.random.default_rng(12)
        x = np.unique(rng.uniform(0, 1, 40))
        y = rng.normal(size=x.size)
        model = fit_knn(x, y, KnnConfig(k=3))
        assert (predict_knn(model, x) == y).all()
