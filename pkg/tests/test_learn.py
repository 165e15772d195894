"""Classifier, feature-selection, and session-fold evaluation tests."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eoghmi.errors import InvalidParameterError
from eoghmi.features import apply_normalization, fit_normalization
from eoghmi.learn import (
    ACTIVITIES,
    DecisionTreeClassifier,
    KnnClassifier,
    LabeledDataset,
    RandomForestClassifier,
    ShrinkageLdaClassifier,
    classification_metrics,
    fit_model,
    grid_search,
    ledoit_wolf_shrinkage,
    load_dataset_csv,
    load_model,
    loso_evaluate,
    predict,
    predict_proba,
    rfecv,
    save_dataset_csv,
    save_model,
)


def blobs(rng, n_per=30, d=4, centers=(0.0, 3.0), spread=0.3):
    X = np.vstack([rng.normal(c, spread, (n_per, d)) for c in centers])
    y = np.repeat(np.arange(len(centers)), n_per)
    return X, y


def xor_clusters(rng, n_per=50, spread=0.25):
    """Four clusters on square corners, diagonal pairs sharing a class."""
    centers = [(0, 0), (3, 3), (0, 3), (3, 0)]
    X = np.vstack([rng.normal(c, spread, (n_per, 2)) for c in centers])
    y = np.array([0] * (2 * n_per) + [1] * (2 * n_per))
    return X, y


class TestFitPredict:
    def test_knn_separable_blobs_perfect_on_train(self, rng):
        X, y = blobs(rng)
        model = fit_model("knn", X, y, {"k": 3})
        assert np.mean(predict(model, X) == y) == 1.0

    def test_knn_k1_returns_own_label(self, rng):
        X, y = blobs(rng)
        model = fit_model("knn", X, y, {"k": 1})
        assert np.array_equal(predict(model, X), y)

    def test_empty_input_empty_output(self, rng):
        X, y = blobs(rng)
        model = fit_model("knn", X, y, {"k": 3})
        assert predict(model, np.empty((0, X.shape[1]))).size == 0

    def test_forest_beats_lda_on_xor(self, rng):
        X, y = xor_clusters(rng)
        forest = fit_model("random_forest", X, y, {"n_estimators": 50}, seed=7)
        lda = fit_model("lda_shrinkage", X, y, {"shrinkage": "auto"})
        assert np.mean(predict(forest, X) == y) > 0.95
        assert np.mean(predict(lda, X) == y) <= 0.6

    def test_lda_survives_constant_feature(self, rng):
        X, y = blobs(rng)
        X = np.column_stack([X, np.full(len(X), 2.5)])
        model = fit_model("lda_shrinkage", X, y, {"shrinkage": 0.3})
        assert np.mean(predict(model, X) == y) == 1.0

    def test_single_class_rejected(self, rng):
        X = rng.normal(0, 1, (20, 3))
        with pytest.raises(InvalidParameterError):
            fit_model("knn", X, np.zeros(20), {"k": 1})

    def test_dimension_mismatch_rejected(self, rng):
        X, y = blobs(rng)
        model = fit_model("knn", X, y, {"k": 3})
        with pytest.raises(InvalidParameterError):
            predict(model, rng.normal(0, 1, (5, X.shape[1] + 1)))

    def test_unknown_kind_rejected(self, rng):
        X, y = blobs(rng)
        with pytest.raises(InvalidParameterError):
            fit_model("perceptron", X, y)

    def test_probabilities_sum_to_one(self, rng):
        X, y = blobs(rng)
        for kind in ("knn", "lda_shrinkage", "decision_tree", "random_forest"):
            model = fit_model(kind, X, y, seed=3)
            _, probs = predict_proba(model, X)
            np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-9)

    def test_fit_is_deterministic_given_seed(self, rng):
        X, y = xor_clusters(rng)
        a = fit_model("random_forest", X, y, {"n_estimators": 20}, seed=11)
        b = fit_model("random_forest", X, y, {"n_estimators": 20}, seed=11)
        _, pa = predict_proba(a, X)
        _, pb = predict_proba(b, X)
        assert np.array_equal(pa, pb)


class TestKnnVoting:
    def test_count_tie_broken_by_cumulative_distance(self):
        # counts tie 2-2; class 1 is nearer in total despite higher index
        X = np.array([[1.0], [-1.5], [2.0], [-2.0]])
        y = np.array([1, 0, 1, 0])
        clf = KnnClassifier(k=4)
        clf.fit(X, y)
        assert clf.predict(np.array([[0.0]]))[0] == 1

    def test_full_tie_takes_lowest_class(self):
        X = np.array([[1.0], [-1.0]])
        y = np.array([4, 2])
        clf = KnnClassifier(k=2)
        clf.fit(X, y)
        assert clf.predict(np.array([[0.0]]))[0] == 2

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_prediction_invariant_to_training_order(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(0, 1, (25, 3))
        y = rng.integers(0, 3, 25)
        if np.unique(y).size < 2:
            y[0], y[1] = 0, 1
        Q = rng.normal(0, 1, (10, 3))
        perm = rng.permutation(len(X))
        a = KnnClassifier(k=5)
        a.fit(X, y)
        b = KnnClassifier(k=5)
        b.fit(X[perm], y[perm])
        assert np.array_equal(a.predict(Q), b.predict(Q))


class TestForestTreeEquivalence:
    def test_single_tree_forest_matches_decision_tree(self, rng):
        X, y = xor_clusters(rng)
        tree = DecisionTreeClassifier()
        tree.fit(X, y)
        forest = RandomForestClassifier(n_estimators=1, bootstrap=False,
                                        max_features=None, seed=9)
        forest.fit(X, y)
        assert np.array_equal(tree.predict_proba(X), forest.predict_proba(X))
        assert np.array_equal(tree.predict(X), forest.predict(X))


class TestRfecv:
    def test_informative_features_survive(self):
        rng = np.random.default_rng(21)
        X = rng.normal(0, 1, (150, 22))
        y = (X[:, 0] + X[:, 1] > 0).astype(int)
        result = rfecv(X, y, folds=10, seed=3)
        selected = np.flatnonzero(result.mask)
        assert {0, 1} <= set(selected.tolist())
        informative_only = rfecv(X[:, :2], y, folds=10, seed=3)
        assert result.scores[result.n_selected] >= informative_only.scores[2] - 0.02

    def test_pure_noise_labels_score_near_chance(self):
        rng = np.random.default_rng(5)
        X = rng.normal(0, 1, (180, 20))
        y = rng.integers(0, 6, 180)
        result = rfecv(X, y, folds=10, seed=1)
        assert result.n_selected <= X.shape[1]
        assert abs(result.scores[result.n_selected] - 1 / 6) <= 0.1

    def test_single_feature_is_kept(self, rng):
        X = rng.normal(0, 1, (40, 1))
        y = (X[:, 0] > 0).astype(int)
        result = rfecv(X, y, folds=10, seed=0)
        assert result.mask.tolist() == [True]

    def test_too_few_samples_rejected(self, rng):
        with pytest.raises(InvalidParameterError):
            rfecv(rng.normal(0, 1, (5, 3)), np.array([0, 1, 0, 1, 0]), folds=10)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(2)
        X = rng.normal(0, 1, (60, 8))
        y = rng.integers(0, 2, 60)
        a = rfecv(X, y, folds=10, seed=4)
        b = rfecv(X, y, folds=10, seed=4)
        assert np.array_equal(a.mask, b.mask)
        assert a.scores == b.scores


class TestMetrics:
    def test_perfect_prediction(self):
        y = np.array(list(ACTIVITIES) * 3)
        m = classification_metrics(y, y)
        assert m["accuracy"] == m["precision"] == m["recall"] == m["f1"] == 1.0
        assert np.array_equal(m["confusion"], np.eye(6))

    def test_constant_prediction_on_balanced_labels(self):
        y = np.array(list(ACTIVITIES) * 4)
        pred = np.array(["blink"] * len(y))
        m = classification_metrics(y, pred, labels=list(ACTIVITIES))
        assert m["accuracy"] == pytest.approx(1 / 6)
        assert set(m["zero_division_classes"]) == set(ACTIVITIES) - {"blink"}

    def test_matches_brute_force_tally(self, rng):
        y_true = rng.integers(0, 4, 100)
        y_pred = rng.integers(0, 4, 100)
        m = classification_metrics(y_true, y_pred, labels=[0, 1, 2, 3])

        correct = sum(int(t == p) for t, p in zip(y_true, y_pred))
        assert m["accuracy"] == correct / 100
        assert m["accuracy"] == np.trace(m["confusion_counts"]) / 100

        precisions, recalls, f1s = [], [], []
        for c in range(4):
            tp = sum(int(t == c and p == c) for t, p in zip(y_true, y_pred))
            fp = sum(int(t != c and p == c) for t, p in zip(y_true, y_pred))
            fn = sum(int(t == c and p != c) for t, p in zip(y_true, y_pred))
            prec = tp / (tp + fp) if tp + fp else 0.0
            rec = tp / (tp + fn) if tp + fn else 0.0
            precisions.append(prec)
            recalls.append(rec)
            f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
        assert m["precision"] == pytest.approx(np.mean(precisions), abs=1e-12)
        assert m["recall"] == pytest.approx(np.mean(recalls), abs=1e-12)
        assert m["f1"] == pytest.approx(np.mean(f1s), abs=1e-12)

    def test_row_normalization(self, rng):
        y_true = rng.integers(0, 3, 60)
        y_pred = rng.integers(0, 3, 60)
        m = classification_metrics(y_true, y_pred, labels=[0, 1, 2, 3])
        sums = m["confusion"].sum(axis=1)
        assert np.allclose(sums[:3], 1.0)
        assert sums[3] == 0.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(InvalidParameterError):
            classification_metrics([0, 1], [0])


def activity_dataset(rng, n_sessions=3, reps=5, d=12, spread=0.4):
    """Separable 6-class clusters spread over sessions, small feature count."""
    rows, labels, sessions = [], [], []
    for s in range(n_sessions):
        for a, activity in enumerate(ACTIVITIES):
            center = np.zeros(d)
            center[a % d] = 3.0
            center[(a + 1) % d] = -2.0
            for _ in range(reps):
                rows.append(center + rng.normal(0, spread, d))
                labels.append(activity)
                sessions.append(f"s{s}")
    names = tuple(f"f{i}" for i in range(d))
    return LabeledDataset(X=np.asarray(rows), y=np.asarray(labels, dtype=object),
                          session=np.asarray(sessions, dtype=object), feature_names=names)


class _ConstantStub:
    """Ignores features entirely; always answers the same activity."""

    def __init__(self, label):
        self.label = label

    def fit(self, X, y):
        return self

    def predict(self, X):
        return np.array([self.label] * len(X), dtype=object)


class TestLoso:
    def test_one_fold_per_session(self, rng):
        ds = activity_dataset(rng, n_sessions=6, reps=2)
        report = loso_evaluate(ds, "knn", [{"k": 1}], seed=0, select_features=False)
        assert [f["session"] for f in report.per_fold] == [f"s{i}" for i in range(6)]
        for fold in report.folds:
            held_out = ds.session == fold.session
            assert fold.model.norm_stats.mean.shape == (ds.X.shape[1],)
            assert np.count_nonzero(held_out) == ds.n_samples // 6

    def test_stub_accuracy_equals_class_frequency(self, rng):
        ds = activity_dataset(rng, n_sessions=3, reps=4)
        report = loso_evaluate(
            ds, "stub", seed=0, select_features=False,
            classifier_factory=lambda params, seed: _ConstantStub("blink"),
        )
        for fold in report.per_fold:
            test_y = ds.y[ds.session == fold["session"]]
            assert fold["accuracy"] == pytest.approx(np.mean(test_y == "blink"))

    def test_separable_dataset_scores_high(self, rng):
        ds = activity_dataset(rng, n_sessions=3, reps=5)
        report = loso_evaluate(ds, "knn", [{"k": 1}, {"k": 3}], seed=2,
                               select_features=False)
        assert report.mean_accuracy > 0.95
        nonzero = report.confusion.sum(axis=1) > 0
        assert np.allclose(report.confusion[nonzero].sum(axis=1), 1.0, atol=1e-9)

    def test_two_sessions_required(self, rng):
        ds = activity_dataset(rng, n_sessions=1, reps=3)
        with pytest.raises(InvalidParameterError):
            loso_evaluate(ds, "knn", [{"k": 1}])

    def test_fold_artifacts_recompute_bit_identical(self, rng):
        """Normalization, selection, and grid scores derive from train rows only."""
        ds = activity_dataset(rng, n_sessions=3, reps=4)
        report = loso_evaluate(ds, "knn", [{"k": 1}, {"k": 3}], seed=5)
        for fold in report.folds:
            train = ds.subset(ds.session != fold.session)
            stats = fit_normalization(train.X)
            assert np.array_equal(stats.mean, fold.norm_stats.mean)
            assert np.array_equal(stats.std, fold.norm_stats.std)
            Xn = apply_normalization(stats, train.X)
            selection = rfecv(Xn, train.y, folds=min(10, train.n_samples),
                              seed=fold.rfecv_seed)
            assert np.array_equal(selection.mask, fold.mask)
            assert selection.scores == fold.rfecv_scores
            best, scores = grid_search("knn", Xn[:, fold.mask], train.y,
                                       [{"k": 1}, {"k": 3}], folds=5,
                                       seed=fold.grid_seed)
            assert best == fold.best_params
            assert scores == fold.grid_scores

    def test_grid_tie_prefers_first_entry(self, rng):
        X, y = blobs(rng, n_per=20)
        best, scores = grid_search("knn", X, y, [{"k": 1}, {"k": 3}], seed=0)
        assert all(s == 1.0 for _, s in scores)
        assert best == {"k": 1}


class TestPersistence:
    @pytest.mark.parametrize("kind,params", [
        ("knn", {"k": 3}),
        ("lda_shrinkage", {"shrinkage": 0.2}),
        ("decision_tree", {"max_depth": 5}),
        ("random_forest", {"n_estimators": 10}),
    ])
    def test_model_roundtrip(self, tmp_path, rng, kind, params):
        X, y = blobs(rng)
        model = fit_model(kind, X, y, params, seed=3)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == kind
        assert np.array_equal(predict(model, X), predict(loaded, X))
        _, pa = predict_proba(model, X)
        _, pb = predict_proba(loaded, X)
        np.testing.assert_allclose(pa, pb, atol=0)

    def test_dataset_roundtrip(self, tmp_path, rng):
        n = 8
        X = rng.normal(0, 1, (n, 87))
        y = np.array([ACTIVITIES[i % 6] for i in range(n)], dtype=object)
        sess = np.array(["a", "b"] * (n // 2), dtype=object)
        ds = LabeledDataset(X=X, y=y, session=sess)
        path = tmp_path / "ds.csv"
        save_dataset_csv(ds, path)
        loaded = load_dataset_csv(path)
        assert np.array_equal(loaded.X, ds.X)
        assert loaded.y.tolist() == ds.y.tolist()
        assert loaded.session.tolist() == ds.session.tolist()

    def test_unknown_label_rejected(self, rng):
        with pytest.raises(InvalidParameterError):
            LabeledDataset(
                X=rng.normal(0, 1, (2, 87)),
                y=np.array(["squint", "blink"], dtype=object),
                session=np.array(["a", "a"], dtype=object),
            )


class TestLedoitWolf:
    def test_shrinkage_in_unit_interval(self, rng):
        Z = rng.normal(0, 1, (40, 6))
        gamma = ledoit_wolf_shrinkage(Z - Z.mean(axis=0))
        assert 0.0 <= gamma <= 1.0

    def test_identity_like_data_shrinks_hard(self, rng):
        # tiny sample, many dims: the empirical covariance is unreliable
        Z = rng.normal(0, 1, (8, 30))
        gamma = ledoit_wolf_shrinkage(Z - Z.mean(axis=0))
        assert gamma > 0.5
