import json

import numpy as np
import pytest

from musum.audio_io import AudioClip
from musum.genreclf import (
    FEATURE_NAMES,
    SvmModel,
    cross_validate,
    hinge_objective,
    predict,
    song_features,
    stratified_folds,
    train,
)

from conftest import SR, tone


def test_song_features_dimension(song60):
    vec = song_features(song60)
    assert vec.shape == (32,) and len(FEATURE_NAMES) == 32
    assert np.all(np.isfinite(vec))


def test_song_features_silence():
    vec = song_features(AudioClip(np.zeros(2 * SR), SR))
    assert np.allclose(vec[:13], 0.0, atol=1e-9)
    assert vec[13] == 0.0


def test_song_features_positions_fixed():
    a = tone(440, 2.0, amp=0.5)
    b = tone(8000, 2.0, amp=0.2)
    fa, fb = song_features(a), song_features(b)
    assert np.array_equal(song_features(a), fa)
    assert fa[13] == pytest.approx(0.5 / np.sqrt(2), abs=1e-3)
    assert fb[13] == pytest.approx(0.2 / np.sqrt(2), abs=1e-3)
    # the 8 kHz tone lives in the high band block, not the low one
    assert fb[14] > 10 * fb[23]


def test_song_features_too_short():
    with pytest.raises(ValueError):
        song_features(tone(440, 0.5))


def pad32(X):
    out = np.zeros((len(X), 32))
    out[:, :np.shape(X)[1]] = X
    return out


def test_separable_toy_set():
    rng = np.random.default_rng(0)
    pos = rng.normal([2, 2], 0.5, size=(20, 2))
    neg = rng.normal([-2, -2], 0.5, size=(20, 2))
    X = pad32(np.vstack([pos, neg]))
    y = np.r_[np.ones(20), -np.ones(20)]
    model = train(X, y, C=10, n_iter=20_000)
    assert np.mean(predict(model, X) == y) == 1.0


def test_symmetric_pair_tie_goes_positive():
    X = pad32([[1.0], [-1.0]])
    model = train(X, np.array([1.0, -1.0]), C=1.0, n_iter=5_000)
    assert model.bias == pytest.approx(0.0, abs=1e-9)
    assert model.decision(np.zeros(32)) == pytest.approx(0.0, abs=1e-9)
    assert predict(model, X[0]) == 1 and predict(model, X[1]) == -1
    zero_model = SvmModel(np.zeros(32), 0.0, np.zeros(32), np.ones(32))
    assert predict(zero_model, np.zeros(32)) == 1


def test_random_labels_small_c_beats_nothing():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(40, 32))
    y = np.r_[np.ones(20), -np.ones(20)]
    rng.shuffle(y)
    model = train(X, y, C=0.01, n_iter=5_000)
    assert np.mean(predict(model, X) == y) >= 0.5


def test_zero_weight_negative_bias():
    m = SvmModel(np.zeros(32), -1.0, np.zeros(32), np.ones(32))
    assert set(predict(m, np.random.default_rng(0).normal(size=(10, 32))).tolist()) == {-1}


def test_negated_model_flips_predictions():
    rng = np.random.default_rng(1)
    m = SvmModel(rng.normal(size=32), 0.3, np.zeros(32), np.ones(32))
    neg = SvmModel(-m.weights, -m.bias, m.mean, m.scale)
    X = rng.normal(size=(50, 32))
    assert np.array_equal(predict(m, X), -predict(neg, X))


def test_single_class_rejected():
    with pytest.raises(ValueError):
        train(np.zeros((4, 32)), np.ones(4))


def test_zero_variance_feature_scale_is_one():
    X = np.c_[np.arange(6.0), np.full(6, 3.0)]
    m = train(X, np.array([1, 1, 1, -1, -1, -1.0]), n_iter=1_000)
    assert m.scale[1] == 1.0


def qp_optimum(X, y, C):
    cp = pytest.importorskip("cvxpy")
    w, b = cp.Variable(X.shape[1]), cp.Variable()
    obj = 0.5 * cp.sum_squares(w) + C * cp.sum(cp.pos(1 - cp.multiply(y, X @ w + b)))
    cp.Problem(cp.Minimize(obj)).solve()
    return obj.value


@pytest.mark.parametrize("C", [0.1, 1.0])
def test_objective_close_to_qp_optimum(C):
    rng = np.random.default_rng(2)
    X = rng.normal(size=(40, 32))
    y = np.where(rng.random(40) < 0.5, 1.0, -1.0)
    X[:, 0] += 1.5 * y
    model = train(X, y, C=C)
    Z = model.standardize(X)
    ours = hinge_objective(model.weights, model.bias, Z, y, C)
    best = qp_optimum(Z, y, C)
    assert ours <= best * 1.01 + 1e-9


def test_objective_history_non_increasing():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 32))
    y = np.where(rng.random(30) < 0.5, 1.0, -1.0)
    h = np.array(train(X, y, n_iter=10_000).objective_history)
    assert np.all(np.diff(h) <= 1e-9)


def test_model_json_round_trip():
    rng = np.random.default_rng(4)
    X, y = rng.normal(size=(10, 32)), np.r_[np.ones(5), -np.ones(5)]
    m = train(X, y, n_iter=500)
    back = SvmModel.from_json(m.to_json())
    assert np.array_equal(predict(back, X), predict(m, X))
    assert set(json.loads(m.to_json())) == {"weights", "bias", "mean", "scale", "C"}


def test_folds_of_500():
    y = np.r_[np.ones(250), -np.ones(250)]
    folds = stratified_folds(y, 5, seed=0)
    assert np.bincount(folds).tolist() == [100] * 5
    for f in range(5):
        assert np.sum(y[folds == f] == 1) == 50


@pytest.mark.parametrize("n_pos,n_neg,k", [(7, 6, 5), (20, 20, 5), (3, 9, 4), (5, 5, 10)])
def test_folds_partition_and_balance(n_pos, n_neg, k):
    y = np.r_[np.ones(n_pos), -np.ones(n_neg)]
    folds = stratified_folds(y, k, seed=3)
    sizes = np.bincount(folds, minlength=k)
    assert sizes.sum() == y.size and sizes.max() - sizes.min() <= 1
    for label in (1, -1):
        per = np.bincount(folds[y == label], minlength=k)
        assert per.max() - per.min() <= 1


def test_constant_predictor_on_balanced_set():
    y = np.r_[np.ones(50), -np.ones(50)]
    X = np.zeros((100, 32))
    rep = cross_validate(X, y, 5, seed=0, trainer=lambda Xt, yt: (lambda Xs: np.ones(len(Xs))))
    assert rep.mean_accuracy == pytest.approx(0.5, abs=0.02)


def test_cv_deterministic_and_reported():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(30, 32))
    y = np.r_[np.ones(15), -np.ones(15)]
    X[:, 2] += y
    a = cross_validate(X, y, 5, seed=9, C=1.0)
    b = cross_validate(X, y, 5, seed=9, C=1.0)
    assert np.array_equal(a.fold_assignments, b.fold_assignments)
    assert a.fold_accuracies == b.fold_accuracies
    assert a.mean_accuracy == pytest.approx(np.mean(a.fold_accuracies))
    assert json.loads(json.dumps(a.to_dict()))["seed"] == 9


def test_cv_errors():
    with pytest.raises(ValueError):
        cross_validate(np.zeros((3, 32)), np.array([1, -1, 1]), k=4)
    with pytest.raises(ValueError):
        cross_validate(np.zeros((3, 32)), np.array([1, -1, 1]), k=1)


def test_predict_uses_training_standardization():
    rng = np.random.default_rng(8)
    X = rng.normal(5.0, 2.0, size=(30, 32))
    y = np.r_[np.ones(15), -np.ones(15)]
    X[:, 0] += 3 * y
    m = train(X, y, n_iter=5_000)
    assert np.allclose(m.mean, X.mean(axis=0)) and np.allclose(m.scale, X.std(axis=0))
    shifted = X + 100.0
    manual = np.where(((shifted - m.mean) / m.scale) @ m.weights + m.bias >= 0, 1, -1)
    assert np.array_equal(predict(m, shifted), manual)
