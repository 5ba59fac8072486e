"""Fold splitting, label noise, the experiment runner and its reports."""

import numpy as np
import pytest

from gfmm.evaluation import (
    ExperimentSpec,
    MetricsRecord,
    format_metrics_csv,
    inject_label_noise,
    noise_count,
    parse_thetas,
    read_metrics_csv,
    run_experiment,
    shuffle_std,
    stratified_folds,
    summarize,
    write_metrics_csv,
)


def test_folds_exact_division():
    y = np.array([1, 1, 1, 1, 2, 2, 2, 2])
    for f in stratified_folds(y, 4, seed=3):
        assert sorted(y[f].tolist()) == [1, 2]


def test_folds_remainder_spread():
    sizes = sorted(len(f) for f in stratified_folds(np.ones(9), 4, seed=0))
    assert sizes == [2, 2, 2, 3]


def test_folds_partition_and_balance(rng):
    y = rng.integers(1, 4, size=101)
    folds = stratified_folds(y, 5, seed=1)
    assert sorted(np.concatenate(folds).tolist()) == list(range(101))
    assert max(map(len, folds)) - min(map(len, folds)) <= 1
    for c in (1, 2, 3):
        per = [np.count_nonzero(y[f] == c) for f in folds]
        assert max(per) - min(per) <= 1
    assert [f.tolist() for f in folds] == [f.tolist() for f in stratified_folds(y, 5, seed=1)]


def test_folds_reject_bad_k():
    with pytest.raises(ValueError):
        stratified_folds([1, 2], 1)
    with pytest.raises(ValueError):
        stratified_folds([1, 2], 3)


def test_noise_count_and_flips(rng):
    assert noise_count(0.10, 306) == 31
    y = rng.integers(1, 3, size=306)
    noisy = inject_label_noise(y, 0.10, seed=8)
    assert np.count_nonzero(noisy != y) == 31
    assert np.array_equal(inject_label_noise(y, 0.0, seed=8), y)
    with pytest.raises(ValueError):
        inject_label_noise(np.ones(5), 0.5)


def _record(err, fold=0, rep=0, boxes=3):
    return MetricsRecord("iol", 0.1, fold, rep, 0, 0.0, False, err, boxes, 0.01)


def test_summary_statistics():
    (row,) = summarize([_record(10.0)])
    assert row.mean_error == 10.0 and row.std_error == 0.0
    (row,) = summarize([_record(10.0, fold=0), _record(20.0, fold=1)])
    assert row.mean_error == pytest.approx(15.0) and row.std_error == pytest.approx(5.0)
    with pytest.raises(ValueError):
        summarize([])


def test_shuffle_std_averages_over_folds():
    recs = [_record(10.0, 0, 0), _record(20.0, 0, 1), _record(30.0, 1, 0), _record(30.0, 1, 1)]
    assert shuffle_std(recs) == {("iol", 0.1): pytest.approx(2.5)}


def test_parse_thetas():
    assert parse_thetas("0.1..0.7") == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)
    assert parse_thetas("0.1..0.2:0.05") == (0.1, 0.15, 0.2)
    assert parse_thetas("0.3, 0.5") == (0.3, 0.5)
    with pytest.raises(ValueError):
        parse_thetas("0.5..0.1")


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(thetas=(0.0,))
    with pytest.raises(ValueError):
        ExperimentSpec(algorithms=("svm",))
    with pytest.raises(ValueError):
        ExperimentSpec(folds=2, pruning=True)
    assert ExperimentSpec(algorithms="onln").algorithms == ("onln",)


def _blobs(rng, n=80):
    y = np.repeat([1, 2], n // 2)
    X = rng.normal(size=(n, 2)) * 0.5 + np.where(y[:, None] == 1, 0.0, 2.0)
    return X, y


def test_record_count_and_determinism(rng):
    X, y = _blobs(rng)
    spec = ExperimentSpec(folds=4, thetas=tuple(np.round(np.arange(1, 8) / 10, 1)), algorithms=("iol", "onln"))
    a = run_experiment(spec, X, y)
    assert len(a) == 2 * 28
    b = run_experiment(spec, X, y)
    strip = lambda rs: [r.__dict__ | {"train_seconds": 0} for r in rs]  # noqa: E731
    assert strip(a) == strip(b)


def test_pruning_emits_before_and_after(rng):
    X, y = _blobs(rng)
    spec = ExperimentSpec(folds=4, thetas=(0.3,), pruning=True, noise=0.1)
    recs = run_experiment(spec, X, y)
    assert len(recs) == 8
    assert [r.pruned for r in recs] == [False, True] * 4
    for before, after in zip(recs[::2], recs[1::2]):
        assert after.boxes <= before.boxes


def test_ensemble_and_repetitions(rng):
    X, y = _blobs(rng, 40)
    spec = ExperimentSpec(folds=2, thetas=(0.3,), algorithms=("iol-ensemble", "onln+manhattan"), repetitions=2, members=3)
    recs = run_experiment(spec, X, y)
    assert len(recs) == 8
    assert {r.rep for r in recs} == {0, 1}


def test_metrics_csv_round_trip(tmp_path):
    recs = [_record(12.5, fold=1, rep=2), _record(0.0)]
    text = format_metrics_csv(recs, master_seed=7)
    assert text.splitlines()[0] == "# master_seed=7"
    path = tmp_path / "m.csv"
    write_metrics_csv(recs, path, master_seed=7)
    assert read_metrics_csv(path) == recs
