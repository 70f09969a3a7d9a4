"""Smoke test for the dtwmerge extension module.

    maturin develop -m crates/python/Cargo.toml --release
    python python/smoke_test.py
"""

import math
import os
import sys
import tempfile

import dtwmerge as dm

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "fixtures", "ucr")


def check_dtw():
    r = dm.dtw([1.0, 2.0, 3.0], [1.0, 2.0, 2.0, 3.0])
    assert r.distance == 0.0, r
    assert r.path == [(0, 0), (1, 1), (1, 2), (2, 3)], r.path

    r = dm.dtw([0.0, 0.0, 1.0], [0.0, 1.0, 1.0])
    assert r.distance == 0.0
    assert r.path[0] == (0, 0) and r.path[-1] == (2, 2)

    assert dm.dtw_distance([0.0, 1.0], [0.0, 1.0]) == 0.0
    x, y = [0.3, -1.2, 2.0, 0.1, 0.4], [1.0, 0.0, -0.5, 2.2]
    assert math.isclose(dm.dtw_distance(x, y), dm.oracle_dtw(x, y))
    assert dm.dtw_distance(x, y, band=1) >= dm.dtw_distance(x, y)
    try:
        dm.dtw_distance(x, y, band=0)
    except ValueError:
        pass
    else:
        raise AssertionError("infeasible band accepted")
    assert dm.dtw_banded(x, y, 4).distance == dm.dtw_distance(x, y, band=4)

    try:
        dm.dtw([], [1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("empty series accepted")


def check_merge():
    assert dm.dtw_merge([1, 2, 3, 4], [1, 2, 3, 4], seed=5) == [1, 2, 3, 4]
    a = dm.dtw_merge([0, 1, 2, 3, 4, 5], [10, 11, 12, 13], seed=1)
    assert a == dm.dtw_merge([0, 1, 2, 3, 4, 5], [10, 11, 12, 13], seed=1)
    assert a[0] == 0

    pos, mu, var = dm.sample_split_index(40, seed=3)
    assert 1 <= pos <= 40 and mu == 20.0 and var == 4.0

    assert dm.smooth_junction([0, 0, 9, 0, 0], 2, 3) == [0, 0, 3, 0, 0]
    try:
        dm.smooth_junction([0, 0, 9, 0, 0], 2, 4)
    except ValueError:
        pass
    else:
        raise AssertionError("even window accepted")

    z = dm.z_normalize([1.0, 2.0, 3.0, 4.0])
    assert dm.is_z_normalized(z)
    assert not dm.is_z_normalized([1.0, 2.0])


def check_stats():
    assert dm.accuracy(["a", "b", "b"], ["a", "b", "a"]) == 2 / 3
    assert dm.pce(0.2, 4) == 0.05
    assert math.isclose(dm.mpce([0.1, 0.3]), 0.2)
    t, p, df = dm.paired_t_test([0.9, 0.8, 0.85], [0.9, 0.8, 0.85])
    assert (t, p, df) == (0.0, 1.0, 2)


def check_dataset():
    ds = dm.Dataset([[0, 1, 2], [0, 1], [5, 4, 3, 2]], ["x", "x", "y"], name="Toy")
    assert len(ds) == 3 and ds.n_classes == 2 and ds.length_range == (2, 4)
    eq = ds.equalize(seed=2)
    assert eq.length_range == (3, 3)
    aug, self_merges = eq.augment(factor=2, seed=4)
    assert len(aug) == 9 and self_merges == 2
    assert aug.labels == ["x", "x", "y"] * 3
    assert aug.series[:3] == eq.series

    train, test = dm.load_ucr(os.path.join(FIXTURES, "ItalyPowerDemand"), "ItalyPowerDemand")
    assert (len(train), len(test), train.n_classes) == (67, 1029, 2)
    predicted = train.classify(test)
    acc = dm.accuracy(predicted, test.labels)
    assert 0.9 < acc < 1.0, acc

    bigger, _ = train.augment(factor=1, seed=0)
    assert len(bigger) == 134
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "ItalyPowerDemand_TRAIN_AUG.tsv")
        bigger.write(path)
        again = dm.Dataset.read(path, name="ItalyPowerDemand")
        assert again.series == bigger.series and again.labels == bigger.labels

    try:
        dm.load_ucr(FIXTURES, "NoSuchDataset")
    except FileNotFoundError:
        pass
    else:
        raise AssertionError("missing dataset loaded")
    return acc


def main():
    check_dtw()
    check_merge()
    check_stats()
    acc = check_dataset()
    print(f"dtwmerge {dm.__version__}: smoke test ok (ItalyPowerDemand 1NN-DTW accuracy {acc:.4f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
