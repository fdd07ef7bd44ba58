
import numpy as np
import pytest

from impshap import Dataset, fit_random_forest, generate_dataset, load_csv, predict_proba, write_csv
from impshap.data import CsvError, circle_label, rings_label
from impshap.forest import RandomForestModel


def test_geometry_labels():
    assert circle_label((2.5, 2.5)) == 0
    assert circle_label((0.1, 0.1)) == 1
    assert rings_label((2.5 + 1.5, 2.5)) == 1
    assert rings_label((2.5, 2.6)) == 0
    assert rings_label((5.0, 5.0)) == 2


@pytest.mark.parametrize("name, classes", [("circle", 2), ("gauss_rings", 3), ("clusters", 4)])
def test_generated_shapes_and_determinism(name, classes):
    train, test = generate_dataset(name, 3)
    assert train.X.shape == (1000, 2) and test.X.shape == (250, 2)
    assert train.n_classes == classes
    again, _ = generate_dataset(name, 3)
    assert np.array_equal(train.X, again.X) and np.array_equal(train.y, again.y)


def test_labels_follow_geometry():
    train, _ = generate_dataset("circle", 0)
    assert all(circle_label(x) == y for x, y in zip(train.X, train.y))
    rings, _ = generate_dataset("gauss_rings", 0)
    assert all(rings_label(x) == y for x, y in zip(rings.X, rings.y))


def test_class_proportions_track_reference_counts():
    reference = {"circle": (121, 879), "gauss_rings": (340, 336, 324),
                 "clusters": (249, 263, 238, 250)}
    for name, counts in reference.items():
        train, _ = generate_dataset(name, 42)
        share = train.class_counts() / 1000
        assert np.all(np.abs(share - np.array(counts) / 1000) < 0.05), (name, share)


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 2)), [0, 1, 1], ["a", "b"])
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 2)), [0, 3], ["a", "b"], n_classes=2)
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 2)), [0, 1], ["a"])
    d = Dataset([[1.0, 2.0], [3.0, 6.0]], [0, 1], ["a", "b"])
    assert np.allclose(d.means, [2.0, 4.0])


def test_csv_round_trip(tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text("f1,f2,label\n0.5,1.25,a\n-3,2e-3,b\n7,8,a\n", encoding="utf-8")
    d = load_csv(path, "label")
    assert d.X.tolist() == [[0.5, 1.25], [-3.0, 0.002], [7.0, 8.0]]
    assert d.y.tolist() == [0, 1, 0] and d.n_classes == 2 and d.class_names == ["a", "b"]
    out = tmp_path / "out.csv"
    write_csv(d, out)
    back = load_csv(out, "label")
    assert np.array_equal(back.X, d.X) and np.array_equal(back.y, d.y)


@pytest.mark.parametrize("body, fragment", [
    ("a,label\n1,x\n2\n", "row 3"),
    ("a,label\n1,x\n,y\n", "row 3, column 'a'"),
    ("a,label\n1,x\nfoo,y\n", "non-numeric"),
    ("a,b\n1,2\n", "no column named"),
    ("", "empty"),
])
def test_csv_errors(tmp_path, body, fragment):
    path = tmp_path / "bad.csv"
    path.write_text(body, encoding="utf-8")
    with pytest.raises(CsvError, match=fragment):
        load_csv(path, "label")


def test_stump_separates_one_dimensional_data():
    d = Dataset(np.array([[0.0], [1.0], [2.0], [3.0]]), [0, 0, 1, 1], ["x"])
    model = fit_random_forest(d, tree_count=1, max_depth=1, bootstrap=False)
    assert np.array_equal(model.predict(d.X), d.y)


def test_unlimited_single_tree_memorizes_consistent_data():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(200, 3))
    y = (X[:, 0] * X[:, 1] > 0).astype(int) + (X[:, 2] > 1)
    d = Dataset(X, y, ["a", "b", "c"])
    model = fit_random_forest(d, tree_count=1, max_depth=None, bootstrap=False)
    assert np.array_equal(model.predict(X), y)


@pytest.fixture(scope="module")
def circle_model():
    train, test = generate_dataset("circle", 42)
    return train, test, fit_random_forest(train, tree_count=30, seed=7)


def test_forest_properties(circle_model):
    train, test, model = circle_model
    assert all(t.depth <= 8 for t in model.trees)
    assert 0.9 < model.oob_accuracy <= 1.0
    assert np.mean(model.predict(test.X) == test.y) > 0.9
    p = predict_proba(model, [2.5, 2.5])
    assert p.argmax() == 0
    probs = model.predict_proba_batch(test.X)
    assert np.all(probs >= 0) and np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)


def test_forest_is_deterministic_per_seed(circle_model):
    train, test, model = circle_model
    again = fit_random_forest(train, tree_count=30, seed=7)
    assert np.array_equal(model.predict_proba_batch(test.X), again.predict_proba_batch(test.X))


def test_identical_trees_average_to_one_tree(circle_model):
    _, test, model = circle_model
    one = RandomForestModel(model.trees[:1], 2, 2, 8, 7)
    many = RandomForestModel(model.trees[:1] * 5, 2, 2, 8, 7)
    assert np.allclose(one.predict_proba_batch(test.X), many.predict_proba_batch(test.X), atol=1e-15)


def test_serialization_round_trip(circle_model, tmp_path):
    _, test, model = circle_model
    path = tmp_path / "forest.json"
    model.save(path)
    back = RandomForestModel.load(path)
    assert np.array_equal(back.predict_proba_batch(test.X), model.predict_proba_batch(test.X))
    with pytest.raises(ValueError):
        RandomForestModel.from_dict({"format": "other", "version": 1})


def test_forest_errors(circle_model):
    _, _, model = circle_model
    with pytest.raises(ValueError):
        model.predict_proba([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        fit_random_forest(Dataset(np.zeros((3, 1)), [1, 1, 1], ["a"]))
    with pytest.raises(ValueError):
        fit_random_forest(Dataset(np.zeros((1, 1)), [0], ["a"]))
