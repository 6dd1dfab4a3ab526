import numpy as np
import pytest

import medlda


@pytest.fixture(scope="module")
def binary_data():
    return medlda.make_binary_benchmark(120, 60, seed=3, nuisance_share=0.5)


def test_parse_and_inspect():
    c = medlda.parse_svmlight("+1 0:2 3:1\n-1 1:1\n")
    assert len(c) == 2
    assert c.num_terms == 4
    assert c.kind == "binary"
    assert c.responses == [1, -1]
    assert c.tokens[0] == [0, 0, 3]
    with pytest.raises(medlda.CorpusError):
        medlda.parse_svmlight("")


def test_binary_round_trip(binary_data, tmp_path):
    train, test = binary_data
    model = medlda.train(train, topics=4, burnin=10, seed=5)
    assert model.task == "binary"
    phi = model.phi_hat()
    assert phi.shape == (4, train.num_terms)
    np.testing.assert_allclose(phi.sum(axis=1), 1.0, rtol=1e-12)
    assert model.etas().shape == (1, 4)
    assert len(model.trace) == 10

    pred = medlda.predict(model, test, seed=2)
    assert set(pred) <= {-1, 1}
    acc = medlda.evaluate(pred, test, "binary")["accuracy"]
    assert acc >= 0.9

    path = tmp_path / "m.snap"
    model.save(path)
    again = medlda.load_model(path)
    assert again.checksum() == model.checksum()
    assert medlda.predict(again, test, seed=2) == pred


def test_seed_determinism(binary_data):
    train, _ = binary_data
    a = medlda.train(train, topics=4, burnin=3, seed=9)
    b = medlda.train(train, topics=4, burnin=3, seed=9)
    c = medlda.train(train, topics=4, burnin=3, seed=10)
    assert a.checksum() == b.checksum()
    assert a.checksum() != c.checksum()


def test_regression():
    train, test = medlda.make_regression_benchmark(150, 50, [-2.0, -1.0, 1.0, 2.0], 0.1, seed=1)
    model = medlda.train(train, task="regression", topics=4, c=4.0)
    pred = medlda.predict(model, test)
    assert all(isinstance(p, float) for p in pred)
    assert medlda.evaluate(pred, test, "regression")["predictive_r2"] > 0.5


def test_multiclass_drivers():
    train, test = medlda.make_multiclass_benchmark(150, 60, 3, seed=2, num_topics=6, vocab_size=60)
    mt = medlda.train(train, task="multiclass", topics=6)
    ova = medlda.train(train, task="multiclass", topics=6, strategy="ova", workers=2)
    assert mt.num_models == 1 and ova.num_models == 3
    for model in (mt, ova):
        pred = medlda.predict(model, test)
        assert medlda.evaluate(pred, test, "multiclass")["accuracy"] >= 0.8


def test_bad_arguments(binary_data):
    train, _ = binary_data
    with pytest.raises(ValueError):
        medlda.train(train, topics=0)
    with pytest.raises(ValueError):
        medlda.train(train, task="sorting")
    with pytest.raises(KeyError):
        medlda.make_binary_benchmark(10, 0, colour=1)
