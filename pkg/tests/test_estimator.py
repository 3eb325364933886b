import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from concordia import BondConcurrenceTransformer, ConcurrenceOptimizer, fitness
from concordia.lattice import LatticeSpec, build_bond_table


@pytest.fixture(scope="module")
def fitted():
    est = ConcurrenceOptimizer(size=6, population_size=10, generations=5, random_state=3)
    return est.fit([0, 2, 3])


def test_params_roundtrip():
    est = ConcurrenceOptimizer(size=10, p_m=0.01)
    params = est.get_params()
    assert params["size"] == 10 and params["p_m"] == 0.01
    twin = clone(est).set_params(generations=7)
    assert twin.generations == 7 and est.generations == 150


def test_fit_predict_transform(fitted):
    np.testing.assert_array_equal(fitted.fillings_, [0, 2, 3])
    assert fitted.predict([0])[0] == 0.0
    pred = fitted.predict([3, 2])
    np.testing.assert_array_equal(pred, fitted.best_fitness_[[2, 1]])
    chroms = fitted.transform([3])
    assert chroms.shape == (1, 6)
    table = build_bond_table(LatticeSpec.chain(6, "periodic"))
    assert fitness(table, chroms[0], 3) == pytest.approx(pred[0], abs=1e-12)
    assert fitted.score([2, 3]) == pytest.approx(pred.mean())
    assert len(fitted.history_) == 3 * 5


def test_baseline_matches_known_value(fitted):
    assert fitted.baseline([3])[0] == pytest.approx(2 / 3 - 5 / 18, abs=1e-12)


def test_refit_is_deterministic(fitted):
    again = clone(fitted).fit([0, 2, 3])
    np.testing.assert_array_equal(again.best_chromosomes_, fitted.best_chromosomes_)


def test_errors(fitted):
    with pytest.raises(NotFittedError):
        ConcurrenceOptimizer().predict([1])
    with pytest.raises(ValueError, match="not optimized"):
        fitted.predict([1])
    with pytest.raises(ValueError):
        fitted.predict([7])
    with pytest.raises(ValueError):
        fitted.predict([1.5])


def test_bond_transformer_in_pipeline():
    table = build_bond_table(LatticeSpec.chain(2, "open"))
    X = np.random.default_rng(0).uniform(0.1, 5, (4, table.n_genes))
    pipe = make_pipeline(
        BondConcurrenceTransformer(size=2, boundary="open", filling=1),
        FunctionTransformer(np.mean, kw_args={"axis": 1}),
    )
    np.testing.assert_allclose(pipe.fit_transform(X), 1.0, atol=1e-12)


def test_bond_transformer_shapes():
    tr = BondConcurrenceTransformer(lattice="square", rows=3, cols=3, boundary="open", filling=4)
    X = np.ones((2, 12))
    out = tr.fit(X).transform(X)
    assert out.shape == (2, 12)
    assert np.all((out >= 0) & (out <= 1))
    with pytest.raises(ValueError):
        tr.transform(np.ones((2, 5)))
