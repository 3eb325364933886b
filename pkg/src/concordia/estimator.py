"""scikit-learn style front end.

:class:`ConcurrenceOptimizer` treats a list of band fillings as its input:
``fit`` evolves one optimal hopping pattern per filling, ``predict`` returns
the optimized nearest-neighbor concurrence, ``transform`` the optimized
chromosomes.

:class:`BondConcurrenceTransformer` maps chromosomes (one row per hopping
pattern) to the concurrence on every NN bond at a fixed filling, so hopping
patterns can be fed through ordinary sklearn pipelines.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .concurrence import batch_fitness, bond_concurrences
from .ga import GaConfig, resolve_threads, run_filling_sweep
from .lattice import build_bond_table, lattice_from_params


def _check_fillings(X, n_sites):
    if X is None:
        return np.arange(n_sites + 1)
    X = np.asarray(X)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if X.ndim != 1:
        raise ValueError(f"fillings must be 1-D, got shape {X.shape}")
    if X.size and not np.all(np.equal(np.mod(X, 1), 0)):
        raise ValueError("fillings must be integers")
    X = X.astype(int)
    if np.any(X < 0) or np.any(X > n_sites):
        raise ValueError(f"fillings must lie in [0, {n_sites}]")
    return X


class ConcurrenceOptimizer(BaseEstimator):
    """Genetic-algorithm maximizer of mean NN concurrence per filling.

    Parameters
    ----------
    lattice : {"chain", "square", "triangular"}
    size : int, optional
        Chain length, or side of a square grid when ``rows``/``cols`` are unset.
    rows, cols : int, optional
        Grid shape of 2D lattices.
    boundary : {"open", "periodic"}
    shells : {"nn", "nnn"}
    population_size, generations : int
    p_c, p_m : float
        Crossover and per-gene mutation probabilities.
    gene_min, gene_max : float
        Open interval for hopping magnitudes.
    selection : str
        ``"roulette"`` or ``"tournament:k"``.
    random_state : int
    n_threads : int, optional
        Fitness-evaluation threads; ``None`` defers to ``CONCORDIA_THREADS``.

    Attributes
    ----------
    bond_table_ : BondTable
    fillings_ : ndarray of int
    best_fitness_ : ndarray
        Optimized fitness for each entry of ``fillings_``.
    best_chromosomes_ : ndarray, shape (n_fillings, n_genes)
    history_ : list of GenerationStats
    """

    def __init__(self, lattice="chain", size=16, rows=None, cols=None, boundary="periodic",
                 shells="nn", population_size=100, generations=150, p_c=0.70, p_m=0.002,
                 gene_min=0.0, gene_max=5.0, selection="roulette", random_state=0,
                 n_threads=None):
        self.lattice = lattice
        self.size = size
        self.rows = rows
        self.cols = cols
        self.boundary = boundary
        self.shells = shells
        self.population_size = population_size
        self.generations = generations
        self.p_c = p_c
        self.p_m = p_m
        self.gene_min = gene_min
        self.gene_max = gene_max
        self.selection = selection
        self.random_state = random_state
        self.n_threads = n_threads

    def _lattice_spec(self):
        return lattice_from_params(self.lattice, self.size, self.rows, self.cols,
                                   self.boundary, self.shells)

    def _ga_config(self):
        return GaConfig(
            population_size=self.population_size, generations=self.generations,
            p_c=self.p_c, p_m=self.p_m, gene_min=self.gene_min, gene_max=self.gene_max,
            seed=self.random_state, selection=self.selection,
        )

    def fit(self, X=None, y=None):
        """Run the filling sweep over ``X`` (default: every filling)."""
        table = build_bond_table(self._lattice_spec())
        cfg = self._ga_config()
        fillings = _check_fillings(X, table.n_sites)
        result = run_filling_sweep(table, cfg, fillings.tolist(),
                                   n_threads=resolve_threads(self.n_threads))
        self.bond_table_ = table
        self.result_ = result
        self.fillings_ = np.array(sorted(result.best), dtype=int)
        self.best_fitness_ = np.array([result.best[K][0] for K in self.fillings_])
        self.best_chromosomes_ = np.array([result.best[K][1] for K in self.fillings_])
        self.history_ = result.log
        return self

    def _rows(self, X):
        check_is_fitted(self, "best_fitness_")
        X = _check_fillings(X, self.bond_table_.n_sites)
        lookup = {int(K): r for r, K in enumerate(self.fillings_)}
        missing = sorted({int(K) for K in X} - lookup.keys())
        if missing:
            raise ValueError(f"fillings {missing} were not optimized in fit")
        return np.array([lookup[int(K)] for K in X], dtype=int)

    def predict(self, X=None):
        """Optimized fitness for each filling in ``X``."""
        rows = self._rows(X)
        return self.best_fitness_[rows]

    def transform(self, X=None):
        """Optimized chromosome for each filling in ``X``."""
        rows = self._rows(X)
        return self.best_chromosomes_[rows]

    def score(self, X=None, y=None):
        """Mean optimized fitness over ``X``."""
        return float(np.mean(self.predict(X)))

    def baseline(self, X=None, t=1.0):
        """Fitness of the uniform hopping pattern ``t`` at each filling."""
        check_is_fitted(self, "bond_table_")
        table = self.bond_table_
        X = _check_fillings(X, table.n_sites)
        uniform = np.full((1, table.n_genes), float(t))
        return np.array([batch_fitness(table, uniform, int(K))[0] for K in X])


class BondConcurrenceTransformer(TransformerMixin, BaseEstimator):
    """Chromosomes -> concurrence on each NN bond of the ground state.

    Parameters
    ----------
    lattice, size, rows, cols, boundary, shells
        Lattice description, as for :class:`ConcurrenceOptimizer`.
    filling : int
        Number of fermions.
    """

    def __init__(self, lattice="chain", size=16, rows=None, cols=None, boundary="periodic",
                 shells="nn", filling=1):
        self.lattice = lattice
        self.size = size
        self.rows = rows
        self.cols = cols
        self.boundary = boundary
        self.shells = shells
        self.filling = filling

    def fit(self, X, y=None):
        table = build_bond_table(lattice_from_params(
            self.lattice, self.size, self.rows, self.cols, self.boundary, self.shells))
        X = check_array(X, dtype=float)
        if X.shape[1] != table.n_genes:
            raise ValueError(f"X has {X.shape[1]} columns, lattice has {table.n_genes} bonds")
        if not 0 <= self.filling <= table.n_sites:
            raise ValueError(f"filling {self.filling} outside [0, {table.n_sites}]")
        self.bond_table_ = table
        self.n_features_in_ = table.n_genes
        return self

    def transform(self, X):
        check_is_fitted(self, "bond_table_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        return np.array([bond_concurrences(self.bond_table_, row, int(self.filling)) for row in X])
