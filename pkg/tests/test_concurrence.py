import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from concordia.concurrence import (
    PairDensityMatrix, batch_fitness, bond_concurrences, concurrence_closed,
    concurrence_spectral, correlators, fitness, one_body_density, pair_rho,
    wootters_concurrence,
)
from concordia.lattice import LatticeSpec, build_bond_table
from concordia.spectrum import assemble_hamiltonian, diagonalize
from concordia.verify import random_slater_pair_density, random_x_state

BELL = PairDensityMatrix(0.0, 0.5, 0.5, 0.0, -0.5)


def density(spec, chrom, K):
    table = build_bond_table(spec)
    return one_body_density(diagonalize(assemble_hamiltonian(table, chrom)), K)


@pytest.fixture
def ring6():
    return density(LatticeSpec.chain(6, "periodic"), np.ones(6), 3)


def test_empty_band_density_is_zero():
    G = density(LatticeSpec.chain(5), np.ones(4), 0)
    np.testing.assert_array_equal(np.asarray(G), 0.0)


def test_two_site_density():
    G = density(LatticeSpec.chain(2), [1.3], 1)
    np.testing.assert_allclose(np.asarray(G), [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_ring6_density(ring6):
    G = np.asarray(ring6)
    np.testing.assert_allclose(np.diag(G), 0.5, atol=1e-14)
    for i in range(6):
        assert G[i, (i + 1) % 6] == pytest.approx(1 / 3, abs=1e-14)
        assert G[i, (i - 1) % 6] == pytest.approx(1 / 3, abs=1e-14)


def test_two_site_pair_rho():
    rho = pair_rho(density(LatticeSpec.chain(2), [0.7], 1), 0, 1)
    np.testing.assert_allclose(rho, [0, 0.5, 0.5, 0, -0.5], atol=1e-15)


def test_vacuum_pair_rho():
    rho = pair_rho(density(LatticeSpec.square(3, 3), np.ones(12), 0), 0, 4)
    np.testing.assert_array_equal(rho, [1, 0, 0, 0, 0])


def test_ring6_pair_rho(ring6):
    rho = pair_rho(ring6, 2, 3)
    assert rho.rho44 == pytest.approx(1 / 4 - 1 / 9, abs=1e-14)
    assert rho.rho11 == pytest.approx(rho.rho44, abs=1e-14)
    assert rho.rho23 == pytest.approx(-1 / 3, abs=1e-14)


def test_concurrence_examples(ring6):
    assert concurrence_closed(BELL) == pytest.approx(1.0, abs=1e-15)
    assert concurrence_spectral(BELL) == pytest.approx(1.0, abs=1e-15)
    assert concurrence_closed(PairDensityMatrix(0.1, 0.2, 0.3, 0.4, 0.0)) == 0.0
    assert concurrence_spectral(PairDensityMatrix(0.25, 0.25, 0.25, 0.25, 0.0)) == 0.0
    expected = 2 * (1 / 3 - (1 / 4 - 1 / 9))
    assert concurrence_closed(pair_rho(ring6, 0, 1)) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.3889, abs=1e-4)


def test_fitness_examples():
    two = build_bond_table(LatticeSpec.chain(2))
    assert fitness(two, [1.0], 1) == pytest.approx(0.5, abs=1e-15)
    ring = build_bond_table(LatticeSpec.chain(6, "periodic"))
    assert fitness(ring, np.ones(6), 3) == pytest.approx(2 / 3 - 5 / 18, abs=1e-14)
    sq = build_bond_table(LatticeSpec.square(3, 3, "periodic"))
    chrom = np.random.default_rng(0).uniform(0.1, 5, sq.n_genes)
    assert fitness(sq, chrom, 0) == 0.0
    assert fitness(sq, chrom, 9) == 0.0


def test_ring_bonds_equal_by_translation():
    ring = build_bond_table(LatticeSpec.chain(6, "periodic"))
    c = bond_concurrences(ring, np.ones(6), 3)
    np.testing.assert_allclose(c, c[0], atol=1e-13)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_route_equivalence_slater(seed):
    rho = random_slater_pair_density(np.random.default_rng(seed))
    assert abs(concurrence_closed(rho) - concurrence_spectral(rho)) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_route_equivalence_generic_x_state(seed):
    rho = random_x_state(np.random.default_rng(seed))
    c = concurrence_closed(rho)
    assert abs(c - concurrence_spectral(rho)) <= 1e-12
    # independent route through numpy's general eigenvalue solver
    assert abs(c - wootters_concurrence(rho.as_matrix())) <= 1e-6


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["chain", "square", "triangular"]))
def test_density_and_rho_invariants(seed, kind):
    rng = np.random.default_rng(seed)
    spec = {"chain": LatticeSpec.chain(9, "periodic"), "square": LatticeSpec.square(3, 4),
            "triangular": LatticeSpec.triangular(3, 3, "open", "nnn")}[kind]
    table = build_bond_table(spec)
    K = int(rng.integers(0, table.n_sites + 1))
    G = density(spec, rng.uniform(0.01, 5, table.n_genes), K)
    Gm = np.asarray(G)
    np.testing.assert_allclose(Gm, Gm.T, atol=1e-14)
    assert np.abs(Gm @ Gm - Gm).max() <= 1e-10
    assert abs(np.trace(Gm) - K) <= 1e-10
    assert np.all((np.diag(Gm) >= -1e-12) & (np.diag(Gm) <= 1 + 1e-12))
    for b in table.bonds:
        rho = pair_rho(G, b.i, b.j)
        diag = np.asarray(rho)[:4]
        assert np.all((diag >= 0) & (diag <= 1 + 1e-12))
        assert abs(diag.sum() - 1) <= 1e-10
        assert rho.rho22 * rho.rho33 - rho.rho23**2 >= -1e-12
        assert 0.0 <= concurrence_closed(rho) <= 1.0


def test_correlators_accept_plain_matrix(ring6):
    fast = correlators(ring6, 1, 2)
    plain = correlators(np.asarray(ring6), 1, 2)
    np.testing.assert_allclose(fast, plain, atol=1e-14)


BIPARTITE = [
    LatticeSpec.chain(10, "periodic"),
    LatticeSpec.chain(10, "open"),
    LatticeSpec.chain(7, "open"),
    LatticeSpec.square(4, 4, "periodic"),
    LatticeSpec.square(3, 5, "open"),
]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(BIPARTITE))
def test_electron_hole_symmetry(seed, spec):
    table = build_bond_table(spec)
    chrom = np.random.default_rng(seed).uniform(0.01, 5, (1, table.n_genes))
    N = table.n_sites
    f = np.array([batch_fitness(table, chrom, K)[0] for K in range(N + 1)])
    np.testing.assert_allclose(f, f[::-1], atol=1e-9)


def test_batch_matches_single_and_is_thread_invariant():
    table = build_bond_table(LatticeSpec.triangular(3, 4, "periodic"))
    pop = np.random.default_rng(3).uniform(0.01, 5, (23, table.n_genes))
    for K in (1, 5, 11):
        single = np.array([fitness(table, c, K) for c in pop])
        one = batch_fitness(table, pop, K, n_threads=1)
        np.testing.assert_allclose(one, single, atol=1e-12)
        np.testing.assert_array_equal(batch_fitness(table, pop, K, n_threads=4), one)


def test_householder_route_fitness():
    table = build_bond_table(LatticeSpec.chain(8, "periodic"))
    chrom = np.random.default_rng(9).uniform(0.5, 5, 8)
    assert fitness(table, chrom, 3, method="householder") == pytest.approx(
        fitness(table, chrom, 3), abs=1e-12)


def test_invalid_inputs():
    table = build_bond_table(LatticeSpec.chain(4))
    with pytest.raises(ValueError):
        fitness(table, [1, 1, 1], 5)
    with pytest.raises(ValueError):
        fitness(table, [1, 1], 2)
    with pytest.raises(ValueError):
        pair_rho(np.eye(3), 1, 1)
    with pytest.raises(ValueError):
        PairDensityMatrix(0.5, 0.5, 0.5, 0.5, 0.0).validate()
