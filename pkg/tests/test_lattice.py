import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from concordia.lattice import (
    LatticeSpec, Shell, build_bond_table, chain_bond_order, lattice_from_params,
    site_coords, site_index,
)


@pytest.mark.parametrize("spec, n_bonds", [
    (LatticeSpec.chain(44, "open"), 43),
    (LatticeSpec.chain(24, "periodic"), 24),
    (LatticeSpec.square(7, 7, "periodic"), 98),
    (LatticeSpec.triangular(7, 7, "periodic"), 147),
    (LatticeSpec.chain(24, "periodic", "nnn"), 48),
])
def test_bond_counts(spec, n_bonds):
    assert build_bond_table(spec).n_genes == n_bonds


def _brute_force_pairs(spec, shell):
    """All site pairs whose wrapped displacement is a neighbor step, by exhaustive search."""
    rows, cols = spec.grid
    steps = {
        ("chain", "nn"): {(0, 1)}, ("chain", "nnn"): {(0, 2)},
        ("square", "nn"): {(0, 1), (1, 0)}, ("square", "nnn"): {(1, 1), (1, -1)},
        ("triangular", "nn"): {(0, 1), (1, 0), (1, 1)},
        ("triangular", "nnn"): {(1, -1), (1, 2), (2, 1)},
    }[(spec.kind.value, shell)]
    steps |= {(-a, -b) for a, b in steps}
    pairs = set()
    n = rows * cols
    for a in range(n):
        for b in range(a + 1, n):
            (ra, ca), (rb, cb) = divmod(a, cols), divmod(b, cols)
            for dr, dc in steps:
                r2, c2 = ra + dr, ca + dc
                if spec.periodic:
                    r2, c2 = r2 % rows, c2 % cols
                if (r2, c2) == (rb, cb):
                    pairs.add((a, b))
    return pairs


@pytest.mark.parametrize("spec", [
    LatticeSpec.square(7, 7, "periodic", "nnn"),
    LatticeSpec.triangular(7, 7, "periodic", "nnn"),
    LatticeSpec.triangular(4, 5, "open", "nnn"),
    LatticeSpec.chain(9, "periodic", "nnn"),
])
def test_bonds_match_exhaustive_enumeration(spec):
    table = build_bond_table(spec)
    for shell in ("nn", "nnn"):
        got = {(b.i, b.j) for b in table.bonds if b.shell is Shell(shell)}
        assert got == _brute_force_pairs(spec, shell)


@pytest.mark.parametrize("spec, degree", [
    (LatticeSpec.chain(10, "periodic"), 2),
    (LatticeSpec.square(5, 4, "periodic"), 4),
    (LatticeSpec.triangular(4, 4, "periodic"), 6),
])
def test_periodic_degree(spec, degree):
    table = build_bond_table(spec)
    assert np.all(table.degrees("nn") == degree)
    open_table = build_bond_table(LatticeSpec(spec.kind, spec.extent, "open"))
    deg = open_table.degrees("nn")
    assert deg.max() == degree and deg.min() < degree


lattice_specs = st.one_of(
    st.builds(LatticeSpec.chain, st.integers(5, 30), st.sampled_from(["open", "periodic"]),
              st.sampled_from(["nn", "nnn"])),
    st.builds(LatticeSpec.square, st.integers(3, 7), st.integers(3, 7),
              st.sampled_from(["open", "periodic"]), st.sampled_from(["nn", "nnn"])),
    st.builds(LatticeSpec.triangular, st.integers(4, 7), st.integers(4, 7),
              st.sampled_from(["open", "periodic"]), st.sampled_from(["nn", "nnn"])),
)


@settings(max_examples=60, deadline=None)
@given(lattice_specs)
def test_bond_table_invariants(spec):
    table = build_bond_table(spec)
    pairs = [(b.i, b.j) for b in table.bonds]
    assert all(0 <= i < j < table.n_sites for i, j in pairs)
    assert len(set(pairs)) == len(pairs)  # also rules out a pair in both shells
    for shell in Shell:
        n = sum(b.shell is shell for b in table.bonds)
        assert table.degrees(shell).sum() == 2 * n
    # NN first, each shell sorted
    keys = [(b.shell is Shell.NNN, b.i, b.j) for b in table.bonds]
    assert keys == sorted(keys)
    assert build_bond_table(spec) == table


@settings(max_examples=30, deadline=None)
@given(lattice_specs)
def test_nn_table_is_prefix_of_nnn_table(spec):
    nn = build_bond_table(spec.with_shells("nn"))
    full = build_bond_table(spec.with_shells("nnn"))
    assert full.bonds[: nn.n_genes] == nn.bonds


def test_site_index_examples():
    spec = LatticeSpec.square(7, 7)
    assert site_index(0, 0, spec) == 0
    assert site_index(6, 6, spec) == 48
    assert site_index(1, 2, spec) == 9
    assert site_coords(9, spec) == (1, 2)
    with pytest.raises(IndexError):
        site_index(7, 0, spec)


@pytest.mark.parametrize("make", [
    lambda: LatticeSpec.chain(1),
    lambda: LatticeSpec.chain(2, "periodic"),
    lambda: LatticeSpec.square(1, 5),
    lambda: LatticeSpec(kind="chain", extent=(3, 3)),
    lambda: LatticeSpec.chain(4, "sideways"),
    lambda: build_bond_table(LatticeSpec.chain(4, "periodic", "nnn")),
    lambda: build_bond_table(LatticeSpec.square(2, 4, "periodic")),
    lambda: build_bond_table(LatticeSpec.triangular(3, 5, "periodic", "nnn")),
])
def test_invalid_lattices_rejected(make):
    with pytest.raises(ValueError):
        make()


def test_chain_bond_order_follows_ring():
    table = build_bond_table(LatticeSpec.chain(6, "periodic"))
    order = chain_bond_order(table)
    links = [(table.bonds[g].i, table.bonds[g].j) for g in order]
    assert links == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]
    with pytest.raises(ValueError):
        chain_bond_order(build_bond_table(LatticeSpec.square(3, 3)))


def test_lattice_from_params():
    assert lattice_from_params("square", size=4).extent == (4, 4)
    assert lattice_from_params("triangular", rows=3, cols=5).extent == (3, 5)
    with pytest.raises(ValueError):
        lattice_from_params("square", rows=3)
