"""Brute-force references for testing the one-body machinery.

Nothing here is used by the optimizer. The many-body ground state is built
directly in the fixed-particle-number occupation basis, so every correlator
computed from it is independent of the Slater-determinant shortcuts in
:mod:`concordia.concurrence`.

Basis states are bit masks; bit ``k`` set means site ``k`` is occupied.
Operators are ordered by ascending site index, so ``c_k`` acting on a mask
picks up ``(-1)`` to the number of occupied sites below ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._validation import check_chromosome, check_filling
from .concurrence import PairCorrelators, PairDensityMatrix
from .lattice import BondTable

MAX_SITES = 16
DENSE_LIMIT = 5000
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class FockBasis:
    n_sites: int
    K: int
    states: np.ndarray  # ascending masks, int64

    @classmethod
    def build(cls, n_sites: int, K: int) -> "FockBasis":
        if n_sites > MAX_SITES:
            raise ValueError(f"Fock oracle is capped at {MAX_SITES} sites, got {n_sites}")
        K = check_filling(K, n_sites)
        masks = sorted(sum(1 << s for s in occ) for occ in combinations(range(n_sites), K))
        return cls(n_sites, K, np.array(masks, dtype=np.int64))

    def __len__(self):
        return len(self.states)

    def index(self, masks) -> np.ndarray:
        idx = np.searchsorted(self.states, masks)
        idx = np.minimum(idx, len(self.states) - 1)
        if not np.all(self.states[idx] == masks):
            raise KeyError("mask outside the basis")
        return idx


@dataclass(frozen=True)
class ManyBodyGroundState:
    basis: FockBasis
    energy: float
    amplitudes: np.ndarray
    gap: float  # to the first excited state in the sector; inf if the sector is 1-D

    @property
    def degenerate(self) -> bool:
        return self.gap < DEGENERACY_TOL


def _popcount(x):
    return np.bitwise_count(np.asarray(x, dtype=np.int64)).astype(np.int64)


def _occupied(masks, site):
    return (masks >> site) & 1 == 1


def annihilate(masks, site):
    """Apply ``c_site``; returns ``(new_masks, signs, valid)``."""
    masks = np.asarray(masks, dtype=np.int64)
    valid = _occupied(masks, site)
    sign = 1 - 2 * (_popcount(masks & ((1 << site) - 1)) & 1)
    return masks & ~np.int64(1 << site), np.where(valid, sign, 0), valid


def create(masks, site):
    """Apply ``c_site^+``; returns ``(new_masks, signs, valid)``."""
    masks = np.asarray(masks, dtype=np.int64)
    valid = ~_occupied(masks, site)
    sign = 1 - 2 * (_popcount(masks & ((1 << site) - 1)) & 1)
    return masks | np.int64(1 << site), np.where(valid, sign, 0), valid


def many_body_hamiltonian(table: BondTable, chrom, K: int) -> tuple[FockBasis, sp.csr_matrix]:
    """``-sum_b t_b (c_i^+ c_j + c_j^+ c_i)`` in the ``K``-particle sector."""
    chrom = check_chromosome(chrom, table.n_genes)
    basis = FockBasis.build(table.n_sites, K)
    states = basis.states
    rows, cols, vals = [], [], []
    for bond, t in zip(table.bonds, chrom):
        i, j = bond.i, bond.j  # i < j
        between = ((1 << j) - 1) & ~((1 << (i + 1)) - 1)
        parity = 1 - 2 * (_popcount(states & between) & 1)
        for src, dst in ((j, i), (i, j)):
            ok = _occupied(states, src) & ~_occupied(states, dst)
            if not ok.any():
                continue
            new = states[ok] ^ np.int64((1 << src) | (1 << dst))
            rows.append(basis.index(new))
            cols.append(np.nonzero(ok)[0])
            vals.append(-t * parity[ok])
    dim = len(basis)
    if rows:
        H = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
        )
    else:
        H = sp.csr_matrix((dim, dim))
    return basis, H


def fock_ground_state(table: BondTable, chrom, K: int) -> ManyBodyGroundState:
    """Lowest eigenpair of the many-body hopping Hamiltonian.

    Dense diagonalization up to ``DENSE_LIMIT`` basis states, Lanczos
    (``eigsh``) above that.
    """
    if table.n_sites > MAX_SITES:
        raise ValueError(f"Fock oracle is capped at {MAX_SITES} sites, got {table.n_sites}")
    basis, H = many_body_hamiltonian(table, chrom, K)
    dim = len(basis)
    if dim <= DENSE_LIMIT:
        w, V = np.linalg.eigh(H.toarray())
    else:
        w, V = spla.eigsh(H, k=2, which="SA", tol=1e-14)
        order = np.argsort(w)
        w, V = w[order], V[:, order]
    psi = V[:, 0]
    lead = np.argmax(np.abs(psi) > 1e-8)
    if psi[lead] < 0:
        psi = -psi
    gap = float(w[1] - w[0]) if dim > 1 else float("inf")
    return ManyBodyGroundState(basis, float(w[0]), psi, gap)


def _expect_number(state: ManyBodyGroundState, site: int) -> float:
    occ = _occupied(state.basis.states, site)
    return float(np.sum(state.amplitudes[occ] ** 2))


def fock_correlators(state: ManyBodyGroundState, i: int, j: int) -> PairCorrelators:
    """``<n_i>, <n_j>, <n_i n_j>`` and ``<c_j c_i^+>`` by direct summation."""
    n = state.basis.n_sites
    if i == j:
        raise ValueError("pair correlators need two distinct sites")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"sites ({i}, {j}) outside [0, {n})")
    states, psi = state.basis.states, state.amplitudes
    both = _occupied(states, i) & _occupied(states, j)
    n_ij = float(np.sum(psi[both] ** 2))

    # <psi| c_j c_i^+ |psi>
    m1, s1, ok1 = create(states, i)
    m2, s2, ok2 = annihilate(m1, j)
    ok = ok1 & ok2
    hop = 0.0
    if ok.any():
        target = state.basis.index(m2[ok])
        hop = float(np.sum(psi[target] * (s1 * s2)[ok] * psi[ok]))
    return PairCorrelators(_expect_number(state, i), _expect_number(state, j), n_ij, hop)


def fock_pair_rho(state: ManyBodyGroundState, i: int, j: int) -> PairDensityMatrix:
    """Pair density with every diagonal entry summed over its own basis states.

    ``rho11`` sums ``|psi|^2`` over states with both sites empty, and so on,
    so entries that vanish structurally (e.g. ``rho44`` with one particle)
    come out exactly zero.
    """
    corr = fock_correlators(state, i, j)
    states, psi = state.basis.states, state.amplitudes
    occ_i, occ_j = _occupied(states, i), _occupied(states, j)
    weight = psi**2
    return PairDensityMatrix(
        rho11=float(weight[~occ_i & ~occ_j].sum()),
        rho22=float(weight[~occ_i & occ_j].sum()),
        rho33=float(weight[occ_i & ~occ_j].sum()),
        rho44=float(weight[occ_i & occ_j].sum()),
        rho23=corr.hop,
    )


def fock_reduced_density_matrix(state: ManyBodyGroundState, i: int, j: int) -> np.ndarray:
    """Full 4x4 reduced density matrix of sites ``i, j`` by partial trace.

    Basis index ``2 n_i + n_j``. The ``|01><10|`` coherence of a fermionic
    pair carries ``-(-1)**(occupied sites strictly between i and j)``, which
    makes the matrix agree with the operator averages of
    :func:`fock_correlators`.
    """
    states, psi = state.basis.states, state.amplitudes
    lo, hi = min(i, j), max(i, j)
    between = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
    a = 2 * _occupied(states, i).astype(int) + _occupied(states, j).astype(int)
    env = states & ~np.int64((1 << i) | (1 << j))
    phase = -(1 - 2 * (_popcount(env & between) & 1))

    groups: dict[int, dict[int, float]] = {}
    env_phase: dict[int, int] = {}
    for idx in range(len(states)):
        key = int(env[idx])
        groups.setdefault(key, {})[int(a[idx])] = psi[idx]
        env_phase[key] = int(phase[idx])
    rho = np.zeros((4, 4))
    for key, comps in groups.items():
        for x, px in comps.items():
            for y, py in comps.items():
                rho[x, y] += px * py * (1 if x == y else env_phase[key])
    return rho


def analytic_ring_eigenvalues(N: int, t: float = 1.0) -> np.ndarray:
    """``-2 t cos(2 pi k / N)`` for ``k = 1..N``, ascending."""
    if N < 3:
        raise ValueError("ring needs at least 3 sites")
    if t <= 0:
        raise ValueError("hopping must be positive")
    k = np.arange(1, N + 1)
    return np.sort(-2.0 * t * np.cos(2.0 * np.pi * k / N))


def basis_size(n_sites: int, K: int) -> int:
    return comb(n_sites, K)
