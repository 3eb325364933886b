"""Two-site entanglement of spinless-fermion Slater determinants.

The ground state of ``K`` fermions fills the ``K`` lowest one-body orbitals.
Its one-body density ``G[i, j] = <c_i^+ c_j>`` determines every two-site
correlator through Wick factorization::

    <n_i n_j> = G[i, i] G[j, j] - G[i, j]**2

Each site is a qubit (occupied = 1). The reduced density matrix of sites
``(i, j)`` in the basis ``|00>, |01>, |10>, |11>`` is::

    [[r11, 0,   0,   0  ],
     [0,   r22, r23, 0  ],
     [0,   r23, r33, 0  ],
     [0,   0,   0,   r44]]

and its concurrence is ``2 max(0, |r23| - sqrt(r11 r44))``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import NumericalError, check_chromosome, check_filling
from .lattice import BondTable
from .spectrum import Spectrum, assemble_batch, assemble_hamiltonian, diagonalize

# Products like r11*r44 may come out slightly negative from roundoff.
NEG_TOL = 1e-12

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)


class PairCorrelators(NamedTuple):
    """Ground-state averages for a site pair ``(i, j)``."""

    n_i: float
    n_j: float
    n_ij: float  # <n_i n_j>
    hop: float  # <c_j c_i^+>


@dataclass(frozen=True)
class PairDensityMatrix:
    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho23: float

    def __array__(self, dtype=None, copy=None):
        return np.array([self.rho11, self.rho22, self.rho33, self.rho44, self.rho23], dtype=dtype)

    def as_matrix(self) -> np.ndarray:
        return np.array([
            [self.rho11, 0.0, 0.0, 0.0],
            [0.0, self.rho22, self.rho23, 0.0],
            [0.0, self.rho23, self.rho33, 0.0],
            [0.0, 0.0, 0.0, self.rho44],
        ])

    def validate(self, atol=1e-10):
        diag = np.array([self.rho11, self.rho22, self.rho33, self.rho44])
        if np.any(diag < -atol) or np.any(diag > 1 + atol):
            raise ValueError(f"diagonal entries outside [0, 1]: {diag}")
        if abs(diag.sum() - 1.0) > atol:
            raise ValueError(f"trace is {diag.sum()}, expected 1")
        if self.rho22 * self.rho33 - self.rho23**2 < -NEG_TOL:
            raise ValueError("middle block is not positive semidefinite")
        return self


@dataclass(frozen=True)
class OneBodyDensity:
    """``G[i, j] = <c_i^+ c_j>`` for the ``K`` lowest orbitals.

    The occupied and empty orbital blocks are kept alongside ``G`` so that
    ``<n_i n_j>`` and ``<(1 - n_i)(1 - n_j)>`` can be formed as squared wedge
    norms instead of as differences of nearly equal products.
    """

    G: np.ndarray
    K: int
    occupied: np.ndarray = field(repr=False)
    empty: np.ndarray = field(repr=False)

    def __array__(self, dtype=None, copy=None):
        return self.G if dtype is None else self.G.astype(dtype)

    @property
    def n_sites(self) -> int:
        return self.G.shape[0]


def one_body_density(spectrum: Spectrum, K: int) -> OneBodyDensity:
    """Projector onto the ``K`` lowest orbitals, ``G = sum_k v_k v_k^T``."""
    vecs = np.asarray(spectrum.eigenvectors)
    K = check_filling(K, vecs.shape[0])
    occ = vecs[:, :K]
    n = vecs.shape[0]
    if K == 0 or K == n:  # exact projectors for the trivial bands
        G = np.zeros((n, n)) if K == 0 else np.eye(n)
    else:
        G = occ @ occ.T
    return OneBodyDensity(G, K, occ, vecs[:, K:])


def wedge_norm(a, b):
    """``|a ^ b| = sqrt(|a|^2 |b|^2 - (a.b)^2)`` along the last axis.

    Computed as ``|a|`` times the distance from ``b`` to the line through
    ``a``, which stays accurate when ``a`` and ``b`` are nearly parallel.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aa = np.einsum("...k,...k->...", a, a)
    ab = np.einsum("...k,...k->...", a, b)
    coef = np.divide(ab, aa, out=np.zeros_like(ab), where=aa > 0)
    resid = b - coef[..., None] * a
    return np.sqrt(aa) * np.linalg.norm(resid, axis=-1)


def _check_pair(n, i, j):
    if i == j:
        raise ValueError("pair correlators need two distinct sites")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"sites ({i}, {j}) outside [0, {n})")


def correlators(density, i: int, j: int) -> PairCorrelators:
    """``<n_i>, <n_j>, <n_i n_j>, <c_j c_i^+>`` by Wick factorization.

    ``density`` is a :class:`OneBodyDensity` or a bare ``G`` matrix.
    """
    G = np.asarray(density)
    _check_pair(G.shape[0], i, j)
    n_i, n_j, g = G[i, i], G[j, j], G[i, j]
    if isinstance(density, OneBodyDensity):
        n_ij = wedge_norm(density.occupied[i], density.occupied[j]) ** 2
    else:
        n_ij = n_i * n_j - g * g
    # c_j c_i^+ = -c_i^+ c_j for i != j
    return PairCorrelators(float(n_i), float(n_j), float(n_ij), float(-g))


def pair_rho_from_correlators(corr: PairCorrelators) -> PairDensityMatrix:
    n_i, n_j, n_ij, hop = corr
    return PairDensityMatrix(
        rho11=1.0 - n_i - n_j + n_ij,
        rho22=n_j - n_ij,
        rho33=n_i - n_ij,
        rho44=n_ij,
        rho23=hop,
    )


def pair_rho(density, i: int, j: int) -> PairDensityMatrix:
    """Reduced density matrix of sites ``i`` and ``j``."""
    rho = pair_rho_from_correlators(correlators(density, i, j))
    if isinstance(density, OneBodyDensity) and density.K in (0, density.n_sites):
        full = float(density.K > 0)
        return PairDensityMatrix(1.0 - full, 0.0, 0.0, full, 0.0)
    if isinstance(density, OneBodyDensity):
        # 1 - G = W W^T, so <(1-n_i)(1-n_j)> is a wedge norm of empty orbitals
        rho11 = wedge_norm(density.empty[i], density.empty[j]) ** 2
        rho = PairDensityMatrix(float(rho11), rho.rho22, rho.rho33, rho.rho44, rho.rho23)
    return rho


def _clamped_sqrt(x, what):
    if x < -NEG_TOL:
        raise NumericalError(f"{what} = {x:.3e} is negative beyond roundoff")
    return np.sqrt(max(x, 0.0))


def concurrence_closed(rho: PairDensityMatrix) -> float:
    """Concurrence from the X-shaped density matrix, closed form."""
    root = _clamped_sqrt(rho.rho11, "rho11") * _clamped_sqrt(rho.rho44, "rho44")
    c = 2.0 * (abs(rho.rho23) - root)
    return float(min(max(c, 0.0), 1.0))


def concurrence_spectral(rho: PairDensityMatrix) -> float:
    """Concurrence through the spin-flipped product ``rho @ rho_tilde``.

    The four square roots of the eigenvalues of ``rho @ rho_tilde`` are
    ``sqrt(r11 r44)`` (twice, from the corner entries) and
    ``|sqrt(r22 r33) -+ |r23||`` from the 2x2 middle block. The middle pair
    is taken in factored form, which keeps the small root accurate when
    ``r22 r33`` is close to ``r23**2``; the literal block is checked
    against it.
    """
    rho_a = rho.as_matrix()
    rho_tilde = (SPIN_FLIP @ rho_a.conj() @ SPIN_FLIP).real
    R = rho_a @ rho_tilde

    corner = [_clamped_sqrt(R[0, 0], "lambda_c"), _clamped_sqrt(R[3, 3], "lambda_d")]

    geo = _clamped_sqrt(rho.rho22 * rho.rho33, "rho22*rho33")
    off = abs(rho.rho23)
    lam_a, lam_b = (geo - off) ** 2, (geo + off) ** 2
    block = R[1:3, 1:3]
    scale = max(1.0, float(np.abs(block).max()))
    trace_err = abs(block[0, 0] + block[1, 1] - (lam_a + lam_b))
    prod_err = abs(block[0, 1] * block[1, 0] - ((lam_b - lam_a) / 2.0) ** 2)
    if trace_err > 1e-12 * scale or prod_err > 1e-12 * scale:
        raise NumericalError("middle block of rho*rho_tilde inconsistent with its roots")
    if abs(block[0, 0] - block[1, 1]) > 1e-12 * scale:
        raise NumericalError("middle block of rho*rho_tilde has unequal diagonal")

    roots = sorted([abs(geo - off), geo + off, *corner], reverse=True)
    c = roots[0] - roots[1] - roots[2] - roots[3]
    return float(min(max(c, 0.0), 1.0))


def wootters_concurrence(rho) -> float:
    """Concurrence of an arbitrary two-qubit density matrix.

    Uses the eigenvalues of the non-Hermitian ``rho @ rho_tilde`` directly.
    Small eigenvalues lose about half their digits under the square root,
    so expect agreement with the closed form only to ~1e-7.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got {rho.shape}")
    rho_tilde = SPIN_FLIP @ rho.conj() @ SPIN_FLIP
    lam = np.linalg.eigvals(rho @ rho_tilde).real
    roots = np.sort(np.sqrt(np.abs(lam)))[::-1]
    return float(max(0.0, roots[0] - roots[1:].sum()))


def bond_concurrences(table: BondTable, chrom, K: int, method="lapack") -> np.ndarray:
    """Concurrence on every NN bond, in bond-table order."""
    chrom = check_chromosome(chrom, table.n_genes)
    K = check_filling(K, table.n_sites)
    if K == 0 or K == table.n_sites:
        return np.zeros(table.n_nn)
    spec = diagonalize(assemble_hamiltonian(table, chrom), method=method)
    G = one_body_density(spec, K)
    return np.array([concurrence_closed(pair_rho(G, b.i, b.j)) for b in table.nn_bonds])


def fitness(table: BondTable, chrom, K: int, method="lapack") -> float:
    """Summed NN concurrence of the ``K``-fermion ground state per site."""
    return float(bond_concurrences(table, chrom, K, method=method).sum() / table.n_sites)


def _batch_fitness_chunk(table: BondTable, population: np.ndarray, K: int) -> np.ndarray:
    H = assemble_batch(table, population)
    try:
        _, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigh failed: {exc}") from exc
    mask = table.nn_mask
    ii, jj = table.i_index[mask], table.j_index[mask]
    occ_i, occ_j = V[:, ii, :K], V[:, jj, :K]
    g = np.einsum("pbk,pbk->pb", occ_i, occ_j)
    root44 = wedge_norm(occ_i, occ_j)
    root11 = wedge_norm(V[:, ii, K:], V[:, jj, K:])
    c = 2.0 * (np.abs(g) - root11 * root44)
    c = np.clip(c, 0.0, 1.0)
    return c.sum(axis=1) / table.n_sites


def batch_fitness(table: BondTable, population, K: int, n_threads: int = 1) -> np.ndarray:
    """Fitness of every row of ``population``.

    Rows are split into at most ``n_threads`` contiguous chunks evaluated
    concurrently; results are concatenated in row order, and each row is
    computed independently, so the output does not depend on ``n_threads``.
    """
    population = np.asarray(population, dtype=float)
    if population.ndim != 2 or population.shape[1] != table.n_genes:
        raise ValueError(f"population must have shape (n, {table.n_genes})")
    K = check_filling(K, table.n_sites)
    if K == 0 or K == table.n_sites:
        return np.zeros(population.shape[0])
    n_threads = max(1, min(int(n_threads), population.shape[0]))
    if n_threads == 1:
        return _batch_fitness_chunk(table, population, K)
    chunks = np.array_split(population, n_threads)
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        parts = list(pool.map(lambda p: _batch_fitness_chunk(table, p, K), chunks))
    return np.concatenate(parts)
