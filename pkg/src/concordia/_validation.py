"""Input checks shared by the public entry points."""
import numbers

import numpy as np


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge or broke an internal invariant."""


def check_chromosome(chrom, n_genes, gene_min=None, gene_max=None):
    """Return ``chrom`` as a 1-D float array of length ``n_genes``.

    If bounds are given, every gene must lie strictly inside them.
    """
    chrom = np.asarray(chrom, dtype=float)
    if chrom.ndim != 1:
        raise ValueError(f"chromosome must be 1-D, got shape {chrom.shape}")
    if chrom.shape[0] != n_genes:
        raise ValueError(f"chromosome has {chrom.shape[0]} genes, bond table has {n_genes}")
    if not np.all(np.isfinite(chrom)):
        raise ValueError("chromosome contains non-finite genes")
    if gene_min is not None and gene_max is not None:
        if np.any(chrom <= gene_min) or np.any(chrom >= gene_max):
            raise ValueError(f"genes must lie in the open interval ({gene_min}, {gene_max})")
    return chrom


def check_population(population, n_genes):
    population = np.asarray(population, dtype=float)
    if population.ndim != 2 or population.shape[1] != n_genes:
        raise ValueError(
            f"population must have shape (n, {n_genes}), got {population.shape}"
        )
    if population.shape[0] == 0:
        raise ValueError("population is empty")
    return population


def check_filling(K, n_sites):
    if not isinstance(K, numbers.Integral) or isinstance(K, bool):
        raise TypeError(f"filling must be an integer, got {K!r}")
    if not 0 <= K <= n_sites:
        raise ValueError(f"filling K={K} outside [0, {n_sites}]")
    return int(K)


def check_symmetric(H, atol=1e-12):
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.abs(H).max(initial=0.0)))
    if np.abs(H - H.T).max(initial=0.0) > atol * scale:
        raise ValueError("matrix is not symmetric")
    return H
