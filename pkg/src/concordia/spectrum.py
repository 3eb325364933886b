"""One-body hopping Hamiltonian and its dense symmetric eigendecomposition.

``H[i, j] = H[j, i] = -t_b`` for every bond ``b = (i, j)``; the diagonal is
zero. Two eigensolvers are available:

``"lapack"``
    ``numpy.linalg.eigh`` (LAPACK ``syevd``). Used in the optimizer hot loop.
``"householder"``
    Householder reduction to tridiagonal form followed by implicit-shift QL
    iteration, written out here. Slower, but independent of LAPACK, and
    reports non-convergence explicitly.

Both return eigenvalues in ascending order and apply the same sign
convention: the first non-negligible component of every eigenvector is
positive.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ._validation import NumericalError, check_chromosome, check_population, check_symmetric
from .lattice import BondTable

# Off-diagonal decay tolerance and QL sweep cap per eigenvalue.
QL_TOL = 1e-12
QL_MAX_SWEEPS = 50


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def assemble_hamiltonian(table: BondTable, chrom) -> np.ndarray:
    """Dense hopping matrix for one chromosome."""
    chrom = check_chromosome(chrom, table.n_genes)
    H = np.zeros((table.n_sites, table.n_sites))
    H[table.i_index, table.j_index] = -chrom
    H[table.j_index, table.i_index] = -chrom
    return H


def assemble_batch(table: BondTable, population) -> np.ndarray:
    """Stack of hopping matrices, shape ``(n_chromosomes, n_sites, n_sites)``."""
    population = check_population(population, table.n_genes)
    n = table.n_sites
    H = np.zeros((population.shape[0], n, n))
    H[:, table.i_index, table.j_index] = -population
    H[:, table.j_index, table.i_index] = -population
    return H


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the first non-negligible entry of each is positive.

    Works on a single ``(n, n)`` matrix or a stack ``(..., n, n)``.
    """
    mag = np.abs(vectors)
    thresh = 1e-10 * mag.max(axis=-2, keepdims=True)
    first = np.argmax(mag > thresh, axis=-2)
    lead = np.take_along_axis(vectors, first[..., None, :], axis=-2)
    sign = np.where(lead < 0, -1.0, 1.0)
    return vectors * sign


def householder_tridiagonalize(A):
    """Reduce a symmetric matrix to tridiagonal form, ``A = Q T Q^T``.

    Returns
    -------
    d : ndarray
        Diagonal of ``T``.
    e : ndarray
        Sub-diagonal of ``T`` (length ``n - 1``).
    Q : ndarray
        Orthogonal matrix of accumulated reflections.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    Q = np.eye(n)
    for k in range(n - 2):
        x = A[k + 1:, k]
        sigma = np.linalg.norm(x)
        if sigma == 0.0:
            continue
        alpha = -math.copysign(sigma, x[0])
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        # A <- P A P with P = I - 2 v v^T acting on rows/cols k+1..n-1
        sub = A[k + 1:, k:]
        sub -= 2.0 * np.outer(v, v @ sub)
        sub = A[k:, k + 1:]
        sub -= 2.0 * np.outer(sub @ v, v)
        Qs = Q[:, k + 1:]
        Qs -= 2.0 * np.outer(Qs @ v, v)
    d = np.diag(A).copy()
    e = np.diag(A, -1).copy()
    return d, e, Q


def tridiagonal_ql(d, e, Z=None, tol=QL_TOL, max_sweeps=QL_MAX_SWEEPS):
    """Implicit-shift QL iteration on a symmetric tridiagonal matrix.

    ``d`` and ``e`` are the diagonal and sub-diagonal. If ``Z`` is given the
    plane rotations are accumulated into its columns, so passing the ``Q``
    from :func:`householder_tridiagonalize` yields eigenvectors of the
    original matrix. Eigenvalues come back unsorted.

    Raises
    ------
    NumericalError
        If an eigenvalue needs more than ``max_sweeps`` sweeps.
    """
    d = np.array(d, dtype=float)
    n = d.shape[0]
    e = np.append(np.asarray(e, dtype=float), 0.0)
    Z = np.eye(n) if Z is None else np.array(Z, dtype=float)

    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= tol * dd or abs(e[m]) <= np.finfo(float).tiny:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise NumericalError(
                    f"QL iteration did not converge for eigenvalue {l} "
                    f"after {max_sweeps} sweeps"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = Z[:, i].copy()
                Z[:, i] = c * zi - s * Z[:, i + 1]
                Z[:, i + 1] = s * zi + c * Z[:, i + 1]
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, Z


def _check_spectrum(H, w, V):
    n = H.shape[0]
    scale = max(1.0, float(np.abs(H).sum(axis=1).max(initial=0.0)))
    resid = np.abs(H @ V - V * w).max(initial=0.0)
    if resid > 1e-10 * scale:
        raise NumericalError(f"eigenpair residual {resid:.3e} exceeds tolerance")
    ortho = np.abs(V.T @ V - np.eye(n)).max(initial=0.0)
    if ortho > 1e-10:
        raise NumericalError(f"eigenvectors not orthonormal (error {ortho:.3e})")


def diagonalize(H, method="lapack", check=True) -> Spectrum:
    """Full eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    H : array_like, shape (n, n)
    method : {"lapack", "householder"}
    check : bool
        Verify residual and orthonormality to ``1e-10`` before returning.

    Returns
    -------
    Spectrum
        Ascending eigenvalues and column eigenvectors.
    """
    H = check_symmetric(H)
    if method == "lapack":
        try:
            w, V = np.linalg.eigh(H)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigh failed: {exc}") from exc
    elif method == "householder":
        d, e, Q = householder_tridiagonalize(H)
        w, V = tridiagonal_ql(d, e, Q)
        order = np.argsort(w, kind="stable")
        w, V = w[order], V[:, order]
    else:
        raise ValueError(f"unknown method {method!r}")
    V = fix_signs(V)
    if check:
        _check_spectrum(H, w, V)
    return Spectrum(w, V)


def diagonalize_batch(H) -> Spectrum:
    """Eigendecomposition of a stack of symmetric matrices (LAPACK, unchecked)."""
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigh failed: {exc}") from exc
    return Spectrum(w, fix_signs(V))
