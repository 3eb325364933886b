"""Randomized cross-checks of the fast paths against independent references."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .concurrence import (
    PairDensityMatrix,
    batch_fitness,
    concurrence_closed,
    concurrence_spectral,
    correlators,
    one_body_density,
    pair_rho,
)
from .lattice import LatticeSpec, build_bond_table
from .oracle import (DEGENERACY_TOL, analytic_ring_eigenvalues, fock_correlators, fock_ground_state,
                     fock_pair_rho)
from .spectrum import Spectrum, assemble_hamiltonian, diagonalize

WICK_TOL = 1e-10
ROUTE_TOL = 1e-12
RING_TOL = 1e-10
SYMMETRY_TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    n_checks: int
    max_error: float
    tolerance: float
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.n_checks > 0 and self.max_error <= self.tolerance


def oracle_lattices(max_sites=10):
    """Small lattices the Fock oracle can handle, chains and square grids."""
    specs = []
    for n in range(4, max_sites + 1, 2):
        specs.append(LatticeSpec.chain(n, "open"))
        specs.append(LatticeSpec.chain(n, "periodic"))
    for rows, cols in [(2, 2), (2, 3), (2, 4), (3, 3), (2, 5), (3, 4), (2, 6)]:
        if rows * cols <= max_sites:
            specs.append(LatticeSpec.square(rows, cols, "open"))
    if max_sites >= 9:
        specs.append(LatticeSpec.square(3, 3, "periodic"))
    if max_sites >= 12:
        specs.append(LatticeSpec.square(3, 4, "periodic"))
    return specs


def fermi_gap(eigenvalues, K):
    """Gap between the highest occupied and lowest empty orbital."""
    if K == 0 or K == len(eigenvalues):
        return np.inf
    return float(eigenvalues[K] - eigenvalues[K - 1])


def wick_vs_fock(table, chrom, K, correlator_fn=correlators):
    """Largest disagreement over all NN pairs, or ``None`` if degenerate."""
    spec = diagonalize(assemble_hamiltonian(table, chrom))
    if fermi_gap(spec.eigenvalues, K) < DEGENERACY_TOL:
        return None
    state = fock_ground_state(table, chrom, K)
    if state.degenerate:
        return None
    G = one_body_density(spec, K)
    err = abs(state.energy - spec.eigenvalues[:K].sum())
    for b in table.nn_bonds:
        fast = correlator_fn(G, b.i, b.j)
        ref = fock_correlators(state, b.i, b.j)
        err = max(err, float(np.max(np.abs(np.subtract(fast, ref)))))
        c_fast = concurrence_closed(pair_rho(G, b.i, b.j))
        c_ref = concurrence_closed(fock_pair_rho(state, b.i, b.j))
        err = max(err, abs(c_fast - c_ref))
    return err


def random_slater_pair_density(rng, n_max=12) -> PairDensityMatrix:
    """Pair density of a random Slater determinant on a random site pair."""
    n = int(rng.integers(2, n_max + 1))
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    K = int(rng.integers(0, n + 1))
    density = one_body_density(Spectrum(np.arange(n, dtype=float), q), K)
    i, j = rng.choice(n, size=2, replace=False)
    return pair_rho(density, int(i), int(j))


def random_x_state(rng) -> PairDensityMatrix:
    """Random valid X-shaped density matrix, not necessarily Gaussian."""
    p = rng.dirichlet(np.ones(4))
    bound = np.sqrt(p[1] * p[2])
    return PairDensityMatrix(p[0], p[1], p[2], p[3], float(rng.uniform(-bound, bound)))


def random_pair_densities(rng, count):
    out = []
    for k in range(count):
        out.append(random_slater_pair_density(rng) if k % 2 == 0 else random_x_state(rng))
    return out


def check_wick(rng, n_instances, max_sites, correlator_fn=correlators) -> CheckResult:
    specs = oracle_lattices(max_sites)
    done, worst, attempts = 0, 0.0, 0
    while done < n_instances:
        attempts += 1
        if attempts > 20 * n_instances:
            break
        spec = specs[int(rng.integers(len(specs)))]
        table = build_bond_table(spec)
        chrom = rng.uniform(0.01, 5.0, table.n_genes)
        K = int(rng.integers(1, table.n_sites))
        err = wick_vs_fock(table, chrom, K, correlator_fn)
        if err is None:
            continue
        worst = max(worst, err)
        done += 1
    return CheckResult(f"wick vs fock (N<={max_sites})", done, worst, WICK_TOL)


def check_routes(rng, count) -> CheckResult:
    worst = 0.0
    for rho in random_pair_densities(rng, count):
        worst = max(worst, abs(concurrence_closed(rho) - concurrence_spectral(rho)))
    return CheckResult("closed vs spectral concurrence", count, worst, ROUTE_TOL)


def check_ring_spectrum() -> CheckResult:
    worst, n = 0.0, 0
    for N in range(3, 17):
        table = build_bond_table(LatticeSpec.chain(N, "periodic"))
        H = assemble_hamiltonian(table, np.ones(table.n_genes))
        ref = analytic_ring_eigenvalues(N, 1.0)
        for method in ("lapack", "householder"):
            w = diagonalize(H, method=method).eigenvalues
            worst = max(worst, float(np.abs(w - ref).max()))
            n += 1
    return CheckResult("uniform ring spectrum", n, worst, RING_TOL)


def check_particle_hole(rng, n_chromosomes) -> CheckResult:
    tables = [
        build_bond_table(LatticeSpec.chain(10, "periodic")),
        build_bond_table(LatticeSpec.chain(10, "open")),
        build_bond_table(LatticeSpec.square(4, 4, "periodic")),
    ]
    worst, n = 0.0, 0
    for table in tables:
        pop = rng.uniform(0.01, 5.0, (n_chromosomes, table.n_genes))
        N = table.n_sites
        fits = np.array([batch_fitness(table, pop, K) for K in range(N + 1)])
        worst = max(worst, float(np.abs(fits - fits[::-1]).max()))
        n += n_chromosomes * (N + 1)
    return CheckResult("electron-hole symmetry", n, worst, SYMMETRY_TOL)


def run_verification(scale="quick", seed=0, correlator_fn=correlators) -> list[CheckResult]:
    """Run every cross-check; ``scale`` is ``"quick"`` or ``"full"``.

    ``correlator_fn`` replaces the Wick correlators under test, which lets a
    deliberately broken implementation be fed through the suite.
    """
    if scale not in ("quick", "full"):
        raise ValueError(f"scale must be 'quick' or 'full', got {scale!r}")
    mult = 1 if scale == "quick" else 10
    rng = np.random.default_rng(seed)
    jobs = [
        lambda: check_wick(rng, 200 * mult, 10, correlator_fn),
        lambda: check_routes(rng, 1000 * mult),
        check_ring_spectrum,
        lambda: check_particle_hole(rng, 10 * mult),
    ]
    if scale == "full":
        jobs.insert(1, lambda: check_wick(rng, 40, 12, correlator_fn))
    results = []
    for job in jobs:
        t0 = time.perf_counter()
        res = job()
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results


def format_table(results) -> str:
    lines = [f"{'check':<34} {'n':>7} {'max error':>11} {'tol':>8} {'time':>7}  result"]
    for r in results:
        lines.append(
            f"{r.name:<34} {r.n_checks:>7d} {r.max_error:>11.3e} {r.tolerance:>8.0e} "
            f"{r.seconds:>6.2f}s  {'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines)
