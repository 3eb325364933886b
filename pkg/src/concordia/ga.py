"""Genetic algorithm over hopping patterns.

One chromosome is one real gene per bond (see :mod:`concordia.lattice`).
Each generation:

1. evaluate every chromosome's fitness at the current filling,
2. keep the fittest chromosome seen so far as ``best``,
3. log average and best fitness,
4. breed the next population by selection, single-point crossover and
   per-gene mutation,
5. put ``best`` back into slot 0.

The filling sweep keeps ``best`` across fillings, so each new filling starts
from the previous filling's winner plus a fresh random population.

Randomness comes from a single seed. Each step draws from its own
sub-stream keyed by ``(purpose, filling position, generation)``, which keeps
runs reproducible however fitness evaluation is parallelized.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_filling, check_population
from .concurrence import batch_fitness
from .lattice import BondTable, chain_bond_order

log = logging.getLogger(__name__)

THREADS_ENV = "CONCORDIA_THREADS"

_STREAM_BEST = 0
_STREAM_INIT = 1
_STREAM_STEP = 2


def parse_selection(selection: str) -> tuple[str, int]:
    """``"roulette"`` or ``"tournament:k"`` -> ``(name, k)``."""
    name, _, arg = str(selection).partition(":")
    name = name.strip().lower()
    if name == "roulette":
        if arg:
            raise ValueError("roulette selection takes no argument")
        return "roulette", 0
    if name == "tournament":
        k = int(arg) if arg else 2
        if k < 1:
            raise ValueError(f"tournament size must be >= 1, got {k}")
        return "tournament", k
    raise ValueError(f"unknown selection {selection!r}; use 'roulette' or 'tournament:k'")


@dataclass(frozen=True)
class GaConfig:
    """GA hyperparameters.

    Genes live in the open interval ``(gene_min, gene_max)``. Population and
    run length default to values a laptop finishes in seconds per filling.
    """

    population_size: int = 100
    generations: int = 150
    p_c: float = 0.70
    p_m: float = 0.002
    gene_min: float = 0.0
    gene_max: float = 5.0
    seed: int = 0
    selection: str = "roulette"

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError(f"p_c={self.p_c} outside [0, 1]")
        if not 0.0 <= self.p_m <= 1.0:
            raise ValueError(f"p_m={self.p_m} outside [0, 1]")
        if not self.gene_min < self.gene_max:
            raise ValueError("gene_min must be below gene_max")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        parse_selection(self.selection)


@dataclass(frozen=True)
class GenerationStats:
    filling_K: int
    generation: int
    avg_fitness: float
    best_fitness: float
    best_chromosome: np.ndarray = field(repr=False)


@dataclass
class RunResult:
    best: dict[int, tuple[float, np.ndarray]]
    log: list[GenerationStats]

    def best_fitness(self, K: int) -> float:
        return self.best[K][0]

    def best_chromosome(self, K: int) -> np.ndarray:
        return self.best[K][1]


def resolve_threads(n_threads=None) -> int:
    """Thread count for fitness evaluation.

    ``None`` reads ``CONCORDIA_THREADS`` (unset means 1); 0 means one per CPU.
    """
    if n_threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        try:
            n_threads = int(raw) if raw else 1
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    n_threads = int(n_threads)
    if n_threads < 0:
        raise ValueError(f"thread count must be >= 0, got {n_threads}")
    if n_threads == 0:
        n_threads = os.cpu_count() or 1
    return n_threads


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one ``(purpose, ...)`` key under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def _uniform_open(rng, low, high, size):
    """Uniform draws from the open interval ``(low, high)``."""
    x = rng.uniform(low, high, size)
    bad = x <= low
    while np.any(bad):
        x[bad] = rng.uniform(low, high, int(bad.sum()))
        bad = x <= low
    return x


def init_population(cfg: GaConfig, n_genes: int, rng) -> np.ndarray:
    if n_genes < 1:
        raise ValueError("need at least one gene")
    return _uniform_open(rng, cfg.gene_min, cfg.gene_max, (cfg.population_size, n_genes))


def select_parent(population, fitnesses, cfg: GaConfig, rng) -> np.ndarray:
    """Pick one parent, by fitness-proportionate roulette or tournament.

    Roulette falls back to uniform choice when every fitness is zero.
    """
    population = np.asarray(population)
    fitnesses = np.asarray(fitnesses, dtype=float)
    n = len(population)
    if n == 0:
        raise ValueError("cannot select from an empty population")
    if np.any(fitnesses < 0):
        raise ValueError("fitnesses must be non-negative")
    return population[_select_index(fitnesses, cfg, rng, np.cumsum(fitnesses))]


def _select_index(fitnesses, cfg, rng, cumulative) -> int:
    name, k = parse_selection(cfg.selection)
    n = len(fitnesses)
    if name == "tournament":
        draws = rng.integers(0, n, size=k)
        return int(draws[np.argmax(fitnesses[draws])])
    total = cumulative[-1]
    if total <= 0.0:
        return int(rng.integers(0, n))
    idx = int(np.searchsorted(cumulative, rng.random() * total, side="right"))
    return min(idx, n - 1)


def crossover(a, b, cfg: GaConfig, rng, cut: int | None = None):
    """Single-point crossover with probability ``p_c``.

    Returns copies of the parents when no crossover happens. ``cut`` forces
    the cut position (tail from index ``cut`` on is swapped).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"parents differ in length: {a.shape} vs {b.shape}")
    n = a.shape[0]
    if n < 2 or rng.random() >= cfg.p_c:
        return a.copy(), b.copy()
    if cut is None:
        cut = int(rng.integers(1, n))
    elif not 1 <= cut <= n - 1:
        raise ValueError(f"cut must lie in [1, {n - 1}]")
    return (
        np.concatenate([a[:cut], b[cut:]]),
        np.concatenate([b[:cut], a[cut:]]),
    )


def mutate(chrom, cfg: GaConfig, rng) -> np.ndarray:
    """Redraw each gene uniformly in range with probability ``p_m``."""
    chrom = np.array(chrom, dtype=float)
    hit = rng.random(chrom.shape[0]) < cfg.p_m
    if hit.any():
        chrom[hit] = _uniform_open(rng, cfg.gene_min, cfg.gene_max, int(hit.sum()))
    return chrom


def breed(population, fitnesses, cfg: GaConfig, rng) -> np.ndarray:
    """Children for slots ``1..n-1``; slot 0 is left for the elite."""
    n = len(population)
    cumulative = np.cumsum(fitnesses)
    children = []
    while len(children) < n - 1:
        a = population[_select_index(fitnesses, cfg, rng, cumulative)]
        b = population[_select_index(fitnesses, cfg, rng, cumulative)]
        c1, c2 = crossover(a, b, cfg, rng)
        children.append(mutate(c1, cfg, rng))
        if len(children) < n - 1:
            children.append(mutate(c2, cfg, rng))
    nxt = np.empty_like(population)
    nxt[1:] = children
    return nxt


def step_generation(population, table: BondTable, K: int, cfg: GaConfig, best, rng,
                    generation: int = 0, best_fitness: float = -np.inf, n_threads: int = 1):
    """Advance one generation.

    Returns ``(next_population, stats)``; ``stats.best_chromosome`` and
    ``stats.best_fitness`` are the updated elite.
    """
    population = check_population(population, table.n_genes)
    best = np.asarray(best, dtype=float)
    if best.shape != (table.n_genes,):
        raise ValueError("best chromosome has the wrong number of genes")
    fit = batch_fitness(table, population, K, n_threads=n_threads)
    top = int(np.argmax(fit))
    if fit[top] > best_fitness:
        best, best_fitness = population[top].copy(), float(fit[top])
    stats = GenerationStats(K, generation, float(fit.mean()), best_fitness, best)
    nxt = breed(population, fit, cfg, rng)
    nxt[0] = best
    return nxt, stats


def run_filling_sweep(table: BondTable, cfg: GaConfig, fillings=None, n_threads=None,
                      progress=None) -> RunResult:
    """Optimize the hopping pattern at each filling in ``fillings``, in order.

    Parameters
    ----------
    table : BondTable
    cfg : GaConfig
    fillings : iterable of int, optional
        Particle numbers to visit; defaults to ``0..n_sites``.
    n_threads : int, optional
        Fitness-evaluation threads; see :func:`resolve_threads`.
    progress : callable, optional
        Called with each :class:`GenerationStats` as it is produced.
    """
    if fillings is None:
        fillings = range(table.n_sites + 1)
    fillings = [check_filling(K, table.n_sites) for K in fillings]
    n_threads = resolve_threads(n_threads)

    best = _uniform_open(substream(cfg.seed, _STREAM_BEST), cfg.gene_min, cfg.gene_max,
                         table.n_genes)
    result = RunResult(best={}, log=[])
    for pos, K in enumerate(fillings):
        population = init_population(cfg, table.n_genes, substream(cfg.seed, _STREAM_INIT, pos))
        population[0] = best
        best_fit = -np.inf
        for g in range(cfg.generations):
            rng = substream(cfg.seed, _STREAM_STEP, pos, g)
            population, stats = step_generation(
                population, table, K, cfg, best, rng,
                generation=g, best_fitness=best_fit, n_threads=n_threads,
            )
            best, best_fit = stats.best_chromosome, stats.best_fitness
            result.log.append(stats)
            if progress is not None:
                progress(stats)
        result.best[K] = (best_fit, best.copy())
        log.debug("K=%d best fitness %.6f", K, best_fit)
    return result


def alternation_score(table: BondTable, chrom) -> float:
    """How strongly a chain's hoppings alternate high/low along the chain.

    ``|sum_s (-1)**s (t_s - mean)| / sum_s |t_s - mean|`` over NN bonds in
    spatial order; 1 for a perfectly dimerized pattern.
    """
    t = np.asarray(chrom, dtype=float)[chain_bond_order(table)]
    dev = t - t.mean()
    denom = np.abs(dev).sum()
    if denom == 0.0:
        return 0.0
    signs = np.where(np.arange(len(t)) % 2 == 0, 1.0, -1.0)
    return float(abs((signs * dev).sum()) / denom)
