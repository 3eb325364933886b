"""CSV/TSV/manifest serialization for optimization runs.

Headers are fixed; numbers are written with 12 significant digits so that
identical runs produce byte-identical files.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

SWEEP_HEADER = ["filling_fraction", "K", "best_fitness"]
GENERATIONS_HEADER = ["K", "generation", "avg_fitness", "best_fitness"]
BASELINE_HEADER = ["filling_fraction", "K", "ordered"]
COMPARISON_HEADER = ["K", "ordered", "optimized", "delta"]


def fmt(x) -> str:
    return format(float(x), ".12g")


@dataclass
class SweepRecord:
    n_sites: int
    sweep: list[tuple[int, float]] = field(default_factory=list)  # (K, best_fitness)
    generations: list[tuple[int, int, float, float]] = field(default_factory=list)

    @classmethod
    def from_result(cls, result, n_sites) -> "SweepRecord":
        sweep = sorted((K, fit) for K, (fit, _) in result.best.items())
        gens = sorted(
            (s.filling_K, s.generation, s.avg_fitness, s.best_fitness) for s in result.log
        )
        return cls(n_sites, sweep, gens)

    def sweep_rows(self):
        return [[fmt(K / self.n_sites), str(K), fmt(f)] for K, f in self.sweep]

    def generation_rows(self):
        return [[str(K), str(g), fmt(a), fmt(b)] for K, g, a, b in self.generations]


def atomic_write_text(path, text: str):
    """Write ``text`` to ``path`` via a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows, delimiter=",") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_csv(path, header, rows, delimiter=","):
    atomic_write_text(path, csv_text(header, rows, delimiter))


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader if row]


def read_sweep(path, n_sites=None) -> SweepRecord:
    header, rows = read_csv(path)
    if header != SWEEP_HEADER:
        raise ValueError(f"{path}: unexpected header {header}")
    sweep = [(int(r[1]), float(r[2])) for r in rows]
    if n_sites is None:
        n_sites = _infer_sites(rows)
    return SweepRecord(n_sites, sweep, [])


def read_generations(path):
    header, rows = read_csv(path)
    if header != GENERATIONS_HEADER:
        raise ValueError(f"{path}: unexpected header {header}")
    return [(int(r[0]), int(r[1]), float(r[2]), float(r[3])) for r in rows]


def _infer_sites(rows):
    for frac, K, _ in rows:
        if float(frac) > 0:
            return round(int(K) / float(frac))
    return 1


def chromosome_tsv(best) -> str:
    """One line per filling: ``K`` then the genes, tab-separated."""
    rows = [[str(K)] + [repr(float(t)) for t in chrom] for K, (_, chrom) in sorted(best.items())]
    return csv_text(None, rows, delimiter="\t")


def read_config(path) -> dict[str, str]:
    """Parse a ``key=value`` file; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            out[key.strip().lstrip("-").replace("_", "-")] = value.strip()
    return out
