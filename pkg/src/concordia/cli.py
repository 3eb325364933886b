"""``concordia`` command line.

Subcommands ``optimize``, ``baseline``, ``verify`` and ``plot``. Settings are
resolved as: command-line flag, else ``--config FILE`` entry, else default.

Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure,
3 verification failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import records as rec
from ._validation import NumericalError
from .concurrence import batch_fitness
from .ga import GaConfig, resolve_threads, run_filling_sweep
from .lattice import build_bond_table, lattice_from_params
from .svg import emit_svg
from .verify import format_table, run_verification

log = logging.getLogger("concordia")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3

DEFAULTS = {
    "lattice": "chain", "size": 16, "rows": None, "cols": None,
    "boundary": "periodic", "shells": "nn",
    "pop": 100, "gens": 150, "pc": 0.70, "pm": 0.002,
    "gene-min": 0.0, "gene-max": 5.0, "seed": 0, "selection": "roulette",
    "fillings": None, "out": "out", "svg": False, "baseline-t": 1.0,
    "scale": "quick",
}

# keys written to run_manifest.txt, in order
MANIFEST_KEYS = ["lattice", "size", "rows", "cols", "boundary", "shells", "pop", "gens", "pc",
                 "pm", "gene-min", "gene-max", "seed", "selection", "fillings", "svg"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bool(text) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def parse_fillings(text, n_sites) -> list[int]:
    """``"A..B"`` (inclusive), ``"a,b,c"`` or a single ``K``, in sweep order."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            step = 1 if hi >= lo else -1  # a descending range sweeps high to low
            values = list(range(lo, hi + step, step))
        else:
            values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad --fillings {text!r}; use A..B or a comma list") from None
    if not values:
        raise UsageError("--fillings selects no fillings")
    bad = [K for K in values if not 0 <= K <= n_sites]
    if bad:
        raise UsageError(f"fillings {bad} outside [0, {n_sites}]")
    if len(set(values)) != len(values):
        raise UsageError("--fillings repeats a value")
    return values


def _lattice_args(p):
    g = p.add_argument_group("lattice")
    g.add_argument("--lattice", choices=["chain", "square", "triangular"])
    g.add_argument("--size", type=int, help="chain length, or side of a square grid")
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--boundary", choices=["open", "periodic"])
    g.add_argument("--shells", choices=["nn", "nnn"], help="nn, or nn plus next-nearest")
    g.add_argument("--fillings", metavar="A..B", help="particle numbers in sweep order: A..B or K1,K2,... "
                   "(default: 0..N)")


def _ga_args(p):
    g = p.add_argument_group("genetic algorithm")
    g.add_argument("--pop", type=int, help="population size")
    g.add_argument("--gens", type=int, help="generations per filling")
    g.add_argument("--pc", type=float, help="crossover probability")
    g.add_argument("--pm", type=float, help="per-gene mutation probability")
    g.add_argument("--gene-min", type=float)
    g.add_argument("--gene-max", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--selection", help="roulette or tournament:k")


def _common_args(p, svg=True):
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--config", metavar="FILE", help="key=value settings file; flags win")
    if svg:
        p.add_argument("--svg", action="store_const", const=True, help="also write SVG plots")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="concordia",
        description="Optimize hopping patterns for nearest-neighbor entanglement of "
                    "spinless fermions.",
        epilog="Precedence: command-line flags > --config file > built-in defaults. "
               "Env CONCORDIA_THREADS sets fitness threads (unset: 1, 0: one per CPU). "
               "Exit codes: 0 ok, 1 usage, 2 numerical failure, 3 verification failure.",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    kw = dict(argument_default=argparse.SUPPRESS, epilog=parser.epilog)

    p = sub.add_parser("optimize", help="GA sweep over fillings", **kw)
    _lattice_args(p)
    _ga_args(p)
    _common_args(p)

    p = sub.add_parser("baseline", help="uniform-hopping fitness, and comparison with a sweep",
                       **kw)
    _lattice_args(p)
    p.add_argument("--baseline-t", type=float, metavar="T", help="uniform hopping value")
    _common_args(p)

    p = sub.add_parser("verify", help="randomized cross-checks against exact references", **kw)
    p.add_argument("--scale", choices=["quick", "full"])
    p.add_argument("--seed", type=int)

    p = sub.add_parser("plot", help="render SVGs from the CSVs in --out", **kw)
    _common_args(p, svg=False)

    parser.accepted_keys = {
        name: {opt[2:] for opt in sp._option_string_actions if opt.startswith("--")}
        for name, sp in sub.choices.items()
    }
    return parser


def resolve_settings(parser, argv) -> dict:
    """Merge defaults, config file and flags into one settings dict."""
    args = vars(parser.parse_args(argv))
    cmd = args["command"]
    settings = dict(DEFAULTS)
    if "config" in args:
        try:
            raw = rec.read_config(args["config"])
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        tokens = [cmd]
        accepted = parser.accepted_keys[cmd]
        for key, value in raw.items():
            if key not in accepted:
                if key in DEFAULTS:
                    continue  # meant for another subcommand, e.g. a manifest fed to baseline
                raise UsageError(f"unknown config key {key!r}")
            if key == "svg":
                if _bool(value):
                    tokens.append("--svg")
            elif value.lower() == "none":
                settings[key] = None
            else:
                tokens += [f"--{key}", value]
        from_file = vars(parser.parse_args(tokens))
        settings.update({k.replace("_", "-"): v for k, v in from_file.items()})
    settings.update({k.replace("_", "-"): v for k, v in args.items()})
    return settings


def _lattice(settings):
    spec = lattice_from_params(settings["lattice"], settings["size"], settings["rows"],
                               settings["cols"], settings["boundary"], settings["shells"])
    return build_bond_table(spec)


def _fillings(settings, n_sites):
    if settings["fillings"] is None:
        return list(range(n_sites + 1))
    return parse_fillings(settings["fillings"], n_sites)


def _ga_config(settings):
    return GaConfig(
        population_size=settings["pop"], generations=settings["gens"],
        p_c=settings["pc"], p_m=settings["pm"],
        gene_min=settings["gene-min"], gene_max=settings["gene-max"],
        seed=settings["seed"], selection=settings["selection"],
    )


def check_writable(out_dir: Path):
    """Fail early, before any computation, if ``out_dir`` cannot take files."""
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        rec.atomic_write_text(out_dir / ".write-probe", "")
        (out_dir / ".write-probe").unlink()
    except OSError as exc:
        raise UsageError(f"output directory {out_dir} is not writable: {exc}") from None


def write_outputs(out_dir: Path, files: dict[str, str]):
    """Write every file atomically; on failure remove those already written."""
    written = []
    try:
        for name, text in files.items():
            rec.atomic_write_text(out_dir / name, text)
            written.append(out_dir / name)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise


def cmd_optimize(settings) -> int:
    try:
        table = _lattice(settings)
        cfg = _ga_config(settings)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    fillings = _fillings(settings, table.n_sites)
    n_threads = resolve_threads()
    out = Path(settings["out"])
    check_writable(out)

    def progress(stats):
        if stats.generation == cfg.generations - 1:
            log.info("K=%d best %.6f", stats.filling_K, stats.best_fitness)

    result = run_filling_sweep(table, cfg, fillings, n_threads=n_threads, progress=progress)
    record = rec.SweepRecord.from_result(result, table.n_sites)
    files = {
        "sweep.csv": rec.csv_text(rec.SWEEP_HEADER, record.sweep_rows()),
        "generations.csv": rec.csv_text(rec.GENERATIONS_HEADER, record.generation_rows()),
        "best_chromosomes.tsv": rec.chromosome_tsv(result.best),
    }
    if settings["svg"]:
        files["sweep.svg"] = emit_svg(record, "sweep")
        files["generations.svg"] = emit_svg(record, "generations")
    manifest = {k: ("none" if settings[k] is None else settings[k]) for k in MANIFEST_KEYS}
    manifest["svg"] = "true" if settings["svg"] else "false"
    files["run_manifest.txt"] = "# concordia run manifest; reusable with --config\n" + "".join(
        f"{k}={v}\n" for k, v in manifest.items())
    write_outputs(out, files)
    for K, fit in record.sweep:
        print(f"K={K:<3d} best_fitness={rec.fmt(fit)}")
    print(f"wrote {', '.join(files)} to {out}")
    return EXIT_OK


def cmd_baseline(settings) -> int:
    try:
        table = _lattice(settings)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    t = settings["baseline-t"]
    if not np.isfinite(t) or t <= 0:
        raise UsageError(f"--baseline-t must be positive, got {t}")
    fillings = _fillings(settings, table.n_sites)
    out = Path(settings["out"])
    check_writable(out)
    uniform = np.full((1, table.n_genes), t)
    ordered = {K: float(batch_fitness(table, uniform, K)[0]) for K in fillings}
    files = {"baseline.csv": rec.csv_text(
        rec.BASELINE_HEADER,
        [[rec.fmt(K / table.n_sites), str(K), rec.fmt(v)] for K, v in sorted(ordered.items())])}

    sweep_path = out / "sweep.csv"
    if sweep_path.exists():
        sweep = dict(rec.read_sweep(sweep_path).sweep)
        common = sorted(set(sweep) & set(ordered))
        rows = [[str(K), rec.fmt(ordered[K]), rec.fmt(sweep[K]), rec.fmt(sweep[K] - ordered[K])]
                for K in common]
        files["comparison.csv"] = rec.csv_text(rec.COMPARISON_HEADER, rows)
        if settings["svg"] and common:
            from .svg import line_plot
            files["comparison.svg"] = line_plot(
                {"optimized": [(K / table.n_sites, sweep[K]) for K in common],
                 "ordered": [(K / table.n_sites, ordered[K]) for K in common]},
                "Optimized vs ordered", "filling fraction K/N", "mean NN concurrence",
                dashed={"ordered"})
    write_outputs(out, files)
    for K, v in sorted(ordered.items()):
        print(f"K={K:<3d} ordered={rec.fmt(v)}")
    print(f"wrote {', '.join(files)} to {out}")
    return EXIT_OK


def cmd_verify(settings) -> int:
    results = run_verification(settings["scale"], seed=settings["seed"])
    print(format_table(results))
    ok = all(r.passed for r in results)
    print("verify:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_plot(settings) -> int:
    out = Path(settings["out"])
    files = {}
    sweep_path, gen_path = out / "sweep.csv", out / "generations.csv"
    if not sweep_path.exists() and not gen_path.exists():
        raise UsageError(f"no sweep.csv or generations.csv in {out}")
    n_sites = None
    if sweep_path.exists():
        record = rec.read_sweep(sweep_path)
        n_sites = record.n_sites
        files["sweep.svg"] = emit_svg(record, "sweep")
    if gen_path.exists():
        record = rec.SweepRecord(n_sites or 1, [], rec.read_generations(gen_path))
        files["generations.svg"] = emit_svg(record, "generations")
    write_outputs(out, files)
    print(f"wrote {', '.join(files)} to {out}")
    return EXIT_OK


COMMANDS = {"optimize": cmd_optimize, "baseline": cmd_baseline, "verify": cmd_verify,
            "plot": cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        try:
            settings = resolve_settings(parser, argv)
        except SystemExit as exc:  # argparse: --help or a usage error
            return int(exc.code or 0)
        logging.basicConfig(level=logging.WARNING - 10 * min(settings.get("verbose", 0), 2),
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[settings["command"]](settings)
    except UsageError as exc:
        print(f"concordia: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"concordia: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ValueError) as exc:
        print(f"concordia: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
