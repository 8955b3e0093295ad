"""Command-line entry point: ``antenna-placement <experiment> [flags]``.

Exit codes: 0 success, 1 invalid arguments, 2 solver failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench
from .array_model import ProblemConfig
from .conic import InfeasibleProblemError

EXIT_OK, EXIT_ARGS, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

# config-file key -> ExperimentSpec / ProblemConfig field
CONFIG_KEYS = {
    "g": "g_count", "g_count": "g_count",
    "mtilde": "m_tilde", "m_tilde": "m_tilde",
    "ntilde": "n_tilde", "n_tilde": "n_tilde",
    "m": "m", "n": "n",
    "p": "p_values", "p_values": "p_values",
    "size": "size_values", "sizes": "size_values", "size_values": "size_values",
    "runs": "runs",
    "seed": "base_seed", "base_seed": "base_seed",
    "algo": "algorithms", "algorithms": "algorithms",
    "draws": "expurgation_draws", "expurgation_draws": "expurgation_draws",
    "out": "output_path", "output_path": "output_path",
    "workers": "workers",
}
INT_KEYS = {"g_count", "m_tilde", "n_tilde", "m", "n", "runs", "base_seed", "expurgation_draws", "workers"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def parse_size(text: str) -> tuple:
    """``"7"`` -> ``(7, 7)``, ``"4x6"`` -> ``(4, 6)``."""
    parts = text.lower().split("x")
    if len(parts) == 1:
        return int(parts[0]), int(parts[0])
    if len(parts) == 2:
        return int(parts[0]), int(parts[1])
    raise ValueError(f"bad size {text!r}")


def _split(value: str) -> list:
    return [tok for tok in value.replace(",", " ").split() if tok]


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment, lists are comma separated."""
    settings = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep or key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: cannot parse {raw!r}")
        field = CONFIG_KEYS[key]
        value = value.strip()
        try:
            if field in INT_KEYS:
                settings[field] = int(value)
            elif field == "p_values":
                settings[field] = [float(v) for v in _split(value)]
            elif field == "size_values":
                settings[field] = [parse_size(v) for v in _split(value)]
            elif field == "algorithms":
                settings[field] = _split(value)
            else:
                settings[field] = value
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from exc
    return settings


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="antenna-placement", description="Run antenna placement experiments.")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name in bench.EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--g", dest="g_count", type=int)
        p.add_argument("--mtilde", dest="m_tilde", type=int)
        p.add_argument("--ntilde", dest="n_tilde", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--p", dest="p_values", type=float, action="append", help="elimination rate (repeatable)")
        p.add_argument("--size", dest="size_values", type=parse_size, action="append",
                       help="array size M or MxN (repeatable)")
        p.add_argument("--runs", type=int)
        p.add_argument("--seed", dest="base_seed", type=int)
        p.add_argument("--algo", dest="algorithms", choices=bench.ALGORITHMS, action="append")
        p.add_argument("--draws", dest="expurgation_draws", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--config", type=Path)
        p.add_argument("--out", dest="output_path")
    return parser


def make_spec(args: argparse.Namespace) -> bench.ExperimentSpec:
    settings = read_config(args.config) if args.config else {}
    for key in set(CONFIG_KEYS.values()):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value

    base = bench.DEFAULT_CONFIG
    config = ProblemConfig(
        m_tilde=settings.pop("m_tilde", base.m_tilde),
        n_tilde=settings.pop("n_tilde", base.n_tilde),
        m=settings.pop("m", base.m),
        n=settings.pop("n", base.n),
        g_count=settings.pop("g_count", base.g_count),
    )
    return bench.ExperimentSpec(experiment=args.experiment, config=config, **settings)


def _print_summary(result) -> None:
    for row in bench.summarize(result["records"]):
        p = "-" if row["p"] is None else f"{row['p']:g}"
        print(f"{row['experiment']:<10} {row['algorithm']:<16} M={row['m']:<3} N={row['n']:<3} p={p:<5} "
              f"runs={row['runs']:<4} coherence={row['coherence_mean']:.4f} +/- {row['coherence_std']:.4f} "
              f"runtime={row['runtime_ms_mean']:.1f} ms")
    if result["trace"]:
        for row in result["trace"]:
            print(f"iteration {row.iteration:>3}: tx={row.tx_dim_mean:.2f} rx={row.rx_dim_mean:.2f}")
    for kind, path in result["files"].items():
        print(f"wrote {kind}: {path}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = make_spec(args)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS

    try:
        result = bench.run_experiment(spec)
    except (InfeasibleProblemError, RuntimeError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    _print_summary(result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
