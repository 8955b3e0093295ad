"""Seeded Monte-Carlo experiments comparing DIAP and RIAP, with CSV output.

Run ``i`` of a cell uses seed ``base_seed + i``. The seed fixes the random
binary transmit initialization (shared by both algorithms, so a DIAP and a
RIAP record with the same seed start from the same point) and, through an
independent child stream, the RIAP rounding draws.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from itertools import combinations
from math import comb
from pathlib import Path

import numpy as np

from .array_model import Placement, ProblemConfig, coherence_direct, difference_vectors
from .diap import diap_place
from .riap import alternate, expurgate, random_binary_weights

ALGORITHMS = ("riap", "riap-expurgated", "diap")
EXPERIMENTS = ("sweep-p", "sweep-size", "trace", "table1", "oracle", "single")

DEFAULT_CONFIG = ProblemConfig(m_tilde=100, n_tilde=100, m=7, n=7, g_count=200)
DEFAULT_P = 0.33
DEFAULT_DRAWS = 30
ORACLE_LIMIT = 10**6

DEFAULT_P_VALUES = {
    "sweep-p": (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    "table1": (0.33, 1.0, 3.0),
}
DEFAULT_ALGORITHMS = {
    "sweep-p": ("diap",),
    "sweep-size": ("riap", "diap"),
    "trace": ("diap",),
    "table1": ("riap", "diap"),
    "oracle": (),
    "single": ("riap", "riap-expurgated", "diap"),
}
DEFAULT_SIZES = tuple((k, k) for k in range(4, 15))


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    config: ProblemConfig = DEFAULT_CONFIG
    p_values: tuple = ()
    size_values: tuple = ()
    runs: int = 100
    base_seed: int = 0
    algorithms: tuple = ()
    expurgation_draws: int = DEFAULT_DRAWS
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if not self.p_values:
            default = DEFAULT_P_VALUES.get(self.experiment, (DEFAULT_P,))
            object.__setattr__(self, "p_values", default)
        if not self.algorithms:
            object.__setattr__(self, "algorithms", DEFAULT_ALGORITHMS[self.experiment])
        if not self.size_values:
            sizes = DEFAULT_SIZES if self.experiment == "sweep-size" else ((self.config.m, self.config.n),)
            object.__setattr__(self, "size_values", sizes)
        object.__setattr__(self, "p_values", tuple(float(p) for p in self.p_values))
        object.__setattr__(self, "size_values", tuple((int(m), int(n)) for m, n in self.size_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if any(p <= 0 for p in self.p_values):
            raise ValueError("p values must be positive")
        if self.expurgation_draws < 1:
            raise ValueError("expurgation draws must be at least 1")


@dataclass(frozen=True)
class ResultRecord:
    experiment: str
    algorithm: str
    m: int
    n: int
    m_tilde: int
    n_tilde: int
    g_count: int
    p: float | None
    seed: int
    coherence: float
    runtime_ms: float
    outer_iterations: int
    tx_indices: str
    rx_indices: str

    def placement(self) -> Placement:
        return Placement(_parse_indices(self.tx_indices), _parse_indices(self.rx_indices))

    def config(self) -> ProblemConfig:
        return ProblemConfig(self.m_tilde, self.n_tilde, self.m, self.n, self.g_count)

    def sort_key(self):
        return (self.experiment, self.algorithm, self.m, self.n, -1.0 if self.p is None else self.p, self.seed)


RECORD_FIELDS = tuple(f.name for f in fields(ResultRecord))


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    tx_dim_mean: float
    rx_dim_mean: float
    runs: int


def _format_indices(indices) -> str:
    return ";".join(str(int(i)) for i in indices)


def _parse_indices(text: str) -> tuple:
    return tuple(int(tok) for tok in text.split(";") if tok != "")


def _record(experiment, algorithm, config, p, seed, placement, runtime_s, iterations):
    return ResultRecord(
        experiment=experiment,
        algorithm=algorithm,
        m=config.m,
        n=config.n,
        m_tilde=config.m_tilde,
        n_tilde=config.n_tilde,
        g_count=config.g_count,
        p=p,
        seed=seed,
        coherence=coherence_direct(placement, config),
        runtime_ms=1e3 * runtime_s,
        outer_iterations=iterations,
        tx_indices=_format_indices(placement.tx_indices),
        rx_indices=_format_indices(placement.rx_indices),
    )


def _streams(seed: int):
    init_seq, rounding_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_seq), np.random.default_rng(rounding_seq)


def run_diap(config, p, seed, experiment="single", diffs=None):
    """One seeded DIAP run; returns ``(record, trace)``."""
    init_rng, _ = _streams(seed)
    init = random_binary_weights(config.m_tilde, config.m, init_rng)
    start = time.perf_counter()
    placement, trace = diap_place(config, p, init, diffs=diffs)
    elapsed = time.perf_counter() - start
    return _record(experiment, "diap", config, p, seed, placement, elapsed, len(trace) - 1), trace


def run_riap(config, seed, algorithms=("riap", "riap-expurgated"), draws=DEFAULT_DRAWS,
             experiment="single", diffs=None):
    """One seeded RIAP run.

    The single-draw record is the first candidate of the expurgation
    sequence, so the expurgated coherence never exceeds it.
    """
    init_rng, rounding_rng = _streams(seed)
    init = random_binary_weights(config.m_tilde, config.m, init_rng)
    start = time.perf_counter()
    w_t, w_r, trace = alternate(config, init, diffs=diffs)
    relax_time = time.perf_counter() - start

    records = []
    if "riap" in algorithms:
        first_rng = np.random.default_rng(rounding_rng.bit_generator.seed_seq)
        start = time.perf_counter()
        placement, _ = expurgate(w_t, w_r, config.m, config.n, 1, first_rng, config)
        draw_time = time.perf_counter() - start
        records.append(_record(experiment, "riap", config, None, seed, placement, relax_time + draw_time, len(trace)))
    if "riap-expurgated" in algorithms:
        start = time.perf_counter()
        placement, _ = expurgate(w_t, w_r, config.m, config.n, draws, rounding_rng, config)
        draw_time = time.perf_counter() - start
        records.append(_record(experiment, "riap-expurgated", config, None, seed, placement,
                               relax_time + draw_time, len(trace)))
    return records


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _run_cell(spec, config, experiment, p_values, with_traces=False):
    """All algorithms of ``spec`` for one problem size, every seed."""
    diffs = difference_vectors(config)
    riap_algos = tuple(a for a in spec.algorithms if a.startswith("riap"))
    seeds = [spec.base_seed + i for i in range(spec.runs)]

    def one_seed(seed):
        records, traces = [], []
        if riap_algos:
            records += run_riap(config, seed, riap_algos, spec.expurgation_draws, experiment, diffs)
        if "diap" in spec.algorithms:
            for p in p_values:
                record, trace = run_diap(config, p, seed, experiment, diffs)
                records.append(record)
                traces.append(trace)
        return records, traces

    results = _map(one_seed, seeds, spec.workers)
    records = [r for recs, _ in results for r in recs]
    traces = [t for _, trs in results for t in trs]
    return (records, traces) if with_traces else records


def run_sweep_p(spec: ExperimentSpec) -> list:
    if "diap" not in spec.algorithms:
        raise ValueError("sweep-p needs the diap algorithm")
    return sorted(_run_cell(spec, spec.config, "sweep-p", spec.p_values), key=ResultRecord.sort_key)


def run_sweep_size(spec: ExperimentSpec) -> list:
    records = []
    for m, n in spec.size_values:
        config = replace(spec.config, m=m, n=n)
        records += _run_cell(spec, config, "sweep-size", spec.p_values[:1])
    return sorted(records, key=ResultRecord.sort_key)


def run_table1(spec: ExperimentSpec) -> list:
    return sorted(_run_cell(spec, spec.config, "table1", spec.p_values), key=ResultRecord.sort_key)


def run_single(spec: ExperimentSpec) -> list:
    return sorted(_run_cell(spec, spec.config, "single", spec.p_values[:1]), key=ResultRecord.sort_key)


def average_traces(traces) -> list:
    """Per-iteration mean of the surviving grid sizes; short traces are padded with their final value."""
    length = max(len(t) for t in traces)
    tx = np.array([t.tx_support + [t.tx_support[-1]] * (length - len(t)) for t in traces], dtype=float)
    rx = np.array([t.rx_support + [t.rx_support[-1]] * (length - len(t)) for t in traces], dtype=float)
    return [TraceRow(k + 1, float(tx[:, k].mean()), float(rx[:, k].mean()), len(traces)) for k in range(length)]


def run_trace(spec: ExperimentSpec):
    """DIAP runs with their dimension traces; returns ``(records, trace_rows)``."""
    spec = replace(spec, algorithms=("diap",))
    records, traces = _run_cell(spec, spec.config, "trace", spec.p_values[:1], with_traces=True)
    return sorted(records, key=ResultRecord.sort_key), average_traces(traces)


def _subset_profiles(diff, size, count):
    """``|sum_{i in S} diff[:, i]|`` for every ``count``-subset ``S`` (lexicographic)."""
    subsets = list(combinations(range(size), count))
    index = np.array(subsets, dtype=int).reshape(len(subsets), count)
    return subsets, np.abs(diff[:, index].sum(axis=2)).T


def exhaustive_search(config: ProblemConfig, limit: int = ORACLE_LIMIT):
    """Global minimum coherence over all placements; returns ``(placement, coherence)``."""
    total = comb(config.m_tilde, config.m) * comb(config.n_tilde, config.n)
    if total > limit:
        raise ValueError(f"{total} placements exceed the exhaustive-search limit {limit}")
    diffs = difference_vectors(config)
    tx_sets, tx_prof = _subset_profiles(diffs.a_diff, config.m_tilde, config.m)
    rx_sets, rx_prof = _subset_profiles(diffs.b_diff, config.n_tilde, config.n)
    chunk = max(1, int(4e6 // max(1, rx_prof.size)))
    best_value, best_pair = math.inf, None
    for lo in range(0, len(tx_sets), chunk):
        peaks = np.max(tx_prof[lo:lo + chunk, None, :] * rx_prof[None, :, :], axis=2)
        k = int(np.argmin(peaks))
        i, j = divmod(k, peaks.shape[1])
        if peaks[i, j] < best_value - 1e-12:
            best_value, best_pair = float(peaks[i, j]), (lo + i, j)
    placement = Placement(tx_sets[best_pair[0]], rx_sets[best_pair[1]])
    return placement, coherence_direct(placement, config)


def run_oracle(spec: ExperimentSpec) -> ResultRecord:
    config = spec.config
    start = time.perf_counter()
    placement, _ = exhaustive_search(config)
    elapsed = time.perf_counter() - start
    return _record("oracle", "exhaustive", config, None, spec.base_seed, placement, elapsed, 0)


def summarize(records) -> list:
    """Mean and sample standard deviation per (experiment, algorithm, M, N, p) cell."""
    cells = {}
    for r in records:
        cells.setdefault((r.experiment, r.algorithm, r.m, r.n, r.m_tilde, r.n_tilde, r.g_count, r.p), []).append(r)
    rows = []
    for key, group in sorted(cells.items(), key=lambda kv: kv[1][0].sort_key()):
        coh = np.array([r.coherence for r in group])
        rt = np.array([r.runtime_ms for r in group])
        it = np.array([r.outer_iterations for r in group], dtype=float)
        std = (lambda a: float(a.std(ddof=1)) if a.size > 1 else 0.0)
        rows.append({
            "experiment": key[0], "algorithm": key[1], "m": key[2], "n": key[3],
            "m_tilde": key[4], "n_tilde": key[5], "g_count": key[6], "p": key[7],
            "runs": len(group),
            "coherence_mean": float(coh.mean()), "coherence_std": std(coh),
            "runtime_ms_mean": float(rt.mean()), "runtime_ms_std": std(rt),
            "outer_iterations_mean": float(it.mean()),
        })
    return rows


def _writer(handle, header):
    return csv.DictWriter(handle, fieldnames=header, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")


def write_records(records, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = _writer(handle, RECORD_FIELDS)
        writer.writeheader()
        for r in sorted(records, key=ResultRecord.sort_key):
            writer.writerow(asdict(r))
    return path


def read_records(path) -> list:
    out = []
    with Path(path).open(newline="") as handle:
        for row in csv.DictReader(handle, quoting=csv.QUOTE_NONNUMERIC):
            out.append(ResultRecord(
                experiment=row["experiment"], algorithm=row["algorithm"],
                m=int(row["m"]), n=int(row["n"]), m_tilde=int(row["m_tilde"]), n_tilde=int(row["n_tilde"]),
                g_count=int(row["g_count"]), p=None if row["p"] == "" else float(row["p"]),
                seed=int(row["seed"]), coherence=float(row["coherence"]), runtime_ms=float(row["runtime_ms"]),
                outer_iterations=int(row["outer_iterations"]),
                tx_indices=row["tx_indices"], rx_indices=row["rx_indices"],
            ))
    return out


def summary_path(path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}-summary{path.suffix or '.csv'}")


def trace_path(path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}-trace{path.suffix or '.csv'}")


def write_summary(records, path) -> Path:
    rows = summarize(records)
    header = ["experiment", "algorithm", "m", "n", "m_tilde", "n_tilde", "g_count", "p", "runs",
              "coherence_mean", "coherence_std", "runtime_ms_mean", "runtime_ms_std", "outer_iterations_mean"]
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = _writer(handle, header)
        writer.writeheader()
        writer.writerows(rows)
    return path


def write_trace(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = _writer(handle, [f.name for f in fields(TraceRow)])
        writer.writeheader()
        writer.writerows(asdict(r) for r in rows)
    return path


def run_experiment(spec: ExperimentSpec) -> dict:
    """Dispatch on ``spec.experiment`` and write the CSV files when ``output_path`` is set."""
    trace_rows = None
    if spec.experiment == "sweep-p":
        records = run_sweep_p(spec)
    elif spec.experiment == "sweep-size":
        records = run_sweep_size(spec)
    elif spec.experiment == "table1":
        records = run_table1(spec)
    elif spec.experiment == "trace":
        records, trace_rows = run_trace(spec)
    elif spec.experiment == "oracle":
        records = [run_oracle(spec)]
    else:
        records = run_single(spec)

    files = {}
    if spec.output_path:
        files["records"] = write_records(records, spec.output_path)
        files["summary"] = write_summary(records, summary_path(spec.output_path))
        if trace_rows is not None:
            files["trace"] = write_trace(trace_rows, trace_path(spec.output_path))
    return {"records": records, "trace": trace_rows, "files": files}
