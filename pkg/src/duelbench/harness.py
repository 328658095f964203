"""Experiment harness: built-in datasets, run configurations, the seeded
runner with CSV output, aggregation, and the quadratic-form bound check.

Results are long-format CSV files (experiment, algorithm, iteration, t,
regret), one file per (experiment, dataset, horizon) cell group, each with
a key=value metadata sidecar.  Given the same master seed the output is
byte-identical across runs and worker counts.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algos import (
    Exp3PSparring,
    Exp3Sparring,
    Exp3Unif,
    Rex3,
    UcbUnif,
    VnUnif,
    WinnerStaysWeak,
    eta_borda,
    eta_utility,
)
from .core import (
    ConfigurationError,
    ContractViolation,
    PreferenceMatrix,
    RegretLedger,
    UtilityVector,
    checkpoint_grid,
)
from .envs import (
    BlockEnv,
    StochasticPreferenceEnv,
    UtilityEnv,
    build_block_sequence,
    derive_rng,
    load_preference_matrix,
)
from .losses import copeland_loss


class DatasetUnavailable(ConfigurationError):
    """An external dataset was requested without its backing file."""

# ---------------------------------------------------------------------------
# Built-in datasets
# ---------------------------------------------------------------------------

# Interleaving experiments on a preprint search engine, K = 6.  The entry
# pair (4,5)/(5,4) is printed inconsistently in some sources; the values
# below satisfy p_ij + p_ji = 1.
_ARXIV6 = np.array([
    [0.50, 0.55, 0.55, 0.54, 0.61, 0.61],
    [0.45, 0.50, 0.55, 0.55, 0.58, 0.60],
    [0.45, 0.45, 0.50, 0.54, 0.51, 0.56],
    [0.46, 0.45, 0.46, 0.50, 0.54, 0.50],
    [0.39, 0.42, 0.49, 0.46, 0.50, 0.51],
    [0.39, 0.40, 0.44, 0.50, 0.49, 0.50],
])

# Condorcet winner plus a non-transitive cycle among the remaining arms.
_CYCLIC4 = np.array([
    [0.5, 0.6, 0.6, 0.6],
    [0.4, 0.5, 0.9, 0.1],
    [0.4, 0.1, 0.5, 0.9],
    [0.4, 0.9, 0.1, 0.5],
])

# Borda winner is arm 2; the game equilibrium is a point mass on arm 1.
_BORDA_VN5 = np.array([
    [0.50, 1.0, 0.55, 0.55, 0.55],
    [0.00, 0.5, 1.00, 1.00, 1.00],
    [0.45, 0.0, 0.50, 0.50, 0.50],
    [0.45, 0.0, 0.50, 0.50, 0.50],
    [0.45, 0.0, 0.50, 0.50, 0.50],
])

# Borda winner is arm 1 but the Copeland winner is arm 2.
_COPELAND5 = np.array([
    [0.5, 1.0, 1.0, 0.4, 0.4],
    [0.0, 0.5, 0.6, 0.6, 0.6],
    [0.0, 0.4, 0.5, 0.4, 0.6],
    [0.6, 0.4, 0.6, 0.5, 0.4],
    [0.6, 0.4, 0.4, 0.6, 0.5],
])

# Equilibrium uniform on arms 1-3; the Copeland winner is arm 4.
_COPELAND_VN5 = np.array([
    [0.500, 0.75, 0.25, 0.75, 0.025],
    [0.250, 0.50, 0.75, 0.40, 0.750],
    [0.750, 0.25, 0.50, 0.40, 0.750],
    [0.250, 0.60, 0.60, 0.50, 0.750],
    [0.975, 0.25, 0.25, 0.25, 0.500],
])


def _vn16_matrix() -> np.ndarray:
    # 16-arm extension: same equilibrium (uniform on arms 1-3) and the same
    # kind of unique Borda winner (arm 4), with eleven filler arms that make
    # uniform exploration expensive.
    k = 16
    p = np.full((k, k), 0.5)
    p[:5, :5] = np.array([
        [0.500, 0.75, 0.25, 1.00, 0.025],
        [0.250, 0.50, 0.75, 1.00, 0.750],
        [0.750, 0.25, 0.50, 1.00, 0.750],
        [0.000, 0.00, 0.00, 0.50, 0.750],
        [0.975, 0.25, 0.25, 0.25, 0.500],
    ])
    p[:5, 5:] = 0.8
    p[5:, :5] = 0.2
    p[3, 5:] = 1.0
    p[5:, 3] = 0.0
    return p


def _arithmetic8() -> tuple[np.ndarray, np.ndarray]:
    # p_ij = 1/2 + (j - i)/20, induced by utilities x_i = 1 - i/10 (1-based)
    # under the linear link.
    idx = np.arange(1, 9, dtype=np.float64)
    p = 0.5 + (idx[None, :] - idx[:, None]) / 20.0
    x = 1.0 - idx / 10.0
    return p, x


@dataclass(frozen=True)
class Dataset:
    """A named preference matrix, optionally with generating utilities."""

    name: str
    preference: PreferenceMatrix
    utilities: UtilityVector | None = None


BUILTIN_DATASET_IDS = ("arxiv6", "cyclic4", "borda_vn5", "copeland5",
                       "copeland_vn5", "vn16", "arithmetic8", "sushi16")


def builtin_dataset(dataset_id: str, dataset_file=None) -> Dataset:
    """Look up a built-in dataset; ``sushi16`` is loaded from an external file."""
    if dataset_id == "arxiv6":
        return Dataset("arxiv6", PreferenceMatrix(_ARXIV6))
    if dataset_id == "cyclic4":
        return Dataset("cyclic4", PreferenceMatrix(_CYCLIC4))
    if dataset_id == "borda_vn5":
        return Dataset("borda_vn5", PreferenceMatrix(_BORDA_VN5))
    if dataset_id == "copeland5":
        return Dataset("copeland5", PreferenceMatrix(_COPELAND5))
    if dataset_id == "copeland_vn5":
        return Dataset("copeland_vn5", PreferenceMatrix(_COPELAND_VN5))
    if dataset_id == "vn16":
        return Dataset("vn16", PreferenceMatrix(_vn16_matrix()))
    if dataset_id == "arithmetic8":
        p, x = _arithmetic8()
        return Dataset("arithmetic8", PreferenceMatrix(p), UtilityVector(x))
    if dataset_id == "sushi16":
        if dataset_file is None:
            raise DatasetUnavailable(
                "dataset sushi16 is external; pass the matrix file path")
        return Dataset("sushi16", load_preference_matrix(dataset_file))
    raise ConfigurationError(f"unknown dataset {dataset_id!r}")


# ---------------------------------------------------------------------------
# Experiment specifications
# ---------------------------------------------------------------------------

#: Algorithm registry: name -> constructor(k, horizon, rng, params).
def _make_exp3_unif(k, horizon, rng, params):
    eta = params.get("eta", "borda")
    if eta == "borda":
        eta = eta_borda(k, horizon)
    elif eta == "utility":
        eta = eta_utility(k, horizon)
    return Exp3Unif(k, float(eta), rng)


ALGORITHMS = {
    "exp3_unif": _make_exp3_unif,
    "exp3_sparring": lambda k, horizon, rng, params: Exp3Sparring(k, rng),
    "exp3p_sparring": lambda k, horizon, rng, params: Exp3PSparring(
        k, horizon, params.get("delta", 0.1), rng),
    "vn_unif": lambda k, horizon, rng, params: VnUnif(
        k, rng, params.get("solver_tol", 1e-3),
        params.get("solver_iterations", 4000)),
    "ucb_unif": lambda k, horizon, rng, params: UcbUnif(
        k, params.get("alpha", 0.51), rng),
    "wsw": lambda k, horizon, rng, params: WinnerStaysWeak(k, rng),
    "rex3": lambda k, horizon, rng, params: Rex3(
        k, horizon, rng, params.get("gamma")),
}


@dataclass(frozen=True)
class AlgorithmConfig:
    """Registry key plus constructor overrides for one algorithm entry."""

    key: str
    params: dict = field(default_factory=dict)

    def build(self, k: int, horizon: int, rng):
        if self.key not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.key!r}")
        return ALGORITHMS[self.key](k, horizon, rng, self.params)


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment family: environment kind, datasets, loss model,
    horizons, iteration count and the algorithm roster."""

    name: str
    kind: str                      # stochastic | block | utility
    datasets: tuple[str, ...]
    loss_model: str
    horizons: tuple[int, ...]
    iterations: int
    algorithms: tuple[AlgorithmConfig, ...]
    combiner: str = "weak"
    tau: int | None = None
    checkpoint_count: int = 200

    def violations(self) -> list[str]:
        problems = []
        if self.kind not in ("stochastic", "block", "utility"):
            problems.append(f"unknown environment kind {self.kind!r}")
        if not self.horizons:
            problems.append("horizon list is empty")
        if any(t < 1 for t in self.horizons):
            problems.append("horizons must be positive")
        if self.iterations < 1:
            problems.append("iterations must be at least 1")
        if not self.datasets:
            problems.append("dataset list is empty")
        if not self.algorithms:
            problems.append("algorithm list is empty")
        if self.kind == "block" and (self.tau is None or self.tau < 1):
            problems.append("block experiments need a block length tau >= 1")
        if self.kind == "utility" and self.loss_model != "utility":
            problems.append("utility environments imply the utility loss model")
        if self.kind == "stochastic" and self.loss_model not in (
                "borda", "von-neumann"):
            problems.append(
                f"stochastic environments support borda or von-neumann "
                f"losses, not {self.loss_model!r}")
        if self.kind == "block" and self.loss_model not in (
                "borda", "copeland", "von-neumann"):
            problems.append(
                f"block environments support borda, copeland or von-neumann "
                f"losses, not {self.loss_model!r}")
        if self.combiner not in ("weak", "strong"):
            problems.append(f"unknown regret combiner {self.combiner!r}")
        for cfg in self.algorithms:
            if cfg.key not in ALGORITHMS:
                problems.append(f"unknown algorithm {cfg.key!r}")
        return problems


EXPERIMENTS = {
    "borda_stochastic": ExperimentSpec(
        name="borda_stochastic", kind="stochastic",
        datasets=("arxiv6", "cyclic4", "sushi16"), loss_model="borda",
        horizons=(10**4, 10**5), iterations=100,
        algorithms=(AlgorithmConfig("exp3_unif", {"eta": "borda"}),
                    AlgorithmConfig("ucb_unif", {"alpha": 0.51}),
                    AlgorithmConfig("wsw")),
    ),
    "borda_vn": ExperimentSpec(
        name="borda_vn", kind="block", datasets=("borda_vn5",),
        loss_model="borda", horizons=(10**3, 10**4, 10**5), iterations=100,
        tau=20,
        algorithms=(AlgorithmConfig("exp3_unif", {"eta": "borda"}),
                    AlgorithmConfig("exp3_sparring"),
                    AlgorithmConfig("exp3p_sparring", {"delta": 0.1}),
                    AlgorithmConfig("vn_unif")),
    ),
    "copeland_exp3": ExperimentSpec(
        name="copeland_exp3", kind="block", datasets=("copeland5",),
        loss_model="copeland", horizons=(10**3, 10**4), iterations=100,
        tau=10,
        algorithms=(AlgorithmConfig("exp3_unif", {"eta": "borda"}),),
    ),
    "copeland_vn": ExperimentSpec(
        name="copeland_vn", kind="block", datasets=("copeland_vn5",),
        loss_model="copeland", horizons=(10**3, 10**4), iterations=100,
        tau=40,
        algorithms=(AlgorithmConfig("exp3_sparring"),
                    AlgorithmConfig("exp3p_sparring", {"delta": 0.1}),
                    AlgorithmConfig("vn_unif")),
    ),
    "vonneumann": ExperimentSpec(
        name="vonneumann", kind="block", datasets=("vn16",),
        loss_model="von-neumann", horizons=(10**3, 10**4, 10**5),
        iterations=10, tau=40,
        algorithms=(AlgorithmConfig("exp3_unif", {"eta": "borda"}),
                    AlgorithmConfig("exp3_sparring"),
                    AlgorithmConfig("exp3p_sparring", {"delta": 0.1}),
                    AlgorithmConfig("vn_unif")),
    ),
    "utility_stochastic": ExperimentSpec(
        name="utility_stochastic", kind="utility", datasets=("arithmetic8",),
        loss_model="utility", horizons=(10**4, 10**5), iterations=100,
        algorithms=(AlgorithmConfig("exp3_unif", {"eta": "utility"}),
                    AlgorithmConfig("ucb_unif", {"alpha": 0.51}),
                    AlgorithmConfig("wsw"),
                    AlgorithmConfig("rex3")),
    ),
}


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

@dataclass
class CellResult:
    """Outcome of one (dataset, horizon, algorithm, iteration) cell."""

    dataset: str
    horizon: int
    algorithm: str
    iteration: int
    checkpoints: list[tuple[int, float]]
    error: str | None = None


def _experiment_label(family: str, dataset: str, horizon: int) -> str:
    return f"{family}/{dataset}/T{horizon}"


def _build_env(spec: ExperimentSpec, dataset: Dataset, horizon: int,
               master_seed: int, algorithm: str, iteration: int):
    label = _experiment_label(spec.name, dataset.name, horizon)
    env_rng = derive_rng(master_seed, label, algorithm, iteration, "env")
    if spec.kind == "stochastic":
        return StochasticPreferenceEnv(dataset.preference, spec.loss_model,
                                       horizon, env_rng)
    if spec.kind == "utility":
        if dataset.utilities is None:
            raise ConfigurationError(
                f"dataset {dataset.name!r} carries no utilities")
        return UtilityEnv(dataset.utilities, horizon, env_rng)
    # one block sequence per (experiment, dataset, horizon), shared by every
    # algorithm and iteration: repeats average out policy randomness only
    block_rng = derive_rng(master_seed, label, "block-sequence")
    block = build_block_sequence(dataset.preference, spec.tau, block_rng)
    return BlockEnv(block, spec.loss_model, horizon, env_rng)


def run_single_cell(spec: ExperimentSpec, dataset: Dataset, horizon: int,
                    algo: AlgorithmConfig, iteration: int,
                    master_seed: int) -> CellResult:
    """Run one cell and return its regret checkpoints."""
    label = _experiment_label(spec.name, dataset.name, horizon)
    env = _build_env(spec, dataset, horizon, master_seed, algo.key, iteration)
    policy_rng = derive_rng(master_seed, label, algo.key, iteration, "policy")
    policy = algo.build(env.k, horizon, policy_rng)
    grid = checkpoint_grid(horizon, spec.checkpoint_count)

    if spec.loss_model == "copeland":
        checkpoints = _run_copeland(env, policy, spec.combiner, horizon, grid)
    else:
        ledger = RegretLedger(env.k, spec.combiner, grid)
        for t in range(1, horizon + 1):
            pair = policy.select()
            y, loss = env.round(t, pair)
            policy.observe(y)
            ledger.record(pair, loss)
        checkpoints = ledger.checkpoints
    return CellResult(dataset.name, horizon, policy.name, iteration,
                      checkpoints)


def _run_copeland(env, policy, combiner: str, horizon: int,
                  grid: list[int]) -> list[tuple[int, float]]:
    # record the pairs, then price them against the loss vector derived
    # from the full-horizon cumulative outcome matrix
    first = np.empty(horizon, dtype=np.int64)
    second = np.empty(horizon, dtype=np.int64)
    for t in range(1, horizon + 1):
        pair = policy.select()
        y, _ = env.round(t, pair)
        policy.observe(y)
        first[t - 1], second[t - 1] = pair
    losses = copeland_loss(env.cumulative_outcome_matrix(horizon)).values
    if combiner == "weak":
        pair_loss = np.minimum(losses[first], losses[second])
    else:
        pair_loss = (losses[first] + losses[second]) / 2.0
    cumulative = np.cumsum(pair_loss)
    best = losses.min()
    return [(t, float(cumulative[t - 1] - t * best)) for t in grid]


def _cell_args(spec, dataset, horizon, algo, iteration, master_seed):
    return (spec, dataset, horizon, algo, iteration, master_seed)


def _run_cell_safe(args) -> CellResult:
    spec, dataset, horizon, algo, iteration, master_seed = args
    try:
        return run_single_cell(spec, dataset, horizon, algo, iteration,
                               master_seed)
    except Exception as exc:  # noqa: BLE001 - cell isolation is the point
        name = ALGORITHMS_DISPLAY.get(algo.key, algo.key)
        return CellResult(dataset.name, horizon, name, iteration, [],
                          error=f"{type(exc).__name__}: {exc}")


#: Display names used in CSV rows even when a cell fails before construction.
ALGORITHMS_DISPLAY = {
    "exp3_unif": Exp3Unif.name,
    "exp3_sparring": Exp3Sparring.name,
    "exp3p_sparring": Exp3PSparring.name,
    "vn_unif": VnUnif.name,
    "ucb_unif": UcbUnif.name,
    "wsw": WinnerStaysWeak.name,
    "rex3": Rex3.name,
}


@dataclass
class RunSummary:
    """What a harness invocation produced."""

    files: list[str]
    failed_cells: list[tuple[str, int, str, int, str]]
    warnings: list[str]

    @property
    def ok(self) -> bool:
        return not self.failed_cells


def _preflight(spec: ExperimentSpec, datasets: list[Dataset]) -> list[str]:
    problems = spec.violations()
    if spec.kind == "block":
        for ds in datasets:
            p = ds.preference.p
            k = p.shape[0]
            for i in range(k):
                for j in range(i + 1, k):
                    wins = spec.tau * p[i, j]
                    if abs(wins - round(wins)) > 1e-6:
                        problems.append(
                            f"dataset {ds.name}: tau * p[{i + 1},{j + 1}] = "
                            f"{wins!r} is not an integer")
    if spec.kind == "utility":
        for ds in datasets:
            if ds.utilities is None:
                problems.append(f"dataset {ds.name} carries no utilities")
    return problems


def _algorithm_metadata(spec: ExperimentSpec, k: int, horizon: int,
                        master_seed: int) -> dict[str, str]:
    meta = {}
    for cfg in spec.algorithms:
        rng = derive_rng(master_seed, "metadata")
        try:
            policy = cfg.build(k, horizon, rng)
            record = policy.get_params()
            name = policy.name
        except (ConfigurationError, ContractViolation) as exc:
            record = {"error": str(exc)}
            name = ALGORITHMS_DISPLAY.get(cfg.key, cfg.key)
        meta[name] = json.dumps(record, sort_keys=True)
    return meta


def run_experiment(spec: ExperimentSpec, master_seed: int, out_dir,
                   workers: int = 1, dataset_file=None) -> RunSummary:
    """Run every cell of ``spec`` and write CSV plus metadata sidecars.

    Cells are independent; failures are recorded in the sidecar and leave
    the other cells untouched.  Output is written by a single writer in a
    fixed cell order, so equal seeds give byte-identical files.
    """
    warnings = []
    datasets = []
    for ds_id in spec.datasets:
        try:
            datasets.append(builtin_dataset(ds_id, dataset_file))
        except DatasetUnavailable as exc:
            warnings.append(f"skipping dataset {ds_id}: {exc}")
    problems = _preflight(spec, datasets)
    if problems:
        raise ConfigurationError(
            "invalid experiment spec:\n  " + "\n  ".join(problems))
    if not datasets:
        raise ConfigurationError("no usable datasets: " + "; ".join(warnings))

    os.makedirs(out_dir, exist_ok=True)
    files = []
    failed = []
    for dataset in datasets:
        for horizon in spec.horizons:
            cells = [_cell_args(spec, dataset, horizon, algo, iteration,
                                master_seed)
                     for algo in spec.algorithms
                     for iteration in range(1, spec.iterations + 1)]
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(_run_cell_safe, cells,
                                            chunksize=1))
            else:
                results = [_run_cell_safe(args) for args in cells]
            path = _write_cell_group(spec, dataset, horizon, results,
                                     master_seed, out_dir)
            files.append(path)
            failed.extend((spec.name, horizon, r.algorithm, r.iteration,
                           r.error) for r in results if r.error)
    return RunSummary(files=files, failed_cells=failed, warnings=warnings)


def _write_cell_group(spec: ExperimentSpec, dataset: Dataset, horizon: int,
                      results: list[CellResult], master_seed: int,
                      out_dir) -> str:
    experiment = f"{spec.name}_{dataset.name}"
    stem = f"{experiment}_{horizon}"
    csv_path = os.path.join(out_dir, stem + ".csv")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["experiment", "algorithm", "iteration", "t", "regret"])
    for r in results:
        for t, regret in r.checkpoints:
            writer.writerow([experiment, r.algorithm, r.iteration, t,
                             repr(regret)])
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())

    meta = {
        "experiment": experiment,
        "family": spec.name,
        "dataset": dataset.name,
        "horizon": str(horizon),
        "kind": spec.kind,
        "loss_model": spec.loss_model,
        "combiner": spec.combiner,
        "iterations": str(spec.iterations),
        "checkpoint_count": str(spec.checkpoint_count),
        "seed": str(master_seed),
    }
    if spec.tau is not None:
        meta["tau"] = str(spec.tau)
    for name, record in _algorithm_metadata(spec, dataset.preference.k,
                                            horizon, master_seed).items():
        meta[f"algorithm.{name}"] = record
    fails = [r for r in results if r.error]
    if fails:
        meta["failed_cells"] = "; ".join(
            f"{r.algorithm}#{r.iteration}: {r.error}" for r in fails)
    with open(os.path.join(out_dir, stem + ".meta"), "w",
              encoding="utf-8") as fh:
        for key in sorted(meta):
            fh.write(f"{key}={meta[key]}\n")
    return csv_path


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def read_metadata(path) -> dict[str, str]:
    meta = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if "=" in line:
                key, value = line.split("=", 1)
                meta[key] = value
    return meta


def aggregate(in_dir, out_path) -> int:
    """Collapse run CSVs to per-(experiment, horizon, algorithm, t) rows.

    Writes columns experiment, horizon, algorithm, t, count, mean, std
    (population std over iterations).  Returns the number of rows written.
    CSV files without a readable metadata sidecar are skipped with a
    warning on stderr.
    """
    groups: dict[tuple[str, int, str, int], list[float]] = {}
    for name in sorted(os.listdir(in_dir)):
        if not name.endswith(".csv"):
            continue
        meta_path = os.path.join(in_dir, name[:-4] + ".meta")
        if not os.path.exists(meta_path):
            print(f"warning: {name} has no metadata sidecar, skipped",
                  file=sys.stderr)
            continue
        horizon = int(read_metadata(meta_path)["horizon"])
        with open(os.path.join(in_dir, name), "r", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                key = (row["experiment"], horizon, row["algorithm"],
                       int(row["t"]))
                groups.setdefault(key, []).append(float(row["regret"]))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["experiment", "horizon", "algorithm", "t", "count",
                     "mean", "std"])
    for key in sorted(groups):
        values = np.array(groups[key])
        writer.writerow([key[0], key[1], key[2], key[3], values.size,
                         repr(float(values.mean())),
                         repr(float(values.std()))])
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    return len(groups)


# ---------------------------------------------------------------------------
# Quadratic-form bound check
# ---------------------------------------------------------------------------

def _pairwise_square_sum(x: np.ndarray) -> np.ndarray:
    """sum_ij (x_i - x_j + 1)^2 for each row of a batch, evaluated literally."""
    d = x[:, :, None] - x[:, None, :] + 1.0
    return (d * d).sum(axis=(1, 2))


@dataclass
class LemmaReport:
    """Outcome of the brute-force search for violations of the bound
    sum_ij (x_i - x_j + 1)^2 <= 3 n^2 / 2 over [0, 1]^n."""

    n_max: int
    holds: bool
    max_value: float
    max_n: int
    max_witness: np.ndarray
    per_n: list[tuple[int, float, float]]   # (n, max found, bound)
    counterexample: tuple[int, np.ndarray, float] | None = None


def verify_lemma(n_max: int, grid_points: int = 5,
                 random_trials: int = 10_000, seed: int = 0) -> LemmaReport:
    """Grid + random search for the pairwise-square bound, plus the
    half-zeros witness that attains it for even n.

    The grid is exhaustive for n <= 4; random vectors are spread over all
    n up to ``n_max``.
    """
    if n_max < 1:
        raise ContractViolation("n_max must be at least 1")
    rng = np.random.default_rng(seed)
    grid_values = np.linspace(0.0, 1.0, grid_points)
    report_rows = []
    overall = (0.0, 1, np.zeros(1))
    counterexample = None
    trials_per_n = max(1, random_trials // n_max)
    for n in range(1, n_max + 1):
        bound = 1.5 * n * n
        candidates = [np.ones((1, n)) * 0.0]
        witness = np.zeros((1, n))
        witness[0, n // 2:] = 1.0
        candidates.append(witness)
        if n <= 4:
            grid = np.array(list(itertools.product(grid_values, repeat=n)))
            candidates.append(grid)
        candidates.append(rng.random((trials_per_n, n)))
        best_val, best_x = -np.inf, None
        for batch in candidates:
            vals = _pairwise_square_sum(batch)
            i = int(np.argmax(vals))
            if vals[i] > best_val:
                best_val, best_x = float(vals[i]), batch[i]
            if vals[i] > bound + 1e-9 and counterexample is None:
                counterexample = (n, batch[i].copy(), float(vals[i]))
        report_rows.append((n, best_val, bound))
        if best_val > overall[0]:
            overall = (best_val, n, best_x.copy())
    return LemmaReport(
        n_max=n_max,
        holds=counterexample is None,
        max_value=overall[0],
        max_n=overall[1],
        max_witness=overall[2],
        per_n=report_rows,
        counterexample=counterexample,
    )
