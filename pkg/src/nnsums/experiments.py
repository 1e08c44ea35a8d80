"""Monte Carlo experiment harness: convergence, divergence, entropy and
moment-probe runs with reproducible seeds and CSV/JSON reporting.

Replication streams are derived from (seed, n, replication, attempt)
through a SeedSequence, so results do not depend on execution order and
identical configurations reproduce byte-identical reports.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import norm as _norm

from .conditions import check_divergence, condition_report
from .densities import DensityModel, model_from_config
from .errors import ConditionRefused, ConfigError, DegenerateStatistic, InvalidRho
from .limits import EntropyValue, entropy_from_integral, gamma_constant
from .neighbors import statistic_power
from .points import PointSet

#: Named weight functions accepted wherever an exponent would go. All have
#: polynomial growth, which is what the limit theory asks of them.
PHI_REGISTRY = {
    "identity": lambda t: t,
    "sqrt": np.sqrt,
    "square": lambda t: t * t,
    "log1p": np.log1p,
    "capped": lambda t: np.minimum(t, 1.0),
}


def resolve_phi(name: str):
    try:
        return PHI_REGISTRY[name]
    except KeyError:
        raise ConfigError(
            f"unknown weight function {name!r}; expected one of {sorted(PHI_REGISTRY)}"
        ) from None


_MAX_RESAMPLES = 5


@dataclass(frozen=True)
class EstimatorConfig:
    """One statistic evaluation plan: model, rank, exponent, sizes, seeds."""

    model: DensityModel
    j: int = 1
    alpha: float | None = None
    phi: str | None = None
    n_grid: tuple = ()
    replications: int = 1
    seed: int = 0
    q: int = 1

    def __post_init__(self):
        if self.j < 1:
            raise ConfigError(f"j must be >= 1, got {self.j}")
        if self.q not in (1, 2):
            raise ConfigError(f"q must be 1 or 2, got {self.q}")
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed!r}")
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if any(n < 1 for n in grid):
            raise ConfigError("sample sizes must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"n_grid must be strictly increasing, got {grid}")
        if self.alpha is not None and not math.isfinite(self.alpha):
            raise ConfigError(f"alpha must be finite, got {self.alpha}")
        if self.phi is not None:
            resolve_phi(self.phi)

    @classmethod
    def from_dict(cls, cfg: dict, seed_override: int | None = None) -> "EstimatorConfig":
        if not isinstance(cfg, dict):
            raise ConfigError("configuration must be a JSON object")
        model = model_from_config(cfg)
        seed = cfg.get("seed", 0) if seed_override is None else seed_override
        alpha = cfg.get("alpha")
        return cls(
            model=model,
            j=cfg.get("j", 1),
            alpha=float(alpha) if alpha is not None else None,
            phi=cfg.get("phi"),
            n_grid=tuple(cfg.get("n_grid", ())),
            replications=cfg.get("replications", 1),
            seed=seed,
            q=cfg.get("q", 1),
        )

    def require_alpha(self) -> float:
        if self.alpha is None:
            raise ConfigError("this experiment needs a numeric exponent 'alpha'")
        return self.alpha


@dataclass(frozen=True)
class DivergenceSchedule:
    """Shell indices with the witness sample sizes n(k) = ceil(1 / F(A_k))."""

    k_grid: tuple
    n_of_k: tuple

    def __post_init__(self):
        if len(self.k_grid) != len(self.n_of_k):
            raise ConfigError("schedule lengths differ")
        if any(b <= a for a, b in zip(self.k_grid, self.k_grid[1:])):
            raise ConfigError("k_grid must be strictly increasing")
        if any(b < a for a, b in zip(self.n_of_k, self.n_of_k[1:])):
            raise ConfigError("witness sizes must be nondecreasing in k")

    @classmethod
    def from_model(cls, model: DensityModel, k_grid) -> "DivergenceSchedule":
        k_grid = tuple(int(k) for k in k_grid)
        sizes = []
        for k in k_grid:
            mass = model.annulus_mass(k)
            if mass <= 0.0:
                raise ConfigError(f"annulus {k} carries no mass; cannot schedule it")
            sizes.append(math.ceil(1.0 / mass))
        return cls(k_grid=k_grid, n_of_k=tuple(sizes))


@dataclass(frozen=True)
class MannKendallResult:
    """Monotone-trend statistic: S and the one-sided increasing p-value."""

    s: int
    p_increasing: float


def mann_kendall_increasing(values) -> MannKendallResult:
    """Mann-Kendall test for an increasing trend.

    Exact permutation p-value up to 8 observations, normal approximation
    with continuity correction beyond that.
    """
    vals = [float(v) for v in values]
    m = len(vals)

    def s_stat(seq) -> int:
        return sum(
            (seq[b] > seq[a]) - (seq[b] < seq[a])
            for a in range(len(seq))
            for b in range(a + 1, len(seq))
        )

    s = s_stat(vals)
    if m < 3:
        return MannKendallResult(s=s, p_increasing=1.0 if s <= 0 else 0.5)
    if m <= 8:
        total = 0
        at_least = 0
        for perm in itertools.permutations(vals):
            total += 1
            if s_stat(perm) >= s:
                at_least += 1
        return MannKendallResult(s=s, p_increasing=at_least / total)
    var = m * (m - 1) * (2 * m + 5) / 18.0
    if s > 0:
        z = (s - 1) / math.sqrt(var)
    elif s < 0:
        z = (s + 1) / math.sqrt(var)
    else:
        z = 0.0
    return MannKendallResult(s=s, p_increasing=float(_norm.sf(z)))


@dataclass(frozen=True)
class RunRecord:
    n: int
    replication: int
    value: float


@dataclass(frozen=True)
class SizeSummary:
    n: int
    mean: float
    lq_error: float | None
    std_error: float


_CSV_COLUMNS = (
    "experiment",
    "model",
    "d",
    "j",
    "alpha",
    "q",
    "n",
    "replication",
    "value",
    "target",
    "abs_error",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


@dataclass
class ExperimentResult:
    """Per-replication records plus per-size summaries of one experiment."""

    experiment: str
    model_name: str
    d: int
    j: int
    alpha: float | None
    q: int
    target: float | str | None
    records: list = field(default_factory=list)
    summaries: list = field(default_factory=list)
    trend: dict = field(default_factory=dict)
    phi: str | None = None

    def _target_cell(self):
        if isinstance(self.target, float) and not math.isfinite(self.target):
            return "divergent"
        return self.target

    def csv_rows(self):
        target = self._target_cell()
        numeric_target = isinstance(target, float)
        for rec in sorted(self.records, key=lambda r: (r.n, r.replication)):
            abs_error = abs(rec.value - target) if numeric_target else None
            yield {
                "experiment": self.experiment,
                "model": self.model_name,
                "d": self.d,
                "j": self.j,
                "alpha": self.alpha,
                "q": self.q,
                "n": rec.n,
                "replication": rec.replication,
                "value": rec.value,
                "target": target,
                "abs_error": abs_error,
            }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_COLUMNS)
            for row in self.csv_rows():
                writer.writerow([_fmt(row[c]) for c in _CSV_COLUMNS])

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "model": self.model_name,
            "d": self.d,
            "j": self.j,
            "alpha": self.alpha,
            "q": self.q,
            "phi": self.phi,
            "target": self._target_cell(),
            "rows": list(self.csv_rows()),
            "summaries": [
                {
                    "n": s.n,
                    "mean": s.mean,
                    "lq_error": s.lq_error,
                    "std_error": s.std_error,
                }
                for s in self.summaries
            ],
            "trend": self.trend,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write(self, path) -> None:
        path = str(path)
        if path.endswith(".csv"):
            self.write_csv(path)
        elif path.endswith(".json"):
            self.write_json(path)
        else:
            raise ConfigError(f"output path must end in .csv or .json, got {path}")

    def summary_for(self, n: int) -> SizeSummary:
        for s in self.summaries:
            if s.n == n:
                return s
        raise KeyError(n)


def _replicate_value(model, n, j, alpha, seed, seed_n, rep) -> float:
    """One replication of the normalized power sum, resampling tied draws."""
    last = None
    for attempt in range(_MAX_RESAMPLES + 1):
        rng = np.random.default_rng(np.random.SeedSequence((seed, seed_n, rep, attempt)))
        xs = PointSet(model.sample(rng, n))
        try:
            return statistic_power(xs, j, alpha)
        except DegenerateStatistic as exc:
            last = exc
    raise DegenerateStatistic(
        f"{_MAX_RESAMPLES} resamples in a row degenerate at n={n}: {last}"
    )


def _summarize(values: np.ndarray, n: int, target, q: int) -> SizeSummary:
    mean = float(values.mean())
    lq = None
    if isinstance(target, float) and math.isfinite(target):
        lq = float(np.mean(np.abs(values - target) ** q))
    se = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    return SizeSummary(n=n, mean=mean, lq_error=lq, std_error=se)


def run_convergence(config: EstimatorConfig, force: bool = False) -> ExperimentResult:
    """Estimate the f^(1-alpha/d) integral on each sample size of the grid.

    Requires a condition report granting L^q convergence unless ``force``
    is set. The reported value per replication is the normalized sum
    gamma^{-1} n^{-1} S_{n,alpha}; its target is the integral itself.
    """
    alpha = config.require_alpha()
    if not config.n_grid:
        raise ConfigError("n_grid must not be empty")
    model = config.model
    report = condition_report(model, alpha, config.q)
    if not report.convergence_granted() and not force:
        raise ConditionRefused(
            f"no L^{config.q} guarantee for {model!r} with alpha={alpha}"
            + (f" ({'; '.join(report.notes)})" if report.notes else "")
            + "; pass force to run anyway"
        )
    d = model.dim
    gam = gamma_constant(d, config.j, alpha)
    target = model.i_rho(1.0 - alpha / d)
    result = ExperimentResult(
        experiment="converge",
        model_name=model.name,
        d=d,
        j=config.j,
        alpha=alpha,
        q=config.q,
        target=float(target),
    )
    for n in config.n_grid:
        vals = np.array(
            [
                _replicate_value(model, n, config.j, alpha, config.seed, n, rep)
                / (gam * n)
                for rep in range(config.replications)
            ]
        )
        for rep, v in enumerate(vals):
            result.records.append(RunRecord(n=n, replication=rep, value=float(v)))
        result.summaries.append(_summarize(vals, n, float(target), config.q))
    errors = [s.lq_error for s in result.summaries if s.lq_error is not None]
    if len(errors) >= 2:
        mk = mann_kendall_increasing([-e for e in errors])
        result.trend = {
            "lq_errors": errors,
            "decreasing_s": mk.s,
            "decreasing_p": mk.p_increasing,
        }
    return result


def run_divergence(
    model: DensityModel,
    alpha: float,
    k_grid,
    replications: int,
    seed: int,
    j: int = 1,
    force: bool = False,
) -> tuple[DivergenceSchedule, ExperimentResult]:
    """Witness the unbounded mean of n^{-1} S_{n,alpha} along n(k).

    For each shell index k the sample size is n(k) = ceil(1 / F(A_k));
    the result carries the per-k means, a Mann-Kendall increasing-trend
    test, the last/first ratio, and the analytic lower-bound proxy
    F(A_k)^(1-alpha/d) * 2^(k*alpha) for comparison.
    """
    if replications < 1:
        raise ConfigError(f"replications must be >= 1, got {replications}")
    if not check_divergence(model, alpha) and not force:
        raise ConditionRefused(
            f"divergence conditions do not hold for {model!r} with alpha={alpha}; "
            "pass force to run anyway"
        )
    schedule = DivergenceSchedule.from_model(model, k_grid)
    d = model.dim
    result = ExperimentResult(
        experiment="diverge",
        model_name=model.name,
        d=d,
        j=j,
        alpha=alpha,
        q=1,
        target="divergent",
    )
    means = []
    proxies = []
    for k, n in zip(schedule.k_grid, schedule.n_of_k):
        vals = np.array(
            [
                _replicate_value(model, n, j, alpha, seed, n, rep) / n
                for rep in range(replications)
            ]
        )
        for rep, v in enumerate(vals):
            result.records.append(RunRecord(n=n, replication=rep, value=float(v)))
        result.summaries.append(_summarize(vals, n, None, 1))
        means.append(float(vals.mean()))
        proxies.append(model.annulus_mass(k) ** (1.0 - alpha / d) * 2.0 ** (k * alpha))
    trend: dict = {
        "k_grid": list(schedule.k_grid),
        "n_of_k": list(schedule.n_of_k),
        "means": means,
        "lower_bound_proxy": proxies,
    }
    if len(means) >= 2:
        mk = mann_kendall_increasing(means)
        trend["increasing_s"] = mk.s
        trend["increasing_p"] = mk.p_increasing
        trend["last_over_first"] = means[-1] / means[0] if means[0] else math.inf
    result.trend = trend
    return schedule, result


@dataclass(frozen=True)
class EntropyRun:
    """Entropy estimates with Monte Carlo error bars and the raw run."""

    entropy: EntropyValue
    i_std_error: float
    tsallis_std_error: float
    renyi_std_error: float
    result: ExperimentResult


def run_entropy(config: EstimatorConfig, rho: float, force: bool = False) -> EntropyRun:
    """Estimate both entropies of order rho from the neighbor sums.

    The exponent is alpha = d * (1 - rho); the integral estimate at the
    largest sample size feeds the entropy transforms, and its standard
    error propagates through them by the delta method.
    """
    if rho <= 0 or rho == 1.0:
        raise InvalidRho(f"rho must be positive and != 1, got {rho}")
    d = config.model.dim
    alpha = d * (1.0 - rho)
    conv = run_convergence(replace(config, alpha=alpha, phi=None), force=force)
    conv.experiment = "entropy"
    top = conv.summaries[-1]
    i_hat = top.mean
    se = top.std_error
    entropy = entropy_from_integral(rho, i_hat)
    scale = abs(1.0 - rho)
    run = EntropyRun(
        entropy=entropy,
        i_std_error=se,
        tsallis_std_error=se / scale,
        renyi_std_error=se / (scale * i_hat),
        result=conv,
    )
    conv.trend = dict(conv.trend)
    conv.trend.update(
        {
            "rho": rho,
            "i_estimate": i_hat,
            "i_std_error": se,
            "tsallis": entropy.tsallis,
            "tsallis_std_error": run.tsallis_std_error,
            "renyi": entropy.renyi,
            "renyi_std_error": run.renyi_std_error,
        }
    )
    return run


def run_moment_probe(config: EstimatorConfig, p: float) -> ExperimentResult:
    """Empirical E[(n^{1/d} D_j)^(alpha p)] across the size grid.

    Bounded profiles back up the convergence conditions; growth along a
    divergence schedule shows the moment hypothesis failing. Purely
    diagnostic, so no condition gate applies.
    """
    alpha = config.require_alpha()
    if not config.n_grid:
        raise ConfigError("n_grid must not be empty")
    if not math.isfinite(p):
        raise ConfigError(f"p must be finite, got {p}")
    model = config.model
    exponent = alpha * p
    result = ExperimentResult(
        experiment="probe",
        model_name=model.name,
        d=model.dim,
        j=config.j,
        alpha=alpha,
        q=config.q,
        target=None,
        trend={"p": p, "exponent": exponent},
    )
    means = []
    for n in config.n_grid:
        vals = np.array(
            [
                _replicate_value(model, n, config.j, exponent, config.seed, n, rep) / n
                for rep in range(config.replications)
            ]
        )
        for rep, v in enumerate(vals):
            result.records.append(RunRecord(n=n, replication=rep, value=float(v)))
        result.summaries.append(_summarize(vals, n, None, config.q))
        means.append(float(vals.mean()))
    result.trend["means"] = means
    if len(means) >= 2:
        mk = mann_kendall_increasing(means)
        result.trend["increasing_s"] = mk.s
        result.trend["increasing_p"] = mk.p_increasing
    return result
