"""Suite configuration, orchestration and machine-readable reporting.

A suite run draws a seeded corpus, executes the selected checks (optionally
fanned out over a process pool), and assembles a deterministic report:
rerunning with the same config and seed reproduces the serialized report
byte for byte.  Per-check wall-clock timings are collected for the console
summary but kept out of the serialized report to preserve that guarantee.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .checks import CHECKS, GridContext, default_corpus, run_check
from .discrete import (
    DISCRETE_CHECK_IDS,
    check_covering_lemma,
    check_discrete_registry,
    check_functional_submodularity,
    discrete_arity,
    random_pmf,
    DiscreteJoint,
)
from .distributions import DensityModel, ModelError, make_model
from .report import InequalityReport, SKIPPED

__all__ = ["ConfigError", "SuiteConfig", "SuiteReport", "load_config", "run_suite",
           "serialize_report", "write_report"]

SCHEMA_VERSION = 1

_DISCRETE_PREFIXED = tuple(f"discrete.{cid}" for cid in DISCRETE_CHECK_IDS)
VALID_CHECK_IDS = tuple(sorted(CHECKS)) + ("covering_lemma", "functional_submodularity") \
    + _DISCRETE_PREFIXED


class ConfigError(ValueError):
    """Unusable suite configuration."""


@dataclass(frozen=True)
class SuiteConfig:
    seed: int
    grid_count: int = 1 << 14
    window_sigmas: float = 12.0
    tolerances: dict = field(default_factory=dict)
    corpus: object = "default-corpus"  # or list of model spec dicts
    corpus_size: int = 100
    checks: object = "all"  # or list of check ids
    trials: int | None = None
    discrete_group_order: int = 6
    discrete_trials: int = 100
    output_path: str | None = None
    output_format: str = "json"
    workers: int | None = None

    def selected_checks(self) -> list[str]:
        if self.checks == "all":
            return sorted(CHECKS)
        return list(self.checks)

    def corpus_models(self) -> list[DensityModel]:
        if self.corpus == "default-corpus":
            return default_corpus(self.seed, self.corpus_size)
        return [make_model(spec) for spec in self.corpus]

    def echo(self) -> dict:
        return {
            "seed": self.seed,
            "numerics": {
                "grid_count": self.grid_count,
                "window_sigmas": self.window_sigmas,
                "tolerances": dict(self.tolerances),
            },
            "corpus": self.corpus if self.corpus == "default-corpus"
            else list(self.corpus),
            "corpus_size": self.corpus_size,
            "checks": self.checks if self.checks == "all" else list(self.checks),
            "trials": self.trials,
            "discrete": {
                "group_order": self.discrete_group_order,
                "trials": self.discrete_trials,
            },
        }


def load_config(path: str) -> SuiteConfig:
    """Parse and validate a JSON suite configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> SuiteConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "seed" not in raw:
        raise ConfigError("config requires a 'seed' field")
    seed = raw["seed"]
    if not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")

    numerics = raw.get("numerics", {})
    grid_count = int(numerics.get("grid_count", 1 << 14))
    window_sigmas = float(numerics.get("window_sigmas", 12.0))
    tolerances = dict(numerics.get("tolerances", {}))
    for cid in tolerances:
        if cid not in VALID_CHECK_IDS:
            raise ConfigError(f"tolerance override for unknown check id '{cid}'")

    checks = raw.get("checks", "all")
    if checks != "all":
        if not isinstance(checks, list) or not checks:
            raise ConfigError("'checks' must be \"all\" or a nonempty list of ids")
        unknown = [c for c in checks if c not in VALID_CHECK_IDS]
        if unknown:
            raise ConfigError(f"unknown check ids: {unknown}")

    corpus = raw.get("corpus", "default-corpus")
    if corpus != "default-corpus":
        if not isinstance(corpus, list) or not corpus:
            raise ConfigError("'corpus' must be \"default-corpus\" or a list of model specs")
        try:
            for spec in corpus:
                make_model(spec)
        except ModelError as e:
            raise ConfigError(f"bad corpus model spec: {e}") from e

    discrete = raw.get("discrete", {})
    output = raw.get("output", {})
    fmt = output.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"output format must be json or csv, got '{fmt}'")

    trials = raw.get("trials")
    if trials is not None:
        trials = int(trials)
        if trials < 1:
            raise ConfigError("'trials' must be positive")

    return SuiteConfig(
        seed=seed,
        grid_count=grid_count,
        window_sigmas=window_sigmas,
        tolerances=tolerances,
        corpus=corpus,
        corpus_size=int(raw.get("corpus_size", 100)),
        checks=checks,
        trials=trials,
        discrete_group_order=int(discrete.get("group_order", 6)),
        discrete_trials=int(discrete.get("trials", 100)),
        output_path=output.get("path"),
        output_format=fmt,
        workers=raw.get("workers"),
    )


@dataclass
class SuiteReport:
    config: dict
    reports: list[InequalityReport]
    timings: dict[str, float]  # seconds per check family; console only

    def summary(self) -> dict:
        counts = {"holds": 0, "violated": 0, "inconclusive": 0, "skipped": 0}
        for r in self.reports:
            counts[r.verdict] += 1
        return counts

    def violated(self) -> int:
        return self.summary()["violated"]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool": "entrolab",
            "version": __version__,
            "config": self.config,
            "checks": [r.to_dict() for r in self.reports],
            "summary": self.summary(),
        }


# ---------------------------------------------------------------------------
# job execution


def _trial_rng(seed: int, family_index: int, variant_index: int, salt: int = 0):
    return np.random.default_rng(
        np.random.SeedSequence([seed, family_index, variant_index, salt])
    )


def _continuous_job(args) -> list[InequalityReport]:
    config, check_id, variant_index, models, ctx = args
    check = CHECKS[check_id]
    params = check.variants[variant_index]
    if ctx is None:
        ctx = GridContext(config.grid_count, config.window_sigmas)
    extra = float(config.tolerances.get(check_id, 0.0))
    arity = check.arity_for(params)
    n_trials = config.trials or max(1, len(models) // (arity * len(check.variants)))
    rng = _trial_rng(config.seed, sorted(CHECKS).index(check_id), variant_index)
    out = []
    for trial in range(n_trials):
        picks = [models[int(i)] for i in rng.integers(0, len(models), arity)]
        try:
            rep = run_check(check, picks, ctx, dict(params), extra_err=extra)
        except Exception as e:  # individual failures become skipped entries
            rep = InequalityReport(
                check_id=check_id, lhs=float("nan"), rhs=float("nan"),
                slack=float("nan"), err=float("nan"), verdict=SKIPPED,
                params=dict(params), note=f"{type(e).__name__}: {e}",
            )
        out.append(rep)
    return out


def _discrete_job(args) -> list[InequalityReport]:
    config, check_id = args
    rng = _trial_rng(config.seed, 1000, 0, salt=VALID_CHECK_IDS.index(check_id))
    order = config.discrete_group_order
    n_trials = config.trials or config.discrete_trials
    out = []
    for _ in range(n_trials):
        if check_id == "covering_lemma":
            rep = check_covering_lemma(random_pmf(rng, order), random_pmf(rng, order))
        elif check_id == "functional_submodularity":
            rep = _random_submodularity(rng, order)
        else:
            cid = check_id.removeprefix("discrete.")
            params = {}
            if cid == "sum_difference_mi":
                params = {"alpha": float(rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]))}
            if cid in ("plunnecke_ruzsa", "iterated_sum"):
                params = {"n": int(rng.integers(1, 4))}
            k = discrete_arity(cid, params)
            rep = check_discrete_registry(cid, [random_pmf(rng, order) for _ in range(k)],
                                          params)
        out.append(rep)
    return out


def _random_submodularity(rng, order: int) -> InequalityReport:
    n_out = max(2, order // 2)
    while True:
        f_map = rng.integers(0, n_out, order)
        g_map = rng.integers(0, n_out, order)
        table = rng.random((order, order)) * (f_map[:, None] == g_map[None, :])
        total = table.sum()
        if total > 0.0:
            break
    joint = DiscreteJoint((order, order), table / total)
    r_map = rng.integers(0, order, (order, order))
    return check_functional_submodularity(joint, f_map, g_map, r_map)


def run_suite(config: SuiteConfig) -> SuiteReport:
    """Execute every selected check and assemble the deterministic report."""
    selected = config.selected_checks()
    models = config.corpus_models()

    continuous_jobs = []
    discrete_jobs = []
    for cid in selected:
        if cid in CHECKS:
            for vi in range(len(CHECKS[cid].variants)):
                continuous_jobs.append((cid, vi))
        else:
            discrete_jobs.append(cid)

    workers = config.workers if config.workers is not None else (os.cpu_count() or 1)
    reports: list[InequalityReport] = []
    timings: dict[str, float] = {}

    if workers > 1 and (len(continuous_jobs) + len(discrete_jobs)) > 1:
        cargs = [(config, cid, vi, models, None) for cid, vi in continuous_jobs]
        dargs = [(config, cid) for cid in discrete_jobs]
        t0 = time.perf_counter()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for (cid, _), res in zip(continuous_jobs, pool.map(_continuous_job, cargs)):
                reports.extend(res)
                timings[cid] = timings.get(cid, 0.0)
            for cid, res in zip(discrete_jobs, pool.map(_discrete_job, dargs)):
                reports.extend(res)
                timings[cid] = timings.get(cid, 0.0)
        timings["total"] = time.perf_counter() - t0
    else:
        ctx = GridContext(config.grid_count, config.window_sigmas)
        for cid, vi in continuous_jobs:
            t0 = time.perf_counter()
            reports.extend(_continuous_job((config, cid, vi, models, ctx)))
            timings[cid] = timings.get(cid, 0.0) + time.perf_counter() - t0
        for cid in discrete_jobs:
            t0 = time.perf_counter()
            reports.extend(_discrete_job((config, cid)))
            timings[cid] = timings.get(cid, 0.0) + time.perf_counter() - t0
        timings["total"] = sum(timings.values())

    return SuiteReport(config=config.echo(), reports=reports, timings=timings)


# ---------------------------------------------------------------------------
# serialization


def serialize_report(report: SuiteReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True,
                          allow_nan=False) + "\n"
    if fmt == "csv":
        return _to_csv(report)
    raise ConfigError(f"unknown report format '{fmt}'")


_CSV_COLUMNS = ("check_id", "kind", "params", "lhs", "rhs", "slack", "err",
                "verdict", "note", "inputs")


def _to_csv(report: SuiteReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    def num(x):
        return "" if x is None else repr(x)

    for r in report.reports:
        d = r.to_dict()
        writer.writerow([
            d["check_id"], d["kind"],
            json.dumps(d["params"], sort_keys=True),
            num(d["lhs"]), num(d["rhs"]), num(d["slack"]), num(d["err"]),
            d["verdict"], d.get("note", ""),
            json.dumps(d["inputs"], sort_keys=True),
        ])
    return buf.getvalue()


def write_report(report: SuiteReport, path: str, fmt: str = "json") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_report(report, fmt))
