"""Monte Carlo harness: parameter sweeps, critical-point estimation, cascade trials.

Every trial draws its seed as splitmix64(splitmix64(base_seed) + point * trials
+ trial), so per-trial seeds are pairwise distinct within a sweep and results
are bit-reproducible. Trials are independent over immutable inputs and are
reduced in (point, trial) order, so a parallel executor would produce the same
output as this serial one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade import (
    ThresholdDistribution,
    classify,
    components,
    distribution_to_text,
    parse_distribution,
    run_cascade,
)
from .failures import FailureRule, IndependentFailure, apply_failures, parse_rule
from .geometry import OPEN_BOX, Region, generate_poisson, generate_uniform
from .graph import SpatialGraph, build_graph, crosses
from .seeding import (
    STREAM_FAILURES,
    STREAM_PLACEMENT,
    STREAM_SEED_NODE,
    STREAM_THRESHOLDS,
    derive_seed,
    generator_from_seed,
    substream,
)
from .theory import CriticalConstants, DEFAULT_CONSTANTS, SubcriticalDensityError

KINDS = ("percolation-sweep", "failure-sweep", "cascade-trial", "lambda-c-estimate")
PROXIES = ("crossing", "giant-fraction")
SEEDINGS = ("random-node", "adjacent-to-largest-vulnerable-component")
COUNT_MODES = ("poisson", "fixed")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    width: float
    height: float
    boundary: str = OPEN_BOX
    radius: float = 1.0
    lambdas: tuple[float, ...] = ()
    rules: tuple[FailureRule, ...] = ()
    distribution: ThresholdDistribution | None = None
    seeding: str = "random-node"
    trials: int = 100
    base_seed: int = 0
    proxy: str = "crossing"
    giant_threshold: float = 0.1
    count_mode: str = "poisson"
    n: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.proxy not in PROXIES:
            raise ValueError(f"proxy must be one of {PROXIES}, got {self.proxy!r}")
        if self.seeding not in SEEDINGS:
            raise ValueError(f"seeding must be one of {SEEDINGS}, got {self.seeding!r}")
        if self.count_mode not in COUNT_MODES:
            raise ValueError(f"count_mode must be one of {COUNT_MODES}, got {self.count_mode!r}")
        if self.kind in ("percolation-sweep", "failure-sweep") and not self.lambdas:
            raise ValueError(f"{self.kind} needs a non-empty lambda grid")
        if self.kind == "failure-sweep" and not self.rules:
            raise ValueError("failure-sweep needs a non-empty rule grid")
        if self.kind == "cascade-trial":
            if self.distribution is None:
                raise ValueError("cascade-trial needs a threshold distribution")
            if not self.lambdas and self.n is None:
                raise ValueError("cascade-trial needs a lambda value or an explicit n")

    @property
    def region(self) -> Region:
        return Region(self.width, self.height, self.boundary)

    def to_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "region": {"width": self.width, "height": self.height, "boundary": self.boundary},
            "radius": self.radius,
            "lambdas": list(self.lambdas),
            "rules": [r.to_text() for r in self.rules],
            "distribution": None
            if self.distribution is None
            else distribution_to_text(self.distribution),
            "seeding": self.seeding,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "proxy": self.proxy,
            "giant_threshold": self.giant_threshold,
            "count_mode": self.count_mode,
            "n": self.n,
        }
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ValueError("experiment config must be a JSON object")
        region = doc.get("region", {})
        dist = doc.get("distribution")
        return cls(
            kind=doc.get("kind", ""),
            width=float(region.get("width", 0.0)),
            height=float(region.get("height", 0.0)),
            boundary=region.get("boundary", OPEN_BOX),
            radius=float(doc.get("radius", 1.0)),
            lambdas=tuple(float(v) for v in doc.get("lambdas", [])),
            rules=tuple(parse_rule(t) for t in doc.get("rules", [])),
            distribution=None if dist is None else parse_distribution(dist),
            seeding=doc.get("seeding", "random-node"),
            trials=int(doc.get("trials", 100)),
            base_seed=int(doc.get("base_seed", 0)),
            proxy=doc.get("proxy", "crossing"),
            giant_threshold=float(doc.get("giant_threshold", 0.1)),
            count_mode=doc.get("count_mode", "poisson"),
            n=None if doc.get("n") is None else int(doc["n"]),
        )


@dataclass(frozen=True)
class PointResult:
    params: dict
    estimate: float
    stderr: float
    trials: int


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    points: tuple[PointResult, ...]


def _trial_graph(config: ExperimentConfig, lam: float, trial_seed: int) -> SpatialGraph:
    region = config.region
    placement_seed = substream(trial_seed, STREAM_PLACEMENT)
    if config.count_mode == "fixed":
        n = config.n if config.n is not None else round(lam * region.area)
        pts = generate_uniform(n, region, placement_seed)
    else:
        pts = generate_poisson(lam, region, placement_seed)
    return build_graph(pts, config.radius)


def _proxy_indicator(config: ExperimentConfig, graph: SpatialGraph, alive: np.ndarray) -> float:
    if len(graph) == 0:
        return 0.0
    if config.proxy == "crossing":
        rect = (0.0, 0.0, config.width, config.height)
        return 1.0 if crosses(graph, alive, rect, "left-right") else 0.0
    labeling = components(graph, alive)
    return 1.0 if labeling.largest_size >= config.giant_threshold * len(graph) else 0.0


def _grid_points(config: ExperimentConfig) -> list[dict]:
    if config.kind == "percolation-sweep":
        return [{"lambda": lam} for lam in config.lambdas]
    if config.kind == "failure-sweep":
        return [
            {"lambda": lam, "rule": rule.to_text()}
            for lam in config.lambdas
            for rule in config.rules
        ]
    raise ValueError(f"run_sweep does not handle kind {config.kind!r}")


def trial_seeds(config: ExperimentConfig, point_index: int) -> list[int]:
    return [
        derive_seed(config.base_seed, point_index, t, config.trials) for t in range(config.trials)
    ]


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Per grid point: `trials` independent instances, aggregated to a Bernoulli
    estimate with its binomial standard error. Deterministic given base_seed."""
    points = _grid_points(config)
    results = []
    for p_idx, params in enumerate(points):
        lam = params["lambda"]
        rule = parse_rule(params["rule"]) if "rule" in params else None
        hits = 0.0
        for t_idx, trial_seed in enumerate(trial_seeds(config, p_idx)):
            graph = _trial_graph(config, lam, trial_seed)
            if rule is None:
                alive = np.ones(len(graph), dtype=bool)
            else:
                alive = apply_failures(graph, rule, substream(trial_seed, STREAM_FAILURES)).alive
            hits += _proxy_indicator(config, graph, alive)
        est = hits / config.trials
        stderr = float(np.sqrt(est * (1.0 - est) / config.trials))
        results.append(PointResult(params, est, stderr, config.trials))
    return SweepResult(config, tuple(results))


@dataclass(frozen=True)
class BisectionResult:
    """Bracketing interval from noisy bisection plus every evaluation made."""

    low: float
    high: float
    evaluations: tuple[tuple[float, float], ...]  # (parameter, estimate)
    trials: int
    base_seed: int

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.low + self.high)

    def to_dict(self) -> dict:
        return {
            "low": self.low,
            "high": self.high,
            "midpoint": self.midpoint,
            "evaluations": [list(e) for e in self.evaluations],
            "trials": self.trials,
            "base_seed": self.base_seed,
        }


def _crossing_probability(
    config: ExperimentConfig, lam: float, rule: FailureRule | None, eval_index: int
) -> float:
    hits = 0.0
    for t_idx in range(config.trials):
        trial_seed = derive_seed(config.base_seed, eval_index, t_idx, config.trials)
        graph = _trial_graph(config, lam, trial_seed)
        if rule is None:
            alive = np.ones(len(graph), dtype=bool)
        else:
            alive = apply_failures(graph, rule, substream(trial_seed, STREAM_FAILURES)).alive
        hits += _proxy_indicator(config, graph, alive)
    return hits / config.trials


def estimate_lambda_c(
    side: float = 50.0,
    radius: float = 1.0,
    trials: int = 200,
    base_seed: int = 0,
    bracket: tuple[float, float] = (1.0, 2.0),
    target_width: float = 0.02,
) -> BisectionResult:
    """Bisect the density at which the left-right crossing probability is 1/2.

    The region side must be at least 50 radii; the returned interval has width
    at most target_width and brackets the empirical transition point.
    """
    if side < 50.0 * radius:
        raise ValueError(f"region side {side} must be at least 50 radii ({50.0 * radius})")
    lo, hi = bracket
    if not lo < hi:
        raise ValueError(f"bracket {bracket} is not an interval")
    config = ExperimentConfig(
        kind="lambda-c-estimate",
        width=side,
        height=side,
        radius=radius,
        trials=trials,
        base_seed=base_seed,
        proxy="crossing",
        count_mode="poisson",
    )
    evals = []
    eval_index = 0

    def evaluate(lam: float) -> float:
        nonlocal eval_index
        p = _crossing_probability(config, lam, None, eval_index)
        evals.append((lam, p))
        eval_index += 1
        return p

    p_lo = evaluate(lo)
    p_hi = evaluate(hi)
    if not (p_lo < 0.5 < p_hi):
        raise ValueError(
            f"initial bracket does not straddle the transition: "
            f"p({lo})={p_lo}, p({hi})={p_hi}"
        )
    while hi - lo > target_width:
        mid = 0.5 * (lo + hi)
        if evaluate(mid) < 0.5:
            lo = mid
        else:
            hi = mid
    return BisectionResult(lo, hi, tuple(evals), trials, base_seed)


def estimate_qc(
    lam: float,
    side: float = 50.0,
    radius: float = 1.0,
    trials: int = 100,
    base_seed: int = 0,
    bracket: tuple[float, float] = (0.0, 1.0),
    target_width: float = 0.02,
    constants: CriticalConstants = DEFAULT_CONSTANTS,
) -> BisectionResult:
    """Bisect the independent-failure probability at which crossing drops to 1/2."""
    if lam <= constants.lambda_c:
        raise SubcriticalDensityError(
            f"lambda={lam} is not above the critical density {constants.lambda_c}"
        )
    lo, hi = bracket
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError(f"bracket {bracket} is not an interval inside [0, 1]")
    config = ExperimentConfig(
        kind="lambda-c-estimate",
        width=side,
        height=side,
        radius=radius,
        trials=trials,
        base_seed=base_seed,
        proxy="crossing",
        count_mode="poisson",
    )
    evals = []
    eval_index = 0

    def evaluate(q: float) -> float:
        nonlocal eval_index
        p = _crossing_probability(config, lam, IndependentFailure(q), eval_index)
        evals.append((q, p))
        eval_index += 1
        return p

    p_lo = evaluate(lo)
    p_hi = evaluate(hi)
    if not (p_lo > 0.5 > p_hi):
        raise ValueError(
            f"initial bracket does not straddle the transition: "
            f"p({lo})={p_lo}, p({hi})={p_hi}"
        )
    while hi - lo > target_width:
        mid = 0.5 * (lo + hi)
        if evaluate(mid) >= 0.5:
            lo = mid
        else:
            hi = mid
    return BisectionResult(lo, hi, tuple(evals), trials, base_seed)


@dataclass(frozen=True)
class CascadeTrialRecord:
    trial_seed: int
    feasible: bool
    seed_node: int | None
    largest_vulnerable_fraction: float
    failed_count: int
    failed_fraction: float
    rounds: int
    largest_failed_fraction: float
    seed_in_largest_failed: bool

    def to_dict(self) -> dict:
        return {
            "trial_seed": self.trial_seed,
            "feasible": self.feasible,
            "seed_node": self.seed_node,
            "largest_vulnerable_fraction": self.largest_vulnerable_fraction,
            "failed_count": self.failed_count,
            "failed_fraction": self.failed_fraction,
            "rounds": self.rounds,
            "largest_failed_fraction": self.largest_failed_fraction,
            "seed_in_largest_failed": self.seed_in_largest_failed,
        }


def run_cascade_trial(config: ExperimentConfig, trial_seed: int) -> CascadeTrialRecord:
    """One cascade instance: build, sample thresholds, pick a seed node per the
    seeding policy, run the cascade, report spread metrics.

    With adjacent seeding the seed is drawn from the nodes outside the largest
    vulnerable component that have a neighbor inside it (falling back to a node
    of the component when no such node exists); if there are no vulnerable
    nodes at all, the trial is recorded as infeasible rather than failed.
    """
    if config.distribution is None:
        raise ValueError("cascade trials need a threshold distribution")
    lam = config.lambdas[0] if config.lambdas else 0.0
    graph = _trial_graph(config, lam, trial_seed)
    n = len(graph)
    if n == 0:
        return CascadeTrialRecord(trial_seed, False, None, 0.0, 0, 0.0, 0, 0.0, False)

    psi = config.distribution.sample(n, substream(trial_seed, STREAM_THRESHOLDS))
    labeling = components(graph, classify(graph, psi).vulnerable)
    largest_vuln_fraction = labeling.largest_size / n

    gen = generator_from_seed(substream(trial_seed, STREAM_SEED_NODE))
    if config.seeding == "random-node":
        seed_node = int(gen.integers(n))
    else:
        if labeling.largest_size == 0:
            return CascadeTrialRecord(trial_seed, False, None, 0.0, 0, 0.0, 0, 0.0, False)
        in_comp = labeling.labels == labeling.largest_id
        e = graph.edges
        touches = np.zeros(n, dtype=bool)
        if len(e):
            touches[e[:, 0][in_comp[e[:, 1]]]] = True
            touches[e[:, 1][in_comp[e[:, 0]]]] = True
        candidates = np.flatnonzero(touches & ~in_comp)
        if candidates.size == 0:
            candidates = np.flatnonzero(in_comp)
        seed_node = int(candidates[gen.integers(len(candidates))])

    state = run_cascade(graph, psi, seed_node)
    failed_labeling = components(graph, state.failed)
    largest_failed_fraction = failed_labeling.largest_size / n
    seed_in_largest = bool(
        failed_labeling.largest_size > 0
        and failed_labeling.labels[seed_node] == failed_labeling.largest_id
    )
    return CascadeTrialRecord(
        trial_seed=trial_seed,
        feasible=True,
        seed_node=seed_node,
        largest_vulnerable_fraction=largest_vuln_fraction,
        failed_count=state.failed_count,
        failed_fraction=state.failed_count / n,
        rounds=len(state.rounds),
        largest_failed_fraction=largest_failed_fraction,
        seed_in_largest_failed=seed_in_largest,
    )


def run_cascade_trials(config: ExperimentConfig) -> tuple[CascadeTrialRecord, ...]:
    if config.kind != "cascade-trial":
        raise ValueError(f"expected a cascade-trial config, got kind {config.kind!r}")
    records = []
    for t_idx in range(config.trials):
        trial_seed = derive_seed(config.base_seed, 0, t_idx, config.trials)
        records.append(run_cascade_trial(config, trial_seed))
    return tuple(records)
