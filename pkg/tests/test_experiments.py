import numpy as np
import pytest

from geoperc.cascade import ThresholdDistribution
from geoperc.failures import IndependentFailure
from geoperc.experiments import (
    ExperimentConfig,
    estimate_lambda_c,
    estimate_qc,
    run_cascade_trial,
    run_cascade_trials,
    run_sweep,
    trial_seeds,
)
from geoperc.theory import SubcriticalDensityError

HEAVY_LOW = ThresholdDistribution(((0.0, 0.1, 7.5), (0.1, 1.0, 5 / 18)))
ABOVE_HALF = ThresholdDistribution(((0.0, 0.5, 0.0), (0.5, 1.0, 2.0)))


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(kind="percolation-sweep", width=10, height=10, lambdas=())
    with pytest.raises(ValueError):
        ExperimentConfig(kind="failure-sweep", width=10, height=10, lambdas=(1.0,))
    with pytest.raises(ValueError):
        ExperimentConfig(kind="percolation-sweep", width=10, height=10, lambdas=(1.0,), trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="cascade-trial", width=10, height=10, lambdas=(1.0,))
    with pytest.raises(ValueError):
        ExperimentConfig(kind="mystery", width=10, height=10)


def test_config_round_trip():
    cfg = ExperimentConfig(
        kind="failure-sweep",
        width=20.0,
        height=20.0,
        lambdas=(1.5, 2.0),
        rules=(IndependentFailure(0.25),),
        trials=5,
        base_seed=77,
    )
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    cfg2 = ExperimentConfig.from_dict(
        {
            "kind": "cascade-trial",
            "region": {"width": 15, "height": 15},
            "trials": 3,
            "n": 100,
            "count_mode": "fixed",
            "distribution": "pieces:0,1,1",
        }
    )
    assert cfg2.n == 100
    assert cfg2.distribution is not None
    assert ExperimentConfig.from_dict(cfg2.to_dict()) == cfg2
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"kind": "failure-sweep", "region": {"width": 10, "height": 10}})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict([1, 2, 3])


def test_single_trial_estimate_is_binary():
    cfg = ExperimentConfig(
        kind="percolation-sweep", width=12.0, height=12.0, lambdas=(2.5,), trials=1, base_seed=3
    )
    res = run_sweep(cfg)
    assert res.points[0].estimate in (0.0, 1.0)
    assert res.points[0].stderr == 0.0


def test_phase_extremes_and_proxy_agreement():
    for lam, lo, hi in ((0.5, 0.0, 0.15), (3.0, 0.85, 1.0)):
        for proxy in ("crossing", "giant-fraction"):
            cfg = ExperimentConfig(
                kind="percolation-sweep",
                width=50.0,
                height=50.0,
                lambdas=(lam,),
                trials=30,
                base_seed=8,
                proxy=proxy,
            )
            est = run_sweep(cfg).points[0].estimate
            assert lo <= est <= hi, (lam, proxy, est)


def test_sweep_reproducible_bit_for_bit():
    cfg = ExperimentConfig(
        kind="failure-sweep",
        width=20.0,
        height=20.0,
        lambdas=(2.0, 2.56),
        rules=(IndependentFailure(0.2),),
        trials=10,
        base_seed=123,
    )
    a = run_sweep(cfg)
    b = run_sweep(cfg)
    assert a == b


def test_trial_seeds_distinct_within_sweep():
    cfg = ExperimentConfig(
        kind="percolation-sweep", width=10, height=10, lambdas=(1.0, 2.0, 3.0), trials=50,
        base_seed=9,
    )
    seeds = [s for p in range(3) for s in trial_seeds(cfg, p)]
    assert len(set(seeds)) == len(seeds)


def test_failure_sweep_monotone_in_rule():
    rules = tuple(IndependentFailure(q) for q in (0.1, 0.35, 0.6))
    cfg = ExperimentConfig(
        kind="failure-sweep",
        width=25.0,
        height=25.0,
        lambdas=(2.56,),
        rules=rules,
        trials=60,
        base_seed=21,
    )
    pts = run_sweep(cfg).points
    for a, b in zip(pts, pts[1:]):
        slack = 3 * np.sqrt(a.stderr**2 + b.stderr**2)
        assert b.estimate <= a.estimate + slack


def test_percolation_sweep_monotone_in_density():
    cfg = ExperimentConfig(
        kind="percolation-sweep",
        width=30.0,
        height=30.0,
        lambdas=(1.0, 1.4, 1.8, 2.4),
        trials=40,
        base_seed=13,
    )
    pts = run_sweep(cfg).points
    for a, b in zip(pts, pts[1:]):
        slack = 3 * np.sqrt(a.stderr**2 + b.stderr**2)
        assert b.estimate >= a.estimate - slack


def test_estimators_deterministic():
    a = estimate_qc(2.0, trials=15, base_seed=3)
    b = estimate_qc(2.0, trials=15, base_seed=3)
    assert a == b


def test_failure_with_zero_rate_matches_unfailed():
    base = dict(width=25.0, height=25.0, lambdas=(2.0,), trials=25, base_seed=5)
    plain = run_sweep(ExperimentConfig(kind="percolation-sweep", **base))
    noop = run_sweep(
        ExperimentConfig(kind="failure-sweep", rules=(IndependentFailure(0.0),), **base)
    )
    assert plain.points[0].estimate == noop.points[0].estimate


def test_estimate_lambda_c_validates_inputs():
    with pytest.raises(ValueError):
        estimate_lambda_c(side=20.0)
    with pytest.raises(ValueError):
        estimate_lambda_c(bracket=(2.0, 1.0))
    with pytest.raises(ValueError):
        # both endpoints deep in the supercritical phase cannot bracket
        estimate_lambda_c(side=50.0, trials=10, base_seed=1, bracket=(2.5, 3.0))


def test_estimate_qc_validates_inputs():
    with pytest.raises(SubcriticalDensityError):
        estimate_qc(1.0)
    with pytest.raises(ValueError):
        estimate_qc(2.0, bracket=(0.5, 0.2))


def test_finite_size_scaling_shrinks_bias():
    # doubling the region side improves the estimate on average over seeds
    errs50, errs100 = [], []
    for seed in (1, 2, 3):
        r50 = estimate_lambda_c(side=50.0, trials=80, base_seed=seed)
        r100 = estimate_lambda_c(side=100.0, trials=80, base_seed=seed)
        errs50.append(abs(r50.midpoint - 1.435))
        errs100.append(abs(r100.midpoint - 1.435))
    assert np.mean(errs100) <= np.mean(errs50)


def test_cascade_trial_all_isolated_nodes():
    cfg = ExperimentConfig(
        kind="cascade-trial",
        width=40.0,
        height=40.0,
        n=30,
        count_mode="fixed",
        radius=0.01,
        distribution=HEAVY_LOW,
        trials=1,
        base_seed=2,
    )
    rec = run_cascade_trial(cfg, trial_seed=99)
    assert rec.feasible
    assert rec.failed_count == 1
    assert rec.failed_fraction == pytest.approx(1 / 30)
    assert rec.rounds == 1


def test_cascade_trial_infeasible_policy_recorded():
    # complete graph (radius spans the region): degrees 49, and the threshold
    # distribution has no mass at or below 1/2, so no node is vulnerable
    cfg = ExperimentConfig(
        kind="cascade-trial",
        width=3.0,
        height=3.0,
        n=50,
        count_mode="fixed",
        radius=5.0,
        distribution=ABOVE_HALF,
        seeding="adjacent-to-largest-vulnerable-component",
        trials=4,
        base_seed=17,
    )
    records = run_cascade_trials(cfg)
    assert all(not r.feasible for r in records)
    assert all(r.seed_node is None for r in records)


def test_cascade_trials_deterministic():
    cfg = ExperimentConfig(
        kind="cascade-trial",
        width=15.0,
        height=15.0,
        n=400,
        count_mode="fixed",
        distribution=HEAVY_LOW,
        seeding="adjacent-to-largest-vulnerable-component",
        trials=5,
        base_seed=31,
    )
    assert run_cascade_trials(cfg) == run_cascade_trials(cfg)


def test_cascade_trial_reports_largest_failed_component():
    cfg = ExperimentConfig(
        kind="cascade-trial",
        width=15.0,
        height=15.0,
        n=400,
        count_mode="fixed",
        distribution=HEAVY_LOW,
        trials=6,
        base_seed=41,
    )
    for rec in run_cascade_trials(cfg):
        assert 0.0 <= rec.largest_failed_fraction <= rec.failed_fraction
        assert rec.rounds >= 1
        if rec.failed_count == 1:
            assert rec.largest_failed_fraction == pytest.approx(1 / 400)
