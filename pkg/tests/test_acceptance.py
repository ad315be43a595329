"""End-to-end checks of communication accounting, bound soundness and threshold trends."""
import dataclasses
import math

import pytest

from ETGossip.harness import prepare, run_experiment, run_sweep
from ETGossip.utils.theory import eta_max

from conftest import make_config

TWENTY_NODES = dict(n=20, d=2, T=150, edge_count=133, seed=1)


def ergodic_mean(result) -> float:
    return result.totals["ergodic_grad_mean"][0]


def transmissions_mean(result) -> float:
    return result.totals["total_transmissions"][0]


class TestTransmissionAccounting:
    def test_full_communication(self):
        result = run_experiment(make_config(**TWENTY_NODES, policy__kind="zero"))
        assert result.total_transmissions() == [39900]

    def test_periodic(self):
        result = run_experiment(make_config(**TWENTY_NODES, policy__kind="periodic", policy__kp=5))
        assert result.total_transmissions() == [7980]

    @pytest.mark.slow
    def test_probabilistic_mean(self):
        result = run_experiment(make_config(**TWENTY_NODES, reps=30, policy__kind="probabilistic", policy__p_link=0.5))
        sigma = math.sqrt(39900 * 0.25)
        assert abs(transmissions_mean(result) - 19950) <= 3 * sigma

    @pytest.mark.slow
    def test_variable_working_mean(self):
        result = run_experiment(make_config(**TWENTY_NODES, reps=30, policy__kind="variable_working", policy__p_k=0.3))
        graph = result.setup.graph
        sigma = math.sqrt(150 * 0.3 * 0.7 * sum(graph.degree(i) ** 2 for i in range(graph.n)))
        assert abs(transmissions_mean(result) - 11970) <= 3 * sigma


@pytest.mark.slow
@pytest.mark.parametrize(
    "policy",
    [
        dict(policy__kind="zero"),
        dict(policy__kind="constant", policy__tau0=0.05),
        dict(policy__kind="linear_decay", policy__tau0=0.5),
    ],
    ids=["zero", "constant", "linear_decay"],
)
def test_ergodic_bound_holds(policy):
    cfg = make_config(n=8, d=10, T=2000, reps=30, seed=5, **policy)
    setup = prepare(cfg)
    eta = eta_max(setup.suite.lips, setup.mixing.delta, cfg.n) / 2.0
    cfg = dataclasses.replace(cfg, eta=eta)
    setup = prepare(cfg)
    assert math.isfinite(setup.bound_rhs)
    assert ergodic_mean(run_experiment(cfg, setup)) <= setup.bound_rhs * 1.05


@pytest.mark.slow
class TestThresholdRegimes:
    def test_zero_threshold_keeps_improving(self):
        short = run_experiment(make_config(n=8, d=10, T=1000, reps=3, seed=2, case="A"))
        long = run_experiment(make_config(n=8, d=10, T=4000, reps=3, seed=2, case="A"))
        assert ergodic_mean(long) < ergodic_mean(short)

    def test_constant_threshold_plateaus(self):
        common = dict(n=8, d=10, seed=3, eta=0.05, objective__spread=0.0, objective__alpha=0.0)

        def ratio(**policy):
            short = run_experiment(make_config(T=1000, **common, **policy))
            long = run_experiment(make_config(T=4000, **common, **policy))
            return ergodic_mean(long) / ergodic_mean(short)

        assert ratio(policy__kind="constant", policy__tau0=10.0) >= 0.5
        assert ratio(policy__kind="zero") < 0.5

    def test_decaying_threshold_tracks_full_communication(self):
        decaying = make_config(n=8, d=10, T=4000, reps=3, seed=4, case="C", policy__kind="linear_decay", policy__tau0=0.5)
        setup = prepare(decaying)
        full = make_config(n=8, d=10, T=4000, reps=3, seed=4, eta=setup.eta, policy__kind="zero")
        a = run_experiment(decaying, setup)
        b = run_experiment(full)
        assert 0.5 <= ergodic_mean(a) / ergodic_mean(b) <= 2.0
        assert max(a.total_transmissions()) < min(b.total_transmissions())


@pytest.mark.slow
def test_relative_threshold_trades_accuracy_for_communication():
    cfg = make_config(
        n=20, d=10, T=150, reps=30, seed=6, eta=0.02, sparsity=0.3,
        policy__kind="relative", init__scale=10.0,
    )
    points = run_sweep(cfg, "policy.epsilon", ["0", "0.003", "0.005", "0.007", "0.009"])
    transmissions = [transmissions_mean(p.result) for p in points]
    final_f = [p.result.totals["final_f_avg"][0] for p in points]
    assert transmissions[0] == 2 * points[0].result.setup.graph.edge_count * 150
    assert all(a > b for a, b in zip(transmissions, transmissions[1:]))
    assert all(a <= b for a, b in zip(final_f, final_f[1:]))
