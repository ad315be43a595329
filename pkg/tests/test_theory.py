import math

import numpy as np
import pytest

from ETGossip.exceptions import BoundInapplicable
from ETGossip.utils.theory import (
    StepCase,
    TheoryConstants,
    bound_terms,
    case_constants,
    case_rate_bound,
    case_stepsize,
    ergodic_bound_rhs,
    eta_max,
    stability_constants,
)


def constants(**overrides):
    base = dict(n=4, lips=1.0, alpha=0.1, beta=0.5, delta=0.64, eta=0.005, f0_gap=2.0)
    base.update(overrides)
    return TheoryConstants(**base)


class TestStability:
    def test_worked_example(self):
        gamma, cap = stability_constants(constants(eta=0.01))
        assert gamma == pytest.approx(0.73)
        assert cap == pytest.approx(0.5 - 0.27 / 0.73)
        assert cap == pytest.approx(0.130137, abs=1e-6)

    def test_small_stepsize_limit(self):
        gamma, cap = stability_constants(constants(eta=1e-9))
        assert gamma == pytest.approx(1.0)
        assert cap == pytest.approx(0.5)

    def test_boundary_is_inapplicable(self):
        # 27 n eta^2 L^2 / (1 - sqrt(delta))^2 = 1
        eta = 0.2 / math.sqrt(27 * 4)
        stability = stability_constants(constants(eta=eta))
        assert stability.gamma == pytest.approx(0.0, abs=1e-12)
        assert not stability.applicable

    def test_delta_out_of_range(self):
        with pytest.raises(BoundInapplicable):
            stability_constants(constants(delta=1.0))


class TestEtaMax:
    def test_worked_example(self):
        assert eta_max(1.0, 0.64, 4) == pytest.approx(1.0 / 90.0)

    def test_complete_mixing(self):
        assert eta_max(1.0, 0.0, 1) == pytest.approx(1.0 / 9.0)

    def test_invalid_inputs(self):
        with pytest.raises(BoundInapplicable):
            eta_max(0.0, 0.5, 4)

    def test_guarantee_inside_the_range(self):
        draw = np.random.default_rng(0)
        for _ in range(1000):
            lips = float(draw.uniform(0.1, 10.0))
            delta = float(draw.uniform(0.0, 0.99))
            n = int(draw.integers(1, 200))
            eta = eta_max(lips, delta, n) * float(draw.uniform(0.01, 0.999))
            gamma, cap = stability_constants(constants(n=n, lips=lips, delta=delta, eta=eta))
            assert gamma > 2.0 / 3.0
            assert cap > 0.0


class TestErgodicBound:
    def test_zero_thresholds_drop_threshold_terms(self):
        terms = bound_terms(constants(), [0.0] * 50, 50)
        assert terms.threshold_consensus == 0.0
        assert terms.threshold_average == 0.0
        assert terms.total == pytest.approx(terms.initial_gap + terms.noise_heterogeneity + terms.average_noise)

    def test_noiseless_homogeneous_decays_with_horizon(self):
        c = constants(alpha=0.0, beta=0.0)
        _, cap = stability_constants(c)
        for rounds in (10, 100, 1000):
            assert ergodic_bound_rhs(c, [0.0] * rounds, rounds) == pytest.approx(c.f0_gap / (c.eta * cap * rounds))

    def test_doubling_thresholds_quadruples_threshold_terms(self):
        taus = list(np.linspace(0.3, 0.01, 40))
        single = bound_terms(constants(), taus, 40)
        double = bound_terms(constants(), [2 * t for t in taus], 40)
        assert double.threshold_consensus == pytest.approx(4 * single.threshold_consensus)
        assert double.threshold_average == pytest.approx(4 * single.threshold_average)
        assert double.initial_gap == single.initial_gap

    def test_nondecreasing_in_every_threshold(self):
        taus = [0.1] * 20
        base = ergodic_bound_rhs(constants(), taus, 20)
        for t in range(20):
            raised = list(taus)
            raised[t] += 0.05
            assert ergodic_bound_rhs(constants(), raised, 20) > base

    def test_inapplicable_stepsize(self):
        with pytest.raises(BoundInapplicable):
            ergodic_bound_rhs(constants(eta=0.1), [0.0] * 5, 5)

    def test_short_threshold_list(self):
        with pytest.raises(ValueError):
            ergodic_bound_rhs(constants(), [0.0] * 3, 5)


class TestCases:
    def test_case_a_scales_like_inverse_sqrt_horizon(self):
        c = constants(f0_gap=1e-6)
        small = case_stepsize(StepCase.A, c, 10_000, [0.0] * 10_000)
        large = case_stepsize(StepCase.A, c, 40_000, [0.0] * 40_000)
        assert large < small < eta_max(c.lips, c.delta, c.n)
        assert small / large == pytest.approx(2.0)

    def test_case_a_clipped(self):
        c = constants(f0_gap=1e6)
        assert case_stepsize(StepCase.A, c, 10, [0.0] * 10) == eta_max(c.lips, c.delta, c.n)

    def test_case_b_without_threshold_matches_case_a(self):
        c = constants(f0_gap=1e-6)
        taus = [0.0] * 500
        k = case_constants(StepCase.B, c, 500, taus)
        assert k.k3 == 0.0
        assert case_stepsize(StepCase.B, c, 500, taus) == pytest.approx(case_stepsize(StepCase.A, c, 500, taus))

    def test_case_c_mean_square_threshold_shrinks(self):
        c = constants()
        b = []
        for rounds in (100, 1000, 10000):
            taus = [0.5 / (t + 1) for t in range(rounds)]
            b.append(case_constants(StepCase.C, c, rounds, taus).b_t)
        assert b[0] > b[1] > b[2]
        # sum of 1/(t+1)^2 converges, so b_T * T settles
        assert b[2] * 10000 == pytest.approx(b[1] * 1000, rel=0.01)

    def test_case_c_derived_constants(self):
        c = constants()
        taus = [0.2] * 10
        k = case_constants(StepCase.C, c, 10, taus)
        assert k.mean_tau_sq == pytest.approx(0.04)
        assert k.a_t == pytest.approx(k.k2_tilde + k.k4 * 0.04)
        assert k.k2_tilde == pytest.approx(k.k2 + k.k3 * k.eta_max ** 2)

    @pytest.mark.parametrize("case", list(StepCase))
    def test_rate_bound_positive(self, case):
        taus = [0.1 / (t + 1) for t in range(100)]
        assert case_rate_bound(case, constants(), 100, taus) > 0.0

    def test_case_accepts_string(self):
        assert case_constants("A", constants(), 10, [0.0] * 10).case is StepCase.A
