import pytest

from ETGossip.config import Objective, Run, apply_overrides, load_config, parse_config, with_value
from ETGossip.exceptions import ConfigError

MINIMAL = """
# smallest useful experiment
n=4
d=2
T=10
eta=0.1
policy.kind=zero
"""


def problems_of(text):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    return info.value.problems


class TestParseConfig:
    def test_minimal_fills_defaults(self):
        cfg = parse_config(MINIMAL)
        assert (cfg.n, cfg.d, cfg.rounds, cfg.eta) == (4, 2, 10, 0.1)
        assert cfg.policy_kind == "zero"
        assert cfg.sparsity == Run.SPARSITY
        assert cfg.reps == Run.REPS
        assert cfg.objective_kind == Objective.KIND
        assert cfg.alpha == Objective.ALPHA
        assert cfg.edge_count is None and cfg.case is None

    def test_dotted_keys_and_inline_comments(self):
        cfg = parse_config(MINIMAL.replace("policy.kind=zero", "policy.kind=relative  # eps * |x0|\npolicy.epsilon=0.005"))
        assert cfg.policy_kind == "relative"
        assert cfg.epsilon == 0.005

    def test_periodic_without_period(self):
        problems = problems_of(MINIMAL.replace("policy.kind=zero", "policy.kind=periodic"))
        assert any(p.startswith("policy.kp") for p in problems)

    def test_duplicate_key(self):
        problems = problems_of(MINIMAL + "n=5\n")
        assert any(p.startswith("n: duplicate") for p in problems)

    def test_unknown_key(self):
        problems = problems_of(MINIMAL + "policy.colour=blue\n")
        assert any(p.startswith("policy.colour: unknown") for p in problems)

    def test_every_problem_reported(self):
        problems = problems_of("n=four\npolicy.kind=zero\nbogus=1\n")
        joined = " | ".join(problems)
        for key in ("n:", "bogus:", "d:", "T:"):
            assert key in joined

    def test_missing_value(self):
        assert any("missing value" in p for p in problems_of(MINIMAL + "seed=\n"))

    def test_eta_and_case_exclusive(self):
        assert any(p.startswith("case:") for p in problems_of(MINIMAL + "case=A\n"))

    def test_case_alone_is_enough(self):
        cfg = parse_config(MINIMAL.replace("eta=0.1", "case=b"))
        assert cfg.case == "B" and cfg.eta is None

    def test_stepsize_required(self):
        assert any(p.startswith("eta:") for p in problems_of(MINIMAL.replace("eta=0.1\n", "")))

    def test_stochastic_schemes_need_probabilities(self):
        assert any(p.startswith("policy.p_link") for p in problems_of(MINIMAL.replace("zero", "probabilistic")))
        assert any(p.startswith("policy.p_k") for p in problems_of(MINIMAL.replace("zero", "variable_working")))
        assert any(p.startswith("policy.p_k") for p in problems_of(MINIMAL.replace("zero", "variable_working") + "policy.p_k=1.5\n"))

    def test_unknown_policy(self):
        assert any(p.startswith("policy.kind") for p in problems_of(MINIMAL.replace("zero", "gossipy")))

    def test_bounds_checked(self):
        problems = problems_of(MINIMAL.replace("n=4", "n=1") + "reps=0\nsparsity=1.0\n")
        assert {p.split(":")[0] for p in problems} >= {"n", "reps", "sparsity"}

    def test_as_dict_uses_config_keys(self):
        d = parse_config(MINIMAL).as_dict()
        assert d["T"] == 10 and d["policy.kind"] == "zero" and d["objective.kind"] == "quadratic"


class TestLoadConfig:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError) as info:
            load_config(str(tmp_path / "nope.cfg"))
        assert info.value.problems[0].startswith("config:")

    def test_round_trip_file(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text(MINIMAL, encoding="utf-8")
        assert load_config(str(path)) == parse_config(MINIMAL)


class TestOverrides:
    def test_overrides_applied(self):
        cfg = apply_overrides(parse_config(MINIMAL), out="x.csv", seed=4, reps=3)
        assert (cfg.output, cfg.seed, cfg.reps) == ("x.csv", 4, 3)

    def test_no_overrides_returns_same(self):
        cfg = parse_config(MINIMAL)
        assert apply_overrides(cfg) is cfg

    def test_overrides_validated(self):
        with pytest.raises(ConfigError):
            apply_overrides(parse_config(MINIMAL), reps=0)


class TestEventTriggeredAlias:
    def alias(self, extra):
        return parse_config(MINIMAL.replace("policy.kind=zero", "policy.kind=event_triggered\n" + extra))

    def test_schedule_inferred(self):
        assert self.alias("policy.tau0=0.05").schedule_name == "constant"
        assert self.alias("policy.epsilon=0.01").schedule_name == "relative"
        assert self.alias("").schedule_name == "zero"

    def test_explicit_schedule(self):
        cfg = self.alias("policy.schedule=Linear_Decay\npolicy.tau0=0.5")
        assert cfg.schedule == "linear_decay"
        assert cfg.schedule_name == "linear_decay"

    def test_schedule_needs_alias(self):
        problems = problems_of(MINIMAL + "policy.schedule=constant\n")
        assert any(p.startswith("policy.schedule: only read") for p in problems)

    def test_unknown_schedule(self):
        problems = problems_of(MINIMAL.replace("policy.kind=zero", "policy.kind=event_triggered\npolicy.schedule=cosine"))
        assert any(p.startswith("policy.schedule: unknown") for p in problems)

    def test_named_schedules_unchanged(self):
        assert parse_config(MINIMAL).schedule_name == "zero"
        assert parse_config(MINIMAL.replace("zero", "sqrt_decay\npolicy.tau0=0.2")).schedule_name == "sqrt_decay"
        assert parse_config(MINIMAL.replace("zero", "periodic\npolicy.kp=2")).schedule_name is None


class TestSweepKeys:
    def test_values_split(self):
        cfg = parse_config(MINIMAL + "sweep.key=policy.tau0\nsweep.values=0, 0.01,,0.02\n")
        assert cfg.sweep_key == "policy.tau0"
        assert cfg.sweep_values == ("0", "0.01", "0.02")

    def test_key_without_values(self):
        problems = problems_of(MINIMAL + "sweep.key=sparsity\n")
        assert any(p.startswith("sweep.key: sweep.key and sweep.values") for p in problems)

    def test_unsweepable(self):
        assert any(p.startswith("sweep.key: cannot sweep") for p in problems_of(MINIMAL + "sweep.key=reps\nsweep.values=1,2\n"))
        assert any(p.startswith("sweep.key: cannot sweep") for p in problems_of(MINIMAL + "sweep.key=policy.nope\nsweep.values=1\n"))

    def test_with_value_converts(self):
        cfg = with_value(parse_config(MINIMAL), "n", "9")
        assert cfg.n == 9 and cfg.d == 2

    def test_with_value_rejects(self):
        with pytest.raises(ConfigError):
            with_value(parse_config(MINIMAL), "n", "nine")
        with pytest.raises(ConfigError):
            with_value(parse_config(MINIMAL), "n", "1")
        with pytest.raises(ConfigError):
            with_value(parse_config(MINIMAL), "colour", "red")
