import re
import warnings
from pathlib import Path

import pytest

from tcbm_credit import ExponentialSubordinator, GammaSubordinator, ScenarioError, default_probability
from tcbm_credit.scenario import (
    BUILTINS,
    GridSpec,
    ScenarioWarning,
    annualized_variance,
    emit,
    load_scenario,
    parse_scenario,
)

MINIMAL = """\
[brownian]
L0 = 1.0
sigma2 = 0.0864
beta = -0.5

[timechange.levy]
family = gamma
a = 2.0
b = 0.0
c = 2.0
"""


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtin_round_trip(name):
    scen = load_scenario(name)
    assert parse_scenario(emit(scen)) == scen


@pytest.mark.parametrize("name, a, b, c, sigma2, family", [
    ("modelA", 1.0, 1.0, 0.0, 0.09, ExponentialSubordinator),
    ("modelB", 1.0, 0.0, 1.0, 0.0846, GammaSubordinator),
    ("modelC", 10.0, 0.0, 10.0, 0.0877, GammaSubordinator),
    ("modelD", 100.0, 0.0, 100.0, 0.0880, GammaSubordinator),
])
def test_table_parameters(name, a, b, c, sigma2, family):
    scen = load_scenario(name)
    tc = scen.time_change()
    assert isinstance(tc, family)
    assert (tc.a, tc.b, tc.c) == (a, b, c)
    assert scen.sigma2 == sigma2 and scen.beta == -0.5 and scen.L0 == 1.5
    assert scen.brownian.x == 1.5
    assert scen.recovery == 0.0
    g = scen.grid
    assert (g.start, g.stop, g.count, g.spacing) == (0.05, 30.0, 120, "log")


def test_model_a_is_deterministic():
    assert load_scenario("modelA").time_change().is_deterministic


@pytest.mark.parametrize("name", ["modelB", "modelC", "modelD"])
def test_builtin_variance_constraint_holds(name):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        scen = load_scenario(name)
    assert annualized_variance(scen) == pytest.approx(0.09, abs=1e-3)


def test_variance_mismatch_warns_only():
    with pytest.warns(ScenarioWarning):
        scen = load_scenario("modelB", ["brownian.sigma2=0.05"])
    assert scen.sigma2 == 0.05


def test_empty_timechange_section_lists_required_keys():
    text = MINIMAL.split("[timechange.levy]")[0] + "[timechange]\n"
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    msg = str(err.value)
    assert "family" in msg and "a, b, c" in msg and "line 6" in msg


def test_unknown_key_has_line_number():
    with pytest.raises(ScenarioError, match=r"line 5: \[brownian.sigma\] unknown key"):
        parse_scenario(MINIMAL.replace("beta = -0.5\n", "beta = -0.5\nsigma = 0.3\n"))


def test_unknown_section_rejected():
    with pytest.raises(ScenarioError, match="unknown section"):
        parse_scenario(MINIMAL + "\n[extras]\nfoo = 1\n")


def test_invariant_violation_names_key():
    with pytest.raises(ScenarioError, match=r"\[timechange.levy\].*c must be > 0"):
        parse_scenario(MINIMAL.replace("c = 2.0", "c = -2.0"))
    with pytest.raises(ScenarioError, match=r"\[brownian.beta\]"):
        parse_scenario(MINIMAL.replace("beta = -0.5", "beta = 0.2"))
    with pytest.raises(ScenarioError, match=r"\[brownian.L0\] expected a number"):
        parse_scenario(MINIMAL.replace("L0 = 1.0", "L0 = one"))


def test_duplicate_key_is_parse_error():
    with pytest.raises(ScenarioError, match="line 3"):
        parse_scenario("[brownian]\nL0 = 1\nL0 = 2\n")


def test_weights_required_with_several_clocks():
    text = MINIMAL + "\n[timechange.cir]\na = 1.0\nb = 1.0\nc = 0.5\nlambda0 = 1.0\n"
    with pytest.raises(ScenarioError, match="weight"):
        parse_scenario(text)
    text = text.replace("[timechange.levy]\n", "[timechange.levy]\nweight = 0.6\n").replace(
        "[timechange.cir]\n", "[timechange.cir]\nweight = 0.4\n")
    scen = parse_scenario(text)
    assert scen.firm().alphas == (0.4, 0.0, 0.6)
    assert parse_scenario(emit(scen)) == scen


def test_weights_must_sum_to_one():
    text = MINIMAL.replace("[timechange.levy]\n", "[timechange.levy]\nweight = 0.5\n")
    text += "\n[timechange.oujump]\nweight = 0.4\na = 2.0\nb = 1.0\nc = 2.0\nlambda0 = 1.0\n"
    with pytest.raises(ScenarioError, match="sum to 1"):
        parse_scenario(text)


def test_cir_rates_and_overrides():
    text = MINIMAL + "\n[rates]\nmodel = cir\nr0 = 0.03\na = 0.02\nb = 0.5\nc = 0.01\nm1 = 0.0\n"
    scen = parse_scenario(text, ["recovery.R=0.4", "mc.n_paths=1000"])
    assert scen.rate_base().lambda0 == 0.03
    assert scen.recovery == 0.4 and scen.mc.n_paths == 1000
    with pytest.raises(ScenarioError, match="r0"):
        parse_scenario(MINIMAL + "\n[rates]\nmodel = cir\na = 0.02\nb = 0.5\nc = 0.01\n")


def test_portfolio_sections():
    scen = load_scenario("portfolio5")
    spec = scen.portfolio_spec()
    assert len(spec.firms) == 5 and all(f.alpha == 0.7 for f in spec.firms)
    broken = BUILTINS["portfolio5"].replace("[portfolio.firm.f3.idio]", "[portfolio.firm.f9.idio]")
    with pytest.raises(ScenarioError):
        parse_scenario(broken)
    with pytest.raises(ScenarioError, match="no \\[portfolio\\]"):
        load_scenario("modelB").portfolio_spec()


def test_grid_spec():
    g = GridSpec.from_string("1,10,4,linear")
    assert list(g.points()) == [1.0, 4.0, 7.0, 10.0]
    assert GridSpec.from_string("0.05,30,120,log").points()[-1] == pytest.approx(30.0)
    for bad in ["0,10,5,log", "1,10,5,cubic", "1,10", "10,1,5,linear"]:
        with pytest.raises(ValueError):
            GridSpec.from_string(bad)


def test_missing_file_or_builtin():
    with pytest.raises(ScenarioError, match="built-ins"):
        load_scenario("no-such-model")


def test_readme_example_parses():
    readme = Path(__file__).resolve().parents[1] / "README.md"
    block = re.search(r"```ini\n(.*?)```", readme.read_text(), re.S).group(1)
    scen = parse_scenario(block)
    assert scen.cir is not None and scen.rate_model == "cir"
    assert 0.0 < default_probability(scen.firm(), 5.0) < 1.0
