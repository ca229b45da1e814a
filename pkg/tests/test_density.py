import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wardlab.density import (
    AnalysisConfig,
    DensityTrace,
    IndexPredicate,
    Status,
    Verdict,
    checkpoints,
    combine_all,
    combine_any,
    counting_density,
    density_limit_verdict,
    evens,
    mask_verdict,
    squares,
)
from wardlab.errors import ConfigError

always = IndexPredicate(lambda k: True, "always")
never = IndexPredicate(lambda k: np.zeros(k.shape, bool), "never", vectorized=True)


def test_counting_density_examples():
    assert counting_density(evens(), 10) == Fraction(1, 2)
    assert counting_density(squares(), 10_000) == Fraction(100, 10_000)
    assert counting_density(always, 7) == 1


@given(st.integers(1, 200_000))
def test_square_count_matches_isqrt(n):
    assert counting_density(squares(), n) == Fraction(math.isqrt(n), n)


def test_density_verdict_examples():
    config = AnalysisConfig(horizon=10_000)
    v = density_limit_verdict(squares(), config)
    assert v.satisfied and v.final_density == Fraction(1, 100)

    v = density_limit_verdict(evens(), AnalysisConfig(horizon=10_000, pass_tolerance=0.02, fail_threshold=0.1))
    assert v.violated and v.final_density == Fraction(1, 2)
    assert v.witness_indices and all(i % 2 == 0 for i in v.witness_indices)
    assert len(v.witness_indices) <= 10 and max(v.witness_indices) == 10_000

    v = density_limit_verdict(never, config)
    assert v.satisfied and all(c == 0 for _, c in v.trace.checkpoints)


def test_checkpoints_are_geometric_and_end_at_horizon():
    pts = checkpoints(100_000)
    assert pts[0] == 16 and pts[-1] == 100_000
    assert all(b > a for a, b in zip(pts, pts[1:]))
    assert checkpoints(10) == [10]
    custom = checkpoints(10_000, 5)
    assert custom[-1] == 10_000 and len(custom) <= 5


@given(st.lists(st.booleans(), min_size=1, max_size=3000))
def test_trace_counts_are_monotone_with_unit_steps(bits):
    mask = np.array(bits)
    v = mask_verdict(mask, AnalysisConfig(horizon=len(bits)))
    counts = np.cumsum(mask)
    for n, c in v.trace.checkpoints:
        assert c == counts[n - 1]
    assert set(np.diff(np.concatenate([[0], counts]))) <= {0, 1}


@given(st.lists(st.booleans(), min_size=1, max_size=500))
def test_verdict_is_deterministic(bits):
    mask = np.array(bits)
    config = AnalysisConfig(horizon=len(bits))
    assert mask_verdict(mask, config) == mask_verdict(mask.copy(), config)


def test_late_burst_is_not_satisfied():
    mask = np.zeros(10_000, bool)
    mask[-2000:] = True
    v = mask_verdict(mask, AnalysisConfig(horizon=10_000))
    assert not v.satisfied


def test_early_mass_with_clean_tail_is_satisfied():
    # density 0.025 at the horizon but nothing in the second half
    mask = np.zeros(100_000, bool)
    mask[:2500] = True
    v = mask_verdict(mask, AnalysisConfig())
    assert v.final_density == Fraction(1, 40)
    assert v.satisfied and v.tail_density == 0


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict(Status.VIOLATED, 10)
    with pytest.raises(ValueError):
        Verdict(Status.SATISFIED, 10, trace=DensityTrace(((20, 1),)))
    with pytest.raises(ValueError):
        DensityTrace(((10, 1), (5, 1)))


def test_config_validation():
    with pytest.raises(ConfigError):
        AnalysisConfig(pass_tolerance=0.3, fail_threshold=0.2)
    with pytest.raises(ConfigError):
        AnalysisConfig(epsilon_grid=(0.1, 1.0))
    with pytest.raises(ConfigError):
        AnalysisConfig(epsilon_grid=())
    with pytest.raises(ConfigError):
        AnalysisConfig(horizon=0)
    with pytest.raises(ConfigError):
        AnalysisConfig(lambda_grid=(3.0,))


def test_config_from_env(monkeypatch):
    monkeypatch.setenv("WARDLAB_DEFAULT_HORIZON", "1234")
    assert AnalysisConfig.from_env().horizon == 1234
    assert AnalysisConfig.from_env(horizon=10).horizon == 10
    monkeypatch.setenv("WARDLAB_DEFAULT_HORIZON", "lots")
    with pytest.raises(ConfigError):
        AnalysisConfig.from_env()


@given(
    st.integers(1, 10**7),
    st.lists(st.floats(1e-6, 10), min_size=1, max_size=6, unique=True),
)
def test_config_round_trip(horizon, eps):
    config = AnalysisConfig(horizon=horizon, epsilon_grid=tuple(sorted(eps, reverse=True)))
    assert AnalysisConfig.from_dict(config.to_dict()) == config


def _v(status):
    witnesses = (1,) if status == Status.VIOLATED else ()
    return Verdict(status, 10, witness_indices=witnesses)


S, V, I = Status.SATISFIED, Status.VIOLATED, Status.INCONCLUSIVE


@pytest.mark.parametrize(
    "statuses, all_, any_",
    [
        ((S, S), S, S),
        ((S, V), V, S),
        ((V, V), V, V),
        ((S, I), I, S),
        ((V, I), V, I),
        ((I, I), I, I),
    ],
)
def test_combinators(statuses, all_, any_):
    verdicts = [_v(s) for s in statuses]
    assert combine_all(verdicts).status is all_
    assert combine_any(verdicts).status is any_
