import pytest

from ffcircle.config import count_limit
from ffcircle.suites import SUITES, orthogonality, run_suite, stabilization


def test_suite_names():
    assert set(SUITES) == {"orthogonality", "major-arc", "large-scale", "weak11", "transference",
                           "projections"}
    with pytest.raises(KeyError):
        run_suite("nonsense")


def test_small_runs_pass():
    assert orthogonality(primes=(3,), n_max=3, samples=20).passed
    assert stabilization(primes=(2,), max_deg=2).passed


def test_limit_is_reported_as_skipped():
    with count_limit(4):
        (res,) = run_suite("large-scale")
    assert res.skipped and not res.passed
