import logging

import pytest
from _pytest.logging import LogCaptureFixture

import limtower_cli
from limtower_cli import repro_runner
from limtower_cli.custom_decorators import CheckResult, acceptance_check, registered_checks
from limtower_cli.exceptions import CheckFailedError, InputError, InvalidMethodError, WindowError


@pytest.fixture
def small_profile(monkeypatch):
    for name, value in {
        "SNF_SAMPLES": 5,
        "PRUFER_SAMPLES": 5,
        "PRUFER_MAX_WINDOW": 6,
        "TOWER_SAMPLES": 3,
        "SES_SAMPLES": 3,
        "ML_MAX_HORIZON": 6,
        "DELTA_MAX_N": 8,
        "DELTA_MAX_K": 8,
        "DIVISIBILITY_MAX_PRIME": 13,
        "DIVISIBILITY_MAX_N": 8,
        "GROWTH_WINDOWS": range(2, 6),
    }.items():
        monkeypatch.setattr(limtower_cli.Defaults, name, value)


# init


def test_init_runner_incorrect_method():
    with pytest.raises(InvalidMethodError) as err:
        _ = repro_runner.ReproRunner(method="rm")

    assert "Attempting an invalid method in limtower: rm" in str(err.value)


def test_init_runner_unknown_fault():
    with pytest.raises(InputError) as err:
        _ = repro_runner.ReproRunner(fault="smith")

    assert "Unknown fault 'smith'. Known: delta" in err.value.message


def test_init_runner_fault_warning(caplog: LogCaptureFixture):
    with caplog.at_level(logging.WARNING):
        _ = repro_runner.ReproRunner(fault="delta")

    assert (
        "limtower_cli.repro_runner",
        logging.WARNING,
        "Injecting fault 'delta': the run is expected to fail",
    ) in caplog.record_tuples


def test_registered_checks():
    """All fifteen checks, in definition order."""
    names = [check.check_name for check in registered_checks(repro_runner.ReproRunner())]
    assert len(names) == 15
    assert names[:3] == ["smith normal form", "delta table", "prime divisibility"]
    assert names[-1] == "gray filtration"


# acceptance_check


def test_acceptance_check_catches_algebra_errors(caplog: LogCaptureFixture):
    """A domain error fails only the check that raised it."""

    class Runner:
        @acceptance_check("window", reference="windows are prefixes of the primes")
        def check(self):
            raise WindowError("(2, 5) is not a prefix")

    with caplog.at_level(logging.WARNING):
        result = Runner().check()

    assert result == CheckResult(
        name="window",
        passed=False,
        detail="WindowError: (2, 5) is not a prefix",
        reference="windows are prefixes of the primes",
    )
    assert any(
        name == "limtower_cli.custom_decorators" and "Check 'window' failed" in message
        for name, _, message in caplog.record_tuples
    )


# run


def test_run_passes(small_profile):
    with repro_runner.ReproRunner(as_json=True) as runner:
        results = runner.run()

    assert all(result.passed for result in results)
    assert runner.report["passed"]
    assert runner.report["seed"] == limtower_cli.Defaults.SEED


def test_run_is_reproducible(small_profile):
    """Same seed, same details; the thread pool does not change the outcome."""
    with repro_runner.ReproRunner(as_json=True, seed=7) as runner:
        sequential = runner.run()
    with repro_runner.ReproRunner(as_json=True, seed=7, parallel=True) as runner:
        parallel = runner.run()

    assert sequential == parallel


def test_run_with_fault(small_profile):
    with pytest.raises(CheckFailedError, match="Failed checks: delta table"):
        with repro_runner.ReproRunner(as_json=True, fault="delta") as runner:
            runner.run()
