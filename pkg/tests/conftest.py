import hypothesis
import pytest

from bittp.cqm import AnnealParams, CalibrationParams, LocalBackend

hypothesis.settings.register_profile(
    "suite",
    deadline=None,
    max_examples=40,
    derandomize=True,
    database=None,
)
hypothesis.settings.load_profile("suite")


@pytest.fixture
def fast_backend():
    """Small annealing budget for pipeline tests where feasibility matters
    and solution quality does not."""
    return LocalBackend(
        AnnealParams(num_reads=16, sweeps=500),
        CalibrationParams(),
    )


@pytest.fixture
def quality_backend():
    """Enough budget for optimal tours on desk-scale instances."""
    return LocalBackend(
        AnnealParams(num_reads=32, sweeps=1500, beta_min=0.01, beta_max=20.0),
        CalibrationParams(lambda_init_multiplier=0.15),
    )
