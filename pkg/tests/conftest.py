import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from gravistat.branch import detect_turning_points, trace_branch
from gravistat.models import make_model
from gravistat.shooting import IntegratorConfig
from gravistat.validation import run_standard_checks

settings.register_profile(
    "numeric", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("numeric")

FIXTURES = Path(__file__).parent / "fixtures"

# wide enough to contain the first two turning-point pairs of the mb spiral
SPIRAL_RHO0_MIN = 1e-3
SPIRAL_RHO0_MAX = 1e9
SPIRAL_POINTS = 1100


@pytest.fixture(scope="session")
def fd_defect_constant() -> float:
    with open(FIXTURES / "fd_defect_constant.json") as fh:
        return json.load(fh)["c_est"]


@pytest.fixture(scope="session")
def default_cfg() -> IntegratorConfig:
    return IntegratorConfig()


@pytest.fixture(scope="session")
def mb_wide_branch(default_cfg):
    return trace_branch(make_model("mb"), SPIRAL_RHO0_MIN, SPIRAL_RHO0_MAX,
                        SPIRAL_POINTS, default_cfg)


@pytest.fixture(scope="session")
def mb_turning_points(mb_wide_branch, default_cfg):
    return detect_turning_points(mb_wide_branch, default_cfg)


@pytest.fixture(scope="session")
def sfd_small_eta_branch(default_cfg):
    return trace_branch(make_model("sfd", 1e-4), SPIRAL_RHO0_MIN, SPIRAL_RHO0_MAX,
                        SPIRAL_POINTS, default_cfg)


@pytest.fixture(scope="session")
def matrix_records(default_cfg):
    return run_standard_checks(default_cfg)
