import numpy as np
import pytest

from sdfsim.model import HDR_RATES_BPS, NONUNIFORM_PROBS, UNIFORM5_PROBS, discrete_config

_ACCEPTANCE = []


def record_criterion(label: str, ok: bool, detail: str) -> None:
    _ACCEPTANCE.append((label, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def uniform_cfg():
    return discrete_config(20, UNIFORM5_PROBS, 0.02, 6.0, horizon=20_000, warmup=2_000, seed=3)


@pytest.fixture
def skewed_cfg():
    return discrete_config(20, NONUNIFORM_PROBS, 0.02, 6.0, horizon=20_000, warmup=2_000, seed=3)


R = HDR_RATES_BPS
