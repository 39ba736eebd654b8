import pytest

from bingtrap import DashpotParams, ForcingSpec, IntegratorParams, RunConfig, SystemParams


@pytest.fixture
def bingham():
    """Mass/spring/dashpot row used for the N = 1 experiments."""
    return SystemParams(1.0, 100.0), DashpotParams(1.0, 1.0, 1.0)


@pytest.fixture
def norton():
    return SystemParams(1.0, 10.0), DashpotParams(1.0, 3.0, 1.0)


@pytest.fixture
def bingham_config(bingham):
    def make(dt=1e-3, alpha=1.0, beta=1.0, t_end=1.0, forcing=None, u0=0.0, v0=0.0):
        sys_, dp = bingham
        return RunConfig(
            sys_, dp, IntegratorParams(dt, alpha, beta), forcing or ForcingSpec.paper(), u0, v0, t_end
        )

    return make


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """``record(criterion, ok, detail)`` for the end-of-run acceptance table."""
    log = request.config.stash[_ACCEPTANCE]

    def record(criterion, ok, detail=""):
        log.append((criterion, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(log, key=lambda e: e[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {criterion}  {detail}")
