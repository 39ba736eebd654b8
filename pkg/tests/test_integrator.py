import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bingtrap.constitutive import DashpotParams, SystemParams, phi, sign
from bingtrap.integrator import (
    IntegratorParams,
    State,
    discrete_residuals,
    initialize,
    predictor,
    solve_dashpot_linear,
    solve_dashpot_nonlinear,
    step,
)

ZERO = State(0.0, 0.0, 0.0, 0.0, 0.0)
SYS = SystemParams(1.0, 100.0)
DP = DashpotParams(1.0, 1.0, 1.0)
IP = IntegratorParams(0.01, 1.0, 1.0)

# root of (1 + 1e-5) (f - 1)^3 = 1e-3 (2 - f), 40-digit bisection
NORTON_ROOT = 1.0966676311971105681931980889603668


class TestParams:
    @pytest.mark.parametrize("alpha", [0.0, -0.5, 1.5])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValueError, match="alpha"):
            IntegratorParams(0.01, alpha, 1.0)

    @pytest.mark.parametrize("beta", [-0.1, 1.1])
    def test_beta_range(self, beta):
        with pytest.raises(ValueError, match="beta"):
            IntegratorParams(0.01, 1.0, beta)

    def test_dt_positive(self):
        with pytest.raises(ValueError, match="dt"):
            IntegratorParams(0.0)


class TestInitialize:
    def test_at_rest(self):
        assert initialize(SYS, DP, 0.0, 0.0) == ZERO

    def test_bingham_with_velocity(self):
        s = initialize(SYS, DP, 0.1, 2.0)
        assert s.f_s == 10.0
        assert s.f_d == 3.0

    def test_norton_negative_velocity(self):
        s = initialize(SystemParams(1.0, 10.0), DashpotParams(1.0, 3.0, 1.0), 0.0, -8.0)
        assert s.f_s == 0.0
        assert s.f_d == pytest.approx(-3.0, rel=1e-15)


class TestPredictor:
    @pytest.mark.parametrize("f_ext", [0.5, 2.0])
    def test_backward_euler_from_rest(self, f_ext):
        assert predictor(SYS, IP, ZERO, 0.0, f_ext) == f_ext

    @pytest.mark.parametrize("alpha, beta", [(0.5, 0.5), (1.0, 0.0), (0.3, 0.9)])
    def test_zero_input(self, alpha, beta):
        assert predictor(SYS, IntegratorParams(0.01, alpha, beta), ZERO, 0.0, 0.0) == 0.0

    def test_combined_update_identity(self):
        # (1 + a b dt^2 k/m) v1 = (a dt/m)(f_hat - f_d1) must reproduce the raw
        # trapezoidal momentum and spring updates
        ip = IntegratorParams(0.02, 0.5, 0.25)
        s = State(0.0, 0.01, 0.3, 1.0, 1.4)
        f_hat = predictor(SYS, ip, s, 0.7, 1.1)
        f_d1, v1 = 1.2, 0.05
        f_s1 = s.f_s + SYS.stiffness * ip.dt * ((1 - ip.beta) * s.v + ip.beta * v1)
        raw = s.v + ip.dt / SYS.mass * (
            (1 - ip.alpha) * (0.7 - s.f_s - s.f_d) + ip.alpha * (1.1 - f_s1 - f_d1)
        ) - v1
        combined = ip.alpha * ip.dt / SYS.mass * (f_hat - f_d1) - (
            1 + ip.alpha * ip.beta * ip.dt**2 * SYS.stiffness / SYS.mass
        ) * v1
        assert raw == pytest.approx(combined, abs=1e-14)


class TestLinearSolve:
    def test_hand_value(self):
        assert solve_dashpot_linear(SYS, DP, IP, 2.0) == pytest.approx(103 / 102, rel=1e-15)

    def test_odd(self):
        assert solve_dashpot_linear(SYS, DP, IP, -2.0) == -solve_dashpot_linear(SYS, DP, IP, 2.0)

    def test_continuous_at_yield(self):
        assert solve_dashpot_linear(SYS, DP, IP, 1.0) == pytest.approx(1.0, rel=1e-15)

    def test_momentum_identity(self):
        f_d = solve_dashpot_linear(SYS, DP, IP, 2.0)
        v = f_d - 1.0
        assert (1 + 0.01**2 * 100) * v == pytest.approx(0.01 * (2.0 - f_d), rel=1e-13)

    def test_rejects_nonlinear(self):
        with pytest.raises(ValueError):
            solve_dashpot_linear(SYS, DashpotParams(1.0, 3.0, 1.0), IP, 2.0)


class TestNonlinearSolve:
    def test_matches_closed_form_for_bingham(self):
        f_d, res = solve_dashpot_nonlinear(SYS, DP, IP, 2.0)
        assert res.converged
        assert f_d == pytest.approx(103 / 102, rel=1e-10)

    def test_norton_against_bisection_oracle(self):
        f_d, res = solve_dashpot_nonlinear(
            SystemParams(1.0, 10.0), DashpotParams(1.0, 3.0, 1.0), IntegratorParams(1e-3), 2.0
        )
        assert res.converged
        assert f_d == pytest.approx(NORTON_ROOT, abs=1e-12)

    @pytest.mark.parametrize("s", [1.0, -1.0])
    def test_barely_yielding(self, s):
        dp = DashpotParams(1.0, 3.0, 1.0)
        f_hat = s * (1.0 + 1e-9)
        f_d, _ = solve_dashpot_nonlinear(SYS, dp, IntegratorParams(1e-3), f_hat)
        assert 1.0 <= abs(f_d) <= abs(f_hat)
        assert sign(f_d) == s


class TestStep:
    def test_stick(self):
        s, diag = step(SYS, DP, IP, ZERO, 0.0, 0.5)
        assert s == State(0.01, 0.0, 0.0, 0.0, 0.5)
        assert diag.yielded is False
        assert diag.solver_iterations == 0

    def test_slip_hand_values(self):
        s, diag = step(SYS, DP, IP, ZERO, 0.0, 2.0)
        assert diag.yielded
        assert diag.predictor == 2.0
        assert s.f_d == pytest.approx(103 / 102, rel=1e-14)
        assert s.v == pytest.approx(1 / 102, rel=1e-14)
        assert s.f_s == pytest.approx(1 / 102, rel=1e-14)
        assert s.u == pytest.approx(1 / 10200, rel=1e-14)

    def test_zero_is_fixed_point(self):
        s = ZERO
        for _ in range(100):
            s, _ = step(SYS, DP, IP, s, 0.0, 0.0)
        assert (s.u, s.v, s.f_s, s.f_d) == (0.0, 0.0, 0.0, 0.0)

    def test_tie_at_yield_is_stick(self):
        s, diag = step(SYS, DP, IP, ZERO, 0.0, 1.0)
        assert s.v == 0.0 and s.f_d == 1.0 and not diag.yielded


class TestResiduals:
    def test_zero(self):
        assert tuple(discrete_residuals(SYS, DP, IP, ZERO, ZERO, 0.0, 0.0)) == (0.0, 0.0, 0.0)

    def test_step_output_is_consistent(self):
        s1, _ = step(SYS, DP, IP, ZERO, 0.0, 2.0)
        res = discrete_residuals(SYS, DP, IP, ZERO, s1, 0.0, 2.0)
        assert max(map(abs, res)) <= 1e-14

    def test_detects_inconsistency(self):
        s1, _ = step(SYS, DP, IP, ZERO, 0.0, 2.0)
        bad = s1._replace(v=s1.v * 1.1, f_s=s1.f_s * 0.9)
        res = discrete_residuals(SYS, DP, IP, ZERO, bad, 0.0, 2.0)
        assert abs(res.momentum) > 1e-6
        assert abs(res.spring) > 1e-6
        assert abs(res.constitutive) > 1e-6


dashpots = st.builds(
    DashpotParams,
    gamma=st.floats(0.2, 5.0),
    exponent=st.sampled_from([1.0, 2.0, 3.0]),
    yield_force=st.floats(0.0, 2.0),
)
systems = st.builds(SystemParams, mass=st.floats(0.2, 5.0), stiffness=st.floats(1.0, 200.0))
integrators = st.builds(
    IntegratorParams,
    dt=st.sampled_from([1e-5, 1e-4, 1e-3, 1e-2]),
    alpha=st.sampled_from([1.0, 0.5, 0.75]),
    beta=st.sampled_from([0.0, 0.5, 1.0]),
)
# zero or well away from underflow; sign tests are meaningless below that
reals = st.one_of(st.just(0.0), st.floats(1e-6, 3.0), st.floats(-3.0, -1e-6))


@st.composite
def consistent_states(draw, dp):
    f_d = draw(reals)
    return State(0.0, draw(reals) * 0.01, phi(dp, f_d), draw(reals), f_d)


@st.composite
def step_inputs(draw):
    sys_, dp, ip = draw(systems), draw(dashpots), draw(integrators)
    s = draw(consistent_states(dp))
    s = s._replace(u=s.f_s / sys_.stiffness)
    return sys_, dp, ip, s, draw(reals), draw(reals)


@settings(max_examples=300, deadline=None)
@given(step_inputs())
def test_step_invariants(inputs):
    sys_, dp, ip, s, fe0, fe1 = inputs
    s1, diag = step(sys_, dp, ip, s, fe0, fe1)
    f_hat = diag.predictor
    if abs(f_hat) > dp.yield_force:
        assert dp.yield_force <= abs(s1.f_d) <= abs(f_hat)
        assert sign(s1.f_d) == sign(f_hat)
        assert sign(s1.v) in (sign(f_hat), 0.0)
    else:
        assert s1.v == 0.0 and s1.f_d == f_hat
    assert s1.u == s1.f_s / sys_.stiffness
    res = discrete_residuals(sys_, dp, ip, s, s1, fe0, fe1)
    assert max(map(abs, res)) <= 1e-10


@settings(max_examples=300, deadline=None)
@given(step_inputs())
def test_step_is_odd(inputs):
    sys_, dp, ip, s, fe0, fe1 = inputs
    neg = State(s.t, -s.u, -s.v, -s.f_s, -s.f_d)
    a, _ = step(sys_, dp, ip, s, fe0, fe1)
    b, _ = step(sys_, dp, ip, neg, -fe0, -fe1)
    assert (b.u, b.v, b.f_s, b.f_d) == (-a.u, -a.v, -a.f_s, -a.f_d)


@settings(max_examples=300, deadline=None)
@given(systems, integrators, st.floats(0.0, 2.0), st.floats(0.2, 5.0), st.floats(1e-6, 50.0), st.booleans())
def test_linear_and_nonlinear_paths_agree(sys_, ip, f_y, gamma, excess, negative):
    dp = DashpotParams(gamma, 1.0, f_y)
    f_hat = (f_y + excess) * (-1.0 if negative else 1.0)
    lin = solve_dashpot_linear(sys_, dp, ip, f_hat)
    nonlin, res = solve_dashpot_nonlinear(sys_, dp, ip, f_hat)
    assert res.converged
    assert math.isclose(lin, nonlin, rel_tol=1e-10)
