"""Generalized trapezoidal step for the index-reduced SDOF system.

Unknowns per time level are velocity ``v``, spring force ``f_s`` and
dashpot force ``f_d``:

    m dv/dt   = f_ext - f_s - f_d     (weight alpha on level n+1)
    df_s/dt   = k v                   (weight beta on level n+1)
    v         = phi(f_d)

Displacement is recovered as ``u = f_s / k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .constitutive import DashpotParams, SystemParams, invert_phi, phi, sign
from .rootfind import RootResult, SolverControls, solve_bracketed


@dataclass(frozen=True)
class IntegratorParams:
    """Time step and trapezoidal weights.

    ``alpha`` weights the momentum balance, ``beta`` the spring rate
    equation. ``alpha=beta=1`` is backward Euler; ``alpha=1, beta=0`` is
    the implicit-explicit split.
    """

    dt: float
    alpha: float = 1.0
    beta: float = 1.0
    controls: SolverControls = field(default_factory=SolverControls)

    def __post_init__(self) -> None:
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")


class State(NamedTuple):
    t: float
    u: float
    v: float
    f_s: float
    f_d: float


class StepDiagnostics(NamedTuple):
    predictor: float
    yielded: bool
    solver_iterations: int


def initialize(sys: SystemParams, dp: DashpotParams, u0: float, v0: float) -> State:
    """Elastic initial state: ``f_s = k u0`` and ``f_d`` consistent with ``v0``."""
    return State(0.0, u0, v0, sys.stiffness * u0, invert_phi(dp, v0))


def predictor(
    sys: SystemParams,
    ip: IntegratorParams,
    s: State,
    f_ext_n: float,
    f_ext_np1: float,
) -> float:
    """Trial force built from level-n data; decides stick versus slip."""
    inv_a = 1.0 / ip.alpha
    w = inv_a - 1.0
    return (
        f_ext_np1
        + w * f_ext_n
        - inv_a * s.f_s
        - w * s.f_d
        + (sys.mass * inv_a / ip.dt - sys.stiffness * ip.dt * (1.0 - ip.beta)) * s.v
    )


def _stiffening(sys: SystemParams, ip: IntegratorParams) -> float:
    # 1 + alpha*beta*dt^2*k/m
    return 1.0 + ip.alpha * ip.beta * ip.dt * ip.dt * sys.stiffness / sys.mass


def solve_dashpot_linear(
    sys: SystemParams, dp: DashpotParams, ip: IntegratorParams, f_hat: float
) -> float:
    """Closed-form dashpot force for the Bingham case (N == 1)."""
    if not dp.is_linear:
        raise ValueError(f"closed form requires exponent 1, got {dp.exponent}")
    c = ip.alpha / (
        dp.gamma * sys.mass * (1.0 / ip.dt + ip.alpha * ip.beta * ip.dt * sys.stiffness / sys.mass)
    )
    return (c * f_hat + sign(f_hat) * dp.yield_force) / (1.0 + c)


def solve_dashpot_nonlinear(
    sys: SystemParams, dp: DashpotParams, ip: IntegratorParams, f_hat: float
) -> tuple[float, RootResult]:
    """Solve the implicit slip equation for the dashpot force.

    The residual is divided through by ``alpha*dt/m`` so it carries force
    units; tolerances are then scaled by ``1 + |f_hat|``. The root is
    bracketed by ``[f_y*sign(f_hat), f_hat]`` and Newton starts from the
    yield end.
    """
    s = sign(f_hat)
    f_y = dp.yield_force
    n = dp.exponent
    # (m/(alpha dt)) * (1 + alpha beta dt^2 k/m) * gamma
    g = sys.mass / (ip.alpha * ip.dt) * _stiffening(sys, ip) * dp.gamma
    gs = g * s
    gn = g * n

    # phi inlined: every iterate lies in the bracket, so sign(f) == s
    def residual(f: float) -> float:
        e = abs(f) - f_y
        return (gs * e**n if e > 0.0 else 0.0) - (f_hat - f)

    def derivative(f: float) -> float:
        e = abs(f) - f_y
        return (gn * e ** (n - 1.0) if e >= 0.0 else 0.0) + 1.0

    c = ip.controls
    mag = 1.0 + abs(f_hat)
    controls = SolverControls(c.residual_tol * mag, c.step_tol * mag, c.max_iterations)
    guess = s * f_y
    result = solve_bracketed(residual, derivative, guess, f_hat, guess, controls)
    return result.root, result


def step(
    sys: SystemParams,
    dp: DashpotParams,
    ip: IntegratorParams,
    s: State,
    f_ext_n: float,
    f_ext_np1: float,
) -> tuple[State, StepDiagnostics]:
    """Advance one time step. ``s.t + dt`` is the new time stamp."""
    f_hat = predictor(sys, ip, s, f_ext_n, f_ext_np1)
    if abs(f_hat) <= dp.yield_force:
        v = 0.0
        f_d = f_hat
        diag = StepDiagnostics(f_hat, False, 0)
    else:
        if dp.is_linear:
            f_d = solve_dashpot_linear(sys, dp, ip, f_hat)
            iters = 0
        else:
            f_d, res = solve_dashpot_nonlinear(sys, dp, ip, f_hat)
            iters = res.iterations
        v = phi(dp, f_d)
        diag = StepDiagnostics(f_hat, True, iters)
    f_s = s.f_s + sys.stiffness * ip.dt * ((1.0 - ip.beta) * s.v + ip.beta * v)
    return State(s.t + ip.dt, f_s / sys.stiffness, v, f_s, f_d), diag


class Residuals(NamedTuple):
    momentum: float
    spring: float
    constitutive: float


def discrete_residuals(
    sys: SystemParams,
    dp: DashpotParams,
    ip: IntegratorParams,
    s_n: State,
    s_np1: State,
    f_ext_n: float,
    f_ext_np1: float,
) -> Residuals:
    """Scaled defects of the discrete momentum, spring and dashpot equations.

    Each defect is divided by ``1 +`` the largest magnitude among the terms
    entering it, so values near machine epsilon mean "satisfied".
    """
    a, b, dt = ip.alpha, ip.beta, ip.dt
    m, k = sys.mass, sys.stiffness

    net_n = f_ext_n - s_n.f_s - s_n.f_d
    net_np1 = f_ext_np1 - s_np1.f_s - s_np1.f_d
    mom_terms = (
        m * s_np1.v,
        m * s_n.v,
        dt * f_ext_n,
        dt * s_n.f_s,
        dt * s_n.f_d,
        dt * f_ext_np1,
        dt * s_np1.f_s,
        dt * s_np1.f_d,
    )
    momentum = m * (s_np1.v - s_n.v) - dt * ((1.0 - a) * net_n + a * net_np1)
    momentum /= 1.0 + max(abs(x) for x in mom_terms)

    spring = s_np1.f_s - s_n.f_s - k * dt * ((1.0 - b) * s_n.v + b * s_np1.v)
    spring /= 1.0 + max(abs(s_np1.f_s), abs(s_n.f_s), abs(k * dt * s_n.v), abs(k * dt * s_np1.v))

    constitutive = (s_np1.v - phi(dp, s_np1.f_d)) / (1.0 + abs(s_np1.v))
    return Residuals(momentum, spring, constitutive)
