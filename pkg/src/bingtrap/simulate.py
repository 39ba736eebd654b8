"""Full-interval runs, forcing functions and benchmark trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .constitutive import DashpotParams, SystemParams
from .integrator import IntegratorParams, State, StepDiagnostics, initialize, step
from .rootfind import NotConverged

# relative slack when turning a time ratio into an integer count
_COUNT_RTOL = 1e-9


class NotCommensurate(ValueError):
    """Reference step does not divide the coarse step."""


class StepFailure(RuntimeError):
    """A time step failed; ``index`` is the 1-based step number."""

    def __init__(self, index: int, cause: Exception) -> None:
        super().__init__(f"step {index} failed: {cause}")
        self.index = index
        self.cause = cause


@dataclass(frozen=True)
class ForcingSpec:
    """External force. ``damped_sine`` is ``A sin(omega t) exp(decay t)``."""

    variant: Literal["zero", "constant", "damped_sine"] = "zero"
    amplitude: float = 0.0
    angular_frequency: float = 0.0
    decay_rate: float = 0.0

    def __post_init__(self) -> None:
        if self.variant not in ("zero", "constant", "damped_sine"):
            raise ValueError(f"unknown forcing variant {self.variant!r}")

    @classmethod
    def zero(cls) -> "ForcingSpec":
        return cls("zero")

    @classmethod
    def constant(cls, amplitude: float) -> "ForcingSpec":
        return cls("constant", amplitude)

    @classmethod
    def damped_sine(cls, amplitude: float, angular_frequency: float, decay_rate: float) -> "ForcingSpec":
        return cls("damped_sine", amplitude, angular_frequency, decay_rate)

    @classmethod
    def paper(cls) -> "ForcingSpec":
        """2 sin(2 pi t) exp(-0.2 t), the load used in every experiment."""
        return cls.damped_sine(2.0, 2.0 * math.pi, -0.2)


def eval_forcing(spec: ForcingSpec, t: float) -> float:
    if spec.variant == "zero":
        return 0.0
    if spec.variant == "constant":
        return spec.amplitude
    return spec.amplitude * math.sin(spec.angular_frequency * t) * math.exp(spec.decay_rate * t)


@dataclass(frozen=True)
class RunConfig:
    sys: SystemParams
    dp: DashpotParams
    ip: IntegratorParams
    forcing: ForcingSpec = field(default_factory=ForcingSpec)
    u0: float = 0.0
    v0: float = 0.0
    t_end: float = 10.0

    def __post_init__(self) -> None:
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if not math.isfinite(self.t_end / self.ip.dt):
            raise ValueError("t_end / dt is not finite")

    @property
    def n_steps(self) -> int:
        return step_count(self.t_end, self.ip.dt)


def step_count(t_end: float, dt: float) -> int:
    """ceil(t_end/dt), ignoring round-off just above an integer."""
    ratio = t_end / dt
    n = math.ceil(ratio - _COUNT_RTOL * max(1.0, ratio))
    return max(n, 1)


@dataclass
class Trajectory:
    """Sampled run output.

    Sample ``i`` sits at ``t[i] = i * dt``. ``predictor``, ``yielded`` and
    ``iterations`` describe the step that produced sample ``i`` (entry 0 is
    a placeholder for the initial state).
    """

    dt: float
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    f_s: np.ndarray
    f_d: np.ndarray
    dissipated: np.ndarray
    predictor: np.ndarray
    yielded: np.ndarray
    iterations: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def state(self, i: int) -> State:
        return State(float(self.t[i]), float(self.u[i]), float(self.v[i]), float(self.f_s[i]), float(self.f_d[i]))

    @property
    def states(self) -> list[State]:
        return [self.state(i) for i in range(len(self))]

    def diagnostics(self, i: int) -> StepDiagnostics:
        return StepDiagnostics(float(self.predictor[i]), bool(self.yielded[i]), int(self.iterations[i]))

    def subsample(self, stride: int) -> "Trajectory":
        if stride < 1:
            raise ValueError(f"stride must be >= 1, got {stride}")
        sl = slice(None, None, stride)
        return Trajectory(
            self.dt * stride,
            self.t[sl].copy(),
            self.u[sl].copy(),
            self.v[sl].copy(),
            self.f_s[sl].copy(),
            self.f_d[sl].copy(),
            self.dissipated[sl].copy(),
            self.predictor[sl].copy(),
            self.yielded[sl].copy(),
            self.iterations[sl].copy(),
        )

    def truncate(self, n: int) -> "Trajectory":
        return Trajectory(
            self.dt,
            self.t[:n],
            self.u[:n],
            self.v[:n],
            self.f_s[:n],
            self.f_d[:n],
            self.dissipated[:n],
            self.predictor[:n],
            self.yielded[:n],
            self.iterations[:n],
        )


def run(config: RunConfig, storage_stride: int = 1) -> Trajectory:
    """Integrate over ``ceil(t_end/dt)`` steps.

    Dissipated energy is accumulated with the trapezoidal rule on
    ``v * f_d`` at full resolution. With ``storage_stride > 1`` only every
    ``storage_stride``-th sample is kept (the trailing partial block is
    dropped).
    """
    if storage_stride < 1:
        raise ValueError(f"storage_stride must be >= 1, got {storage_stride}")
    sys_, dp, ip, forcing = config.sys, config.dp, config.ip, config.forcing
    dt = ip.dt
    n = config.n_steps
    n_keep = n // storage_stride + 1

    t = np.empty(n_keep)
    u = np.empty(n_keep)
    v = np.empty(n_keep)
    f_s = np.empty(n_keep)
    f_d = np.empty(n_keep)
    e_d = np.empty(n_keep)
    pred = np.zeros(n_keep)
    yielded = np.zeros(n_keep, dtype=bool)
    iters = np.zeros(n_keep, dtype=np.int64)

    s = initialize(sys_, dp, config.u0, config.v0)
    t[0], u[0], v[0], f_s[0], f_d[0], e_d[0] = 0.0, s.u, s.v, s.f_s, s.f_d, 0.0

    energy = 0.0
    power = s.v * s.f_d
    f_prev = eval_forcing(forcing, 0.0)
    half_dt = 0.5 * dt
    j = 0
    for i in range(1, n + 1):
        t_i = i * dt
        f_next = eval_forcing(forcing, t_i)
        try:
            s, diag = step(sys_, dp, ip, s, f_prev, f_next)
        except (NotConverged, ArithmeticError, ValueError) as exc:
            raise StepFailure(i, exc) from exc
        # pin the clock to the index; no accumulated drift
        s = s._replace(t=t_i)
        new_power = s.v * s.f_d
        energy += half_dt * (power + new_power)
        power = new_power
        f_prev = f_next
        if i % storage_stride == 0:
            j += 1
            t[j], u[j], v[j], f_s[j], f_d[j], e_d[j] = t_i, s.u, s.v, s.f_s, s.f_d, energy
            pred[j], yielded[j], iters[j] = diag
    return Trajectory(dt * storage_stride, t, u, v, f_s, f_d, e_d, pred, yielded, iters)


def commensurate_ratio(dt: float, dt_ref: float) -> int:
    """Integer ``dt / dt_ref``; raises :class:`NotCommensurate` otherwise."""
    ratio = dt / dt_ref
    r = round(ratio)
    if r < 1 or abs(ratio - r) > _COUNT_RTOL * max(1.0, ratio):
        raise NotCommensurate(f"dt_ref={dt_ref!r} does not divide dt={dt!r} (ratio {ratio!r})")
    return r


def benchmark_config(config: RunConfig, dt_ref: float) -> RunConfig:
    """Backward-Euler (alpha = beta = 1) variant of ``config`` at ``dt_ref``."""
    return replace(config, ip=replace(config.ip, dt=dt_ref, alpha=1.0, beta=1.0))


def run_benchmark(config: RunConfig, dt_ref: float) -> Trajectory:
    """Reference run at ``dt_ref`` sampled on the grid of ``config.ip.dt``."""
    stride = commensurate_ratio(config.ip.dt, dt_ref)
    n_coarse = config.n_steps
    t_end = n_coarse * config.ip.dt
    ref_cfg = replace(benchmark_config(config, dt_ref), t_end=t_end)
    traj = run(ref_cfg, storage_stride=stride)
    # pin stored dt to the coarse value; ratio rounding noise must not leak
    traj.dt = config.ip.dt
    return traj.truncate(n_coarse + 1)
