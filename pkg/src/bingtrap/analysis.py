"""Error norms, observed convergence order and energy bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .constitutive import SystemParams
from .simulate import (
    ForcingSpec,
    RunConfig,
    Trajectory,
    benchmark_config,
    commensurate_ratio,
    eval_forcing,
    run,
    step_count,
)


class GridMismatch(ValueError):
    """Trajectories are not sampled on the same time grid."""


@dataclass(frozen=True)
class ErrorReport:
    e_u: float
    e_v: float
    M: int
    dt: float


@dataclass(frozen=True)
class ConvergenceReport:
    entries: tuple[tuple[float, float, float], ...]
    observed_order_u: float
    observed_order_v: float


def check_same_grid(a: Trajectory, b: Trajectory, rtol: float = 1e-9) -> None:
    if len(a) != len(b):
        raise GridMismatch(
            f"grids differ: {len(a)} samples at dt={a.dt!r} vs {len(b)} samples at dt={b.dt!r}"
        )
    scale = max(1.0, float(np.max(np.abs(a.t))))
    if not np.allclose(a.t, b.t, rtol=0.0, atol=rtol * scale):
        raise GridMismatch(f"time stamps differ: dt={a.dt!r} vs dt={b.dt!r}")


def error_norm(traj: Trajectory, ref: Trajectory) -> ErrorReport:
    """e_p = sqrt(sum_{i=1..M} (p_i - p_ref_i)^2) / M for p in {u, v}.

    The initial sample is excluded; ``M`` is the number of steps.
    """
    check_same_grid(traj, ref)
    M = len(traj) - 1
    if M < 1:
        raise GridMismatch("need at least one step to compare")
    du = traj.u[1:] - ref.u[1:]
    dv = traj.v[1:] - ref.v[1:]
    e_u = math.sqrt(float(np.dot(du, du))) / M
    e_v = math.sqrt(float(np.dot(dv, dv))) / M
    return ErrorReport(e_u, e_v, M, traj.dt)


def observed_order(dts: Sequence[float], errors: Sequence[float]) -> float:
    """Mean of log(e_i / e_{i+1}) / log(dt_i / dt_{i+1}) over consecutive pairs.

    For successive halvings this is the mean of log2(e(2 dt) / e(dt)).
    Returns nan with fewer than two entries.
    """
    if len(dts) < 2:
        return math.nan
    rates = [
        math.log(errors[i] / errors[i + 1]) / math.log(dts[i] / dts[i + 1])
        for i in range(len(dts) - 1)
    ]
    return sum(rates) / len(rates)


def convergence_report(entries: Sequence[tuple[float, float, float]]) -> ConvergenceReport:
    ordered = tuple(sorted(entries, key=lambda e: -e[0]))
    dts = [e[0] for e in ordered]
    return ConvergenceReport(
        ordered,
        observed_order(dts, [e[1] for e in ordered]),
        observed_order(dts, [e[2] for e in ordered]),
    )


def convergence_study(
    base: RunConfig,
    dts: Sequence[float],
    dt_ref: float,
    runner: Callable[..., Trajectory] = run,
) -> ConvergenceReport:
    """Compare runs of ``base`` at each ``dt`` with one backward-Euler reference.

    The reference is computed once at ``dt_ref`` (stored at the gcd of the
    step ratios) and reused for every coarse run.
    """
    dts = sorted(dts, reverse=True)
    ratios = [commensurate_ratio(dt, dt_ref) for dt in dts]
    stride = math.gcd(*ratios)
    t_end = max(step_count(base.t_end, dt) * dt for dt in dts)
    ref_cfg = replace(benchmark_config(base, dt_ref), t_end=t_end)
    ref = runner(ref_cfg, storage_stride=stride)

    entries = []
    for dt, ratio in zip(dts, ratios):
        traj = runner(replace(base, ip=replace(base.ip, dt=dt)))
        sub = ref.subsample(ratio // stride).truncate(len(traj))
        report = error_norm(traj, sub)
        entries.append((dt, report.e_u, report.e_v))
    return convergence_report(entries)


def dissipated_energy_total(traj: Trajectory) -> float:
    return float(traj.dissipated[-1])


def energy_balance_residual(traj: Trajectory, forcing: ForcingSpec, sys: SystemParams) -> float:
    """|change in kinetic + elastic energy + E_d(T) - external work|.

    External work is the trapezoidal quadrature of ``f_ext * v`` on the
    stored samples.
    """
    m, k = sys.mass, sys.stiffness
    mech = 0.5 * m * traj.v**2 + 0.5 * k * traj.u**2
    f_ext = np.array([eval_forcing(forcing, float(t)) for t in traj.t])
    p = f_ext * traj.v
    work = float(np.sum(0.5 * (p[1:] + p[:-1]) * np.diff(traj.t)))
    return abs(float(mech[-1] - mech[0]) + dissipated_energy_total(traj) - work)


def dissipation_from_samples(t: np.ndarray, v: np.ndarray, f_d: np.ndarray) -> np.ndarray:
    """Cumulative trapezoidal integral of ``v * f_d`` over sample times ``t``."""
    p = np.asarray(v) * np.asarray(f_d)
    out = np.zeros(len(p))
    out[1:] = np.cumsum(0.5 * (p[1:] + p[:-1]) * np.diff(t))
    return out
