"""Sectioned key-value run configuration and built-in presets.

Config files are INI-style::

    [system]
    mass = 1
    stiffness = 100

    [dashpot]
    gamma = 1
    exponent = 1
    yield_force = 1

    [integrator]
    dt = 1e-4
    alpha = 1
    beta = 1/2
    # optional: residual_tol, step_tol, max_iterations

    [forcing]
    variant = damped_sine        # zero | constant | damped_sine
    amplitude = 2
    angular_frequency = 6.283185307179586
    decay_rate = -0.2

    [run]
    t_end = 10
    u0 = 0
    v0 = 0

Real values may be written as fractions (``1/2``).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from .constitutive import DashpotParams, SystemParams
from .integrator import IntegratorParams
from .rootfind import SolverControls
from .simulate import ForcingSpec, RunConfig


class ParseError(ValueError):
    """Config text is not well-formed."""


class ValidationError(ValueError):
    """A config value violates a parameter constraint; ``key`` is ``section.name``."""

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key


_SCHEMA: dict[str, dict[str, bool]] = {
    # name -> required
    "system": {"mass": True, "stiffness": True},
    "dashpot": {"gamma": True, "exponent": True, "yield_force": True},
    "integrator": {
        "dt": True,
        "alpha": True,
        "beta": True,
        "residual_tol": False,
        "step_tol": False,
        "max_iterations": False,
    },
    "forcing": {"variant": True, "amplitude": False, "angular_frequency": False, "decay_rate": False},
    "run": {"t_end": True, "u0": False, "v0": False},
}


def _real(key: str, text: str) -> float:
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        try:
            value = float(Fraction(text))
        except (ValueError, ZeroDivisionError):
            raise ValidationError(key, f"not a real number: {text!r}") from None
    if not math.isfinite(value):
        raise ValidationError(key, f"must be finite, got {text!r}")
    return value


def _int(key: str, text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ValidationError(key, f"not an integer: {text!r}") from None


def _build(key: str, factory, *args, **kwargs):
    # re-raise constructor errors against the config key that caused them
    try:
        return factory(*args, **kwargs)
    except ValueError as exc:
        raise ValidationError(key, str(exc)) from None


def parse_config(source: str | Path) -> RunConfig:
    """Parse config text, or a path to a config file, into a RunConfig."""
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif "\n" not in source and "[" not in source and Path(source).is_file():
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source

    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc)) from None

    for section in cp.sections():
        if section not in _SCHEMA:
            raise ParseError(f"unknown section [{section}]")
        for name in cp[section]:
            if name not in _SCHEMA[section]:
                raise ParseError(f"unknown key {section}.{name}")
    for section, keys in _SCHEMA.items():
        for name, required in keys.items():
            if required and not cp.has_option(section, name):
                raise ParseError(f"missing key {section}.{name}")

    def real(section: str, name: str, default: float | None = None) -> float:
        if not cp.has_option(section, name):
            return default
        return _real(f"{section}.{name}", cp[section][name])

    # each field is checked here so the error names the offending key
    mass = real("system", "mass")
    stiffness = real("system", "stiffness")
    if not mass > 0.0:
        raise ValidationError("system.mass", f"must be > 0, got {mass}")
    if not stiffness > 0.0:
        raise ValidationError("system.stiffness", f"must be > 0, got {stiffness}")
    sys_ = SystemParams(mass, stiffness)

    gamma = real("dashpot", "gamma")
    exponent = real("dashpot", "exponent")
    yield_force = real("dashpot", "yield_force")
    if not gamma > 0.0:
        raise ValidationError("dashpot.gamma", f"must be > 0, got {gamma}")
    if not exponent >= 1.0:
        raise ValidationError("dashpot.exponent", f"must be >= 1, got {exponent}")
    if not yield_force >= 0.0:
        raise ValidationError("dashpot.yield_force", f"must be >= 0, got {yield_force}")
    dp = DashpotParams(gamma, exponent, yield_force)

    defaults = SolverControls()
    residual_tol = real("integrator", "residual_tol", defaults.residual_tol)
    step_tol = real("integrator", "step_tol", defaults.step_tol)
    max_iterations = (
        _int("integrator.max_iterations", cp["integrator"]["max_iterations"])
        if cp.has_option("integrator", "max_iterations")
        else defaults.max_iterations
    )
    if not residual_tol > 0.0:
        raise ValidationError("integrator.residual_tol", f"must be > 0, got {residual_tol}")
    if not step_tol > 0.0:
        raise ValidationError("integrator.step_tol", f"must be > 0, got {step_tol}")
    if max_iterations < 1:
        raise ValidationError("integrator.max_iterations", f"must be >= 1, got {max_iterations}")
    controls = SolverControls(residual_tol, step_tol, max_iterations)

    dt = real("integrator", "dt")
    alpha = real("integrator", "alpha")
    beta = real("integrator", "beta")
    if not dt > 0.0:
        raise ValidationError("integrator.dt", f"must be > 0, got {dt}")
    if not 0.0 < alpha <= 1.0:
        raise ValidationError("integrator.alpha", f"must be in (0, 1], got {alpha}")
    if not 0.0 <= beta <= 1.0:
        raise ValidationError("integrator.beta", f"must be in [0, 1], got {beta}")
    ip = IntegratorParams(dt, alpha, beta, controls)

    variant = cp["forcing"]["variant"].strip()
    if variant not in ("zero", "constant", "damped_sine"):
        raise ValidationError("forcing.variant", f"unknown variant {variant!r}")
    forcing = ForcingSpec(
        variant,
        real("forcing", "amplitude", 0.0),
        real("forcing", "angular_frequency", 0.0),
        real("forcing", "decay_rate", 0.0),
    )

    t_end = real("run", "t_end")
    if not t_end > 0.0:
        raise ValidationError("run.t_end", f"must be > 0, got {t_end}")
    return _build(
        "run",
        RunConfig,
        sys_,
        dp,
        ip,
        forcing,
        real("run", "u0", 0.0),
        real("run", "v0", 0.0),
        t_end,
    )


def render_config(config: RunConfig) -> str:
    """Inverse of :func:`parse_config`; floats are written with ``repr``."""
    c = config.ip.controls
    lines = [
        "[system]",
        f"mass = {config.sys.mass!r}",
        f"stiffness = {config.sys.stiffness!r}",
        "",
        "[dashpot]",
        f"gamma = {config.dp.gamma!r}",
        f"exponent = {config.dp.exponent!r}",
        f"yield_force = {config.dp.yield_force!r}",
        "",
        "[integrator]",
        f"dt = {config.ip.dt!r}",
        f"alpha = {config.ip.alpha!r}",
        f"beta = {config.ip.beta!r}",
        f"residual_tol = {c.residual_tol!r}",
        f"step_tol = {c.step_tol!r}",
        f"max_iterations = {c.max_iterations!r}",
        "",
        "[forcing]",
        f"variant = {config.forcing.variant}",
        f"amplitude = {config.forcing.amplitude!r}",
        f"angular_frequency = {config.forcing.angular_frequency!r}",
        f"decay_rate = {config.forcing.decay_rate!r}",
        "",
        "[run]",
        f"t_end = {config.t_end!r}",
        f"u0 = {config.u0!r}",
        f"v0 = {config.v0!r}",
        "",
    ]
    return "\n".join(lines)


# physical rows and (dt, alpha, beta) per case
_BINGHAM = (SystemParams(1.0, 100.0), DashpotParams(1.0, 1.0, 1.0))
_NORTON = (SystemParams(1.0, 10.0), DashpotParams(1.0, 3.0, 1.0))
_CASES = {
    "bingham_n1_benchmark": (_BINGHAM, 1e-6, 1.0, 1.0),
    "bingham_n1_case1": (_BINGHAM, 1e-4, 1.0, 0.5),
    "bingham_n1_case2": (_BINGHAM, 1e-4, 0.5, 1.0),
    "bingham_n1_case3": (_BINGHAM, 1e-4, 0.5, 0.5),
    "norton_n3_benchmark": (_NORTON, 1e-7, 1.0, 1.0),
    "norton_n3_case1": (_NORTON, 1e-7, 1.0, 0.5),
    "norton_n3_case2": (_NORTON, 1e-7, 0.5, 1.0),
    "norton_n3_case3": (_NORTON, 1e-7, 0.5, 0.5),
    "imex": (_BINGHAM, 1e-4, 1.0, 0.0),
}
PRESET_NAMES = tuple(_CASES)
DEFAULT_T_END = 10.0


def preset(name: str, t_end: float = DEFAULT_T_END) -> RunConfig:
    """Built-in experiment setups: zero initial state, damped-sine load."""
    try:
        (sys_, dp), dt, alpha, beta = _CASES[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None
    return RunConfig(sys_, dp, IntegratorParams(dt, alpha, beta), ForcingSpec.paper(), 0.0, 0.0, t_end)


def with_dt(config: RunConfig, dt: float) -> RunConfig:
    return replace(config, ip=replace(config.ip, dt=dt))
