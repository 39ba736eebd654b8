"""Bingham/Norton dashpot law.

The dashpot is written in implicit form: velocity is a function of force,

    phi(f) = 0                                  if |f| <= f_y
    phi(f) = gamma * (|f| - f_y)**N * sign(f)   otherwise

which is nonsmooth at the yield force and non-invertible inside the yield
interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def sign(x: float) -> float:
    """Sign with sign(0) == 0."""
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


@dataclass(frozen=True)
class SystemParams:
    """Lumped mass and linear spring stiffness."""

    mass: float
    stiffness: float

    def __post_init__(self) -> None:
        if not self.mass > 0.0:
            raise ValueError(f"mass must be > 0, got {self.mass}")
        if not self.stiffness > 0.0:
            raise ValueError(f"stiffness must be > 0, got {self.stiffness}")


@dataclass(frozen=True)
class DashpotParams:
    """Constitutive parameters of the dashpot.

    Attributes:
        gamma: flow coefficient (velocity per force**N).
        exponent: power-law exponent N; N == 1 is the Bingham model.
        yield_force: force threshold below which the dashpot is rigid.
    """

    gamma: float
    exponent: float
    yield_force: float

    def __post_init__(self) -> None:
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.exponent >= 1.0:
            raise ValueError(f"exponent must be >= 1, got {self.exponent}")
        if not self.yield_force >= 0.0:
            raise ValueError(f"yield_force must be >= 0, got {self.yield_force}")

    @property
    def is_linear(self) -> bool:
        return self.exponent == 1.0


def phi(params: DashpotParams, f: float) -> float:
    """Dashpot velocity for dashpot force ``f``."""
    excess = abs(f) - params.yield_force
    if excess <= 0.0:
        return 0.0
    if params.exponent == 1.0:
        return params.gamma * excess * sign(f)
    return params.gamma * excess**params.exponent * sign(f)


def phi_derivative(params: DashpotParams, f: float) -> float:
    """d phi / d f, taking the plastic-side limit at |f| == f_y."""
    excess = abs(f) - params.yield_force
    if excess < 0.0:
        return 0.0
    n = params.exponent
    if n == 1.0:
        return params.gamma
    return params.gamma * n * excess ** (n - 1.0)


def invert_phi(params: DashpotParams, v: float) -> float:
    """Dashpot force producing velocity ``v``.

    For ``v == 0`` any force in the yield interval is admissible; 0 is
    returned.
    """
    if v == 0.0:
        return 0.0
    excess = abs(v) / params.gamma
    if params.exponent != 1.0:
        excess = excess ** (1.0 / params.exponent)
    return math.copysign(params.yield_force + excess, v)
