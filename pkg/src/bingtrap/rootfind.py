"""Newton iteration safeguarded by bisection for bracketed scalar roots."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Callable, NamedTuple

_TINY = sys.float_info.epsilon


class NoBracket(ValueError):
    """Residual does not change sign over the supplied interval."""


class NotConverged(RuntimeError):
    """Iteration budget exhausted; ``result`` holds the best iterate."""

    def __init__(self, message: str, result: "RootResult") -> None:
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class SolverControls:
    residual_tol: float = 1e-12
    step_tol: float = 1e-14
    max_iterations: int = 100

    def __post_init__(self) -> None:
        if not self.residual_tol > 0.0:
            raise ValueError(f"residual_tol must be > 0, got {self.residual_tol}")
        if not self.step_tol > 0.0:
            raise ValueError(f"step_tol must be > 0, got {self.step_tol}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


class RootResult(NamedTuple):
    root: float
    iterations: int
    converged: bool
    final_residual: float


def solve_bracketed(
    residual: Callable[[float], float],
    derivative: Callable[[float], float],
    lo: float,
    hi: float,
    guess: float,
    controls: SolverControls = SolverControls(),
) -> RootResult:
    """Find a root of ``residual`` in ``[lo, hi]`` starting from ``guess``.

    Newton steps are taken whenever they stay strictly inside the current
    bracket; otherwise (or when the derivative is negligible) the bracket is
    bisected. Every evaluated iterate lies in ``[lo, hi]``.

    Converges when ``|residual(x)| <= controls.residual_tol`` or when the
    bracket (or the last Newton correction) shrinks below
    ``controls.step_tol``.

    Raises:
        NoBracket: ``residual(lo)`` and ``residual(hi)`` share a strict sign.
        NotConverged: ``controls.max_iterations`` exhausted.
    """
    # endpoints are probed in argument order, then sorted
    r_lo = residual(lo)
    if abs(r_lo) <= controls.residual_tol:
        return RootResult(lo, 0, True, r_lo)
    r_hi = residual(hi)
    if abs(r_hi) <= controls.residual_tol:
        return RootResult(hi, 0, True, r_hi)
    if r_lo * r_hi > 0.0:
        raise NoBracket(
            f"residual has the same sign at both ends: r({lo!r})={r_lo!r}, r({hi!r})={r_hi!r}"
        )
    if lo > hi:
        lo, hi, r_lo, r_hi = hi, lo, r_hi, r_lo
    # orient so that residual(neg) < 0 < residual(pos)
    neg, pos = (lo, hi) if r_lo < 0.0 else (hi, lo)

    x = min(max(guess, lo), hi)
    best_x, best_r = (lo, r_lo) if abs(r_lo) <= abs(r_hi) else (hi, r_hi)
    steps = 0
    while True:
        r = residual(x)
        if abs(r) < abs(best_r):
            best_x, best_r = x, r
        if abs(r) <= controls.residual_tol:
            return RootResult(x, steps, True, r)
        if steps == controls.max_iterations:
            break
        if r < 0.0:
            neg = x
        else:
            pos = x
        width = abs(pos - neg)
        if width <= controls.step_tol:
            return RootResult(x, steps, True, r)

        d = derivative(x)
        x_new = None
        if abs(d) > _TINY:
            cand = x - r / d
            a, b = (neg, pos) if neg < pos else (pos, neg)
            if a < cand < b:
                if abs(cand - x) <= controls.step_tol:
                    return RootResult(cand, steps + 1, True, residual(cand))
                x_new = cand
        if x_new is None:
            x_new = 0.5 * (neg + pos)
        x = x_new
        steps += 1

    raise NotConverged(
        f"no convergence in {controls.max_iterations} iterations "
        f"(best x={best_x!r}, residual={best_r!r})",
        RootResult(best_x, controls.max_iterations, False, best_r),
    )
