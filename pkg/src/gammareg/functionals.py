"""Tikhonov functionals, penalties, and their approximating sequences.

The functional is T(x) = (1/p) ||F(x) - y||^p + alpha * Omega(x) on the
feasible domain and +infinity outside it. Approximations T_n replace F,
y, alpha by level-n versions; evaluation returns extended reals so that
infinite values stay explicit instead of hiding in float sentinels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridCompatibilityError, UnsupportedPenaltyError
from .grids import (
    GridFunction,
    NormTag,
    from_callable,
    norm,
    resample,
    trapezoid_weights,
)
from .operators import DomainSpec, ForwardOperator, OperatorFamily, membership, whole_space

__all__ = [
    "ExtReal",
    "PenaltySpec",
    "half_sq_l2",
    "p_power_norm",
    "linf_penalty",
    "shifted_half_sq",
    "TikhonovProblem",
    "AlphaSchedule",
    "NoiseSchedule",
    "ApproxSequence",
    "make_approx_sequence",
    "noise_direction",
    "eval_T",
    "eval_Tn",
    "eval_scaled",
    "is_eps_minimizer",
]


@dataclass(frozen=True)
class ExtReal:
    """Extended real: a finite float or an explicit +/- infinity marker.

    Arithmetic follows the usual conventions and refuses the undefined
    combinations (inf - inf, 0 * inf) loudly instead of producing NaN.
    """

    value: float = 0.0
    sign: int = 0  # 0 finite, +1 plus infinity, -1 minus infinity

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0, or +1")
        if self.sign == 0 and not math.isfinite(self.value):
            raise ValueError("finite ExtReal needs a finite value")

    @staticmethod
    def finite(v: float) -> "ExtReal":
        return ExtReal(float(v), 0)

    @property
    def is_finite(self) -> bool:
        return self.sign == 0

    def as_float(self) -> float:
        if self.sign == 0:
            return self.value
        return math.inf if self.sign > 0 else -math.inf

    def __add__(self, other) -> "ExtReal":
        other = _coerce(other)
        if self.sign == 0 and other.sign == 0:
            return ExtReal.finite(self.value + other.value)
        if self.sign == 0:
            return other
        if other.sign == 0 or other.sign == self.sign:
            return self
        raise ArithmeticError("inf - inf is undefined")

    __radd__ = __add__

    def __mul__(self, scalar: float) -> "ExtReal":
        scalar = float(scalar)
        if self.sign == 0:
            return ExtReal.finite(self.value * scalar)
        if scalar == 0.0:
            raise ArithmeticError("0 * inf is undefined")
        return ExtReal(0.0, self.sign if scalar > 0 else -self.sign)

    __rmul__ = __mul__

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign != 0:
            return 0
        if self.value == other.value:
            return 0
        return -1 if self.value < other.value else 1

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __repr__(self) -> str:
        if self.sign > 0:
            return "ExtReal(+inf)"
        if self.sign < 0:
            return "ExtReal(-inf)"
        return f"ExtReal({self.value!r})"


POS_INF = ExtReal(0.0, 1)
NEG_INF = ExtReal(0.0, -1)


def _coerce(v) -> ExtReal:
    if isinstance(v, ExtReal):
        return v
    return ExtReal.finite(float(v))


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty Omega with enough structure for solvers to interrogate.

    Kinds: half_sq_l2 (0.5 ||x||^2), p_power_norm ((1/q) ||x||_tag^q),
    linf (sup norm), shifted_half_sq (0.5 ||x - x0||^2). The smoothness
    flag tells the gradient-based solvers what they may touch.
    """

    kind: str
    q: float = 2.0
    tag: NormTag = NormTag.L2
    shift: GridFunction | None = None

    def __post_init__(self):
        if self.kind not in ("half_sq_l2", "p_power_norm", "linf", "shifted_half_sq"):
            raise UnsupportedPenaltyError(f"unknown penalty kind {self.kind!r}")
        if self.kind == "p_power_norm" and self.q < 1.0:
            raise UnsupportedPenaltyError("p_power_norm needs q >= 1")
        if self.kind == "shifted_half_sq" and self.shift is None:
            raise UnsupportedPenaltyError("shifted_half_sq needs a shift point")

    @property
    def is_smooth(self) -> bool:
        if self.kind in ("half_sq_l2", "shifted_half_sq"):
            return True
        if self.kind == "p_power_norm":
            return self.tag is NormTag.L2 and self.q >= 2.0
        return False

    def evaluate(self, x: GridFunction) -> float:
        if self.kind == "half_sq_l2":
            return 0.5 * norm(x, NormTag.L2) ** 2
        if self.kind == "shifted_half_sq":
            shift = self.shift
            if not x.same_grid(shift):
                shift = resample(shift, x.node_count, x.includes_endpoints)
            return 0.5 * norm(x - shift, NormTag.L2) ** 2
        if self.kind == "linf":
            return norm(x, NormTag.LINF)
        return norm(x, self.tag) ** self.q / self.q

    def coordinate_gradient(self, x: GridFunction) -> np.ndarray:
        """Gradient with respect to the nodal values (not the L2 metric)."""
        if not self.is_smooth:
            raise UnsupportedPenaltyError(f"penalty {self.kind!r} is not smooth")
        w = trapezoid_weights(x.node_count, x.includes_endpoints)
        if self.kind == "half_sq_l2":
            return w * x.values
        if self.kind == "shifted_half_sq":
            shift = self.shift
            if not x.same_grid(shift):
                shift = resample(shift, x.node_count, x.includes_endpoints)
            return w * (x.values - shift.values)
        size = norm(x, NormTag.L2)
        if size == 0.0 and self.q < 2.0:
            raise UnsupportedPenaltyError("gradient undefined at zero for q < 2")
        return size ** (self.q - 2.0) * (w * x.values) if size > 0.0 else np.zeros_like(x.values)

    def sublevel_radius(self, t: float) -> float:
        """Radius r with {Omega <= t} contained in {||x||_tag <= r}."""
        if t < 0.0:
            return 0.0
        if self.kind == "half_sq_l2":
            return math.sqrt(2.0 * t)
        if self.kind == "linf":
            return t
        if self.kind == "p_power_norm":
            return (self.q * t) ** (1.0 / self.q)
        return math.sqrt(2.0 * t) + norm(self.shift, NormTag.L2)


def half_sq_l2() -> PenaltySpec:
    return PenaltySpec("half_sq_l2")


def p_power_norm(q: float, tag: NormTag = NormTag.L2) -> PenaltySpec:
    return PenaltySpec("p_power_norm", q=q, tag=tag)


def linf_penalty() -> PenaltySpec:
    return PenaltySpec("linf")


def shifted_half_sq(x0: GridFunction) -> PenaltySpec:
    return PenaltySpec("shifted_half_sq", shift=x0)


@dataclass(frozen=True)
class TikhonovProblem:
    """Target functional: operator, data, alpha >= 0, exponent p >= 1."""

    operator: ForwardOperator
    data_y: GridFunction
    alpha: float
    exponent_p: float = 2.0
    penalty: PenaltySpec = field(default_factory=half_sq_l2)
    domain: DomainSpec = field(default_factory=whole_space)

    def __post_init__(self):
        if self.alpha < 0.0:
            raise GridCompatibilityError("alpha must be nonnegative")
        if self.exponent_p < 1.0:
            raise GridCompatibilityError("discrepancy exponent p must be >= 1")
        if self.data_y.node_count != self.operator.output_m or not self.data_y.includes_endpoints:
            raise GridCompatibilityError("data must live on the operator output grid")

    @property
    def is_linear_quadratic(self) -> bool:
        """Solvable in closed form by the normal equations."""
        return (
            self.exponent_p == 2.0
            and self.penalty.kind in ("half_sq_l2", "shifted_half_sq")
            and self.domain.kind == "whole_space"
        )


def _discrepancy(p: float, residual: GridFunction) -> float:
    return norm(residual, NormTag.L2) ** p / p


def eval_T(problem: TikhonovProblem, x: GridFunction) -> ExtReal:
    """Evaluate the target functional, +inf outside the domain."""
    if not membership(problem.domain, x):
        return POS_INF
    fx = problem.operator.apply(x)
    value = _discrepancy(problem.exponent_p, fx - problem.data_y)
    value += problem.alpha * problem.penalty.evaluate(x)
    return ExtReal.finite(value)


@dataclass(frozen=True)
class AlphaSchedule:
    """alpha_n = alpha + amplitude * n^(-exponent); 'constant' keeps alpha.

    The offset is the limit alpha of the problem the sequence targets,
    so the same schedule kind covers alpha > 0 and the alpha = 0 limit.
    """

    kind: str = "constant"
    amplitude: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "power"):
            raise GridCompatibilityError(f"unknown alpha schedule {self.kind!r}")
        if self.kind == "power" and (self.amplitude <= 0.0 or self.exponent <= 0.0):
            raise GridCompatibilityError("power schedule needs positive amplitude and exponent")

    def value(self, alpha_limit: float, n: int) -> float:
        if self.kind == "constant":
            return alpha_limit
        return alpha_limit + self.amplitude * float(n) ** (-self.exponent)


@dataclass(frozen=True)
class NoiseSchedule:
    """Perturbation of the data with ||y_n - y|| = amplitude * n^(-exponent).

    Directions are deterministic: a fixed profile rescaled to the exact
    prescribed norm, or a seeded random draw that depends only on
    (seed, level) so access order cannot change the data.
    """

    kind: str = "none"  # none | power | seeded
    amplitude: float = 1.0
    exponent: float = 1.0
    direction: str = "oscillatory"  # oscillatory | constant
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "power", "seeded"):
            raise GridCompatibilityError(f"unknown noise schedule {self.kind!r}")
        if self.kind != "none" and (self.amplitude <= 0.0 or self.exponent <= 0.0):
            raise GridCompatibilityError("noise schedule needs positive amplitude and exponent")


def noise_direction(schedule: NoiseSchedule, m: int, n: int) -> GridFunction:
    """Unit-L2-norm perturbation profile on an m-node output grid."""
    if schedule.kind == "seeded":
        rng = np.random.default_rng([schedule.seed, n])
        g = GridFunction(rng.standard_normal(m))
    elif schedule.direction == "constant":
        g = GridFunction(np.ones(m))
    else:
        g = from_callable(lambda t: np.sin(14.0 * np.pi * t), m)
    return g * (1.0 / norm(g, NormTag.L2))


@dataclass(frozen=True)
class ApproxSequence:
    """Levelwise data (F_n, y_n, alpha_n) approximating a target problem."""

    target: TikhonovProblem
    family: OperatorFamily
    alpha_schedule: AlphaSchedule = field(default_factory=AlphaSchedule)
    noise_schedule: NoiseSchedule = field(default_factory=NoiseSchedule)

    def __post_init__(self):
        if self.target.operator.output_m != self.family.reference.output_m:
            raise GridCompatibilityError(
                "target operator and family reference must share the output grid"
            )
        for n in self.family.levels:
            if self.alpha_at(n) <= 0.0:
                raise GridCompatibilityError("alpha_n must be positive at every level")

    @property
    def levels(self) -> tuple[int, ...]:
        return self.family.levels

    @property
    def alpha_limit(self) -> float:
        return self.target.alpha

    def alpha_at(self, n: int) -> float:
        return self.alpha_schedule.value(self.target.alpha, n)

    def data_at(self, n: int) -> GridFunction:
        y = self.target.data_y
        if self.noise_schedule.kind == "none":
            return y
        e = noise_direction(self.noise_schedule, y.node_count, n)
        size = self.noise_schedule.amplitude * float(n) ** (-self.noise_schedule.exponent)
        return y + e * size

    def problem_at(self, n: int) -> TikhonovProblem:
        """The level-n functional packaged as a standalone problem."""
        return TikhonovProblem(
            self.family.operator_at(n),
            self.data_at(n),
            self.alpha_at(n),
            self.target.exponent_p,
            self.target.penalty,
            self.family.domain_at(n),
        )


def make_approx_sequence(
    problem: TikhonovProblem,
    family: OperatorFamily,
    alpha_schedule: AlphaSchedule | None = None,
    noise_schedule: NoiseSchedule | None = None,
) -> ApproxSequence:
    return ApproxSequence(
        problem,
        family,
        alpha_schedule or AlphaSchedule(),
        noise_schedule or NoiseSchedule(),
    )


def eval_Tn(seq: ApproxSequence, n: int, x: GridFunction) -> ExtReal:
    """Evaluate the level-n functional, +inf outside dom(F_n)."""
    return eval_T(seq.problem_at(n), x)


def eval_scaled(seq: ApproxSequence, n: int, x: GridFunction) -> ExtReal:
    """(1/alpha_n) T_n(x); positive scaling keeps +inf where it was."""
    return eval_Tn(seq, n, x) * (1.0 / seq.alpha_at(n))


def is_eps_minimizer(value: ExtReal, inf_estimate: ExtReal, eps: float) -> bool:
    """value <= max(inf + eps, -1/eps), evaluated in extended reals.

    The -1/eps floor keeps the test meaningful when the infimum is
    -infinity: candidates must sit below a finite bar that drops as eps
    shrinks.
    """
    if eps <= 0.0:
        raise GridCompatibilityError("eps must be positive")
    value = _coerce(value)
    shifted = _coerce(inf_estimate) + eps
    floor = ExtReal.finite(-1.0 / eps)
    threshold = shifted if shifted >= floor else floor
    return value <= threshold
