"""Galerkin solver for -u'' + c u = f on (0,1) with zero Dirichlet data.

Piecewise-linear hats on uniform interior grids. The stiffness part is
assembled exactly; potential and load terms use a composite two-point
Gauss rule per element, which is exact for the polynomial degrees that
appear when c and f are piecewise linear.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EllipticityError, GridCompatibilityError, NumericalError
from .grids import (
    GridFunction,
    grid_nodes,
    norm,
    resample,
    resample_matrix,
    trapezoid_weights,
)
from .operators import DomainSpec, ForwardOperator, OperatorFamily, whole_space

__all__ = [
    "GalerkinLevel",
    "EllipticProblem",
    "TridiagonalSystem",
    "assemble",
    "thomas_solve",
    "solve_bvp",
    "fem_forward",
    "fem_operator_matrix",
    "make_fem_family",
    "rate_study",
    "RateStudy",
]

_GAUSS_OFFSET = 0.5 / np.sqrt(3.0)  # two-point rule on the unit element


@dataclass(frozen=True)
class GalerkinLevel:
    """Discretization with n interior nodes, spacing h = 1/(n+1)."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise GridCompatibilityError("Galerkin level needs n >= 1 interior nodes")

    @property
    def h(self) -> float:
        return 1.0 / (self.n + 1)

    def refine(self) -> "GalerkinLevel":
        """Nested refinement n -> 2n + 1 (old nodes survive)."""
        return GalerkinLevel(2 * self.n + 1)


PointFunction = Callable[[np.ndarray], np.ndarray]


def _as_point_evaluator(obj) -> PointFunction:
    if isinstance(obj, GridFunction):
        xs = obj.nodes
        vs = obj.values
        if not obj.includes_endpoints:
            xs = np.concatenate(([0.0], xs, [1.0]))
            vs = np.concatenate(([0.0], vs, [0.0]))
        return lambda x: np.interp(x, xs, vs)
    if callable(obj):
        return lambda x: np.asarray(obj(x), dtype=float)
    raise GridCompatibilityError("expected a GridFunction or a vectorized callable")


@dataclass(frozen=True)
class EllipticProblem:
    """Data for -u'' + c u = f with homogeneous Dirichlet conditions.

    `solution`, when given, is the manufactured exact solution used by
    convergence studies.
    """

    potential: object
    source: object
    solution: Callable[[np.ndarray], np.ndarray] | None = None


@dataclass(frozen=True)
class TridiagonalSystem:
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = self.diag.size
        if self.sub.size != n - 1 or self.sup.size != n - 1 or self.rhs.shape[0] != n:
            raise GridCompatibilityError("tridiagonal bands and rhs sizes disagree")
        if np.any(self.diag <= 0.0):
            raise NumericalError("assembled diagonal must be positive")

    def matvec(self, u: np.ndarray) -> np.ndarray:
        out = self.diag * u
        out[:-1] += self.sup * u[1:]
        out[1:] += self.sub * u[:-1]
        return out


def _gauss_points(level: GalerkinLevel):
    h = level.h
    z_left = h * np.arange(level.n + 1)  # left endpoint of each element
    p1 = z_left + h * (0.5 - _GAUSS_OFFSET)
    p2 = z_left + h * (0.5 + _GAUSS_OFFSET)
    return p1, p2


def _load_from_gauss_values(level: GalerkinLevel, f1: np.ndarray, f2: np.ndarray):
    """Assemble the load vector given source values at the Gauss points.

    Accepts stacked columns: f1, f2 of shape (n+1,) or (n+1, k).
    """
    h = level.h
    n = level.n
    phi_l1, phi_l2 = 0.5 + _GAUSS_OFFSET, 0.5 - _GAUSS_OFFSET
    phi_r1, phi_r2 = 0.5 - _GAUSS_OFFSET, 0.5 + _GAUSS_OFFSET
    w = 0.5 * h
    b_l = w * (phi_l1 * f1 + phi_l2 * f2)
    b_r = w * (phi_r1 * f1 + phi_r2 * f2)
    shape = (n + 2,) + f1.shape[1:]
    b_full = np.zeros(shape)
    b_full[: n + 1] += b_l
    b_full[1:] += b_r
    return b_full[1 : n + 1]


def assemble(problem: EllipticProblem, level: GalerkinLevel) -> TridiagonalSystem:
    """Stiffness + potential mass matrix and load vector on one level."""
    h = level.h
    n = level.n
    p1, p2 = _gauss_points(level)
    c_eval = _as_point_evaluator(problem.potential)
    c1, c2 = c_eval(p1), c_eval(p2)
    if np.any(c1 < 0.0) or np.any(c2 < 0.0):
        bad = min(np.min(c1), np.min(c2))
        raise EllipticityError(
            f"potential must be nonnegative; found c = {bad:.3e} at a quadrature point"
        )

    phi_l1, phi_l2 = 0.5 + _GAUSS_OFFSET, 0.5 - _GAUSS_OFFSET
    phi_r1, phi_r2 = 0.5 - _GAUSS_OFFSET, 0.5 + _GAUSS_OFFSET
    w = 0.5 * h
    m_ll = w * (c1 * phi_l1**2 + c2 * phi_l2**2)
    m_rr = w * (c1 * phi_r1**2 + c2 * phi_r2**2)
    m_lr = w * (c1 * phi_l1 * phi_r1 + c2 * phi_l2 * phi_r2)

    diag_full = np.zeros(n + 2)
    diag_full[: n + 1] += m_ll
    diag_full[1:] += m_rr

    diag = 2.0 / h + diag_full[1 : n + 1]
    off = -1.0 / h + m_lr[1:n]  # element i+1 couples interior nodes i and i+1

    if problem.source is None:
        rhs = np.zeros(n)
    else:
        f_eval = _as_point_evaluator(problem.source)
        rhs = _load_from_gauss_values(level, f_eval(p1), f_eval(p2))
    return TridiagonalSystem(off.copy(), diag, off.copy(), rhs)


def thomas_solve(system: TridiagonalSystem, rhs: np.ndarray | None = None) -> np.ndarray:
    """Thomas elimination; rhs may carry multiple columns."""
    b = np.array(system.rhs if rhs is None else rhs, dtype=float)
    d = system.diag.copy()
    n = d.size
    sub, sup = system.sub, system.sup
    for i in range(1, n):
        if abs(d[i - 1]) < 1e-300:
            raise NumericalError("zero pivot in tridiagonal elimination")
        m = sub[i - 1] / d[i - 1]
        d[i] = d[i] - m * sup[i - 1]
        b[i] = b[i] - m * b[i - 1]
    if abs(d[n - 1]) < 1e-300:
        raise NumericalError("zero pivot in tridiagonal elimination")
    x = np.empty_like(b)
    x[n - 1] = b[n - 1] / d[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (b[i] - sup[i] * x[i + 1]) / d[i]
    return x


def solve_bvp(problem: EllipticProblem, level: GalerkinLevel) -> GridFunction:
    """Solve one level and verify the linear-system residual."""
    system = assemble(problem, level)
    u = thomas_solve(system)
    res = np.linalg.norm(system.matvec(u) - system.rhs)
    scale = max(np.linalg.norm(system.rhs), 1e-30)
    if res > 1e-12 * scale:
        raise NumericalError(f"tridiagonal solve residual {res:.2e} exceeds contract")
    return GridFunction(u, includes_endpoints=False)


def fem_forward(f, potential, level: GalerkinLevel) -> GridFunction:
    """Forward map f |-> u_n of the discretized boundary-value problem."""
    return solve_bvp(EllipticProblem(potential, f), level)


def fem_operator_matrix(
    potential, level: GalerkinLevel, input_m: int, output_m: int
) -> np.ndarray:
    """Dense matrix of the level forward map, output prolonged to a full grid."""
    system = assemble(EllipticProblem(potential, None), level)
    p1, p2 = _gauss_points(level)
    src_nodes = grid_nodes(input_m)
    # Piecewise-linear basis of the input grid evaluated at the Gauss points.
    interp1 = resample_like_matrix(src_nodes, p1)
    interp2 = resample_like_matrix(src_nodes, p2)
    rhs = _load_from_gauss_values(level, interp1, interp2)
    u_cols = thomas_solve(system, rhs)
    prolong = resample_matrix(level.n, output_m, src_endpoints=False)
    return prolong @ u_cols


def resample_like_matrix(src_nodes: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Rows of piecewise-linear interpolation weights at arbitrary points."""
    idx = np.clip(np.searchsorted(src_nodes, points, side="right") - 1, 0, src_nodes.size - 2)
    theta = (points - src_nodes[idx]) / (src_nodes[idx + 1] - src_nodes[idx])
    mat = np.zeros((points.size, src_nodes.size))
    rows = np.arange(points.size)
    mat[rows, idx] = 1.0 - theta
    mat[rows, idx + 1] += theta
    return mat


def make_fem_family(
    potential,
    levels: Sequence[int],
    n_ref: int,
    input_m: int = 65,
    domain: DomainSpec | None = None,
) -> OperatorFamily:
    """Family of Galerkin forward maps with reference level n_ref.

    The reference must be substantially finer than every tested level;
    the factory enforces the 16x margin the studies rely on.
    """
    levels = tuple(int(n) for n in levels)
    if n_ref < 16 * max(levels):
        raise GridCompatibilityError("reference level must be >= 16x the largest level")
    dom = domain or whole_space()
    output_m = n_ref + 2

    def build(n: int) -> ForwardOperator:
        mat = fem_operator_matrix(potential, GalerkinLevel(n), input_m, output_m)
        return ForwardOperator(mat, input_m, output_m, dom, f"fem@{n}")

    ref_mat = fem_operator_matrix(potential, GalerkinLevel(n_ref), input_m, output_m)
    reference = ForwardOperator(ref_mat, input_m, output_m, dom, f"fem@ref{n_ref}")
    return OperatorFamily(levels, reference, build, lambda n: dom, "fem")


def l2_error_vs_exact(u: GridFunction, exact: Callable, oversample: int = 4) -> float:
    """L2 distance between a FEM solution and a callable on a finer grid."""
    n = u.node_count
    m_fine = oversample * (n + 1) + 1
    uh = resample(u, m_fine)
    xf = uh.nodes
    diff = uh.values - np.asarray(exact(xf), dtype=float)
    w = trapezoid_weights(m_fine)
    return float(np.sqrt(diff * diff @ w))


@dataclass(frozen=True)
class RateStudy:
    levels: tuple[int, ...]
    errors: tuple[float, ...]
    slope: float


def rate_study(problem: EllipticProblem, levels: Sequence[int]) -> RateStudy:
    """Least-squares slope of log-error against log-level.

    Requires a manufactured solution and at least three levels; refuses
    to fit a slope through vanishing errors.
    """
    if problem.solution is None:
        raise GridCompatibilityError("rate study needs a manufactured solution")
    levels = tuple(int(n) for n in levels)
    if len(levels) < 3:
        raise GridCompatibilityError("rate study needs at least three levels")
    errors = []
    for n in levels:
        u = solve_bvp(problem, GalerkinLevel(n))
        errors.append(l2_error_vs_exact(u, problem.solution))
    if min(errors) <= 0.0:
        raise NumericalError("exact discrete solution; convergence rate undefined")
    slope = float(np.polyfit(np.log(np.asarray(levels, dtype=float)), np.log(errors), 1)[0])
    return RateStudy(levels, tuple(errors), slope)
