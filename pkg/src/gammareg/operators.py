"""First-kind integral operators, their quadrature approximations, and domains.

Every operator here is linear and carries a dense matrix realization: a
quadrature-weighted collocation matrix mapping nodal values on a fixed
input grid to nodal values on an output grid. Approximation families
share one reference output grid so that levels can be compared in the
same discrete L2 norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import GridCompatibilityError
from .grids import (
    GridFunction,
    NormTag,
    from_callable,
    grid_nodes,
    norm,
    resample,
    resample_matrix,
    trapezoid_weights,
)

__all__ = [
    "KernelSpec",
    "constant_kernel",
    "separable_kernel",
    "gaussian_kernel",
    "DomainSpec",
    "whole_space",
    "norm_ball",
    "norm_ball_nonneg",
    "membership",
    "ForwardOperator",
    "identity_operator",
    "integral_matrix",
    "integral_apply",
    "OperatorFamily",
    "make_quadrature_family",
    "make_constant_family",
    "uniform_gap",
    "standard_samples",
]


@dataclass(frozen=True)
class KernelSpec:
    """Continuous kernel K(s, t) on [0,1]^2, evaluated with broadcasting."""

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    label: str

    def __post_init__(self):
        probe = np.linspace(0.0, 1.0, 5)
        vals = np.asarray(self.evaluator(probe[None, :], probe[:, None]), dtype=float)
        if vals.shape != (5, 5) or not np.all(np.isfinite(vals)):
            raise GridCompatibilityError(
                f"kernel {self.label!r} must evaluate finitely on [0,1]^2 "
                "with numpy broadcasting"
            )


def constant_kernel(kappa: float = 1.0) -> KernelSpec:
    return KernelSpec(lambda s, t: np.broadcast_to(float(kappa), np.broadcast(s, t).shape).copy(),
                      f"constant({kappa})")


def separable_kernel() -> KernelSpec:
    return KernelSpec(lambda s, t: s * t, "separable")


def gaussian_kernel(sigma: float) -> KernelSpec:
    if sigma <= 0:
        raise GridCompatibilityError("gaussian kernel needs sigma > 0")
    return KernelSpec(
        lambda s, t: np.exp(-((s - t) ** 2) / sigma**2), f"gaussian({sigma})"
    )


@dataclass(frozen=True)
class DomainSpec:
    """Feasible set for the unknown: everything, a norm ball, or its
    nonnegative part."""

    kind: str  # whole_space | norm_ball | norm_ball_nonneg
    radius: float = float("inf")
    tag: NormTag = NormTag.L2

    def __post_init__(self):
        if self.kind not in ("whole_space", "norm_ball", "norm_ball_nonneg"):
            raise GridCompatibilityError(f"unknown domain kind {self.kind!r}")
        if self.kind != "whole_space" and not (0 < self.radius < float("inf")):
            raise GridCompatibilityError("norm ball needs a finite positive radius")


def whole_space() -> DomainSpec:
    return DomainSpec("whole_space")


def norm_ball(radius: float, tag: NormTag = NormTag.L2) -> DomainSpec:
    return DomainSpec("norm_ball", radius, tag)


def norm_ball_nonneg(radius: float, tag: NormTag = NormTag.L2) -> DomainSpec:
    return DomainSpec("norm_ball_nonneg", radius, tag)


def membership(domain: DomainSpec, x: GridFunction) -> bool:
    if domain.kind == "whole_space":
        return True
    if norm(x, domain.tag) > domain.radius:
        return False
    if domain.kind == "norm_ball_nonneg" and np.min(x.values) < 0.0:
        return False
    return True


@dataclass(frozen=True)
class ForwardOperator:
    """Linear map between grid functions with an explicit dense matrix."""

    matrix: np.ndarray
    input_m: int
    output_m: int
    domain: DomainSpec = field(default_factory=whole_space)
    label: str = ""

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.shape != (self.output_m, self.input_m):
            raise GridCompatibilityError(
                f"operator matrix shape {mat.shape} does not match "
                f"({self.output_m}, {self.input_m})"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def apply(self, x: GridFunction) -> GridFunction:
        if not x.includes_endpoints or x.node_count != self.input_m:
            x = resample(x, self.input_m)
        return GridFunction(self.matrix @ x.values)


def identity_operator(m: int, domain: DomainSpec | None = None) -> ForwardOperator:
    return ForwardOperator(np.eye(m), m, m, domain or whole_space(), "identity")


def integral_matrix(kernel: KernelSpec, quad_m: int) -> np.ndarray:
    """Collocation matrix of x |-> integral K(s, .) x(s) ds.

    Trapezoid quadrature at quad_m nodes; the result is evaluated at the
    same quad_m output nodes, so the matrix is square.
    """
    s = grid_nodes(quad_m)
    w = trapezoid_weights(quad_m)
    k = np.asarray(kernel.evaluator(s[None, :], s[:, None]), dtype=float)
    return k * w[None, :]


def integral_apply(kernel: KernelSpec, x: GridFunction, quad_m: int) -> GridFunction:
    """Apply the integral operator with trapezoid quadrature at quad_m nodes."""
    if quad_m < 2:
        raise GridCompatibilityError("quadrature needs at least 2 nodes")
    xs = resample(x, quad_m)
    return GridFunction(integral_matrix(kernel, quad_m) @ xs.values)


@dataclass(frozen=True)
class OperatorFamily:
    """Approximating operators F_n plus the reference F they converge to.

    All levels share the reference output grid; `operator_at` caches the
    assembled matrices because studies revisit levels repeatedly.
    """

    levels: tuple[int, ...]
    reference: ForwardOperator
    _build: Callable[[int], ForwardOperator]
    _domain_at: Callable[[int], DomainSpec]
    label: str = ""

    def __post_init__(self):
        if not self.levels:
            raise GridCompatibilityError("family needs at least one level")
        if list(self.levels) != sorted(set(self.levels)):
            raise GridCompatibilityError("family levels must be strictly increasing")
        object.__setattr__(self, "_cache", {})

    def operator_at(self, n: int) -> ForwardOperator:
        if n not in self.levels:
            raise GridCompatibilityError(f"level {n} not in family levels {self.levels}")
        cache = self._cache
        if n not in cache:
            cache[n] = self._build(n)
        return cache[n]

    def domain_at(self, n: int) -> DomainSpec:
        return self._domain_at(n)


def make_quadrature_family(
    kernel: KernelSpec,
    levels: Sequence[int],
    m_ref: int,
    input_m: int = 65,
    domain: DomainSpec | None = None,
    shrinking_domains: bool = False,
) -> OperatorFamily:
    """Family F_n = n-node trapezoid quadrature of an integral operator.

    Level outputs are resampled onto the reference grid (m_ref nodes) so
    that || F_n(x) - F(x) || is a plain discrete L2 norm there. With
    `shrinking_domains` the level domains are the spec'd strict
    subdomains: balls of radius rho * (1 - 1/n) inside the reference ball.
    """
    levels = tuple(int(n) for n in levels)
    if max(levels) > m_ref:
        raise GridCompatibilityError("reference grid must be at least as fine as levels")
    dom = domain or whole_space()
    if shrinking_domains and dom.kind == "whole_space":
        raise GridCompatibilityError("shrinking domains need a norm-ball reference domain")

    def build(n: int) -> ForwardOperator:
        mat = (
            resample_matrix(n, m_ref)
            @ integral_matrix(kernel, n)
            @ resample_matrix(input_m, n)
        )
        return ForwardOperator(mat, input_m, m_ref, domain_at(n), f"{kernel.label}@{n}")

    def domain_at(n: int) -> DomainSpec:
        if shrinking_domains:
            return DomainSpec(dom.kind, dom.radius * (1.0 - 1.0 / n), dom.tag)
        return dom

    ref_mat = integral_matrix(kernel, m_ref) @ resample_matrix(input_m, m_ref)
    reference = ForwardOperator(ref_mat, input_m, m_ref, dom, f"{kernel.label}@ref{m_ref}")
    return OperatorFamily(levels, reference, build, domain_at, kernel.label)


def make_constant_family(
    operator: ForwardOperator, levels: Sequence[int]
) -> OperatorFamily:
    """Family with F_n = F at every level.

    Isolates the effect of data and alpha schedules from operator
    discretization; the uniform gap is exactly zero.
    """
    levels = tuple(int(n) for n in levels)
    return OperatorFamily(
        levels, operator, lambda n: operator, lambda n: operator.domain, "constant-family"
    )


def uniform_gap(
    family: OperatorFamily, n: int, samples: Sequence[GridFunction]
) -> float:
    """Sampled sup of ||F_n(x) - F(x)||_L2 over the given sample set."""
    if not samples:
        raise GridCompatibilityError("uniform_gap needs at least one sample")
    op = family.operator_at(n)
    dom = family.domain_at(n)
    gap = 0.0
    for i, x in enumerate(samples):
        if not membership(dom, x):
            raise GridCompatibilityError(f"sample {i} lies outside dom(F_{n})")
        gap = max(gap, norm(op.apply(x) - family.reference.apply(x)))
    return gap


def standard_samples(
    input_m: int, rho: float = 1.0, tag: NormTag = NormTag.L2
) -> list[GridFunction]:
    """Deterministic probe set inside the norm ball of radius rho.

    Mixes smooth, oscillatory, and near-boundary profiles; used by the
    uniform-gap diagnostics and the domain-membership checks.
    """
    profiles = [
        lambda x: np.sin(np.pi * x),
        lambda x: np.sin(3 * np.pi * x),
        lambda x: np.cos(2 * np.pi * x),
        lambda x: x,
        lambda x: 1.0 - x,
        lambda x: 4.0 * x * (1.0 - x),
        lambda x: np.ones_like(x),
        lambda x: np.exp(x) - 1.0,
    ]
    scales = [0.999, 0.9, 0.75, 0.6, 0.5, 0.4, 0.3, 0.2]
    out = []
    for f, scale in zip(profiles, scales):
        g = from_callable(f, input_m)
        size = norm(g, tag)
        if size == 0.0:
            continue
        out.append(g * (scale * rho / size))
    return out
