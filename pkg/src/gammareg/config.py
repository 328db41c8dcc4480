"""INI study configurations: parsing, validation, and object builders.

A study run is described by an INI file with sections [study],
[problem], [schedule], [solver], [output]. Parsing is total: every
problem found is collected (with the offending line number when it can
be located) and reported in a single ConfigError, so a user fixes the
file in one round trip instead of replaying errors one at a time.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .fem import make_fem_family
from .functionals import (
    AlphaSchedule,
    ApproxSequence,
    NoiseSchedule,
    PenaltySpec,
    TikhonovProblem,
    half_sq_l2,
    linf_penalty,
    p_power_norm,
)
from .grids import GridFunction, from_callable, grid_nodes
from .operators import (
    DomainSpec,
    ForwardOperator,
    OperatorFamily,
    constant_kernel,
    gaussian_kernel,
    identity_operator,
    make_constant_family,
    make_quadrature_family,
    norm_ball,
    norm_ball_nonneg,
    separable_kernel,
    whole_space,
)

__all__ = [
    "StudySpec",
    "ProblemSpec",
    "ScheduleSpec",
    "SolverSpec",
    "OutputSpec",
    "RunSpec",
    "parse_config",
    "load_config",
    "build_target",
    "build_family",
    "build_sequence",
    "truth_profile",
    "resolve_potential",
    "POTENTIALS",
    "DEFAULT_LEVELS",
]

STUDY_KINDS = (
    "fem-rate",
    "integral-demo",
    "inf-study",
    "eps-chain",
    "gamma-estimate",
    "coercivity",
    "alpha-zero",
)
KERNEL_KINDS = ("identity", "constant", "separable", "gaussian", "fem")
PENALTY_KINDS = ("half_sq_l2", "p_power_norm", "linf")
DOMAIN_KINDS = ("whole_space", "l2_ball", "l2_ball_nonneg")
TRUTH_KINDS = ("sine", "bump", "constant", "zero")
DATA_KINDS = ("forward_of_truth", "direct_profile")
ALPHA_KINDS = ("constant", "power")
NOISE_KINDS = ("none", "power", "seeded")
NOISE_DIRECTIONS = ("oscillatory", "constant")
GAMMA_FAMILIES = ("oscillation", "uniform_shift")
FEM_POTENTIALS = ("zero", "one", "sin_pi", "cosine")

DEFAULT_LEVELS = (8, 16, 32, 64, 128)


@dataclass(frozen=True)
class StudySpec:
    kind: str
    tol: float | None = None
    # gamma-estimate parameters
    gamma_family: str = "oscillation"
    point: float = math.pi / 4.0
    radii: tuple[float, ...] = (0.2, 0.1, 0.05)
    index_window: int = 512
    grid_m: int = 4096
    # coercivity parameters
    thresholds: tuple[float, ...] = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class ProblemSpec:
    kernel: str = "gaussian"
    sigma: float = 0.2
    kappa: float = 1.0
    potential: str = "one"
    input_m: int = 65
    quad_m: int = 129
    alpha: float = 0.05
    exponent_p: float = 2.0
    penalty: str = "half_sq_l2"
    penalty_q: float = 2.0
    domain: str = "whole_space"
    radius: float = 1.0
    truth: str = "sine"
    truth_amplitude: float = 0.1
    truth_frequency: int = 1
    data: str = "forward_of_truth"


@dataclass(frozen=True)
class ScheduleSpec:
    levels: tuple[int, ...] = DEFAULT_LEVELS
    alpha_kind: str = "constant"
    alpha_amplitude: float = 1.0
    alpha_exponent: float = 1.0
    noise_kind: str = "none"
    noise_amplitude: float = 1.0
    noise_exponent: float = 1.0
    noise_direction: str = "oscillatory"
    noise_seed: int = 0
    exact_family: bool = False


@dataclass(frozen=True)
class SolverSpec:
    max_iter: int = 500
    grad_tol: float = 1e-8
    restarts: int = 0


@dataclass(frozen=True)
class OutputSpec:
    timings: bool = False
    format: str = "csv"
    path: str | None = None
    seed: int | None = None


@dataclass(frozen=True)
class RunSpec:
    study: StudySpec
    problem: ProblemSpec = field(default_factory=ProblemSpec)
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    output: OutputSpec = field(default_factory=OutputSpec)


class _Collector:
    """Typed readers over configparser that log problems instead of raising."""

    def __init__(self, parser: configparser.ConfigParser, raw_lines: list[str]):
        self.parser = parser
        self.lines = raw_lines
        self.problems: list[str] = []

    def _where(self, section: str, key: str | None) -> str:
        in_section = False
        header = f"[{section}]"
        for i, raw in enumerate(self.lines, start=1):
            stripped = raw.strip()
            if stripped.startswith("[") and stripped.endswith("]"):
                if in_section and key is not None:
                    break
                in_section = stripped == header
                if in_section and key is None:
                    return f" (line {i})"
            elif in_section and key is not None:
                if re.match(rf"\s*{re.escape(key)}\s*[=:]", raw):
                    return f" (line {i})"
        return ""

    def complain(self, section: str, key: str | None, message: str) -> None:
        name = f"[{section}] {key}" if key else f"[{section}]"
        self.problems.append(f"{name}: {message}{self._where(section, key)}")

    def raw(self, section: str, key: str) -> str | None:
        if self.parser.has_option(section, key):
            return self.parser.get(section, key).strip()
        return None

    def choice(self, section: str, key: str, allowed, default: str) -> str:
        text = self.raw(section, key)
        if text is None:
            return default
        if text not in allowed:
            self.complain(section, key, f"expected one of {', '.join(allowed)}; got {text!r}")
            return default
        return text

    def number(
        self,
        section: str,
        key: str,
        default: float,
        positive: bool = False,
        nonnegative: bool = False,
    ) -> float:
        text = self.raw(section, key)
        if text is None:
            return default
        try:
            value = float(text)
        except ValueError:
            self.complain(section, key, f"not a number: {text!r}")
            return default
        if not math.isfinite(value):
            self.complain(section, key, "must be finite")
            return default
        if positive and value <= 0.0:
            self.complain(section, key, "must be positive")
            return default
        if nonnegative and value < 0.0:
            self.complain(section, key, "must be nonnegative")
            return default
        return value

    def integer(self, section: str, key: str, default: int, minimum: int = 1) -> int:
        text = self.raw(section, key)
        if text is None:
            return default
        try:
            value = int(text)
        except ValueError:
            self.complain(section, key, f"not an integer: {text!r}")
            return default
        if value < minimum:
            self.complain(section, key, f"must be >= {minimum}")
            return default
        return value

    def boolean(self, section: str, key: str, default: bool) -> bool:
        text = self.raw(section, key)
        if text is None:
            return default
        lowered = text.lower()
        if lowered in ("true", "yes", "on", "1"):
            return True
        if lowered in ("false", "no", "off", "0"):
            return False
        self.complain(section, key, f"not a boolean: {text!r}")
        return default

    def levels(self, section: str, key: str, default: tuple[int, ...]) -> tuple[int, ...]:
        text = self.raw(section, key)
        if text is None:
            return default
        match = re.fullmatch(r"doubling:(\d+):(\d+)", text)
        if match:
            start, count = int(match.group(1)), int(match.group(2))
            if start < 2 or count < 1:
                self.complain(section, key, "doubling needs start >= 2 and count >= 1")
                return default
            return tuple(start * 2**k for k in range(count))
        try:
            values = tuple(int(part) for part in text.split(","))
        except ValueError:
            self.complain(section, key, f"not a comma list of integers: {text!r}")
            return default
        if len(values) < 2 or any(b <= a for a, b in zip(values, values[1:])) or values[0] < 2:
            self.complain(
                section, key, "need at least two strictly increasing levels, all >= 2"
            )
            return default
        return values

    def floats(self, section: str, key: str, default: tuple[float, ...]) -> tuple[float, ...]:
        text = self.raw(section, key)
        if text is None:
            return default
        try:
            return tuple(float(part) for part in text.split(","))
        except ValueError:
            self.complain(section, key, f"not a comma list of numbers: {text!r}")
            return default


def _potential_label(col: _Collector) -> str:
    """Potential label: a builtin name or table:v0,v1,... of nonnegative values."""
    text = col.raw("problem", "potential")
    if text is None:
        return "one"
    if text.startswith("table:"):
        try:
            values = [float(v) for v in text[len("table:") :].split(",")]
        except ValueError:
            col.complain("problem", "potential", f"bad table values in {text!r}")
            return "one"
        if len(values) < 2 or any(v < 0 for v in values):
            col.complain(
                "problem", "potential", "table needs >= 2 nonnegative values"
            )
            return "one"
        return text
    if text not in FEM_POTENTIALS:
        col.complain(
            "problem",
            "potential",
            f"expected one of {', '.join(FEM_POTENTIALS)} or table:v0,v1,...; got {text!r}",
        )
        return "one"
    return text


def parse_config(text: str) -> RunSpec:
    """Parse and validate an INI study description.

    Raises ConfigError carrying every problem found; returns a fully
    typed RunSpec otherwise.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"INI syntax: {exc.message.splitlines()[0]}"]) from exc

    lines = text.splitlines()
    col = _Collector(parser, lines)

    known = {"study", "problem", "schedule", "solver", "output"}
    for section in parser.sections():
        if section not in known:
            col.complain(section, None, "unknown section")

    if not parser.has_section("study"):
        col.problems.append("[study]: section is required")
        kind = "inf-study"
    else:
        kind_text = col.raw("study", "kind")
        if kind_text is None:
            col.complain("study", None, "missing required key 'kind'")
            kind = "inf-study"
        elif kind_text not in STUDY_KINDS:
            col.complain(
                "study", "kind", f"expected one of {', '.join(STUDY_KINDS)}; got {kind_text!r}"
            )
            kind = "inf-study"
        else:
            kind = kind_text

    tol_default = {"inf-study": 1e-6, "alpha-zero": 1e-3, "eps-chain": 1e-4}.get(kind)
    tol_text = col.raw("study", "tol") if parser.has_section("study") else None
    tol = (
        col.number("study", "tol", tol_default or 0.0, positive=True)
        if tol_text is not None
        else tol_default
    )

    radii = col.floats("study", "radii", (0.2, 0.1, 0.05))
    if any(r <= 0 for r in radii) or any(b >= a for a, b in zip(radii, radii[1:])):
        col.complain("study", "radii", "must be positive and strictly decreasing")
        radii = (0.2, 0.1, 0.05)
    thresholds = col.floats("study", "thresholds", (0.5, 1.0, 2.0))
    if any(t <= 0 for t in thresholds):
        col.complain("study", "thresholds", "must be positive")
        thresholds = (0.5, 1.0, 2.0)

    study = StudySpec(
        kind=kind,
        tol=tol,
        gamma_family=col.choice("study", "family", GAMMA_FAMILIES, "oscillation"),
        point=col.number("study", "point", math.pi / 4.0),
        radii=radii,
        index_window=col.integer("study", "index_window", 512, minimum=2),
        grid_m=col.integer("study", "grid_m", 4096, minimum=16),
        thresholds=thresholds,
    )

    problem = ProblemSpec(
        kernel=col.choice("problem", "kernel", KERNEL_KINDS, "gaussian"),
        sigma=col.number("problem", "sigma", 0.2, positive=True),
        kappa=col.number("problem", "kappa", 1.0),
        potential=_potential_label(col),
        input_m=col.integer("problem", "input_m", 65, minimum=3),
        quad_m=col.integer("problem", "quad_m", 129, minimum=3),
        alpha=col.number("problem", "alpha", 0.05, nonnegative=True),
        exponent_p=col.number("problem", "exponent_p", 2.0),
        penalty=col.choice("problem", "penalty", PENALTY_KINDS, "half_sq_l2"),
        penalty_q=col.number("problem", "penalty_q", 2.0),
        domain=col.choice("problem", "domain", DOMAIN_KINDS, "whole_space"),
        radius=col.number("problem", "radius", 1.0, positive=True),
        truth=col.choice("problem", "truth", TRUTH_KINDS, "sine"),
        truth_amplitude=col.number("problem", "truth_amplitude", 0.1),
        truth_frequency=col.integer("problem", "truth_frequency", 1, minimum=1),
        data=col.choice("problem", "data", DATA_KINDS, "forward_of_truth"),
    )
    if problem.exponent_p < 1.0:
        col.complain("problem", "exponent_p", "must be >= 1")
        problem = replace(problem, exponent_p=2.0)
    if problem.penalty == "p_power_norm" and problem.penalty_q < 1.0:
        col.complain("problem", "penalty_q", "must be >= 1")
        problem = replace(problem, penalty_q=2.0)

    schedule = ScheduleSpec(
        levels=col.levels("schedule", "levels", DEFAULT_LEVELS),
        alpha_kind=col.choice("schedule", "alpha_kind", ALPHA_KINDS, "constant"),
        alpha_amplitude=col.number("schedule", "alpha_amplitude", 1.0, positive=True),
        alpha_exponent=col.number("schedule", "alpha_exponent", 1.0, positive=True),
        noise_kind=col.choice("schedule", "noise_kind", NOISE_KINDS, "none"),
        noise_amplitude=col.number("schedule", "noise_amplitude", 1.0, positive=True),
        noise_exponent=col.number("schedule", "noise_exponent", 1.0, positive=True),
        noise_direction=col.choice(
            "schedule", "noise_direction", NOISE_DIRECTIONS, "oscillatory"
        ),
        noise_seed=col.integer("schedule", "noise_seed", 0, minimum=0),
        exact_family=col.boolean("schedule", "exact_family", False),
    )

    solver = SolverSpec(
        max_iter=col.integer("solver", "max_iter", 500, minimum=1),
        grad_tol=col.number("solver", "grad_tol", 1e-8, positive=True),
        restarts=col.integer("solver", "restarts", 0, minimum=0),
    )
    fmt = col.choice("output", "format", ("csv", "json-lines", "jsonl"), "csv")
    seed_text = col.raw("output", "seed")
    out_seed = None
    if seed_text is not None:
        out_seed = col.integer("output", "seed", 0, minimum=0)
    output = OutputSpec(
        timings=col.boolean("output", "timings", False),
        format="jsonl" if fmt in ("jsonl", "json-lines") else "csv",
        path=col.raw("output", "path"),
        seed=out_seed,
    )

    # cross-field checks
    if (
        problem.kernel not in ("fem", "identity")
        and not schedule.exact_family
        and max(schedule.levels) > problem.quad_m
    ):
        col.complain(
            "schedule", "levels", f"largest level exceeds quad_m = {problem.quad_m}"
        )
    if problem.alpha == 0.0 and schedule.alpha_kind == "constant" and kind != "fem-rate":
        col.complain(
            "schedule", "alpha_kind", "alpha = 0 with a constant schedule gives alpha_n = 0"
        )
    if kind == "alpha-zero" and problem.alpha != 0.0:
        col.complain("problem", "alpha", "alpha-zero study needs alpha = 0")
    if kind == "alpha-zero" and problem.data != "forward_of_truth":
        col.complain("problem", "data", "alpha-zero study needs attainable data")
    if kind == "coercivity" and problem.alpha <= 0.0:
        col.complain("problem", "alpha", "coercivity probe needs alpha > 0")

    if col.problems:
        raise ConfigError(col.problems)
    return RunSpec(study, problem, schedule, solver, output)


def load_config(path: str) -> RunSpec:
    """Read a config file from disk and parse it."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


POTENTIALS = {
    "zero": lambda t: np.zeros_like(t),
    "one": lambda t: np.ones_like(t),
    "sin_pi": lambda t: np.sin(np.pi * t),
    "cosine": lambda t: 1.0 + 0.5 * np.cos(np.pi * t),
}


def resolve_potential(label: str):
    """Potential coefficient from its config label (or table:v0,v1,...)."""
    if label.startswith("table:"):
        values = np.array([float(v) for v in label[len("table:"):].split(",")])
        xs = np.linspace(0.0, 1.0, values.size)
        return lambda t: np.interp(t, xs, values)
    return POTENTIALS[label]


def truth_profile(spec: ProblemSpec, m: int) -> GridFunction:
    """The configured ground-truth input on an m-node endpoint grid."""
    a, k = spec.truth_amplitude, spec.truth_frequency
    if spec.truth == "sine":
        return from_callable(lambda t: a * np.sin(k * np.pi * t), m)
    if spec.truth == "bump":
        return from_callable(lambda t: a * 4.0 * t * (1.0 - t), m)
    if spec.truth == "constant":
        return GridFunction(np.full(m, a))
    return GridFunction(np.zeros(m))


def _domain_of(spec: ProblemSpec) -> DomainSpec:
    if spec.domain == "l2_ball":
        return norm_ball(spec.radius)
    if spec.domain == "l2_ball_nonneg":
        return norm_ball_nonneg(spec.radius)
    return whole_space()


def _penalty_of(spec: ProblemSpec) -> PenaltySpec:
    if spec.penalty == "p_power_norm":
        return p_power_norm(spec.penalty_q)
    if spec.penalty == "linf":
        return linf_penalty()
    return half_sq_l2()


def build_family(run: RunSpec) -> OperatorFamily:
    """Assemble the approximating operator family a RunSpec describes."""
    p, s = run.problem, run.schedule
    domain = _domain_of(p)
    if p.kernel == "fem":
        n_ref = 16 * max(s.levels) + 1
        family = make_fem_family(
            resolve_potential(p.potential), s.levels, n_ref, input_m=p.input_m, domain=domain
        )
    elif p.kernel == "identity":
        family = make_constant_family(identity_operator(p.input_m, domain), s.levels)
    else:
        kernels = {
            "constant": lambda: constant_kernel(p.kappa),
            "separable": separable_kernel,
            "gaussian": lambda: gaussian_kernel(p.sigma),
        }
        if s.exact_family:
            # levels are labels only; build just the reference operator
            probe = make_quadrature_family(
                kernels[p.kernel](), (p.quad_m,), p.quad_m, input_m=p.input_m, domain=domain
            )
            family = make_constant_family(probe.reference, s.levels)
        else:
            family = make_quadrature_family(
                kernels[p.kernel](), s.levels, p.quad_m, input_m=p.input_m, domain=domain
            )
    if s.exact_family and p.kernel == "fem":
        family = make_constant_family(family.reference, s.levels)
    return family


def build_target(run: RunSpec, family: OperatorFamily | None = None) -> TikhonovProblem:
    """The limit problem: reference operator, configured data and penalty."""
    family = family or build_family(run)
    op: ForwardOperator = family.reference
    p = run.problem
    truth = truth_profile(p, op.input_m)
    if p.data == "forward_of_truth":
        data = op.apply(truth)
    else:
        data = truth_profile(p, op.output_m)
    return TikhonovProblem(
        op, data, p.alpha, p.exponent_p, _penalty_of(p), _domain_of(p)
    )


def build_sequence(run: RunSpec, seed_override: int | None = None) -> ApproxSequence:
    """Target + family + schedules, with an optional CLI seed override."""
    family = build_family(run)
    target = build_target(run, family)
    s = run.schedule
    alpha = AlphaSchedule(s.alpha_kind, s.alpha_amplitude, s.alpha_exponent)
    seed = s.noise_seed if seed_override is None else seed_override
    noise = NoiseSchedule(
        s.noise_kind, s.noise_amplitude, s.noise_exponent, s.noise_direction, seed
    )
    return ApproxSequence(target, family, alpha, noise)
