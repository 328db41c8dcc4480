"""Shared fixtures: deterministic problem instances reused across test files.

The smoothing-kernel sequence below is the workhorse instance: five coarse
quadrature levels of a Gaussian-kernel integral operator measured against a
fine reference discretization, with a small smooth truth profile, a power-law
alpha schedule sitting on top of the target alpha, and deterministic
oscillatory data noise of size 1/n.
"""

from __future__ import annotations

import numpy as np
import pytest

from gammareg import (
    AlphaSchedule,
    GridFunction,
    NoiseSchedule,
    TikhonovProblem,
    gaussian_kernel,
    grid_nodes,
    make_approx_sequence,
    make_quadrature_family,
)

GAUSS_SIGMA = 0.2
GAUSS_LEVELS = (9, 17, 33, 65, 129)
GAUSS_M_REF = 2049
INPUT_M = 65
TRUTH_AMPLITUDE = 0.003
TARGET_ALPHA = 0.1


def build_gaussian_sequence():
    """Construct the shared smoothing-kernel approximating sequence."""
    family = make_quadrature_family(
        gaussian_kernel(GAUSS_SIGMA), GAUSS_LEVELS, GAUSS_M_REF, input_m=INPUT_M
    )
    t = grid_nodes(INPUT_M)
    truth = GridFunction(TRUTH_AMPLITUDE * np.sin(np.pi * t))
    data = family.reference.apply(truth)
    target = TikhonovProblem(family.reference, data, alpha=TARGET_ALPHA)
    return make_approx_sequence(
        target,
        family,
        AlphaSchedule("power", amplitude=1.0, exponent=1.0),
        NoiseSchedule("power", amplitude=1.0, exponent=1.0),
    )


@pytest.fixture(scope="session")
def gaussian_sequence():
    return build_gaussian_sequence()


# Acceptance tests append one "name: PASS/FAIL (details)" line each; the
# summary hook prints them after the run so the verdict of every criterion
# is visible even when its test passed and captured its stdout.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
