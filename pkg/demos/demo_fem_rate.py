"""Second-order convergence of the tridiagonal Galerkin solver.

Solves -u'' + c u = f with homogeneous Dirichlet conditions against a
manufactured solution u(t) = sin(pi t), doubling the number of interior
nodes at each level, and fits the slope of log-error against log-level.
Piecewise-linear elements are second-order accurate in the mesh width,
so the fitted slope should sit near -2.
"""

import numpy as np

from gammareg import EllipticProblem, rate_study


def main() -> None:
    problem = EllipticProblem(
        potential=lambda t: np.ones_like(t),
        source=lambda t: (np.pi**2 + 1.0) * np.sin(np.pi * t),
        solution=lambda t: np.sin(np.pi * t),
    )
    levels = (7, 15, 31, 63, 127)
    study = rate_study(problem, levels)

    print("Galerkin convergence for -u'' + u = (pi^2 + 1) sin(pi t)")
    print()
    print(f"{'interior nodes':>15}  {'L2 error':>12}  {'ratio':>7}")
    previous = None
    for n, err in zip(study.levels, study.errors):
        ratio = "" if previous is None else f"{previous / err:7.2f}"
        print(f"{n:>15}  {err:12.4e}  {ratio:>7}")
        previous = err
    print()
    print(f"fitted slope: {study.slope:+.4f}  (second order would be -2)")


if __name__ == "__main__":
    main()
