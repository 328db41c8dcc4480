"""Vanishing regularization with attainable data.

When the target has alpha = 0 and exact data y = F(x_truth), the
regularized minimizers x_n should converge to the minimum-penalty
solution of F(x) = y, provided the noise dies faster than the
regularization: ||y_n - y|| / alpha_n^(1/p) must tend to zero.

The first schedule (alpha_n = n^{-1/2}, noise 1/n) satisfies the ratio
condition and the distances collapse.  The second (alpha_n = n^{-4})
lets the noise dominate the regularization; the study refuses to report
a limit rather than produce one that the ratios cannot support.
"""

import numpy as np

from gammareg import (
    AlphaSchedule,
    GridFunction,
    NoiseSchedule,
    StudyRefusal,
    TikhonovProblem,
    alpha_zero_study,
    gaussian_kernel,
    grid_nodes,
    make_approx_sequence,
    make_constant_family,
    make_quadrature_family,
)


def build_sequence(alpha_exponent: float):
    input_m = 65
    family = make_quadrature_family(gaussian_kernel(0.2), (129,), 129, input_m=input_m)
    op = family.reference
    truth = GridFunction(0.003 * np.sin(np.pi * grid_nodes(input_m)))
    target = TikhonovProblem(op, op.apply(truth), alpha=0.0)
    return make_approx_sequence(
        target,
        make_constant_family(op, (8, 16, 32, 64, 128, 256, 512)),
        AlphaSchedule("power", 1.0, alpha_exponent),
        NoiseSchedule("power", 1.0, 1.0),
    )


def main() -> None:
    report = alpha_zero_study(build_sequence(0.5), tol=1e-3)

    print("Vanishing alpha with noise ratio ||y_n - y|| / sqrt(alpha_n) -> 0")
    print()
    print(f"{'n':>5}  {'alpha_n':>10}  {'noise ratio':>12}  {'dist to x+':>12}")
    for n, a, ratio, dist in zip(
        report.levels, report.alphas, report.noise_ratios, report.distances
    ):
        print(f"{n:>5}  {a:10.4e}  {ratio:12.4e}  {dist:12.4e}")
    print()
    print(f"verdict at tol 1e-3: {report.verdict}")
    print()

    print("Same data, but alpha_n = n^-4 (noise ratio grows like n):")
    try:
        alpha_zero_study(build_sequence(4.0), tol=1e-3)
    except StudyRefusal as refusal:
        print(f"  refused: {refusal}")


if __name__ == "__main__":
    main()
