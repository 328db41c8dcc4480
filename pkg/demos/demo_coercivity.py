"""A single coercivity bound for every functional in a sequence.

Each level functional dominates its penalty term: T_n(x) >= alpha_n
Omega(x).  With delta = min(alpha_limit, min_n alpha_n) > 0, every
sublevel set {T_n <= t} is contained in the fixed set
{Omega <= t / delta}, independent of n.  The probe hammers that
inclusion with random vectors across several thresholds and levels and
reports any violation, together with a bound on the norms of the
minimizers themselves.
"""

import numpy as np

from gammareg import (
    AlphaSchedule,
    GridFunction,
    NoiseSchedule,
    TikhonovProblem,
    equi_coercivity_probe,
    gaussian_kernel,
    grid_nodes,
    make_approx_sequence,
    make_quadrature_family,
    standard_samples,
)


def main() -> None:
    input_m = 33
    family = make_quadrature_family(
        gaussian_kernel(0.2), (5, 9, 17, 33), 129, input_m=input_m
    )
    truth = GridFunction(0.05 * np.sin(np.pi * grid_nodes(input_m)))
    target = TikhonovProblem(family.reference, family.reference.apply(truth), alpha=0.1)
    seq = make_approx_sequence(
        target,
        family,
        AlphaSchedule("power", 1.0, 1.0),
        NoiseSchedule("power", 1.0, 1.0),
    )

    rng = np.random.default_rng(7)
    samples = list(standard_samples(input_m))
    for _ in range(500):
        scale = 10.0 ** rng.uniform(-2.0, 0.5)
        samples.append(GridFunction(scale * rng.standard_normal(input_m)))

    thresholds = (0.1, 1.0, 10.0)
    probe = equi_coercivity_probe(seq, samples, thresholds)

    print("Sublevel inclusion {T_n <= t} within {Omega <= t / delta}")
    print()
    print(f"samples checked:  {probe.samples_checked}")
    print(f"levels:           {probe.levels}")
    print(f"thresholds:       {probe.thresholds}")
    print(f"delta:            {probe.delta}")
    print()
    print(f"{'threshold t':>12}  {'penalty bound t/delta':>22}")
    for t in thresholds:
        print(f"{t:>12.2f}  {t / probe.delta:>22.2f}")
    print()
    print(f"antecedent hits (samples with T_n(x) <= t): {probe.antecedent_hits}")
    print(f"violations of the inclusion:                {len(probe.violations)}")
    if probe.witness_bound is not None:
        print(f"norm bound over all level minimizers:       {probe.witness_bound:.4f}")
    print()
    print(f"verdict: {probe.verdict}")


if __name__ == "__main__":
    main()
