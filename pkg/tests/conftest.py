import numpy as np
import pytest

from levyq.models import CGMYJumps, LevyModel, TailIntegralOracle, martingale_drift

# Benchmark tempered-stable measure used across the test suite, together
# with the frozen ground-truth quantile magnitudes: exact roots of
# N(-q) = tau resp. N(q) = tau, cross-validated to 6 decimals by two
# independent oracles (adaptive quadrature of the intensity density, and
# the upper-incomplete-gamma closed form M^Y Gamma(-Y, M t) evaluated in
# 30-digit arithmetic).
BENCH = dict(C=1.0, G=5.0, M=8.0, Y=0.5)

TRUE_QUANTILES = {
    # tau: (left magnitude, right magnitude)
    0.5: (0.178525, 0.125468),
    1.0: (0.120155, 0.086676),
    1.5: (0.091451, 0.067233),
    2.0: (0.073700, 0.055022),
    2.5: (0.061466, 0.046493),
}

# The same ten cells as printed in the reference benchmark table (4
# decimals).  They scatter around the exact roots by up to ~1.4e-3 in both
# directions, so they are kept separate from the frozen truth above; see
# tests/test_acceptance.py for the full comparison.
PRINTED_QUANTILES = {
    0.5: (0.1778, 0.1241),
    1.0: (0.1201, 0.0868),
    1.5: (0.0929, 0.0665),
    2.0: (0.0726, 0.0563),
    2.5: (0.0624, 0.0461),
}


@pytest.fixture(scope="session")
def bench_jumps():
    return CGMYJumps(**BENCH)


@pytest.fixture(scope="session")
def bench_oracle(bench_jumps):
    return TailIntegralOracle(jumps=bench_jumps)


@pytest.fixture(scope="session")
def bench_model(bench_jumps):
    sigma2 = 0.1 ** 2
    gamma = martingale_drift(sigma2, bench_jumps)
    return LevyModel(sigma2=sigma2, gamma=gamma, jumps=bench_jumps)


@pytest.fixture(scope="session")
def mc_table_default():
    """The full benchmark Monte Carlo run (200 replications, seed 0).

    Computed once per session (~3 minutes) and shared by the harness
    example test and the acceptance criteria that read individual cells.
    """
    from levyq.harness import ExperimentConfig, run_mc_table

    return run_mc_table(ExperimentConfig())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Re-print the acceptance verdict lines after the test summary.

    Verdicts printed inside xfailed tests are swallowed by capture, so
    the acceptance module registers each line in a list we flush here.
    """
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "VERDICTS", None) if module else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
