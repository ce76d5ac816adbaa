"""Shared fixtures: seeded random parameter tuples covering every valid range."""

import math

import numpy as np
import pytest

from qprotect import ControlParams

HALF_PI = math.pi / 2
TWO_PI = 2.0 * math.pi


def draw_columns(rng: np.random.Generator, n: int) -> dict[str, np.ndarray]:
    """Uniform draws over the full valid range of each parameter.

    eta is sampled on (-pi, pi] (the open end is at -pi), everything else
    on its closed or half-open interval directly.
    """
    return {
        "theta": rng.uniform(0.0, HALF_PI, n),
        "phi": rng.uniform(0.0, TWO_PI, n),
        "p": rng.uniform(0.0, 0.5, n),
        "chi": rng.uniform(0.0, HALF_PI, n),
        "eta": math.pi - rng.uniform(0.0, TWO_PI, n),
        "beta": rng.uniform(0.0, TWO_PI, n),
    }


def params_from_columns(cols: dict[str, np.ndarray], i: int) -> ControlParams:
    return ControlParams(
        theta=float(cols["theta"][i]),
        phi=float(cols["phi"][i]),
        p=float(cols["p"][i]),
        chi=float(cols["chi"][i]),
        eta=float(cols["eta"][i]),
        beta=float(cols["beta"][i]),
    )


@pytest.fixture
def make_columns():
    def _make(n: int, seed: int = 11) -> dict[str, np.ndarray]:
        return draw_columns(np.random.default_rng(seed), n)

    return _make


@pytest.fixture
def make_params(make_columns):
    def _make(n: int, seed: int = 11) -> list[ControlParams]:
        cols = make_columns(n, seed)
        return [params_from_columns(cols, i) for i in range(n)]

    return _make


# One line per acceptance criterion, filled by test_acceptance.report and
# replayed after the run so capture never hides the PASS lines.
CRITERION_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERION_LINES):
        terminalreporter.write_line(CRITERION_LINES[number])
