import math

import pytest

from fodesolve import (
    ForcingSegment,
    PiecewiseForcing,
    Polynomial,
    ProblemSpec,
)


def damped_plate(cubic: bool = False) -> ProblemSpec:
    """Second-order plate with half-order damping and a step load.

    Linear by default; cubic=True swaps in the cubic restoring force
    that makes the solution strongly step-sensitive.
    """
    power = 3 if cubic else 1
    return ProblemSpec(
        terms=((1.0, 2.0), (0.5, 1.5)),
        nonlinearity=Polynomial((0.0,) * power + (0.5,)),
        forcing=PiecewiseForcing((
            ForcingSegment(0.0, 1.0, (8.0,)),
            ForcingSegment(1.0, math.inf, (0.0,)),
        )),
        initial_conditions=(0.0, 0.0),
    )


@pytest.fixture
def plate() -> ProblemSpec:
    return damped_plate()


@pytest.fixture
def plate_cubic() -> ProblemSpec:
    return damped_plate(cubic=True)
