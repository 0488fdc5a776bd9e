"""Time-varying epsilon-level feasibility threshold.

The threshold starts at the largest violation in the initial population and
decays polynomially to zero at the end of the budget; the exponent is chosen
so that the threshold equals exp(-6) at half the budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

EPS_MID = math.exp(-6.0)


@dataclass(frozen=True)
class EpsilonSchedule:
    eps0: float
    cp: float
    max_fe: int

    def __post_init__(self):
        if self.max_fe <= 0:
            raise ValueError("max_fe must be positive")
        if self.eps0 < 0:
            raise ValueError("eps0 must be non-negative")

    @property
    def degenerate(self) -> bool:
        # eps0 <= exp(-6) makes cp <= 0, so the schedule would not decay through exp(-6)
        return self.eps0 <= EPS_MID

    def __call__(self, fe: int) -> float:
        return epsilon_at(self, fe)


def schedule_from_eps0(eps0: float, max_fe: int) -> EpsilonSchedule:
    eps0 = float(eps0)
    if eps0 <= EPS_MID:
        return EpsilonSchedule(eps0, 0.0, max_fe)
    cp = (-math.log(eps0) - 6.0) / math.log(0.5)
    return EpsilonSchedule(eps0, cp, max_fe)


def init_schedule(initial_population, max_fe: int) -> EpsilonSchedule:
    """Schedule seeded with the maximum CV of ``initial_population``.

    Accepts individuals (anything with a ``cv`` attribute) or plain CV values.
    """
    cvs = [float(getattr(ind, "cv", ind)) for ind in initial_population]
    if not cvs:
        raise ValueError("init_schedule: empty population")
    return schedule_from_eps0(max(cvs), max_fe)


def epsilon_at(schedule: EpsilonSchedule, fe: int) -> float:
    if not 0 <= fe <= schedule.max_fe:
        raise ValueError(f"fe={fe} outside [0, {schedule.max_fe}]")
    if schedule.degenerate or fe == schedule.max_fe:
        return 0.0
    if fe == 0:
        return schedule.eps0
    return schedule.eps0 * (1.0 - fe / schedule.max_fe) ** schedule.cp
