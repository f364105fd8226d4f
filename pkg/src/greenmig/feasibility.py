"""Migration feasibility model.

Answers one question: can a training job's checkpoint move between two sites
fast enough, and cheaply enough, to be worth doing inside the destination's
remaining renewable window? Everything here is a pure function of its
arguments; no I/O, no hidden state.

Unit conventions, used everywhere in this package:
  - checkpoint sizes are bytes (1 GiB = 2**30 bytes, binary),
  - bandwidths are bits per second (1 Gbps = 1e9 bit/s, decimal),
  - times are seconds, power is kW, energy is kWh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

GIB = 2 ** 30
GBPS = 1e9
HOUR = 3600.0


def gib_to_bytes(gib: float) -> int:
    if gib < 0:
        raise ValueError(f"size must be non-negative, got {gib} GiB")
    return int(round(gib * GIB))


def gbps_to_bits(gbps: float) -> float:
    return gbps * GBPS


class FeasibilityClass(str, Enum):
    """Transfer-time class: A below ``class_a_max_s``, B below ``class_b_max_s``,
    C at or above it. Intervals are half-open: the boundary belongs upward."""

    A = "A"
    B = "B"
    C = "C"


@dataclass(frozen=True)
class FeasibilityParams:
    """Knobs of the feasibility model with their stock defaults."""

    alpha: float = 0.1              # tolerated disruption as a fraction of the window
    class_a_max_s: float = 60.0
    class_b_max_s: float = 300.0
    p_sys_kw: float = 1.8           # draw of the whole transfer path during a move
    p_node_kw: float = 0.75         # draw of one training node
    load_time_s: float = 10.3       # checkpoint restore, measured constant
    downtime_s: float = 0.4         # handover blackout

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 < self.class_a_max_s < self.class_b_max_s:
            raise ValueError("class thresholds must satisfy 0 < A max < B max")
        for name in ("p_sys_kw", "p_node_kw", "load_time_s", "downtime_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


DEFAULT_PARAMS = FeasibilityParams()


@dataclass(frozen=True)
class MigrationTiming:
    transfer_s: float
    load_s: float
    downtime_s: float
    total_s: float


@dataclass(frozen=True)
class MigrationEnergy:
    cost_kwh: float
    breakeven_s: float


@dataclass(frozen=True)
class WindowForecast:
    """Predicted remaining renewable window at a site. ``sigma_s`` is the
    standard deviation of the prediction error; 0 means a perfect forecast."""

    remaining_s: float
    sigma_s: float = 0.0

    def __post_init__(self):
        if self.remaining_s < 0 or self.sigma_s < 0:
            raise ValueError("forecast remaining and sigma must be non-negative")


@dataclass(frozen=True)
class FeasibilityVerdict:
    timing: MigrationTiming
    energy: MigrationEnergy
    feasibility_class: FeasibilityClass
    time_ok: bool
    energy_ok: bool
    feasible: bool


def transfer_time(size_bytes: float, bits_per_second: float) -> float:
    """Seconds to push ``size_bytes`` over a ``bits_per_second`` link."""
    if size_bytes < 0:
        raise ValueError(f"size must be non-negative, got {size_bytes}")
    if bits_per_second <= 0:
        raise ValueError(f"bandwidth must be positive, got {bits_per_second}")
    return 8.0 * size_bytes / bits_per_second


def migration_timing(size_bytes: float, bits_per_second: float,
                     params: FeasibilityParams = DEFAULT_PARAMS) -> MigrationTiming:
    """Total pause a job takes when it moves: transfer + restore + handover."""
    t = transfer_time(size_bytes, bits_per_second)
    return MigrationTiming(
        transfer_s=t,
        load_s=params.load_time_s,
        downtime_s=params.downtime_s,
        total_s=t + params.load_time_s + params.downtime_s,
    )


def time_feasible(timing: MigrationTiming, window_s: float, alpha: float) -> bool:
    """Strict time gate: the whole disruption must fit inside alpha * window."""
    if window_s < 0:
        raise ValueError("window must be non-negative")
    return timing.total_s < alpha * window_s


def energy_cost(timing: MigrationTiming,
                params: FeasibilityParams = DEFAULT_PARAMS) -> float:
    """kWh burned by the transfer path while the checkpoint is in flight."""
    return params.p_sys_kw * timing.transfer_s / HOUR


def breakeven_time(cost_kwh: float,
                   params: FeasibilityParams = DEFAULT_PARAMS) -> float:
    """Seconds of renewable node runtime needed to pay back one migration."""
    if params.p_node_kw <= 0:
        raise ValueError("p_node_kw must be positive to amortize a migration")
    if cost_kwh < 0:
        raise ValueError("cost must be non-negative")
    return cost_kwh / params.p_node_kw * HOUR


def energy_feasible(breakeven_s: float, window_s: float) -> bool:
    """Non-strict energy gate: the window must at least cover the breakeven."""
    if window_s < 0:
        raise ValueError("window must be non-negative")
    return breakeven_s <= window_s


def classify(transfer_s: float,
             params: FeasibilityParams = DEFAULT_PARAMS) -> FeasibilityClass:
    if transfer_s < 0:
        raise ValueError("transfer time must be non-negative")
    if transfer_s < params.class_a_max_s:
        return FeasibilityClass.A
    if transfer_s < params.class_b_max_s:
        return FeasibilityClass.B
    return FeasibilityClass.C


def _normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def stochastic_time_feasible(timing: MigrationTiming, forecast: WindowForecast,
                             alpha: float, epsilon: float) -> bool:
    """Probabilistic time gate under forecast uncertainty.

    The true remaining window is modelled as normal(forecast.remaining_s,
    forecast.sigma_s) truncated at zero. The move is admitted when
    P[disruption < alpha * window] >= 1 - epsilon, from the closed-form CDF.
    With sigma 0 this degenerates exactly to the deterministic gate.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if forecast.sigma_s == 0:
        return time_feasible(timing, forecast.remaining_s, alpha)
    # P[T > x | T > 0] for the untruncated normal, x = total / alpha >= 0
    x = timing.total_s / alpha
    mu, sd = forecast.remaining_s, forecast.sigma_s
    prob = _normal_cdf((mu - x) / sd) / _normal_cdf(mu / sd)
    return prob >= 1.0 - epsilon


def assess(size_bytes: float, bits_per_second: float, window_s: float,
           params: FeasibilityParams = DEFAULT_PARAMS, *,
           sigma_s: float = 0.0,
           epsilon: float | None = None) -> FeasibilityVerdict:
    """Full verdict for one candidate move.

    ``window_s`` is the remaining renewable window at the destination. When
    ``epsilon`` is given and ``sigma_s`` > 0 the time gate goes through the
    stochastic check; otherwise it is the plain strict comparison. A move is
    feasible when both gates hold and the transfer is not Class C.
    """
    if window_s < 0:
        raise ValueError("window must be non-negative")
    timing = migration_timing(size_bytes, bits_per_second, params)
    cost = energy_cost(timing, params)
    breakeven = breakeven_time(cost, params)
    klass = classify(timing.transfer_s, params)
    if epsilon is not None and sigma_s > 0:
        time_ok = stochastic_time_feasible(
            timing, WindowForecast(window_s, sigma_s), params.alpha, epsilon)
    else:
        time_ok = time_feasible(timing, window_s, params.alpha)
    energy_ok = energy_feasible(breakeven, window_s)
    return FeasibilityVerdict(
        timing=timing,
        energy=MigrationEnergy(cost_kwh=cost, breakeven_s=breakeven),
        feasibility_class=klass,
        time_ok=time_ok,
        energy_ok=energy_ok,
        feasible=time_ok and energy_ok and klass is not FeasibilityClass.C,
    )


@dataclass(frozen=True)
class PhaseCell:
    size_bytes: int
    bits_per_second: float
    transfer_s: float
    feasibility_class: FeasibilityClass


@dataclass(frozen=True)
class BreakevenPoint:
    size_bytes: int
    cost_kwh: float
    breakeven_s: float


def phase_grid(sizes_bytes: list[int], bandwidths: list[float],
               params: FeasibilityParams = DEFAULT_PARAMS) -> list[PhaseCell]:
    """Transfer time and class over the size x bandwidth product, size-major."""
    if not sizes_bytes or not bandwidths:
        raise ValueError("phase grid needs at least one size and one bandwidth")
    cells = []
    for size in sizes_bytes:
        for bw in bandwidths:
            t = transfer_time(size, bw)
            cells.append(PhaseCell(int(size), bw, t, classify(t, params)))
    return cells


def breakeven_curve(sizes_bytes: list[int], bits_per_second: float,
                    params: FeasibilityParams = DEFAULT_PARAMS) -> list[BreakevenPoint]:
    """Migration cost and breakeven per checkpoint size at a fixed bandwidth."""
    if not sizes_bytes:
        raise ValueError("breakeven curve needs at least one size")
    points = []
    for size in sizes_bytes:
        timing = migration_timing(size, bits_per_second, params)
        cost = energy_cost(timing, params)
        points.append(BreakevenPoint(int(size), cost, breakeven_time(cost, params)))
    return points
