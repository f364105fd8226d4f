"""Request/response models for the HTTP service.

These mirror the core dataclasses field for field. Sizes cross the wire in
GiB and bandwidths in Gbit/s because that is what operators type; conversion
to bytes and bit/s happens exactly once, at the service boundary.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from .. import __version__
from ..feasibility import (GIB, BreakevenPoint, FeasibilityParams,
                           FeasibilityVerdict, PhaseCell)
from ..simulator import (ClassMetrics, MetricsReport, SimConfig, ValidationRow)

PolicyName = Literal["static", "energy-only", "feasibility", "oracle"]


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str = __version__


class FeasibilityParamsModel(BaseModel):
    alpha: float = Field(default=0.1, gt=0, le=1)
    class_a_max_s: float = Field(default=60.0, gt=0)
    class_b_max_s: float = Field(default=300.0, gt=0)
    p_sys_kw: float = Field(default=1.8, ge=0)
    p_node_kw: float = Field(default=0.75, ge=0)
    load_time_s: float = Field(default=10.3, ge=0)
    downtime_s: float = Field(default=0.4, ge=0)

    def to_params(self) -> FeasibilityParams:
        return FeasibilityParams(**self.model_dump())


class TimingModel(BaseModel):
    transfer_s: float
    load_s: float
    downtime_s: float
    total_s: float


class EnergyModel(BaseModel):
    cost_kwh: float
    breakeven_s: float


class VerdictModel(BaseModel):
    timing: TimingModel
    energy: EnergyModel
    feasibility_class: str
    time_ok: bool
    energy_ok: bool
    feasible: bool

    @classmethod
    def from_verdict(cls, v: FeasibilityVerdict) -> "VerdictModel":
        return cls(
            timing=TimingModel(transfer_s=v.timing.transfer_s,
                               load_s=v.timing.load_s,
                               downtime_s=v.timing.downtime_s,
                               total_s=v.timing.total_s),
            energy=EnergyModel(cost_kwh=v.energy.cost_kwh,
                               breakeven_s=v.energy.breakeven_s),
            feasibility_class=v.feasibility_class.value,
            time_ok=v.time_ok, energy_ok=v.energy_ok, feasible=v.feasible)


class AssessRequest(BaseModel):
    size_gib: float = Field(ge=0)
    gbps: float = Field(gt=0)
    window_remaining_s: float = Field(ge=0)
    sigma_s: float = Field(default=0.0, ge=0)
    epsilon: float | None = Field(default=None, gt=0, lt=1)
    params: FeasibilityParamsModel = FeasibilityParamsModel()


class PhaseGridRequest(BaseModel):
    sizes_gib: list[float] = Field(min_length=1)
    bandwidths_gbps: list[float] = Field(min_length=1)
    params: FeasibilityParamsModel = FeasibilityParamsModel()


class PhaseCellModel(BaseModel):
    size_gib: float
    gbps: float
    transfer_s: float
    feasibility_class: str

    @classmethod
    def from_cell(cls, c: PhaseCell) -> "PhaseCellModel":
        return cls(size_gib=c.size_bytes / GIB, gbps=c.bits_per_second / 1e9,
                   transfer_s=c.transfer_s,
                   feasibility_class=c.feasibility_class.value)


class PhaseGridResponse(BaseModel):
    cells: list[PhaseCellModel]


class BreakevenRequest(BaseModel):
    sizes_gib: list[float] = Field(min_length=1)
    gbps: float = Field(gt=0)
    params: FeasibilityParamsModel = FeasibilityParamsModel()


class BreakevenPointModel(BaseModel):
    size_gib: float
    cost_kwh: float
    breakeven_s: float

    @classmethod
    def from_point(cls, p: BreakevenPoint) -> "BreakevenPointModel":
        return cls(size_gib=p.size_bytes / GIB, cost_kwh=p.cost_kwh,
                   breakeven_s=p.breakeven_s)


class BreakevenResponse(BaseModel):
    points: list[BreakevenPointModel]


class TraceRequest(BaseModel):
    seed: int = 0
    sites: int = Field(default=5, ge=1)
    horizon_s: float = Field(default=604800.0, gt=0)
    mean_window_s: float = Field(default=9000.0, gt=0)
    min_window_s: float = Field(default=1800.0, gt=0)
    max_window_s: float = Field(default=34200.0, gt=0)
    windows_per_site_per_day: float = Field(default=1.0, gt=0)


class WindowModel(BaseModel):
    site: int
    start_s: float
    duration_s: float


class TraceResponse(BaseModel):
    windows: list[WindowModel]
    csv: str


class SimConfigModel(BaseModel):
    """Flat mirror of the simulator config; every field optional."""

    seed: int = 0
    sites: int = 5
    slots: int = 4
    wan_gbps: float = 10.0
    horizon_s: float = 604800.0
    tick_s: float = 60.0
    job_count: int = 200
    mix_a: float = 0.70
    mix_b: float = 0.20
    mix_c: float = 0.10
    size_a_min_gib: float = 1.0
    size_a_max_gib: float = 6.0
    size_b_min_gib: float = 10.0
    size_b_max_gib: float = 40.0
    size_c_min_gib: float = 100.0
    size_c_max_gib: float = 300.0
    compute_min_s: float = 3600.0
    compute_max_s: float = 28800.0
    alpha: float = 0.1
    class_a_max_s: float = 60.0
    class_b_max_s: float = 300.0
    p_sys_kw: float = 1.8
    p_node_kw: float = 0.75
    load_time_s: float = 10.3
    downtime_s: float = 0.4
    gamma: float = 1.0
    beta: float = 0.5
    forecast_sigma_s: float = 0.0
    epsilon: float | None = None
    bw_noise_sigma: float = 0.0
    contention: bool = False
    windows_per_site_per_day: float = 1.0
    mean_window_s: float = 9000.0
    min_window_s: float = 1800.0
    max_window_s: float = 34200.0

    def to_config(self) -> SimConfig:
        return SimConfig(**self.model_dump()).validate()


class SimulateRequest(BaseModel):
    policy: PolicyName
    config: SimConfigModel = SimConfigModel()
    trace_csv: str | None = None
    jobs_csv: str | None = None
    topology_csv: str | None = None


class ClassMetricsModel(BaseModel):
    jobs: int
    mean_jct_s: float
    migrations_completed: int
    disruption_s: float

    @classmethod
    def from_metrics(cls, m: ClassMetrics) -> "ClassMetricsModel":
        return cls(jobs=m.jobs, mean_jct_s=m.mean_jct_s,
                   migrations_completed=m.migrations_completed,
                   disruption_s=m.disruption_s)


class MetricsModel(BaseModel):
    policy: str
    nonrenewable_kwh: float
    renewable_kwh: float
    mean_jct_s: float
    jct_ratio_vs_static: float
    nonrenewable_ratio_vs_static: float
    migration_overhead_fraction: float
    migrations_attempted: int
    migrations_completed: int
    migrations_window_missed: int
    per_class: dict[str, ClassMetricsModel]

    @classmethod
    def from_report(cls, r: MetricsReport) -> "MetricsModel":
        return cls(
            policy=r.policy,
            nonrenewable_kwh=r.nonrenewable_kwh,
            renewable_kwh=r.renewable_kwh,
            mean_jct_s=r.mean_jct_s,
            jct_ratio_vs_static=r.jct_ratio_vs_static,
            nonrenewable_ratio_vs_static=r.nonrenewable_ratio_vs_static,
            migration_overhead_fraction=r.migration_overhead_fraction,
            migrations_attempted=r.migrations_attempted,
            migrations_completed=r.migrations_completed,
            migrations_window_missed=r.migrations_window_missed,
            per_class={k: ClassMetricsModel.from_metrics(v)
                       for k, v in r.per_class.items()})


class SimulateResponse(BaseModel):
    report: MetricsModel
    document: str


class CompareRequest(BaseModel):
    config: SimConfigModel = SimConfigModel()
    trace_csv: str | None = None
    jobs_csv: str | None = None
    topology_csv: str | None = None


class CompareResponse(BaseModel):
    reports: list[MetricsModel]
    table_csv: str


class ValidateRequest(BaseModel):
    config: SimConfigModel = SimConfigModel()
    sizes_gib: list[float] = Field(default=[1.0, 6.0, 40.0, 280.0], min_length=1)


class ValidationRowModel(BaseModel):
    checkpoint_gib: float
    transfer_s: float
    feasibility_class: str
    jct_overhead_fraction: float
    within_budget: bool

    @classmethod
    def from_row(cls, r: ValidationRow) -> "ValidationRowModel":
        return cls(checkpoint_gib=r.checkpoint_gib, transfer_s=r.transfer_s,
                   feasibility_class=r.feasibility_class.value,
                   jct_overhead_fraction=r.jct_overhead_fraction,
                   within_budget=r.within_budget)


class ValidateResponse(BaseModel):
    rows: list[ValidationRowModel]
    csv: str
