"""Migration feasibility gating and policy simulation for renewable-aware
checkpoint scheduling across WAN-connected compute sites."""

__version__ = "0.1.0"

from .feasibility import (DEFAULT_PARAMS, FeasibilityClass, FeasibilityParams,
                          FeasibilityVerdict, MigrationEnergy, MigrationTiming,
                          WindowForecast, assess, breakeven_curve, breakeven_time,
                          classify, energy_cost, migration_timing, phase_grid,
                          stochastic_time_feasible, transfer_time)
from .energy import (EnergyWindow, SiteEnergyTrace, TraceGenConfig,
                     forecast_remaining, generate_trace, ingest_trace,
                     renewable_at, serialize_trace)
from .network import BandwidthNoise, Topology, measure_bandwidth, parse_topology_csv
from .orchestrator import (JobState, JobStatus, MigrationDecision, PolicyKind,
                           SiteSnapshot, UtilityParams, calc_benefit,
                           feasible_destinations, scheduler_tick, utility)
from .simulator import (MetricsReport, SimConfig, ValidationRow, compare,
                        config_from_text, config_to_text, generate_jobs,
                        parse_jobs_csv, run, run_digest, serialize_jobs,
                        validate_classes)

__all__ = [name for name in dir() if not name.startswith("_")]
