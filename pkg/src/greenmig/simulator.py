"""Trace-driven discrete-event simulator for the migration policies.

One run takes a workload (jobs), a renewable trace, a topology and a policy,
and plays them out: sites run up to `slots` jobs, queued jobs wait FIFO, the
scheduler fires every `tick_s`, accepted migrations pause the job for the
full disruption and ship it to the destination. Energy is accounted per
segment between events, so attribution is exact at window boundaries:
p_node_kw per running job (renewable iff its site is inside a window at that
instant) and p_sys_kw for the transfer leg of each migration, attributed by
the source site's state at migration start.

Arrivals, windows and scheduler ticks stop at the horizon; execution drains
past it until the last job completes, so every job runs its full compute.
All randomness is derived from the seed; identical inputs give identical
event sequences, metrics and serialized outputs, byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import heapq
import io
import math
import random
from collections import deque
from dataclasses import dataclass, fields, replace
from enum import IntEnum

from .energy import (DAY, EnergyWindow, SiteEnergyTrace, TraceGenConfig,
                     forecast_remaining, generate_trace)
from .feasibility import (GIB, FeasibilityClass, FeasibilityParams, assess,
                          classify)
from .network import (BandwidthNoise, Topology, measure_bandwidth,
                      parse_topology_csv)
from .orchestrator import (JobState, JobStatus, MigrationDecision, PolicyKind,
                           SiteSnapshot, UtilityParams, scheduler_tick)

JOBS_HEADER = ["job_id", "arrival_s", "checkpoint_gib", "compute_s", "site0"]


@dataclass
class SimConfig:
    """Flat bag of every simulation knob; mirrors the key=value config file."""

    seed: int = 0
    sites: int = 5
    slots: int = 4
    wan_gbps: float = 10.0
    horizon_s: float = 7 * DAY
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

    def validate(self) -> "SimConfig":
        if self.sites < 2:
            raise ValueError("need at least two sites")
        if self.slots < 1:
            raise ValueError("need at least one slot per site")
        if self.wan_gbps <= 0:
            raise ValueError("wan_gbps must be positive")
        if self.horizon_s <= 0 or self.tick_s <= 0:
            raise ValueError("horizon_s and tick_s must be positive")
        if self.job_count < 0:
            raise ValueError("job_count must be non-negative")
        mix = (self.mix_a, self.mix_b, self.mix_c)
        if min(mix) < 0 or abs(sum(mix) - 1.0) > 1e-9:
            raise ValueError("job mix fractions must be non-negative and sum to 1")
        for lo, hi in ((self.size_a_min_gib, self.size_a_max_gib),
                       (self.size_b_min_gib, self.size_b_max_gib),
                       (self.size_c_min_gib, self.size_c_max_gib),
                       (self.compute_min_s, self.compute_max_s)):
            if not 0 < lo <= hi:
                raise ValueError("ranges must satisfy 0 < min <= max")
        if self.epsilon is not None and not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1) or unset")
        if self.bw_noise_sigma < 0 or self.forecast_sigma_s < 0:
            raise ValueError("noise sigmas must be non-negative")
        self.feasibility_params()   # triggers its own validation
        self.trace_config()
        return self

    def feasibility_params(self) -> FeasibilityParams:
        return FeasibilityParams(
            alpha=self.alpha, class_a_max_s=self.class_a_max_s,
            class_b_max_s=self.class_b_max_s, p_sys_kw=self.p_sys_kw,
            p_node_kw=self.p_node_kw, load_time_s=self.load_time_s,
            downtime_s=self.downtime_s)

    def utility_params(self) -> UtilityParams:
        return UtilityParams(gamma=self.gamma, beta=self.beta)

    def trace_config(self) -> TraceGenConfig:
        return TraceGenConfig(
            seed=self.seed, horizon_s=self.horizon_s, sites=self.sites,
            mean_duration_s=self.mean_window_s,
            min_duration_s=self.min_window_s,
            max_duration_s=self.max_window_s,
            windows_per_site_per_day=self.windows_per_site_per_day)


_CONFIG_FIELDS = {f.name: f.type for f in fields(SimConfig)}
_INT_KEYS = {"seed", "sites", "slots", "job_count"}
_BOOL_KEYS = {"contention"}
_OPTIONAL_KEYS = {"epsilon"}


def config_from_text(text: str) -> SimConfig:
    """Parse a flat key=value config file (# comments, blank lines ok)."""
    cfg = SimConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_FIELDS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        try:
            if key in _OPTIONAL_KEYS and value.lower() in ("none", ""):
                parsed = None
            elif key in _BOOL_KEYS:
                if value.lower() not in ("true", "false", "0", "1"):
                    raise ValueError(f"not a boolean: {value!r}")
                parsed = value.lower() in ("true", "1")
            elif key in _INT_KEYS:
                parsed = int(value)
            else:
                parsed = float(value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        setattr(cfg, key, parsed)
    return cfg.validate()


def config_to_text(cfg: SimConfig) -> str:
    lines = []
    for f in fields(SimConfig):
        value = getattr(cfg, f.name)
        if value is None:
            value = "none"
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name}={value}")
    return "\n".join(lines) + "\n"


# --- workload ---------------------------------------------------------------

@dataclass(frozen=True)
class JobSpec:
    job_id: int
    arrival_s: float
    checkpoint_bytes: int
    compute_s: float
    site0: int
    klass: str  # workload size class label, "A"/"B"/"C"


def _size_class_label(cfg: SimConfig, gib: float) -> str:
    if gib < cfg.size_b_min_gib:
        return "A"
    if gib < cfg.size_c_min_gib:
        return "B"
    return "C"


def generate_jobs(cfg: SimConfig) -> list[JobSpec]:
    """Synthetic workload: Poisson arrivals over the horizon (uniform order
    statistics), size class by the configured mix, sizes and compute uniform
    within their ranges, initial sites round-robin in arrival order."""
    rng = random.Random(f"{cfg.seed}:jobs")
    arrivals = sorted(rng.random() * cfg.horizon_s for _ in range(cfg.job_count))
    jobs = []
    for i, arrival in enumerate(arrivals):
        r = rng.random()
        if r < cfg.mix_a:
            klass, lo, hi = "A", cfg.size_a_min_gib, cfg.size_a_max_gib
        elif r < cfg.mix_a + cfg.mix_b:
            klass, lo, hi = "B", cfg.size_b_min_gib, cfg.size_b_max_gib
        else:
            klass, lo, hi = "C", cfg.size_c_min_gib, cfg.size_c_max_gib
        gib = rng.uniform(lo, hi)
        compute = rng.uniform(cfg.compute_min_s, cfg.compute_max_s)
        jobs.append(JobSpec(i, arrival, int(round(gib * GIB)), compute,
                            i % cfg.sites, klass))
    return jobs


def serialize_jobs(jobs: list[JobSpec]) -> str:
    out = io.StringIO()
    out.write(",".join(JOBS_HEADER) + "\n")
    for j in jobs:
        gib = j.checkpoint_bytes / GIB
        out.write(f"{j.job_id},{j.arrival_s!r},{gib!r},{j.compute_s!r},{j.site0}\n")
    return out.getvalue()


def parse_jobs_csv(text: str, cfg: SimConfig) -> list[JobSpec]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != JOBS_HEADER:
        raise ValueError(f"line 1: expected header {','.join(JOBS_HEADER)}")
    jobs = []
    seen = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 5:
            raise ValueError(f"line {lineno}: expected 5 fields, got {len(row)}")
        try:
            job_id, arrival = int(row[0]), float(row[1])
            gib, compute, site0 = float(row[2]), float(row[3]), int(row[4])
            if job_id < 0 or arrival < 0 or gib < 0 or compute <= 0:
                raise ValueError("bad job values")
            if not 0 <= site0 < cfg.sites:
                raise ValueError(f"site0 {site0} outside 0..{cfg.sites - 1}")
            if job_id in seen:
                raise ValueError(f"duplicate job_id {job_id}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        seen.add(job_id)
        jobs.append(JobSpec(job_id, arrival, int(round(gib * GIB)), compute,
                            site0, _size_class_label(cfg, gib)))
    return sorted(jobs, key=lambda j: (j.arrival_s, j.job_id))


# --- events and engine -------------------------------------------------------

class EventKind(IntEnum):
    JOB_ARRIVAL = 0
    WINDOW_START = 1
    WINDOW_END = 2
    SCHEDULER_TICK = 3
    MIGRATION_COMPLETE = 4
    JOB_COMPLETE = 5


class _Job:
    __slots__ = ("spec", "status", "site", "remaining_s", "run_started",
                 "completion_s", "disruption_s", "executed_s",
                 "migrations_done", "epoch", "mig_dst", "mig_expected_end")

    def __init__(self, spec: JobSpec):
        self.spec = spec
        self.status = JobStatus.QUEUED
        self.site = spec.site0
        self.remaining_s = spec.compute_s
        self.run_started: float | None = None
        self.completion_s: float | None = None
        self.disruption_s = 0.0
        self.executed_s = 0.0
        self.migrations_done = 0
        self.epoch = 0
        self.mig_dst = -1
        self.mig_expected_end = 0.0


@dataclass(frozen=True)
class ClassMetrics:
    jobs: int
    mean_jct_s: float
    migrations_completed: int
    disruption_s: float


@dataclass(frozen=True)
class MetricsReport:
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
    per_class: dict[str, ClassMetrics]


class _RawRun:
    """Raw per-run totals before normalization against the static baseline."""

    def __init__(self):
        self.renewable_kwh = 0.0
        self.nonrenewable_kwh = 0.0
        self.mean_jct_s = 0.0
        self.total_disruption_s = 0.0
        self.total_compute_s = 0.0
        self.attempted = 0
        self.completed = 0
        self.window_missed = 0
        self.per_class: dict[str, ClassMetrics] = {}
        self.digest = ""


class _Engine:
    def __init__(self, cfg: SimConfig, policy: PolicyKind | None,
                 jobs: list[JobSpec], traces: list[SiteEnergyTrace],
                 topology: Topology, decision_fn=None):
        self.cfg = cfg
        self.policy = policy
        self.params = cfg.feasibility_params()
        self.up = cfg.utility_params()
        self.noise = BandwidthNoise(cfg.bw_noise_sigma)
        self.traces = traces
        self.topology = topology
        self.jobs = {spec.job_id: _Job(spec) for spec in jobs}
        self.decision_fn = decision_fn
        if policy is PolicyKind.ORACLE:
            self.sigma_eff = 0.0
        else:
            self.sigma_eff = cfg.forecast_sigma_s

        self.now = 0.0
        self.running: list[set[int]] = [set() for _ in range(cfg.sites)]
        self.queue: list[deque[int]] = [deque() for _ in range(cfg.sites)]
        self.active = [0] * cfg.sites       # open windows per site
        self.link_free: dict[tuple[int, int], float] = {}

        self.renewable_kwh = 0.0
        self.nonrenewable_kwh = 0.0
        self.run_seconds = 0.0              # job-seconds of compute, for the energy check
        self.transfer_seconds = 0.0
        self.attempted = 0
        self.completed = 0
        self.window_missed = 0
        self._hash = hashlib.sha256()

        self.heap: list[tuple[float, int, int, int]] = []
        for spec in jobs:
            self._push(spec.arrival_s, EventKind.JOB_ARRIVAL, spec.job_id, 0)
        for trace in traces:
            for idx, w in enumerate(trace.windows):
                self._push(w.start_s, EventKind.WINDOW_START, trace.site, idx)
                self._push(w.end_s, EventKind.WINDOW_END, trace.site, idx)
        if decision_fn is not None:
            k = 1
            while k * cfg.tick_s <= cfg.horizon_s:
                self._push(k * cfg.tick_s, EventKind.SCHEDULER_TICK, k, 0)
                k += 1

    def _push(self, t: float, kind: EventKind, key: int, extra: int) -> None:
        heapq.heappush(self.heap, (t, int(kind), key, extra))

    # -- energy bookkeeping ---------------------------------------------------

    def _accrue(self, t: float) -> None:
        dt = t - self.now
        if dt > 0:
            p_node = self.params.p_node_kw
            for site in range(self.cfg.sites):
                n = len(self.running[site])
                if n:
                    kwh = p_node * n * dt / 3600.0
                    if self.active[site] > 0:
                        self.renewable_kwh += kwh
                    else:
                        self.nonrenewable_kwh += kwh
                    self.run_seconds += n * dt
        self.now = t

    # -- slot management ------------------------------------------------------

    def _dispatch(self, site: int) -> None:
        while self.queue[site] and len(self.running[site]) < self.cfg.slots:
            job = self.jobs[self.queue[site].popleft()]
            job.status = JobStatus.RUNNING
            job.run_started = self.now
            job.epoch += 1
            self.running[site].add(job.spec.job_id)
            self._push(self.now + job.remaining_s, EventKind.JOB_COMPLETE,
                       job.spec.job_id, job.epoch)

    # -- event handlers ---------------------------------------------------------

    def run(self) -> _RawRun:
        while self.heap:
            t, kind, key, extra = heapq.heappop(self.heap)
            if t > self.now:
                self._accrue(t)
            self._hash.update(f"{t!r}|{kind}|{key}|{extra};".encode())
            if kind == EventKind.JOB_ARRIVAL:
                self._on_arrival(key)
            elif kind == EventKind.WINDOW_START:
                self.active[key] += 1
            elif kind == EventKind.WINDOW_END:
                self.active[key] -= 1
            elif kind == EventKind.SCHEDULER_TICK:
                self._on_tick()
            elif kind == EventKind.MIGRATION_COMPLETE:
                self._on_migration_complete(key, extra)
            else:
                self._on_job_complete(key, extra)
        return self._finish()

    def _on_arrival(self, job_id: int) -> None:
        job = self.jobs[job_id]
        self.queue[job.site].append(job_id)
        self._dispatch(job.site)

    def _snapshots(self) -> list[SiteSnapshot]:
        snaps = []
        for site in range(self.cfg.sites):
            forecast = forecast_remaining(self.traces, site, self.now,
                                          self.sigma_eff, self.cfg.seed)
            snaps.append(SiteSnapshot(
                site=site, renewable_active=self.active[site] > 0,
                forecast=forecast, running_count=len(self.running[site]),
                queued_count=len(self.queue[site]), slots=self.cfg.slots))
        return snaps

    def _running_views(self) -> list[JobState]:
        views = []
        for site_jobs in self.running:
            for job_id in site_jobs:
                job = self.jobs[job_id]
                left = max(0.0, job.remaining_s - (self.now - job.run_started))
                views.append(JobState(job_id, job.spec.checkpoint_bytes, left,
                                      job.site, JobStatus.RUNNING))
        views.sort(key=lambda v: v.id)
        return views

    def _on_tick(self) -> None:
        decisions = self.decision_fn(self.now, self._running_views(),
                                     self._snapshots())
        for decision in decisions:
            self._apply_decision(decision)

    def _apply_decision(self, decision: MigrationDecision) -> None:
        job = self.jobs[decision.job_id]
        if job.status is not JobStatus.RUNNING or job.site != decision.src:
            return
        self.attempted += 1
        if self.policy in (PolicyKind.FEASIBILITY_AWARE, PolicyKind.ORACLE):
            # Snapshots can in principle be stale by the time a decision is
            # executed; re-check the gates at this instant and drop if they fail.
            forecast = forecast_remaining(self.traces, decision.dst, self.now,
                                          self.sigma_eff, self.cfg.seed)
            bw = measure_bandwidth(self.topology, decision.src, decision.dst,
                                   self.now, self.noise, self.cfg.seed)
            fresh = assess(job.spec.checkpoint_bytes, bw, forecast.remaining_s,
                           self.params, sigma_s=forecast.sigma_s,
                           epsilon=self.cfg.epsilon)
            if not fresh.feasible:
                return
        self._hash.update(
            f"mig|{decision.job_id}|{decision.src}|{decision.dst}|{self.now!r};".encode())

        executed = self.now - job.run_started
        job.remaining_s = max(0.0, job.remaining_s - executed)
        job.executed_s += executed
        job.run_started = None
        self.running[decision.src].discard(decision.job_id)
        job.status = JobStatus.MIGRATING
        job.epoch += 1

        pause = decision.verdict.timing.total_s
        transfer = decision.verdict.timing.transfer_s
        if self.cfg.contention:
            link = (decision.src, decision.dst)
            wait = max(0.0, self.link_free.get(link, 0.0) - self.now)
            pause += wait
            self.link_free[link] = self.now + wait + transfer
        job.disruption_s += pause

        window = self.traces[decision.dst].active_window_at(self.now)
        job.mig_expected_end = window.end_s if window is not None else self.now
        job.mig_dst = decision.dst

        tx_kwh = self.params.p_sys_kw * transfer / 3600.0
        if self.active[decision.src] > 0:
            self.renewable_kwh += tx_kwh
        else:
            self.nonrenewable_kwh += tx_kwh
        self.transfer_seconds += transfer

        self._push(self.now + pause, EventKind.MIGRATION_COMPLETE,
                   decision.job_id, job.epoch)
        self._dispatch(decision.src)

    def _on_migration_complete(self, job_id: int, epoch: int) -> None:
        job = self.jobs[job_id]
        if job.epoch != epoch or job.status is not JobStatus.MIGRATING:
            return
        self.completed += 1
        job.migrations_done += 1
        if self.now > job.mig_expected_end:
            self.window_missed += 1
        job.site = job.mig_dst
        job.status = JobStatus.QUEUED
        self.queue[job.site].append(job_id)
        self._dispatch(job.site)

    def _on_job_complete(self, job_id: int, epoch: int) -> None:
        job = self.jobs[job_id]
        if job.epoch != epoch or job.status is not JobStatus.RUNNING:
            return
        job.executed_s += self.now - job.run_started
        job.remaining_s = 0.0
        job.run_started = None
        job.status = JobStatus.DONE
        job.completion_s = self.now
        self.running[job.site].discard(job_id)
        self._dispatch(job.site)

    # -- wrap-up ------------------------------------------------------------

    def _finish(self) -> _RawRun:
        raw = _RawRun()
        jcts: list[float] = []
        per_class: dict[str, list] = {k: [0, 0.0, 0, 0.0] for k in ("A", "B", "C")}
        for job in self.jobs.values():
            if job.status is not JobStatus.DONE:
                raise AssertionError(f"job {job.spec.job_id} never completed")
            drift = abs(job.executed_s - job.spec.compute_s)
            if drift > 1e-6 * max(1.0, job.spec.compute_s):
                raise AssertionError(
                    f"job {job.spec.job_id} executed {job.executed_s}, "
                    f"drawn {job.spec.compute_s}")
            jct = job.completion_s - job.spec.arrival_s
            jcts.append(jct)
            bucket = per_class[job.spec.klass]
            bucket[0] += 1
            bucket[1] += jct
            bucket[2] += job.migrations_done
            bucket[3] += job.disruption_s
            raw.total_disruption_s += job.disruption_s
            raw.total_compute_s += job.spec.compute_s

        total = self.renewable_kwh + self.nonrenewable_kwh
        expect = (self.params.p_node_kw * self.run_seconds
                  + self.params.p_sys_kw * self.transfer_seconds) / 3600.0
        if abs(total - expect) > 1e-6 * max(expect, 1e-9):
            raise AssertionError(
                f"energy books do not balance: {total} kWh vs {expect} kWh")

        raw.renewable_kwh = self.renewable_kwh
        raw.nonrenewable_kwh = self.nonrenewable_kwh
        raw.mean_jct_s = sum(jcts) / len(jcts) if jcts else 0.0
        raw.attempted = self.attempted
        raw.completed = self.completed
        raw.window_missed = self.window_missed
        raw.per_class = {
            k: ClassMetrics(jobs=n, mean_jct_s=(jct_sum / n if n else 0.0),
                            migrations_completed=m, disruption_s=d)
            for k, (n, jct_sum, m, d) in per_class.items()}
        raw.digest = self._hash.hexdigest()
        return raw


# --- public entry points ------------------------------------------------------

def build_inputs(cfg: SimConfig, trace_text: str | None = None,
                 jobs_text: str | None = None,
                 topology_text: str | None = None):
    """Materialize (jobs, traces, topology) for a config, honoring overrides."""
    from .energy import ingest_trace

    cfg.validate()
    jobs = parse_jobs_csv(jobs_text, cfg) if jobs_text is not None else generate_jobs(cfg)
    if trace_text is not None:
        traces = ingest_trace(trace_text)
        by_site = {t.site: t for t in traces}
        for t in traces:
            if t.site >= cfg.sites:
                raise ValueError(f"trace references site {t.site}, config has {cfg.sites}")
        traces = [by_site.get(s, SiteEnergyTrace(s, ())) for s in range(cfg.sites)]
    else:
        traces = generate_trace(cfg.trace_config())
    if topology_text is not None:
        topology = parse_topology_csv(topology_text, cfg.sites, cfg.wan_gbps * 1e9)
    else:
        topology = Topology.full_mesh(cfg.sites, cfg.wan_gbps * 1e9)
    return jobs, traces, topology


def _policy_fn(cfg: SimConfig, policy: PolicyKind, topology: Topology):
    params = cfg.feasibility_params()
    up = cfg.utility_params()
    noise = BandwidthNoise(cfg.bw_noise_sigma)

    def fn(now, running_jobs, snapshots):
        return scheduler_tick(running_jobs, snapshots, topology, policy,
                              params, up, cfg.seed, epsilon=cfg.epsilon,
                              noise=noise, now=now)
    return fn


def _execute(cfg: SimConfig, policy: PolicyKind, jobs, traces, topology) -> _RawRun:
    fn = None if policy is PolicyKind.STATIC else _policy_fn(cfg, policy, topology)
    return _Engine(cfg, policy, jobs, traces, topology, decision_fn=fn).run()


def _normalize(policy: PolicyKind, raw: _RawRun, static: _RawRun) -> MetricsReport:
    def ratio(value: float, base: float) -> float:
        if base == 0:
            return 1.0 if value == 0 else math.inf
        return value / base

    overhead = (raw.total_disruption_s / raw.total_compute_s
                if raw.total_compute_s else 0.0)
    return MetricsReport(
        policy=policy.value,
        nonrenewable_kwh=raw.nonrenewable_kwh,
        renewable_kwh=raw.renewable_kwh,
        mean_jct_s=raw.mean_jct_s,
        jct_ratio_vs_static=ratio(raw.mean_jct_s, static.mean_jct_s),
        nonrenewable_ratio_vs_static=ratio(raw.nonrenewable_kwh,
                                           static.nonrenewable_kwh),
        migration_overhead_fraction=overhead,
        migrations_attempted=raw.attempted,
        migrations_completed=raw.completed,
        migrations_window_missed=raw.window_missed,
        per_class=raw.per_class,
    )


def run(cfg: SimConfig, policy: PolicyKind, trace_text: str | None = None,
        jobs_text: str | None = None,
        topology_text: str | None = None) -> MetricsReport:
    """Simulate one policy. The static baseline is recomputed in-run so the
    normalized ratios are always against the same workload and trace."""
    jobs, traces, topology = build_inputs(cfg, trace_text, jobs_text, topology_text)
    raw = _execute(cfg, policy, jobs, traces, topology)
    if policy is PolicyKind.STATIC:
        static = raw
    else:
        static = _execute(cfg, PolicyKind.STATIC, jobs, traces, topology)
    return _normalize(policy, raw, static)


COMPARE_ORDER = (PolicyKind.STATIC, PolicyKind.ENERGY_ONLY,
                 PolicyKind.FEASIBILITY_AWARE, PolicyKind.ORACLE)


def compare(cfg: SimConfig, trace_text: str | None = None,
            jobs_text: str | None = None,
            topology_text: str | None = None) -> list[MetricsReport]:
    """All four policies on identical jobs, trace and topology; static first."""
    jobs, traces, topology = build_inputs(cfg, trace_text, jobs_text, topology_text)
    static = _execute(cfg, PolicyKind.STATIC, jobs, traces, topology)
    reports = [_normalize(PolicyKind.STATIC, static, static)]
    for policy in COMPARE_ORDER[1:]:
        reports.append(_normalize(policy, _execute(cfg, policy, jobs, traces,
                                                   topology), static))
    return reports


def run_digest(cfg: SimConfig, policy: PolicyKind) -> str:
    """SHA-256 over the processed event stream; equal configs must agree."""
    jobs, traces, topology = build_inputs(cfg)
    return _execute(cfg, policy, jobs, traces, topology).digest


# --- per-class validation ----------------------------------------------------

VALIDATION_SIZES_GIB = (1.0, 6.0, 40.0, 280.0)
_VALIDATION_WINDOW_S = 9000.0
_VALIDATION_COMPUTE_S = 3600.0


@dataclass(frozen=True)
class ValidationRow:
    checkpoint_gib: float
    transfer_s: float
    feasibility_class: FeasibilityClass
    jct_overhead_fraction: float
    within_budget: bool


def validate_classes(cfg: SimConfig,
                     sizes_gib: tuple[float, ...] = VALIDATION_SIZES_GIB) -> list[ValidationRow]:
    """Single-migration JCT overhead per representative checkpoint size.

    Scenario per size: two sites, the destination inside a 2.5 h renewable
    window, one job whose compute straddles the window midpoint, and exactly
    one forced migration at that midpoint over the configured WAN. Overhead
    is the JCT increase against the identical run without the migration;
    within_budget compares it to the alpha overhead budget.
    """
    cfg.validate()
    params = cfg.feasibility_params()
    mini = replace(cfg, sites=2, job_count=1, tick_s=60.0,
                   horizon_s=_VALIDATION_WINDOW_S + 2 * _VALIDATION_COMPUTE_S,
                   bw_noise_sigma=0.0, contention=False)
    topology = Topology.full_mesh(2, cfg.wan_gbps * 1e9)
    traces = [SiteEnergyTrace(0, ()),
              SiteEnergyTrace(1, (EnergyWindow(1, 0.0, _VALIDATION_WINDOW_S),))]
    trigger_t = _VALIDATION_WINDOW_S / 2
    arrival = trigger_t - _VALIDATION_COMPUTE_S / 2

    rows = []
    for gib in sizes_gib:
        spec = JobSpec(0, arrival, int(round(gib * GIB)), _VALIDATION_COMPUTE_S,
                       0, _size_class_label(cfg, gib))

        def one_shot(now, running_jobs, snapshots):
            if now != trigger_t or not running_jobs:
                return []
            job = running_jobs[0]
            verdict = assess(job.checkpoint_bytes,
                             topology.bandwidth(0, 1),
                             _VALIDATION_WINDOW_S - now, params)
            return [MigrationDecision(job.id, 0, 1, verdict, 0.0)]

        base = _Engine(mini, None, [spec], traces, topology).run()
        moved = _Engine(mini, None, [spec], traces, topology,
                        decision_fn=one_shot).run()
        overhead = (moved.mean_jct_s - base.mean_jct_s) / base.mean_jct_s
        transfer = 8.0 * spec.checkpoint_bytes / (cfg.wan_gbps * 1e9)
        rows.append(ValidationRow(
            checkpoint_gib=gib,
            transfer_s=transfer,
            feasibility_class=classify(transfer, params),
            jct_overhead_fraction=overhead,
            within_budget=overhead < params.alpha,
        ))
    return rows


# --- report serialization ----------------------------------------------------

def metrics_document(report: MetricsReport) -> str:
    """One policy's metrics as a flat structured-text document."""
    lines = [
        f"policy: {report.policy}",
        f"nonrenewable_kwh: {report.nonrenewable_kwh:.6g}",
        f"renewable_kwh: {report.renewable_kwh:.6g}",
        f"mean_jct_s: {report.mean_jct_s:.6g}",
        f"jct_ratio_vs_static: {report.jct_ratio_vs_static:.6g}",
        f"nonrenewable_ratio_vs_static: {report.nonrenewable_ratio_vs_static:.6g}",
        f"migration_overhead_fraction: {report.migration_overhead_fraction:.6g}",
        f"migrations.attempted: {report.migrations_attempted}",
        f"migrations.completed: {report.migrations_completed}",
        f"migrations.window_missed: {report.migrations_window_missed}",
    ]
    for klass in sorted(report.per_class):
        m = report.per_class[klass]
        lines.append(f"per_class.{klass}.jobs: {m.jobs}")
        lines.append(f"per_class.{klass}.mean_jct_s: {m.mean_jct_s:.6g}")
        lines.append(f"per_class.{klass}.migrations_completed: {m.migrations_completed}")
        lines.append(f"per_class.{klass}.disruption_s: {m.disruption_s:.6g}")
    return "\n".join(lines) + "\n"


def compare_table_csv(reports: list[MetricsReport]) -> str:
    lines = ["policy,nonrenewable_ratio,jct_ratio,overhead"]
    for r in reports:
        lines.append(f"{r.policy},{r.nonrenewable_ratio_vs_static:.4g},"
                     f"{r.jct_ratio_vs_static:.4g},"
                     f"{r.migration_overhead_fraction:.4g}")
    return "\n".join(lines) + "\n"


def validation_csv(rows: list[ValidationRow]) -> str:
    lines = ["checkpoint_gib,transfer_s,class,jct_overhead_fraction,within_budget"]
    for r in rows:
        lines.append(f"{r.checkpoint_gib:.4g},{r.transfer_s:.4g},"
                     f"{r.feasibility_class.value},{r.jct_overhead_fraction:.4g},"
                     f"{str(r.within_budget).lower()}")
    return "\n".join(lines) + "\n"
