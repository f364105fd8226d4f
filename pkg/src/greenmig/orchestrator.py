"""Migration policies.

scheduler_tick() is the heart of the control loop: given the running jobs,
one snapshot per site and the topology, it returns the migrations to start
right now. It is a pure function; the simulator (or a live control plane)
owns all state and applies the decisions.

Policies:
  - static: never migrates, the normalization baseline.
  - energy-only: chases any renewable site, ignoring every feasibility gate.
  - feasibility: full time/energy/class gating plus the utility benefit rule.
  - oracle: the feasibility policy fed perfect (sigma 0) window forecasts;
    same code path, the caller zeroes the forecast noise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .feasibility import (FeasibilityParams, FeasibilityVerdict,
                          WindowForecast, assess)
from .network import NO_NOISE, BandwidthNoise, Topology, measure_bandwidth

HOUR = 3600.0


class JobStatus(str, Enum):
    QUEUED = "queued"
    RUNNING = "running"
    MIGRATING = "migrating"
    DONE = "done"


class PolicyKind(str, Enum):
    STATIC = "static"
    ENERGY_ONLY = "energy-only"
    FEASIBILITY_AWARE = "feasibility"
    ORACLE = "oracle"


@dataclass(frozen=True)
class JobState:
    id: int
    checkpoint_bytes: int
    remaining_compute_s: float
    site: int
    status: JobStatus

    def __post_init__(self):
        if self.checkpoint_bytes < 0 or self.remaining_compute_s < 0:
            raise ValueError("checkpoint and remaining compute must be non-negative")


@dataclass(frozen=True)
class SiteSnapshot:
    site: int
    renewable_active: bool
    forecast: WindowForecast
    running_count: int
    queued_count: int
    slots: int

    def __post_init__(self):
        if self.slots < 1:
            raise ValueError("a site has at least one slot")
        if self.running_count < 0 or self.queued_count < 0:
            raise ValueError("load counts must be non-negative")


@dataclass(frozen=True)
class UtilityParams:
    gamma: float = 1.0
    beta: float = 0.5


@dataclass(frozen=True)
class MigrationDecision:
    job_id: int
    src: int
    dst: int
    verdict: FeasibilityVerdict
    benefit_s: float


def utility(snapshot: SiteSnapshot, up: UtilityParams = UtilityParams()) -> float:
    """Attractiveness of a site: renewable reward minus congestion penalty.

    The renewable term is an indicator scaled by how much of a full hour the
    window still covers, so almost-over windows score low; the load term is
    the occupancy ratio (running + queued) / slots.
    """
    scale = min(1.0, snapshot.forecast.remaining_s / HOUR)
    reward = scale if snapshot.renewable_active else 0.0
    load = (snapshot.running_count + snapshot.queued_count) / snapshot.slots
    return up.gamma * reward - up.beta * load


def calc_benefit(job: JobState, src_snapshot: SiteSnapshot,
                 dst_snapshot: SiteSnapshot,
                 up: UtilityParams = UtilityParams()) -> float:
    """Utility gap converted to seconds of improved execution: the gap times
    the time the job can actually use at the destination (its own remaining
    compute, capped by the destination's forecast window)."""
    gap = utility(dst_snapshot, up) - utility(src_snapshot, up)
    horizon = min(job.remaining_compute_s, dst_snapshot.forecast.remaining_s)
    return gap * horizon


def feasible_destinations(job: JobState, snapshots: list[SiteSnapshot],
                          topology: Topology,
                          params: FeasibilityParams = FeasibilityParams(),
                          epsilon: float | None = None, *,
                          noise: BandwidthNoise = NO_NOISE, seed: int = 0,
                          now: float = 0.0) -> list[tuple[int, FeasibilityVerdict]]:
    """Destinations (site, verdict) where the job's move passes every gate.

    Bandwidth is probed per destination; the window is the destination's
    forecast. With epsilon set and a noisy forecast the time gate is the
    stochastic one. Sites without any forecast window are skipped outright.
    """
    if job.status is not JobStatus.RUNNING:
        raise ValueError(f"job {job.id} is {job.status.value}, not running")
    out = []
    for snap in snapshots:
        if snap.site == job.site or snap.forecast.remaining_s <= 0:
            continue
        bw = measure_bandwidth(topology, job.site, snap.site, now, noise, seed)
        verdict = assess(job.checkpoint_bytes, bw, snap.forecast.remaining_s,
                         params, sigma_s=snap.forecast.sigma_s, epsilon=epsilon)
        if verdict.feasible:
            out.append((snap.site, verdict))
    return out


def scheduler_tick(jobs: list[JobState], snapshots: list[SiteSnapshot],
                   topology: Topology, policy: PolicyKind,
                   params: FeasibilityParams = FeasibilityParams(),
                   up: UtilityParams = UtilityParams(), seed: int = 0, *,
                   epsilon: float | None = None,
                   noise: BandwidthNoise = NO_NOISE,
                   now: float = 0.0) -> list[MigrationDecision]:
    """One pass of the control loop; returns at most one decision per job.

    Jobs are handled in id order against working load counts: each emitted
    decision immediately shifts one job's worth of load in the book-keeping
    the next job sees, exactly like a sequential trigger loop would. Benefits
    are priced on the post-move states, so a move between equivalent sites
    scores negative and hysteresis falls out for free; a move into a full
    site is priced as the queue landing it would be, which the load term
    penalizes but does not forbid.
    """
    by_site: dict[int, SiteSnapshot] = {}
    for snap in snapshots:
        if snap.site in by_site:
            raise ValueError(f"duplicate snapshot for site {snap.site}")
        by_site[snap.site] = snap
    for job in jobs:
        if job.site not in by_site:
            raise ValueError(f"job {job.id} sits at site {job.site} with no snapshot")

    def _with_job(snap: SiteSnapshot) -> SiteSnapshot:
        if snap.running_count < snap.slots:
            return replace(snap, running_count=snap.running_count + 1)
        return replace(snap, queued_count=snap.queued_count + 1)

    if policy is PolicyKind.STATIC:
        return []

    counts = {site: [snap.running_count, snap.queued_count]
              for site, snap in by_site.items()}

    def working(site: int) -> SiteSnapshot:
        snap = by_site[site]
        running, queued = counts[site]
        if running == snap.running_count and queued == snap.queued_count:
            return snap
        return replace(snap, running_count=running, queued_count=queued)

    decisions = []
    for job in sorted(jobs, key=lambda j: j.id):
        if job.status is not JobStatus.RUNNING:
            continue
        src = working(job.site)
        # Benefit prices the states the move would create: the job's own slot
        # leaves src and lands at dst. Scoring as-is occupancy instead lets a
        # job's own footprint manufacture a utility gap and walk forever
        # between identical sites.
        src_after = replace(src, running_count=max(0, src.running_count - 1))
        choice = None

        if policy is PolicyKind.ENERGY_ONLY:
            if src.renewable_active:
                continue
            candidates = [working(s.site) for s in snapshots
                          if s.site != job.site and s.renewable_active]
            if not candidates:
                continue
            best = min(candidates, key=lambda s: (-utility(s, up), s.site))
            bw = measure_bandwidth(topology, job.site, best.site, now, noise, seed)
            verdict = assess(job.checkpoint_bytes, bw,
                             best.forecast.remaining_s, params)
            best_after = _with_job(best)
            choice = MigrationDecision(job.id, job.site, best.site, verdict,
                                       calc_benefit(job, src_after, best_after, up))
        else:  # FEASIBILITY_AWARE and ORACLE share the gate logic
            scored = []
            for dst_site, verdict in feasible_destinations(
                    job, snapshots, topology, params, epsilon,
                    noise=noise, seed=seed, now=now):
                benefit = calc_benefit(job, src_after, _with_job(working(dst_site)), up)
                scored.append((-benefit, verdict.timing.transfer_s, dst_site, verdict))
            if not scored:
                continue
            neg_benefit, _, dst_site, verdict = min(scored)
            if -neg_benefit <= verdict.timing.total_s:
                continue
            choice = MigrationDecision(job.id, job.site, dst_site, verdict,
                                       -neg_benefit)

        if choice is not None:
            decisions.append(choice)
            counts[choice.src][0] = max(0, counts[choice.src][0] - 1)
            running, queued = counts[choice.dst]
            if running < by_site[choice.dst].slots:
                counts[choice.dst][0] = running + 1
            else:
                counts[choice.dst][1] = queued + 1
    return decisions
