"""Renewable-surplus windows per site: synthetic generation, CSV exchange,
point queries and forecasts.

A trace is a list of per-site window sequences. Window starts follow a
Poisson process with a configurable daily rate; durations are exponential
around the configured mean, clipped to [min, max], and overlapping draws are
merged. Everything is deterministic given the seed.
"""

from __future__ import annotations

import csv
import io
import random
from bisect import bisect_right
from dataclasses import dataclass

from .feasibility import WindowForecast

DAY = 86400.0

TRACE_HEADER = ["site_id", "start_s", "duration_s"]


@dataclass(frozen=True)
class EnergyWindow:
    site: int
    start_s: float
    duration_s: float

    def __post_init__(self):
        if self.site < 0:
            raise ValueError(f"site must be non-negative, got {self.site}")
        if self.start_s < 0:
            raise ValueError(f"window start must be non-negative, got {self.start_s}")
        if self.duration_s <= 0:
            raise ValueError(f"window duration must be positive, got {self.duration_s}")

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s


@dataclass(frozen=True)
class SiteEnergyTrace:
    """Windows of one site, ascending and non-overlapping (touching is fine)."""

    site: int
    windows: tuple[EnergyWindow, ...]

    def __post_init__(self):
        prev_end = None
        for w in self.windows:
            if w.site != self.site:
                raise ValueError(f"window for site {w.site} inside trace of site {self.site}")
            if prev_end is not None and w.start_s < prev_end:
                raise ValueError(f"overlapping windows at site {self.site}")
            prev_end = w.end_s

    def active_window_at(self, t: float) -> EnergyWindow | None:
        """Window covering instant t, if any. Windows are half-open [start, end)."""
        starts = [w.start_s for w in self.windows]
        i = bisect_right(starts, t) - 1
        if i >= 0 and t < self.windows[i].end_s:
            return self.windows[i]
        return None


@dataclass(frozen=True)
class TraceGenConfig:
    seed: int = 0
    horizon_s: float = 7 * DAY
    sites: int = 5
    mean_duration_s: float = 9000.0
    min_duration_s: float = 1800.0
    max_duration_s: float = 34200.0
    windows_per_site_per_day: float = 1.0

    def __post_init__(self):
        if self.horizon_s <= 0:
            raise ValueError("horizon must be positive")
        if self.sites < 1:
            raise ValueError("need at least one site")
        if not 0 < self.min_duration_s <= self.mean_duration_s <= self.max_duration_s:
            raise ValueError("need 0 < min <= mean <= max window duration")
        if self.windows_per_site_per_day <= 0:
            raise ValueError("window rate must be positive")


def generate_trace(cfg: TraceGenConfig) -> list[SiteEnergyTrace]:
    """Draw one synthetic trace. Same config -> identical trace, always."""
    rate_per_s = cfg.windows_per_site_per_day / DAY
    traces = []
    for site in range(cfg.sites):
        rng = random.Random(f"{cfg.seed}:trace:{site}")
        spans: list[list[float]] = []
        t = 0.0
        while True:
            t += rng.expovariate(rate_per_s)
            if t >= cfg.horizon_s:
                break
            d = rng.expovariate(1.0 / cfg.mean_duration_s)
            d = min(cfg.max_duration_s, max(cfg.min_duration_s, d))
            if spans and t < spans[-1][1]:
                spans[-1][1] = max(spans[-1][1], t + d)
            else:
                spans.append([t, t + d])
        windows = tuple(EnergyWindow(site, s, e - s) for s, e in spans)
        traces.append(SiteEnergyTrace(site, windows))
    return traces


def serialize_trace(traces: list[SiteEnergyTrace]) -> str:
    """Trace -> CSV text. Floats keep full precision so ingest is the inverse."""
    out = io.StringIO()
    out.write(",".join(TRACE_HEADER) + "\n")
    for trace in traces:
        for w in trace.windows:
            out.write(f"{w.site},{w.start_s!r},{w.duration_s!r}\n")
    return out.getvalue()


def ingest_trace(text: str) -> list[SiteEnergyTrace]:
    """Parse trace CSV. Errors carry the 1-based line number (header is line 1)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != TRACE_HEADER:
        raise ValueError(f"line 1: expected header {','.join(TRACE_HEADER)}")
    per_site: dict[int, list[EnergyWindow]] = {}
    last: dict[int, tuple[float, int]] = {}  # site -> (end of last window, line)
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            site = int(row[0])
            start = float(row[1])
            duration = float(row[2])
            window = EnergyWindow(site, start, duration)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if site in last:
            prev_end, prev_line = last[site]
            if start < prev_end:
                raise ValueError(
                    f"line {lineno}: window at site {site} starts before the one "
                    f"on line {prev_line} ends (unsorted or overlapping)")
        per_site.setdefault(site, []).append(window)
        last[site] = (window.end_s, lineno)
    return [SiteEnergyTrace(site, tuple(per_site[site])) for site in sorted(per_site)]


def _trace_for(traces: list[SiteEnergyTrace], site: int) -> SiteEnergyTrace:
    for trace in traces:
        if trace.site == site:
            return trace
    raise ValueError(f"unknown site {site}")


def renewable_at(traces: list[SiteEnergyTrace], site: int, t: float) -> bool:
    """Is the site inside a renewable window at instant t?"""
    if t < 0:
        raise ValueError("time must be non-negative")
    return _trace_for(traces, site).active_window_at(t) is not None


def forecast_remaining(traces: list[SiteEnergyTrace], site: int, now: float,
                       sigma_s: float = 0.0, seed: int = 0) -> WindowForecast:
    """Forecast of the remaining window at ``site``.

    Inside a window the true remainder is perturbed by truncated-normal noise
    of std ``sigma_s`` (resampled below zero), deterministic per
    (seed, site, now). Outside any window the forecast is zero.
    """
    if sigma_s < 0:
        raise ValueError("sigma must be non-negative")
    window = _trace_for(traces, site).active_window_at(now)
    if window is None:
        return WindowForecast(0.0, sigma_s)
    true_remaining = window.end_s - now
    if sigma_s == 0:
        return WindowForecast(true_remaining, 0.0)
    rng = random.Random(f"{seed}:forecast:{site}:{now!r}")
    for _ in range(100):
        noisy = rng.gauss(true_remaining, sigma_s)
        if noisy >= 0:
            return WindowForecast(noisy, sigma_s)
    return WindowForecast(0.0, sigma_s)  # pragma: no cover - needs sigma >> mean
