"""Inter-site network: static topology plus a noisy bandwidth probe.

The default topology is a full mesh with one nominal rate on every directed
link. measure_bandwidth() models what an orchestrator actually sees when it
probes a path: the nominal rate scaled by a truncated-normal factor, pinned
to the same value for the same (seed, src, dst, instant).
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field

TOPOLOGY_HEADER = ["src", "dst", "gbps"]


@dataclass(frozen=True)
class BandwidthNoise:
    relative_sigma: float = 0.0

    def __post_init__(self):
        if self.relative_sigma < 0:
            raise ValueError("relative_sigma must be non-negative")


NO_NOISE = BandwidthNoise(0.0)


@dataclass(frozen=True)
class Topology:
    site_count: int
    links: dict[tuple[int, int], float] = field(compare=False)

    def __post_init__(self):
        if self.site_count < 2:
            raise ValueError("topology needs at least two sites")
        for (src, dst), bw in self.links.items():
            self._check_pair(src, dst)
            if bw <= 0:
                raise ValueError(f"link {src}->{dst} must have positive bandwidth")

    def _check_pair(self, src: int, dst: int) -> None:
        for site in (src, dst):
            if not 0 <= site < self.site_count:
                raise ValueError(f"site {site} outside topology of {self.site_count} sites")
        if src == dst:
            raise ValueError(f"no self-link at site {src}")

    @classmethod
    def full_mesh(cls, site_count: int, bits_per_second: float) -> "Topology":
        if bits_per_second <= 0:
            raise ValueError("mesh bandwidth must be positive")
        links = {(s, d): bits_per_second
                 for s in range(site_count) for d in range(site_count) if s != d}
        return cls(site_count, links)

    def bandwidth(self, src: int, dst: int) -> float:
        """Nominal bits/s of the directed link src -> dst."""
        self._check_pair(src, dst)
        try:
            return self.links[(src, dst)]
        except KeyError:
            raise ValueError(f"no link {src}->{dst} in topology") from None


def measure_bandwidth(topology: Topology, src: int, dst: int, now: float,
                      noise: BandwidthNoise = NO_NOISE, seed: int = 0) -> float:
    """One bandwidth probe of src -> dst at instant ``now``.

    Nominal rate times a truncated-normal factor (mean 1, sd
    noise.relative_sigma, floored at 0.05). Zero sigma returns the nominal
    rate exactly; repeated probes with the same arguments agree.
    """
    nominal = topology.bandwidth(src, dst)
    if noise.relative_sigma == 0:
        return nominal
    rng = random.Random(f"{seed}:bw:{src}:{dst}:{now!r}")
    factor = max(0.05, rng.gauss(1.0, noise.relative_sigma))
    return nominal * factor


def parse_topology_csv(text: str, site_count: int,
                       default_bits_per_second: float) -> Topology:
    """Topology CSV -> Topology; listed links override a full-mesh default."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != TOPOLOGY_HEADER:
        raise ValueError(f"line 1: expected header {','.join(TOPOLOGY_HEADER)}")
    topology = Topology.full_mesh(site_count, default_bits_per_second)
    links = dict(topology.links)
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            src, dst, gbps = int(row[0]), int(row[1]), float(row[2])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        try:
            topology._check_pair(src, dst)
            if gbps <= 0:
                raise ValueError("bandwidth must be positive")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        links[(src, dst)] = gbps * 1e9
    return Topology(site_count, links)
