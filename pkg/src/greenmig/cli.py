"""Command line front end.

Every command is a thin client over the HTTP service: it builds a request,
posts it, and formats the response. By default the service runs in-process
(no daemon needed); point --server at a running instance to go over the wire.

Exit codes: 0 success (and: move is feasible), 2 move is infeasible,
1 usage or service error.
"""

from __future__ import annotations

import sys
from dataclasses import asdict
from pathlib import Path

import click

from .orchestrator import PolicyKind
from .simulator import SimConfig, config_from_text

_DEFAULT_GRID_SIZES = "1,2,5,10,20,50,100,200,300"
_DEFAULT_GRID_GBPS = "0.1,0.2,0.5,1,2,5,10,40,100"
_DEFAULT_BREAKEVEN_SIZES = "1,2,5,10,20,40,60,80,100"


class ApiClient:
    """Dispatches to an in-process app by default, or a remote server."""

    def __init__(self, server: str | None = None):
        self.server = server
        self._client = None

    def _get(self):
        if self._client is None:
            if self.server:
                import httpx
                self._client = httpx.Client(base_url=self.server, timeout=600.0)
            else:
                import warnings
                with warnings.catch_warnings():
                    # some starlette builds warn on import about their httpx shim
                    warnings.simplefilter("ignore")
                    from fastapi.testclient import TestClient

                from .service import create_app
                self._client = TestClient(create_app())
        return self._client

    def post(self, path: str, payload: dict) -> dict:
        return self._handle(self._get().post(path, json=payload))

    def get(self, path: str) -> dict:
        return self._handle(self._get().get(path))

    @staticmethod
    def _handle(resp) -> dict:
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except Exception:
                detail = resp.text
            raise click.ClickException(f"service returned {resp.status_code}: {detail}")
        return resp.json()


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"{what} must be a comma-separated list of numbers")
    if not values:
        raise click.UsageError(f"{what} must not be empty")
    return values


def _read_opt(path: str | None) -> str | None:
    return Path(path).read_text() if path else None


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
        click.echo(f"wrote {output}", err=True)
    else:
        click.echo(text, nl=False)


def _load_config(config_path: str | None, **overrides) -> dict:
    """Config file first, then explicit flags on top."""
    try:
        if config_path:
            cfg = config_from_text(Path(config_path).read_text())
        else:
            cfg = SimConfig()
        for key, value in overrides.items():
            if value is not None:
                setattr(cfg, key, value)
        cfg.validate()
    except ValueError as exc:
        raise click.UsageError(str(exc))
    return asdict(cfg)


def _sim_options(fn):
    opts = [
        click.option("--config", "config_path", metavar="FILE",
                     type=click.Path(exists=True, dir_okay=False),
                     help="key=value config file; flags below override it."),
        click.option("--seed", type=int, default=None),
        click.option("--sites", type=int, default=None),
        click.option("--slots", type=int, default=None),
        click.option("--wan-gbps", type=float, default=None),
        click.option("--horizon-s", type=float, default=None),
        click.option("--tick-s", type=float, default=None),
        click.option("--job-count", type=int, default=None),
        click.option("--alpha", type=float, default=None),
        click.option("--forecast-sigma-s", type=float, default=None),
        click.option("--epsilon", type=float, default=None),
        click.option("--bw-noise-sigma", type=float, default=None),
        click.option("--contention/--no-contention", "contention", default=None),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--server", metavar="URL", envvar="GREENMIG_SERVER", default=None,
              help="Base URL of a running service. Default: in-process.")
@click.pass_context
def cli(ctx, server):
    """Renewable-aware migration gating, traces and policy simulation."""
    ctx.obj = ApiClient(server)


@cli.command()
@click.option("--size-gib", type=float, required=True,
              help="Checkpoint size to move, GiB.")
@click.option("--bandwidth-gbps", type=float, required=True,
              help="Link bandwidth, Gbit/s.")
@click.option("--window-s", type=float, required=True,
              help="Seconds left in the destination's renewable window.")
@click.option("--sigma-s", type=float, default=0.0,
              help="Forecast error stddev; 0 means a perfect forecast.")
@click.option("--epsilon", type=float, default=None,
              help="Miss tolerance for the probabilistic time gate.")
@click.option("--alpha", type=float, default=None)
@click.option("--p-sys-kw", type=float, default=None)
@click.option("--p-node-kw", type=float, default=None)
@click.option("--load-s", "load_time_s", type=float, default=None)
@click.option("--downtime-s", type=float, default=None)
@click.option("--class-a-max-s", type=float, default=None)
@click.option("--class-b-max-s", type=float, default=None)
@click.pass_context
def feasibility(ctx, size_gib, bandwidth_gbps, window_s, sigma_s, epsilon,
                **params):
    """Gate one candidate move. Exits 0 if feasible, 2 if not."""
    payload = {
        "size_gib": size_gib, "gbps": bandwidth_gbps,
        "window_remaining_s": window_s,
        "sigma_s": sigma_s, "epsilon": epsilon,
        "params": {k: v for k, v in params.items() if v is not None},
    }
    data = ctx.obj.post("/feasibility/assess", payload)
    click.echo(f"class: {data['feasibility_class']}")
    click.echo(f"transfer_s: {data['timing']['transfer_s']:.4g}")
    click.echo(f"total_pause_s: {data['timing']['total_s']:.4g}")
    click.echo(f"cost_kwh: {data['energy']['cost_kwh']:.4g}")
    click.echo(f"breakeven_s: {data['energy']['breakeven_s']:.4g}")
    click.echo(f"time_ok: {str(data['time_ok']).lower()}")
    click.echo(f"energy_ok: {str(data['energy_ok']).lower()}")
    click.echo(f"feasible: {str(data['feasible']).lower()}")
    if not data["feasible"]:
        ctx.exit(2)


@cli.command("phase-grid")
@click.option("--sizes-gib", default=_DEFAULT_GRID_SIZES, show_default=True,
              metavar="GIB,GIB,...", help="Checkpoint sizes in GiB.")
@click.option("--bandwidths-gbps", default=_DEFAULT_GRID_GBPS,
              show_default=True, metavar="G,G,...",
              help="Link bandwidths in Gbit/s.")
@click.option("-o", "--out", type=click.Path(dir_okay=False))
@click.pass_obj
def phase_grid_cmd(client, sizes_gib, bandwidths_gbps, out):
    """Transfer time and class over a size x bandwidth grid, as CSV."""
    payload = {"sizes_gib": _parse_floats(sizes_gib, "--sizes-gib"),
               "bandwidths_gbps": _parse_floats(bandwidths_gbps,
                                                "--bandwidths-gbps")}
    data = client.post("/feasibility/phase-grid", payload)
    lines = ["size_gib,bandwidth_gbps,transfer_s,class"]
    for cell in data["cells"]:
        lines.append(f"{cell['size_gib']:.4g},{cell['gbps']:.4g},"
                     f"{cell['transfer_s']:.4g},{cell['feasibility_class']}")
    _emit("\n".join(lines) + "\n", out)


@cli.command()
@click.option("--sizes-gib", default=_DEFAULT_BREAKEVEN_SIZES,
              show_default=True, metavar="GIB,GIB,...")
@click.option("--bandwidth-gbps", type=float, default=10.0, show_default=True)
@click.option("-o", "--out", type=click.Path(dir_okay=False))
@click.pass_obj
def breakeven(client, sizes_gib, bandwidth_gbps, out):
    """Migration energy cost and payback time per checkpoint size, as CSV."""
    payload = {"sizes_gib": _parse_floats(sizes_gib, "--sizes-gib"),
               "gbps": bandwidth_gbps}
    data = client.post("/feasibility/breakeven-curve", payload)
    lines = ["size_gib,cost_kwh,breakeven_s"]
    for p in data["points"]:
        lines.append(f"{p['size_gib']:.4g},{p['cost_kwh']:.4g},{p['breakeven_s']:.4g}")
    _emit("\n".join(lines) + "\n", out)


@cli.command("gen-trace")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sites", type=int, default=5, show_default=True)
@click.option("--days", type=float, default=7.0, show_default=True)
@click.option("--mean-window-h", type=float, default=2.5, show_default=True)
@click.option("--min-window-h", type=float, default=0.5, show_default=True)
@click.option("--max-window-h", type=float, default=9.5, show_default=True)
@click.option("--windows-per-day", type=float, default=1.0, show_default=True)
@click.option("-o", "--out", type=click.Path(dir_okay=False))
@click.pass_obj
def gen_trace(client, seed, sites, days, mean_window_h, min_window_h,
              max_window_h, windows_per_day, out):
    """Generate a synthetic renewable-window trace as CSV."""
    payload = {"seed": seed, "sites": sites, "horizon_s": days * 86400.0,
               "mean_window_s": mean_window_h * 3600.0,
               "min_window_s": min_window_h * 3600.0,
               "max_window_s": max_window_h * 3600.0,
               "windows_per_site_per_day": windows_per_day}
    data = client.post("/trace/generate", payload)
    _emit(data["csv"], out)


@cli.command()
@click.option("--policy", required=True,
              type=click.Choice([p.value for p in PolicyKind]))
@_sim_options
@click.option("--trace", "trace_path", metavar="FILE",
              type=click.Path(exists=True, dir_okay=False),
              help="Renewable trace CSV; generated from the seed if omitted.")
@click.option("--jobs", "jobs_path", metavar="FILE",
              type=click.Path(exists=True, dir_okay=False),
              help="Workload CSV; generated from the seed if omitted.")
@click.option("--topology", "topology_path", metavar="FILE",
              type=click.Path(exists=True, dir_okay=False),
              help="Link CSV overriding the uniform full mesh.")
@click.option("-o", "--out", type=click.Path(dir_okay=False))
@click.pass_obj
def simulate(client, policy, config_path, trace_path, jobs_path, topology_path,
             out, **overrides):
    """Run one policy over the horizon and report its metrics."""
    payload = {
        "policy": policy,
        "config": _load_config(config_path, **overrides),
        "trace_csv": _read_opt(trace_path),
        "jobs_csv": _read_opt(jobs_path),
        "topology_csv": _read_opt(topology_path),
    }
    data = client.post("/simulate", payload)
    _emit(data["document"], out)


@cli.command()
@_sim_options
@click.option("--trace", "trace_path", metavar="FILE",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--jobs", "jobs_path", metavar="FILE",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--topology", "topology_path", metavar="FILE",
              type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", type=click.Path(dir_okay=False))
@click.pass_obj
def compare(client, config_path, trace_path, jobs_path, topology_path, out,
            **overrides):
    """All four policies on identical inputs; one CSV row per policy."""
    payload = {
        "config": _load_config(config_path, **overrides),
        "trace_csv": _read_opt(trace_path),
        "jobs_csv": _read_opt(jobs_path),
        "topology_csv": _read_opt(topology_path),
    }
    data = client.post("/simulate/compare", payload)
    _emit(data["table_csv"], out)


@cli.command()
@_sim_options
@click.option("--sizes-gib", default="1,6,40,280", show_default=True,
              metavar="GIB,GIB,...", help="Representative checkpoint sizes.")
@click.option("-o", "--out", type=click.Path(dir_okay=False))
@click.pass_obj
def validate(client, config_path, sizes_gib, out, **overrides):
    """Measured single-migration JCT overhead per checkpoint size class."""
    payload = {"config": _load_config(config_path, **overrides),
               "sizes_gib": _parse_floats(sizes_gib, "--sizes-gib")}
    data = client.post("/simulate/validate", payload)
    _emit(data["csv"], out)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service in the foreground."""
    import uvicorn
    uvicorn.run("greenmig.service.app:app", host=host, port=port)


def main(argv=None) -> int:
    try:
        # with standalone_mode off, click hands ctx.exit(code) back as a
        # return value instead of calling sys.exit itself
        rv = cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
