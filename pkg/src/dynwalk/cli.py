"""Command-line front end.

Thin client over the core package: every subcommand builds the same request
payload the HTTP service accepts, executes it in-process (or remotely with
``--server``), and renders the response payload as CSV or JSON.  Exit
codes: 0 success, 1 when a required verdict fails (or on I/O failure),
2 on usage or validation errors.
"""

from __future__ import annotations

import argparse
import gzip
import json
import os
import sys
from dataclasses import dataclass

from . import formats, stats
from .analytic import full_report
from .model import (
    ConfigError,
    Deterministic,
    Insertion,
    ModelConfig,
    PoissonRate,
)
from .simulate import run_walk
from .stats import simulate_many

# pass/fail gating for the normality check only applies in its design domain
CLT_DOMAIN_HORIZON = 500
CLT_DOMAIN_RUNS = 10_000


@dataclass(frozen=True)
class Command:
    """One parsed invocation: subcommand, model configuration, and options."""

    kind: str
    config: ModelConfig | None = None
    runs: int = 10_000
    fmt: str = "csv"
    out: str | None = None
    threads: int = 1
    server: str | None = None
    horizons: tuple[int, ...] = ()
    thresholds: tuple[float, ...] = ()
    events_dir: str | None = None
    gzip_events: bool = False
    host: str = "127.0.0.1"
    port: int = 8000


def _parse_insertion(text: str) -> Insertion:
    if text == "deterministic":
        return Deterministic()
    if text.startswith("poisson:"):
        try:
            return PoissonRate(float(text.split(":", 1)[1]))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad poisson rate in {text!r}") from None
    raise argparse.ArgumentTypeError(
        f"insertion must be 'deterministic' or 'poisson:<beta>', got {text!r}"
    )


def _parse_int_grid(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _parse_float_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _add_config_flags(sub: argparse.ArgumentParser, with_horizon: bool = True) -> None:
    sub.add_argument("--config", metavar="FILE", help="JSON config file; flags override its values")
    sub.add_argument("--k0", type=int, help="initial vertex count (>= 3)")
    sub.add_argument("--lambda", dest="lam", type=float, help="walker move rate")
    if with_horizon:
        sub.add_argument("--horizon", type=int, help="number of unit intervals")
    sub.add_argument(
        "--insertion",
        type=_parse_insertion,
        help="'deterministic' (default) or 'poisson:<beta>'",
    )
    sub.add_argument("--seed", type=int, help="master seed (default 0)")


def _add_common_flags(sub: argparse.ArgumentParser, default_runs: int = 10_000) -> None:
    sub.add_argument("--runs", type=int, default=default_runs, help="number of Monte Carlo runs")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    sub.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker pool size (results are invariant to this)",
    )
    sub.add_argument("--server", metavar="URL", help="execute on a running service instead of in-process")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynwalk",
        description="Growing-complete-graph random walk: analytics, simulation, verification.",
    )
    subs = parser.add_subparsers(dest="kind", required=True)

    p = subs.add_parser("analytic", help="evaluate every closed-form quantity")
    _add_config_flags(p)
    _add_common_flags(p)

    p = subs.add_parser("simulate", help="run realizations and emit per-run summaries")
    _add_config_flags(p)
    _add_common_flags(p)
    p.add_argument("--events-dir", metavar="DIR", help="also dump one event-log CSV per run")
    p.add_argument("--gzip", action="store_true", dest="gzip_events", help="gzip the event-log dumps")

    p = subs.add_parser("verify", help="compare closed forms against Monte Carlo")
    _add_config_flags(p)
    _add_common_flags(p)

    p = subs.add_parser("lln", help="coverage-per-time trace over a horizon grid")
    _add_config_flags(p, with_horizon=False)
    _add_common_flags(p)
    p.add_argument(
        "--horizons",
        type=_parse_int_grid,
        required=True,
        metavar="T1,T2,...",
        help="increasing horizon grid",
    )

    p = subs.add_parser("clt", help="normality check of the standardized covered count")
    _add_config_flags(p)
    _add_common_flags(p)

    p = subs.add_parser("azuma", help="empirical tails against the concentration bound")
    _add_config_flags(p)
    _add_common_flags(p)
    p.add_argument(
        "--thresholds",
        type=_parse_float_grid,
        default=(5.0, 10.0, 20.0, 40.0),
        metavar="t1,t2,...",
        help="deviation thresholds (default 5,10,20,40)",
    )

    p = subs.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _config_from_args(args: argparse.Namespace, with_horizon: bool = True) -> ModelConfig:
    base: dict = {"insertion": "deterministic", "seed": 0}
    if not with_horizon:
        base["horizon"] = 0
    if args.config:
        try:
            with open(args.config) as fh:
                base.update(json.load(fh))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON in {args.config}: {exc}") from None
    overrides = {
        "k0": args.k0,
        "lambda": args.lam,
        "horizon": getattr(args, "horizon", None),
        "seed": args.seed,
    }
    base.update({key: val for key, val in overrides.items() if val is not None})
    if args.insertion is not None:
        base["insertion"] = args.insertion.to_json()
    for key in ("k0", "lambda", "horizon"):
        if key not in base:
            raise ConfigError(f"missing required value: {key}")
    return ModelConfig.from_json_dict(base)


def parse_args(argv: list[str]) -> Command:
    """Parse ``argv`` into a validated :class:`Command`.

    Raises:
        SystemExit(2): on unknown flags or malformed values (argparse).
        ConfigError: when the assembled configuration violates the model.
    """
    args = build_parser().parse_args(argv)
    if args.kind == "serve":
        return Command(kind="serve", host=args.host, port=args.port)
    config = _config_from_args(args, with_horizon=args.kind != "lln")
    if args.runs < (2 if args.kind != "simulate" else 1):
        raise ConfigError("--runs too small")
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    return Command(
        kind=args.kind,
        config=config,
        runs=args.runs,
        fmt=args.format,
        out=args.out,
        threads=args.threads,
        server=args.server,
        horizons=getattr(args, "horizons", ()),
        thresholds=tuple(getattr(args, "thresholds", ())),
        events_dir=getattr(args, "events_dir", None),
        gzip_events=getattr(args, "gzip_events", False),
    )


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


def _dump_event_logs(cmd: Command) -> list[dict]:
    os.makedirs(cmd.events_dir, exist_ok=True)
    rows = []
    width = len(str(max(cmd.runs - 1, 0)))
    for i in range(cmd.runs):
        summary, log = run_walk(cmd.config, i, collect_log=True)
        name = f"run-{i:0{width}d}.csv" + (".gz" if cmd.gzip_events else "")
        path = os.path.join(cmd.events_dir, name)
        text = formats.event_log_csv(log)
        if cmd.gzip_events:
            # fixed mtime so identical commands produce identical bytes
            with gzip.GzipFile(path, "wb", mtime=0) as fh:
                fh.write(text.encode())
        else:
            with open(path, "w") as fh:
                fh.write(text)
        rows.append(
            {
                "run": i,
                "covered": summary.covered,
                "visits_to_start": summary.visits_to_start,
                "at_start_at_horizon": summary.at_start_at_horizon,
                "no_second_visit": summary.no_second_visit,
                "final_vertex_count": summary.final_vertex_count,
            }
        )
    return rows


def execute_local(cmd: Command) -> dict:
    """Run a command in-process; returns the same payload the service would."""
    if cmd.kind == "analytic":
        return full_report(cmd.config).to_json_dict()
    if cmd.kind == "simulate":
        if cmd.events_dir:
            rows = _dump_event_logs(cmd)
        else:
            rows = stats.summary_rows(simulate_many(cmd.config, cmd.runs, cmd.threads))
        return {"config": cmd.config.to_json_dict(), "summaries": rows}
    if cmd.kind == "verify":
        verdicts = stats.verify(cmd.config, cmd.runs, cmd.threads)
        return {
            "config": cmd.config.to_json_dict(),
            "verdicts": [v.to_json_dict() for v in verdicts],
            "passed": all(v.passed for v in verdicts if v.passed is not None),
        }
    if cmd.kind == "lln":
        points = stats.lln_trace(
            cmd.config.k0,
            cmd.config.lam,
            list(cmd.horizons),
            cmd.runs,
            seed=cmd.config.seed,
            threads=cmd.threads,
        )
        return {"points": [p.to_json_dict() for p in points]}
    if cmd.kind == "clt":
        return stats.clt_check(cmd.config, cmd.runs, cmd.threads).to_json_dict()
    if cmd.kind == "azuma":
        rows = stats.azuma_check(cmd.config, cmd.runs, list(cmd.thresholds), cmd.threads)
        return {
            "config": cmd.config.to_json_dict(),
            "rows": [r.to_json_dict() for r in rows],
        }
    raise ValueError(f"unknown command {cmd.kind!r}")


def execute_remote(cmd: Command) -> dict:
    import httpx

    if cmd.kind == "lln":
        request: dict = {
            "k0": cmd.config.k0,
            "lambda": cmd.config.lam,
            "seed": cmd.config.seed,
            "horizons": list(cmd.horizons),
            "n_runs": cmd.runs,
            "threads": cmd.threads,
        }
    else:
        request = {
            "config": cmd.config.to_json_dict(),
            "n_runs": cmd.runs,
            "threads": cmd.threads,
        }
        if cmd.kind == "azuma":
            request["thresholds"] = list(cmd.thresholds)
    response = httpx.post(f"{cmd.server.rstrip('/')}/{cmd.kind}", json=request, timeout=None)
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise ConfigError(f"server rejected request ({response.status_code}): {detail}")
    return response.json()


def _exit_code(cmd: Command, payload: dict) -> int:
    if cmd.kind == "verify":
        return 0 if payload["passed"] else 1
    if cmd.kind == "azuma":
        return 0 if all(row["passed"] for row in payload["rows"]) else 1
    if cmd.kind == "clt":
        in_domain = cmd.config.horizon >= CLT_DOMAIN_HORIZON and cmd.runs >= CLT_DOMAIN_RUNS
        return 1 if in_domain and not payload["passed"] else 0
    return 0


def execute(cmd: Command) -> int:
    """Execute a parsed command and emit its artifact; returns the exit code."""
    if cmd.kind == "serve":
        import uvicorn

        uvicorn.run("dynwalk.service.app:app", host=cmd.host, port=cmd.port)
        return 0
    if cmd.server and cmd.events_dir:
        raise ConfigError("--events-dir requires local execution, not --server")
    payload = execute_remote(cmd) if cmd.server else execute_local(cmd)
    text = formats.render(cmd.kind, payload, cmd.fmt)
    if cmd.out:
        try:
            with open(cmd.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {cmd.out}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return _exit_code(cmd, payload)


def main(argv: list[str] | None = None) -> int:
    try:
        cmd = parse_args(sys.argv[1:] if argv is None else argv)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return execute(cmd)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
