"""Command-line front end, a thin client of the HTTP service.

By default requests are served by an in-process application instance, so no
server needs to be running; pass --server to target a remote one instead.

Exit codes: 0 success, 2 usage error (bad arguments, unreadable file,
malformed JSON), 3 semantic configuration error, 4 numerical abort.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_ABORT = 4

OUT_DIR_ENV = "FUNNELSIM_OUT"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
    # in-process transport against the bundled application
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _load_config(client: httpx.Client, spec: str) -> dict:
    """Resolve a bundled scenario name or a JSON file path to a document."""
    from . import scenarios

    if spec in scenarios.names():
        resp = client.get(f"/scenarios/{spec}")
        if resp.status_code != 200:
            raise CliError(f"could not fetch bundled scenario {spec!r}: {resp.text}", EXIT_USAGE)
        return resp.json()
    path = Path(spec)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {spec!r}: {exc}", EXIT_USAGE) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(
            f"{spec}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            EXIT_USAGE,
        ) from exc


def _apply_overrides(doc: dict, args: argparse.Namespace) -> dict:
    doc = copy.deepcopy(doc)
    sim = doc.setdefault("sim", {})
    if getattr(args, "dt", None) is not None:
        sim["dt"] = args.dt
    if getattr(args, "horizon", None) is not None:
        sim["horizon"] = args.horizon
    if getattr(args, "log_stride", None) is not None:
        sim["log_stride"] = args.log_stride
    return doc


def _out_dir(args: argparse.Namespace, doc: dict) -> Path:
    if args.out is not None:
        return Path(args.out)
    configured = (doc.get("output") or {}).get("dir")
    if configured:
        return Path(configured)
    return Path(os.environ.get(OUT_DIR_ENV, "out"))


def _raise_for_config_error(resp: httpx.Response, label: str) -> None:
    if resp.status_code == 422:
        detail = resp.json().get("detail", resp.text)
        if isinstance(detail, dict):
            detail = detail.get("message", detail)
        raise CliError(f"{label}: configuration rejected: {detail}", EXIT_CONFIG)
    if resp.status_code != 200:
        raise CliError(f"{label}: service error {resp.status_code}: {resp.text}", EXIT_CONFIG)


def _run_one(client: httpx.Client, spec: str, args: argparse.Namespace) -> int:
    doc = _apply_overrides(_load_config(client, spec), args)
    name = doc.get("name") or Path(spec).stem
    resp = client.post(
        "/run", json={"config": doc, "include_trace": not args.no_trace}
    )
    _raise_for_config_error(resp, name)
    body = resp.json()

    target = _out_dir(args, doc) / name
    target.mkdir(parents=True, exist_ok=True)
    if body.get("trace_csv"):
        (target / "trace.csv").write_text(body["trace_csv"])
    summary = {k: body[k] for k in
               ("status", "name", "rows", "metrics", "events", "feasibility", "warnings", "abort")}
    (target / "metrics.json").write_text(json.dumps(summary, indent=2))

    m = body["metrics"]
    print(f"{name}: {body['status']}, rows={body['rows']}, "
          f"containment_x={m['containment_fraction_x']:.4f}"
          + (f", containment_v={m['containment_fraction_v']:.4f}"
             if m["containment_fraction_v"] is not None else "")
          + f", events={len(body['events'])} -> {target}")
    for warning in body["warnings"]:
        print(f"  warning: {warning}")
    if body["status"] == "aborted":
        info = body["abort"]
        print(f"  aborted at t={info['t']}: {info['reason']}")
        return EXIT_ABORT
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    codes = []
    with _client(args.server) as client:
        if args.jobs > 1 and len(args.config) > 1:
            def work(spec: str) -> int:
                with _client(args.server) as own:
                    return _run_one(own, spec, args)

            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                codes = list(pool.map(work, args.config))
        else:
            for spec in args.config:
                codes.append(_run_one(client, spec, args))
    return max(codes) if codes else EXIT_OK


def _print_stage(stage: dict | None, label: str) -> None:
    if stage is None:
        print(f"  {label}: not applicable")
        return
    for i, (lhs, rhs, margin, ok) in enumerate(
        zip(stage["lhs"], stage["rhs"], stage["margins"], stage["passed"])
    ):
        verdict = "pass" if ok else "FAIL"
        print(f"  {label} dim {i + 1}: lhs={lhs:.6g} rhs={rhs:.6g} margin={margin:.6g} {verdict}")


def cmd_feasibility(args: argparse.Namespace) -> int:
    with _client(args.server) as client:
        doc = _load_config(client, args.config)
        name = doc.get("name") or Path(args.config).stem
        resp = client.post("/feasibility", json={"config": doc})
        _raise_for_config_error(resp, name)
        body = resp.json()

    report = body["report"]
    print(f"feasibility report for {name}:")
    _print_stage(report["stage1"], "stage1")
    _print_stage(report["stage2"], "stage2")
    if report["d_bar_max"] is not None:
        print(f"  d_bar_max: {report['d_bar_max']}")
    for warning in body["warnings"]:
        print(f"  warning: {warning}")

    target = _out_dir(args, doc) / name
    target.mkdir(parents=True, exist_ok=True)
    (target / "feasibility.json").write_text(json.dumps(body, indent=2))
    return EXIT_OK


def _set_by_path(doc: dict, path: str, value) -> None:
    keys = path.split(".")
    node = doc
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise CliError(f"parameter path {path!r} does not address a field", EXIT_USAGE)
    node[keys[-1]] = value


_METRIC_FIELDS = (
    "containment_fraction_x", "containment_fraction_v", "max_abs_eps_x",
    "max_abs_eps_v", "recovery_time", "halt_time", "saturation_fraction",
    "control_effort",
)


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        values = [json.loads(v) for v in args.values.split(",") if v.strip()]
    except json.JSONDecodeError as exc:
        raise CliError(f"cannot parse --values: {exc}", EXIT_USAGE) from exc
    if not values:
        raise CliError("--values is empty", EXIT_USAGE)

    with _client(args.server) as client:
        base = _load_config(client, args.config)
        name = base.get("name") or Path(args.config).stem

        def point(value) -> dict:
            doc = copy.deepcopy(base)
            _set_by_path(doc, args.param, value)
            with _client(args.server) as own:
                resp = own.post("/run", json={"config": doc, "include_trace": False})
            if resp.status_code == 422:
                detail = resp.json().get("detail", "")
                if isinstance(detail, dict):
                    detail = detail.get("message", detail)
                return {"value": value, "status": "config_error", "message": str(detail)}
            resp.raise_for_status()
            body = resp.json()
            row = {"value": value, "status": body["status"]}
            row.update({k: body["metrics"][k] for k in _METRIC_FIELDS})
            return row

        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(point, values))
        else:
            rows = [point(v) for v in values]

    target = _out_dir(args, base)
    target.mkdir(parents=True, exist_ok=True)
    out_path = target / f"{name}_sweep.csv"
    header = ["param", "value", "status"] + list(_METRIC_FIELDS)
    with open(out_path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [args.param, repr(row["value"]), row["status"]]
            cells += [repr(row.get(k, "")) for k in _METRIC_FIELDS]
            fh.write(",".join(str(c) for c in cells) + "\n")
    for row in rows:
        print(f"{args.param}={row['value']}: {row['status']}"
              + (f" containment_x={row['containment_fraction_x']:.4f}"
                 if "containment_fraction_x" in row else f" ({row.get('message', '')})"))
    print(f"wrote {out_path}")
    return EXIT_OK


def cmd_scenarios(args: argparse.Namespace) -> int:
    with _client(args.server) as client:
        if args.show:
            resp = client.get(f"/scenarios/{args.show}")
            if resp.status_code == 404:
                raise CliError(f"unknown scenario {args.show!r}", EXIT_USAGE)
            print(json.dumps(resp.json(), indent=2))
        else:
            resp = client.get("/scenarios")
            for name in resp.json()["names"]:
                print(name)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funnelsim",
        description="Simulate input-bounded funnel tracking controllers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--server", default=None,
                       help="base URL of a running service (default: in-process)")
        p.add_argument("--out", default=None,
                       help=f"output directory (default: config, then ${OUT_DIR_ENV}, then ./out)")

    p_run = sub.add_parser("run", help="run one or more scenarios")
    p_run.add_argument("--config", action="append", required=True,
                       help="bundled scenario name or path to a JSON document (repeatable)")
    p_run.add_argument("--dt", type=float, default=None, help="override integration step")
    p_run.add_argument("--horizon", type=float, default=None, help="override horizon")
    p_run.add_argument("--log-stride", type=int, default=None, dest="log_stride",
                       help="override trace decimation")
    p_run.add_argument("--no-trace", action="store_true", help="skip writing trace.csv")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel scenario runs")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_feas = sub.add_parser("feasibility", help="print the per-dimension budget report")
    p_feas.add_argument("--config", required=True)
    common(p_feas)
    p_feas.set_defaults(func=cmd_feasibility)

    p_sweep = sub.add_parser("sweep", help="grid over one parameter, one metrics row per point")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True, help="dotted path, e.g. sim.dt")
    p_sweep.add_argument("--values", required=True, help="comma-separated JSON values")
    p_sweep.add_argument("--jobs", type=int, default=1)
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_list = sub.add_parser("scenarios", help="list or show bundled scenarios")
    p_list.add_argument("--show", default=None, help="print one bundled document")
    common(p_list)
    p_list.set_defaults(func=cmd_scenarios)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
