"""Command-line front end.

Every subcommand is a thin client of the HTTP service: the request payload
is posted either to an in-process app instance (the default) or to a
running server given with --server.  Outputs are a compact report.json plus
plot-ready CSV grids; numbers are written in shortest round-trip form so
reruns produce byte-identical files.

Exit codes: 0 QID (or successful path/sequence run), 3 NotQID, 2
indeterminate, 1 input error.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import sys
from pathlib import Path
from typing import Optional

import httpx

_EXIT_BY_VERDICT = {"QID": 0, "no_zeros": 0, "ok": 0,
                    "NotQID": 3, "zero_found": 3,
                    "indeterminate": 2}

_ARRAY_KEYS = ("g", "charfn", "recon")


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([str(v) if isinstance(v, int)
                             else _fmt(v) if isinstance(v, float) else v
                             for v in row])


def _load_spec(path: str) -> dict:
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("spec file must hold a JSON object")
    base = Path(path).parent
    ac = raw.get("ac")
    if isinstance(ac, dict):
        _inline_density(ac, base)
    return raw


def _inline_density(dens: dict, base: Path) -> None:
    """Replace tabulated 'file' references with inline x/values arrays."""
    if dens.get("kind") == "tabulated" and "file" in dens:
        ref = dens.pop("file")
        xs, vals = [], []
        with open(base / ref, newline="") as fh:
            for row in csv.reader(fh):
                if not row or not row[0].strip():
                    continue
                try:
                    x = float(row[0])
                except ValueError:
                    continue  # header line
                xs.append(x)
                vals.append(float(row[1]))
        dens["x"] = xs
        dens["values"] = vals
    if dens.get("kind") == "mixture":
        for comp in dens.get("components", []):
            if isinstance(comp, dict):
                _inline_density(comp, base)


def _post(args, path: str, payload: dict) -> httpx.Response:
    if args.server:
        with httpx.Client(base_url=args.server, timeout=600.0) as client:
            return client.post(path, json=payload)

    from .service.app import app

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, timeout=None,
                                     base_url="http://qidkit.local") as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _fail(resp: httpx.Response) -> int:
    try:
        msg = resp.json().get("error") or resp.json()
    except ValueError:
        msg = resp.text
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_report(out: Path, body: dict, name: str = "report.json") -> Path:
    slim = {k: v for k, v in body.items() if k not in _ARRAY_KEYS}
    path = out / name
    with open(path, "w") as fh:
        json.dump(slim, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _write_grid_csvs(out: Path, body: dict) -> list:
    written = []
    g = body.get("g")
    if g:
        xs = [g["start"] + g["step"] * i for i in range(len(g["values"]))]
        _write_csv(out / "g.csv", ["x", "g"], zip(xs, g["values"]))
        written.append(out / "g.csv")
    cf = body.get("charfn")
    if cf:
        zs = [cf["start"] + cf["step"] * i for i in range(len(cf["re"]))]
        _write_csv(out / "charfn.csv", ["z", "re", "im"],
                   zip(zs, cf["re"], cf["im"]))
        written.append(out / "charfn.csv")
    rc = body.get("recon")
    if rc:
        zs = [rc["start"] + rc["step"] * i for i in range(len(rc["re"]))]
        if cf:
            errs = [abs(complex(r1 - r2, i1 - i2)) for r1, i1, r2, i2 in
                    zip(rc["re"], rc["im"], cf["re"], cf["im"])]
        else:
            errs = [0.0] * len(rc["re"])
        _write_csv(out / "recon.csv", ["z", "re", "im", "abs_err"],
                   zip(zs, rc["re"], rc["im"], errs))
        written.append(out / "recon.csv")
    atoms = body.get("lattice_atoms")
    if atoms:
        _write_csv(out / "lattice_masses.csv", ["location", "b"],
                   ((a["location"], a["mass"]) for a in atoms))
        written.append(out / "lattice_masses.csv")
    return written


def _scan_payload(args) -> Optional[dict]:
    if getattr(args, "scan_bound", None) is None:
        return None
    return {"scan_bound": args.scan_bound}


# -- subcommands -------------------------------------------------------------


def _cmd_analysis_like(args, endpoint: str) -> int:
    payload = {"spec": _load_spec(args.spec),
               "include_grids": not args.json_only}
    if args.n is not None:
        payload["n_points"] = args.n
    if args.zmax is not None:
        payload["grid_z_max"] = args.zmax
    scan = _scan_payload(args)
    if scan:
        payload["scan"] = scan
    if endpoint == "/reconstruct":
        payload.pop("include_grids")
    resp = _post(args, endpoint, payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    out = _out_dir(args)
    report = _write_report(out, body)
    files = [report]
    if not args.json_only:
        files.extend(_write_grid_csvs(out, body))
    trip = body.get("triplet")
    extra = ""
    if trip:
        extra = (f" index={trip['index']} a={trip['a']:.6g}"
                 f" gamma0={trip['gamma0']:.6g}"
                 f" im_residual={trip['im_residual']:.3g}"
                 f" recon_error={trip['recon_error']:.3g}")
    print(f"verdict={body['verdict']} form={body['form']}{extra}")
    for f in files:
        print(f"wrote {f}")
    return _EXIT_BY_VERDICT.get(body["verdict"], 2)


def cmd_analyze(args) -> int:
    return _cmd_analysis_like(args, "/analyze")


def cmd_triplet(args) -> int:
    return _cmd_analysis_like(args, "/triplet")


def cmd_reconstruct(args) -> int:
    return _cmd_analysis_like(args, "/reconstruct")


def cmd_zeros(args) -> int:
    payload = {"spec": _load_spec(args.spec)}
    scan = _scan_payload(args)
    if scan:
        payload["scan"] = scan
    resp = _post(args, "/zeros", payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    out = _out_dir(args)
    report = _write_report(out, body)
    cert = body.get("certificate") or {}
    loc = cert.get("refined_location")
    where = f" at z={loc!r}" if loc is not None else ""
    print(f"verdict={body['verdict']}{where}")
    print(f"wrote {report}")
    return _EXIT_BY_VERDICT.get(body["verdict"], 2)


def cmd_index(args) -> int:
    payload = {"spec": _load_spec(args.spec)}
    if args.n is not None:
        payload["n_points"] = args.n
    if args.zmax is not None:
        payload["z_max"] = args.zmax
    resp = _post(args, "/index", payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    out = _out_dir(args)
    report = _write_report(out, body)
    print(f"verdict={body['verdict']} kind={body.get('kind', '')} "
          f"index={body.get('index')}")
    print(f"wrote {report}")
    return _EXIT_BY_VERDICT.get(body["verdict"], 2)


def cmd_lattice(args) -> int:
    payload = {"spec": _load_spec(args.spec)}
    if args.n is not None:
        payload["n_points"] = args.n
    scan = _scan_payload(args)
    if scan:
        payload["scan"] = scan
    resp = _post(args, "/lattice", payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    out = _out_dir(args)
    report = _write_report(out, body, "lattice.json")
    files = [report]
    if not args.json_only:
        for key, name in (("series", "series.csv"),
                          ("inverse", "inverse.csv")):
            block = body.get(key)
            if block:
                _write_csv(out / name, ["k", "re", "im"],
                           ((int(r["k"]), r["re"], r["im"])
                            for r in block["coefficients"]))
                files.append(out / name)
        masses = body.get("log_masses")
        if masses:
            _write_csv(out / "log_masses.csv", ["k", "re", "im"],
                       ((int(r["k"]), r["re"], r["im"]) for r in masses))
            files.append(out / "log_masses.csv")
    print(f"verdict={body['verdict']} winding={body.get('winding')} "
          f"drift={body.get('drift')}")
    for f in files:
        print(f"wrote {f}")
    return _EXIT_BY_VERDICT.get(body["verdict"], 2)


def _parse_t_grid(text: str) -> list:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("expected a:b:step")
    a, b, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("step must be positive")
    ts, t = [], a
    while t <= b + 1e-12:
        ts.append(round(t, 12))
        t += step
    return ts


def cmd_interpolate(args) -> int:
    payload = {"spec1": _load_spec(args.spec),
               "spec2": _load_spec(args.spec2),
               "t_grid": _parse_t_grid(args.t_grid)}
    if args.n is not None:
        payload["n_points"] = args.n
    resp = _post(args, "/interpolate", payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    out = _out_dir(args)
    report = _write_report(out, body, "path.json")
    files = [report]
    if not args.json_only:
        _write_csv(out / "path.csv",
                   ["t", "levy_to_mu1", "levy_to_mu2", "qid_verdict"],
                   ((r["t"], r["levy_to_mu1"], r["levy_to_mu2"],
                     r["qid_verdict"]) for r in body["rows"]))
        files.append(out / "path.csv")
    verdicts = {r["qid_verdict"] for r in body["rows"]}
    print(f"rows={len(body['rows'])} verdicts={sorted(verdicts)}")
    for f in files:
        print(f"wrote {f}")
    return 0


def cmd_sequence(args) -> int:
    ladder = [int(p) for p in args.n_ladder.split(",") if p.strip()]
    payload = {"spec": _load_spec(args.spec),
               "spec_factor": _load_spec(args.spec2),
               "n_ladder": ladder}
    resp = _post(args, "/sequence", payload)
    if resp.status_code != 200:
        return _fail(resp)
    body = resp.json()
    out = _out_dir(args)
    report = _write_report(out, body, "sequence.json")
    files = [report]
    if not args.json_only:
        _write_csv(out / "sequence.csv",
                   ["n", "zero_location", "levy_to_limit"],
                   ((r["n"], r["zero_location"], r["levy_to_limit"])
                    for r in body["rows"]))
        files.append(out / "sequence.csv")
    last = body["rows"][-1]
    print(f"rows={len(body['rows'])} final_levy={last['levy_to_limit']:.3g}")
    for f in files:
        print(f"wrote {f}")
    return 0


# -- argument wiring ---------------------------------------------------------


def _add_common(sub, spec2: bool = False) -> None:
    sub.add_argument("--spec", required=True, help="distribution spec JSON")
    if spec2:
        sub.add_argument("--spec2", required=True,
                         help="second distribution spec JSON")
    sub.add_argument("--out", default=".", help="output directory")
    sub.add_argument("--server", default=None,
                     help="base URL of a running service; default runs "
                          "in process")
    sub.add_argument("--json-only", action="store_true",
                     help="write report.json only, no CSV grids")
    sub.add_argument("--seed", type=int, default=None,
                     help="reserved for randomized corpus generation")


def build_parser() -> _Parser:
    parser = _Parser(prog="qidkit",
                     description="quasi-infinite divisibility toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, fn in (("analyze", cmd_analyze), ("triplet", cmd_triplet),
                     ("reconstruct", cmd_reconstruct)):
        sub = subs.add_parser(name)
        _add_common(sub)
        sub.add_argument("--n", type=int, default=None,
                         help="transform grid size (power of two)")
        sub.add_argument("--zmax", type=float, default=None,
                         help="half-width of the report grid")
        sub.add_argument("--scan-bound", type=float, default=None,
                         help="user bound for the zero scan")
        sub.set_defaults(fn=fn)

    sub = subs.add_parser("zeros")
    _add_common(sub)
    sub.add_argument("--scan-bound", type=float, default=None)
    sub.set_defaults(fn=cmd_zeros)

    sub = subs.add_parser("index")
    _add_common(sub)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--zmax", type=float, default=None)
    sub.set_defaults(fn=cmd_index)

    sub = subs.add_parser("lattice")
    _add_common(sub)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--scan-bound", type=float, default=None)
    sub.set_defaults(fn=cmd_lattice)

    sub = subs.add_parser("interpolate")
    _add_common(sub, spec2=True)
    sub.add_argument("--t-grid", default="0:1:0.1", help="a:b:step")
    sub.add_argument("--n", type=int, default=None)
    sub.set_defaults(fn=cmd_interpolate)

    sub = subs.add_parser("sequence")
    _add_common(sub, spec2=True)
    sub.add_argument("--n-ladder", default="1,2,5,10,50",
                     help="comma-separated sequence indices")
    sub.set_defaults(fn=cmd_sequence)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: service request failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
