"""Command-line front end: simulate, verify, fit, report.

Exit codes: 0 success, 1 usage/config error, 2 numerical failure,
3 verification failure.  All outputs are deterministic given the config
bytes; every command drops a manifest carrying the config digest.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, ansatz, frontfit, heatkernel, sim
from .errors import DomainError, NumericsError
from .io import atomic_write_text, read_csv_columns, write_csv
from .report import VerificationReport, reports_to_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICS = 2
EXIT_VERIFICATION = 3

SUITES = ("supersolutions", "subsolutions", "critical", "heat")
_R_SET = (-1.0, 0.0, 0.5, 1.0, 1.25)


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command: str, digest: str, outputs: list[str],
                    extra: dict | None = None) -> None:
    manifest = {
        "command": command,
        "config_digest": digest,
        "tool_version": __version__,
        "outputs": sorted(outputs),
    }
    if extra:
        manifest.update(extra)
    atomic_write_text(out_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def cmd_simulate(args) -> int:
    config_path = Path(args.config)
    if not config_path.is_file():
        print(f"config not found: {config_path}", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = sim.load_config(config_path)
    except (DomainError, ValueError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(args.out)
    try:
        result = sim.simulate(config)
    except NumericsError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    outputs = []
    for level, trace in sorted(result.traces.items()):
        rel = f"traces/level_{level:g}.csv"
        trace.to_csv(out_dir / rel)
        outputs.append(rel)
    for t_snap, snap in sorted(result.snapshots.items()):
        rel = f"snapshots/t_{t_snap:g}.csv"
        write_csv(out_dir / rel, ("xi", "u"), zip(snap.grid(), snap.values))
        outputs.append(rel)
    _write_manifest(
        out_dir, "simulate", _digest(config_path), outputs,
        extra={"config": {
            "k": config.k, "amplitude": config.amplitude,
            "xi_min": config.xi_min, "xi_max": config.xi_max,
            "dxi": config.dxi, "dt": config.dt, "t_end": config.t_end,
            "levels": list(config.levels),
            "snapshot_times": list(config.snapshot_times),
        }},
    )
    print(f"simulate k={config.k:g}: {len(outputs)} files under {out_dir}")
    return EXIT_OK


def _suite_checks(suite: str, epsilon_scale: float):
    """Closures for one suite's independent checks, in a fixed order."""
    if suite == "supersolutions":
        jobs = [lambda r=r: ansatz.check_supersolution(r) for r in _R_SET]
        jobs += [lambda r=r: ansatz.check_linear_residual_identity(r, max(r, 0.0))
                 for r in (0.0, 0.5, 1.0)]
        jobs += [lambda k=k: ansatz.check_tw_shift(k) for k in (1.0, 3.0)]
        return jobs
    if suite == "subsolutions":
        jobs = [lambda r=r: ansatz.check_subsolution(r, epsilon_scale=epsilon_scale)
                for r in _R_SET]
        jobs += [lambda r=r: ansatz.check_linear_residual_identity(r, r - 2.0)
                 for r in (0.5, 1.0)]
        jobs += [lambda r=r: ansatz.check_phi_eta_sub(r) for r in (-1.0, -0.25)]
        jobs += [lambda k=k: ansatz.check_tw_shift(k) for k in (0.0,)]
        return jobs
    if suite == "critical":
        return [
            lambda: ansatz.check_critical_sub(),
            lambda: ansatz.check_critical_super(),
        ]
    if suite == "heat":
        jobs = [lambda t=t: heatkernel.verify_midrange_band(t) for t in (1e3, 1e5, 1e7)]
        jobs += [lambda: heatkernel.verify_weighted_sup_exponent(0.1)]
        jobs += [lambda: heatkernel.gradient_bound_constant()[1]]
        return jobs
    raise DomainError(f"unknown suite {suite!r}; choose from {SUITES}")


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        jobs = _suite_checks(args.suite, args.epsilon_scale)
        if args.threads > 1:
            with ThreadPoolExecutor(max_workers=args.threads) as pool:
                reports = list(pool.map(lambda j: j(), jobs))
        else:
            reports = [job() for job in jobs]
    except DomainError as exc:
        print(f"suite {args.suite} rejected a spec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericsError as exc:
        print(f"suite {args.suite} failed numerically: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    out_dir = Path(args.out)
    outputs = [f"verify_{args.suite}.csv"]
    reports_to_csv(reports, out_dir / outputs[0])
    if args.suite == "heat":
        records = []
        for t in (1e2, 1e4, 1e6, 1e8):
            x = 2.0 * math.sqrt(t)
            res = heatkernel.v_dirichlet(t, x)
            records.append((t, x, res.value, res.abs_error_estimate))
        sweep = "heat_sweep_2sqrt_t.csv"
        heatkernel.sweep_to_csv(records, out_dir / sweep)
        outputs.append(sweep)
    failed = [r for r in reports if not r.passed]
    for r in reports:
        print(r.text_block())
    _write_manifest(
        out_dir, f"verify {args.suite}",
        hashlib.sha256(args.suite.encode()).hexdigest(),
        outputs,
    )
    if failed:
        worst = max(failed, key=lambda r: abs(r.worst_signed_residual))
        print(
            f"{len(failed)} checks failed; worst violation {worst.worst_signed_residual:.3e} "
            f"in {worst.name}",
            file=sys.stderr,
        )
        return EXIT_VERIFICATION
    return EXIT_OK


def _trace_from_csv(path: Path) -> sim.FrontTrace:
    import numpy as np

    cols = read_csv_columns(path)
    if "t" not in cols or "x_m" not in cols:
        raise ValueError(f"{path}: expected columns t, x_m")
    level = math.nan
    name = path.stem
    if name.startswith("level_"):
        level = float(name.split("_", 1)[1])
    return sim.FrontTrace(
        level=level,
        times=np.asarray(cols["t"], dtype=float),
        positions=np.asarray(cols["x_m"], dtype=float),
    )


def cmd_fit(args) -> int:
    trace_path = Path(args.trace)
    if not trace_path.is_file():
        print(f"trace not found: {trace_path}", file=sys.stderr)
        return EXIT_USAGE
    try:
        trace = _trace_from_csv(trace_path)
    except ValueError as exc:
        print(f"malformed trace CSV: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.critical:
            fit = frontfit.fit_critical(trace, args.t_min)
        else:
            fit = frontfit.fit_log_correction(trace, args.t_min)
    except DomainError as exc:
        print(f"fit rejected: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(args.out) if args.out else trace_path.parent.parent
    suffix = "_critical" if args.critical else ""
    fit.to_csv(out_dir / f"fit_{trace_path.stem}{suffix}.csv")
    print(fit.report_block())
    return EXIT_OK


def cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        print(f"run directory not found: {run_dir}", file=sys.stderr)
        return EXIT_USAGE
    manifests = sorted(run_dir.glob("**/manifest.json"))
    sim_rows = []
    critical_rows = []
    for mpath in manifests:
        meta = json.loads(mpath.read_text())
        if meta.get("command") != "simulate":
            continue
        k = meta.get("config", {}).get("k")
        if k is None:
            continue
        sim_dir = mpath.parent
        fits = sorted(sim_dir.glob("fit_level_*.csv"))
        if not fits:
            print(f"missing fit result for {sim_dir} (expected fit_level_*.csv)", file=sys.stderr)
            return EXIT_USAGE
        for fpath in fits:
            cols = read_csv_columns(fpath)
            coeff = cols["coefficient"][0]
            r_hat = float(cols["r_hat"][0])
            if coeff == "lnln_coeff":
                critical_rows.append((k, r_hat, float(cols["residual_max"][0]), str(fpath)))
            else:
                r_target = 0.5 * (1.0 - k)
                sim_rows.append((k, r_target, r_hat, abs(r_hat - r_target)))
    verdict_rows = []
    for vpath in sorted(run_dir.glob("**/verify_*.csv")):
        cols = read_csv_columns(vpath)
        for name, verdict in zip(cols["check"], cols["verdict"]):
            verdict_rows.append((str(name), str(verdict)))
    lines = ["run report", "==========", ""]
    if sim_rows:
        lines.append("k        r_target   r_hat      |delta|")
        for k, rt, rh, d in sorted(sim_rows):
            lines.append(f"{k:<8g} {rt:<10g} {rh:<10.4f} {d:<10.4f}")
        lines.append("")
    if critical_rows:
        lines.append("critical-case ln ln t coefficients (target 1):")
        for k, c, res, src in critical_rows:
            lines.append(f"  k={k:g}: coeff={c:.4f} residual={res:.3e}  [{src}]")
        lines.append("")
    if verdict_rows:
        fails = [n for n, v in verdict_rows if v != "pass"]
        lines.append(f"verification checks: {len(verdict_rows)} total, {len(fails)} failed")
        for n, v in verdict_rows:
            lines.append(f"  [{v}] {n}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    atomic_write_text(run_dir / "report.txt", text)
    write_csv(
        run_dir / "report.csv",
        ("k", "r_target", "r_hat", "abs_delta"),
        [(k, rt, rh, d) for k, rt, rh, d in sorted(sim_rows)],
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kppfront",
        description="Drift laws and sub/super-solution certificates for the "
                    "Fisher-KPP front at desk scale",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run the co-moving-frame solver from a config file")
    p_sim.add_argument("--config", required=True, help="flat key = value config file")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="run a certificate suite")
    p_ver.add_argument("--suite", required=True, help=f"one of {', '.join(SUITES)}")
    p_ver.add_argument("--out", default=".", help="where to write the report CSV")
    p_ver.add_argument("--threads", type=int, default=1, help="fan independent checks out")
    p_ver.add_argument("--epsilon-scale", type=float, default=1.0,
                       help="scale the auto-chosen epsilon (smoke-test the rejection path)")
    p_ver.set_defaults(func=cmd_verify)

    p_fit = sub.add_parser("fit", help="fit drift laws to a level trace CSV")
    p_fit.add_argument("trace", help="trace CSV with columns t, x_m")
    p_fit.add_argument("--critical", action="store_true", help="fixed 3/2 log, fit the ln ln t coefficient")
    p_fit.add_argument("--t-min", type=float, default=200.0, dest="t_min")
    p_fit.add_argument("--out", default=None, help="output directory (default: next to the trace)")
    p_fit.set_defaults(func=cmd_fit)

    p_rep = sub.add_parser("report", help="summarize a directory of runs")
    p_rep.add_argument("run_dir")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except DomainError as exc:
        print(f"invalid request: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
