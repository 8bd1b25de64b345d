"""Command-line front end: ``pathident {state,simulate,verify,mc}``.

Exit codes: 0 success, 1 config/validation error, 2 a reproduced table or
figure cell outside tolerance, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import config as cfgmod
from . import tables
from .detect import (
    SETTING_THETA,
    SETTINGS,
    concurrence_from_visibility,
    ppt_from_visibility,
    setting_scans,
    visibility_set,
)
from .entmeas import entanglement_report
from .mc import replicate

ENV_OUT = "PATHIDENT_OUT"
DEFAULT_OUT = "pathident_out"

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class VerificationFailed(Exception):
    pass


def fmt_value(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _jsonable(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    return float(v)


def write_table(out_dir: Path, name: str, columns, rows, meta: dict, fmt: str) -> Path:
    """Write rows with a header and a metadata record of the resolved config."""
    path = out_dir / f"{name}.{fmt}"
    if fmt == "csv":
        lines = ["# config: " + json.dumps(meta, sort_keys=True), ",".join(columns)]
        lines += [",".join(fmt_value(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps({"config": meta, "columns": list(columns),
                           "rows": [[_jsonable(v) for v in row] for row in rows]},
                          indent=2) + "\n"
    _atomic_write(path, text)
    return path


def _out_dir(args, cfg=None) -> Path:
    if args.out:
        return Path(args.out)
    if cfg is not None and cfg.output.path:
        return Path(cfg.output.path)
    return Path(os.environ.get(ENV_OUT, DEFAULT_OUT))


def _format(args, cfg=None) -> str:
    if args.format:
        return args.format
    return cfg.output.format if cfg is not None else "csv"


def _load(args) -> cfgmod.ExperimentConfig:
    if not args.config:
        raise cfgmod.ConfigError("--config is required for this command")
    return cfgmod.load(args.config)


def cmd_state(args) -> int:
    cfg = _load(args)
    rep = entanglement_report(cfg.state, args.tol)
    d = rep.as_dict()
    print(f"PPT eigenvalues: {', '.join(fmt_value(float(x)) for x in rep.ppt_eigenvalues)}")
    print(f"min eigenvalue:  {fmt_value(rep.ppt_min_eigenvalue)}")
    print(f"verdict:         {d['verdict']}")
    print(f"concurrence:     exact {fmt_value(rep.concurrence_exact)}  "
          f"numeric {fmt_value(rep.concurrence_numeric)}")
    cols = ["i_h", "coh", "phi", "ppt_ev1", "ppt_ev2", "ppt_ev3", "ppt_ev4",
            "ppt_min", "verdict", "C_exact", "C_numeric"]
    row = [cfg.state.i_h, cfg.state.coh, cfg.state.phi, *map(float, rep.ppt_eigenvalues),
           rep.ppt_min_eigenvalue, d["verdict"], rep.concurrence_exact, rep.concurrence_numeric]
    write_table(_out_dir(args, cfg), "state_report", cols, [row], cfg.to_dict(), _format(args, cfg))
    return EXIT_OK


def simulate(cfg: cfgmod.ExperimentConfig, out_dir: Path, fmt: str, tol: float) -> dict:
    """Write one scan per setting plus a summary record; return the summary."""
    meta = cfg.to_dict()
    scans = setting_scans(cfg.state, cfg.setup, cfg.scan.phases())
    for key, scan in scans.items():
        write_table(out_dir, f"scan_{key}", ["phi_in", "rate"],
                    [[float(x), float(r)] for x, r in zip(scan.phases, scan.rates)],
                    {**meta, "setting": key, "theta": SETTING_THETA[key]}, fmt)
    vs = visibility_set(cfg.state, cfg.setup, scans=scans)
    rep = entanglement_report(cfg.state, tol)
    summary = {f"V_{k}": v for k, v in vs.by_setting().items()}
    summary.update(S=vs.s, N=vs.n, C_est=concurrence_from_visibility(vs),
                   C_exact=rep.concurrence_exact,
                   ppt_verdict="entangled" if ppt_from_visibility(vs, tol) else "separable")
    write_table(out_dir, "summary", list(summary), [list(summary.values())], meta, fmt)
    return summary


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out_dir = _out_dir(args, cfg)
    if args.dump_config:
        _atomic_write(out_dir / "config.json", cfgmod.dumps(cfg) + "\n")
    summary = simulate(cfg, out_dir, _format(args, cfg), args.tol)
    for k, v in summary.items():
        print(f"{k:12s} {fmt_value(v)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    out_dir, fmt = _out_dir(args), _format(args)
    meta = {"setup": cfgmod.ExperimentConfig(tables.STATES["rho1"], tables.TABLE_SETUP)
            .to_dict()["setup"], "states": {k: [p.i_h, p.coh, p.phi]
                                            for k, p in tables.STATES.items()}}
    failures = []

    t1 = tables.reproduce_table1(args.tol)
    print("Table 1: concurrence")
    for r in t1:
        status = "pass" if r.passed else "FAIL"
        print(f"  {r.state}  printed {r.printed:<5} exact {r.exact:.12f} "
              f"numeric {r.numeric:.12f}  {r.verdict:9s} {status}")
        if not r.passed:
            failures.append(f"table1 {r.state}")
    write_table(out_dir, "table1",
                ["state", "i_h", "i_v", "coh", "printed", "C_exact", "C_numeric",
                 "ppt_min", "verdict", "pass"],
                [[r.state, r.i_h, r.i_v, r.coh, r.printed, r.exact, r.numeric,
                  r.ppt_min_eigenvalue, r.verdict, r.passed] for r in t1], meta, fmt)

    t2 = tables.reproduce_table2(tol=args.tol)
    print("Table 2: visibilities at theta = pi/4")
    for r in t2:
        cells = " ".join(f"{c}={d:.4f}({p:.2f}{'' if ok else '!'})"
                         for c, d, p, ok in zip(tables.VIS_COLUMNS, r.derived, r.printed, r.cells_pass))
        status = "pass" if r.passed else "FAIL"
        flag = "  FLAG: printed row inconsistent with the visibility formulas" if r.flagged else ""
        print(f"  {r.state}  {cells}  {r.verdict:9s} {status}{flag}")
        if not r.passed:
            failures.append(f"table2 {r.state}")
    write_table(out_dir, "table2",
                ["state", *tables.VIS_COLUMNS, *(f"printed_{c}" for c in tables.VIS_COLUMNS),
                 "verdict", "printed_verdict", "flagged", "pass"],
                [[r.state, *r.derived, *r.printed, r.verdict, r.printed_verdict,
                  r.flagged, r.passed] for r in t2], meta, fmt)

    pts = tables.fig3_points()
    print("Fig. 3: concurrence vs S/N")
    for pt in pts:
        ok = pt.error < tables.EXACT_TOL
        print(f"  {pt.state}  C={pt.concurrence:.12f}  S/N={pt.s_over_n:.12f}  "
              f"{'pass' if ok else 'FAIL'}")
        if not ok:
            failures.append(f"fig3 {pt.state}")
    write_table(out_dir, "fig3", ["state", "C_exact", "S", "N", "S_over_N", "abs_diff"],
                [[p.state, p.concurrence, p.s, p.n, p.s_over_n, p.error] for p in pts], meta, fmt)

    if failures:
        print("verification failed: " + ", ".join(failures))
        return EXIT_VERIFY
    print("all cells within tolerance (rho3 row flagged, not counted)")
    return EXIT_OK


def cmd_mc(args) -> int:
    cfg = _load(args)
    if cfg.mc is None:
        raise cfgmod.ConfigError("mc: section required for the mc command")
    seed = cfg.mc.seed if args.seed is None else args.seed
    setting = cfg.mc.setting
    setup = cfg.setup.with_theta(SETTING_THETA[setting])
    reps = replicate(cfg.state, setup, setting, cfg.mc.exposure, seed,
                     cfg.mc.replications, cfg.scan.phases())
    meta = {**cfg.to_dict(), "resolved_seed": seed, "theta": SETTING_THETA[setting]}
    out_dir, fmt = _out_dir(args, cfg), _format(args, cfg)
    write_table(out_dir, "mc_replications", ["rep", "seed", "v_hat", "sigma_v", "covered"],
                [[i, int(s), float(v), float(e), bool(c)] for i, (s, v, e, c) in
                 enumerate(zip(reps.seeds, reps.v_hat, reps.sigma, reps.covered))], meta, fmt)
    summary = reps.summary()
    write_table(out_dir, "mc_summary", list(summary), [list(summary.values())], meta, fmt)
    for k, v in summary.items():
        print(f"{k:16s} {fmt_value(v)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./{DEFAULT_OUT})")
    common.add_argument("--format", choices=("csv", "json"), help="output file format")
    common.add_argument("--seed", type=int, help="override mc.seed")
    common.add_argument("--tol", type=float, default=1e-10, help="entanglement decision tolerance")

    parser = argparse.ArgumentParser(
        prog="pathident",
        description="Entanglement of a two-photon mixed state from single-photon interference.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("state", parents=[common], help="PPT test and concurrence of the state")
    sim = sub.add_parser("simulate", parents=[common], help="phase scans, visibilities, S/N")
    sim.add_argument("--dump-config", action="store_true",
                     help="write the fully resolved config to OUT/config.json")
    sub.add_parser("verify", parents=[common], help="reproduce the published tables and figure")
    sub.add_parser("mc", parents=[common], help="shot-noise replications of a visibility")
    return parser


COMMANDS = {"state": cmd_state, "simulate": cmd_simulate, "verify": cmd_verify, "mc": cmd_mc}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except cfgmod.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
