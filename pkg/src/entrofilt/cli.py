"""Command-line entry point.

Subcommands: `run` (single case), `converge` (mesh sweep with rate fit),
`selftest` (fast property probes).  Every option can also be supplied
through a flat `key = value` config file via --config; explicit flags
override file values.  Exit codes: 0 success, 1 usage error, 2 when a
run aborts on a constraint/mean violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .euler import InadmissibleStateError
from .filtering import InfeasibleAtZetaMaxError, MeanViolationError
from .harness import (
    RunConfig,
    convergence_study,
    run_config,
    write_convergence_csv,
    write_convergence_summary_csv,
    write_reference_csv,
    write_report_csv,
    write_solution_csv,
    write_summary_csv,
)

log = logging.getLogger("entrofilt")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_config_file(path) -> dict:
    """Flat `key = value` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _parse_mesh(text):
    return tuple(int(v) for v in str(text).split(",")) if text else None


def _build_parser() -> _Parser:
    parser = _Parser(prog="entrofilt")
    parser.add_argument("--config", help="key = value config file; flags override it")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_opts(p):
        p.add_argument("--case", required=False)
        p.add_argument("--order", type=int, default=None)
        p.add_argument("--cfl", type=float, default=None)
        p.add_argument("--riemann", choices=["hllc", "rusanov"], default=None)
        p.add_argument("--filter", dest="filter_mode", choices=["entropy", "linear", "off"], default=None)
        p.add_argument("--out", default=None)

    run_p = sub.add_parser("run", help="run one case and write solution/report CSVs")
    add_run_opts(run_p)
    run_p.add_argument("--mesh", default=None, help="Nx or Nx,Ny")
    run_p.add_argument("--skip-error", action="store_true", help="skip oracle error norms")
    run_p.add_argument("--no-walltime", action="store_true", help="omit wall time from summary")

    conv_p = sub.add_parser("converge", help="mesh-refinement sweep with fitted rates")
    add_run_opts(conv_p)
    conv_p.add_argument("--meshes", default=None, help="comma list of per-direction N")

    sub.add_parser("selftest", help="run the built-in property suites")
    return parser


def _apply_config_file(args, parser):
    if not args.config:
        return args
    file_vals = parse_config_file(args.config)
    alias = {"filter": "filter_mode"}
    converters = {"order": int, "cfl": float, "mesh": str, "meshes": str}
    for key, value in file_vals.items():
        dest = alias.get(key, key)
        if not hasattr(args, dest):
            raise ValueError(f"config key {key!r} does not match any option")
        if getattr(args, dest) is None or getattr(args, dest) is False:
            conv = converters.get(dest, str)
            setattr(args, dest, conv(value))
    return args


def _runconfig_from(args) -> RunConfig:
    if not args.case:
        raise ValueError("--case is required (flag or config file)")
    return RunConfig(
        case=args.case,
        order=args.order if args.order is not None else 3,
        mesh=_parse_mesh(getattr(args, "mesh", None)),
        cfl=args.cfl,
        riemann=args.riemann or "hllc",
        filter_mode=args.filter_mode or "entropy",
        compute_error=not getattr(args, "skip_error", False),
    )


def _out_dir(args, default_name) -> Path:
    out = Path(args.out) if args.out else Path("out") / default_name
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    cfg = _runconfig_from(args)
    res = run_config(cfg)
    mesh_txt = "x".join(str(n) for n in res.report.mesh)
    out = _out_dir(args, f"{cfg.case}_p{cfg.order}_{mesh_txt}")
    write_solution_csv(res.field, res.solver, out / "solution.csv")
    write_report_csv(res.report, out / "report.csv")
    write_summary_csv(res.report, out / "summary.csv", include_walltime=not args.no_walltime)
    if res.case.dim == 1 and res.case.oracle_fn is not None:
        write_reference_csv(res, out / "reference.csv")
    r = res.report
    print(f"{cfg.case}: {r.steps} steps to t={r.t_end:g}; wrote {out}")
    if r.eps_l1 == r.eps_l1:  # skip when NaN
        print(f"density error: L1={r.eps_l1:.6e} L2={r.eps_l2:.6e}")
    return 0


def cmd_converge(args) -> int:
    if not getattr(args, "meshes", None):
        raise ValueError("--meshes is required (flag or config file)")
    meshes = [int(v) for v in str(args.meshes).split(",")]
    cfg = _runconfig_from(args)
    result = convergence_study(cfg.case, cfg.order, meshes, base=cfg)
    out = _out_dir(args, f"{cfg.case}_p{cfg.order}_converge")
    write_convergence_csv(result, out / "convergence.csv")
    write_convergence_summary_csv(result, out / "convergence_summary.csv")
    print(f"{'N':>6} {'eps_l1':>14} {'eps_l2':>14}")
    for n, e1, e2 in zip(result.ns, result.eps_l1, result.eps_l2):
        print(f"{n:>6} {e1:>14.6e} {e2:>14.6e}")
    print(f"fitted rate: L1={result.rate_l1:.3f} L2={result.rate_l2:.3f}; wrote {out}")
    return 0


def cmd_selftest(_args) -> int:
    from .selfcheck import run_selftest

    return 0 if run_selftest() else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args = _apply_config_file(args, parser)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "converge":
            return cmd_converge(args)
        return cmd_selftest(args)
    except (MeanViolationError, InfeasibleAtZetaMaxError, InadmissibleStateError) as err:
        print(f"aborted on constraint violation: {err}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
