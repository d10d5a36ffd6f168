"""Command line entry point `stab`.

Exit codes: 0 when every metric passes, 1 when some metric fails, 2 for
usage or configuration errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..geometry import MeshError, build_icosphere, write_off
from .config import ConfigError, apply_env, defaults, describe_defaults, load_config
from .experiments import CONVERGENCE, convergence_study, run_experiment

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

GL_COMMANDS = {"solve": "gl-solve", "spectrum": "gl-spectrum", "trace": "gl-trace", "certify": "gl-certify"}
YMH_COMMANDS = {"solve": "ymh-vortex", "bogomolny": "ymh-bogomolny", "spectrum": "ymh-spectrum",
                "scan-epsilon": "ymh-scan-epsilon"}
POINT_COMMANDS = {"sphere-gl": "pointlab-sphere-gl", "sphere-ymh": "pointlab-sphere-ymh",
                  "cpn": "pointlab-cpn", "lattice": "pointlab-lattice"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser():
    p = _Parser(prog="stab", formatter_class=argparse.RawDescriptionHelpFormatter,
                description="Stability experiments for Ginzburg-Landau and abelian Higgs energies on spheres.",
                epilog="config keys and defaults:\n" + describe_defaults())
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("mesh", help="write an icosphere as OFF")
    m.add_argument("--level", type=int, required=True)
    m.add_argument("--out", required=True)

    def with_config(sp):
        sp.add_argument("--config", help="config file (defaults used when omitted)")
        sp.add_argument("--out", help="output directory (overrides output.dir/<experiment>)")

    g = sub.add_parser("gl", help="Ginzburg-Landau experiments")
    g.add_argument("action", choices=sorted(GL_COMMANDS))
    with_config(g)

    y = sub.add_parser("ymh", help="lattice abelian Higgs experiments")
    y.add_argument("action", choices=sorted(YMH_COMMANDS))
    with_config(y)

    pl = sub.add_parser("pointlab", help="pointwise identities on S^n and CP^n")
    pl.add_argument("action", choices=sorted(POINT_COMMANDS))
    pl.add_argument("--n", type=int)
    pl.add_argument("--samples", type=int)
    pl.add_argument("--seed", type=int)
    with_config(pl)

    f = sub.add_parser("fdcheck", help="finite-difference checks of gradients and Hessians")
    with_config(f)

    for name, help_ in (("fem", "FEM eigenvalue validation"), ("inner", "inner-variation oracles"),
                        ("gap", "inner/outer second-variation gap at one level")):
        e = sub.add_parser(name, help=help_)
        with_config(e)

    c = sub.add_parser("converge", help="refinement study of one experiment")
    c.add_argument("--experiment", required=True, choices=sorted(CONVERGENCE))
    c.add_argument("--levels", required=True, help="comma-separated ascending levels, e.g. 3,4,5")
    with_config(c)
    return p


def _config(args):
    if getattr(args, "config", None):
        return load_config(args.config)
    return apply_env(defaults())


def _summarize(doc, path=None):
    for name in sorted(doc.metrics):
        m = doc.metrics[name]
        print(f"{'PASS' if m['pass'] else 'FAIL'} {doc.experiment_id} {name} value={m['value']!r} "
              f"tolerance={m['tolerance']!r}")
    if path is not None:
        print(f"report: {path}")
    return EXIT_OK if doc.passed else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "mesh":
            mesh = build_icosphere(args.level)
            out = Path(args.out)
            out.parent.mkdir(parents=True, exist_ok=True)
            write_off(mesh, out)
            print(f"wrote {out} ({mesh.n_vertices} vertices, {mesh.n_faces} faces)")
            return EXIT_OK
        cfg = _config(args)
        if args.command == "pointlab":
            over = {k: v for k, v in (("pointlab.n", args.n), ("pointlab.samples", args.samples),
                                      ("pointlab.seed", args.seed)) if v is not None}
            cfg = cfg.with_values(over)
        out = Path(args.out) if args.out else None
        if args.command == "converge":
            try:
                levels = [int(s) for s in args.levels.split(",") if s.strip()]
            except ValueError:
                raise ConfigError(f"--levels must be comma-separated integers, got {args.levels!r}") from None
            doc = convergence_study(cfg, args.experiment, levels, out)
            return _summarize(doc)
        which = {"gl": GL_COMMANDS, "ymh": YMH_COMMANDS, "pointlab": POINT_COMMANDS}.get(args.command)
        if which is not None:
            experiment = which[args.action]
        else:
            experiment = {"fdcheck": "fdcheck", "fem": "fem-validate", "inner": "inner-variation",
                          "gap": "inner-outer-gap"}[args.command]
        doc = run_experiment(cfg, experiment, out)
        return _summarize(doc)
    except (ConfigError, MeshError) as exc:
        print(f"stab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"stab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
