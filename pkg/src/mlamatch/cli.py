"""Command line front end: ``mlamatch {aperture,sweep,optimize,export}``."""

import argparse
import logging
import sys

import numpy as np

from . import sweep_io
from .exceptions import MlaMatchError
from .ga import Problem, optimize
from .waveguide import PARAM_NAMES, MatchingConfig

log = logging.getLogger("mlamatch")


def _out(args, cfg, key, default):
    return args.out or cfg.outputs.get(key, default)


def _matching_from_arg(text, antenna):
    vals = [float(x) for x in text.split(",")]
    if len(vals) != len(PARAM_NAMES):
        raise ValueError(f"--matching needs {len(PARAM_NAMES)} values "
                         "(l1..l5,b1..b3 in mm)")
    return MatchingConfig.from_vector([v / 1e3 for v in vals], antenna)


def _summary(label, result):
    return (f"{label}: {len(result)} points, "
            f"max |G| = {np.max(result.mag):.6f}, mean |G| = {np.mean(result.mag):.6f}")


def cmd_aperture(args):
    cfg = sweep_io.load_config(args.config)
    res = sweep_io.sweep(cfg, "none")
    path = _out(args, cfg, "aperture_csv", "aperture.csv")
    sweep_io.write_csv(res, path)
    print(_summary("aperture", res))
    print(f"wrote {path}")
    return 0


def cmd_sweep(args):
    cfg = sweep_io.load_config(args.config)
    if args.matching:
        matching = _matching_from_arg(args.matching, cfg.antenna)
    elif cfg.matching is not None:
        matching = cfg.matching
    else:
        raise ValueError("sweep needs --matching or matching.l_mm/matching.b_mm "
                         "in the config")
    res = sweep_io.sweep(cfg, matching)
    path = _out(args, cfg, "sweep_csv", "sweep.csv")
    sweep_io.write_csv(res, path)
    print(_summary("sweep", res))
    print(f"wrote {path}")
    return 0


def cmd_optimize(args):
    cfg = sweep_io.load_config(args.config)
    ga = cfg.ga
    if args.seed is not None:
        ga = ga.with_(seed=args.seed)
    if args.generations is not None:
        ga = ga.with_(generations_max=args.generations)
    workers = args.workers or cfg.workers

    model = sweep_io.aperture_for(cfg)
    problem = Problem(cfg.bounds, model, cfg.aggregator, gray=cfg.gray,
                      step_correction=cfg.step_correction)
    progress = (lambda rec: log.info(sweep_io.progress_line(rec))) if args.verbose else None
    result = optimize(problem, ga, workers=workers, progress=progress)

    best = result.best
    baseline = float(np.max(np.abs(model.gamma_ap)))
    print(f"seed {result.seed}, generations {result.history[-1].generation}")
    for name, value in zip(PARAM_NAMES, best.config.as_vector()):
        print(f"  {name} = {value * 1e3:.6f} mm")
    print(f"minimax |G_in| = {np.max(best.per_frequency):.6f}")
    print(f"minimax |G_ap| = {baseline:.6f} (unmatched)")

    res = sweep_io.sweep(cfg, best.config, aperture_model=model)
    path = _out(args, cfg, "sweep_csv", "optimized.csv")
    hist = args.history or cfg.outputs.get("history_csv", "history.csv")
    sweep_io.write_csv(res, path)
    sweep_io.write_history(result.history, hist)
    print(f"wrote {path}")
    print(f"wrote {hist}")
    return 0


def cmd_export(args):
    res = sweep_io.read_csv(args.csv)
    comments = []
    if args.z_ref is not None:
        z_ref = args.z_ref
        comments.append(f"reference impedance {z_ref!r} ohm (user supplied)")
    elif args.config:
        cfg = sweep_io.load_config(args.config)
        if cfg.z_ref is not None:
            z_ref = cfg.z_ref
            comments.append(f"reference impedance {z_ref!r} ohm (config)")
        else:
            z_ref = sweep_io.feed_impedance(cfg)
            comments.append(
                f"reference impedance {z_ref!r} ohm: TE10 power-voltage impedance "
                f"of the feed guide at {cfg.center / 1e9!r} GHz")
    else:
        raise ValueError("export needs --z-ref or --config to fix the reference impedance")
    sweep_io.write_touchstone(res, args.out, z_ref, comments)
    print(f"wrote {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="mlamatch",
        description="Aperture reflection and GA matching of a dielectric-filled "
                    "open-ended waveguide antenna.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("aperture", help="sweep of the unmatched aperture reflection")
    a.add_argument("--config", required=True)
    a.add_argument("--out", help="CSV output path")
    a.set_defaults(func=cmd_aperture)

    s = sub.add_parser("sweep", help="input reflection of an explicit network")
    s.add_argument("--config", required=True)
    s.add_argument("--matching", help="l1,l2,l3,l4,l5,b1,b2,b3 in mm")
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("optimize", help="GA run followed by a sweep of the winner")
    o.add_argument("--config", required=True)
    o.add_argument("--seed", type=int)
    o.add_argument("--generations", type=int)
    o.add_argument("--workers", type=int)
    o.add_argument("--out", help="CSV output path for the optimized sweep")
    o.add_argument("--history", help="CSV output path for the GA history")
    o.set_defaults(func=cmd_optimize)

    e = sub.add_parser("export", help="convert a sweep CSV to Touchstone .s1p")
    e.add_argument("--csv", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--z-ref", type=float, dest="z_ref")
    e.add_argument("--config")
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (MlaMatchError, ValueError, OSError) as exc:
        print(f"mlamatch {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
