"""Command-line entry point: ``tgkriging <subcommand> [--config PATH] ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import pipeline
from .config import RunConfig

log = logging.getLogger("tgkriging")


def _summary(**fields):
    print("summary " + json.dumps(fields, sort_keys=True, default=float), file=sys.stderr)


def cmd_gen_design(cfg, args):
    design = pipeline.run_gen_design(cfg)
    return {"n": design.n, "r": design.r, "file": str(cfg.path("design"))}


def cmd_simulate(cfg, args):
    design, z = pipeline.run_simulate(cfg)
    return {"n": design.n, "file": str(cfg.path("observations"))}


def cmd_preprocess(cfg, args):
    design, _ = pipeline.run_preprocess(cfg)
    return {"n": design.n, "file": str(cfg.path("observations"))}


def cmd_fit_alpha(cfg, args):
    profile, alpha_hat = pipeline.run_fit(cfg)
    return {"alpha_hat": alpha_hat, "alpha_map": profile.argmax_map(),
            "file": str(cfg.path("alpha_profile"))}


def cmd_sample_theta(cfg, args):
    alpha = cfg.alpha if cfg.alpha is not None else pipeline.fitted_alpha(cfg)
    draws = pipeline.run_sample_theta(cfg, alpha)
    return {"alpha": alpha, "m": draws.m,
            "acceptance_rates": [float(x) for x in draws.acceptance_rates]}


def cmd_predict(cfg, args):
    pts, *_ = pipeline.run_predict(cfg)
    return {"points": len(pts), "file": str(cfg.path("predictions"))}


def cmd_pod(cfg, args):
    out = pipeline.run_pod(cfg)
    files = [str(cfg.path("pod_curve"))]
    if "integrated" in out:
        files.append(str(cfg.path("pod_curve_integrated")))
    return {"files": files, "n_mc": cfg.n_mc}


COMMANDS = {
    "gen-design": (cmd_gen_design, "write a maximin Latin hypercube design.csv"),
    "simulate": (cmd_simulate, "simulate observations.csv from the synthetic truth"),
    "preprocess": (cmd_preprocess, "convert physical-unit observations to the unit cube"),
    "fit-alpha": (cmd_fit_alpha, "scan the alpha grid: alpha_profile.csv and theta draws"),
    "sample-theta": (cmd_sample_theta, "sample theta for one alpha"),
    "predict": (cmd_predict, "predict at the points file: predictions.csv"),
    "pod": (cmd_pod, "Monte Carlo POD curves: pod_curve.csv"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="tgkriging", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--threads", type=int, help="worker processes (0 = one per CPU)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--alpha", type=float, help="transformation parameter to use")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    cfg = RunConfig.load(args.config, seed=args.seed, threads=args.threads, out=args.out,
                         alpha=args.alpha)
    func, _ = COMMANDS[args.command]
    start = time.time()
    try:
        fields = func(cfg, args)
    except Exception as exc:  # noqa: BLE001 - reported on the summary line
        log.error("%s failed: %s", args.command, exc)
        _summary(command=args.command, status="error", error=str(exc))
        return 1
    _summary(command=args.command, status="ok", seconds=round(time.time() - start, 3), **fields)
    return 0


if __name__ == "__main__":
    sys.exit(main())
