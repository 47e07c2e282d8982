"""Command-line entry point: verification suites, trajectory simulation,
closure-relation probes.

Exit codes: 0 pass, 1 verification failure, 2 usage/config error,
3 runtime divergence.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, fields

import numpy as np

from . import dynamics as dyn
from . import models as mdl
from .errors import (AdmissibilityError, ConfigError, CycloGaudinError,
                     DivergenceError)
from .gaudin import FlowId
from .suites import MODELS, SUITES, RunConfig, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cyclogaudin",
                                 description="cyclotomic Gaudin hierarchy "
                                 "verification and simulation")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--model", choices=MODELS)
        p.add_argument("--T", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--beta", type=float)
        p.add_argument("--zeta1", type=str,
                       help="complex pole location, e.g. '0.9' or '0.7+0.4j'")
        p.add_argument("--depth", type=int)
        p.add_argument("--h", type=float)
        p.add_argument("--output", help="output file (default stdout)")

    pv = sub.add_parser("verify", help="run a named verification suite")
    pv.add_argument("--suite", choices=SUITES, default="all")
    common(pv)

    ps = sub.add_parser("simulate", help="integrate a multi-time schedule")
    ps.add_argument("--schedule", required=True,
                    help="comma-separated p:r:duration triples")
    common(ps)

    pc = sub.add_parser("closure", help="closure-relation residual for a flow pair")
    pc.add_argument("--flow-a", default="1:0", help="p:r")
    pc.add_argument("--flow-b", default="1:1", help="p:r")
    common(pc)
    return ap


def _load_config(args) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        for key, val in raw.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = val
    for key in ("model", "T", "seed", "beta", "depth", "h"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if getattr(args, "zeta1", None) is not None:
        values["zeta1"] = args.zeta1
    if "zeta1" in values:
        try:
            values["zeta1"] = complex(str(values["zeta1"]).replace(" ", ""))
        except ValueError:
            raise ConfigError(f"cannot parse zeta1 {values['zeta1']!r}")
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc))
    if not isinstance(cfg.T, int) or isinstance(cfg.T, bool):
        raise ConfigError("T must be an integer")
    return cfg


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return "%.16e" % x


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    rep = run_suite(args.suite, cfg)
    _emit(json.dumps(rep.to_dict(), indent=1) + "\n", args.output)
    return EXIT_PASS if rep.ok else EXIT_FAIL


def _seeded_initial(cfg: RunConfig):
    rng = np.random.default_rng(np.random.SeedSequence(int(cfg.seed)).spawn(1)[0])
    if cfg.model == "toda":
        return mdl.random_toda(cfg.T, rng)
    if cfg.model == "dst":
        return mdl.random_dst(cfg.T, rng, zeta1=cfg.zeta1)
    return mdl.random_coupled(cfg.T, rng, beta=cfg.beta, zeta1=cfg.zeta1)


def _coord_header(state) -> list:
    T = state.T
    cols = []
    if isinstance(state, mdl.TodaState):
        cols += [f"q{i}" for i in range(1, T + 1)]
        cols += [f"p{i}" for i in range(1, T + 1)]
    else:
        if isinstance(state, mdl.CoupledState):
            for blk in ("q", "p"):
                for i in range(1, T + 1):
                    cols += [f"{blk}_re{i}", f"{blk}_im{i}"]
        for blk in ("x", "X"):
            for i in range(1, T + 1):
                cols += [f"{blk}_re{i}", f"{blk}_im{i}"]
    return cols


def _coord_cells(state, vec) -> list:
    if isinstance(state, mdl.TodaState):
        return [_fmt(float(v.real)) for v in vec]
    out = []
    for v in vec:
        out += [_fmt(float(np.real(v))), _fmt(float(np.imag(v)))]
    return out


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    cfg.validate()
    sched = dyn.Schedule.parse(args.schedule, cfg.h)
    s0 = _seeded_initial(cfg)
    for seg in sched.segments:
        mdl._check_flow(s0, seg.flow)
    ham_flows = mdl.admissible_flows(s0, cfg.depth)
    header = ["sample", "seg", "flow_p", "flow_r", "t_local"]
    header += _coord_header(s0)
    for f in ham_flows:
        if isinstance(s0, mdl.TodaState):
            header.append(f"H_{f.p}_{f.r}")
        else:
            header += [f"H_{f.p}_{f.r}_re", f"H_{f.p}_{f.r}_im"]
    header.append("drift_max")
    lines = [",".join(header)]
    diverged = False
    try:
        traj = dyn.integrate(s0, sched)
    except DivergenceError as exc:
        traj = exc.last_good
        diverged = True
        if traj is None:
            _emit("\n".join(lines) + "\n# diverged\n", args.output)
            return EXIT_DIVERGED
    base = None
    for idx, sample in enumerate(traj.samples):
        st = mdl.unpack(s0, sample.vec)
        seg = sample.seg
        f_seg = sched.segments[seg].flow
        row = [str(idx), str(seg), str(f_seg.p), str(f_seg.r),
               _fmt(sample.t_local)]
        row += _coord_cells(st, sample.vec)
        hvals = [complex(mdl.hamiltonian_value(st, f, max(cfg.depth, 3)))
                 for f in ham_flows]
        if base is None:
            base = hvals
        drift = max(abs(h - h0) / (1 + abs(h0)) for h, h0 in zip(hvals, base))
        for h in hvals:
            if isinstance(s0, mdl.TodaState):
                row.append(_fmt(h.real))
            else:
                row += [_fmt(h.real), _fmt(h.imag)]
        row.append(_fmt(drift))
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if diverged:
        text += "# diverged\n"
    _emit(text, args.output)
    return EXIT_DIVERGED if diverged else EXIT_PASS


def _parse_flow(text: str) -> FlowId:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"flow spec {text!r} must be p:r")
    try:
        return FlowId(int(parts[0]), int(parts[1]))
    except (ValueError, CycloGaudinError) as exc:
        raise ConfigError(f"bad flow spec {text!r}: {exc}")


def cmd_closure(args) -> int:
    cfg = _load_config(args)
    cfg.validate()
    fA, fB = _parse_flow(args.flow_a), _parse_flow(args.flow_b)
    s0 = _seeded_initial(cfg)
    for f in (fA, fB):
        mdl._check_flow(s0, f)
    r1 = dyn.closure_residual(s0, fA, fB, h=cfg.h, delta=dyn.CLOSURE_DELTA)
    r2 = dyn.closure_residual(s0, fA, fB, h=cfg.h / 2,
                              delta=dyn.CLOSURE_DELTA / 2)
    ratio = r1 / r2 if r2 > 0 else float("inf")
    out = {"model": cfg.model, "seed": int(cfg.seed),
           "config_digest": cfg.digest(),
           "flow_a": str(fA), "flow_b": str(fB),
           "residual": r1, "residual_refined": r2, "ratio": ratio,
           "h": cfg.h, "delta": dyn.CLOSURE_DELTA}
    _emit(json.dumps(out, indent=1) + "\n", args.output)
    return EXIT_PASS


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_closure(args)
    except (ConfigError, AdmissibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except CycloGaudinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
