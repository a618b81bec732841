"""Command-line interface.

Subcommands:

    play       derive constants, build the schedule, play the full game
               against a chosen adversary, write trace + certificate
    certify    independent brute-force badness reports for a given shift
    psi        approximation-record table of a rational matrix
    resonance  lacunary resonance family built from the records
    sweep      parameter grid -> one CSV row per cell, deterministic

Exit codes: 0 success, 1 runtime/certification failure, 2 configuration
error.  All reports embed the originating config and its content hash, and
every byte of output is reproducible from the flags and the seed.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .adversaries import greedy_black, random_black, scripted
from .certify import (
    DecayTable,
    TableRangeExceeded,
    jarnik_constant,
    parse_power_spec,
    resonance_margin,
    theorem1_constant,
)
from .engine import IllegalMove, concentric
from .escape import EscapeAssertionFailed, SelectionExhausted
from .exact import rat, rat_str
from .resonance import (
    EmptySequence,
    ResonanceSequence,
    ThetaMatrix,
    best_approximations,
    best_approximations_cf,
    golden_theta,
    lacunary_normalize,
    psi_theta,
)
from .schedule import ScheduleInfeasible, derive_params
from .strategy import CertificateFailed, run_constructed_game

_RUNTIME_ERRORS = (
    ScheduleInfeasible,
    CertificateFailed,
    SelectionExhausted,
    EscapeAssertionFailed,
    IllegalMove,
    TableRangeExceeded,
    EmptySequence,
)


def _git_blob_sha1(content: bytes) -> str:
    return hashlib.sha1(b"blob %d\0" % len(content) + content).hexdigest()


def _config_block(config: dict) -> dict:
    canon = json.dumps(config, sort_keys=True).encode()
    return {"config": config, "config_hash": _git_blob_sha1(canon)}


def _out_dir(args) -> Path:
    root = args.out or os.environ.get("BADAPPROX_OUT") or "."
    p = Path(root)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load_theta(spec: str) -> ThetaMatrix:
    if spec == "golden":
        return golden_theta()
    with open(spec) as fh:
        return ThetaMatrix.from_jsonable(json.load(fh))


def _parse_eta(text: str) -> tuple[Fraction, ...]:
    return tuple(rat(part) for part in text.split(","))


def _records(theta: ThetaMatrix, tmax: int, no_cf: bool):
    if theta.cf is not None and not no_cf:
        return best_approximations_cf(theta, tmax)
    return best_approximations(theta, tmax)


def _build_sequence(args) -> ResonanceSequence:
    if getattr(args, "resonance", None):
        with open(args.resonance) as fh:
            return ResonanceSequence.from_jsonable(json.load(fh))
    theta = _load_theta(args.theta)
    records = _records(theta, args.tmax, args.no_cf)
    return lacunary_normalize(records, rat(args.lacunarity))


def _make_adversary(name: str, seq: ResonanceSequence, seed: int, script: Optional[str]):
    if name == "concentric":
        return concentric
    if name == "random":
        return random_black(seed=seed)
    if name == "greedy":
        return greedy_black(seq)
    if name == "scripted":
        if not script:
            raise ValueError("--script is required with --adversary scripted")
        with open(script) as fh:
            data = json.load(fh)
        return scripted(data["centers"], data.get("notes"))
    raise ValueError(f"unknown adversary {name!r}")


# -- play --------------------------------------------------------------------


def cmd_play(args) -> int:
    seq = _build_sequence(args)
    center = _parse_eta(args.center) if args.center else None
    black = _make_adversary(args.adversary, seq, args.seed, args.script)
    trace, cert, white, sched = run_constructed_game(
        seq,
        rat(args.alpha),
        rat(args.beta),
        rat(args.lacunarity),
        rat(args.rho0),
        args.blocks,
        black,
        center=center,
        seed=args.seed,
    )
    out = _out_dir(args)
    config = {
        "command": "play",
        "alpha": args.alpha,
        "beta": args.beta,
        "lacunarity": args.lacunarity,
        "rho0": args.rho0,
        "blocks": args.blocks,
        "center": args.center,
        "adversary": args.adversary,
        "seed": args.seed,
        "theta": getattr(args, "theta", None),
        "resonance": getattr(args, "resonance", None),
        "tmax": args.tmax,
    }
    (out / "trace.json").write_text(trace.dumps() + "\n")
    report = _config_block(config)
    report["certificate"] = cert.to_jsonable()
    report["derived"] = sched.params.to_jsonable()
    report["cuts"] = list(sched.cuts)
    _write_json(out / "certificate.json", report)
    print(f"played {len(trace.moves)} half-moves over {args.blocks} blocks")
    print(f"final center: ({', '.join(rat_str(c) for c in trace.final_ball.center)})")
    print(f"final radius: {rat_str(trace.final_ball.radius)}")
    if cert.entries:
        worst = min(e.residual_lb for e in cert.entries)
        print(f"families certified: 1..{cert.covered_through}; "
              f"worst residual lower bound {rat_str(worst)}")
    else:
        print("families certified: none (empty schedule)")
    print(f"wrote {out / 'trace.json'} and {out / 'certificate.json'}")
    return 0


# -- certify -----------------------------------------------------------------


def _parse_psi_arg(text: str):
    if text.startswith("power:"):
        return parse_power_spec(text)
    if text.startswith("table:"):
        path = text.split(":", 1)[1]
        with open(path) as fh:
            obj = json.load(fh)
        tbl = obj.get("table", obj)
        return DecayTable(tuple(tbl["sizes"]), tuple(rat(v) for v in tbl["values"]))
    raise ValueError(f"psi spec must start with 'power:' or 'table:', got {text!r}")


def cmd_certify(args) -> int:
    functional = {"theorem1": "product", "jarnik": "decay"}.get(args.functional, args.functional)
    eta = _parse_eta(args.eta)
    config = {
        "command": "certify",
        "functional": args.functional,
        "eta": args.eta,
        "N": args.N,
        "theta": getattr(args, "theta", None),
        "psi": args.psi,
        "resonance": getattr(args, "resonance", None),
        "rmax": args.rmax,
    }
    if functional == "product":
        theta = _load_theta(args.theta)
        rep = theorem1_constant(theta, eta, args.N)
    elif functional == "decay":
        if not args.psi:
            raise ValueError("--psi is required for the decay functional")
        theta = _load_theta(args.theta)
        rep = jarnik_constant(theta, eta, _parse_psi_arg(args.psi), args.N)
    elif functional == "margin":
        if not args.resonance:
            raise ValueError("--resonance is required for the margin functional")
        with open(args.resonance) as fh:
            seq = ResonanceSequence.from_jsonable(json.load(fh))
        rep = resonance_margin(seq, eta, args.rmax)
    else:
        raise ValueError(f"unknown functional {args.functional!r}")
    out = _out_dir(args)
    report = _config_block(config)
    report["report"] = rep.to_jsonable()
    _write_json(out / "report.json", report)
    print(f"{rep.functional} value: {rat_str(rep.value)}")
    print(f"argmin: {list(rep.argmin)} (limit {rep.limit})")
    for w in rep.warnings:
        print(f"warning: {w}")
    print(f"wrote {out / 'report.json'}")
    return 0


# -- psi ---------------------------------------------------------------------


def cmd_psi(args) -> int:
    theta = _load_theta(args.theta)
    records = _records(theta, args.tmax, args.no_cf)
    sizes = [max(abs(c) for c in r.vector) for r in records]
    usable = [(t, r.quality) for t, r in zip(sizes, records) if r.quality > 0]
    config = {"command": "psi", "theta": args.theta, "tmax": args.tmax, "no_cf": args.no_cf}
    report = _config_block(config)
    report["records"] = [
        {"y": list(r.vector), "t_sq": r.norm_sq, "quality": rat_str(r.quality)}
        for r in records
    ]
    report["table"] = {
        "sizes": [t for t, _ in usable],
        "values": [rat_str(q) for _, q in usable],
    }
    out = _out_dir(args)
    _write_json(out / "psi.json", report)
    print(f"{len(records)} records up to size {args.tmax}")
    for r in records:
        print(f"  y={list(r.vector)}  |y|^2={r.norm_sq}  quality={rat_str(r.quality)}")
    if args.check is not None:
        val = psi_theta(theta, args.check)
        print(f"psi({args.check}) = {rat_str(val)}")
    print(f"wrote {out / 'psi.json'}")
    return 0


# -- resonance ---------------------------------------------------------------


def cmd_resonance(args) -> int:
    theta = _load_theta(args.theta)
    records = _records(theta, args.tmax, args.no_cf)
    seq = lacunary_normalize(records, rat(args.lacunarity))
    config = {
        "command": "resonance",
        "theta": args.theta,
        "lacunarity": args.lacunarity,
        "tmax": args.tmax,
        "no_cf": args.no_cf,
    }
    report = _config_block(config)
    report["sequence"] = seq.to_jsonable()
    out = _out_dir(args)
    _write_json(out / "resonance.json", report)
    print(f"lacunary family of {len(seq)} vectors (M = {args.lacunarity}):")
    for i, e in enumerate(seq.entries, start=1):
        tag = "" if e.quality is not None else "  [padding]"
        print(f"  r={i}  u={list(e.vector)}  t^2={e.norm_sq}{tag}")
    print(f"wrote {out / 'resonance.json'}")
    return 0


# -- sweep -------------------------------------------------------------------


def cmd_sweep(args) -> int:
    seq = _build_sequence(args)
    alphas = [a.strip() for a in args.alphas.split(",")]
    betas = [b.strip() for b in args.betas.split(",")]
    adversaries = [a.strip() for a in args.adversaries.split(",")]
    seeds = [int(s) for s in args.seeds.split(",")]
    out = _out_dir(args)
    rows = []
    failures = 0
    for a in alphas:
        for b in betas:
            for adv in adversaries:
                for seed in seeds:
                    row = {
                        "alpha": a,
                        "beta": b,
                        "adversary": adv,
                        "seed": seed,
                        "blocks": args.blocks,
                        "status": "",
                        "final_radius": "",
                        "min_residual_lb": "",
                        "families": "",
                    }
                    try:
                        black = _make_adversary(adv, seq, seed, None)
                        trace, cert, _, _ = run_constructed_game(
                            seq, rat(a), rat(b), rat(args.lacunarity),
                            rat(args.rho0), args.blocks, black, seed=seed,
                        )
                        row["status"] = "certified"
                        row["final_radius"] = rat_str(trace.final_ball.radius)
                        if cert.entries:
                            row["min_residual_lb"] = rat_str(
                                min(e.residual_lb for e in cert.entries)
                            )
                        row["families"] = cert.covered_through
                    except _RUNTIME_ERRORS as exc:
                        row["status"] = f"failed: {type(exc).__name__}"
                        failures += 1
                    rows.append(row)
    path = out / "sweep.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"{len(rows)} runs, {failures} failures -> {path}")
    return 1 if failures else 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="badapprox",
        description="exact nested-ball games constructing badly approximable shifts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output directory (or $BADAPPROX_OUT)")
        p.add_argument("--seed", type=int, default=0)

    def theta_source(p, with_resonance=True):
        p.add_argument("--theta", default="golden",
                       help="'golden' or a path to a theta JSON file")
        p.add_argument("--tmax", type=int, default=1000,
                       help="record-enumeration size bound")
        p.add_argument("--no-cf", action="store_true",
                       help="force enumeration even when a continued fraction is available")
        if with_resonance:
            p.add_argument("--resonance", default=None,
                           help="pre-built resonance-family JSON (overrides --theta)")

    p = sub.add_parser("play", help="run the constructing game end to end")
    common(p)
    theta_source(p)
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--lacunarity", "-M", default="3")
    p.add_argument("--rho0", default="1/2")
    p.add_argument("--center", default=None, help="initial center, e.g. '0,1/2'")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--adversary", default="greedy",
                   choices=["concentric", "random", "greedy", "scripted"])
    p.add_argument("--script", default=None, help="centers JSON for the scripted adversary")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("certify", help="independent badness report for a shift")
    common(p)
    p.add_argument("--theta", default="golden")
    p.add_argument("--eta", required=True, help="shift, e.g. '3/5,1/7'")
    p.add_argument("--N", type=int, required=True, help="enumeration size bound")
    p.add_argument("--functional", default="product",
                   choices=["product", "decay", "margin", "theorem1", "jarnik"])
    p.add_argument("--psi", default=None,
                   help="'power:c=1,sigma=1' or 'table:psi.json' (decay functional)")
    p.add_argument("--resonance", default=None, help="family JSON (margin functional)")
    p.add_argument("--rmax", type=int, default=None, help="family cutoff (margin functional)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("psi", help="approximation-record table of theta")
    common(p)
    theta_source(p, with_resonance=False)
    p.add_argument("--check", type=int, default=None,
                   help="also print the exact minimum at this size")
    p.set_defaults(func=cmd_psi)

    p = sub.add_parser("resonance", help="lacunary resonance family from records")
    common(p)
    theta_source(p, with_resonance=False)
    p.add_argument("--lacunarity", "-M", default="3")
    p.set_defaults(func=cmd_resonance)

    p = sub.add_parser("sweep", help="grid of runs -> CSV")
    common(p)
    theta_source(p)
    p.add_argument("--alphas", required=True, help="comma list, e.g. '1/4,1/3'")
    p.add_argument("--betas", required=True)
    p.add_argument("--adversaries", default="greedy")
    p.add_argument("--seeds", default="0")
    p.add_argument("--lacunarity", "-M", default="3")
    p.add_argument("--rho0", default="1/2")
    p.add_argument("--blocks", type=int, required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError, json.JSONDecodeError, ZeroDivisionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
