#!/usr/bin/env python3
"""Run the flagship construction end to end and leave auditable artifacts.

Chain: continued-fraction records of the Fibonacci-convergent target
-> lacunary resonance family -> derived strategy constants -> full game
against the greedy adversary -> certificate -> independent brute-force
badness report for the constructed shift.  Writes trace.json,
certificate.json, margin.json and badness.json into --out and prints the
narrative values.  Exit 1 if any stage fails to certify.

Usage:
    python3 scripts/run_golden_thread.py [--out golden_artifacts]
        [--blocks 2] [--limit 1000] [--seed 0] [--adversary greedy|random]
"""
import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from badapprox.adversaries import GreedyBlack, RandomBlack
from badapprox.certify import resonance_margin, theorem1_constant
from badapprox.exact import rat_str
from badapprox.resonance import best_approximations_cf, golden_theta, lacunary_normalize
from badapprox.strategy import CertificateFailed, run_constructed_game


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="golden_artifacts")
    ap.add_argument("--blocks", type=int, default=2)
    ap.add_argument("--limit", type=int, default=1000,
                    help="size bound for the brute-force badness report")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--adversary", default="greedy", choices=["greedy", "random"])
    args = ap.parse_args(argv)

    theta = golden_theta()
    print(f"target: scalar theta = {rat_str(theta.rows[0][0])}")

    records = best_approximations_cf(theta, 1000)
    print(f"records: {len(records)} best approximations up to size 1000")

    seq = lacunary_normalize(records, Fraction(3))
    print(f"family:  sizes^2 = {[seq.norm_sq_of(r) for r in range(1, len(seq) + 1)]}")

    black = GreedyBlack(seq) if args.adversary == "greedy" else RandomBlack(seed=args.seed)
    try:
        trace, cert, white, sched = run_constructed_game(
            seq, Fraction(1, 4), Fraction(1, 2), 3, Fraction(1, 2),
            args.blocks, black, seed=args.seed,
        )
    except CertificateFailed as exc:
        print(f"certification failed: {exc}")
        return 1
    p = sched.params
    print(f"derived: gamma={rat_str(p.gamma)} t={p.escape_rounds} "
          f"omega_lb={rat_str(p.cap_measure_lb)} k={p.plane_budget} "
          f"tau={p.avoidance_rounds} epsilon={rat_str(p.margin)}")
    print(f"blocks:  cuts={list(sched.cuts)} over {args.blocks} blocks "
          f"({len(trace.moves)} half-moves)")

    eta = trace.final_ball.center
    print(f"shift:   eta in ball of radius {rat_str(trace.final_ball.radius)} "
          f"around ({', '.join(rat_str(c) for c in eta)})")
    for e in cert.entries:
        print(f"         r={e.r} u={list(e.normal)} a={e.offset} "
              f"block={e.block} residual_lb={rat_str(e.residual_lb)}")

    margin = resonance_margin(seq, eta, r_max=cert.covered_through)
    ok_margin = margin.value > p.margin
    print(f"margin:  min ||u.eta|| = {rat_str(margin.value)} at r={margin.argmin[0]} "
          f"({'>' if ok_margin else '<='} epsilon)")

    badness = theorem1_constant(theta, eta, args.limit)
    ok_badness = badness.value > 0
    print(f"badness: product functional min = {rat_str(badness.value)} "
          f"at x={list(badness.argmin)} (N={args.limit})")
    for w in badness.warnings:
        print(f"warning: {w}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trace.json").write_text(trace.dumps() + "\n")
    for name, blob in (
        ("certificate.json", cert.to_jsonable()),
        ("margin.json", margin.to_jsonable()),
        ("badness.json", badness.to_jsonable()),
    ):
        (out / name).write_text(json.dumps(blob, indent=2, sort_keys=True) + "\n")
    print(f"wrote 4 artifacts to {out}/")

    return 0 if (ok_margin and ok_badness) else 1


if __name__ == "__main__":
    sys.exit(main())
