"""Repeated seeded period-finding trials on the dephased final state."""

import argparse

from mbqclab.shor import ShorInstance, run_shor_pipeline, shor_zero_discord


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modulus", type=int, default=15)
    ap.add_argument("--bases", type=int, nargs="*", help="default: every valid base")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--max-samples", type=int, default=20)
    args = ap.parse_args()

    M = args.modulus
    bases = args.bases or [a for a in range(2, M) if _valid(M, a)]
    for a in bases:
        inst = ShorInstance(M, a)
        zd = shor_zero_discord(inst)
        reports = [run_shor_pipeline(inst, seed, args.max_samples, zd) for seed in range(args.trials)]
        wins = sum(r.success for r in reports)
        used = [len(r.samples) for r in reports if r.success]
        mean = sum(used) / len(used) if used else float("nan")
        factors = next((r.factors for r in reports if r.success), None)
        print(f"M={M} a={a:3d} success={wins}/{args.trials} mean samples={mean:.2f} factors={factors}")


def _valid(M, a):
    try:
        ShorInstance(M, a)
    except ValueError:
        return False
    return True


if __name__ == "__main__":
    main()
