"""Check compiled graph-state programs against the circuit oracle.

Runs seeded random instances with independent and dependent Z sets through
both ancilla planes and prints one line per instance plus a summary.
"""

import argparse
import json

from mbqclab.iqp import random_iqp_instance
from mbqclab.mbqc import validate_compilation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--max-nu", type=int, default=4)
    ap.add_argument("--json", action="store_true", help="one JSON record per line")
    args = ap.parse_args()

    failures = {"zx": 0, "yz": 0}
    for seed in range(args.count):
        nu = 2 + seed % (args.max_nu - 1)
        independent = seed % 2 == 0
        k = nu if independent else min(2**nu - 1, nu + 1 + seed % 3)
        circuit = random_iqp_instance(seed, 1, nu, k, independent=independent)
        for plane in ("zx", "yz"):
            rec = validate_compilation(circuit, plane)
            failures[plane] += not rec["equivalent"]
            rec.update(seed=seed, nu=nu, gates=k)
            if args.json:
                print(json.dumps(rec))
            else:
                print(f"seed={seed:3d} nu={nu} |Z|={k} independent={rec['z_independent']!s:5} plane={plane} tvd={rec['tvd']:.3e}")
    print(f"# mismatches: zx={failures['zx']} yz={failures['yz']} over {args.count} instances")


if __name__ == "__main__":
    main()
