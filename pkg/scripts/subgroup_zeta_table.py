"""Stabilized counts for every shipped presentation, prime and variant, with fits."""
import argparse
import json
import time

from nilzeta.malcev import load_presentation, shipped_presentations
from nilzeta.subgroups import stabilized_count
from nilzeta.zeta import fit_rational, growth_bound_check

VARIANTS = ["all", "normal", "conjugacy", "quotient-iso", "twist"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--max-deg", type=int, default=2)
    ap.add_argument("--presentations", nargs="+", default=None)
    ap.add_argument("--variants", nargs="+", default=VARIANTS)
    ap.add_argument("--json", default=None, help="also dump rows here")
    args = ap.parse_args()
    rows = []
    for name in args.presentations or shipped_presentations():
        pres = load_presentation(name)
        for p in args.primes:
            for v in args.variants:
                t = time.perf_counter()
                counts = [stabilized_count(pres, p, n, v).value for n in range(args.max_n + 1)]
                fit = fit_rational(counts, args.max_deg)
                K, c = growth_bound_check(counts)
                row = dict(presentation=name, p=p, variant=v, counts=counts,
                           fit=getattr(fit, "reason", None) or str(fit),
                           growth_c=str(c), seconds=round(time.perf_counter() - t, 2))
                rows.append(row)
                print(f"{name:14s} p={p} {v:13s} {counts}  {row['fit']}  ({row['seconds']}s)", flush=True)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
