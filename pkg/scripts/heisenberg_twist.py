"""Twist-isoclass counts of the Heisenberg group and their rational fit."""
import argparse
import time

from nilzeta.malcev import load_presentation
from nilzeta.subgroups import stabilized_count
from nilzeta.zeta import fit_rational


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3, 5])
    ap.add_argument("--max-n", type=int, default=4)
    args = ap.parse_args()
    pres = load_presentation("heisenberg")
    for p in args.primes:
        t = time.perf_counter()
        counts = [stabilized_count(pres, p, n, "twist").value for n in range(args.max_n + 1)]
        fit = fit_rational(counts, 1)
        expected = [1] + [(p - 1) * p ** (n - 1) for n in range(1, args.max_n + 1)]
        shown = str(fit)
        print(f"p={p} counts={counts} closed_form_ok={counts == expected} fit={shown} ({time.perf_counter() - t:.2f}s)")


if __name__ == "__main__":
    main()
