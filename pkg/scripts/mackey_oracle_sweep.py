"""Mackey irreducibility/equality tests against cyclotomic inner products."""
import argparse
import time

from nilzeta.characters import mackey_oracle_report
from nilzeta.malcev import MalcevPresentation, build_quotient, load_presentation, shipped_presentations


def relator_heisenberg(p, k):
    data = load_presentation("heisenberg").to_dict()
    data["name"] = f"heisenberg_rel{p}"
    data["relators"] = [[p, 0, 0], [0, 0, p]]
    return build_quotient(MalcevPresentation.from_dict(data), p, k)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--max-log-order", type=int, default=4, help="only quotients with |G| <= p^this")
    args = ap.parse_args()
    for p in args.primes:
        limit = p**args.max_log_order
        cases = []
        for name in shipped_presentations():
            pres = load_presentation(name)
            k = 1
            while (Q := build_quotient(pres, p, k)).order <= limit:
                cases.append((f"{name} k={k}", Q))
                k += 1
        cases.append(("heisenberg/relators k=2", relator_heisenberg(p, 2)))
        for label, Q in cases:
            t = time.perf_counter()
            rep = mackey_oracle_report(Q)
            print(f"p={p} {label:24s} |G|={Q.order:4d} pairs={rep['pairs']:5d} "
                  f"tests={rep['equality_tests']:6d} disagreements={rep['disagreements']} "
                  f"({time.perf_counter() - t:.2f}s)", flush=True)


if __name__ == "__main__":
    main()
