"""Haar measure of A.GL_N(Z_p) against the residue-count oracle for diagonal A."""
import argparse
from itertools import product

from nilzeta.lattice import CosetPiece, gl_volume, haar_coset_measure, residue_count_oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--max-dim", type=int, default=2)
    ap.add_argument("--max-exp", type=int, default=2)
    ap.add_argument("--max-k", type=int, default=4)
    ap.add_argument("--max-residues", type=int, default=10**8)
    args = ap.parse_args()
    bad = 0
    for p in args.primes:
        for N in range(1, args.max_dim + 1):
            for exps in product(range(args.max_exp + 1), repeat=N):
                M = [[p ** exps[i] if i == j else 0 for j in range(N)] for i in range(N)]
                A = CosetPiece.of(M, p)
                mu = haar_coset_measure(A)
                for k in range(max(exps) + 1, args.max_k + 1):
                    if p ** (k * N * N) > args.max_residues:
                        continue
                    ok = residue_count_oracle(A, k) == mu * gl_volume(N, p, k)
                    bad += not ok
                    print(f"p={p} N={N} exps={exps} k={k} mu={mu} {'ok' if ok else 'MISMATCH'}")
    print("mismatches:", bad)


if __name__ == "__main__":
    main()
