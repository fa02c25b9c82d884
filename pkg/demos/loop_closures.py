"""Choosing loop closures for a long odometry chain.

A path of n poses gets candidate loop closures; 1-opt picks q of them to
maximize the algebraic connectivity of the resulting pose graph.

Run: python demos/loop_closures.py [n]
"""

import sys

from algcon import HeuristicConfig, ProblemSpec, generate_augmentation_instance, heuristic_solve


def main(n=400):
    base, cand = generate_augmentation_instance(n, n // 2, seed=1)
    q = n // 10
    spec = ProblemSpec.augmentation(base, cand, q)
    res = heuristic_solve(spec, HeuristicConfig(k=1, m=20))
    print(f"n={n} candidates={cand.m} budget={q}")
    print(f"greedy top-q   lambda2 = {res.initial_lambda2:.6g}  ({res.initial_time:.2f}s)")
    print(f"after 1-opt    lambda2 = {res.lambda2:.6g}  ({res.wall_time:.2f}s, {len(res.moves)} swaps)")
    for mv in res.moves[:5]:
        print(f"  +{mv.added} -{mv.removed}: {mv.before:.6g} -> {mv.after:.6g}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:2]))
