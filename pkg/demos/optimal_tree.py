"""Best spanning tree for algebraic connectivity on a small complete graph.

Compares the greedy k-opt heuristic, the exact outer-approximation solver
(with and without safe Cheeger cuts) and Pruefer enumeration.

Run: python demos/optimal_tree.py [n] [seed]
"""

import sys

from algcon import (HeuristicConfig, ProblemSpec, brute_force_optimum, generate_instance,
                    heuristic_solve, solve_oa)


def main(n=7, seed=0):
    G = generate_instance(n, 1.0, seed)
    spec = ProblemSpec.spanning_tree(G)

    h = heuristic_solve(spec, HeuristicConfig(k=2, m=10))
    print(f"initial tree     lambda2 = {h.initial_lambda2:.6f}")
    print(f"2-opt heuristic  lambda2 = {h.lambda2:.6f}  ({len(h.moves)} moves)")

    for mode in ("off", "safe"):
        res = solve_oa(spec.replace(cheeger_mode=mode))
        print(f"OA cheeger={mode:<5}  lambda2 = {res.lb:.6f}  status={res.status} "
              f"iterations={res.iterations} eig_cuts={res.eig_cuts} "
              f"cheeger_cuts={res.cheeger_cuts} time={res.wall_time:.1f}s")

    x, best = brute_force_optimum(spec)
    print(f"enumeration      lambda2 = {best:.6f}")
    print("optimal tree edges:", spec.selected_pairs(x))


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
