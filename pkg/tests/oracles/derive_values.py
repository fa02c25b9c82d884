"""Independent derivation of the reference values frozen into the test-suite.

Uses only sympy (exact arithmetic) and itertools; nothing from ``algcon`` is
imported. Run ``python tests/oracles/derive_values.py`` to reprint them.
"""

import itertools

import sympy as sp


def lap(n, edges):
    L = sp.zeros(n, n)
    for i, j, w in edges:
        w = sp.nsimplify(w)
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    return L


def lambda2(n, edges):
    ev = sorted(lap(n, edges).eigenvals(multiple=True), key=lambda e: float(e))
    return sp.nsimplify(sp.simplify(ev[1]))


def cheeger(n, edges):
    best = None
    for size in range(1, n // 2 + 1):
        for S in itertools.combinations(range(n), size):
            cut = sum(sp.nsimplify(w) for i, j, w in edges if (i in S) != (j in S))
            key = (cut / size, size, S)
            if best is None or key < best:
                best = key
    return best


def spanning_trees(n, edges):
    for T in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(u):
            while parent[u] != u:
                u = parent[u]
            return u
        ok = True
        for i, j, _ in T:
            a, b = find(i), find(j)
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            yield T


def main():
    P3 = [(0, 1, 1), (1, 2, 1)]
    L = lap(3, P3)
    print("P3 eigen:", L.eigenvects())
    J = sp.ones(3, 3) / 3
    M = L - 1 * (sp.eye(3) - J)
    print("L(P3) - (I - J/3) eigenvalues:", M.eigenvals())
    K2 = lap(2, [(0, 1, 3)])
    W = K2 - 6 * (sp.eye(2) - sp.ones(2, 2) / 2)
    print("K2 lifted gamma=6 eigenvalues:", W.eigenvals())

    P4 = [(0, 1, 1), (1, 2, 1), (2, 3, 1)]
    print("P4 cheeger:", cheeger(4, P4))
    K4 = [(i, j, 1) for i, j in itertools.combinations(range(4), 2)]
    print("K4 cheeger:", cheeger(4, K4))

    K3 = [(0, 1, 3), (0, 2, 2), (1, 2, 1)]
    print("K3 (3,2,1) full lambda2:", lambda2(3, K3), float(lambda2(3, K3)))
    for T in spanning_trees(3, K3):
        print("  tree", [e[:2] for e in T], "lambda2 =", lambda2(3, list(T)))

    v = sp.Matrix([1, -1, 0]) / sp.sqrt(2)
    coeffs = [sp.simplify(w * (v[i] - v[j]) ** 2) for i, j, w in [(0, 1, 'w01'), (0, 2, 'w02'), (1, 2, 'w12')] for w in [1]]
    print("eig cut coefficients / w for v=(1,-1,0)/sqrt2:", coeffs,
          "gamma coef:", -(v.dot(v) - sum(v) ** 2 / 3))

    vals = {}
    for T in spanning_trees(4, K4):
        vals.setdefault(lambda2(4, list(T)), []).append([e[:2] for e in T])
    for k, trees in sorted(vals.items(), key=lambda kv: float(kv[0])):
        print("K4 trees with lambda2", k, "count", len(trees))

    # ranking score on P3 for candidate (0, 2): w (v0 - v2)^2 with v = (1, 0, -1)/sqrt2
    fv = sp.Matrix([1, 0, -1]) / sp.sqrt(2)
    print("P3 score of (0,2):", (fv[0] - fv[2]) ** 2)

    print("K3 row sums:", [sum(w for i, j, w in K3 if k in (i, j)) for k in range(3)])
    star = [(0, j, 1) for j in range(1, 5)]
    print("K5 star lambda2:", lambda2(5, star))
    path4 = [(0, 1, 1), (1, 2, 1), (2, 3, 1)]
    print("P4 path lambda2:", lambda2(4, path4), "star:", lambda2(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)]))
    print("round(0.4 * 190) =", round(sp.Rational(2, 5) * 190))


if __name__ == "__main__":
    main()
