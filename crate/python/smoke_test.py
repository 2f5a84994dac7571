"""Smoke test for the `qcbp` extension module.

Build the module first (see README), then run:

    python3 python/smoke_test.py [DIR_CONTAINING_qcbp.so]
"""

import sys

if len(sys.argv) > 1:
    sys.path.insert(0, sys.argv[1])

import qcbp


def main():
    c5 = qcbp.Graph.cycle(5)
    assert c5.n == 5 and c5.edge_count == 5
    assert c5.is_independent([0, 2]) and not c5.is_independent([0, 1])

    k4 = qcbp.Graph.from_dimacs("p edge 4 6\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n")
    assert qcbp.chromatic_number(k4) == 4
    assert qcbp.spectral_bounds(k4)["combined_lb"] == 4

    s, w = qcbp.max_weight_independent_set(c5, [0.2, 0.9, 0.5, 0.4, 0.3])
    assert s == [1, 3] and abs(w - 1.3) < 1e-12

    p3 = qcbp.Graph(3, [(0, 1), (1, 2)])
    pos = qcbp.embed(p3, seed=1, ud_radius=6.5)
    report = qcbp.audit(p3, pos, ud_radius=6.5)
    assert report["is_exact_ud"], report
    counts = qcbp.sample_register(p3, pos, shots=200, seed=3, ud_radius=6.5)
    assert sum(counts.values()) == 200
    best = max(counts, key=counts.get)
    print("P3 most frequent bitstring:", best, counts[best])

    res = qcbp.solve(qcbp.Graph.petersen(), sampler="emulated_qaa", seed=5)
    assert res["chi"] == 3 and res["proven_optimal"], res
    colors = {v: k for k, cls in enumerate(res["classes"]) for v in cls}
    petersen = qcbp.Graph.petersen()
    assert all(colors[u] != colors[v] for u, v in petersen.edges())
    print("Petersen:", res["chi"], "colors,", res["shots_total"], "shots,", res["nodes_explored"], "nodes")

    try:
        qcbp.solve(c5, shots=0)
    except ValueError as e:
        print("rejected bad config:", e)
    else:
        raise AssertionError("shots=0 accepted")

    print("ok")


if __name__ == "__main__":
    main()
