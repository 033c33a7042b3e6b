"""Build weighted snapshots, turn them into complexes, count holes.

Run:  python demos/01_snapshots_and_filtrations.py
"""

import numpy as np

from zigzagst import (
    FiltrationMode,
    Snapshot,
    betti_numbers,
    build_complex,
    rbf_censored_weights,
    reduce_top_edges,
    union_graph,
)

# A snapshot is a sparse symmetric weight map over a fixed node universe.
square = Snapshot.from_edges(
    index=1,
    universe_size=6,
    edges=[(0, 1, 0.2), (1, 2, 0.2), (2, 3, 0.2), (0, 3, 0.2), (4, 5, 0.9)],
)
print("snapshot edges:", square.edges())
print("weight(1, 0) = weight(0, 1):", square.weight(1, 0))

# Sublevel clique filtration at scale 0.5 keeps only the light edges and
# clique-expands; the heavy (4,5) edge stays out.
cx = build_complex(square, nu_star=0.5, mode=FiltrationMode.WEIGHT_SUBLEVEL_CLIQUE)
print("\ncomplex: vertices", len(cx.vertices), "edges", len(cx.edges), "triangles", len(cx.triangles))
print("components b0 =", betti_numbers(cx, 0), " independent cycles b1 =", betti_numbers(cx, 1))

# The same snapshot under a Vietoris-Rips scale connects nodes by shortest
# weighted path; at 0.4 the diagonal of the square appears (0.2 + 0.2).
vr = build_complex(square, nu_star=0.4, mode=FiltrationMode.VIETORIS_RIPS)
print("\nVietoris-Rips at 0.4 fills the square:", betti_numbers(vr, 1) == 0)

# Sensor-style weights: a Gaussian kernel on feature distance, censored
# above the scale so that near-identical sensors are *not* linked.
features = np.array([[0.0], [0.1], [2.0], [2.05], [9.0]])
sensor = rbf_censored_weights(features, edges=None, gamma=1.0, nu_star=0.5)
censored = [e for e in [(0, 1), (2, 3)] if sensor.weight(*e) == 0.0]
print("\nnear-identical pairs censored away:", censored)
print("surviving kernel edges:", [(e, round(w, 4)) for e, w in sorted(sensor.weights.items()) if w > 1e-4])

# Transaction-style reduction: keep only the M heaviest edges.
busy = Snapshot.from_edges(1, 6, [(u, v, float(u + v)) for u in range(6) for v in range(u + 1, 6)])
print("\ntop-3 active edges:", reduce_top_edges(busy, 3).edges())

# Unions take the minimum of shared weights, the choice that preserves
# every sublevel inclusion; that is what the zigzag construction rests on.
g2 = Snapshot.from_edges(2, 6, [(0, 1, 0.05), (3, 4, 0.3)])
u = union_graph(square, g2)
print("\nunion weight of (0,1): min(0.2, 0.05) =", u.weight(0, 1))
