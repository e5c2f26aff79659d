"""
General channels through their aligned form
===========================================

A channel with invertible square gains is equivalent to an aligned one
with noises ``H^-1 N H^-T``.  The aligned form is usually not degraded, so
both encoding orders matter and the region is the hull of two sweeps.
"""

import numpy as np

from wiretapbc import (
    ChannelInstance,
    InputConstraint,
    SearchBudget,
    aligned_from_general,
    classify,
    convex_closure,
    sdpc_rates,
    trace_boundary,
)

rng = np.random.default_rng(5)
H1, H2 = np.eye(2) + 0.3 * rng.standard_normal((2, 2)), np.diag([0.6, 1.4])
H3 = 0.5 * np.eye(2)
ch = ChannelInstance.two_user(H1, H2, H3, np.eye(2), np.eye(2), np.eye(2), InputConstraint.covariance(np.eye(2)))
al = aligned_from_general(ch)
print("classes:", classify(ch).tag, "->", classify(al).tag)

pts = trace_boundary(al, [1.0, 1.5, 2.5, 5.0, 10.0, 100.0], SearchBudget(restarts=16))
for perm in ((1, 2), (2, 1)):
    best = [p for p in pts if p.provenance["permutation"] == perm]
    print(f"order {perm}: " + ", ".join(f"({p.rates.R1:.3f}, {p.rates.R2:.3f})" for p in best))

# Rates are the same on both forms of the channel.
split = pts.points[0].provenance["split"]
print("rates on the original channel:", np.round(sdpc_rates((1, 2), split, ch), 6))
print("rates on the aligned channel: ", np.round(sdpc_rates((1, 2), split, al), 6))

print("hull:", np.round(convex_closure(pts).as_array(), 4).tolist())
