"""
Single-antenna receivers and the high-SNR picture
=================================================

Three transmit antennas, two single-antenna users and a three-antenna
eavesdropper.  Each user gets one beam from a generalized eigenvalue
problem, so the region is a sweep over the power share alone.
"""

import numpy as np

from wiretapbc import MisomeChannel, misome_highsnr, misome_rates, misome_region

rng = np.random.default_rng(3)
h1 = np.array([1.2, 0.3, -0.4])
h2 = np.array([-0.2, 1.0, 0.6])
H3 = 0.4 * rng.standard_normal((3, 3))
ch = MisomeChannel((h1, h2), H3, P=10.0)

hull = misome_region(ch)
print("region vertices at P = 10:")
for v in hull.as_array():
    print(f"  ({v[0]:.4f}, {v[1]:.4f})")

# The rectangles use only the power-free pencils (h h', H3'H3).
rect = misome_highsnr(ch)
print(f"\nhigh-SNR corners: order 12 {np.round(rect.corner_12, 4)}, order 21 {np.round(rect.corner_21, 4)}")

# Raising P: the first-encoded user climbs to its corner.  The second one
# is squeezed by the first user's beam at the eavesdropper.
print("\n      P   R1(12)  R2(12)  R1(21)  R2(21)")
for P in np.logspace(0, 6, 7):
    a = misome_rates(ch.with_power(P), 0.5, (1, 2))
    b = misome_rates(ch.with_power(P), 0.5, (2, 1))
    print(f"{P:8.0e} {a.R1:7.4f} {a.R2:7.4f} {b.R1:7.4f} {b.R2:7.4f}")
