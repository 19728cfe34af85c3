# The open end of the antenna guide as a load: spectral admittance, modes,
# and the unmatched reflection over the band.
#
# Run from the repository root:  python3 demos/02_aperture_admittance.py

import time

import numpy as np

from mlamatch import FrequencyPoint, GuideSection, QuadratureSpec
from mlamatch.aperture import (
    admittance_matrix,
    aperture_admittance,
    aperture_reflection,
    build_aperture_model,
)

antenna = GuideSection(0.017, 0.011, 0.0, 2.2)
f0 = FrequencyPoint.from_ghz(9.75)
print(f"TE10 cutoff of the filled guide: {antenna.cutoff_frequency() / 1e9:.3f} GHz")

# mutual admittances between the odd modes, in siemens
y = admittance_matrix((1, 3, 5), antenna, f0)
np.set_printoptions(precision=5, linewidth=110)
print("Y_ij =\n", y)

# single mode vs the default three modes vs one more
for modes in [(1,), (1, 3), (1, 3, 5), (1, 3, 5, 7)]:
    t0 = time.perf_counter()
    y_ap = aperture_admittance(antenna, f0, modes)
    dt = time.perf_counter() - t0
    print(f"modes {str(modes):13s} y_ap = {y_ap:.5f}   |G_ap| = "
          f"{abs(aperture_reflection(y_ap)):.4f}   ({dt:.2f} s)")

# a coarser rule for comparison; the adaptive loop doubles nodes on its own
coarse = QuadratureSpec(nodes_visible=8, nodes_evanescent=48, nodes_azimuth=32)
print("coarse rule y_ap:", aperture_admittance(antenna, f0, q=coarse))

# unmatched baseline over the band; this is what the GA has to beat
model = build_aperture_model(antenna, np.linspace(9.25e9, 10.25e9, 11))
for f, yy, g in zip(model.freqs, model.y_ap, model.gamma_ap):
    print(f"  {f / 1e9:5.2f} GHz  y_ap = {yy:.4f}  |G_ap| = {abs(g):.4f}")
print("worst |G_ap| in band:", np.abs(model.gamma_ap).max())

# a wide aperture looks more like free space
big = GuideSection(0.2, 0.12)
print("0.2 m x 0.12 m air guide at 10 GHz: y_ap =",
      aperture_admittance(big, FrequencyPoint(1e10), (1,)))
