# Transmission matrices of waveguide pieces and how they chain together.
#
# Run from the repository root:  python3 demos/01_cascade_algebra.py

import numpy as np

from mlamatch import FrequencyPoint, GuideSection, MatchingConfig, build_network, gamma_in
from mlamatch.waveguide import modal_params, quarter_wave_length, t_hw, t_interface

fp = FrequencyPoint.from_ghz(9.75)
feed = GuideSection(0.017, 0.011, 0.0, 2.2)  # a = 17 mm, b = 11 mm, PTFE-like fill

# dominant-mode numbers of the feed guide
mp = modal_params(feed, fp)
print("beta  =", mp.beta, "rad/m")
print("Z_pv  =", mp.z_pv, "ohm")

# the air-filled guide of the same size is much closer to cutoff
air = feed.with_(eps_r=1.0)
print("air beta =", modal_params(air, fp).beta)

# a line only rotates the reflection phase
g = 0.5 + 0.2j
line = t_hw(feed.with_(length_l=0.004), fp)
print("|G| before/after 4 mm of line:", abs(g), abs(gamma_in(line, g)))

# an impedance step reflects, stepping back cancels it
step = t_interface(mp.z_pv, 2 * mp.z_pv)
print("step 1:2 reflection:", gamma_in(step, 0.0))  # 1/3
print("step and its inverse:\n", np.round(step @ t_interface(2 * mp.z_pv, mp.z_pv), 14))

# every lossless piece we build has det T = 1
print("det =", np.linalg.det(step @ line))

# the full five-section network: zero lengths and feed-height steps are transparent
ident = MatchingConfig.identity(feed)
print("identity network:\n", np.round(build_network(ident, fp), 14))

# quarter-wave transformer from the 11 mm feed into a 3 mm guide, placed in section 4
b_out = 0.003
lq = quarter_wave_length(feed, fp)
cfg = MatchingConfig((0, 0, 0, lq, 0.005), (0.011, np.sqrt(0.011 * b_out), b_out), feed)
print(f"quarter wave = {lq * 1e3:.3f} mm, b2 = {cfg.bh[1] * 1e3:.3f} mm")
print("|G_in| into a matched 3 mm guide:", abs(gamma_in(build_network(cfg, fp), 0.0)))

# ... and how it detunes over a band
band = FrequencyPoint(np.linspace(8.5e9, 11e9, 6))
for f, g in zip(band.f, gamma_in(build_network(cfg, band), 0.0)):
    print(f"  {f / 1e9:5.2f} GHz  |G| = {abs(g):.4f}")
