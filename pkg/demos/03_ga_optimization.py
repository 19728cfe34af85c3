# Binary GA search for the air-gap / E-plane-step network.
#
# Run from the repository root:  python3 demos/03_ga_optimization.py

import numpy as np

from mlamatch import GaParams, ParameterBounds, Problem, load_config, optimize
from mlamatch.ga import decode, encode
from mlamatch.sweep_io import aperture_for, sweep
from mlamatch.waveguide import PARAM_NAMES

cfg = load_config("configs/example.cfg")
model = aperture_for(cfg)  # 21 points, the slow part
baseline = np.abs(model.gamma_ap).max()
print(f"unmatched worst-case |G_ap| = {baseline:.4f}")

# chromosomes: eight genes of eight bits, lengths first
bounds = ParameterBounds.default(cfg.antenna)
chrom = encode(np.array(bounds.lower) + 0.3 * (np.array(bounds.upper) - np.array(bounds.lower)),
               bounds)
print("example chromosome:", "".join(map(str, chrom)))
print("decoded (mm):", np.round(decode(chrom, bounds, cfg.antenna).as_vector() * 1e3, 3))

problem = Problem(bounds, model, aggregator="max")


def show(rec):
    if rec.generation % 10 == 0:
        print(f"gen {rec.generation:3d}  best {rec.best:.4f}  mean {rec.mean:.4f}")


result = optimize(problem, GaParams(seed=42), progress=show)
best = result.best
print(f"stopped after {result.history[-1].generation} generations")
for name, v in zip(PARAM_NAMES, best.config.as_vector()):
    print(f"  {name} = {v * 1e3:7.3f} mm")
print(f"worst-case |G_in| = {best.aggregate:.4f}  ({best.aggregate / baseline:.2f} x baseline)")

# the band picture, matched against unmatched
matched = sweep(cfg, best.config, aperture_model=model)
for f, g0, g1 in zip(matched.freqs[::4], np.abs(model.gamma_ap)[::4], matched.mag[::4]):
    print(f"  {f / 1e9:5.2f} GHz  {20 * np.log10(g0):6.1f} dB -> {20 * np.log10(g1):6.1f} dB")

# mean aggregation trades the band edges for the middle
mean_run = optimize(Problem(bounds, model, aggregator="mean"), GaParams(seed=42))
print(f"mean-objective run: worst {mean_run.best.per_frequency.max():.4f}, "
      f"mean {mean_run.best.aggregate:.4f}")
