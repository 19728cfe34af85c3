# Result files: CSV sweeps, Touchstone .s1p, and the GA history log,
# driven through the command line front end.
#
# Run from the repository root:  python3 demos/04_touchstone_export.py

import os
import tempfile

from mlamatch.cli import main
from mlamatch.sweep_io import read_csv, read_touchstone

out = tempfile.mkdtemp(prefix="mlamatch_")
cfg = "configs/example.cfg"
base = os.path.join(out, "base.csv")
opt = os.path.join(out, "optimized.csv")
hist = os.path.join(out, "history.csv")
s1p = os.path.join(out, "optimized.s1p")

main(["aperture", "--config", cfg, "--out", base])
main(["optimize", "--config", cfg, "--seed", "42", "--out", opt, "--history", hist])
main(["export", "--csv", opt, "--out", s1p, "--config", cfg])

print("\n--- head of", s1p)
with open(s1p) as fh:
    for line in fh.readlines()[:5]:
        print(line.rstrip())

res, z_ref = read_touchstone(s1p)
print(f"\n{len(res)} points, reference impedance {z_ref:.2f} ohm")

# the CSV keeps full double precision so a reload is exact
again = read_csv(opt)
print("CSV reload exact:", bool((again.gamma == res.gamma).all()))

print("\n--- last lines of", hist)
with open(hist) as fh:
    lines = fh.readlines()
print(lines[0].rstrip())
for line in lines[-3:]:
    print(line.rstrip())
