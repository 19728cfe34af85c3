"""Independent reference computations used by the test-suite."""

import math

import numpy as np
from scipy.constants import mu_0

from mlamatch.aperture import c0, cm
from mlamatch.waveguide import GuideSection, MatchingConfig, modal_params, quarter_wave_length


def _smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(x, 0.0, 1.0)
    a = np.where(x > 0, np.exp(-1 / np.where(x > 0, x, 1)), 0.0)
    b = np.where(x < 1, np.exp(-1 / np.where(x < 1, 1 - x, 1)), 0.0)
    return a / (a + b)


def brute_force_admittance(modes, geom, fp, k_rho_max=40.0, n_grid=2000,
                           r_in=1.5, r_out=2.5, full_plane=False):
    """
    Mutual admittance matrix on the disc ``k_rho < k_rho_max k``.

    A smooth radial window ``w`` (1 inside ``r_in k``, 0 outside ``r_out k``)
    splits the integrand.  ``(1 - w) f`` has no branch point and is summed
    with a uniform ``n_grid x n_grid`` midpoint rule on the first quadrant.
    ``w f`` covers the singular circle and is integrated in polar
    coordinates with a fine tensor Gauss rule after the ``sin``/``cosh``
    substitutions.  By default only the first quadrant is sampled and the
    result multiplied by four; ``full_plane`` samples all four quadrants.
    """
    k = float(fp.k0)
    a, b = geom.width_a, geom.height_b
    big_r = k_rho_max * k
    pref = 2 / (a * b) / (float(fp.omega) * mu_0) / (4 * math.pi**2)

    def window(rho):
        return 1 - _smooth_step((rho - r_in * k) / ((r_out - r_in) * k))

    # Cartesian part
    lo = -big_r if full_plane else 0.0
    h = (big_r - lo) / n_grid
    kx = lo + (np.arange(n_grid) + 0.5) * h
    ky = kx.copy()
    KX, KY = np.meshgrid(kx, ky, indexing="ij")
    rho = np.hypot(KX, KY)
    arg = k**2 - rho**2
    kz = np.where(arg >= 0, np.sqrt(np.abs(arg)) + 0j, -1j * np.sqrt(np.abs(arg)))
    mask = (rho <= big_r) & (rho > r_in * k)
    core = np.zeros_like(kz)
    core[mask] = ((k**2 - KX[mask] ** 2) / kz[mask]) * (1 - window(rho[mask]))
    core *= (c0(ky, b) ** 2)[None, :]
    by_kx = core.sum(axis=1) * h * h

    # polar part
    def gl(lo, hi, n):
        x, w = np.polynomial.legendre.leggauss(n)
        return lo + (hi - lo) * (x + 1) / 2, (hi - lo) * w / 2

    phi, wphi = gl(0, 2 * math.pi, 1600) if full_plane else gl(0, math.pi / 2, 400)
    t, wt = gl(0, math.pi / 2, 200)
    u, wu = gl(0, math.acosh(r_out), 600)
    rv, wv = k * np.sin(t), wt * k * np.sin(t)                # visible: rho d rho / kz
    re, we = k * np.cosh(u), 1j * wu * k * np.cosh(u) * window(k * np.cosh(u))
    rr = np.concatenate([rv, re])
    ww = np.concatenate([wv + 0j, we])
    PX = rr[:, None] * np.cos(phi)[None, :]
    PY = rr[:, None] * np.sin(phi)[None, :]
    pw = ww[:, None] * wphi[None, :] * (k**2 - PX**2) * c0(PY, b) ** 2

    n = len(modes)
    y = np.zeros((n, n), dtype=complex)
    cx = [cm(kx, a, m) for m in modes]
    cp = [cm(PX, a, m) for m in modes]
    for i in range(n):
        for j in range(n):
            cart = np.sum(by_kx * cx[i] * cx[j])
            pol = np.sum(pw * cp[i] * cp[j])
            y[i, j] = (1 if full_plane else 4) * pref * (cart + pol)
    return y


def impedance_chain_reflection(z_ref, sections, z_load):
    """
    Input reflection through a chain of uniform lines by the classic
    impedance transformation ``Z1 (ZL + j Z1 tan bl)/(Z1 + j ZL tan bl)``.

    ``sections`` lists ``(z_line, beta_l)`` from the load back toward the
    input.  The result is referred to ``z_ref``.
    """
    z = z_load
    for z_line, bl in sections:
        tn = np.tan(bl)
        z = z_line * (z + 1j * z_line * tn) / (z_line + 1j * z * tn)
    return (z - z_ref) / (z + z_ref)


def quarter_wave_config(z_in, z_out, fp, a=0.017, eps=2.2):
    """Feed guide of impedance z_in, quarter-wave section of
    sqrt(z_in z_out) in l4, and a z_out guide in l5."""
    unit = modal_params(GuideSection(a, 1.0, 0, eps), fp).z_pv.real
    b_in, b_out = z_in / unit, z_out / unit
    antenna = GuideSection(a, b_in, 0.0, eps)
    b_mid = math.sqrt(b_in * b_out)
    l4 = quarter_wave_length(antenna, fp)
    return MatchingConfig((0, 0, 0, l4, 0.01), (b_in, b_mid, b_out), antenna)


def parse_touchstone_strict(text):
    """
    Minimal Touchstone v1 reader that raises on anything doubtful: a
    missing or repeated option line, data before the option line, wrong
    column count, or non-increasing frequencies.
    """
    option = None
    rows = []
    for raw in text.splitlines():
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if option is not None:
                raise ValueError("repeated option line")
            tok = line[1:].split()
            if len(tok) != 5 or tok[1].upper() != "S" or tok[3].upper() != "R":
                raise ValueError(f"bad option line {raw!r}")
            option = (tok[0].upper(), tok[2].upper(), float(tok[4]))
            continue
        if option is None:
            raise ValueError("data before option line")
        vals = [float(v) for v in line.split()]
        if len(vals) != 3:
            raise ValueError(f"bad data row {raw!r}")
        rows.append(vals)
    if option is None:
        raise ValueError("no option line")
    f = [r[0] for r in rows]
    if any(b <= a for a, b in zip(f, f[1:])):
        raise ValueError("frequencies not increasing")
    return option, rows
