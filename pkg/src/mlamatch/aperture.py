"""
Aperture admittance of a flanged, dielectric-filled rectangular waveguide.

The aperture field is expanded in the symmetric TE_m0 modes
``cos(m pi x / a)`` (m odd).  Half-space mutual admittances

    Y_ij = 2/(a b) * 1/(w mu0) * 1/(4 pi^2)
           * Int Int (k^2 - kx^2)/kz * C0(ky)^2 * Ci(kx) * Cj(kx) dkx dky

are computed by quadrature in polar spectral coordinates.  The visible disc
``k_rho < k`` uses ``k_rho = k sin t`` and the first stretch of the
evanescent region uses ``k_rho = k cosh u``; both substitutions cancel the
inverse square-root branch point of ``1/kz`` on the circle ``k_rho = k``.
The remaining tail, out to ``k_rho_max * k``, is integrated on a
logarithmic radial grid.  The integrand is even in ``kx`` and ``ky``, so
only the first quadrant is sampled.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import mu_0 as MU0

from .exceptions import (
    ApertureDomainError,
    DegenerateResonanceError,
    MlaMatchError,
    PoleError,
    QuadratureError,
)
from .waveguide import FrequencyPoint, GuideSection, modal_params

DEFAULT_MODES = (1, 3, 5)

# dimensionless guard band around removable singularities
GUARD = 1e-6

_PANEL = 16
_GL16 = np.polynomial.legendre.leggauss(_PANEL)


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Node counts of the polar spectral rule.

    nodes_visible
        Gauss nodes in each of the two variables of the visible disc, also
        used radially on ``k < k_rho < 2k``.
    nodes_evanescent
        Radial nodes per decade of ``k_rho`` on the tail ``[2k, k_rho_max k]``.
    nodes_azimuth
        Azimuthal nodes over the quarter plane in the evanescent region.
    k_rho_max
        Truncation radius as a multiple of the free-space wavenumber.
    rel_tol
        Target relative change between two node doublings.
    max_doublings
        Doubling ceiling before giving up.
    """

    nodes_visible: int = 16
    nodes_evanescent: int = 96
    nodes_azimuth: int = 64
    k_rho_max: float = 40.0
    rel_tol: float = 1e-3
    max_doublings: int = 3

    def __post_init__(self):
        for name in ("nodes_visible", "nodes_evanescent", "nodes_azimuth"):
            if getattr(self, name) < 8:
                raise ValueError(f"{name} must be >= 8")
        if self.k_rho_max < 5:
            raise ValueError("k_rho_max must be >= 5")
        if not 0 < self.rel_tol <= 0.1:
            raise ValueError("rel_tol must lie in (0, 0.1]")
        if self.max_doublings < 1:
            raise ValueError("max_doublings must be >= 1")

    def doubled(self):
        return replace(
            self,
            nodes_visible=2 * self.nodes_visible,
            nodes_evanescent=2 * self.nodes_evanescent,
            nodes_azimuth=2 * self.nodes_azimuth,
        )


def mode_set(modes=DEFAULT_MODES):
    """Validate a mode list: strictly increasing odd integers starting at 1."""
    modes = tuple(int(m) for m in modes)
    if not modes or modes[0] != 1:
        raise ValueError("mode set must start with 1")
    if any(m % 2 == 0 for m in modes):
        raise ValueError("mode set must contain odd modes only")
    if any(b <= a for a, b in zip(modes, modes[1:])):
        raise ValueError("mode set must be strictly increasing")
    return modes


def c0(ky, b):
    """Fourier transform of the uniform height profile: ``b sinc(ky b / 2)``."""
    return b * np.sinc(np.asarray(ky) * b / (2 * np.pi))


def cm(kx, a, m):
    """
    Fourier transform of ``cos(m pi x / a)`` over ``|x| < a/2``.

    The factor ``j**(m-1)`` is real for odd ``m``; at ``|kx a| = m pi`` the
    removable singularity takes its limit ``a/2``.
    """
    x = np.asarray(kx, dtype=float) * a
    mp = m * np.pi
    sign = (-1.0) ** ((m - 1) // 2)
    near = np.abs(np.abs(x) - mp) < GUARD
    den = np.where(near, 1.0, mp**2 - x**2)
    val = 2 * mp * a * sign * np.cos(x / 2) / den
    out = np.where(near, a / 2, val)
    return out if out.ndim else float(out)


def spectral_kz(kx, ky, k):
    """``sqrt(k^2 - kx^2 - ky^2)`` on the branch with ``Im(kz) <= 0``."""
    arg = k**2 - np.asarray(kx) ** 2 - np.asarray(ky) ** 2
    return np.where(arg >= 0, np.sqrt(np.abs(arg)), -1j * np.sqrt(np.abs(arg)))


def _gauss(lo, hi, n):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1), half * w


def _composite(lo, hi, n):
    """Composite 16-point Gauss rule with at least ``n`` nodes."""
    panels = max(1, -(-n // _PANEL))
    edges = np.linspace(lo, hi, panels + 1)
    x, w = _GL16
    half = 0.5 * np.diff(edges)
    nodes = (edges[:-1, None] + half[:, None] * (x + 1)).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def polar_rule(k, q):
    """
    Nodes and weights for ``Int Int g(kx, ky) / kz`` over the first quadrant.

    Returns ``kx, ky, w`` with complex ``w`` already containing ``1/kz`` and
    the polar Jacobian, so the integral is ``sum(w * g(kx, ky))``.
    """
    nv = q.nodes_visible
    phi_v, wphi_v = _gauss(0.0, np.pi / 2, nv)
    phi_e, wphi_e = _composite(0.0, np.pi / 2, q.nodes_azimuth)

    # visible disc, k_rho = k sin t
    t, wt = _gauss(0.0, np.pi / 2, nv)
    rho_v = k * np.sin(t)
    w_v = (wt * k * np.sin(t))[:, None] * wphi_v[None, :]

    # k < k_rho < 2k, k_rho = k cosh u
    u, wu = _gauss(0.0, np.arccosh(2.0), nv)
    rho_n = k * np.cosh(u)
    w_n = (1j * wu * k * np.cosh(u))[:, None] * wphi_e[None, :]

    # tail 2k < k_rho < k_rho_max k, k_rho = exp(s)
    s_lo, s_hi = np.log(2 * k), np.log(q.k_rho_max * k)
    n_tail = int(np.ceil(q.nodes_evanescent * (s_hi - s_lo) / np.log(10)))
    s, ws = _composite(s_lo, s_hi, n_tail)
    rho_t = np.exp(s)
    kz_t = -1j * np.sqrt(rho_t**2 - k**2)
    w_t = (ws * rho_t**2 / kz_t)[:, None] * wphi_e[None, :]

    parts = [(rho_v, phi_v, w_v), (rho_n, phi_e, w_n), (rho_t, phi_e, w_t)]
    kx = np.concatenate([(r[:, None] * np.cos(p)[None, :]).ravel() for r, p, _ in parts])
    ky = np.concatenate([(r[:, None] * np.sin(p)[None, :]).ravel() for r, p, _ in parts])
    w = np.concatenate([np.asarray(ww, dtype=complex).ravel() for _, _, ww in parts])
    return kx, ky, w


def admittance_prefactor(geom, fp):
    return 2 / (geom.width_a * geom.height_b) / (fp.omega * MU0) / (4 * np.pi**2)


def _matrix_once(modes, geom, fp, q):
    k = float(fp.k0)
    kx, ky, w = polar_rule(k, q)
    wf = 4 * w * (k**2 - kx**2) * c0(ky, geom.height_b) ** 2
    cs = [cm(kx, geom.width_a, m) for m in modes]
    pref = admittance_prefactor(geom, fp)
    n = len(modes)
    y = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            y[i, j] = y[j, i] = pref * np.sum(wf * cs[i] * cs[j])
    return y


def admittance_matrix(modes, geom, fp, q=QuadratureSpec()):
    """
    Half-space mutual admittances for all pairs of ``modes``.

    Node counts are doubled until two successive estimates agree to
    ``q.rel_tol`` (max-entry norm); the finer estimate is returned.
    """
    prev = _matrix_once(modes, geom, fp, q)
    for _ in range(q.max_doublings):
        q = q.doubled()
        cur = _matrix_once(modes, geom, fp, q)
        change = np.max(np.abs(cur - prev)) / np.max(np.abs(cur))
        if change <= q.rel_tol:
            return cur
        prev = cur
    raise QuadratureError(
        f"mutual admittance not converged at {float(fp.f):.6g} Hz "
        f"(relative change {change:.3g} > {q.rel_tol:g})",
        estimates=(prev, cur),
    )


def mutual_admittance(i, j, geom, fp, q=QuadratureSpec()):
    """Half-space mutual admittance ``Y_ij`` (siemens, modal normalization)."""
    modes = tuple(sorted({int(i), int(j)}))
    for m in modes:
        if m < 1 or m % 2 == 0:
            raise ValueError(f"mode index must be odd and positive, got {m}")
    y = admittance_matrix(modes, geom, fp, q)
    return complex(y[modes.index(i), modes.index(j)])


def guide_admittance(geom, fp, m):
    """TE_m0 wave admittance ``beta_m / (w mu0)`` of the antenna guide."""
    mp = modal_params(geom, fp, m)
    return mp.y_char * (2 * geom.height_b / geom.width_a)


def mode_coupling_dm(y_m1, y_mm, y_m0):
    den = y_mm + y_m0
    if den == 0:
        raise DegenerateResonanceError("Y_mm + Y_m0 vanishes")
    return -y_m1 / den


def _check_above_cutoff(geom, fp):
    fc = geom.cutoff_frequency(1)
    if np.any(np.asarray(fp.f) <= fc):
        raise ApertureDomainError(
            f"frequency {fp.f} Hz is not above the TE10 cutoff {fc:.6g} Hz"
        )


def aperture_admittance(geom, fp, modes=DEFAULT_MODES, q=QuadratureSpec()):
    """
    Normalized aperture admittance seen by the TE10 mode.

    Higher modes enter through the stationary form
    ``Y11 + 2 sum D_m Y_m1 + sum D_m^2 (Y_mm + Y_m0)``, all divided by Y10,
    with ``D_m = -Y_m1 / (Y_mm + Y_m0)``.
    """
    modes = mode_set(modes)
    _check_above_cutoff(geom, fp)
    y = admittance_matrix(modes, geom, fp, q)
    y10 = guide_admittance(geom, fp, 1)
    out = y[0, 0] / y10
    cross = []
    quad = []
    for idx, m in enumerate(modes[1:], start=1):
        y_m1, y_mm = y[idx, 0], y[idx, idx]
        y_m0 = guide_admittance(geom, fp, m)
        d = mode_coupling_dm(y_m1, y_mm, y_m0)
        cross.append(d * y_m1 / y10)
        quad.append(d**2 * (y_mm / y10 + y_m0 / y10))
    if cross:
        out = out + 2 * sum(cross) + sum(quad)
    return complex(out)


def aperture_reflection(y_ap):
    """``(1 - y)/(1 + y)``."""
    y = np.asarray(y_ap, dtype=complex)
    if np.any(y == -1):
        raise PoleError("aperture admittance of -1 has no finite reflection")
    g = (1 - y) / (1 + y)
    return g if g.ndim else complex(g)


def admittance_from_reflection(gamma):
    g = np.asarray(gamma, dtype=complex)
    y = (1 - g) / (1 + g)
    return y if y.ndim else complex(y)


@dataclass(frozen=True)
class ApertureModel:
    """Tabulated aperture admittance and reflection on a frequency grid."""

    geometry: GuideSection
    freqs: np.ndarray
    y_ap: np.ndarray
    gamma_ap: np.ndarray
    modes: tuple = DEFAULT_MODES
    quad: QuadratureSpec = QuadratureSpec()

    def __len__(self):
        return len(self.freqs)

    @property
    def frequency_point(self):
        return FrequencyPoint(self.freqs)

    @classmethod
    def constant(cls, geometry, freqs, gamma):
        """Synthetic model with a frequency-independent reflection."""
        freqs = np.asarray(freqs, dtype=float)
        g = np.full(freqs.shape, gamma, dtype=complex)
        return cls(geometry, freqs, admittance_from_reflection(g), g,
                   modes=(), quad=QuadratureSpec())


def _as_hz(grid):
    if isinstance(grid, FrequencyPoint):
        return np.atleast_1d(np.asarray(grid.f, dtype=float))
    return np.array([g.f if isinstance(g, FrequencyPoint) else g for g in grid],
                    dtype=float)


def build_aperture_model(geom, grid, modes=DEFAULT_MODES, q=QuadratureSpec(),
                         workers=1):
    """
    Tabulate ``y_ap`` and ``gamma_ap`` over ``grid`` (Hz values or
    FrequencyPoints).  Grid points are independent and may run on
    ``workers`` threads; the table keeps grid order.
    """
    modes = mode_set(modes)
    freqs = _as_hz(grid)
    if freqs.size == 0:
        raise ValueError("empty frequency grid")
    _check_above_cutoff(geom, FrequencyPoint(freqs))

    def one(f):
        try:
            return aperture_admittance(geom, FrequencyPoint(f), modes, q)
        except MlaMatchError as exc:
            raise type(exc)(f"at {f:.9g} Hz: {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            y = np.array(list(pool.map(one, freqs)))
    else:
        y = np.array([one(f) for f in freqs])
    return ApertureModel(geom, freqs, y, aperture_reflection(y), modes, q)
