"""
Rectangular waveguide sections and wave-amplitude transmission matrices.

Conventions
-----------
A transmission matrix ``T`` relates the waves at the input port (1) to the
waves at the output port (2), which faces the aperture::

    [b1]       [a2]
    [a1] = T . [b2]

``a`` is the wave travelling towards the network port and ``b`` the wave
leaving it.  With a load reflection ``G = a2/b2`` at port 2 the input
reflection is ``(T11 G + T12) / (T21 G + T22)``, and a chain of sections
listed from the input towards the aperture multiplies left to right.

Fields vary as ``exp(j w t - j beta z)``.  Below cutoff ``beta`` is chosen
negative-imaginary so that ``exp(-j beta z)`` decays.

All functions broadcast over numpy arrays of frequency; matrices are
returned as complex arrays of shape ``(..., 2, 2)``.
"""

from dataclasses import dataclass, replace
from functools import reduce

import numpy as np
from scipy.constants import c as C0, mu_0 as MU0

from .exceptions import (
    DegenerateModeError,
    InvalidConfigError,
    SingularJunctionError,
    SingularNetworkError,
)

# relative distance to cutoff below which a mode counts as degenerate
CUTOFF_RTOL = 1e-12


@dataclass(frozen=True)
class FrequencyPoint:
    """Frequency in Hz (scalar or 1-d array)."""

    f: object

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        if f.size == 0 or not np.all(np.isfinite(f)) or np.any(f <= 0):
            raise ValueError("frequency must be finite and > 0")
        object.__setattr__(self, "f", f if f.ndim else float(f))

    @classmethod
    def from_ghz(cls, f_ghz):
        return cls(np.asarray(f_ghz, dtype=float) * 1e9)

    @property
    def omega(self):
        return 2 * np.pi * np.asarray(self.f)

    @property
    def k0(self):
        return self.omega / C0


@dataclass(frozen=True)
class GuideSection:
    """Uniform rectangular guide piece; lengths in meters."""

    width_a: float
    height_b: float
    length_l: float = 0.0
    eps_r: float = 1.0
    tan_delta: float = 0.0

    def __post_init__(self):
        if not self.width_a > 0:
            raise InvalidConfigError(f"width_a must be > 0, got {self.width_a}")
        if not self.height_b > 0:
            raise InvalidConfigError(f"height_b must be > 0, got {self.height_b}")
        if not self.length_l >= 0:
            raise InvalidConfigError(f"length_l must be >= 0, got {self.length_l}")
        if not self.eps_r >= 1:
            raise InvalidConfigError(f"eps_r must be >= 1, got {self.eps_r}")
        if not self.tan_delta >= 0:
            raise InvalidConfigError("tan_delta must be >= 0")

    @property
    def eps_complex(self):
        return self.eps_r * (1 - 1j * self.tan_delta)

    def cutoff_frequency(self, m=1):
        """TE_m0 cutoff in Hz."""
        return m * C0 / (2 * self.width_a * np.sqrt(self.eps_r))

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class ModalParams:
    mode_m: int
    beta: object
    z_pv: object
    y_char: object


def _check_mode(m):
    if int(m) != m or m < 1 or m % 2 == 0:
        raise ValueError(f"mode index must be an odd positive integer, got {m}")


def propagation_constant(sec, fp, m=1):
    """TE_m0 propagation constant with Im(beta) <= 0."""
    _check_mode(m)
    k0 = fp.k0
    kc = m * np.pi / sec.width_a
    arg = sec.eps_complex * k0**2 - kc**2
    scale = np.maximum(np.abs(sec.eps_complex) * k0**2, kc**2)
    if np.any(np.abs(arg) <= CUTOFF_RTOL * scale):
        raise DegenerateModeError(
            f"TE{m}0 mode is exactly at cutoff ({sec.cutoff_frequency(m):.9g} Hz)"
        )
    beta = np.sqrt(np.asarray(arg, dtype=complex))
    beta = np.where(beta.imag > 0, -beta, beta)
    return beta if beta.ndim else complex(beta)


def modal_params(sec, fp, m=1):
    """
    Modal parameters of the TE_m0 mode of a section.

    The impedance is the power-voltage definition
    ``z_pv = (omega mu0 / beta) (2 b / a)``, so at fixed width and filling
    it scales with the guide height.
    """
    beta = propagation_constant(sec, fp, m)
    z_pv = (fp.omega * MU0 / beta) * (2 * sec.height_b / sec.width_a)
    return ModalParams(mode_m=int(m), beta=beta, z_pv=z_pv, y_char=1 / z_pv)


def identity(shape=()):
    t = np.zeros(tuple(shape) + (2, 2), dtype=complex)
    t[..., 0, 0] = 1
    t[..., 1, 1] = 1
    return t


def t_hw(sec, fp):
    """Uniform line of length ``sec.length_l`` in the dominant mode."""
    beta = np.asarray(propagation_constant(sec, fp, 1))
    t = np.zeros(beta.shape + (2, 2), dtype=complex)
    t[..., 0, 0] = np.exp(-1j * beta * sec.length_l)
    t[..., 1, 1] = np.exp(1j * beta * sec.length_l)
    return t


def t_interface(z_left, z_right):
    """
    Ideal impedance step from a line ``z_left`` (input side) to ``z_right``.

    Returns ``(1/tau) [[1, rho], [rho, 1]]`` with
    ``rho = (z_right - z_left)/(z_right + z_left)`` and ``tau**2 = 1 - rho**2``.
    """
    zl = np.asarray(z_left, dtype=complex)
    zr = np.asarray(z_right, dtype=complex)
    if np.any(zl == 0) or np.any(zr == 0) or not (
        np.all(np.isfinite(zl)) and np.all(np.isfinite(zr))
    ):
        raise SingularJunctionError("interface impedances must be nonzero and finite")
    s = zl + zr
    if np.any(s == 0):
        raise SingularJunctionError("z_left + z_right = 0: singular junction")
    rho = (zr - zl) / s
    tau = np.sqrt(1 - rho**2)
    t = np.empty(np.broadcast(zl, zr).shape + (2, 2), dtype=complex)
    t[..., 0, 0] = 1 / tau
    t[..., 0, 1] = rho / tau
    t[..., 1, 0] = rho / tau
    t[..., 1, 1] = 1 / tau
    return t


def t_shunt(y):
    """Shunt admittance ``y`` normalized to the line it sits on."""
    y = np.asarray(y, dtype=complex)
    t = np.empty(y.shape + (2, 2), dtype=complex)
    t[..., 0, 0] = 1 - y / 2
    t[..., 0, 1] = -y / 2
    t[..., 1, 0] = y / 2
    t[..., 1, 1] = 1 + y / 2
    return t


def step_susceptance(b_big, b_small, beta_big):
    """
    Leading quasi-static E-plane step susceptance normalized to the larger
    guide: ``(2 b / lambda_g) ln csc(pi alpha / 2)`` with ``alpha = b_small/b_big``.
    """
    alpha = b_small / b_big
    lam_g = 2 * np.pi / beta_big
    return (2 * b_big / lam_g) * np.log(1 / np.sin(np.pi * alpha / 2))


def cascade(matrices):
    """Left-to-right matrix product of a nonempty sequence."""
    matrices = list(matrices)
    if not matrices:
        raise ValueError("cascade needs at least one matrix")
    return reduce(np.matmul, matrices)


def junction(left, right, fp, step_correction=False):
    """Transmission matrix of the junction between two adjacent sections."""
    zl = modal_params(left, fp).z_pv
    zr = modal_params(right, fp).z_pv
    t = t_interface(zl, zr)
    if not step_correction or left.height_b == right.height_b:
        return t
    if left.height_b > right.height_b:
        b = step_susceptance(left.height_b, right.height_b,
                             propagation_constant(left, fp))
        return t_shunt(1j * b) @ t
    b = step_susceptance(right.height_b, left.height_b,
                         propagation_constant(right, fp))
    return t @ t_shunt(1j * b)


@dataclass(frozen=True)
class SectionLayout:
    """
    Which height and filling each of the five sections uses.

    ``heights`` entries are ``"feed"`` (antenna height) or one of
    ``"b1"``, ``"b2"``, ``"b3"``; ``air`` marks air-filled sections.
    """

    heights: tuple = ("feed", "feed", "b1", "b2", "b3")
    air: tuple = (False, True, False, False, False)

    def __post_init__(self):
        if len(self.heights) != 5 or len(self.air) != 5:
            raise InvalidConfigError("layout needs exactly five sections")
        bad = set(self.heights) - {"feed", "b1", "b2", "b3"}
        if bad:
            raise InvalidConfigError(f"unknown height source(s): {sorted(bad)}")


DEFAULT_LAYOUT = SectionLayout()

PARAM_NAMES = ("l1", "l2", "l3", "l4", "l5", "b1", "b2", "b3")


@dataclass(frozen=True)
class MatchingConfig:
    """
    Matching-network parameters in meters plus the fixed antenna guide.

    ``l`` holds the five section lengths, ``bh`` the three heights.  The
    search bounds keep heights below the feed height; this class only
    insists on a physically meaningful network.
    """

    l: tuple
    bh: tuple
    antenna: GuideSection

    def __post_init__(self):
        l = tuple(float(x) for x in self.l)
        bh = tuple(float(x) for x in self.bh)
        if len(l) != 5 or len(bh) != 3:
            raise InvalidConfigError("need five lengths and three heights")
        if any(not x >= 0 for x in l):
            raise InvalidConfigError(f"lengths must be >= 0, got {l}")
        if any(not x > 0 for x in bh):
            raise InvalidConfigError(f"heights must be > 0, got {bh}")
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "bh", bh)

    @classmethod
    def from_vector(cls, vec, antenna):
        vec = list(vec)
        return cls(l=vec[:5], bh=vec[5:], antenna=antenna)

    @classmethod
    def identity(cls, antenna):
        """All-zero lengths and feed-height sections: a transparent network."""
        b = antenna.height_b
        return cls(l=(0.0,) * 5, bh=(b, b, b), antenna=antenna)

    def as_vector(self):
        return np.array(self.l + self.bh)

    def sections(self, layout=DEFAULT_LAYOUT):
        heights = {"feed": self.antenna.height_b, "b1": self.bh[0],
                   "b2": self.bh[1], "b3": self.bh[2]}
        a = self.antenna
        return [
            GuideSection(a.width_a, heights[h], length,
                         1.0 if air else a.eps_r, 0.0 if air else a.tan_delta)
            for h, length, air in zip(layout.heights, self.l, layout.air)
        ]


def network_factors(cfg, fp, layout=DEFAULT_LAYOUT, step_correction=False):
    """The nine matrices line, junction, line, ... in cascade order."""
    secs = cfg.sections(layout)
    out = [t_hw(secs[0], fp)]
    for left, right in zip(secs, secs[1:]):
        out.append(junction(left, right, fp, step_correction))
        out.append(t_hw(right, fp))
    return out


def build_network(cfg, fp, layout=DEFAULT_LAYOUT, step_correction=False):
    """Overall transmission matrix of the matching network."""
    return cascade(network_factors(cfg, fp, layout, step_correction))


def gamma_in(t, gamma_ap):
    """Input reflection of network ``t`` terminated in ``gamma_ap``."""
    t = np.asarray(t)
    g = np.asarray(gamma_ap, dtype=complex)
    den = t[..., 1, 0] * g + t[..., 1, 1]
    if np.any(np.abs(den) < 1e-30):
        raise SingularNetworkError("T21*G + T22 vanishes")
    out = (t[..., 0, 0] * g + t[..., 0, 1]) / den
    return out if np.ndim(out) else complex(out)


def gamma_from_impedance(z, z0):
    return (z - z0) / (z + z0)


def quarter_wave_length(sec, fp):
    """Guide quarter wavelength of the dominant mode (propagating only)."""
    beta = propagation_constant(sec, fp, 1)
    return float(np.pi / (2 * np.real(beta)))
