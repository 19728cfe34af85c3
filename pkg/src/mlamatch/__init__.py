"""Matching-network design for miniature dielectric-filled waveguide antennas.

Aperture admittance by spectral quadrature, transmission-matrix cascades of
air-gap and E-plane-step sections, and a binary genetic algorithm that
minimizes the worst-case input reflection over a band.
"""

from .aperture import (
    ApertureModel,
    QuadratureSpec,
    aperture_admittance,
    aperture_reflection,
    build_aperture_model,
    mutual_admittance,
)
from .ga import GaParams, ParameterBounds, Problem, decode, encode, fitness, optimize
from .sweep_io import RunConfig, load_config, sweep, write_csv, write_touchstone
from .waveguide import (
    FrequencyPoint,
    GuideSection,
    MatchingConfig,
    build_network,
    cascade,
    gamma_in,
    modal_params,
    t_hw,
    t_interface,
)

__version__ = "0.1.0"

__all__ = [
    "ApertureModel", "QuadratureSpec", "aperture_admittance", "aperture_reflection",
    "build_aperture_model", "mutual_admittance",
    "GaParams", "ParameterBounds", "Problem", "decode", "encode", "fitness", "optimize",
    "RunConfig", "load_config", "sweep", "write_csv", "write_touchstone",
    "FrequencyPoint", "GuideSection", "MatchingConfig", "build_network", "cascade",
    "gamma_in", "modal_params", "t_hw", "t_interface",
]
