"""
Run configuration, frequency sweeps and result files.

Configuration files are flat ``key = value`` text, ``#`` starts a comment.
Lengths are given in millimeters and frequencies in gigahertz; everything
is converted to SI in :func:`parse_config` and nowhere else.

Recognised keys (``*`` = mandatory)::

    antenna.a_mm*  antenna.b_mm*  antenna.eps_r*  antenna.tan_delta
    band.start_ghz band.stop_ghz  | band.center_ghz band.span_ghz
    band.n_points
    aperture.modes                      comma list of odd modes, e.g. 1,3,5
    quad.nodes_visible quad.nodes_evanescent quad.nodes_azimuth
    quad.k_rho_max quad.rel_tol quad.max_doublings
    bounds.length_mm bounds.height_mm   "lo,hi" applied to all l / all b
    bounds.l1_mm .. bounds.b3_mm        per-parameter override "lo,hi"
    ga.population ga.generations ga.crossover_rate ga.mutation_rate
    ga.elite_count ga.tournament_size ga.seed ga.stagnation_window
    ga.gray ga.workers
    objective.aggregator                max | mean
    network.step_correction             true | false
    matching.l_mm matching.b_mm         explicit network for `sweep`
    output.sweep_csv output.aperture_csv output.history_csv output.touchstone
    touchstone.z_ref_ohm
"""

import csv
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .aperture import DEFAULT_MODES, QuadratureSpec, build_aperture_model, mode_set
from .exceptions import ConfigError, FormatError, MlaMatchError
from .ga import GaParams, ParameterBounds
from .waveguide import (
    PARAM_NAMES,
    FrequencyPoint,
    GuideSection,
    MatchingConfig,
    build_network,
    gamma_in,
    modal_params,
)

CONFIG_DIR_ENV = "MLAMATCH_CONFIG_DIR"
DB_FLOOR = -200.0
CSV_HEADER = ["freq_hz", "re", "im", "mag", "mag_db"]
HISTORY_HEADER = ["generation", "best", "mean"] + [f"{n}_mm" for n in PARAM_NAMES]

# (to SI, from SI) for the boundary units
_MM = (lambda v: v / 1e3, lambda x: x * 1e3)
_GHZ = (lambda v: v * 1e9, lambda x: x / 1e9)


@dataclass(frozen=True)
class RunConfig:
    antenna: GuideSection
    f_start: float
    f_stop: float
    n_points: int = 21
    modes: tuple = DEFAULT_MODES
    quad: QuadratureSpec = QuadratureSpec()
    bounds: ParameterBounds = None
    ga: GaParams = GaParams()
    aggregator: str = "max"
    gray: bool = False
    workers: int = 1
    step_correction: bool = False
    matching: MatchingConfig = None
    outputs: dict = field(default_factory=dict, hash=False)
    z_ref: float = None

    @property
    def freqs(self):
        return np.linspace(self.f_start, self.f_stop, self.n_points)

    @property
    def center(self):
        return 0.5 * (self.f_start + self.f_stop)

    def with_(self, **changes):
        return replace(self, **changes)


# -- unit conversion ---------------------------------------------------------

def _to_si(text, unit):
    return unit[0](float(text))


def _from_si(x, unit):
    """Shortest decimal string that converts back to exactly ``x``."""
    to_si, from_si = unit
    y = from_si(x)
    for _ in range(8):
        s = repr(float(y))
        got = to_si(float(s))
        if got == x:
            return s
        y = np.nextafter(y, np.inf if got < x else -np.inf)
    return repr(from_si(x))


# -- parsing -------------------------------------------------------------------

def read_pairs(text):
    pairs = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}", f"expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in pairs:
            raise ConfigError(key, "given more than once")
        pairs[key] = value
    return pairs


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}

_KNOWN = {
    "antenna.a_mm", "antenna.b_mm", "antenna.eps_r", "antenna.tan_delta",
    "band.start_ghz", "band.stop_ghz", "band.center_ghz", "band.span_ghz",
    "band.n_points", "aperture.modes",
    "quad.nodes_visible", "quad.nodes_evanescent", "quad.nodes_azimuth",
    "quad.k_rho_max", "quad.rel_tol", "quad.max_doublings",
    "bounds.length_mm", "bounds.height_mm",
    *(f"bounds.{n}_mm" for n in PARAM_NAMES),
    "ga.population", "ga.generations", "ga.crossover_rate", "ga.mutation_rate",
    "ga.elite_count", "ga.tournament_size", "ga.seed", "ga.stagnation_window",
    "ga.gray", "ga.workers", "objective.aggregator", "network.step_correction",
    "matching.l_mm", "matching.b_mm",
    "output.sweep_csv", "output.aperture_csv", "output.history_csv",
    "output.touchstone", "touchstone.z_ref_ohm",
}

_GA_KEYS = {
    "ga.population": ("population_m", int),
    "ga.generations": ("generations_max", int),
    "ga.crossover_rate": ("crossover_rate", float),
    "ga.mutation_rate": ("mutation_rate", float),
    "ga.elite_count": ("elite_count", int),
    "ga.tournament_size": ("tournament_size", int),
    "ga.seed": ("seed", int),
    "ga.stagnation_window": ("stagnation_window", int),
}

_QUAD_KEYS = {
    "quad.nodes_visible": ("nodes_visible", int),
    "quad.nodes_evanescent": ("nodes_evanescent", int),
    "quad.nodes_azimuth": ("nodes_azimuth", int),
    "quad.k_rho_max": ("k_rho_max", float),
    "quad.rel_tol": ("rel_tol", float),
    "quad.max_doublings": ("max_doublings", int),
}


class _Reader:
    def __init__(self, pairs):
        self.pairs = pairs

    def get(self, key, conv, default=None, required=False):
        if key not in self.pairs:
            if required:
                raise ConfigError(key, "mandatory key is missing")
            return default
        try:
            return conv(self.pairs[key])
        except (ValueError, KeyError) as exc:
            raise ConfigError(key, f"cannot parse {self.pairs[key]!r}: {exc}") from None

    def floats(self, key, n, default=None):
        def conv(text):
            vals = [float(s) for s in text.split(",")]
            if len(vals) != n:
                raise ValueError(f"expected {n} comma-separated numbers")
            return vals
        return self.get(key, conv, default)


def _bool(text):
    return _BOOL[text.strip().lower()]


def _check_writable(key, path):
    parent = os.path.dirname(os.path.abspath(path))
    while not os.path.exists(parent):
        up = os.path.dirname(parent)
        if up == parent:
            break
        parent = up
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise ConfigError(key, f"path {path!r} is not writable")


def parse_config(text):
    """Validate ``key = value`` text into a RunConfig."""
    pairs = read_pairs(text)
    unknown = sorted(set(pairs) - _KNOWN)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    r = _Reader(pairs)

    mm = lambda s: _to_si(s, _MM)  # noqa: E731
    ghz = lambda s: _to_si(s, _GHZ)  # noqa: E731

    a = r.get("antenna.a_mm", mm, required=True)
    b = r.get("antenna.b_mm", mm, required=True)
    eps = r.get("antenna.eps_r", float, required=True)
    tand = r.get("antenna.tan_delta", float, 0.0)
    if not a > 0:
        raise ConfigError("antenna.a_mm", "must be > 0")
    if not b > 0:
        raise ConfigError("antenna.b_mm", "must be > 0")
    if not eps >= 1:
        raise ConfigError("antenna.eps_r", "must be >= 1")
    if not tand >= 0:
        raise ConfigError("antenna.tan_delta", "must be >= 0")
    antenna = GuideSection(a, b, 0.0, eps, tand)

    if "band.start_ghz" in pairs or "band.stop_ghz" in pairs:
        if "band.center_ghz" in pairs or "band.span_ghz" in pairs:
            raise ConfigError("band", "give either start/stop or center/span, not both")
        f_start = r.get("band.start_ghz", ghz, required=True)
        f_stop = r.get("band.stop_ghz", ghz, required=True)
    else:
        fc = r.get("band.center_ghz", ghz, required=True)
        span = r.get("band.span_ghz", ghz, required=True)
        f_start, f_stop = fc - span / 2, fc + span / 2
    if not f_start < f_stop:
        raise ConfigError("band", "start frequency must be below stop frequency")
    n_points = r.get("band.n_points", int, 21)
    if n_points < 2:
        raise ConfigError("band.n_points", "must be >= 2")
    fc10 = antenna.cutoff_frequency(1)
    if not f_start > fc10:
        raise ConfigError(
            "band", f"start {f_start:.6g} Hz is not above the TE10 cutoff {fc10:.6g} Hz"
        )

    try:
        modes = mode_set(r.get("aperture.modes",
                               lambda s: [int(x) for x in s.split(",")],
                               list(DEFAULT_MODES)))
    except ValueError as exc:
        raise ConfigError("aperture.modes", str(exc)) from None

    quad_kw = {name: r.get(key, conv) for key, (name, conv) in _QUAD_KEYS.items()
               if key in pairs}
    try:
        quad = QuadratureSpec(**quad_kw)
    except ValueError as exc:
        raise ConfigError("quad", str(exc)) from None

    lo, hi = list(ParameterBounds.default(antenna).lower), list(
        ParameterBounds.default(antenna).upper)
    lb = r.floats("bounds.length_mm", 2)
    hb = r.floats("bounds.height_mm", 2)
    for i, name in enumerate(PARAM_NAMES):
        pair = lb if name.startswith("l") else hb
        pair = r.floats(f"bounds.{name}_mm", 2, pair)
        if pair is not None:
            lo[i], hi[i] = _MM[0](pair[0]), _MM[0](pair[1])
        if name.startswith("b") and hi[i] > b:
            raise ConfigError(f"bounds.{name}_mm", "upper height exceeds antenna height")
    try:
        bounds = ParameterBounds(tuple(lo), tuple(hi))
    except MlaMatchError as exc:
        raise ConfigError("bounds", str(exc)) from None

    ga_kw = {name: r.get(key, conv) for key, (name, conv) in _GA_KEYS.items()
             if key in pairs}
    try:
        ga = GaParams(**ga_kw)
    except MlaMatchError as exc:
        raise ConfigError("ga", str(exc)) from None
    workers = r.get("ga.workers", int, 1)
    if workers < 1:
        raise ConfigError("ga.workers", "must be >= 1")

    aggregator = r.get("objective.aggregator", str, "max")
    if aggregator not in ("max", "mean"):
        raise ConfigError("objective.aggregator", "must be 'max' or 'mean'")

    matching = None
    if "matching.l_mm" in pairs or "matching.b_mm" in pairs:
        l_mm = r.floats("matching.l_mm", 5)
        b_mm = r.floats("matching.b_mm", 3)
        if l_mm is None or b_mm is None:
            raise ConfigError("matching", "need both matching.l_mm and matching.b_mm")
        try:
            matching = MatchingConfig([_MM[0](x) for x in l_mm],
                                      [_MM[0](x) for x in b_mm], antenna)
        except MlaMatchError as exc:
            raise ConfigError("matching", str(exc)) from None

    outputs = {}
    for key in ("output.sweep_csv", "output.aperture_csv", "output.history_csv",
                "output.touchstone"):
        if key in pairs:
            _check_writable(key, pairs[key])
            outputs[key.split(".", 1)[1]] = pairs[key]

    z_ref = r.get("touchstone.z_ref_ohm", float)
    if z_ref is not None and not z_ref > 0:
        raise ConfigError("touchstone.z_ref_ohm", "must be > 0")

    return RunConfig(
        antenna=antenna, f_start=f_start, f_stop=f_stop, n_points=n_points,
        modes=modes, quad=quad, bounds=bounds, ga=ga, aggregator=aggregator,
        gray=r.get("ga.gray", _bool, False), workers=workers,
        step_correction=r.get("network.step_correction", _bool, False),
        matching=matching, outputs=outputs, z_ref=z_ref,
    )


def resolve_config_path(path):
    """Relative paths not found in the working directory are looked up in
    ``$MLAMATCH_CONFIG_DIR``."""
    if os.path.isabs(path) or os.path.exists(path):
        return path
    base = os.environ.get(CONFIG_DIR_ENV)
    if base:
        alt = os.path.join(base, path)
        if os.path.exists(alt):
            return alt
    return path


def load_config(path):
    path = resolve_config_path(os.fspath(path))
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def dump_config(cfg):
    """Serialize a RunConfig back to key-value text."""
    mm = lambda x: _from_si(x, _MM)  # noqa: E731
    lines = [
        f"antenna.a_mm = {mm(cfg.antenna.width_a)}",
        f"antenna.b_mm = {mm(cfg.antenna.height_b)}",
        f"antenna.eps_r = {cfg.antenna.eps_r!r}",
        f"antenna.tan_delta = {cfg.antenna.tan_delta!r}",
        f"band.start_ghz = {_from_si(cfg.f_start, _GHZ)}",
        f"band.stop_ghz = {_from_si(cfg.f_stop, _GHZ)}",
        f"band.n_points = {cfg.n_points}",
        "aperture.modes = " + ",".join(str(m) for m in cfg.modes),
    ]
    for key, (name, _) in _QUAD_KEYS.items():
        lines.append(f"{key} = {getattr(cfg.quad, name)!r}")
    for i, name in enumerate(PARAM_NAMES):
        lines.append(f"bounds.{name}_mm = {mm(cfg.bounds.lower[i])},"
                     f"{mm(cfg.bounds.upper[i])}")
    for key, (name, _) in _GA_KEYS.items():
        lines.append(f"{key} = {getattr(cfg.ga, name)!r}")
    lines += [
        f"ga.gray = {str(cfg.gray).lower()}",
        f"ga.workers = {cfg.workers}",
        f"objective.aggregator = {cfg.aggregator}",
        f"network.step_correction = {str(cfg.step_correction).lower()}",
    ]
    if cfg.matching is not None:
        lines.append("matching.l_mm = " + ",".join(mm(x) for x in cfg.matching.l))
        lines.append("matching.b_mm = " + ",".join(mm(x) for x in cfg.matching.bh))
    for name, path in sorted(cfg.outputs.items()):
        lines.append(f"output.{name} = {path}")
    if cfg.z_ref is not None:
        lines.append(f"touchstone.z_ref_ohm = {cfg.z_ref!r}")
    return "\n".join(lines) + "\n"


# -- sweeps -------------------------------------------------------------------

def nudge_off_cutoffs(freqs, cutoffs, rtol=1e-12, shift=1e-9):
    """Move grid points sitting on a cutoff up by ``shift`` (relative)."""
    freqs = np.array(freqs, dtype=float)
    for fc in cutoffs:
        hit = np.abs(freqs - fc) <= rtol * fc
        freqs[hit] = fc * (1 + shift)
    return freqs


def sweep_grid(cfg):
    ant = cfg.antenna
    air = ant.with_(eps_r=1.0, tan_delta=0.0)
    cutoffs = [ant.cutoff_frequency(m) for m in cfg.modes] + [air.cutoff_frequency(1)]
    return nudge_off_cutoffs(cfg.freqs, cutoffs)


@dataclass(frozen=True)
class SweepResult:
    freqs: np.ndarray
    gamma: np.ndarray

    def __len__(self):
        return len(self.freqs)

    @property
    def re(self):
        return np.real(self.gamma)

    @property
    def im(self):
        return np.imag(self.gamma)

    @property
    def mag(self):
        return np.abs(self.gamma)

    @property
    def mag_db(self):
        with np.errstate(divide="ignore"):
            db = 20 * np.log10(self.mag)
        return np.maximum(db, DB_FLOOR)

    def rows(self):
        return zip(self.freqs, self.re, self.im, self.mag, self.mag_db)


def aperture_for(cfg, freqs=None):
    freqs = sweep_grid(cfg) if freqs is None else freqs
    return build_aperture_model(cfg.antenna, freqs, cfg.modes, cfg.quad,
                                workers=cfg.workers)


def sweep(cfg, matching=None, aperture_model=None):
    """
    Reflection over the configured band.

    ``matching`` of ``None`` or ``"none"`` gives the bare aperture
    reflection; a MatchingConfig gives the input reflection through the
    full network.
    """
    model = aperture_model if aperture_model is not None else aperture_for(cfg)
    if matching is None or (isinstance(matching, str) and matching == "none"):
        return SweepResult(model.freqs.copy(), model.gamma_ap.copy())
    t = build_network(matching, model.frequency_point,
                      step_correction=cfg.step_correction)
    try:
        g = gamma_in(t, model.gamma_ap)
    except MlaMatchError as exc:
        raise type(exc)(f"sweep over {model.freqs[0]:.6g}..{model.freqs[-1]:.6g} Hz: "
                        f"{exc}") from exc
    return SweepResult(model.freqs.copy(), np.asarray(g))


def feed_impedance(cfg, f=None):
    """TE10 power-voltage impedance of the feed guide (band center default)."""
    f = cfg.center if f is None else f
    return float(np.real(modal_params(cfg.antenna, FrequencyPoint(f)).z_pv))


# -- files -------------------------------------------------------------------

def _fmt(x):
    return repr(float(x))


def write_csv(result, path):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for row in result.rows():
                w.writerow([_fmt(x) for x in row])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from None


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise FormatError(f"{path}: expected header {','.join(CSV_HEADER)}")
    data = np.array([[float(x) for x in row] for row in rows[1:]],
                    dtype=float).reshape(-1, len(CSV_HEADER))
    return SweepResult(data[:, 0], data[:, 1] + 1j * data[:, 2])


def write_touchstone(result, path, z_ref, comments=()):
    """Version-1 one-port file, real/imaginary format, frequencies in GHz."""
    f = np.asarray(result.freqs, dtype=float)
    if np.any(np.diff(f) <= 0):
        raise FormatError("touchstone frequencies must be strictly increasing")
    if not z_ref > 0:
        raise FormatError("reference impedance must be > 0")
    lines = [f"! {c}" for c in comments]
    lines.append(f"# GHz S RI R {_fmt(z_ref)}")
    for fi, g in zip(f, result.gamma):
        lines.append(f"{_fmt(_GHZ[1](fi))} {_fmt(g.real)} {_fmt(g.imag)}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


_FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


def read_touchstone(path):
    """Parse a one-port Touchstone v1 file; returns ``(SweepResult, z_ref)``."""
    unit, fmt, z_ref = 1e9, "MA", 50.0
    seen_option = False
    freqs, gam = [], []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("!", 1)[0].strip()
            if not line:
                continue
            if line.startswith("#"):
                if seen_option:
                    continue
                seen_option = True
                tok = line[1:].upper().split()
                i = 0
                while i < len(tok):
                    t = tok[i]
                    if t in _FREQ_UNITS:
                        unit = _FREQ_UNITS[t]
                    elif t in ("MA", "DB", "RI"):
                        fmt = t
                    elif t == "R":
                        z_ref = float(tok[i + 1])
                        i += 1
                    elif t != "S":
                        raise FormatError(f"{path}: unsupported option {t!r}")
                    i += 1
                continue
            parts = [float(x) for x in line.split()]
            if len(parts) != 3:
                raise FormatError(f"{path}: one-port rows need 3 numbers: {raw!r}")
            f, p, q = parts
            if fmt == "RI":
                g = complex(p, q)
            elif fmt == "MA":
                g = p * complex(math.cos(math.radians(q)), math.sin(math.radians(q)))
            else:
                g = 10 ** (p / 20) * complex(math.cos(math.radians(q)),
                                             math.sin(math.radians(q)))
            freqs.append(f * unit)
            gam.append(g)
    return SweepResult(np.array(freqs), np.array(gam, dtype=complex)), z_ref


def write_history(history, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTORY_HEADER)
        for rec in history:
            w.writerow([rec.generation, _fmt(rec.best), _fmt(rec.mean)]
                       + [_fmt(_MM[1](x)) for x in rec.best_config])


def progress_line(rec):
    return f"gen {rec.generation:4d}  best {rec.best:.6f}  mean {rec.mean:.6f}"

