"""
Binary genetic algorithm over the five-section matching network.

A chromosome is a flat array of bits, eight per parameter, most
significant bit first, in the order l1..l5, b1..b3.  A gene byte ``v``
maps linearly onto its bounds as ``lower + v/255 (upper - lower)``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import (
    DegenerateModeError,
    EncodingError,
    InvalidConfigError,
    SingularJunctionError,
    SingularNetworkError,
)
from .waveguide import (
    DEFAULT_LAYOUT,
    PARAM_NAMES,
    MatchingConfig,
    build_network,
    gamma_in,
)

GENE_BITS = 8
N_PARAMS = len(PARAM_NAMES)
N_BITS = GENE_BITS * N_PARAMS
_WEIGHTS = 2 ** np.arange(GENE_BITS - 1, -1, -1)

AGGREGATORS = {"max": np.max, "mean": np.mean}

# errors that mark a chromosome as infeasible instead of aborting the run
_PENALIZED = (SingularNetworkError, SingularJunctionError, DegenerateModeError)


@dataclass(frozen=True)
class ParameterBounds:
    """Per-parameter (lower, upper) in meters, ordered l1..l5, b1..b3."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(x) for x in self.lower)
        hi = tuple(float(x) for x in self.upper)
        if len(lo) != N_PARAMS or len(hi) != N_PARAMS:
            raise InvalidConfigError(f"bounds need {N_PARAMS} entries each")
        for name, a, b in zip(PARAM_NAMES, lo, hi):
            if not a < b:
                raise InvalidConfigError(f"bounds for {name}: lower must be < upper")
            if a < 0 or (name.startswith("b") and a <= 0):
                raise InvalidConfigError(f"bounds for {name}: lower bound too small")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def default(cls, antenna, length_max=0.015, height_min=0.001):
        """Lengths 0..15 mm, heights 1 mm..feed height."""
        b = antenna.height_b
        return cls((0.0,) * 5 + (height_min,) * 3, (length_max,) * 5 + (b,) * 3)

    @property
    def lsb(self):
        return (np.array(self.upper) - np.array(self.lower)) / 255


def gray_to_binary(v):
    v = np.asarray(v, dtype=np.uint8)
    out = v.copy()
    shift = v >> 1
    while np.any(shift):
        out ^= shift
        shift = shift >> 1
    return out


def binary_to_gray(v):
    v = np.asarray(v, dtype=np.uint8)
    return v ^ (v >> 1)


def gene_bytes(chrom, gray=False):
    """Byte value of each gene."""
    bits = np.asarray(chrom, dtype=np.uint8)
    if bits.shape != (N_BITS,):
        raise EncodingError(f"chromosome must have {N_BITS} bits, got {bits.shape}")
    if np.any(bits > 1):
        raise EncodingError("chromosome entries must be 0 or 1")
    v = (bits.reshape(N_PARAMS, GENE_BITS) * _WEIGHTS).sum(axis=1).astype(np.uint8)
    return gray_to_binary(v) if gray else v


def bytes_to_chromosome(values, gray=False):
    v = np.asarray(values, dtype=np.uint8)
    if gray:
        v = binary_to_gray(v)
    return ((v[:, None] >> np.arange(GENE_BITS - 1, -1, -1)) & 1).astype(np.uint8).ravel()


def decode_vector(chrom, bounds, gray=False):
    v = gene_bytes(chrom, gray).astype(float)
    lo, hi = np.array(bounds.lower), np.array(bounds.upper)
    out = lo + (v / 255) * (hi - lo)
    # keep endpoints exact
    out[v == 255] = hi[v == 255]
    return out


def decode(chrom, bounds, antenna, gray=False):
    """Chromosome -> MatchingConfig."""
    return MatchingConfig.from_vector(decode_vector(chrom, bounds, gray), antenna)


def encode(cfg, bounds, gray=False):
    """MatchingConfig (or parameter vector) -> chromosome, nearest byte."""
    x = cfg.as_vector() if isinstance(cfg, MatchingConfig) else np.asarray(cfg, float)
    lo, hi = np.array(bounds.lower), np.array(bounds.upper)
    if x.shape != lo.shape:
        raise EncodingError(f"need {N_PARAMS} parameters, got {x.shape}")
    bad = (x < lo) | (x > hi)
    if np.any(bad):
        names = [n for n, b in zip(PARAM_NAMES, bad) if b]
        raise EncodingError(f"parameter(s) outside bounds: {names}")
    v = np.rint((x - lo) / (hi - lo) * 255).astype(np.uint8)
    return bytes_to_chromosome(v, gray)


@dataclass(frozen=True)
class FitnessReport:
    aggregate: float
    per_frequency: np.ndarray = field(repr=False)
    config: MatchingConfig = None
    penalized: bool = False


@dataclass(frozen=True)
class Problem:
    """What the GA optimizes: bounds, tabulated aperture, band functional."""

    bounds: ParameterBounds
    aperture: object
    aggregator: str = "max"
    gray: bool = False
    layout: object = DEFAULT_LAYOUT
    step_correction: bool = False

    def __post_init__(self):
        if self.aggregator not in AGGREGATORS:
            raise ValueError(f"aggregator must be one of {sorted(AGGREGATORS)}")
        if len(self.aperture) == 0:
            raise ValueError("aperture model grid is empty")

    @property
    def antenna(self):
        return self.aperture.geometry

    def config_reflection(self, cfg):
        """Complex input reflection of ``cfg`` on the aperture grid."""
        t = build_network(cfg, self.aperture.frequency_point, self.layout,
                          self.step_correction)
        return gamma_in(t, self.aperture.gamma_ap)

    def evaluate(self, chrom):
        return fitness(chrom, self.bounds, self.aperture, self.aggregator,
                       gray=self.gray, layout=self.layout,
                       step_correction=self.step_correction)


def fitness(chrom, bounds, aperture, aggregator="max", gray=False,
            layout=DEFAULT_LAYOUT, step_correction=False):
    """
    Band reflection of one chromosome.

    Singular or degenerate networks are not fatal; they score 1.0 at
    every frequency so they lose every tournament against a sane design.
    """
    agg = AGGREGATORS[aggregator]
    cfg = decode(chrom, bounds, aperture.geometry, gray)
    try:
        t = build_network(cfg, aperture.frequency_point, layout, step_correction)
        mags = np.abs(np.atleast_1d(gamma_in(t, aperture.gamma_ap)))
        if not np.all(np.isfinite(mags)):
            raise SingularNetworkError("non-finite reflection")
    except _PENALIZED:
        return FitnessReport(1.0, np.ones(len(aperture)), cfg, penalized=True)
    return FitnessReport(float(agg(mags)), mags, cfg)


@dataclass(frozen=True)
class GaParams:
    population_m: int = 64
    generations_max: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float = 0.02
    elite_count: int = 1
    tournament_size: int = 2
    seed: int = 42
    stagnation_window: int = 40

    def __post_init__(self):
        if self.population_m < 2 or self.population_m % 2:
            raise InvalidConfigError("population_m must be even and >= 2")
        if not 0 <= self.elite_count <= self.population_m:
            raise InvalidConfigError("elite_count must lie in [0, population_m]")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise InvalidConfigError(f"{name} must lie in [0, 1]")
        if not 1 <= self.tournament_size <= self.population_m:
            raise InvalidConfigError("tournament_size must lie in [1, population_m]")
        if self.generations_max < 0:
            raise InvalidConfigError("generations_max must be >= 0")
        if self.stagnation_window < 1:
            raise InvalidConfigError("stagnation_window must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass
class GaState:
    population: np.ndarray
    reports: list
    rng: np.random.Generator
    generation: int = 0
    best: FitnessReport = None
    best_chromosome: np.ndarray = None

    @property
    def scores(self):
        return np.array([r.aggregate for r in self.reports])


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best: float
    mean: float
    best_config: tuple


def make_evaluator(problem, workers=1):
    """
    ``population -> list of FitnessReport`` in population order.

    Worker threads only run fitness; selection never sees them, so the
    random stream is the same for any worker count.
    """
    if workers <= 1:
        return lambda pop: [problem.evaluate(c) for c in pop]

    def evaluate(pop):
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(problem.evaluate, list(pop)))

    return evaluate


def _best_of(population, reports):
    scores = np.array([r.aggregate for r in reports])
    i = int(np.argmin(scores))
    return reports[i], population[i].copy()


def initial_state(params, fitness_fn, n_bits=N_BITS):
    rng = np.random.default_rng(params.seed)
    pop = rng.integers(0, 2, size=(params.population_m, n_bits), dtype=np.uint8)
    reports = fitness_fn(pop)
    best, chrom = _best_of(pop, reports)
    return GaState(pop, reports, rng, 0, best, chrom)


def _tournament(rng, scores, size):
    idx = rng.integers(0, len(scores), size=size)
    return idx[np.argmin(scores[idx])]


def evolve(state, params, fitness_fn):
    """
    One generation: elitism, tournament selection, single-point crossover,
    per-bit mutation.  Elites keep their relative order in the population.
    """
    rng = state.rng
    pop, scores = state.population, state.scores
    m, n_bits = pop.shape
    order = np.argsort(scores, kind="stable")
    elite = np.sort(order[: params.elite_count])

    n_children = m - len(elite)
    children = []
    while len(children) < n_children:
        p1 = pop[_tournament(rng, scores, params.tournament_size)]
        p2 = pop[_tournament(rng, scores, params.tournament_size)]
        c1, c2 = p1.copy(), p2.copy()
        if rng.random() < params.crossover_rate:
            cut = rng.integers(1, n_bits)
            c1[cut:], c2[cut:] = p2[cut:], p1[cut:]
        children.extend((c1, c2))
    children = np.array(children[:n_children], dtype=np.uint8).reshape(-1, n_bits)
    if n_children:
        flips = rng.random(children.shape) < params.mutation_rate
        children ^= flips.astype(np.uint8)

    new_pop = np.concatenate([pop[elite], children])
    # elites are already scored
    new_reports = [state.reports[i] for i in elite]
    if n_children:
        new_reports += list(fitness_fn(children))

    best, best_chrom = state.best, state.best_chromosome
    cand, cand_chrom = _best_of(new_pop, new_reports)
    if best is None or cand.aggregate < best.aggregate:
        best, best_chrom = cand, cand_chrom
    return GaState(new_pop, new_reports, rng, state.generation + 1, best, best_chrom)


@dataclass(frozen=True)
class OptimizeResult:
    best: FitnessReport
    best_chromosome: np.ndarray
    history: list
    seed: int


def _record(state):
    return GenerationRecord(
        generation=state.generation,
        best=state.best.aggregate,
        mean=float(np.mean(state.scores)),
        best_config=tuple(state.best.config.as_vector()),
    )


def optimize(problem, params=GaParams(), workers=1, progress=None):
    """
    Run the GA until ``generations_max`` or until the best score has not
    improved for ``stagnation_window`` generations.

    ``progress`` is called with a GenerationRecord after every generation,
    including the initial population.
    """
    fitness_fn = make_evaluator(problem, workers)
    state = initial_state(params, fitness_fn)
    history = [_record(state)]
    if progress:
        progress(history[-1])
    last_gain = 0
    while state.generation < params.generations_max:
        before = state.best.aggregate
        state = evolve(state, params, fitness_fn)
        if state.best.aggregate < before:
            last_gain = state.generation
        history.append(_record(state))
        if progress:
            progress(history[-1])
        if state.generation - last_gain >= params.stagnation_window:
            break
    return OptimizeResult(state.best, state.best_chromosome, history, params.seed)
