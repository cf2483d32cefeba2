"""Parameter-sweep experiments and their CSV emission.

Six experiment kinds cover the comparisons of interest: key rate against
channel transmissivity and against distance on a fixed-attenuation link,
distance grids layered over noise (beta^2) or source strength (alpha^2), and
fading-channel averages against the beam-wander spread sigma_b (full range
and close-up).  Grid points are independent, so they can be dispatched to a
thread pool; rows are always assembled in grid order, making the emitted CSV
byte-identical for any worker count.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .channel import (
    QuadratureSpec,
    average_key_rates,
    distance_to_transmissivity,
    weibull_params,
)
from .fock_states import SCHEMES, SchemeConfig
from .keyrate import KeyRatePoint, key_rate

EXPERIMENTS = (
    "transmissivity_sweep",
    "distance_sweep",
    "noise_grid",
    "photon_grid",
    "satellite_sweep",
    "satellite_closeup",
)

# (start, stop, points) chosen to show the crossover regions; the grid
# extents beyond the core parameter set are conventions of this package.
DEFAULT_AXES = {
    "transmissivity_sweep": (0.0, 1.0, 51),
    "distance_sweep": (0.0, 250.0, 126),
    "noise_grid": (0.0, 200.0, 41),
    "photon_grid": (0.0, 200.0, 41),
    "satellite_sweep": (0.1, 20.0, 40),
    "satellite_closeup": (0.05, 1.0, 20),
}
DEFAULT_BETA_SQ_VALUES = (0.0001, 0.001, 0.01, 0.05, 0.1)
DEFAULT_ALPHA_SQ_VALUES = (0.5, 1.0, 1.3, 2.0, 3.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: experiment kind, schemes, base parameters, axis, channel."""

    experiment: str
    schemes: tuple = ("nops", "tps", "rps")
    base: SchemeConfig = field(default_factory=lambda: SchemeConfig("nops"))
    start: float | None = None
    stop: float | None = None
    points: int | None = None
    log_axis: bool = False
    atten_db_per_km: float = 0.2
    beta_sq_values: tuple = DEFAULT_BETA_SQ_VALUES
    alpha_sq_values: tuple = DEFAULT_ALPHA_SQ_VALUES
    beta_r: float = 1.0
    beam_w: float = 1.0
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    threads: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        if self.points is not None and self.points < 1:
            raise ValueError("points must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def axis(self) -> np.ndarray:
        start, stop, points = DEFAULT_AXES[self.experiment]
        start = self.start if self.start is not None else start
        stop = self.stop if self.stop is not None else stop
        points = self.points if self.points is not None else points
        if points == 1:
            return np.array([float(stop)])
        if self.log_axis:
            if start <= 0 or stop <= 0:
                raise ValueError("log axis needs positive bounds")
            return np.geomspace(start, stop, points)
        return np.linspace(start, stop, points)


@dataclass(frozen=True)
class SweepResult:
    """Ordered rows plus the metadata needed to reproduce them."""

    metadata: dict
    columns: tuple
    rows: tuple


def _cfg_for(config: ExperimentConfig, scheme: str, **overrides) -> SchemeConfig:
    return dataclasses.replace(config.base, scheme=scheme, **overrides)


def _metadata(config: ExperimentConfig) -> dict:
    md = {
        "experiment": config.experiment,
        "schemes": ",".join(config.schemes),
        "alpha_sq": config.base.alpha_sq,
        "beta_sq": config.base.beta_sq,
        "t_s": config.base.t_s,
        "recon_eff": config.base.recon_eff,
        "trunc_n": config.base.trunc_n,
        "start": config.axis()[0],
        "stop": config.axis()[-1],
        "points": len(config.axis()),
        "log_axis": config.log_axis,
        "version": __version__,
    }
    if config.experiment in ("distance_sweep", "noise_grid", "photon_grid"):
        md["atten_db_per_km"] = config.atten_db_per_km
    if config.experiment == "noise_grid":
        md["beta_sq_values"] = ",".join(f"{v:.12g}" for v in config.beta_sq_values)
    if config.experiment == "photon_grid":
        md["alpha_sq_values"] = ",".join(f"{v:.12g}" for v in config.alpha_sq_values)
    if config.experiment.startswith("satellite"):
        md["beta_r"] = config.beta_r
        md["beam_w"] = config.beam_w
        md["nodes"] = config.quad.node_count
        md["clamp_negative"] = config.quad.clamp_negative
    return md


def _point_columns() -> tuple:
    return KeyRatePoint.CSV_COLUMNS[1:]  # t_e emitted as its own axis column


def _point_values(kr: KeyRatePoint) -> tuple:
    return (kr.i_g, kr.chi_g, kr.p_sub, kr.rate_raw, kr.rate, kr.rate_normalized)


def _map_ordered(worker, tasks, threads: int) -> list:
    if threads <= 1:
        return [worker(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, tasks))


def run_experiment(config: ExperimentConfig) -> SweepResult:
    """Evaluate the requested grid; deterministic for a fixed config."""
    axis = config.axis()
    schemes = tuple(config.schemes)

    if config.experiment == "transmissivity_sweep":
        columns = ("t_e", "scheme") + _point_columns()
        tasks = [(float(t), s) for t in axis for s in schemes]

        def worker(task):
            t_e, scheme = task
            kr = key_rate(_cfg_for(config, scheme), t_e)
            return (t_e, scheme) + _point_values(kr)

    elif config.experiment == "distance_sweep":
        columns = ("distance_km", "t_e", "scheme") + _point_columns()
        tasks = [(float(d), s) for d in axis for s in schemes]

        def worker(task):
            d, scheme = task
            t_e = distance_to_transmissivity(d, config.atten_db_per_km)
            kr = key_rate(_cfg_for(config, scheme), t_e)
            return (d, t_e, scheme) + _point_values(kr)

    elif config.experiment in ("noise_grid", "photon_grid"):
        layer_key = "beta_sq" if config.experiment == "noise_grid" else "alpha_sq"
        layers = (
            config.beta_sq_values
            if config.experiment == "noise_grid"
            else config.alpha_sq_values
        )
        columns = (layer_key, "distance_km", "t_e", "scheme") + _point_columns()
        tasks = [(float(v), float(d), s) for v in layers for d in axis for s in schemes]

        def worker(task):
            v, d, scheme = task
            t_e = distance_to_transmissivity(d, config.atten_db_per_km)
            kr = key_rate(_cfg_for(config, scheme, **{layer_key: v}), t_e)
            return (v, d, t_e, scheme) + _point_values(kr)

    else:  # satellite_sweep / satellite_closeup
        columns = ("sigma_b", "scheme", "k_avg", "k_avg_normalized")
        tasks = [(float(sb), s) for sb in axis for s in schemes]

        def worker(task):
            sigma_b, scheme = task
            model = weibull_params(sigma_b, config.beta_r, config.beam_w)
            avg = average_key_rates(_cfg_for(config, scheme), model, config.quad)
            return (sigma_b, scheme, avg.rate, avg.rate_normalized)

    rows = _map_ordered(worker, tasks, config.threads)
    return SweepResult(metadata=_metadata(config), columns=columns, rows=tuple(rows))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit_csv(result: SweepResult, path) -> None:
    """Write `# key=value` metadata, a column header, then the rows.

    Floats carry 12 significant digits; output is newline-terminated and
    byte-identical for identical results.
    """
    if not result.rows and not result.columns:
        raise ValueError("refusing to emit an empty result")
    lines = [f"# {k}={_fmt(v)}" for k, v in result.metadata.items()]
    lines.append(",".join(result.columns))
    for row in result.rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def parse_csv(path) -> SweepResult:
    """Read a file produced by emit_csv back into a SweepResult."""
    metadata = {}
    columns = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                metadata[key] = value
                continue
            cells = line.split(",")
            if columns is None:
                columns = tuple(cells)
                continue
            row = []
            for cell in cells:
                try:
                    row.append(float(cell))
                except ValueError:
                    row.append(cell)
            rows.append(tuple(row))
    if columns is None:
        raise ValueError(f"no header found in {path}")
    return SweepResult(metadata=metadata, columns=columns, rows=tuple(rows))
