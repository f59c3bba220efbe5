"""Batch command-line front end.

Every subcommand writes one CSV file: a ``# key=value`` header block with the
fully resolved configuration and unit conversions, a column-label line, then
the data rows.  Floats are written with ``repr`` (shortest round-trip
representation), so identical runs produce byte-identical files.

Value syntax::

    times      37.5us   or dimensionless  3.554
    momenta    0.1      or  0.1hbark
    areas      pi, pi/2, 1.5pi, or radians as a plain float
    sweeps     start..stop:count   e.g.  12.5us..200us:40

Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure.
"""

from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import click
import numpy as np

from . import __version__, analysis, interferometer
from .cache import build_cached, cache_dir_from_env
from .config import (ConfigError, DiffractionConfig, Envelope, Geometry,
                     Mechanism)
from .solver import SolverError, SolverSettings
from .transition import prepared_input
from .units import RB87, UnitSystem

UNITS = UnitSystem(RB87)


# ---------------------------------------------------------------------------
# Value parsing
# ---------------------------------------------------------------------------

def _fail(key: str, message: str) -> "NoReturn":
    raise ConfigError(f"{key}: {message}")


def parse_time(text, key: str = "time") -> float:
    """A time in units of 1/omega_K; the ``us`` suffix converts via the
    atom preset."""
    if isinstance(text, (int, float)):
        return float(text)
    tok = text.strip()
    try:
        if tok.endswith("us"):
            return UNITS.microseconds_to_time(float(tok[:-2]))
        return float(tok)
    except ValueError:
        _fail(key, f"cannot parse time {text!r}")


def parse_momentum(text, key: str = "momentum") -> float:
    """A momentum in units of hbar K (optional ``hbark`` suffix)."""
    if isinstance(text, (int, float)):
        return float(text)
    tok = text.strip()
    if tok.endswith("hbark"):
        tok = tok[:-5]
    try:
        return float(tok)
    except ValueError:
        _fail(key, f"cannot parse momentum {text!r}")


def parse_area(text, key: str = "area") -> float:
    """A pulse area in radians; accepts ``pi``, ``pi/2``, ``1.5pi``."""
    if isinstance(text, (int, float)):
        return float(text)
    tok = text.strip().lower().replace(" ", "")
    try:
        if "pi" in tok:
            pre, _, post = tok.partition("pi")
            value = math.pi * (float(pre) if pre else 1.0)
            if post:
                if not post.startswith("/"):
                    raise ValueError(tok)
                value /= float(post[1:])
            return value
        return float(tok)
    except ValueError:
        _fail(key, f"cannot parse pulse area {text!r}")


def parse_sweep(text, scalar_parser, key: str) -> np.ndarray:
    """``start..stop:count`` (inclusive linspace) or a single scalar."""
    if isinstance(text, (int, float)):
        return np.array([float(text)])
    tok = str(text).strip()
    if ".." not in tok:
        return np.array([scalar_parser(tok, key)])
    start_tok, _, rest = tok.partition("..")
    stop_tok, _, count_tok = rest.partition(":")
    if not count_tok:
        _fail(key, f"sweep {text!r} is missing ':count'")
    try:
        count = int(count_tok)
    except ValueError:
        _fail(key, f"bad sweep count in {text!r}")
    if count < 1:
        _fail(key, "sweep count must be positive")
    start = scalar_parser(start_tok, key)
    stop = scalar_parser(stop_tok, key)
    if count > 1 and stop <= start:
        _fail(key, "sweep must have positive length")
    return np.linspace(start, stop, count)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str, header: dict, columns: list[str], rows) -> None:
    lines = [f"# {key}={_fmt(value)}" for key, value in header.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def base_header(command: str, **extra) -> dict:
    header = {
        "command": command,
        "version": __version__,
        "atom": RB87.name,
        "mass_kg": RB87.mass,
        "wavelength_m": RB87.wavelength,
        "time_unit_us": UNITS.time_to_microseconds(1.0),
    }
    header.update(extra)
    return header


def _pmap(fn, items, jobs: int) -> list:
    """Bounded-parallelism map with deterministic output order."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Shared options
# ---------------------------------------------------------------------------

def common_options(f):
    for option in reversed([
        click.option("--mechanism", type=click.Choice(["raman", "bragg"]),
                     default=None, help="Diffraction mechanism."),
        click.option("--geometry", type=click.Choice(["single", "double"]),
                     default=None, help="Single or double diffraction."),
        click.option("--envelope", type=click.Choice(["gaussian", "box"]),
                     default=None, help="Pulse envelope."),
        click.option("--n-max", type=int, default=None,
                     help="Fixed truncation order (default: automatic)."),
        click.option("--rel-tol", type=float, default=None,
                     help="Solver relative tolerance."),
        click.option("--abs-tol", type=float, default=None,
                     help="Solver absolute tolerance."),
        click.option("--grid-points", type=int, default=None,
                     help="Quasi-momentum samples per hbar K."),
        click.option("--cache-dir", type=str, default=None,
                     help="Transition-function cache directory "
                          "(default: $MATTERWAVE_CACHE_DIR)."),
        click.option("--jobs", type=int, default=None,
                     help="Parallel workers over sweep cells (default 1)."),
        click.option("--config", "config_file", type=str, default=None,
                     help="JSON file with defaults; flags override."),
        click.option("--output", "-o", type=str, default=None,
                     help="Output CSV path ('-' for stdout)."),
    ]):
        f = option(f)
    return f


class Resolved:
    """Flag values merged over a JSON config file and hard defaults."""

    def __init__(self, params: dict, config_file: Optional[str]):
        self.params = params
        self.file_values = {}
        if config_file:
            try:
                with open(config_file) as fh:
                    data = json.load(fh)
            except FileNotFoundError:
                _fail("config", f"no such file: {config_file}")
            except json.JSONDecodeError as err:
                _fail("config", f"invalid JSON in {config_file}: {err}")
            if not isinstance(data, dict):
                _fail("config", "config file must hold a JSON object")
            self.file_values = {k.replace("-", "_"): v
                                for k, v in data.items()}

    def get(self, key: str, default=None, required: bool = False):
        value = self.params.get(key)
        if value is None:
            value = self.file_values.get(key, default)
        if value is None and required:
            _fail(key.replace("_", "-"), "required option is missing")
        return value

    def settings(self) -> SolverSettings:
        kwargs = {}
        rel = self.get("rel_tol")
        if rel is not None:
            kwargs["rel_tol"] = float(rel)
        abso = self.get("abs_tol")
        if abso is not None:
            kwargs["abs_tol"] = float(abso)
        return SolverSettings(**kwargs)

    def mechanism(self) -> Mechanism:
        return Mechanism(self.get("mechanism", required=True))

    def geometry(self, default=None) -> Geometry:
        return Geometry(self.get("geometry", default, default is None))

    def envelope(self) -> Envelope:
        return Envelope(self.get("envelope", "gaussian"))

    def cache_dir(self):
        return cache_dir_from_env(self.get("cache_dir"))

    def jobs(self) -> int:
        jobs = int(self.get("jobs", 1))
        if jobs < 1:
            _fail("jobs", "must be at least 1")
        return jobs

    def grid_points(self, default: int) -> int:
        return int(self.get("grid_points", default))

    def n_max(self):
        value = self.get("n_max")
        return None if value is None else int(value)

    def output(self, default: str) -> str:
        return self.get("output", default)

    def pulse_config(self, delta_tau: float, area: float,
                     p0: float = 0.0) -> DiffractionConfig:
        from .config import resonance_detuning
        mech = self.mechanism()
        return DiffractionConfig(
            mech, self.geometry(), delta_tau=delta_tau, pulse_area=area,
            p0=p0, two_photon_detuning=resonance_detuning(mech, p0),
            n_max=self.n_max(), envelope=self.envelope())


def config_header(config: DiffractionConfig) -> dict:
    header = {f"config.{k}": ("auto" if v is None and k == "n_max" else v)
              for k, v in config.to_dict().items()}
    header["config.delta_tau_us"] = UNITS.time_to_microseconds(
        config.delta_tau)
    return header


def settings_header(settings: SolverSettings) -> dict:
    return {f"settings.{k}": v for k, v in settings.to_dict().items()}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@click.group()
def cli():
    """Raman/Bragg diffraction sweeps; results are written as CSV."""


@cli.command("transition")
@common_options
@click.option("--delta-tau", help="Pulse width (e.g. 25us).")
@click.option("--area", default="pi", help="Pulse area (default pi).")
@click.option("--input-state", type=click.Choice(["g", "e"]), default=None,
              help="Input internal state (default: preparation convention).")
@click.option("--input-order", type=int, default=None,
              help="Input diffraction order (default: convention).")
def transition_cmd(config_file, **params):
    """Transition probabilities of one pulse over the quasi-momentum zone."""
    res = Resolved(params, config_file)
    delta_tau = parse_time(res.get("delta_tau", required=True), "delta-tau")
    area = parse_area(res.get("area", "pi"))
    config = res.pulse_config(delta_tau, area)
    mirror = area >= 0.75 * math.pi
    state, order = prepared_input(config, mirror)
    if res.get("input_state") is not None:
        state = {"g": 0, "e": 1}[res.get("input_state")]
    if res.get("input_order") is not None:
        order = int(res.get("input_order"))
    settings = res.settings()
    grid_points = res.grid_points(256)
    tf = build_cached(config, grid_points, [(state, order)], settings,
                      cache_dir=res.cache_dir())
    probs = tf.column_probabilities(state, order)   # (n_q, N)
    orders = np.arange(-tf.n_max, tf.n_max + 1)
    header = base_header("transition", **config_header(config),
                         **settings_header(settings),
                         grid_points=grid_points, input_state=state,
                         input_order=order, n_max_used=tf.n_max_used)
    columns = ["q_hbark", "p_in_hbark"] + [f"prob_{n:+d}" for n in orders]
    rows = ([q, q + order] + list(probs[j]) for j, q in enumerate(tf.q))
    write_csv(res.output("transition.csv"), header, columns, rows)


@cli.command("diffract")
@common_options
@click.option("--delta-tau", help="Pulse width.")
@click.option("--area", default="pi", help="Pulse area (default pi).")
@click.option("--delta-p", help="Packet momentum width.")
def diffract_cmd(config_file, **params):
    """Momentum density of a Gaussian packet before and after one pulse."""
    res = Resolved(params, config_file)
    delta_tau = parse_time(res.get("delta_tau", required=True), "delta-tau")
    area = parse_area(res.get("area", "pi"))
    delta_p = parse_momentum(res.get("delta_p", required=True), "delta-p")
    config = res.pulse_config(delta_tau, area)
    settings = res.settings()
    grid_points = res.grid_points(256)
    state, center = prepared_input(config, area >= 0.75 * math.pi)
    psi_i, psi_f, tf = analysis.diffract_packet(
        config, delta_p, center, state, grid_points, settings,
        cache_dir=res.cache_dir())
    header = base_header("diffract", **config_header(config),
                         **settings_header(settings),
                         grid_points=grid_points, delta_p_hbark=delta_p,
                         input_state=state, input_center_hbark=center,
                         n_max_used=tf.n_max_used)
    columns = ["p_hbark", "density_initial", "density_final"]
    p = psi_i.momenta()
    rows = zip(p, psi_i.density(), psi_f.density())
    write_csv(res.output("diffract.csv"), header, columns, rows)


@cli.command("width")
@common_options
@click.option("--delta-tau",
              help="Pulse width sweep, e.g. 12.5us..200us:40.")
@click.option("--area", default="pi", help="Pulse area (default pi).")
def width_cmd(config_file, **params):
    """FWHM of the mirror resonance in initial momentum vs pulse width."""
    res = Resolved(params, config_file)
    taus = parse_sweep(res.get("delta_tau", required=True), parse_time,
                       "delta-tau")
    area = parse_area(res.get("area", "pi"))
    settings = res.settings()
    grid_points = res.grid_points(1024)
    cache = res.cache_dir()

    def cell(tau):
        config = res.pulse_config(float(tau), area)
        return analysis.resonance_width(config, grid_points, settings,
                                        cache_dir=cache)
    widths = _pmap(cell, taus, res.jobs())
    header = base_header("width", **config_header(
                             res.pulse_config(float(taus[0]), area)),
                         **settings_header(settings),
                         grid_points=grid_points,
                         delta_tau_sweep=res.get("delta_tau"))
    columns = ["delta_tau_us", "delta_tau_dimless", "width_hbark"]
    rows = ([UNITS.time_to_microseconds(float(tau)), float(tau), w]
            for tau, w in zip(taus, widths))
    write_csv(res.output("width.csv"), header, columns, rows)


def _sweep_2d(res, value_fn, value_columns, command):
    """Shared delta-tau (outer) x delta-p (inner) sweep driver."""
    taus = parse_sweep(res.get("delta_tau", required=True), parse_time,
                       "delta-tau")
    dps = parse_sweep(res.get("delta_p", required=True), parse_momentum,
                      "delta-p")
    area = parse_area(res.get("area", "pi"))
    settings = res.settings()
    grid_points = res.grid_points(256)
    cache = res.cache_dir()
    cells = [(float(tau), float(dp)) for tau in taus for dp in dps]

    def cell(args):
        tau, dp = args
        config = res.pulse_config(tau, area)
        return value_fn(config, dp, grid_points, settings, cache)
    values = _pmap(cell, cells, res.jobs())
    header = base_header(command, **config_header(
                             res.pulse_config(float(taus[0]), area)),
                         **settings_header(settings),
                         grid_points=grid_points,
                         delta_tau_sweep=res.get("delta_tau"),
                         delta_p_sweep=res.get("delta_p"))
    columns = (["delta_tau_us", "delta_tau_dimless", "delta_p_hbark"]
               + value_columns)
    rows = ([UNITS.time_to_microseconds(tau), tau, dp] + list(vals)
            for (tau, dp), vals in zip(cells, values))
    write_csv(res.output(f"{command}.csv"), header, columns, rows)


@cli.command("efficiency")
@common_options
@click.option("--delta-tau", help="Pulse width or sweep.")
@click.option("--delta-p", help="Momentum width or sweep.")
@click.option("--area", default="pi", help="Pulse area (default pi).")
def efficiency_cmd(config_file, **params):
    """Probability diffracted into the target slot [p0+1/2, p0+3/2]."""
    res = Resolved(params, config_file)

    def value(config, dp, grid_points, settings, cache):
        return [analysis.efficiency(config, dp, grid_points=grid_points,
                                    settings=settings, cache_dir=cache)]
    _sweep_2d(res, value, ["efficiency"], "efficiency")


@cli.command("losses")
@common_options
@click.option("--delta-tau", help="Pulse width or sweep.")
@click.option("--delta-p", help="Momentum width or sweep.")
@click.option("--area", default="pi", help="Pulse area (default pi).")
def losses_cmd(config_file, **params):
    """Population lost outside the slots a perfect pulse would occupy."""
    res = Resolved(params, config_file)
    mirror = parse_area(res.get("area", "pi")) >= 0.75 * math.pi

    def value(config, dp, grid_points, settings, cache):
        return [analysis.losses(config, dp, mirror, grid_points,
                                settings, cache_dir=cache)]
    _sweep_2d(res, value, ["loss"], "losses")


@cli.command("populations")
@common_options
@click.option("--delta-tau", help="Pulse width or sweep.")
@click.option("--delta-p", help="Momentum width or sweep.")
@click.option("--area", default="pi", help="Pulse area (default pi).")
def populations_cmd(config_file, **params):
    """Double-mirror momentum bins P(-1), P(0), P(+1), P(other)."""
    res = Resolved(params, config_file)

    def value(config, dp, grid_points, settings, cache):
        bins = analysis.populations(config, dp, grid_points, settings,
                                    cache_dir=cache)
        return [bins["minus"], bins["zero"], bins["plus"], bins["other"]]
    _sweep_2d(res, value, ["p_minus", "p_zero", "p_plus", "p_other"],
              "populations")


@cli.command("optimal-area")
@common_options
@click.option("--delta-tau", help="Pulse width.")
@click.option("--p0", help="Mean momentum or sweep (hbark).")
def optimal_area_cmd(config_file, **params):
    """Pulse area maximizing the transfer |p0> -> |p0 + hbar K>."""
    res = Resolved(params, config_file)
    delta_tau = parse_time(res.get("delta_tau", required=True), "delta-tau")
    p0s = parse_sweep(res.get("p0", required=True), parse_momentum, "p0")
    settings = res.settings()
    mech = res.mechanism()
    geometry = res.geometry("double")

    def cell(p0):
        return analysis.optimal_pulse_area(mech, float(p0), delta_tau,
                                           settings, geometry)
    results = _pmap(cell, p0s, res.jobs())
    header = base_header("optimal-area", mechanism=mech.value,
                         geometry=geometry.value, delta_tau=delta_tau,
                         delta_tau_us=UNITS.time_to_microseconds(delta_tau),
                         **settings_header(settings),
                         p0_sweep=res.get("p0"))
    columns = ["p0_hbark", "area_opt_rad", "area_opt_over_pi", "transfer"]
    rows = ([float(p0), a, a / math.pi, t]
            for p0, (a, t) in zip(p0s, results))
    write_csv(res.output("optimal_area.csv"), header, columns, rows)


@cli.command("transition-scan")
@common_options
@click.option("--delta-tau", help="Pulse width.")
@click.option("--p0", help="Mean momentum sweep (hbark).")
@click.option("--delta-p", help="Momentum width sweep.")
@click.option("--width-grid-points", type=int, default=None,
              help="Grid for the resonance-width channel (default 256).")
def transition_scan_cmd(config_file, **params):
    """Double-to-single transition: efficiency map with per-p0 calibration."""
    res = Resolved(params, config_file)
    delta_tau = parse_time(res.get("delta_tau", required=True), "delta-tau")
    p0s = parse_sweep(res.get("p0", required=True), parse_momentum, "p0")
    dps = parse_sweep(res.get("delta_p", required=True), parse_momentum,
                      "delta-p")
    settings = res.settings()
    mech = res.mechanism()
    grid_points = res.grid_points(512)
    wgp = int(res.get("width_grid_points", 256))
    scan = analysis.transition_scan(mech, p0s, dps, delta_tau, grid_points,
                                    settings, cache_dir=res.cache_dir(),
                                    width_grid_points=wgp)
    header = base_header("transition-scan", mechanism=mech.value,
                         delta_tau=delta_tau,
                         delta_tau_us=UNITS.time_to_microseconds(delta_tau),
                         **settings_header(settings),
                         grid_points=grid_points, width_grid_points=wgp,
                         p0_sweep=res.get("p0"),
                         delta_p_sweep=res.get("delta_p"))
    columns = ["p0_hbark", "delta_p_hbark", "efficiency", "area_opt_rad",
               "width_hbark"]
    rows = ([float(p0), float(dp), scan.efficiency[i, j],
             scan.optimal_area[i], scan.width[i]]
            for i, p0 in enumerate(p0s) for j, dp in enumerate(dps))
    write_csv(res.output("transition_scan.csv"), header, columns, rows)


@cli.command("interferometer")
@common_options
@click.option("--delta-tau", help="Pulse width.")
@click.option("--delta-p", help="Packet momentum width.")
@click.option("--phase-samples", type=int, default=None,
              help="Phase samples in [0, 2pi] (default 64).")
def interferometer_cmd(config_file, **params):
    """Mach-Zehnder exit-port interferogram I(delta phi)."""
    res = Resolved(params, config_file)
    delta_tau = parse_time(res.get("delta_tau", required=True), "delta-tau")
    delta_p = parse_momentum(res.get("delta_p", required=True), "delta-p")
    samples = int(res.get("phase_samples", 64))
    mech, geom = res.mechanism(), res.geometry()
    settings = res.settings()
    grid_points = res.grid_points(256)
    result = interferometer.signal(mech, geom, delta_tau, delta_p,
                                   samples, grid_points, settings,
                                   cache_dir=res.cache_dir())
    header = base_header("interferometer", mechanism=mech.value,
                         geometry=geom.value, delta_tau=delta_tau,
                         delta_tau_us=UNITS.time_to_microseconds(delta_tau),
                         delta_p_hbark=delta_p, phase_samples=samples,
                         grid_points=grid_points,
                         **settings_header(settings),
                         amplitude=result.amplitude,
                         contrast=result.contrast,
                         fit_residual=result.fit_residual)
    rows = zip(result.phases, result.intensities)
    write_csv(res.output("interferometer.csv"), header,
              ["phase_rad", "intensity"], rows)


def _map_cmd(config_file, params, channel):
    res = Resolved(params, config_file)
    taus = parse_sweep(res.get("delta_tau", required=True), parse_time,
                       "delta-tau")
    dps = parse_sweep(res.get("delta_p", required=True), parse_momentum,
                      "delta-p")
    samples = int(res.get("phase_samples", 64))
    mech, geom = res.mechanism(), res.geometry()
    settings = res.settings()
    grid_points = res.grid_points(256)
    result = interferometer.amplitude_map(mech, geom, dps, taus, samples,
                                          grid_points, settings,
                                          cache_dir=res.cache_dir())
    header = base_header(f"{channel}-map", mechanism=mech.value,
                         geometry=geom.value, phase_samples=samples,
                         grid_points=grid_points,
                         **settings_header(settings),
                         delta_tau_sweep=res.get("delta_tau"),
                         delta_p_sweep=res.get("delta_p"))
    data = result.amplitude if channel == "amplitude" else result.contrast
    columns = ["delta_tau_us", "delta_tau_dimless", "delta_p_hbark", channel]
    rows = ([UNITS.time_to_microseconds(float(tau)), float(tau), float(dp),
             data[i, j]]
            for j, tau in enumerate(taus) for i, dp in enumerate(dps))
    write_csv(res.output(f"{channel}_map.csv"), header, columns, rows)


@cli.command("amplitude-map")
@common_options
@click.option("--delta-tau", help="Pulse width sweep.")
@click.option("--delta-p", help="Momentum width sweep.")
@click.option("--phase-samples", type=int, default=None)
def amplitude_map_cmd(config_file, **params):
    """Mach-Zehnder signal amplitude over (momentum width, pulse width)."""
    _map_cmd(config_file, params, "amplitude")


@cli.command("contrast-map")
@common_options
@click.option("--delta-tau", help="Pulse width sweep.")
@click.option("--delta-p", help="Momentum width sweep.")
@click.option("--phase-samples", type=int, default=None)
def contrast_map_cmd(config_file, **params):
    """Mach-Zehnder contrast over (momentum width, pulse width)."""
    _map_cmd(config_file, params, "contrast")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as err:          # --help and friends
        return 0 if err.exit_code == 0 else 1
    except (click.UsageError, click.ClickException) as err:
        err.show(file=sys.stderr)
        return 1
    except ConfigError as err:
        click.echo(f"configuration error: {err}", err=True)
        return 1
    except (SolverError, analysis.NoResonanceError,
            analysis.FlatObjectiveError,
            interferometer.DegenerateSignalError) as err:
        click.echo(f"numerical failure: {err}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
