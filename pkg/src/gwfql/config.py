"""Run configuration: a single JSON document with fixed sections.

Unknown keys are rejected and every error names the offending field.
Sections that are omitted fall back to the defaults below; a section that
is present must carry all of its required fields.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .sky import Direction, SkyQuadrature
from .spectra import DetectorModel, FrequencyGrid, NoiseSpectrum, lorentzian_alpha1_psd, read_psd_csv
from .units import PhysicalConstants


class ConfigError(ValueError):
    pass


@dataclass
class ConstantsSection:
    G: float = 6.6743e-11
    c: float = 299792458.0
    hbar: float = 1.054571817e-34

    POSITIVE = ("G", "c", "hbar")


@dataclass
class DetectorSection:
    omega0: float = 2.0 * math.pi * 299792458.0 / 1064e-9
    L: float = 4000.0
    M: float = 40.0
    gamma_cav: float = 2.0 * math.pi * 42.0
    alpha_bar: float | None = None
    N_photons: float | None = 1.0e20
    squeeze_r: float = 0.0

    REQUIRED = ("omega0", "L", "M", "gamma_cav")
    POSITIVE = ("omega0", "L", "M", "gamma_cav")


@dataclass
class GridSection:
    omega_min: float = 1e-2
    omega_max: float = 1e9
    n_points: int = 5000
    include_zero: bool = True

    POSITIVE = ("omega_min", "omega_max", "n_points")


@dataclass
class SpectrumSection:
    model: str = "lorentzian"
    cutoff_omega: float | None = 1e7
    path: str | None = None


@dataclass
class SignalSection:
    theta: float = 0.0
    phi: float = 0.0
    polarization: str = "plus"


@dataclass
class SkySection:
    n_theta: int = 32
    n_phi: int = 64
    sample_directions: list = field(
        default_factory=lambda: [[0.0, 0.0], [math.pi / 2, 0.0], [math.pi / 2, math.pi / 2], [math.pi / 3, math.pi / 4], [2.0, 4.0]]
    )

    POSITIVE = ("n_theta", "n_phi")


@dataclass
class BathSection:
    kind: str = "thermal_high_temperature"
    beta: float | None = 1.0 / (1.380649e-23 * 300.0)
    strength: float | None = None
    axis: list | None = None
    half_angle: float | None = None
    scale: float = 1.0


@dataclass
class SimulationSection:
    beta_c: float = 1.5
    n_fock: int = 60
    lambda_override: float | None = None
    duration: float | None = None
    n_samples: int = 40
    convergence_n_fock: int | None = 120

    POSITIVE = ("n_fock", "n_samples")


@dataclass
class OutputSection:
    dir: str = "out"


@dataclass
class RunConfig:
    constants: ConstantsSection = field(default_factory=ConstantsSection)
    detector: DetectorSection = field(default_factory=DetectorSection)
    grid: GridSection = field(default_factory=GridSection)
    spectrum: SpectrumSection = field(default_factory=SpectrumSection)
    signal: SignalSection = field(default_factory=SignalSection)
    sky: SkySection = field(default_factory=SkySection)
    bath: BathSection = field(default_factory=BathSection)
    simulation: SimulationSection = field(default_factory=SimulationSection)
    output: OutputSection = field(default_factory=OutputSection)
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    # builders -------------------------------------------------------------

    def physical_constants(self) -> PhysicalConstants:
        c = self.constants
        return PhysicalConstants(G=c.G, c=c.c, hbar=c.hbar)

    def detector_model(self) -> DetectorModel:
        d = self.detector
        kwargs = dict(omega0=d.omega0, L=d.L, M=d.M, gamma_cav=d.gamma_cav, squeeze_r=d.squeeze_r, constants=self.physical_constants())
        if d.alpha_bar is not None:
            return DetectorModel(alpha_bar=d.alpha_bar, **kwargs)
        return DetectorModel.from_photon_number(d.N_photons, **kwargs)

    def frequency_grid(self) -> FrequencyGrid:
        g = self.grid
        return FrequencyGrid.log(g.omega_min, g.omega_max, g.n_points, g.include_zero)

    def noise_spectrum(self, model: DetectorModel | None = None) -> NoiseSpectrum:
        model = model or self.detector_model()
        if self.spectrum.model == "csv":
            return read_psd_csv(self.spectrum.path)
        return lorentzian_alpha1_psd(model, self.frequency_grid(), self.spectrum.cutoff_omega)

    def signal_direction(self) -> Direction:
        return Direction(self.signal.theta, self.signal.phi)

    def sky_quadrature(self) -> SkyQuadrature:
        return SkyQuadrature(self.sky.n_theta, self.sky.n_phi)

    def sample_directions(self) -> list[Direction]:
        return [Direction(float(t), float(p)) for t, p in self.sky.sample_directions]

    def bath_model(self):
        from .bath import BathModel

        b = self.bath
        if b.kind == "thermal_high_temperature":
            model = BathModel.thermal_high_temperature(b.beta, self.physical_constants())
        elif b.kind == "isotropic":
            model = BathModel.isotropic(b.strength)
        else:
            model = BathModel.cap(b.strength, b.axis, b.half_angle)
        return model if b.scale == 1.0 else model.scaled(b.scale)


_SECTIONS = {f.name: f.default_factory for f in fields(RunConfig) if f.name != "seed"}
_CHOICES = {
    ("spectrum", "model"): ("lorentzian", "csv"),
    ("signal", "polarization"): ("plus", "cross", "sum"),
    ("bath", "kind"): ("thermal_high_temperature", "isotropic", "cap"),
}


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _build_section(name: str, raw: Any):
    factory = _SECTIONS[name]
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object")
    section = factory()
    known = {f.name for f in fields(section)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{name}: unknown key(s) {', '.join(unknown)}")
    for key in getattr(section, "REQUIRED", ()):
        if key not in raw:
            raise ConfigError(f"{name}.{key}: required field missing")
    for key, value in raw.items():
        default = getattr(section, key)
        where = f"{name}.{key}"
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{where}: expected true/false")
        elif isinstance(default, str) or (name, key) in _CHOICES or key in ("path",):
            if value is not None and not isinstance(value, str):
                raise ConfigError(f"{where}: expected a string")
            choices = _CHOICES.get((name, key))
            if choices and value not in choices:
                raise ConfigError(f"{where}: must be one of {', '.join(choices)}")
        elif isinstance(default, list) or key in ("axis",):
            if value is not None and not isinstance(value, list):
                raise ConfigError(f"{where}: expected a list")
        elif value is not None and not _is_number(value):
            raise ConfigError(f"{where}: expected a finite number")
        elif isinstance(default, int) and value is not None and int(value) != value:
            raise ConfigError(f"{where}: expected an integer")
        setattr(section, key, int(value) if isinstance(default, int) and not isinstance(default, bool) and value is not None else value)
    for key in getattr(section, "POSITIVE", ()):
        value = getattr(section, key)
        if value is None or not value > 0:
            raise ConfigError(f"{name}.{key}: must be positive")
    return section


def _cross_checks(cfg: RunConfig, raw: dict) -> None:
    d = cfg.detector
    if "detector" in raw:
        given = raw["detector"]
        if ("alpha_bar" in given) == ("N_photons" in given):
            raise ConfigError("detector.alpha_bar / detector.N_photons: give exactly one")
        if "alpha_bar" in given:
            d.N_photons = None
        else:
            d.alpha_bar = None
    if d.N_photons is not None and d.N_photons < 0:
        raise ConfigError("detector.N_photons: must be non-negative")
    if cfg.grid.omega_min >= cfg.grid.omega_max:
        raise ConfigError("grid.omega_max: must exceed grid.omega_min")
    if cfg.grid.n_points < 2:
        raise ConfigError("grid.n_points: need at least 2")
    s = cfg.spectrum
    if s.model == "csv" and not s.path:
        raise ConfigError("spectrum.path: required for the csv model")
    if s.cutoff_omega is not None and not s.cutoff_omega > 0:
        raise ConfigError("spectrum.cutoff_omega: must be positive")
    for i, entry in enumerate(cfg.sky.sample_directions):
        if not (isinstance(entry, list) and len(entry) == 2 and all(_is_number(v) for v in entry)):
            raise ConfigError(f"sky.sample_directions[{i}]: expected [theta, phi]")
    b = cfg.bath
    if b.kind == "thermal_high_temperature" and not (b.beta is not None and b.beta > 0):
        raise ConfigError("bath.beta: must be positive")
    if b.kind in ("isotropic", "cap") and not (b.strength is not None and b.strength >= 0):
        raise ConfigError("bath.strength: required and non-negative")
    if b.kind == "cap":
        if not (isinstance(b.axis, list) and len(b.axis) == 3 and all(_is_number(v) for v in b.axis) and any(b.axis)):
            raise ConfigError("bath.axis: expected a non-zero 3-vector")
        if b.half_angle is None or not 0 < b.half_angle <= math.pi:
            raise ConfigError("bath.half_angle: must lie in (0, pi]")
    if not b.scale >= 0:
        raise ConfigError("bath.scale: must be non-negative")
    sim = cfg.simulation
    if sim.beta_c < 0:
        raise ConfigError("simulation.beta_c: must be non-negative")
    if sim.lambda_override is not None and sim.lambda_override < 0:
        raise ConfigError("simulation.lambda_override: must be non-negative")
    if sim.duration is not None and not sim.duration > 0:
        raise ConfigError("simulation.duration: must be positive")
    if sim.convergence_n_fock is not None and sim.convergence_n_fock <= 0:
        raise ConfigError("simulation.convergence_n_fock: must be positive")


def parse_config(raw: Any) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = sorted(set(raw) - set(_SECTIONS) - {"seed"})
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {', '.join(unknown)}")
    cfg = RunConfig()
    for name in _SECTIONS:
        if name in raw:
            setattr(cfg, name, _build_section(name, raw[name]))
    if "seed" in raw:
        if not isinstance(raw["seed"], int) or isinstance(raw["seed"], bool):
            raise ConfigError("seed: expected an integer")
        cfg.seed = raw["seed"]
    _cross_checks(cfg, raw)
    return cfg


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)
