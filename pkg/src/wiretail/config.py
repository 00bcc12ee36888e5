"""Physical and numerical parameters of the wire-driven elastic fishtail.

Every quantity is stored in SI after loading; unit conversion happens once,
at parse time.  Each loaded value carries a provenance tag:

``table1``
    datasheet values of the spring steel, transmission inertias and motor
    limits, fixed properties of the modeled robot;
``prior-work-estimate``
    geometry, mass and hydrodynamic coefficients estimated from the robot
    prototype lineage and calibrated so the shipped defaults reproduce its
    published swing amplitudes;
``user``
    free design/run parameters (spring thicknesses, frequency, numerics)
    and any value overridden in a user config file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class ConfigError(ValueError):
    """Raised for malformed config files or invalid parameter values."""

    def __init__(self, message: str, *, key: str | None = None, line: int | None = None):
        loc = []
        if key is not None:
            loc.append(f"key '{key}'")
        if line is not None:
            loc.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class SpringSpec:
    """One spring-steel element: cantilever geometry plus elastic modulus."""

    l_T: float  # free length [m]
    w_T: float  # width [m]
    d_T: float  # thickness [m]
    E: float    # elastic modulus [Pa]

    def validate(self) -> None:
        for name in ("l_T", "w_T", "d_T", "E"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"spring parameter {name} must be > 0", key=name)

    def with_thickness(self, d_T: float) -> "SpringSpec":
        return SpringSpec(self.l_T, self.w_T, d_T, self.E)

    def validate_thickness_grid(self, resolution: float = 1e-4) -> None:
        """Check that d_T sits on the manufacturable thickness lattice."""
        steps = self.d_T / resolution
        if abs(steps - round(steps)) > 1e-6:
            raise ConfigError(
                f"thickness {self.d_T} m is not a multiple of {resolution} m", key="d_T"
            )


def rotational_stiffness(spec: SpringSpec, grid_resolution: float | None = None) -> float:
    """Equivalent rotational stiffness E*w*d^3 / (12*l) of a spring element [N*m].

    With ``grid_resolution`` the thickness is first rounded to that lattice
    (spring steel is only manufacturable in 0.1 mm steps).
    """
    d = spec.d_T
    if grid_resolution is not None:
        d = round(d / grid_resolution) * grid_resolution
    kappa = spec.E * spec.w_T * d**3 / (12.0 * spec.l_T)
    if not kappa > 0.0:
        raise ConfigError("stiffness must be > 0; check spring parameters")
    return kappa


def thickness_for_stiffness(spec: SpringSpec, kappa: float) -> float:
    """Invert rotational_stiffness: thickness [m] giving stiffness kappa."""
    if kappa <= 0.0:
        raise ConfigError("stiffness must be > 0", key="kappa")
    return (12.0 * spec.l_T * kappa / (spec.E * spec.w_T)) ** (1.0 / 3.0)


@dataclass(frozen=True)
class TransmissionSpec:
    """Eccenter / slide way / reel geometry and the rotating inertias."""

    d1: float        # eccenter bias [m]
    d2: float        # revolving shaft to slide way distance [m]
    R_D: float       # reel radius [m]
    r_w: float       # wire pair offset from body axis [m]
    J_R: float       # reel inertia [kg*m^2]
    J_S: float       # slide way inertia [kg*m^2]
    J_P: float       # pendulum bar inertia [kg*m^2]
    T_m_max: float   # motor peak torque [N*m]
    P_allow: float   # motor allowable power [W]

    @property
    def crank_ratio(self) -> float:
        """d1/d2, the arcsin argument scale of the eccenter linkage."""
        return self.d1 / self.d2

    @property
    def reel_ratio(self) -> float:
        """R_D/r_w, reel angle to spine bend angle gain."""
        return self.R_D / self.r_w

    @property
    def J_total(self) -> float:
        return self.J_R + self.J_S + self.J_P

    @property
    def beta_max(self) -> float:
        """Largest reachable spine bend angle [rad]."""
        return self.reel_ratio * math.asin(self.crank_ratio)

    def validate(self) -> None:
        for name in ("d1", "d2", "R_D", "r_w", "J_R", "J_S", "J_P", "T_m_max", "P_allow"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"transmission parameter {name} must be > 0", key=name)
        if not self.d1 < self.d2:
            raise ConfigError("d1 must be < d2", key="d1")


@dataclass(frozen=True)
class TailBodyParams:
    """Per-link rigid-body and hydrodynamic parameters.

    Link 1 is the chord of the actively bent spine segment, link 2 the caudal
    fin.  Characteristic areas of link 1 are given for the undeformed chord;
    they are rescaled with the instantaneous chord length during simulation.
    """

    m1: float    # [kg]
    m2: float    # [kg]
    l2: float    # caudal fin link length [m]
    lc1: float   # center of mass offset, link 1 [m]
    lc2: float   # center of mass offset, link 2 [m]
    Sx1: float   # axial characteristic area, link 1 (undeformed) [m^2]
    Sy1: float   # lateral characteristic area, link 1 (undeformed) [m^2]
    Sx2: float   # [m^2]
    Sy2: float   # [m^2]
    cd1: float   # lateral drag coefficient
    cd2: float
    cf1: float   # axial friction coefficient
    cf2: float
    cm1: float   # added mass coefficient
    cm2: float
    I1: float    # planar inertia about Z, link 1 [kg*m^2]
    I2: float    # [kg*m^2]
    rho: float   # fluid density [kg/m^3]

    @property
    def ma1(self) -> float:
        """Added mass of link 1 [kg]."""
        return self.cm1 * self.m1

    @property
    def ma2(self) -> float:
        return self.cm2 * self.m2

    def validate(self) -> None:
        for name in ("m1", "m2", "l2", "lc1", "lc2", "Sx1", "Sy1", "Sx2", "Sy2",
                     "I1", "I2", "rho"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"body parameter {name} must be > 0", key=name)
        for name in ("cd1", "cd2", "cf1", "cf2", "cm1", "cm2"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"coefficient {name} must be >= 0", key=name)
        if self.lc2 > self.l2:
            raise ConfigError("l_c2 must not exceed l2", key="l_c2")


@dataclass(frozen=True)
class SimSettings:
    """Numerical settings of one simulation run."""

    freq: float              # swing frequency [Hz]
    steps_per_cycle: int
    warmup_cycles: int
    measurement_cycles: int

    def validate(self) -> None:
        if not self.freq > 0.0:
            raise ConfigError("freq must be > 0", key="freq")
        if self.steps_per_cycle < 500:
            raise ConfigError("steps_per_cycle must be >= 500", key="steps_per_cycle")
        if self.measurement_cycles < 2:
            raise ConfigError("measurement_cycles must be >= 2", key="measurement_cycles")
        if self.warmup_cycles < 1:
            raise ConfigError("warmup_cycles must be >= 1", key="warmup_cycles")


@dataclass(frozen=True)
class Config:
    """Validated parameter bundle; immutable and safe to share across runs."""

    aes: SpringSpec
    pes: SpringSpec
    transmission: TransmissionSpec
    body: TailBodyParams
    sim: SimSettings
    provenance: dict[str, str]
    source: str

    def snapshot(self) -> dict:
        """Config as a plain dict (SI values + provenance), for run manifests."""
        values = {}
        for key, (_, _, _, getter) in _KEY_TABLE.items():
            values[key] = {"value": getter(self), "provenance": self.provenance[key]}
        return values


# Unit tables, one family per physical dimension used in config files.
_UNITS = {
    "length": {"m": 1.0, "mm": 1e-3, "cm": 1e-2},
    "area": {"m^2": 1.0, "m2": 1.0, "mm^2": 1e-6, "mm2": 1e-6, "cm^2": 1e-4},
    "pressure": {"Pa": 1.0, "MPa": 1e6, "GPa": 1e9},
    "mass": {"kg": 1.0, "g": 1e-3},
    "inertia": {"kg*m^2": 1.0, "kg.m^2": 1.0, "kgm2": 1.0},
    "torque": {"N*m": 1.0, "N.m": 1.0, "Nm": 1.0},
    "power": {"W": 1.0},
    "frequency": {"Hz": 1.0},
    "density": {"kg/m^3": 1.0, "kg/m3": 1.0},
    "dimensionless": {"": 1.0, "-": 1.0},
    "count": {"": 1.0, "-": 1.0},
}

_T1 = "table1"
_PW = "prior-work-estimate"
_USR = "user"

# key -> (unit family, shipped default in SI, shipped provenance, getter)
_KEY_TABLE: dict[str, tuple] = {
    # spring steel, active segment (1) and passive segment (2)
    "l_T1": ("length", 0.083, _T1, lambda c: c.aes.l_T),
    "w_T1": ("length", 0.028, _T1, lambda c: c.aes.w_T),
    "d_T1": ("length", 0.3e-3, _USR, lambda c: c.aes.d_T),
    "E1": ("pressure", 1.97e11, _T1, lambda c: c.aes.E),
    "l_T2": ("length", 0.020, _T1, lambda c: c.pes.l_T),
    "w_T2": ("length", 0.025, _T1, lambda c: c.pes.w_T),
    "d_T2": ("length", 0.4e-3, _USR, lambda c: c.pes.d_T),
    "E2": ("pressure", 1.97e11, _T1, lambda c: c.pes.E),
    # transmission mechanism
    "d1": ("length", 0.024964, _PW, lambda c: c.transmission.d1),
    "d2": ("length", 0.030, _PW, lambda c: c.transmission.d2),
    "R_D": ("length", 0.020, _PW, lambda c: c.transmission.R_D),
    "r_w": ("length", 0.030717, _PW, lambda c: c.transmission.r_w),
    "J_R": ("inertia", 5.49e-6, _T1, lambda c: c.transmission.J_R),
    "J_S": ("inertia", 2.03e-6, _T1, lambda c: c.transmission.J_S),
    "J_P": ("inertia", 4.61e-5, _T1, lambda c: c.transmission.J_P),
    "T_m_max": ("torque", 3.0, _T1, lambda c: c.transmission.T_m_max),
    "P_allow": ("power", 147.34, _T1, lambda c: c.transmission.P_allow),
    # tail body and hydrodynamics
    "m1": ("mass", 0.80, _PW, lambda c: c.body.m1),
    "m2": ("mass", 0.0163, _PW, lambda c: c.body.m2),
    "l2": ("length", 0.12, _PW, lambda c: c.body.l2),
    "l_c1": ("length", 0.078, _PW, lambda c: c.body.lc1),
    "l_c2": ("length", 0.052, _PW, lambda c: c.body.lc2),
    "S_x1": ("area", 0.0030, _PW, lambda c: c.body.Sx1),
    "S_y1": ("area", 0.0062, _PW, lambda c: c.body.Sy1),
    "S_x2": ("area", 0.0006, _PW, lambda c: c.body.Sx2),
    "S_y2": ("area", 0.0065, _PW, lambda c: c.body.Sy2),
    "c_d1": ("dimensionless", 0.27, _PW, lambda c: c.body.cd1),
    "c_d2": ("dimensionless", 0.345, _PW, lambda c: c.body.cd2),
    "c_f1": ("dimensionless", 0.03, _PW, lambda c: c.body.cf1),
    "c_f2": ("dimensionless", 0.01, _PW, lambda c: c.body.cf2),
    "c_m1": ("dimensionless", 0.8, _PW, lambda c: c.body.cm1),
    "c_m2": ("dimensionless", 1.85, _PW, lambda c: c.body.cm2),
    "I1": ("inertia", 6.0e-4, _PW, lambda c: c.body.I1),
    "I2": ("inertia", 1.5e-5, _PW, lambda c: c.body.I2),
    "rho": ("density", 1000.0, _PW, lambda c: c.body.rho),
    # numerics
    "freq": ("frequency", 4.0, _USR, lambda c: c.sim.freq),
    "steps_per_cycle": ("count", 2000, _USR, lambda c: c.sim.steps_per_cycle),
    "warmup_cycles": ("count", 6, _USR, lambda c: c.sim.warmup_cycles),
    "measurement_cycles": ("count", 4, _USR, lambda c: c.sim.measurement_cycles),
}


def default_config_path() -> Path:
    """Path of the shipped default config file."""
    return Path(str(resources.files("wiretail").joinpath("data/default.cfg")))


def _parse_line(raw: str, lineno: int) -> tuple[str, float] | None:
    line = raw.split("#", 1)[0].strip()
    if not line:
        return None
    if "=" not in line:
        raise ConfigError("expected 'key = value [unit]'", line=lineno)
    key, rhs = (part.strip() for part in line.split("=", 1))
    if key not in _KEY_TABLE:
        raise ConfigError(f"unknown key '{key}'", key=key, line=lineno)
    family = _KEY_TABLE[key][0]
    parts = rhs.split()
    if not parts:
        raise ConfigError("missing value", key=key, line=lineno)
    try:
        value = float(parts[0])
    except ValueError:
        raise ConfigError(f"not a number: '{parts[0]}'", key=key, line=lineno) from None
    unit = " ".join(parts[1:])
    table = _UNITS[family]
    if unit not in table:
        raise ConfigError(
            f"malformed unit suffix '{unit}' (allowed: {sorted(u for u in table if u)})",
            key=key, line=lineno,
        )
    return key, value * table[unit]


def _parse_text(text: str, source: str) -> dict[str, float]:
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parsed = _parse_line(raw, lineno)
        if parsed is None:
            continue
        key, value = parsed
        if key in values:
            raise ConfigError(f"duplicate key '{key}'", key=key, line=lineno)
        values[key] = value
    missing = [k for k in _KEY_TABLE if k not in values]
    if missing:
        raise ConfigError(f"missing key(s): {', '.join(missing)}", key=missing[0])
    return values


def _build(values: dict[str, float], source: str) -> Config:
    aes = SpringSpec(values["l_T1"], values["w_T1"], values["d_T1"], values["E1"])
    pes = SpringSpec(values["l_T2"], values["w_T2"], values["d_T2"], values["E2"])
    tr = TransmissionSpec(
        values["d1"], values["d2"], values["R_D"], values["r_w"],
        values["J_R"], values["J_S"], values["J_P"],
        values["T_m_max"], values["P_allow"],
    )
    body = TailBodyParams(
        m1=values["m1"], m2=values["m2"], l2=values["l2"],
        lc1=values["l_c1"], lc2=values["l_c2"],
        Sx1=values["S_x1"], Sy1=values["S_y1"], Sx2=values["S_x2"], Sy2=values["S_y2"],
        cd1=values["c_d1"], cd2=values["c_d2"], cf1=values["c_f1"], cf2=values["c_f2"],
        cm1=values["c_m1"], cm2=values["c_m2"],
        I1=values["I1"], I2=values["I2"], rho=values["rho"],
    )
    sim = SimSettings(
        freq=values["freq"],
        steps_per_cycle=int(round(values["steps_per_cycle"])),
        warmup_cycles=int(round(values["warmup_cycles"])),
        measurement_cycles=int(round(values["measurement_cycles"])),
    )
    aes.validate()
    pes.validate()
    tr.validate()
    body.validate()
    sim.validate()

    # Cross checks that need transmission and body together: the bent chord
    # must stay longer than the link-1 center of mass offset at full bend.
    beta_max = tr.beta_max
    l1_min = aes.l_T * (2.0 * math.sin(0.5 * beta_max) / beta_max if beta_max > 0 else 1.0)
    if body.lc1 > l1_min:
        raise ConfigError(
            f"l_c1 = {body.lc1} m exceeds the shortest reachable chord {l1_min:.6f} m",
            key="l_c1",
        )

    provenance = {}
    for key, (_, default, tag, _) in _KEY_TABLE.items():
        same = math.isclose(values[key], default, rel_tol=1e-12, abs_tol=0.0)
        provenance[key] = tag if same else _USR
    return Config(aes, pes, tr, body, sim, provenance, source)


def load_config(path: str | Path | None = None) -> Config:
    """Load and validate a config file; ``None`` loads the shipped defaults.

    Raises ConfigError naming the offending key and line for missing keys,
    unknown keys, malformed numbers or unit suffixes, and any violated
    physical invariant (non-positive value, d1 >= d2, ...).
    """
    cfg_path = default_config_path() if path is None else Path(path)
    try:
        text = cfg_path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {cfg_path}: {exc}") from exc
    return _build(_parse_text(text, str(cfg_path)), str(cfg_path))


def config_from_values(overrides: dict[str, float] | None = None) -> Config:
    """Default config with selected SI values replaced; test/tooling helper."""
    values = {key: float(default) for key, (_, default, _, _) in _KEY_TABLE.items()}
    if overrides:
        for key, value in overrides.items():
            if key not in values:
                raise ConfigError(f"unknown key '{key}'", key=key)
            values[key] = float(value)
    return _build(values, "<builtin defaults>")
