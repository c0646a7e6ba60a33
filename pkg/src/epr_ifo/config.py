"""Flat key=value run configuration with sections.

Unknown sections or keys are hard errors (no silent typo tolerance) and every
physical quantity carries its unit in the key name. The canonical rendering
round-trips: parse_config(render_config(cfg)) == cfg.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from .conditioning import make_grid
from .errors import ConfigError
from .imperfections import LossBudget, PhaseJitter
from .interferometer import IfoParams
from .twophoton import EprSource, squeeze_db_to_r

MODES = ("conditional", "fixed-angle", "rotation-angle", "solver", "loss-sweep", "jitter")

# (section, key, field name, type tag); type tags: float, int, bool, str,
# floats (comma list), opt_float / opt_str (omitted when None)
_SCHEMA = [
    ("run", "mode", "mode", "str"),
    ("run", "f_min_hz", "f_min_hz", "float"),
    ("run", "f_max_hz", "f_max_hz", "float"),
    ("run", "n_points", "n_points", "int"),
    ("run", "log_spaced", "log_spaced", "bool"),
    ("run", "seed", "seed", "int"),
    ("interferometer", "lambda0_m", "lambda0_m", "float"),
    ("interferometer", "t_srm", "t_srm", "float"),
    ("interferometer", "t_itm", "t_itm", "float"),
    ("interferometer", "l_arm_m", "l_arm_m", "float"),
    ("interferometer", "l_src_m", "l_src_m", "float"),
    ("interferometer", "mirror_mass_kg", "mirror_mass_kg", "float"),
    ("interferometer", "circulating_power_w", "circulating_power_w", "float"),
    ("interferometer", "delta_hz", "delta_hz", "float"),
    ("interferometer", "dl_arm_half_wavelengths", "dl_arm_half_wavelengths", "int"),
    ("interferometer", "dl_src_half_wavelengths", "dl_src_half_wavelengths", "int"),
    ("interferometer", "phi_c_rad", "phi_c_rad", "opt_float"),
    ("source", "squeeze_db", "squeeze_db", "opt_float"),
    ("source", "squeeze_r", "squeeze_r", "opt_float"),
    ("source", "theta_rad", "theta_rad", "float"),
    ("losses", "eps_arm", "eps_arm", "float"),
    ("losses", "eps_src", "eps_src", "float"),
    ("losses", "eps_in", "eps_in", "float"),
    ("losses", "eps_read", "eps_read", "float"),
    ("jitter", "xi_vs_rad", "xi_vs_rad", "float"),
    ("jitter", "xi_vi_rad", "xi_vi_rad", "float"),
    ("fixed-angle", "zetas_rad", "zetas_rad", "floats"),
    ("sweep", "eps_values", "eps_values", "floats"),
    ("sweep", "apply_to", "apply_to", "str"),
    ("solver", "n_window", "n_window", "int"),
    ("solver", "q_max", "q_max", "int"),
    ("solver", "p_max", "p_max", "int"),
    ("solver", "delta_seed_hz", "delta_seed_hz", "opt_float"),
    ("output", "csv", "out", "opt_str"),
]

_SECTIONS = {s for s, *_ in _SCHEMA}
_BY_KEY = {(s, k): (f, t) for s, k, f, t in _SCHEMA}


@dataclass
class RunConfig:
    mode: str = "conditional"
    f_min_hz: float = 10.0
    f_max_hz: float = 10e3
    n_points: int = 400
    log_spaced: bool = True
    seed: int = 0
    lambda0_m: float = 1.064e-6
    t_srm: float = 0.35
    t_itm: float = 0.014
    l_arm_m: float = 4000.0
    l_src_m: float = 50.0
    mirror_mass_kg: float = 40.0
    circulating_power_w: float = 650e3
    delta_hz: float = -15.3e6
    dl_arm_half_wavelengths: int = 0
    dl_src_half_wavelengths: int = 0
    phi_c_rad: float | None = None
    squeeze_db: float | None = None
    squeeze_r: float | None = None
    theta_rad: float = 0.0
    eps_arm: float = 0.0
    eps_src: float = 0.0
    eps_in: float = 0.0
    eps_read: float = 0.0
    xi_vs_rad: float = 0.0
    xi_vi_rad: float = 0.0
    zetas_rad: tuple = (0.0,)
    eps_values: tuple = ()
    apply_to: str = "both"
    n_window: int = 12
    q_max: int = 100_000
    p_max: int = 150_000
    delta_seed_hz: float | None = None
    out: str | None = None

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"run.mode must be one of {MODES}, got {self.mode!r}")
        if not self.f_min_hz < self.f_max_hz:
            raise ConfigError("run.f_min_hz must be < run.f_max_hz")
        if self.n_points < 2:
            raise ConfigError("run.n_points must be >= 2")
        if self.squeeze_db is not None and self.squeeze_r is not None:
            raise ConfigError(
                "source.squeeze_db and source.squeeze_r are both set (ambiguous)"
            )
        if self.apply_to not in ("both", "input", "readout"):
            raise ConfigError("sweep.apply_to must be both, input or readout")
        if self.mode == "loss-sweep" and not self.eps_values:
            raise ConfigError("sweep.eps_values is required for mode loss-sweep")

    # -- domain objects -------------------------------------------------------

    def grid(self) -> np.ndarray:
        return make_grid(self.f_min_hz, self.f_max_hz, self.n_points, self.log_spaced)

    def ifo_params(self) -> IfoParams:
        half = self.lambda0_m / 2.0
        return IfoParams(
            lambda0=self.lambda0_m,
            t_srm=self.t_srm,
            t_itm=self.t_itm,
            l_arm=self.l_arm_m,
            l_src=self.l_src_m,
            m_mirror=self.mirror_mass_kg,
            i_c=self.circulating_power_w,
            delta=2.0 * np.pi * self.delta_hz,
            dl_arm=self.dl_arm_half_wavelengths * half,
            dl_src=self.dl_src_half_wavelengths * half,
            phi_c=self.phi_c_rad,
        )

    def source_r(self) -> float:
        if self.squeeze_r is not None:
            return self.squeeze_r
        if self.squeeze_db is not None:
            return squeeze_db_to_r(self.squeeze_db)
        return 0.0

    def source(self) -> EprSource:
        return EprSource(r=self.source_r(), delta=2.0 * np.pi * self.delta_hz,
                         theta=self.theta_rad)

    def losses(self) -> LossBudget:
        return LossBudget(eps_arm=self.eps_arm, eps_src=self.eps_src,
                          eps_in=self.eps_in, eps_read=self.eps_read)

    def jitter(self) -> PhaseJitter:
        return PhaseJitter(xi_vs=self.xi_vs_rad, xi_vi=self.xi_vi_rad)


def _convert(raw: str, kind: str, where: str, line: int):
    try:
        if kind in ("float", "opt_float"):
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return raw.strip()
    except ValueError:
        raise ConfigError(f"cannot parse {where} value {raw!r} as {kind}", line=line)


def parse_config(text: str) -> RunConfig:
    """Parse the sectioned key=value format into a validated RunConfig."""
    cfg = RunConfig()
    section = None
    seen: set[tuple[str, str]] = set()
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        stripped = rawline.split("#", 1)[0].split(";", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", line=lineno)
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", line=lineno)
        if section is None:
            raise ConfigError("key outside of any [section]", line=lineno)
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if (section, key) not in _BY_KEY:
            raise ConfigError(f"unknown key {key!r} in section [{section}]", line=lineno)
        if (section, key) in seen:
            raise ConfigError(f"duplicate key {key!r} in section [{section}]", line=lineno)
        seen.add((section, key))
        fname, kind = _BY_KEY[(section, key)]
        setattr(cfg, fname, _convert(raw, kind, f"[{section}] {key}", lineno))
    cfg.validate()
    return cfg


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _render_value(value, kind: str) -> str:
    if kind == "bool":
        return "true" if value else "false"
    if kind == "floats":
        return ", ".join(repr(float(v)) for v in value)
    if kind in ("float", "opt_float"):
        return repr(float(value))
    return str(value)


def render_config(cfg: RunConfig) -> str:
    """Canonical text form; omits optional keys that are unset."""
    defaults = RunConfig()
    lines: list[str] = []
    current = None
    for section, key, fname, kind in _SCHEMA:
        value = getattr(cfg, fname)
        if kind.startswith("opt_") and value is None:
            continue
        if kind == "opt_float" and getattr(defaults, fname) is None and value is None:
            continue
        if section != current:
            if lines:
                lines.append("")
            lines.append(f"[{section}]")
            current = section
        lines.append(f"{key} = {_render_value(value, kind)}")
    lines.append("")
    return "\n".join(lines)
