"""Scenario definitions, the runner and the built-in link catalog."""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import channel as ch
from .antenna import ISOTROPIC, AntennaPattern, DipoleOnGround, DirectionalComposite, Sampled
from .geometry import (DEFAULT_STEP, CarrierConfig, LinkGeometry, compute_num_streams,
                       compute_spacing, condition_ratios, parallel_link)
from .metrics import SeBounds, complexity_mu, phi_ratios, stream_metrics
from .schemes import SchemeConfig, SchemeError, SchemeKind, equivalent_channel, svd_scheme


class ConfigError(ValueError):
    """Invalid scenario configuration; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class ScenarioError(RuntimeError):
    def __init__(self, name, cause):
        self.name = name
        self.cause = cause
        super().__init__(f"scenario {name!r}: {cause}")


def load_presets() -> dict:
    text = resources.files("mmimmo").joinpath("data/presets.json").read_text()
    return json.loads(text)


PRESETS = load_presets()


@dataclass(frozen=True)
class LinkSpec:
    """Parameters of a parallel, center-aligned ULA pair."""

    n_streams: int
    spacing: float
    estimated_distance: float
    distance_error: float = 0.0
    step: float = DEFAULT_STEP
    preset: str | None = None

    @property
    def true_distance(self) -> float:
        return self.estimated_distance + self.distance_error

    def build(self, n_elements: int, tx_pattern=ISOTROPIC, rx_pattern=ISOTROPIC) -> LinkGeometry:
        return parallel_link(n_elements, self.spacing, self.true_distance,
                             self.estimated_distance, tx_pattern, rx_pattern, self.step)


def preset_link(link_id, distance_error: float = 0.0) -> LinkSpec:
    """Table-style link preset with its printed stream count and spacing."""
    key = str(link_id)
    if key not in PRESETS["links"]:
        raise ConfigError(f"unknown link preset {link_id!r}", "link_preset")
    row = PRESETS["links"][key]
    return LinkSpec(row["n_u"], row["spacing_mm"] * 1e-3, row["estimated_distance"],
                    distance_error, PRESETS["delta_m"], key)


@dataclass(frozen=True, eq=False)
class Environment:
    kind: str = ch.FREE_SPACE
    path: Path | None = None
    scatterers: tuple = ()

    def __post_init__(self):
        if self.kind not in (ch.FREE_SPACE, ch.RAY_FILE, ch.SYNTHETIC):
            raise ConfigError(f"unknown environment type {self.kind!r}", "environment.type")
        if self.kind == ch.RAY_FILE and self.path is None:
            raise ConfigError("RayFile environment needs a path", "environment.path")


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    link: LinkSpec
    scheme: SchemeConfig
    environment: Environment = field(default_factory=Environment)
    tx_pattern: AntennaPattern = ISOTROPIC
    rx_pattern: AntennaPattern = ISOTROPIC
    bounds: SeBounds = field(default_factory=SeBounds)
    carrier: CarrierConfig = field(default_factory=CarrierConfig)

    def __post_init__(self):
        if self.scheme.n_streams != self.link.n_streams:
            raise ConfigError(f"scheme has {self.scheme.n_streams} streams, link has "
                              f"{self.link.n_streams}", "scheme")


@dataclass
class ScenarioResult:
    name: str
    scheme: str
    provenance: str
    n_u: int
    n_s: int
    n_d: int
    n_cp: int
    n_antennas: int
    sir: list
    c_practical: list
    se: float
    se_fs: float
    se_svd: float
    phi_svd: float
    phi_fs: float
    mu_tx: float | None
    mu_rx: float | None
    r1: float
    r2: float
    r2_block: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioResult":
        return cls(**data)


def _environment_channel(sc: Scenario, geometry: LinkGeometry):
    env = sc.environment
    if env.kind == ch.FREE_SPACE:
        return ch.fs_channel(geometry, sc.carrier)
    if env.kind == ch.SYNTHETIC:
        rays = ch.synth_rays(geometry, env.scatterers, sc.carrier)
        return ch.link_ray_channel(rays, geometry, sc.carrier, ch.SYNTHETIC)
    n = geometry.tx.n_elements
    rays = ch.load_rays(env.path, (n, n))
    return ch.link_ray_channel(rays, geometry, sc.carrier, ch.RAY_FILE)


def _svd_baseline_channel(sc: Scenario, h_scheme, n_u: int):
    # imported rays only exist for the scheme's array; use its leading N_U-element sub-ULA
    if sc.environment.kind == ch.RAY_FILE or h_scheme.shape[0] == n_u:
        return h_scheme.entries[:n_u, :n_u]
    geometry = sc.link.build(n_u, sc.tx_pattern, sc.rx_pattern)
    return _environment_channel(sc, geometry).entries


def run_scenario(sc: Scenario) -> ScenarioResult:
    """Evaluate the scheme on its environment, on free space and against SVD."""
    try:
        return _run(sc)
    except ScenarioError:
        raise
    except Exception as exc:
        raise ScenarioError(sc.name, exc) from exc


def _run(sc: Scenario) -> ScenarioResult:
    cfg = sc.scheme
    n_u = cfg.n_streams
    geometry = sc.link.build(cfg.n_antennas, sc.tx_pattern, sc.rx_pattern)

    h = _environment_channel(sc, geometry)
    m = stream_metrics(equivalent_channel(h, cfg), sc.bounds)

    if sc.environment.kind == ch.FREE_SPACE:
        se_fs = m.total_se
    else:
        se_fs = stream_metrics(equivalent_channel(ch.fs_channel(geometry, sc.carrier), cfg),
                               sc.bounds).total_se

    g_svd, _ = svd_scheme(_svd_baseline_channel(sc, h, n_u), cfg.power)
    se_svd = stream_metrics(g_svd, sc.bounds).total_se

    try:
        phi_svd, phi_fs = phi_ratios(m.total_se, se_svd, se_fs)
    except ZeroDivisionError:
        phi_svd = 100.0 * (m.total_se / se_svd) if se_svd else math.nan
        phi_fs = 100.0 * (m.total_se / se_fs) if se_fs else math.nan

    mu_tx = mu_rx = None
    if n_u >= 2:
        mu = complexity_mu(cfg)
        mu_tx, mu_rx = mu.mu_tx, mu.mu_rx
    ratios = condition_ratios(geometry, sc.carrier.wavelength, n_u, cfg.n_blocks)

    return ScenarioResult(
        name=sc.name, scheme=cfg.kind.value, provenance=h.provenance,
        n_u=n_u, n_s=cfg.n_blocks, n_d=cfg.block_size, n_cp=cfg.n_cp,
        n_antennas=cfg.n_antennas,
        sir=[float(x) for x in m.sir], c_practical=[float(x) for x in m.c_practical],
        se=m.total_se, se_fs=se_fs, se_svd=se_svd, phi_svd=phi_svd, phi_fs=phi_fs,
        mu_tx=mu_tx, mu_rx=mu_rx, r1=ratios.r1, r2=ratios.r2, r2_block=ratios.r2_block,
    )


def run_suite(catalog, workers: int = 1):
    """Run every scenario; failures are collected, not raised.

    Returns ``(results, failures)`` with results in catalog order.
    """
    scenarios = list(catalog)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            outcomes = list(pool.map(_attempt, scenarios))
    else:
        outcomes = [_attempt(sc) for sc in scenarios]
    results = [o for o in outcomes if isinstance(o, ScenarioResult)]
    failures = [o for o in outcomes if isinstance(o, ScenarioError)]
    return results, failures


def _attempt(sc):
    try:
        return run_scenario(sc)
    except ScenarioError as exc:
        return exc


def scheme_for(n_u: int, n_s: int, n_cp: int, power: float = 1.0) -> SchemeConfig:
    kind = SchemeKind.DFT_SM_MRT if n_s == 1 and n_cp == 0 else SchemeKind.BLOCK_DFT_SM_MRT
    return SchemeConfig(kind, n_u, n_s, n_cp, power)


def table2_catalog(environment: Environment | None = None, distance_error: float = 0.0):
    """Scenarios for every row of the simulated-scenario table."""
    env = environment or Environment()
    out = []
    for row in PRESETS["table2"]:
        link = preset_link(row["link"], distance_error)
        out.append(Scenario(row["id"], link, scheme_for(link.n_streams, row["n_s"], row["n_cp"]),
                            env, carrier=CarrierConfig(PRESETS["f_hz"])))
    return out


CATALOGS = {"table2-fs": table2_catalog}


# -- config files -----------------------------------------------------------

_TOP_KEYS = {"name", "link_preset", "geometry", "distance_error", "environment",
             "scheme", "antenna", "bounds", "carrier"}
_GEOMETRY_KEYS = {"distance", "n_u", "spacing", "length", "step"}
_ENV_KEYS = {"type", "path", "scatterers"}
_SCHEME_KEYS = {"kind", "n_s", "n_cp", "power"}
_BOUNDS_KEYS = {"s_min", "s_max"}
_CARRIER_KEYS = {"f_hz"}


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", where)
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) {', '.join(extra)}", where or extra[0])


def _number(obj, key, where, default=None, kind=float):
    if key not in obj:
        if default is None:
            raise ConfigError("missing required key", f"{where}.{key}" if where else key)
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", f"{where}.{key}" if where else key)
    if kind is int and v != int(v):
        raise ConfigError(f"expected an integer, got {v!r}", f"{where}.{key}")
    return kind(v)


def _pattern(spec, where, base_dir: Path) -> AntennaPattern:
    if spec is None or spec == "isotropic":
        return ISOTROPIC
    if spec == "dipole":
        return DipoleOnGround()
    if spec == "directional":
        return DirectionalComposite()
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(f"unknown antenna {spec!r}", where)
    kind = spec["type"]
    if kind == "isotropic":
        _check_keys(spec, {"type"}, where)
        return ISOTROPIC
    if kind in ("dipole", "directional"):
        _check_keys(spec, {"type", "exponent"}, where)
        base = DipoleOnGround(_number(spec, "exponent", where, 1.0))
        return base if kind == "dipole" else DirectionalComposite(base)
    if kind == "sampled":
        _check_keys(spec, {"type", "path"}, where)
        path = base_dir / spec.get("path", "")
        if not path.is_file():
            raise ConfigError(f"pattern file {path} not found", f"{where}.path")
        try:
            return Sampled.from_csv(path)
        except ValueError as exc:
            raise ConfigError(str(exc), f"{where}.path") from None
    raise ConfigError(f"unknown antenna type {kind!r}", f"{where}.type")


def _reflection(v, where):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ConfigError("reflection must be a number or [re, im]", where)


def scenario_from_dict(cfg: dict, base_dir: Path | str = ".") -> Scenario:
    base_dir = Path(base_dir)
    _check_keys(cfg, _TOP_KEYS, "")
    name = cfg.get("name")
    if not isinstance(name, str) or not name:
        raise ConfigError("scenario needs a non-empty name", "name")

    carrier_cfg = cfg.get("carrier", {})
    _check_keys(carrier_cfg, _CARRIER_KEYS, "carrier")
    carrier = CarrierConfig(_number(carrier_cfg, "f_hz", "carrier", PRESETS["f_hz"]))

    dist_err = _number(cfg, "distance_error", "", 0.0)
    if ("link_preset" in cfg) == ("geometry" in cfg):
        raise ConfigError("give exactly one of link_preset or geometry", "link_preset")
    if "link_preset" in cfg:
        link = preset_link(cfg["link_preset"], dist_err)
    else:
        geo = cfg["geometry"]
        _check_keys(geo, _GEOMETRY_KEYS, "geometry")
        dist = _number(geo, "distance", "geometry")
        step = _number(geo, "step", "geometry", DEFAULT_STEP)
        lam = carrier.wavelength
        try:
            if "n_u" in geo:
                n_u = _number(geo, "n_u", "geometry", kind=int)
            elif "length" in geo:
                n_u = compute_num_streams(_number(geo, "length", "geometry"), lam, dist)
            else:
                raise ConfigError("need n_u or length", "geometry.n_u")
            spacing = (_number(geo, "spacing", "geometry") if "spacing" in geo
                       else compute_spacing(lam, dist, n_u, step))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc), "geometry") from None
        link = LinkSpec(n_u, spacing, dist, dist_err, step)
    if link.true_distance <= 0:
        raise ConfigError("perturbed distance must stay positive", "distance_error")

    sch = cfg.get("scheme", {})
    _check_keys(sch, _SCHEME_KEYS, "scheme")
    kind = sch.get("kind", "DftSmMrt")
    try:
        kind = SchemeKind(kind)
    except ValueError:
        raise ConfigError(f"unknown scheme kind {kind!r}", "scheme.kind") from None
    try:
        scheme = SchemeConfig(kind, link.n_streams, _number(sch, "n_s", "scheme", 1, int),
                              _number(sch, "n_cp", "scheme", 0, int),
                              _number(sch, "power", "scheme", 1.0))
    except SchemeError as exc:
        key = {"n_u": "geometry.n_u"}.get(exc.key, f"scheme.{exc.key}")
        raise ConfigError(str(exc), key) from None

    env_cfg = cfg.get("environment", {"type": ch.FREE_SPACE})
    _check_keys(env_cfg, _ENV_KEYS, "environment")
    env_type = env_cfg.get("type", ch.FREE_SPACE)
    if env_type == ch.RAY_FILE:
        if "path" not in env_cfg:
            raise ConfigError("RayFile environment needs a path", "environment.path")
        path = base_dir / env_cfg["path"]
        if not path.is_file():
            raise ConfigError(f"ray file {path} not found", "environment.path")
        env = Environment(ch.RAY_FILE, path)
    elif env_type == ch.SYNTHETIC:
        scat = []
        for i, s in enumerate(env_cfg.get("scatterers", [])):
            where = f"environment.scatterers[{i}]"
            _check_keys(s, {"position", "reflection"}, where)
            try:
                scat.append(ch.PointScatterer(np.array(s["position"], dtype=float),
                                              _reflection(s.get("reflection", 1.0), where)))
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(str(exc), where) from None
        env = Environment(ch.SYNTHETIC, scatterers=tuple(scat))
    elif env_type == ch.FREE_SPACE:
        env = Environment()
    else:
        raise ConfigError(f"unknown environment type {env_type!r}", "environment.type")

    ant = cfg.get("antenna", {})
    _check_keys(ant, {"tx", "rx"}, "antenna")
    tx_p = _pattern(ant.get("tx"), "antenna.tx", base_dir)
    rx_p = _pattern(ant.get("rx"), "antenna.rx", base_dir)

    b = cfg.get("bounds", {})
    _check_keys(b, _BOUNDS_KEYS, "bounds")
    try:
        bounds = SeBounds(_number(b, "s_min", "bounds", 1.0), _number(b, "s_max", "bounds", 8.0))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), "bounds") from None

    return Scenario(name, link, scheme, env, tx_p, rx_p, bounds, carrier)


def load_scenarios(path) -> list[Scenario]:
    """Read a config file holding one scenario object or a list of them."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    items = data if isinstance(data, list) else [data]
    return [scenario_from_dict(item, path.parent) for item in items]
