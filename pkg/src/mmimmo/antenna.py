"""Real-valued element gain patterns.

A pattern maps a direction (unit vector pointing away from the element) and
the element boresight to a non-negative amplitude factor. Evaluation is
vectorized over a leading batch of directions.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

_UNIT_TOL = 1e-9


class PatternError(ValueError):
    pass


class AntennaPattern:
    """Base class; subclasses implement :meth:`_gain_local`."""

    def gain(self, direction, boresight, up=None) -> np.ndarray | float:
        d = _check_unit(direction, "direction")
        b = _check_unit(boresight, "boresight")
        g = self._gain(d.reshape(-1, 3), b, up)
        return float(g[0]) if d.ndim == 1 else g.reshape(d.shape[:-1])

    def _gain(self, d: np.ndarray, b: np.ndarray, up) -> np.ndarray:
        raise NotImplementedError


def _check_unit(v, name):
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1:] != (3,):
        raise PatternError(f"{name} must have a trailing dimension of 3")
    norms = np.linalg.norm(arr, axis=-1)
    if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
        raise PatternError(f"{name} must be unit length")
    return arr


def _off_boresight(d, b):
    return np.arccos(np.clip(d @ b, -1.0, 1.0))


@dataclass(frozen=True)
class Isotropic(AntennaPattern):
    def _gain(self, d, b, up):
        return np.ones(len(d))


ISOTROPIC = Isotropic()


@dataclass(frozen=True)
class DipoleOnGround(AntennaPattern):
    """``max(cos(theta), 0) ** exponent`` about boresight.

    The ground plane suppresses the whole back hemisphere.
    """

    exponent: float = 1.0

    def __post_init__(self):
        if self.exponent < 0:
            raise PatternError("exponent must be non-negative")

    def _gain(self, d, b, up):
        return np.maximum(d @ b, 0.0) ** self.exponent


def array_factor(n_elem: int, spacing_wl: float, theta) -> np.ndarray | float:
    """Magnitude of the unnormalized coherent sum of ``n_elem`` phasors.

    ``theta`` is measured from broadside, ``spacing_wl`` is in wavelengths.
    The result peaks at ``n_elem`` for ``theta = 0``.
    """
    if n_elem < 1 or spacing_wl <= 0:
        raise PatternError("need n_elem >= 1 and spacing_wl > 0")
    theta = np.asarray(theta, dtype=float)
    k = np.arange(n_elem)
    phase = 2 * np.pi * spacing_wl * np.multiply.outer(np.sin(theta), k)
    af = np.abs(np.exp(1j * phase).sum(axis=-1))
    return float(af) if af.ndim == 0 else af


@dataclass(frozen=True)
class DirectionalComposite(AntennaPattern):
    """Base element pattern times the magnitude of a small array factor.

    The array-factor angle is the angle off boresight, which makes the
    composite rotationally symmetric about the boresight.
    """

    base: AntennaPattern = DipoleOnGround()
    element_count: int = 5
    spacing_wl: float = 1.5

    def _gain(self, d, b, up):
        return self.base._gain(d, b, up) * array_factor(
            self.element_count, self.spacing_wl, _off_boresight(d, b))


def local_angles(d: np.ndarray, boresight: np.ndarray, up=None):
    """Azimuth and elevation of directions in the element frame.

    The frame has boresight as x, ``up`` (global +z by default, global +y
    when boresight is vertical) orthogonalized as z.
    """
    if up is None:
        up = np.array([0.0, 0.0, 1.0])
        if abs(boresight @ up) > 1 - 1e-6:
            up = np.array([0.0, 1.0, 0.0])
    up = np.asarray(up, dtype=float)
    z = up - (up @ boresight) * boresight
    z /= np.linalg.norm(z)
    y = np.cross(z, boresight)
    az = np.arctan2(d @ y, d @ boresight)
    el = np.arcsin(np.clip(d @ z, -1.0, 1.0))
    return az, el


class Sampled(AntennaPattern):
    """Gain table on a rectangular (azimuth, elevation) grid.

    Queries are bilinearly interpolated; azimuth wraps around at +-pi.
    """

    def __init__(self, azimuth, elevation, gain):
        az = np.asarray(azimuth, dtype=float)
        el = np.asarray(elevation, dtype=float)
        table = np.asarray(gain, dtype=float)
        if az.ndim != 1 or el.ndim != 1 or table.shape != (az.size, el.size):
            raise PatternError("gain table must have shape (len(azimuth), len(elevation))")
        if np.any(np.diff(az) <= 0) or np.any(np.diff(el) <= 0):
            raise PatternError("grid samples must be strictly increasing")
        if abs(az[0] + math.pi) > 1e-9 or az[-1] >= math.pi:
            raise PatternError("azimuth samples must cover [-pi, pi)")
        if abs(el[0] + math.pi / 2) > 1e-9 or abs(el[-1] - math.pi / 2) > 1e-9:
            raise PatternError("elevation samples must cover [-pi/2, pi/2]")
        if np.any(table < 0) or not np.all(np.isfinite(table)):
            raise PatternError("gains must be finite and non-negative")
        self.azimuth, self.elevation, self.table = az, el, table
        wrapped_az = np.append(az, az[0] + 2 * math.pi)
        wrapped = np.vstack([table, table[:1]])
        self._interp = RegularGridInterpolator((wrapped_az, el), wrapped, method="linear")

    def _gain(self, d, b, up):
        az, el = local_angles(d, b, up)
        az = np.where(az >= math.pi, az - 2 * math.pi, az)
        return self._interp(np.column_stack([az, el]))

    @classmethod
    def from_csv(cls, path) -> "Sampled":
        """Load a pattern from ``az_rad,el_rad,gain`` rows (row-major grid)."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["az_rad", "el_rad", "gain"]:
                raise PatternError(f"{path}: expected header az_rad,el_rad,gain")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 3:
                    raise PatternError(f"{path}:{lineno}: expected 3 columns")
                try:
                    rows.append(tuple(float(x) for x in row))
                except ValueError:
                    raise PatternError(f"{path}:{lineno}: non-numeric value") from None
        if not rows:
            raise PatternError(f"{path}: no samples")
        data = np.array(rows)
        az = np.unique(data[:, 0])
        el = np.unique(data[:, 1])
        if len(data) != az.size * el.size:
            raise PatternError(f"{path}: grid incomplete ({len(data)} rows for "
                               f"{az.size} x {el.size} nodes)")
        expected_az = np.repeat(az, el.size)
        expected_el = np.tile(el, az.size)
        if not (np.array_equal(data[:, 0], expected_az) and np.array_equal(data[:, 1], expected_el)):
            raise PatternError(f"{path}: rows must be row-major over (azimuth, elevation)")
        return cls(az, el, data[:, 2].reshape(az.size, el.size))

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["az_rad", "el_rad", "gain"])
            for i, a in enumerate(self.azimuth):
                for j, e in enumerate(self.elevation):
                    w.writerow([repr(float(a)), repr(float(e)), repr(float(self.table[i, j]))])


def gain(pattern: AntennaPattern, direction, boresight, up=None):
    """Functional alias of :meth:`AntennaPattern.gain`."""
    return pattern.gain(direction, boresight, up)
