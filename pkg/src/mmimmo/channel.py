"""Narrowband propagation matrices.

Three sources are supported: the closed-form free-space (pure LOS) model,
ray sets imported from an external tracer, and a synthetic single-bounce
point-scatterer model. Matrices are indexed ``H[rx, tx]``.

Direction conventions for rays: ``dod`` is the departure direction leaving
the transmit element; ``doa`` is the propagation direction of the wave as it
reaches the receive element (so it points *into* the receiver, and the
receive gain is evaluated toward ``-doa``).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .antenna import ISOTROPIC, AntennaPattern
from .geometry import CarrierConfig, GeometryError, LinkGeometry, element_positions, pairwise_distances

RAY_HEADER = ["rx_index", "tx_index", "alpha_re", "alpha_im",
              "doa_x", "doa_y", "doa_z", "dod_x", "dod_y", "dod_z"]
RAY_UNIT_TOL = 1e-6

FREE_SPACE = "FreeSpace"
RAY_FILE = "RayFile"
SYNTHETIC = "Synthetic"


class RayFileError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        super().__init__(message if lineno is None else f"line {lineno}: {message}")


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    entries: np.ndarray
    carrier: CarrierConfig
    provenance: str

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=complex)
        if h.ndim != 2 or 0 in h.shape:
            raise ValueError(f"channel matrix must be 2D and non-empty, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ValueError("channel matrix has non-finite entries")
        object.__setattr__(self, "entries", h)

    @property
    def shape(self):
        return self.entries.shape


@dataclass(eq=False)
class RayField:
    """Flat storage of rays for an ``(n_rx, n_tx)`` array pair.

    Indices are 0-based here; the file format is 1-based. A pair may carry
    any number of rays, including none.
    """

    shape: tuple[int, int]
    rx_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    tx_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    alpha: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    doa: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    dod: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    def __post_init__(self):
        self.rx_index = np.asarray(self.rx_index, dtype=int)
        self.tx_index = np.asarray(self.tx_index, dtype=int)
        self.alpha = np.asarray(self.alpha, dtype=complex)
        self.doa = np.asarray(self.doa, dtype=float).reshape(-1, 3)
        self.dod = np.asarray(self.dod, dtype=float).reshape(-1, 3)
        k = len(self.alpha)
        if not all(len(a) == k for a in (self.rx_index, self.tx_index, self.doa, self.dod)):
            raise ValueError("ray attribute arrays have inconsistent lengths")
        n_rx, n_tx = self.shape
        if k and (self.rx_index.min() < 0 or self.rx_index.max() >= n_rx
                  or self.tx_index.min() < 0 or self.tx_index.max() >= n_tx):
            raise ValueError(f"ray index outside the {n_rx}x{n_tx} array pair")
        for name, v in (("doa", self.doa), ("dod", self.dod)):
            if k and np.any(np.abs(np.linalg.norm(v, axis=1) - 1) > RAY_UNIT_TOL):
                raise ValueError(f"{name} vectors must be unit length")

    def __len__(self):
        return len(self.alpha)

    def rays_per_pair(self) -> np.ndarray:
        counts = np.zeros(self.shape, dtype=int)
        np.add.at(counts, (self.rx_index, self.tx_index), 1)
        return counts

    def scaled(self, k: complex) -> "RayField":
        return RayField(self.shape, self.rx_index, self.tx_index, self.alpha * k, self.doa, self.dod)


@dataclass(frozen=True)
class PointScatterer:
    position: np.ndarray
    reflection: complex = 1.0

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (3,):
            raise ValueError("scatterer position must be a 3D point")
        if abs(self.reflection) > 1:
            raise ValueError(f"|reflection| must be <= 1, got {abs(self.reflection)}")
        object.__setattr__(self, "position", pos)


def _spherical_wave(path_length, wavelength):
    return wavelength / (4 * np.pi * path_length) * np.exp(-2j * np.pi * path_length / wavelength)


def fs_channel(geometry: LinkGeometry, carrier: CarrierConfig) -> ChannelMatrix:
    """Free-space channel: one spherical wave per element pair, no element gain."""
    h = _spherical_wave(pairwise_distances(geometry), carrier.wavelength)
    return ChannelMatrix(h, carrier, FREE_SPACE)


def ray_channel(rays: RayField, tx_pattern: AntennaPattern = ISOTROPIC,
                rx_pattern: AntennaPattern = ISOTROPIC,
                tx_boresight=(0.0, 0.0, 1.0), rx_boresight=(0.0, 0.0, -1.0),
                carrier: CarrierConfig | None = None,
                provenance: str = RAY_FILE) -> ChannelMatrix:
    """Sum rays per element pair, weighting each by both element gains."""
    h = np.zeros(rays.shape, dtype=complex)
    if len(rays):
        g_tx = tx_pattern.gain(rays.dod, np.asarray(tx_boresight, dtype=float))
        g_rx = rx_pattern.gain(-rays.doa, np.asarray(rx_boresight, dtype=float))
        np.add.at(h, (rays.rx_index, rays.tx_index), rays.alpha * g_rx * g_tx)
    return ChannelMatrix(h, carrier or CarrierConfig(), provenance)


def link_ray_channel(rays: RayField, geometry: LinkGeometry, carrier: CarrierConfig,
                     provenance: str = RAY_FILE) -> ChannelMatrix:
    """:func:`ray_channel` using the patterns and boresights of ``geometry``."""
    expected = (geometry.rx.n_elements, geometry.tx.n_elements)
    if tuple(rays.shape) != expected:
        raise GeometryError(f"ray field is {rays.shape[0]}x{rays.shape[1]} but the link "
                            f"is {expected[0]}x{expected[1]}")
    return ray_channel(rays, geometry.tx.pattern, geometry.rx.pattern,
                       geometry.tx.boresight, geometry.rx.boresight, carrier, provenance)


def synth_rays(geometry: LinkGeometry, scatterers, carrier: CarrierConfig) -> RayField:
    """LOS ray plus one single-bounce ray per scatterer for every element pair."""
    lam = carrier.wavelength
    rx = element_positions(geometry.rx)
    tx = element_positions(geometry.tx)
    n_rx, n_tx = len(rx), len(tx)
    ri, ti = np.meshgrid(np.arange(n_rx), np.arange(n_tx), indexing="ij")
    ri, ti = ri.ravel(), ti.ravel()

    los = rx[ri] - tx[ti]
    dist = np.linalg.norm(los, axis=1)
    if np.any(dist == 0):
        raise GeometryError("coincident tx/rx elements")
    u = los / dist[:, None]
    rx_idx, tx_idx, alpha, doa, dod = [ri], [ti], [_spherical_wave(dist, lam)], [u], [u]

    for s in scatterers:
        to_s = s.position[None, :] - tx[ti]
        from_s = rx[ri] - s.position[None, :]
        l1 = np.linalg.norm(to_s, axis=1)
        l2 = np.linalg.norm(from_s, axis=1)
        if np.any(l1 == 0) or np.any(l2 == 0):
            raise GeometryError(f"scatterer at {s.position.tolist()} coincides with an element")
        rx_idx.append(ri)
        tx_idx.append(ti)
        alpha.append(s.reflection * _spherical_wave(l1 + l2, lam))
        dod.append(to_s / l1[:, None])
        doa.append(from_s / l2[:, None])

    return RayField((n_rx, n_tx), np.concatenate(rx_idx), np.concatenate(tx_idx),
                    np.concatenate(alpha), np.concatenate(doa), np.concatenate(dod))


def _parse_row(row, lineno, shape):
    if len(row) != len(RAY_HEADER):
        raise RayFileError(f"expected {len(RAY_HEADER)} columns, got {len(row)}", lineno)
    try:
        n, m = int(row[0]), int(row[1])
        vals = [float(x) for x in row[2:]]
    except ValueError:
        raise RayFileError("malformed number", lineno) from None
    if n < 1 or m < 1:
        raise RayFileError("indices are 1-based", lineno)
    if shape is not None and (n > shape[0] or m > shape[1]):
        raise RayFileError(f"pair ({n},{m}) exceeds array dimensions {shape[0]}x{shape[1]}", lineno)
    doa = np.array(vals[2:5])
    dod = np.array(vals[5:8])
    for name, v in (("doa", doa), ("dod", dod)):
        if abs(np.linalg.norm(v) - 1) > RAY_UNIT_TOL:
            raise RayFileError(f"{name} is not a unit vector (norm {np.linalg.norm(v):.9g})", lineno)
    return n - 1, m - 1, complex(vals[0], vals[1]), doa, dod


def _rows(path):
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is not None and [h.strip() for h in header] != RAY_HEADER:
            raise RayFileError(f"expected header {','.join(RAY_HEADER)}", 1)
        for lineno, row in enumerate(reader, start=2):
            if row and "".join(row).strip():
                yield lineno, row


def _to_field(parsed, shape):
    if shape is None:
        shape = (max((p[0] for p in parsed), default=-1) + 1,
                 max((p[1] for p in parsed), default=-1) + 1)
    if not parsed:
        return RayField(tuple(shape))
    rx_i, tx_i, alpha, doa, dod = zip(*parsed)
    return RayField(tuple(shape), rx_i, tx_i, alpha, doa, dod)


def load_rays(path, shape: tuple[int, int] | None = None) -> RayField:
    """Parse a ray CSV file, failing on the first bad line.

    If ``shape`` is omitted it is inferred from the largest indices present
    (an empty file then yields a ``(0, 0)`` field).
    """
    return _to_field([_parse_row(row, lineno, shape) for lineno, row in _rows(path)], shape)


def validate_rays(path, shape: tuple[int, int] | None = None):
    """Parse every line, collecting errors instead of stopping.

    Returns ``(field, errors)``; ``field`` holds the valid rows only.
    """
    parsed, errors = [], []
    try:
        for lineno, row in _rows(path):
            try:
                parsed.append(_parse_row(row, lineno, shape))
            except RayFileError as exc:
                errors.append(exc)
    except RayFileError as exc:
        errors.append(exc)
    return _to_field(parsed, shape), errors


def save_rays(rays: RayField, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RAY_HEADER)
        for k in range(len(rays)):
            a = complex(rays.alpha[k])
            w.writerow([int(rays.rx_index[k]) + 1, int(rays.tx_index[k]) + 1, repr(a.real), repr(a.imag),
                        *map(repr, rays.doa[k].tolist()), *map(repr, rays.dod[k].tolist())])
