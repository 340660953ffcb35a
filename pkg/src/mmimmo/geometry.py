"""Uniform linear array geometry and deployment parameters.

All lengths are in meters. Arrays are described by an anchor point (first
element), a unit axis along which the elements are laid out, the element
count and the inter-element spacing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .antenna import ISOTROPIC, AntennaPattern

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_STEP = 1e-4

_UNIT_TOL = 1e-12


class GeometryError(ValueError):
    """Raised on an invalid array layout or an undeployable link."""


def _unit(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise GeometryError(f"{name} must be a 3D vector, got shape {arr.shape}")
    if abs(np.linalg.norm(arr) - 1.0) > _UNIT_TOL:
        raise GeometryError(f"{name} must be a unit vector (norm={np.linalg.norm(arr)!r})")
    return arr


@dataclass(frozen=True)
class CarrierConfig:
    """Carrier frequency; the wavelength is always derived."""

    frequency: float = 26e9
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.frequency > 0:
            raise GeometryError(f"carrier frequency must be positive, got {self.frequency}")

    @property
    def wavelength(self) -> float:
        return self.speed_of_light / self.frequency


@dataclass(frozen=True, eq=False)
class UlaSpec:
    anchor: np.ndarray
    axis: np.ndarray
    n_elements: int
    spacing: float
    boresight: np.ndarray
    pattern: AntennaPattern = field(default=ISOTROPIC)

    def __post_init__(self):
        anchor = np.asarray(self.anchor, dtype=float)
        if anchor.shape != (3,):
            raise GeometryError("anchor must be a 3D point")
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "axis", _unit(self.axis, "axis"))
        object.__setattr__(self, "boresight", _unit(self.boresight, "boresight"))
        if int(self.n_elements) != self.n_elements or self.n_elements < 1:
            raise GeometryError(f"element count must be a positive integer, got {self.n_elements}")
        if not self.spacing > 0:
            raise GeometryError(f"spacing must be positive, got {self.spacing}")

    @property
    def length(self) -> float:
        """Physical extent ``N * d`` of the array."""
        return self.n_elements * self.spacing


@dataclass(frozen=True)
class LinkGeometry:
    tx: UlaSpec
    rx: UlaSpec
    true_distance: float
    estimated_distance: float
    step: float = DEFAULT_STEP
    max_distance_error: float = math.inf

    def __post_init__(self):
        if not self.true_distance > 0 or not self.estimated_distance > 0:
            raise GeometryError("link distances must be positive")
        if not self.step > 0:
            raise GeometryError("positioning step must be positive")
        if abs(self.true_distance - self.estimated_distance) > self.max_distance_error:
            raise GeometryError(
                f"|D - D_hat| = {abs(self.true_distance - self.estimated_distance):g} m exceeds "
                f"the configured estimation error {self.max_distance_error:g} m")


def parallel_link(n_elements: int, spacing: float, distance: float,
                  estimated_distance: float | None = None,
                  tx_pattern: AntennaPattern = ISOTROPIC,
                  rx_pattern: AntennaPattern = ISOTROPIC,
                  step: float = DEFAULT_STEP) -> LinkGeometry:
    """Two identical parallel ULAs facing each other, centers aligned.

    The transmit array lies on the x axis centered at the origin with
    boresight +z; the receive array is the same array shifted to
    ``z = distance`` with boresight -z. Elements of both arrays are
    numbered in increasing x.
    """
    if estimated_distance is None:
        estimated_distance = distance
    half = 0.5 * (n_elements - 1) * spacing
    x = np.array([1.0, 0.0, 0.0])
    tx = UlaSpec(np.array([-half, 0.0, 0.0]), x, n_elements, spacing,
                 np.array([0.0, 0.0, 1.0]), tx_pattern)
    rx = UlaSpec(np.array([-half, 0.0, distance]), x, n_elements, spacing,
                 np.array([0.0, 0.0, -1.0]), rx_pattern)
    return LinkGeometry(tx, rx, distance, estimated_distance, step)


def compute_num_streams(length: float, wavelength: float, estimated_distance: float) -> int:
    """Largest power of two not exceeding ``L^2 / (lambda * D_hat)``.

    Examples
    --------
    >>> compute_num_streams(1.3, 0.0115305, 0.9)
    128
    """
    if length <= 0 or wavelength <= 0 or estimated_distance <= 0:
        raise GeometryError("length, wavelength and distance must be positive")
    ratio = length ** 2 / (wavelength * estimated_distance)
    if ratio < 1:
        raise GeometryError(
            f"L^2/(lambda*D_hat) = {ratio:.4g} < 1: no stream deployable")
    k = math.floor(math.log2(ratio))
    # guard against log2 rounding at exact powers of two
    while 2 ** (k + 1) <= ratio:
        k += 1
    while 2 ** k > ratio:
        k -= 1
    return 2 ** k


def compute_spacing(wavelength: float, estimated_distance: float, n_streams: int,
                    step: float = DEFAULT_STEP) -> float:
    """Inter-element spacing quantized to the positioning step.

    The total array length ``d * N_U`` is the ideal length
    ``sqrt(lambda * D_hat * N_U)`` rounded up to a multiple of ``step``.
    """
    if wavelength <= 0 or estimated_distance <= 0 or step <= 0:
        raise GeometryError("wavelength, distance and step must be positive")
    if n_streams < 1 or n_streams & (n_streams - 1):
        raise GeometryError(f"stream count must be a power of 2, got {n_streams}")
    ideal = math.sqrt(wavelength * estimated_distance * n_streams)
    return step / n_streams * math.ceil(ideal / step)


def element_positions(ula: UlaSpec) -> np.ndarray:
    """``(N, 3)`` array of element coordinates."""
    k = np.arange(ula.n_elements)[:, None]
    return ula.anchor[None, :] + k * ula.spacing * ula.axis[None, :]


def pairwise_distances(geometry: LinkGeometry) -> np.ndarray:
    """``(N_rx, N_tx)`` matrix of receive-to-transmit element distances."""
    rx = element_positions(geometry.rx)
    tx = element_positions(geometry.tx)
    dist = np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=-1)
    if np.any(dist == 0):
        n, q = np.argwhere(dist == 0)[0]
        raise GeometryError(f"rx element {n + 1} coincides with tx element {q + 1}")
    return dist


@dataclass(frozen=True)
class ConditionRatios:
    r1: float
    r2: float
    r2_block: float


def condition_ratios(geometry: LinkGeometry, wavelength: float, n_streams: int,
                     n_blocks: int = 1) -> ConditionRatios:
    """Closeness of the built link to the full-rank LOS conditions.

    ``r1`` compares ``L^2/(lambda*D_hat)`` (with ``L = N_U * d``) to the
    stream count and is 1 when the length condition holds exactly.
    ``r2`` and ``r2_block`` measure the far-range condition over the whole
    array and over one DFT block.
    """
    if n_blocks < 1 or n_streams % n_blocks:
        raise GeometryError(f"block count {n_blocks} does not divide {n_streams} streams")
    d = geometry.tx.spacing
    dist = geometry.estimated_distance
    length = n_streams * d
    return ConditionRatios(
        r1=length ** 2 / (wavelength * dist) / n_streams,
        r2=dist / (d * n_streams),
        r2_block=dist / (d * (n_streams // n_blocks)),
    )
