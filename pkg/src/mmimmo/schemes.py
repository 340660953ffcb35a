"""Spatial multiplexing schemes and their equivalent channels.

Every scheme reduces a propagation matrix ``H`` to an ``N_U x N_U``
equivalent channel ``G = rho * decoder @ H @ precoder``. MRT precoding
always uses the conjugate transpose of ``H``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import block_diag

from .channel import ChannelMatrix


class SchemeKind(str, enum.Enum):
    DFT_SM_MRT = "DftSmMrt"
    BLOCK_DFT_SM_MRT = "BlockDftSmMrt"
    SVD = "Svd"


class SchemeError(ValueError):
    def __init__(self, message, key=None):
        self.key = key
        super().__init__(message)


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme kind and block layout.

    ``n_streams`` data streams are split into ``n_blocks`` DFT blocks of
    ``block_size`` symbols; each block gets ``n_cp`` cyclic-prefix antennas.
    """

    kind: SchemeKind
    n_streams: int
    n_blocks: int = 1
    n_cp: int = 0
    power: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        n_u = self.n_streams
        if n_u < 1 or n_u & (n_u - 1):
            raise SchemeError(f"n_u={n_u} is not a power of 2", "n_u")
        if self.n_blocks < 1 or n_u % self.n_blocks:
            raise SchemeError(f"n_s={self.n_blocks} does not divide n_u={n_u}", "n_s")
        if not 0 <= self.n_cp <= self.block_size:
            raise SchemeError(f"n_cp={self.n_cp} outside [0, n_d={self.block_size}]", "n_cp")
        if self.kind != SchemeKind.BLOCK_DFT_SM_MRT and (self.n_blocks != 1 or self.n_cp != 0):
            raise SchemeError(f"{self.kind.value} requires n_s=1 and n_cp=0", "n_s")
        if not self.power > 0:
            raise SchemeError("power budget must be positive", "power")

    @property
    def block_size(self) -> int:
        return self.n_streams // self.n_blocks

    @property
    def extended_block_size(self) -> int:
        return self.block_size + self.n_cp

    @property
    def n_antennas(self) -> int:
        return self.n_blocks * self.extended_block_size


@dataclass(frozen=True, eq=False)
class EquivalentChannel:
    G: np.ndarray
    rho: float
    scheme: SchemeConfig


@dataclass(frozen=True, eq=False)
class SvdFactors:
    U: np.ndarray
    delta: np.ndarray


@dataclass(frozen=True, eq=False)
class BlockMapping:
    A: np.ndarray
    B: np.ndarray
    A_prime: np.ndarray
    B_prime: np.ndarray
    T: np.ndarray
    R: np.ndarray


@lru_cache(maxsize=64)
def _twiddles(n: int) -> np.ndarray:
    """Unnormalized DFT matrix with exact entries on the real/imaginary axes."""
    k = np.arange(n)
    w = np.exp(-2j * np.pi * k / n)
    for q, val in enumerate((1, -1j, -1, 1j)):
        if (q * n) % 4 == 0:
            w[q * n // 4] = val
    m = w[np.outer(k, k) % n]
    m.flags.writeable = False
    return m


def butler(n: int, inverse: bool = False) -> np.ndarray:
    """Unitary DFT (or IDFT) matrix of size ``n``.

    >>> np.allclose(butler(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    True
    """
    if n < 1:
        raise ValueError("Butler matrix size must be >= 1")
    m = _twiddles(n) / np.sqrt(n)
    return m.conj().T if inverse else m


def cp_insertion(n_d: int, n_cp: int) -> np.ndarray:
    """``(n_d + n_cp, n_d)`` selector copying the last ``n_cp`` symbols in front."""
    a = np.zeros((n_d + n_cp, n_d))
    a[np.arange(n_cp), n_d - n_cp + np.arange(n_cp)] = 1
    a[n_cp + np.arange(n_d), np.arange(n_d)] = 1
    return a


def cp_removal(n_d: int, n_cp: int) -> np.ndarray:
    """``(n_d, n_d + n_cp)`` selector discarding the first ``n_cp`` entries."""
    b = np.zeros((n_d, n_d + n_cp))
    b[np.arange(n_d), n_cp + np.arange(n_d)] = 1
    return b


def _unscaled_maps(cfg: SchemeConfig):
    # T and R times sqrt(n_d); keeps small-size products exact under FMA
    n_d, n_cp = cfg.block_size, cfg.n_cp
    w = _twiddles(n_d)
    a_p = cp_insertion(n_d, n_cp) @ w.conj().T
    b_p = w @ cp_removal(n_d, n_cp)
    return block_diag(*[a_p] * cfg.n_blocks), block_diag(*[b_p] * cfg.n_blocks)


def build_block_mapping(cfg: SchemeConfig) -> BlockMapping:
    if cfg.kind == SchemeKind.SVD:
        raise SchemeError("the SVD scheme has no block mapping", "kind")
    n_d, n_cp = cfg.block_size, cfg.n_cp
    a = cp_insertion(n_d, n_cp)
    b = cp_removal(n_d, n_cp)
    a_p = a @ butler(n_d, inverse=True)
    b_p = butler(n_d) @ b
    return BlockMapping(a, b, a_p, b_p,
                        block_diag(*[a_p] * cfg.n_blocks),
                        block_diag(*[b_p] * cfg.n_blocks))


def normalize_power(precoder: np.ndarray, power: float = 1.0) -> float:
    """Scale making the total radiated power of unit-variance streams ``power``."""
    norm = np.linalg.norm(precoder)
    if norm == 0:
        raise SchemeError("cannot normalize a zero precoder")
    return float(np.sqrt(power) / norm)


def _entries(h) -> np.ndarray:
    return h.entries if isinstance(h, ChannelMatrix) else np.asarray(h, dtype=complex)


def _check_square(h, n):
    if h.shape != (n, n):
        raise SchemeError(f"channel is {h.shape[0]}x{h.shape[1]}, scheme needs {n}x{n}")


def _mrt(h, cfg: SchemeConfig) -> EquivalentChannel:
    t_u, r_u = _unscaled_maps(cfg)
    n_d = cfg.block_size
    h_herm = h.conj().T
    rho = normalize_power(h_herm @ t_u / np.sqrt(n_d), cfg.power)
    g = (r_u @ (h @ h_herm) @ t_u) * (rho / n_d)
    return EquivalentChannel(g, rho, cfg)


def dft_sm_mrt(H, power: float = 1.0) -> EquivalentChannel:
    """Precoder ``rho H^H M_IDFT``, decoder ``M_DFT``."""
    h = _entries(H)
    if h.shape[0] != h.shape[1]:
        raise SchemeError(f"channel must be square, got {h.shape}")
    return _mrt(h, SchemeConfig(SchemeKind.DFT_SM_MRT, h.shape[0], power=power))


def bdft_sm_mrt(H, cfg: SchemeConfig) -> EquivalentChannel:
    """Precoder ``rho H^H T``, decoder ``R`` (see :func:`build_block_mapping`)."""
    h = _entries(H)
    _check_square(h, cfg.n_antennas)
    if cfg.kind == SchemeKind.SVD:
        raise SchemeError("the SVD scheme has no block mapping", "kind")
    return _mrt(h, cfg)


def svd_scheme(H, power: float = 1.0) -> tuple[EquivalentChannel, SvdFactors]:
    """Eigen-beamforming on ``H H^dagger``.

    The eigenbasis comes from the SVD of ``H`` itself (``H H^dagger =
    U diag(s^2) U^dagger``), which keeps tiny eigenvalues non-negative.
    """
    h = _entries(H)
    if h.shape[0] != h.shape[1]:
        raise SchemeError(f"channel must be square, got {h.shape}")
    if not np.all(np.isfinite(h)):
        raise SchemeError("channel has non-finite entries")
    u, s, _ = np.linalg.svd(h)
    delta = s ** 2
    cfg = SchemeConfig(SchemeKind.SVD, h.shape[0], power=power)
    rho = normalize_power(h.conj().T @ u, power)
    return EquivalentChannel(np.diag(rho * delta).astype(complex), rho, cfg), SvdFactors(u, delta)


def equivalent_channel(H, cfg: SchemeConfig) -> EquivalentChannel:
    """Dispatch on ``cfg.kind``."""
    if cfg.kind == SchemeKind.DFT_SM_MRT:
        _check_square(_entries(H), cfg.n_streams)
        return dft_sm_mrt(H, cfg.power)
    if cfg.kind == SchemeKind.BLOCK_DFT_SM_MRT:
        return bdft_sm_mrt(H, cfg)
    _check_square(_entries(H), cfg.n_streams)
    return svd_scheme(H, cfg.power)[0]
