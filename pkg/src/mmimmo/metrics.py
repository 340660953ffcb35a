"""SIR, spectral efficiency and complexity figures of merit."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .schemes import EquivalentChannel, SchemeConfig, SchemeKind


@dataclass(frozen=True)
class SeBounds:
    """Per-stream spectral efficiency limits in bits/s/Hz."""

    s_min: float = 1.0
    s_max: float = 8.0

    def __post_init__(self):
        if not 0 < self.s_min <= self.s_max:
            raise ValueError(f"need 0 < s_min <= s_max, got ({self.s_min}, {self.s_max})")


@dataclass(frozen=True, eq=False)
class StreamMetrics:
    sir: np.ndarray
    c: np.ndarray
    c_practical: np.ndarray
    total_se: float


@dataclass(frozen=True)
class ComplexityRatios:
    mu_tx: float
    mu_rx: float

    @property
    def rounded(self) -> tuple[int, int]:
        return round(self.mu_tx), round(self.mu_rx)


def sir(G) -> np.ndarray:
    """Per-row ratio of diagonal power to off-diagonal power.

    A row with no interference is ``inf``; a row with neither signal nor
    interference is a dead stream with SIR 0.
    """
    g = G.G if isinstance(G, EquivalentChannel) else np.asarray(G)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"G must be square, got shape {g.shape}")
    p = np.abs(np.asarray(g, dtype=complex)) ** 2
    signal = np.diag(p).copy()
    # zero the diagonal rather than subtract it, so clean rows stay exactly 0
    np.fill_diagonal(p, 0.0)
    interference = p.sum(axis=1)
    out = np.zeros_like(signal)
    live = interference > 0
    out[live] = signal[live] / interference[live]
    out[~live & (signal > 0)] = np.inf
    return out


def stream_se(sir_values) -> np.ndarray:
    return np.log2(1.0 + np.asarray(sir_values, dtype=float))


def practical_se(c, bounds: SeBounds = SeBounds()) -> np.ndarray:
    capped = np.minimum(np.asarray(c, dtype=float), bounds.s_max)
    return np.where(capped > bounds.s_min, capped, 0.0)


def total_se(c_practical) -> float:
    return float(np.sum(c_practical))


def stream_metrics(G, bounds: SeBounds = SeBounds()) -> StreamMetrics:
    s = sir(G)
    c = stream_se(s)
    cp = practical_se(c, bounds)
    return StreamMetrics(s, c, cp, total_se(cp))


def phi_ratios(s_scheme: float, s_svd: float, s_scheme_fs: float) -> tuple[float, float]:
    """``(phi_svd, phi_fs)`` in percent."""
    if s_svd == 0 or s_scheme_fs == 0:
        raise ZeroDivisionError("reference spectral efficiency is zero")
    return 100.0 * (s_scheme / s_svd), 100.0 * (s_scheme / s_scheme_fs)


def _svd_cost(n_u):
    return n_u ** 3 + 2 * n_u ** 2, n_u ** 3 + n_u ** 2


def _scheme_cost(cfg: SchemeConfig):
    n_u = cfg.n_streams
    if cfg.kind == SchemeKind.SVD:
        return _svd_cost(n_u)
    log_block = math.log2(cfg.block_size)
    tx = (n_u + cfg.n_blocks * cfg.n_cp) ** 2 + n_u * log_block
    rx = n_u * log_block
    return tx, rx


def complexity_mu(cfg: SchemeConfig) -> ComplexityRatios:
    """SVD precoding/decoding cost over the scheme's, per the O() laws with unit constants.

    >>> complexity_mu(SchemeConfig("DftSmMrt", 64)).rounded
    (60, 693)
    """
    if cfg.n_streams < 2:
        raise ValueError("complexity ratios need at least 2 streams")
    svd_tx, svd_rx = _svd_cost(cfg.n_streams)
    tx, rx = _scheme_cost(cfg)
    if rx == 0:
        # one-symbol blocks need no DFT at the receiver
        return ComplexityRatios(svd_tx / tx, math.inf)
    return ComplexityRatios(svd_tx / tx, svd_rx / rx)
