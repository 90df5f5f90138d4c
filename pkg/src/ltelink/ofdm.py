"""OFDM modulation and demodulation.

Unitary DFT convention (1/sqrt(N) both ways), so signal power is preserved
across the transform and a cyclic prefix equal to the last cp_len time samples
is prepended to every symbol.  The FFT implementation is required to agree
with the explicit coefficient matrix to 1e-10 up to n = 2048.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import SystemConfig, used_subcarrier_bins

__all__ = [
    "DftSpec",
    "TimeDomainSignal",
    "dft_coefficient",
    "dft_matrix",
    "ofdm_modulate",
    "ofdm_demodulate",
    "modulate_frame",
    "demodulate_frame",
]


def dft_coefficient(n: int, l: int, k: int) -> complex:
    """Entry (l, k) of the unitary n-point DFT matrix: exp(-2j*pi*l*k/n)/sqrt(n)."""
    if not 0 <= l < n or not 0 <= k < n:
        raise ValueError(f"indices out of range for n={n}: (l={l}, k={k})")
    return np.exp(-2j * np.pi * l * k / n) / np.sqrt(n)


def dft_matrix(n: int) -> np.ndarray:
    """Full unitary DFT matrix; O(n^2) memory, intended for small-n checks."""
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


@dataclass(frozen=True)
class DftSpec:
    """Transform size tag; matrix() materializes the unitary DFT."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("transform size must be positive")

    def matrix(self) -> np.ndarray:
        return dft_matrix(self.n)


@dataclass(frozen=True)
class TimeDomainSignal:
    """Per-antenna baseband sample streams, an integer number of OFDM symbols."""

    samples: np.ndarray  # (n_antennas, n_samples) complex128
    symbol_len: int  # n_fft + cp_len

    def __post_init__(self) -> None:
        samples = np.atleast_2d(np.asarray(self.samples, dtype=np.complex128))
        if self.symbol_len < 1:
            raise ValueError("symbol_len must be positive")
        if samples.shape[1] % self.symbol_len != 0:
            raise ValueError(
                f"stream length {samples.shape[1]} is not a multiple of "
                f"symbol_len {self.symbol_len}"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def n_antennas(self) -> int:
        return self.samples.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.samples.shape[1] // self.symbol_len


def modulate_frame(values: np.ndarray, config: SystemConfig) -> TimeDomainSignal:
    """IDFT + cyclic prefix for a whole (n_antennas, n_used, n_symbols) grid.

    Used subcarriers are scattered into their FFT bins (all other bins zero),
    the unitary inverse DFT is applied per symbol, and the last cp_len output
    samples are prepended as the cyclic prefix.
    """
    values = np.asarray(values, dtype=np.complex128)
    if values.ndim != 3 or values.shape[1] != config.n_used:
        raise ValueError(
            f"grid must be (antennas, {config.n_used}, symbols); got {values.shape}"
        )
    bins = used_subcarrier_bins(config)
    n_ant, _, n_sym = values.shape
    spectrum = np.zeros((n_ant, n_sym, config.n_fft), dtype=np.complex128)
    spectrum[:, :, bins] = values.transpose(0, 2, 1)
    time = np.fft.ifft(spectrum, axis=-1) * np.sqrt(config.n_fft)
    if config.cp_len:
        time = np.concatenate([time[:, :, -config.cp_len :], time], axis=-1)
    return TimeDomainSignal(time.reshape(n_ant, -1), config.symbol_len)


def demodulate_frame(signal: TimeDomainSignal | np.ndarray, config: SystemConfig) -> np.ndarray:
    """CP removal + DFT + used-bin extraction; returns (antennas, n_used, n_symbols)."""
    samples = signal.samples if isinstance(signal, TimeDomainSignal) else np.atleast_2d(signal)
    n_ant, n_samples = samples.shape
    if n_samples % config.symbol_len != 0:
        raise ValueError(
            f"stream length {n_samples} is not a multiple of symbol length "
            f"{config.symbol_len}"
        )
    sym = samples.reshape(n_ant, -1, config.symbol_len)[:, :, config.cp_len :]
    spectrum = np.fft.fft(sym, axis=-1) / np.sqrt(config.n_fft)
    return spectrum[:, :, used_subcarrier_bins(config)].transpose(0, 2, 1)


def ofdm_modulate(grid_column: np.ndarray, config: SystemConfig) -> np.ndarray:
    """Modulate one grid column (length n_used) into one CP-prefixed OFDM symbol."""
    grid_column = np.asarray(grid_column, dtype=np.complex128)
    if grid_column.shape != (config.n_used,):
        raise ValueError(f"expected {config.n_used} subcarriers, got {grid_column.shape}")
    return modulate_frame(grid_column[None, :, None], config).samples[0]


def ofdm_demodulate(rx_symbol: np.ndarray, config: SystemConfig) -> np.ndarray:
    """Demodulate one received OFDM symbol (length n_fft + cp_len) to used bins."""
    rx_symbol = np.asarray(rx_symbol, dtype=np.complex128)
    if rx_symbol.shape != (config.symbol_len,):
        raise ValueError(
            f"expected one symbol of {config.symbol_len} samples, got {rx_symbol.shape}"
        )
    return demodulate_frame(rx_symbol[None, :], config)[0, :, 0]
