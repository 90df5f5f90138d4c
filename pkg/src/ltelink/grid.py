"""LTE-style time-frequency resource lattice.

Builds the per-slot grid of (subcarrier, OFDM symbol, antenna port) cells,
places cell-specific reference signals on the two pilot-bearing symbols of a
short-CP slot, and maps/extracts data and pilot symbols.  All objects are
immutable after construction and safe to share across concurrent trials.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Sequence

import numpy as np

__all__ = [
    "Constellation",
    "SystemConfig",
    "CellLabel",
    "PilotPattern",
    "ResourceGrid",
    "GridLayout",
    "LTE_PROFILES",
    "PILOT_SYMBOLS",
    "PILOT_SPACING",
    "used_subcarrier_bins",
    "build_pilot_pattern",
    "map_to_grid",
    "extract_data",
    "extract_pilots",
    "pilot_values_for_port",
    "random_pilot_sequence",
]

# bandwidth (MHz) -> (FFT size, occupied subcarriers incl. DC, sampling MHz)
LTE_PROFILES: dict[float, tuple[int, int, float]] = {
    1.25: (128, 76, 1.92),
    2.5: (256, 151, 3.84),
    5.0: (512, 301, 7.68),
    10.0: (1024, 601, 15.36),
    15.0: (1536, 901, 23.04),
    20.0: (2048, 1201, 30.72),
}

# Reference signals live in the first and fifth symbol of a short-CP slot.
PILOT_SYMBOLS: tuple[int, int] = (0, 4)
PILOT_SPACING: int = 6
_SECOND_SYMBOL_SHIFT = 3  # frequency shift of the fifth-symbol comb
_PORT_SHIFT = 3  # frequency shift between antenna ports

_QPSK_CORNERS = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


class Constellation(Enum):
    QPSK = "qpsk"
    QAM16 = "qam16"

    @property
    def bits_per_symbol(self) -> int:
        return 2 if self is Constellation.QPSK else 4


class CellLabel(IntEnum):
    DATA = 0
    PILOT = 1
    NULL = 2


@dataclass(frozen=True)
class SystemConfig:
    """Static link parameters of one downlink configuration.

    The (bandwidth_mhz, n_fft) pair must match one of the standard transmission
    profiles; the used subcarriers sit centered around a nulled DC bin with
    equal guard bands.  Only the short-CP slot format (7 symbols) is supported
    by the pilot machinery; a 6-symbol slot validates but cannot carry pilots.
    """

    bandwidth_mhz: float = 5.0
    n_fft: int = 512
    n_used: int = 300
    cp_len: int = 16
    n_symbols_per_slot: int = 7
    n_tx: int = 2
    n_rx: int = 2
    constellation: Constellation = Constellation.QPSK

    def __post_init__(self) -> None:
        if self.bandwidth_mhz not in LTE_PROFILES:
            raise ValueError(
                f"unknown bandwidth {self.bandwidth_mhz} MHz; "
                f"choose from {sorted(LTE_PROFILES)}"
            )
        profile_fft = LTE_PROFILES[self.bandwidth_mhz][0]
        if self.n_fft != profile_fft:
            raise ValueError(
                f"n_fft={self.n_fft} does not match the {self.bandwidth_mhz} MHz "
                f"profile (expected {profile_fft})"
            )
        if not 0 < self.n_used < self.n_fft:
            raise ValueError(f"n_used must be in (0, n_fft); got {self.n_used}")
        if not 0 <= self.cp_len < self.n_fft:
            raise ValueError(f"cp_len must be in [0, n_fft); got {self.cp_len}")
        if self.n_symbols_per_slot not in (6, 7):
            raise ValueError("n_symbols_per_slot must be 6 (long CP) or 7 (short CP)")
        if self.n_tx not in (1, 2) or self.n_rx not in (1, 2):
            raise ValueError("n_tx and n_rx must be 1 or 2")
        if not isinstance(self.constellation, Constellation):
            raise ValueError(f"unsupported constellation: {self.constellation!r}")

    @classmethod
    def from_profile(cls, bandwidth_mhz: float, **overrides) -> "SystemConfig":
        """Build a config from a named bandwidth profile.

        n_fft is taken from the profile table and n_used defaults to the
        occupied-subcarrier count minus the nulled DC bin.
        """
        if bandwidth_mhz not in LTE_PROFILES:
            raise ValueError(
                f"unknown bandwidth {bandwidth_mhz} MHz; choose from {sorted(LTE_PROFILES)}"
            )
        n_fft, occupied, _ = LTE_PROFILES[bandwidth_mhz]
        overrides.setdefault("n_used", occupied - 1)
        return cls(bandwidth_mhz=bandwidth_mhz, n_fft=n_fft, **overrides)

    @property
    def symbol_len(self) -> int:
        return self.n_fft + self.cp_len

    @property
    def sample_rate_mhz(self) -> float:
        return LTE_PROFILES[self.bandwidth_mhz][2]


def used_subcarrier_bins(config: SystemConfig) -> np.ndarray:
    """FFT bin index of each used subcarrier, in ascending physical frequency.

    Index d in [0, n_used) maps to the d-th occupied bin counting up from the
    lowest negative frequency, skipping the nulled DC bin.
    """
    n_low = config.n_used // 2
    n_high = config.n_used - n_low
    return np.concatenate(
        [
            np.arange(config.n_fft - n_low, config.n_fft),
            np.arange(1, n_high + 1),
        ]
    )


@dataclass(frozen=True)
class PilotPattern:
    """Reference-signal placement for all antenna ports of one slot.

    entries holds (subcarrier, symbol, port) rows sorted by (port, symbol,
    subcarrier); that ordering defines both the pilot-sequence assignment and
    the observation-vector ordering used by the estimators.
    """

    entries: np.ndarray
    pilot_spacing: int
    n_used: int
    n_symbols: int
    n_ports: int

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.int64)
        if entries.ndim != 2 or entries.shape[1] != 3:
            raise ValueError("entries must be an (n, 3) array of (subcarrier, symbol, port)")
        object.__setattr__(self, "entries", entries)
        sc, sym, port = entries.T
        if entries.size and (
            sc.min() < 0
            or sc.max() >= self.n_used
            or sym.min() < 0
            or sym.max() >= self.n_symbols
            or port.min() < 0
            or port.max() >= self.n_ports
        ):
            raise ValueError("pilot entry outside the grid bounds")
        order = np.lexsort((sc, sym, port))
        if not np.array_equal(order, np.arange(len(entries))):
            raise ValueError("entries must be sorted by (port, symbol, subcarrier)")
        # No two ports may share a resource element.
        res = entries[:, 0] * self.n_symbols + entries[:, 1]
        if len(np.unique(res)) != len(res):
            raise ValueError("two antenna ports share a pilot resource element")
        # Within one (symbol, port), subcarriers form an arithmetic progression.
        for p in range(self.n_ports):
            for s in np.unique(sym[port == p]):
                ks = sc[(port == p) & (sym == s)]
                if len(ks) > 1 and not np.all(np.diff(ks) == self.pilot_spacing):
                    raise ValueError(
                        f"pilot subcarriers of port {p}, symbol {s} are not an "
                        f"arithmetic progression with step {self.pilot_spacing}"
                    )
        entries.setflags(write=False)

    @property
    def n_entries(self) -> int:
        return len(self.entries)

    def ports(self) -> np.ndarray:
        return np.unique(self.entries[:, 2])

    def entry_indices(self, port: int) -> np.ndarray:
        """Row indices of this port's entries (also its pilot-sequence slots)."""
        idx = np.nonzero(self.entries[:, 2] == port)[0]
        if idx.size == 0:
            raise ValueError(f"port {port} has no pilots in this pattern")
        return idx

    def subcarriers(self, port: int) -> np.ndarray:
        return self.entries[self.entry_indices(port), 0]

    def symbols(self, port: int) -> np.ndarray:
        return self.entries[self.entry_indices(port), 1]


def build_pilot_pattern(config: SystemConfig) -> PilotPattern:
    """Place reference signals on symbols 0 and 4 of a short-CP slot.

    Within a pilot symbol every 6th subcarrier carries a pilot; the
    fifth-symbol comb is offset by 3 subcarriers from the first-symbol comb,
    and port 1's combs are offset by 3 subcarriers from port 0's, so the two
    ports never share a resource element.
    """
    if config.n_symbols_per_slot != 7:
        raise ValueError("pilot pattern requires the short-CP slot format (7 symbols)")
    if config.n_tx > 2:
        raise ValueError("at most 2 antenna ports are supported")
    rows = []
    for port in range(config.n_tx):
        for sym in PILOT_SYMBOLS:
            shift = _SECOND_SYMBOL_SHIFT if sym == PILOT_SYMBOLS[1] else 0
            offset = (_PORT_SHIFT * port + shift) % PILOT_SPACING
            for k in range(offset, config.n_used, PILOT_SPACING):
                rows.append((k, sym, port))
    rows.sort(key=lambda r: (r[2], r[1], r[0]))
    return PilotPattern(
        entries=np.array(rows, dtype=np.int64),
        pilot_spacing=PILOT_SPACING,
        n_used=config.n_used,
        n_symbols=config.n_symbols_per_slot,
        n_ports=config.n_tx,
    )


@dataclass(frozen=True)
class ResourceGrid:
    """Per-antenna complex symbol lattice with Data/Pilot/Null cell labels."""

    values: np.ndarray  # (n_ports, n_used, n_symbols) complex128
    labels: np.ndarray  # same shape, CellLabel as int8

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        labels = np.asarray(self.labels, dtype=np.int8)
        if values.ndim != 3 or values.shape != labels.shape:
            raise ValueError("values and labels must share an (ports, subcarriers, symbols) shape")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        values.setflags(write=False)
        labels.setflags(write=False)

    @property
    def n_ports(self) -> int:
        return self.values.shape[0]

    def validate(self) -> None:
        """Check the cell invariants (pilot modulus, null zeros, port complementarity)."""
        pilot = self.labels == CellLabel.PILOT
        null = self.labels == CellLabel.NULL
        if pilot.any() and not np.allclose(np.abs(self.values[pilot]), 1.0, atol=1e-9):
            raise ValueError("pilot cells must hold unit-modulus values")
        if null.any() and np.any(self.values[null] != 0):
            raise ValueError("null cells must hold exactly 0")
        if self.n_ports > 1:
            for p in range(self.n_ports):
                others_null = np.all(np.delete(self.labels, p, axis=0) == CellLabel.NULL, axis=0)
                bad = pilot[p] & ~others_null
                if bad.any():
                    raise ValueError("a pilot resource element is not nulled on the other ports")
            if np.any(pilot.sum(axis=0) > 1):
                raise ValueError("two ports carry a pilot on the same resource element")


@dataclass(frozen=True)
class GridLayout:
    """Precomputed cell bookkeeping shared by every slot built from one pattern.

    data_subcarriers/data_symbols enumerate the Data resource elements in the
    deterministic fill order (symbols ascending, subcarriers ascending within a
    symbol); the same order applies to every port because a pilot element is
    nulled on all non-owning ports.
    """

    labels: np.ndarray  # (n_ports, n_used, n_symbols) int8
    data_subcarriers: np.ndarray
    data_symbols: np.ndarray
    n_data_per_port: int

    @classmethod
    def build(cls, config: SystemConfig, pattern: PilotPattern) -> "GridLayout":
        n_ports = config.n_tx
        shape = (n_ports, config.n_used, config.n_symbols_per_slot)
        labels = np.zeros(shape, dtype=np.int8)
        sc, sym, port = pattern.entries.T
        for p in range(n_ports):
            mine = port == p
            labels[p, sc[mine], sym[mine]] = CellLabel.PILOT
            labels[p, sc[~mine], sym[~mine]] = CellLabel.NULL
        data_mask = labels[0] == CellLabel.DATA  # identical across ports
        sym_idx, sc_idx = np.nonzero(data_mask.T)
        labels.setflags(write=False)
        return cls(
            labels=labels,
            data_subcarriers=sc_idx,
            data_symbols=sym_idx,
            n_data_per_port=int(sc_idx.size),
        )

    def fill(
        self,
        data_symbols: Sequence[np.ndarray],
        pilot_seq: np.ndarray,
        pattern: PilotPattern,
    ) -> np.ndarray:
        """Return the (n_ports, n_used, n_symbols) value array for one slot."""
        n_ports = self.labels.shape[0]
        values = np.zeros(self.labels.shape, dtype=np.complex128)
        for p in range(n_ports):
            got = len(data_symbols[p])
            if got != self.n_data_per_port:
                short = self.n_data_per_port - got
                kind = "missing" if short > 0 else "extra"
                raise ValueError(
                    f"antenna {p}: expected {self.n_data_per_port} data symbols, "
                    f"got {got} ({abs(short)} {kind})"
                )
            values[p, self.data_subcarriers, self.data_symbols] = data_symbols[p]
        if len(pilot_seq) < pattern.n_entries:
            raise ValueError(
                f"pilot sequence too short: need {pattern.n_entries}, "
                f"got {len(pilot_seq)} ({pattern.n_entries - len(pilot_seq)} missing)"
            )
        sc, sym, port = pattern.entries.T
        values[port, sc, sym] = np.asarray(pilot_seq)[: pattern.n_entries]
        return values


def map_to_grid(
    config: SystemConfig,
    pattern: PilotPattern,
    data_symbols: Sequence[np.ndarray],
    pilot_seq: np.ndarray,
) -> ResourceGrid:
    """Fill one slot: data in deterministic order, pilots from pilot_seq, nulls zero.

    data_symbols holds one array per antenna; within an antenna the Data cells
    are filled subcarrier-fastest, then symbol.  pilot_seq is consumed in the
    pattern's entry order and must be unit modulus.
    """
    if len(data_symbols) != config.n_tx:
        raise ValueError(
            f"expected data for {config.n_tx} antennas, got {len(data_symbols)} lists"
        )
    pilot_seq = np.asarray(pilot_seq, dtype=np.complex128)
    used = pilot_seq[: pattern.n_entries]
    if used.size == pattern.n_entries and not np.allclose(np.abs(used), 1.0, atol=1e-9):
        raise ValueError("pilot values must be unit modulus")
    layout = GridLayout.build(config, pattern)
    values = layout.fill(data_symbols, pilot_seq, pattern)
    return ResourceGrid(values=values, labels=layout.labels)


def extract_data(grid: ResourceGrid, port: int) -> np.ndarray:
    """Data symbols of one port in the map_to_grid fill order."""
    mask = (grid.labels[port] == CellLabel.DATA).T
    return grid.values[port].T[mask]


def extract_pilots(
    grid_rx_freq: np.ndarray, pattern: PilotPattern, port: int
) -> tuple[np.ndarray, np.ndarray]:
    """Pilot observations of one port from a received frequency-domain grid.

    grid_rx_freq is the (n_used, n_symbols) grid of ONE receive antenna.
    Returns (y_p, pilot_positions) ordered by ascending subcarrier within
    ascending symbol; positions are subcarrier indices parallel to y_p.
    """
    grid_rx_freq = np.asarray(grid_rx_freq)
    if grid_rx_freq.shape != (pattern.n_used, pattern.n_symbols):
        raise ValueError(
            f"grid shape {grid_rx_freq.shape} does not match the pattern "
            f"({pattern.n_used}, {pattern.n_symbols})"
        )
    sc = pattern.subcarriers(port)
    sym = pattern.symbols(port)
    return grid_rx_freq[sc, sym], sc.copy()


def pilot_values_for_port(
    pattern: PilotPattern, pilot_seq: np.ndarray, port: int
) -> np.ndarray:
    """Transmitted pilot values of one port, aligned with extract_pilots order."""
    pilot_seq = np.asarray(pilot_seq, dtype=np.complex128)
    if len(pilot_seq) < pattern.n_entries:
        raise ValueError(
            f"pilot sequence too short: need {pattern.n_entries}, got {len(pilot_seq)}"
        )
    return pilot_seq[pattern.entry_indices(port)]


def random_pilot_sequence(n: int, rng: np.random.Generator) -> np.ndarray:
    """Pseudo-random unit-modulus QPSK pilot sequence (trivially invertible)."""
    return _QPSK_CORNERS[rng.integers(0, 4, size=n)]
