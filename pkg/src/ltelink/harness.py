"""Monte Carlo sweep driver: TX -> channel -> RX -> estimate -> detect -> score.

One trial is one slot: draw a block-fading channel, fill the grid with random
payload bits and the run's pilot sequence, modulate all symbols, push the
concatenated stream through the linear-convolution channel plus AWGN,
demodulate, estimate every (tx, rx) response from the stacked pilot symbols,
zero-force the data resource elements, and score MSE against the exact
frequency response and BER against the payload.

Reproducibility contract: every random draw comes from a stream derived from
(seed, purpose tag, cell indices, trial index), so results are independent of
scheduling and identical across runs.  All estimators of a cell share the same
trial streams (common random numbers), which makes estimator comparisons
paired and the hybrid's per-trial output bit-identical to its chosen branch.

MSE aggregation across trials is energy weighted: |error|^2 and |h|^2 sums are
accumulated separately and divided once, so the pilot-column MSE of the LS
estimator converges to 1/SNR exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from . import estimation, kernels, linkproc, ofdm
from .channel import (
    NoiseSpec,
    PowerDelayProfile,
    add_awgn,
    apply_channel,
    generate_channel,
)
from .estimation import (
    CorrelationModel,
    HybridPolicy,
    beta_for_constellation,
    interpolate_ls,
)
from .grid import (
    GridLayout,
    PilotPattern,
    SystemConfig,
    build_pilot_pattern,
    pilot_values_for_port,
    random_pilot_sequence,
    used_subcarrier_bins,
)

__all__ = [
    "Estimator",
    "SweepConfig",
    "SweepRecord",
    "TrialResult",
    "run_trial",
    "run_sweep",
    "paired_mse_curves",
    "compute_mse",
    "compute_ber",
    "emit_csv",
    "format_summary",
    "CSV_HEADER",
]

# Stream purpose tags: keep trial, pilot-sequence and calibration draws disjoint.
_TAG_TRIAL = 0
_TAG_PILOTS = 1
_TAG_CALIBRATION = 2

_SEED_MASK = (1 << 64) - 1


class Estimator(Enum):
    LS = "ls"
    LMMSE = "lmmse"
    HYBRID = "hybrid"
    PERFECT = "perfect"

    @classmethod
    def parse(cls, name: str) -> "Estimator":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown estimator {name!r}; choose from "
                f"{', '.join(e.value for e in cls)}"
            ) from None


ESTIMATOR_ORDER: tuple[Estimator, ...] = (
    Estimator.LS,
    Estimator.LMMSE,
    Estimator.HYBRID,
    Estimator.PERFECT,
)


@dataclass(frozen=True)
class SweepConfig:
    """Full description of one Monte Carlo sweep."""

    system: SystemConfig = field(default_factory=SystemConfig)
    channel_lengths: tuple[int, ...] = (6, 10, 20, 40)
    snr_grid_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    n_frames: int = 100
    seed: int = 42
    estimators: tuple[Estimator, ...] = ESTIMATOR_ORDER
    threshold_override_db: float | None = None

    def __post_init__(self) -> None:
        # channel lengths are canonicalized (sorted, deduplicated) so cell
        # indices, and with them the rng streams, do not depend on input order
        lengths = tuple(sorted({int(v) for v in self.channel_lengths}))
        snrs = tuple(float(v) for v in self.snr_grid_db)
        ests = tuple(self.estimators)
        object.__setattr__(self, "channel_lengths", lengths)
        object.__setattr__(self, "snr_grid_db", snrs)
        object.__setattr__(self, "estimators", ests)
        if not lengths or any(v < 1 for v in lengths):
            raise ValueError("channel_lengths must be a non-empty list of positive ints")
        if not snrs:
            raise ValueError("snr grid must be non-empty")
        if any(a > b for a, b in zip(snrs, snrs[1:])):
            raise ValueError("snr grid must be sorted ascending")
        if any(math.isnan(v) for v in snrs):
            raise ValueError("snr grid must not contain NaN")
        if self.n_frames < 1:
            raise ValueError("n_frames must be at least 1")
        if not ests or any(not isinstance(e, Estimator) for e in ests):
            raise ValueError("estimators must be a non-empty list of Estimator members")
        if len(set(ests)) != len(ests):
            raise ValueError("duplicate estimator requested")
        if self.threshold_override_db is not None and math.isnan(self.threshold_override_db):
            raise ValueError("threshold_override_db must not be NaN")


@dataclass(frozen=True)
class SweepRecord:
    """One (SNR, channel length, estimator) measurement row."""

    snr_db: float
    channel_len: int
    estimator: Estimator
    mse_all_subcarriers: float
    mse_pilot_subcarriers: float
    ber: float
    n_trials: int
    branch_fraction_ls: float | None
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.ber <= 1.0:
            raise ValueError(f"ber out of [0, 1]: {self.ber}")
        if self.mse_all_subcarriers < 0 or self.mse_pilot_subcarriers < 0:
            raise ValueError("mse must be non-negative")
        if self.branch_fraction_ls is not None and not 0.0 <= self.branch_fraction_ls <= 1.0:
            raise ValueError(f"branch_fraction_ls out of [0, 1]: {self.branch_fraction_ls}")


@dataclass(frozen=True)
class TrialResult:
    """Per-trial accumulators of one estimator's slot."""

    mse_num_all: float
    mse_den_all: float
    mse_num_pilot: float
    mse_den_pilot: float
    bit_errors: int
    bit_count: int
    chose_ls: bool | None
    n_erasures: int

    @property
    def mse_all(self) -> float:
        return self.mse_num_all / self.mse_den_all

    @property
    def mse_pilot(self) -> float:
        return self.mse_num_pilot / self.mse_den_pilot


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & _SEED_MASK, *key]))


def compute_mse(
    h_hat: np.ndarray, h_true: np.ndarray, positions: np.ndarray | None = None
) -> float:
    """Normalized MSE: mean |h_hat - h_true|^2 over mean |h_true|^2, same positions."""
    h_hat = np.asarray(h_hat)
    h_true = np.asarray(h_true)
    if h_hat.shape != h_true.shape:
        raise ValueError(f"shape mismatch: {h_hat.shape} vs {h_true.shape}")
    if positions is not None:
        positions = np.asarray(positions, dtype=np.int64)
        if positions.size == 0:
            raise ValueError("empty position selection")
        h_hat = h_hat[positions]
        h_true = h_true[positions]
    if h_hat.size == 0:
        raise ValueError("empty position selection")
    ref = float(np.mean(np.abs(h_true) ** 2))
    if ref == 0.0:
        raise ValueError("reference channel energy is zero")
    return float(np.mean(np.abs(h_hat - h_true) ** 2)) / ref


def compute_ber(tx_bits: np.ndarray, rx_bits: np.ndarray) -> float:
    """Hamming distance over length."""
    tx_bits = np.asarray(tx_bits)
    rx_bits = np.asarray(rx_bits)
    if tx_bits.shape != rx_bits.shape or tx_bits.size == 0:
        raise ValueError(
            f"bit vectors must be equal-length and non-empty: "
            f"{tx_bits.shape} vs {rx_bits.shape}"
        )
    return float(np.count_nonzero(tx_bits != rx_bits)) / tx_bits.size


@dataclass(frozen=True)
class _LinkContext:
    """Everything about one configuration that is fixed across trials."""

    config: SystemConfig
    pattern: PilotPattern
    layout: GridLayout
    used_bins: np.ndarray
    pilot_seq: np.ndarray
    port_positions: tuple[np.ndarray, ...]
    port_pilot_values: tuple[np.ndarray, ...]
    port_pilot_symbols: tuple[np.ndarray, ...]
    beta: float

    @property
    def n_payload_bits(self) -> int:
        return (
            self.layout.n_data_per_port
            * self.config.constellation.bits_per_symbol
            * self.config.n_tx
        )


def _make_context(config: SystemConfig, seed: int) -> _LinkContext:
    pattern = build_pilot_pattern(config)
    layout = GridLayout.build(config, pattern)
    pilot_seq = random_pilot_sequence(pattern.n_entries, _stream(seed, _TAG_PILOTS))
    positions, values, symbols = [], [], []
    for p in range(config.n_tx):
        positions.append(pattern.subcarriers(p))
        values.append(pilot_values_for_port(pattern, pilot_seq, p))
        symbols.append(pattern.symbols(p))
    return _LinkContext(
        config=config,
        pattern=pattern,
        layout=layout,
        used_bins=used_subcarrier_bins(config),
        pilot_seq=pilot_seq,
        port_positions=tuple(positions),
        port_pilot_values=tuple(values),
        port_pilot_symbols=tuple(symbols),
        beta=beta_for_constellation(config.constellation),
    )


@dataclass(frozen=True)
class _ChainState:
    """Estimator-independent products of one trial's chain."""

    bits: np.ndarray  # (n_tx, n_payload_bits_per_port)
    rx_grid: np.ndarray  # (n_rx, n_used, n_symbols)
    h_true: np.ndarray  # (n_tx, n_rx, n_used)
    h_ls: tuple[np.ndarray, ...]  # per port: (n_rx, n_pilots)


def _run_chain(
    ctx: _LinkContext, pdp: PowerDelayProfile, noise: NoiseSpec, rng: np.random.Generator
) -> _ChainState:
    cfg = ctx.config
    ch = generate_channel(pdp, cfg.n_tx, cfg.n_rx, rng)
    bits_per_sym = cfg.constellation.bits_per_symbol
    bits = rng.integers(0, 2, size=(cfg.n_tx, ctx.layout.n_data_per_port * bits_per_sym))
    data = [linkproc.map_bits(bits[p], cfg.constellation) for p in range(cfg.n_tx)]
    values = ctx.layout.fill(data, ctx.pilot_seq, ctx.pattern)
    tx_sig = ofdm.modulate_frame(values, cfg)
    rx_sig = apply_channel(tx_sig, ch)
    rx_samples = add_awgn(rx_sig.samples, noise, rng)
    rx_grid = ofdm.demodulate_frame(rx_samples, cfg)
    h_true = ch.frequency_responses(cfg.n_fft, ctx.used_bins)
    h_ls = []
    for p in range(cfg.n_tx):
        y_p = rx_grid[:, ctx.port_positions[p], ctx.port_pilot_symbols[p]]
        h_ls.append(y_p / ctx.port_pilot_values[p][None, :])
    return _ChainState(bits=bits, rx_grid=rx_grid, h_true=h_true, h_ls=tuple(h_ls))


def _estimate_all_pairs(
    state: _ChainState,
    ctx: _LinkContext,
    estimator: Estimator,
    lmmse_w: Sequence[np.ndarray] | None,
    chooses_ls: bool | None,
) -> tuple[np.ndarray, bool | None]:
    """Channel estimates for every (tx, rx) pair; returns (h_hat, chose_ls)."""
    cfg = ctx.config
    if estimator is Estimator.PERFECT:
        return state.h_true, None
    h_hat = np.empty_like(state.h_true)
    branch: bool | None = None
    if estimator is Estimator.HYBRID:
        branch = bool(chooses_ls)
    use_ls = estimator is Estimator.LS or (estimator is Estimator.HYBRID and branch)
    for p in range(cfg.n_tx):
        positions = ctx.port_positions[p]
        for r in range(cfg.n_rx):
            h_p = state.h_ls[p][r]
            if use_ls:
                h_hat[p, r] = interpolate_ls(h_p, positions, cfg.n_used).h_hat
            else:
                h_hat[p, r] = lmmse_w[p] @ h_p
    return h_hat, branch


def _detect_and_count(
    state: _ChainState, ctx: _LinkContext, h_hat: np.ndarray
) -> tuple[int, int, int]:
    """ZF-detect all data resource elements; returns (bit_errors, bit_count, erasures)."""
    cfg = ctx.config
    sc, sym = ctx.layout.data_subcarriers, ctx.layout.data_symbols
    y = state.rx_grid[:, sc, sym].T  # (n_re, n_rx)
    h = h_hat[:, :, sc].transpose(2, 1, 0)  # (n_re, n_rx, n_tx)
    detected, erased = kernels.zf_detect_grid(y, h)
    errors = 0
    for p in range(cfg.n_tx):
        rx_bits = linkproc.demap_symbols(detected[:, p], cfg.constellation)
        errors += int(np.count_nonzero(rx_bits != state.bits[p]))
    return errors, int(state.bits.size), int(np.count_nonzero(erased))


def _score_estimate(
    state: _ChainState, ctx: _LinkContext, h_hat: np.ndarray
) -> tuple[float, float, float, float]:
    err2 = np.abs(h_hat - state.h_true) ** 2
    ref2 = np.abs(state.h_true) ** 2
    num_all = float(err2.sum())
    den_all = float(ref2.sum())
    num_pil = 0.0
    den_pil = 0.0
    for p in range(ctx.config.n_tx):
        positions = ctx.port_positions[p]
        num_pil += float(err2[p, :, positions].sum())
        den_pil += float(ref2[p, :, positions].sum())
    return num_all, den_all, num_pil, den_pil


def _trial_from_state(
    state: _ChainState,
    ctx: _LinkContext,
    estimator: Estimator,
    lmmse_w: Sequence[np.ndarray] | None,
    chooses_ls: bool | None,
) -> TrialResult:
    h_hat, branch = _estimate_all_pairs(state, ctx, estimator, lmmse_w, chooses_ls)
    num_all, den_all, num_pil, den_pil = _score_estimate(state, ctx, h_hat)
    errors, nbits, erasures = _detect_and_count(state, ctx, h_hat)
    return TrialResult(
        mse_num_all=num_all,
        mse_den_all=den_all,
        mse_num_pilot=num_pil,
        mse_den_pilot=den_pil,
        bit_errors=errors,
        bit_count=nbits,
        chose_ls=branch,
        n_erasures=erasures,
    )


def _correlation_models(
    ctx: _LinkContext, pdp: PowerDelayProfile
) -> list[CorrelationModel]:
    """Per-port receiver correlation models for one channel profile.

    The receiver's correlation prior covers at most the cyclic prefix: the
    demodulator is designed for delay spreads the CP absorbs, and a longer
    channel is precisely the unforeseen case the hybrid estimator exists for.
    """
    model_pdp = pdp.truncated(min(pdp.n_taps, ctx.config.cp_len))
    return [
        estimation.build_correlation_model(model_pdp, ctx.port_positions[p], ctx.config)
        for p in range(ctx.config.n_tx)
    ]


def _filters_from_models(
    models: Sequence[CorrelationModel], snr_db: float, beta: float
) -> list[np.ndarray]:
    snr_linear = 10.0 ** (snr_db / 10.0)
    reg = 0.0 if math.isinf(snr_linear) else beta / snr_linear
    return [estimation.lmmse_filter(corr, reg)[0] for corr in models]


def _lmmse_filters(
    ctx: _LinkContext, pdp: PowerDelayProfile, snr_db: float
) -> list[np.ndarray]:
    """Per-port LMMSE filter matrices for one cell."""
    return _filters_from_models(_correlation_models(ctx, pdp), snr_db, ctx.beta)


def _needs_lmmse(estimator: Estimator, chooses_ls: bool | None) -> bool:
    if estimator is Estimator.LMMSE:
        return True
    return estimator is Estimator.HYBRID and not chooses_ls


def run_trial(
    config: SweepConfig,
    channel_len: int,
    snr_db: float,
    estimator: Estimator,
    rng: np.random.Generator,
    snr_threshold_db: float | None = None,
) -> TrialResult:
    """Run one slot-level trial of one estimator.

    All randomness (channel, payload, noise) is drawn from rng; the pilot
    sequence is fixed by config.seed.  A hybrid trial on a CP-exceeding
    channel needs a switching threshold: pass snr_threshold_db, or set
    config.threshold_override_db (run_sweep calibrates one automatically).
    """
    ctx = _make_context(config.system, config.seed)
    pdp = PowerDelayProfile.uniform(channel_len)
    chooses_ls: bool | None = None
    if estimator is Estimator.HYBRID:
        threshold = snr_threshold_db
        if threshold is None:
            threshold = config.threshold_override_db
        if threshold is None:
            if channel_len > config.system.cp_len:
                raise ValueError(
                    "hybrid on a CP-exceeding channel needs a threshold: pass "
                    "snr_threshold_db or set threshold_override_db "
                    "(run_sweep calibrates one automatically)"
                )
            threshold = np.inf
        policy = HybridPolicy(
            cp_len=config.system.cp_len,
            channel_len_hint=channel_len,
            snr_threshold_db=threshold,
        )
        chooses_ls = policy.chooses_ls(snr_db)
    lmmse_w = None
    if _needs_lmmse(estimator, chooses_ls):
        lmmse_w = _lmmse_filters(ctx, pdp, snr_db)
    state = _run_chain(ctx, pdp, NoiseSpec(snr_db), rng)
    return _trial_from_state(state, ctx, estimator, lmmse_w, chooses_ls)


def paired_mse_curves(
    system: SystemConfig,
    pdp: PowerDelayProfile,
    snrs_db: np.ndarray,
    n_trials: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """All-subcarrier MSE of LS and LMMSE over an SNR grid, common random numbers.

    Used by the hybrid threshold calibration; aggregation matches run_sweep.
    """
    ctx = _make_context(system, 0)
    snrs_db = np.asarray(snrs_db, dtype=np.float64)
    streams = rng.spawn(len(snrs_db) * n_trials)
    models = _correlation_models(ctx, pdp)
    ls_curve = np.empty(len(snrs_db))
    lmmse_curve = np.empty(len(snrs_db))
    for i, snr_db in enumerate(snrs_db):
        lmmse_w = _filters_from_models(models, snr_db, ctx.beta)
        noise = NoiseSpec(snr_db)
        acc = {Estimator.LS: [0.0, 0.0], Estimator.LMMSE: [0.0, 0.0]}
        for j in range(n_trials):
            state = _run_chain(ctx, pdp, noise, streams[i * n_trials + j])
            for est in (Estimator.LS, Estimator.LMMSE):
                w = lmmse_w if est is Estimator.LMMSE else None
                h_hat, _ = _estimate_all_pairs(state, ctx, est, w, None)
                num, den, _, _ = _score_estimate(state, ctx, h_hat)
                acc[est][0] += num
                acc[est][1] += den
        ls_curve[i] = acc[Estimator.LS][0] / acc[Estimator.LS][1]
        lmmse_curve[i] = acc[Estimator.LMMSE][0] / acc[Estimator.LMMSE][1]
    return ls_curve, lmmse_curve


def _resolve_thresholds(config: SweepConfig, ctx: _LinkContext) -> dict[int, float]:
    """Hybrid switching threshold per channel length.

    CP-covered lengths never consult the threshold (+inf placeholder); the
    single no-ISI length just past the CP (span == cp_len + 1) stays on LMMSE.
    Genuinely CP-exceeding lengths use the override when set, otherwise the
    calibrated LS/LMMSE crossover for this configuration and profile.
    """
    thresholds: dict[int, float] = {}
    finite_snrs = np.array([s for s in config.snr_grid_db if math.isfinite(s)])
    for li, length in enumerate(config.channel_lengths):
        if length <= config.system.cp_len:
            thresholds[length] = np.inf
        elif config.threshold_override_db is not None:
            thresholds[length] = config.threshold_override_db
        elif length <= config.system.cp_len + 1:
            thresholds[length] = np.inf
        else:
            if finite_snrs.size == 0:
                raise ValueError("cannot calibrate a hybrid threshold without finite SNRs")
            thresholds[length] = estimation.calibrate_threshold(
                config.system,
                PowerDelayProfile.uniform(length),
                finite_snrs,
                config.n_frames,
                _stream(config.seed, _TAG_CALIBRATION, li),
            )
    return thresholds


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Run the cartesian (channel length x SNR x estimator) sweep.

    Records are ordered by (channel length, SNR, estimator); channel lengths
    are processed in ascending order regardless of the configured order.  Each
    trial stream derives from (seed, purpose, length index, snr index, trial),
    shared by every estimator of the cell.
    """
    ctx = _make_context(config.system, config.seed)
    estimators = tuple(e for e in ESTIMATOR_ORDER if e in config.estimators)
    lengths = config.channel_lengths
    thresholds: dict[int, float] = {}
    if Estimator.HYBRID in estimators:
        thresholds = _resolve_thresholds(config, ctx)
    records: list[SweepRecord] = []
    for li, length in enumerate(lengths):
        pdp = PowerDelayProfile.uniform(length)
        models = _correlation_models(ctx, pdp)
        for si, snr_db in enumerate(config.snr_grid_db):
            chooses_ls: bool | None = None
            if Estimator.HYBRID in estimators:
                policy = HybridPolicy(
                    cp_len=config.system.cp_len,
                    channel_len_hint=length,
                    snr_threshold_db=thresholds[length],
                )
                chooses_ls = policy.chooses_ls(snr_db)
            lmmse_w = None
            if any(_needs_lmmse(e, chooses_ls) for e in estimators):
                lmmse_w = _filters_from_models(models, snr_db, ctx.beta)
            noise = NoiseSpec(snr_db)
            acc = {
                e: {"na": 0.0, "da": 0.0, "np": 0.0, "dp": 0.0, "err": 0, "bits": 0, "ls": 0}
                for e in estimators
            }
            for trial in range(config.n_frames):
                rng = _stream(config.seed, _TAG_TRIAL, li, si, trial)
                try:
                    state = _run_chain(ctx, pdp, noise, rng)
                    for est in estimators:
                        res = _trial_from_state(state, ctx, est, lmmse_w, chooses_ls)
                        a = acc[est]
                        a["na"] += res.mse_num_all
                        a["da"] += res.mse_den_all
                        a["np"] += res.mse_num_pilot
                        a["dp"] += res.mse_den_pilot
                        a["err"] += res.bit_errors
                        a["bits"] += res.bit_count
                        if res.chose_ls:
                            a["ls"] += 1
                except Exception as exc:
                    raise RuntimeError(
                        f"trial failed (channel_len={length}, snr_db={snr_db}, "
                        f"trial={trial})"
                    ) from exc
            for est in estimators:
                a = acc[est]
                records.append(
                    SweepRecord(
                        snr_db=snr_db,
                        channel_len=length,
                        estimator=est,
                        mse_all_subcarriers=a["na"] / a["da"],
                        mse_pilot_subcarriers=a["np"] / a["dp"],
                        ber=a["err"] / a["bits"],
                        n_trials=config.n_frames,
                        branch_fraction_ls=(
                            a["ls"] / config.n_frames if est is Estimator.HYBRID else None
                        ),
                        seed=config.seed,
                    )
                )
    return records


CSV_HEADER = (
    "snr_db,channel_len,estimator,mse_all_subcarriers,mse_pilot_subcarriers,"
    "ber,n_trials,branch_fraction_ls,seed"
)


def _fmt_float(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def _record_line(r: SweepRecord) -> str:
    branch = "" if r.branch_fraction_ls is None else _fmt_float(r.branch_fraction_ls)
    return ",".join(
        [
            _fmt_float(r.snr_db),
            str(r.channel_len),
            r.estimator.value,
            _fmt_float(r.mse_all_subcarriers),
            _fmt_float(r.mse_pilot_subcarriers),
            _fmt_float(r.ber),
            str(r.n_trials),
            branch,
            str(r.seed),
        ]
    )


def emit_csv(records: Iterable[SweepRecord], destination: str | Path | IO[str]) -> None:
    """Write records as CSV: header then one line per record, 12 significant digits.

    Rows are sorted by (channel length, SNR, estimator) no matter the input
    order, so a re-run with the same config and seed is byte-identical.
    """
    ordered = sorted(
        records,
        key=lambda r: (r.channel_len, r.snr_db, ESTIMATOR_ORDER.index(r.estimator)),
    )
    text = "\n".join([CSV_HEADER, *map(_record_line, ordered)]) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
        return
    path = Path(destination)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"failed to write CSV to {path}: {exc}") from exc


def format_summary(records: Sequence[SweepRecord]) -> str:
    """Human-readable per-cell means, one line per record in CSV order."""
    ordered = sorted(
        records,
        key=lambda r: (r.channel_len, r.snr_db, ESTIMATOR_ORDER.index(r.estimator)),
    )
    lines = []
    for r in ordered:
        branch = (
            ""
            if r.branch_fraction_ls is None
            else f"  ls_branch={r.branch_fraction_ls:.2f}"
        )
        lines.append(
            f"L={r.channel_len:>3d}  snr={r.snr_db:>5g} dB  {r.estimator.value:<7s}"
            f"  mse_all={r.mse_all_subcarriers:.4e}"
            f"  mse_pilot={r.mse_pilot_subcarriers:.4e}"
            f"  ber={r.ber:.4e}{branch}"
        )
    return "\n".join(lines)
