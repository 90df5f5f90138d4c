"""Tests for the sweep harness: scoring, trials, records, CSV."""

import io

import numpy as np
import pytest

from ltelink.grid import Constellation, SystemConfig
from ltelink.harness import (
    CSV_HEADER,
    Estimator,
    SweepConfig,
    SweepRecord,
    compute_ber,
    compute_mse,
    emit_csv,
    format_summary,
    run_sweep,
    run_trial,
)


def _rng(seed=0):
    return np.random.default_rng(seed)


SMALL = SweepConfig(
    channel_lengths=(6,),
    snr_grid_db=(10.0,),
    n_frames=3,
    seed=7,
    estimators=(Estimator.LS, Estimator.PERFECT),
)


class TestComputeMse:
    def test_exact_estimate_is_zero(self):
        h = np.array([1 + 1j, 2.0, -3j])
        assert compute_mse(h, h) == 0.0

    def test_flat_offset(self):
        h = np.exp(1j * np.linspace(0, 2, 8))  # |h| = 1 everywhere
        eps = 0.01
        assert compute_mse(h + eps, h) == pytest.approx(eps**2)

    def test_scale_invariance(self):
        rng = _rng(1)
        h = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        h_hat = h + 0.1 * (rng.standard_normal(16) + 1j * rng.standard_normal(16))
        a = compute_mse(h_hat, h)
        b = compute_mse(3.7j * h_hat, 3.7j * h)
        assert a == pytest.approx(b)

    def test_position_filter(self):
        h = np.ones(4, dtype=complex)
        h_hat = np.array([1.0, 2.0, 1.0, 1.0], dtype=complex)
        assert compute_mse(h_hat, h, np.array([1])) == pytest.approx(1.0)
        assert compute_mse(h_hat, h, np.array([0, 2])) == 0.0

    def test_empty_selection_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            compute_mse(np.ones(3), np.ones(3), np.array([], dtype=int))

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            compute_mse(np.ones(3), np.ones(4))


class TestComputeBer:
    def test_identical(self):
        assert compute_ber(np.array([0, 1, 1]), np.array([0, 1, 1])) == 0.0

    def test_all_flipped(self):
        assert compute_ber(np.array([0, 1]), np.array([1, 0])) == 1.0

    def test_half_flipped(self):
        assert compute_ber(np.array([0, 0, 1, 1]), np.array([0, 1, 1, 0])) == 0.5

    def test_mismatch_rejected(self):
        with pytest.raises(ValueError, match="equal-length"):
            compute_ber(np.array([0]), np.array([0, 1]))


class TestRunTrial:
    def test_deterministic_under_same_rng_seed(self):
        a = run_trial(SMALL, 6, 10.0, Estimator.LS, _rng(3))
        b = run_trial(SMALL, 6, 10.0, Estimator.LS, _rng(3))
        assert a == b

    def test_perfect_csi_noiseless_is_exact(self):
        res = run_trial(SMALL, 10, np.inf, Estimator.PERFECT, _rng(4))
        assert res.bit_errors == 0
        assert res.mse_num_all == 0.0
        assert res.mse_all == 0.0

    def test_bit_count_matches_grid_payload(self):
        res = run_trial(SMALL, 6, 10.0, Estimator.LS, _rng(5))
        # 2 antennas x 2 bits x (5 all-data symbols * 300 + 2 pilot symbols * 200)
        assert res.bit_count == 2 * 2 * (5 * 300 + 2 * 200)

    def test_branch_recorded_only_for_hybrid(self):
        res = run_trial(SMALL, 6, 10.0, Estimator.LS, _rng(6))
        assert res.chose_ls is None
        res = run_trial(SMALL, 6, 10.0, Estimator.HYBRID, _rng(6))
        assert res.chose_ls is False  # CP-covered channel stays on LMMSE

    def test_hybrid_needs_threshold_beyond_cp(self):
        with pytest.raises(ValueError, match="threshold"):
            run_trial(SMALL, 40, 10.0, Estimator.HYBRID, _rng(7))
        res = run_trial(SMALL, 40, 30.0, Estimator.HYBRID, _rng(7), snr_threshold_db=12.0)
        assert res.chose_ls is True

    def test_ls_mse_reasonable_at_high_snr(self):
        res = run_trial(SMALL, 6, 30.0, Estimator.LS, _rng(8))
        assert 0 < res.mse_pilot < 0.01


class TestRunSweep:
    def test_single_cell_single_frame(self):
        cfg = SweepConfig(
            channel_lengths=(6,),
            snr_grid_db=(20.0,),
            n_frames=1,
            seed=1,
            estimators=(Estimator.LMMSE,),
        )
        records = run_sweep(cfg)
        assert len(records) == 1
        assert records[0].n_trials == 1

    def test_record_count_is_cartesian_product(self):
        cfg = SweepConfig(
            channel_lengths=(6, 10),
            snr_grid_db=(0.0, 10.0, 20.0),
            n_frames=2,
            seed=1,
            estimators=(Estimator.LS, Estimator.PERFECT),
        )
        records = run_sweep(cfg)
        assert len(records) == 2 * 3 * 2

    def test_matches_run_trial_accumulation(self):
        cfg = SweepConfig(
            channel_lengths=(8,),
            snr_grid_db=(5.0, 15.0),
            n_frames=4,
            seed=11,
            estimators=(Estimator.LS,),
        )
        records = run_sweep(cfg)
        for si, snr in enumerate(cfg.snr_grid_db):
            num = den = 0.0
            errs = bits = 0
            for trial in range(cfg.n_frames):
                rng = np.random.default_rng(
                    np.random.SeedSequence([cfg.seed, 0, 0, si, trial])
                )
                res = run_trial(cfg, 8, snr, Estimator.LS, rng)
                num += res.mse_num_all
                den += res.mse_den_all
                errs += res.bit_errors
                bits += res.bit_count
            rec = [r for r in records if r.snr_db == snr][0]
            assert rec.mse_all_subcarriers == pytest.approx(num / den, rel=1e-12)
            assert rec.ber == pytest.approx(errs / bits, rel=1e-12)

    def test_estimators_share_trial_randomness(self):
        # hybrid on a CP-covered channel must reproduce LMMSE exactly
        cfg = SweepConfig(
            channel_lengths=(6,),
            snr_grid_db=(10.0,),
            n_frames=5,
            seed=2,
            estimators=(Estimator.LMMSE, Estimator.HYBRID),
        )
        by_est = {r.estimator: r for r in run_sweep(cfg)}
        assert (
            by_est[Estimator.HYBRID].mse_all_subcarriers
            == by_est[Estimator.LMMSE].mse_all_subcarriers
        )
        assert by_est[Estimator.HYBRID].ber == by_est[Estimator.LMMSE].ber
        assert by_est[Estimator.HYBRID].branch_fraction_ls == 0.0

    def test_channel_length_order_is_canonical(self):
        a = SweepConfig(channel_lengths=(10, 6), seed=3)
        assert a.channel_lengths == (6, 10)

    def test_qam16_configuration_runs_end_to_end(self):
        cfg = SweepConfig(
            system=SystemConfig(constellation=Constellation.QAM16),
            channel_lengths=(6,),
            snr_grid_db=(np.inf,),
            n_frames=2,
            seed=13,
            estimators=(Estimator.PERFECT,),
        )
        rec = run_sweep(cfg)[0]
        assert rec.ber == 0.0

    def test_validation_errors(self):
        with pytest.raises(ValueError, match="sorted"):
            SweepConfig(snr_grid_db=(10.0, 0.0))
        with pytest.raises(ValueError, match="n_frames"):
            SweepConfig(n_frames=0)
        with pytest.raises(ValueError, match="non-empty"):
            SweepConfig(channel_lengths=())
        with pytest.raises(ValueError, match="Estimator"):
            SweepConfig(estimators=("ls",))


class TestRecordsAndCsv:
    def _records(self):
        return [
            SweepRecord(
                snr_db=0.0,
                channel_len=6,
                estimator=Estimator.LS,
                mse_all_subcarriers=0.5,
                mse_pilot_subcarriers=1.0,
                ber=0.25,
                n_trials=10,
                branch_fraction_ls=None,
                seed=42,
            ),
            SweepRecord(
                snr_db=0.0,
                channel_len=6,
                estimator=Estimator.HYBRID,
                mse_all_subcarriers=0.1,
                mse_pilot_subcarriers=0.2,
                ber=0.125,
                n_trials=10,
                branch_fraction_ls=0.0,
                seed=42,
            ),
        ]

    def test_empty_records_give_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv([], path)
        assert path.read_text() == CSV_HEADER + "\n"

    def test_one_record_two_lines(self):
        buf = io.StringIO()
        emit_csv(self._records()[:1], buf)
        lines = buf.getvalue().splitlines()
        assert len(lines) == 2
        assert lines[0] == CSV_HEADER
        assert lines[1] == "0,6,ls,0.5,1,0.25,10,,42"

    def test_rows_sorted_ls_before_hybrid(self):
        buf = io.StringIO()
        emit_csv(list(reversed(self._records())), buf)
        lines = buf.getvalue().splitlines()
        assert lines[1].split(",")[2] == "ls"
        assert lines[2].split(",")[2] == "hybrid"
        assert lines[2].split(",")[7] == "0"

    def test_rerun_same_seed_byte_identical(self, tmp_path):
        cfg = SweepConfig(
            channel_lengths=(6,),
            snr_grid_db=(0.0, 10.0),
            n_frames=2,
            seed=5,
            estimators=(Estimator.LS, Estimator.LMMSE),
        )
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(run_sweep(cfg), p1)
        emit_csv(run_sweep(cfg), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_write_failure_names_path(self, tmp_path):
        with pytest.raises(OSError, match="no/such"):
            emit_csv([], tmp_path / "no" / "such" / "dir.csv")

    def test_record_validation(self):
        with pytest.raises(ValueError, match="ber"):
            SweepRecord(0.0, 6, Estimator.LS, 0.0, 0.0, 1.5, 1, None, 0)
        with pytest.raises(ValueError, match="branch"):
            SweepRecord(0.0, 6, Estimator.HYBRID, 0.0, 0.0, 0.5, 1, 1.5, 0)

    def test_summary_mentions_branch_only_for_hybrid(self):
        text = format_summary(self._records())
        ls_line, hybrid_line = text.splitlines()
        assert "ls_branch" not in ls_line
        assert "ls_branch=0.00" in hybrid_line
