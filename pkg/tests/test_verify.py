"""Certification suites: contraction, commutation, energy, decay, equivariance."""

import numpy as np
import pytest

from scatmaxp.grid import SignalGrid, l2_norm, unit_plate
from scatmaxp.pooling import max_pool, partition_plate
from scatmaxp.verify import (
    VerificationReport,
    VerifyConfig,
    check_commutation,
    check_contraction,
    check_energy_monotonic,
    check_invariance_decay,
    check_shift_equivariance_plain,
    default_suites,
    random_signal,
)

SMALL = VerifyConfig(grid=(32, 32), max_depth=2)


class TestReportSemantics:
    def test_verdict_rules(self):
        report = VerificationReport("demo", {})
        assert report.verdict == "inconclusive"
        report.skip("a", "skipped", 0.0, 0.0)
        assert report.verdict == "inconclusive"
        report.add("b", "ok", 0.5, 1.0, True)
        assert report.verdict == "pass"
        report.add("c", "bad", 2.0, 1.0, False)
        assert report.verdict == "fail"

    def test_records_keep_measured_and_bound(self):
        report = check_contraction(4, SMALL)
        for case in report.cases:
            assert np.isfinite(case.measured)
            assert np.isfinite(case.bound)

    def test_csv_is_deterministic(self):
        a = check_contraction(30, SMALL).to_csv()
        b = check_contraction(30, SMALL).to_csv()
        assert a == b
        assert a.splitlines()[-2].count(",") == 4


class TestSignalFamilies:
    def test_uniform_family_is_flat_nonnegative(self):
        rng = np.random.default_rng(0)
        f = random_signal(rng, "uniform", (16, 16))
        assert np.all(f.values.real >= 0) and np.all(f.values.real <= 1)

    def test_spike_family_is_sparse(self):
        rng = np.random.default_rng(0)
        f = random_signal(rng, "spikes", (16, 16))
        assert 0 < np.count_nonzero(f.values) <= 16 * 16 // 64 + 1

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError):
            random_signal(np.random.default_rng(0), "checkerboard", (8, 8))


class TestContraction:
    def test_random_trials_never_expand(self):
        report = check_contraction(200, SMALL)
        assert report.verdict == "pass"
        assert report.n_fail == 0
        assert all(c.measured <= c.bound for c in report.cases if c.status == "pass")

    def test_constant_signal_ratio_is_S_to_minus_d_over_2(self):
        # ||P(c)||_2 / ||c||_2 = S^(-d/2): plate volume shrinks by S^d, values equal
        f = SignalGrid(unit_plate((16, 16)), np.full((16, 16), 0.6))
        pooled = max_pool(f, partition_plate(f.plate, (8, 8)), 2.0, "off")
        assert l2_norm(pooled) / l2_norm(f) == pytest.approx(0.5, rel=1e-12)

    def test_spike_signal_still_contracts_under_standard_pooling(self):
        # sparse spikes fail the admissibility screen at S=2 but the discrete
        # contraction holds regardless for one output sample per block; the
        # ratio drops strictly below 1 once a block holds two nonzero samples
        values = np.zeros((16, 16))
        values[2, 4] = 0.4
        values[3, 5] = 0.8  # same 2x2-sample block as the spike above
        f = SignalGrid(unit_plate((16, 16)), values)
        pooled = max_pool(f, partition_plate(f.plate, (8, 8)), 2.0, "off")
        assert l2_norm(pooled) < l2_norm(f)
        lone = SignalGrid(unit_plate((16, 16)), np.eye(16) * 0.5)
        lone_pooled = max_pool(lone, partition_plate(lone.plate, (8, 8)), 2.0, "off")
        assert l2_norm(lone_pooled) <= l2_norm(lone) * (1 + 1e-12)

    def test_inadmissible_draws_are_skipped_not_failed(self):
        config = VerifyConfig(grid=(32, 32), allowed_factors=(1.01,))
        report = check_contraction(40, config)
        assert report.verdict == "inconclusive"
        assert report.n_skip == 40 and report.n_fail == 0

    def test_trials_must_be_positive(self):
        with pytest.raises(ValueError):
            check_contraction(0, SMALL)


class TestCommutation:
    def test_bit_exact_over_random_shifts(self):
        report = check_commutation(60, SMALL)
        assert report.verdict == "pass"
        assert all(c.measured == 0.0 for c in report.cases)

    def test_first_case_is_the_zero_shift(self):
        report = check_commutation(1, SMALL)
        assert "blocks=[0, 0]" in report.cases[0].summary


class TestEnergyMonotonicity:
    def test_morlet_bank_with_measured_slack(self):
        f = random_signal(np.random.default_rng(1), "uniform", (32, 32))
        report = check_energy_monotonic(f, SMALL)
        assert report.verdict == "pass"
        assert 0 < report.environment["eps_lp"] < 1e-12

    def test_partition_fixture_decreases_strictly(self):
        config = VerifyConfig(grid=(32, 32), max_depth=2, bank_kind="partition")
        f = random_signal(np.random.default_rng(2), "uniform", (32, 32))
        report = check_energy_monotonic(f, config)
        assert report.verdict == "pass"
        assert report.environment["eps_lp"] == 0.0
        steps = [c for c in report.cases if c.name.startswith("step_")]
        assert all(c.measured < c.bound for c in steps)  # strict decrease

    def test_zero_signal_keeps_zero_energy(self):
        f = SignalGrid(unit_plate((32, 32), centered=True), np.zeros((32, 32)))
        report = check_energy_monotonic(f, SMALL)
        assert report.verdict == "pass"
        assert all(c.measured == 0.0 for c in report.cases)


class TestInvarianceDecay:
    def test_uniform_image_passes_bound_and_monotonicity(self):
        f = random_signal(np.random.default_rng(3), "uniform", (32, 32))
        c = (4 / 32, 0.0)  # S^max_depth = 4 spacings
        report = check_invariance_decay(f, c, SMALL)
        assert report.verdict == "pass"

    def test_zero_shift_gives_zero_distances(self):
        f = random_signal(np.random.default_rng(4), "uniform", (32, 32))
        report = check_invariance_decay(f, (0.0, 0.0), SMALL)
        bounds = [c for c in report.cases if c.name.startswith("bound_")]
        assert all(c.measured == 0.0 for c in bounds)

    def test_bound_curve_is_geometric(self):
        f = random_signal(np.random.default_rng(5), "uniform", (32, 32))
        report = check_invariance_decay(f, (4 / 32, 0.0), SMALL)
        bounds = [c.bound for c in report.cases if c.name.startswith("bound_")]
        ratios = [bounds[m + 1] / bounds[m] for m in range(len(bounds) - 1)]
        np.testing.assert_allclose(ratios, 0.25, rtol=1e-12)

    def test_misaligned_shift_rejected(self):
        f = random_signal(np.random.default_rng(6), "uniform", (32, 32))
        with pytest.raises(ValueError, match="sub-plate-aligned"):
            check_invariance_decay(f, (1 / 32, 0.0), SMALL)  # single-sample shift
        with pytest.raises(ValueError, match="between grid cells"):
            check_invariance_decay(f, (0.01, 0.0), SMALL)  # not grid-aligned
        with pytest.raises(ValueError, match="sub-plate-aligned at depth 1"):
            check_invariance_decay(f, (2 / 32, 0.0), SMALL)  # halves to one sample

    def test_spike_inputs_satisfy_the_bound_but_not_monotonicity(self):
        # recorded limitation: the decay bound (the theorem) holds for peaked
        # inputs, while the d_{m+1} <= d_m side assertion can fail at m = 0 -> 1
        f = random_signal(np.random.default_rng(7), "spikes", (32, 32))
        report = check_invariance_decay(f, (4 / 32, 0.0), SMALL)
        bound_cases = [c for c in report.cases if c.name.startswith("bound_")]
        assert all(c.status == "pass" for c in bound_cases)


class TestShiftEquivariance:
    def test_bit_exact_for_direct_evaluation(self):
        config = VerifyConfig(equivariance_grid=(16, 16), equivariance_depth=2)
        report = check_shift_equivariance_plain(6, config)
        assert report.verdict == "pass"
        assert all(c.measured == 0.0 for c in report.cases)

    def test_invariance_diagnostic_is_recorded_per_J(self):
        config = VerifyConfig(equivariance_grid=(16, 16), equivariance_depth=1)
        report = check_shift_equivariance_plain(2, config)
        assert sum("L_c output difference at J=" in n for n in report.notes) == 3


class TestDefaultSuites:
    def test_all_suites_pass_at_reduced_trial_counts(self):
        config = VerifyConfig(grid=(32, 32), max_depth=2,
                              equivariance_grid=(16, 16), equivariance_depth=1)
        trials = {"contraction": 40, "commutation": 20, "equivariance": 4,
                  "energy": 2, "decay": 2}
        suites = default_suites(config, trials)
        assert set(suites) == {"contraction", "commutation", "energy", "decay",
                               "equivariance"}
        for name, run in suites.items():
            report = run()
            assert report.verdict == "pass", f"{name}: {report.summary_line()}"

    def test_merged_reports_prefix_inputs(self):
        config = VerifyConfig(grid=(32, 32), max_depth=2)
        report = default_suites(config, {"energy": 2})["energy"]()
        assert any(c.name.startswith("input00_") for c in report.cases)
        assert any(c.name.startswith("input01_") for c in report.cases)
