from __future__ import annotations

import pytest

from prodyn import lti, synth
from prodyn.crossval import (PartitionOutcome, choose_overall, evaluate_split,
                             run_protocol, validate_model)
from prodyn.fitting import CandidateModel, FitOptions, multistart
from prodyn.metrics import quality_metrics
from prodyn.series import normalize, partition_grid, split_at

REF_MODEL = lti.first_order(0.6646, 0.6687)
OPTS = FitOptions()


def make_pair(noise=0.0, seed=0, n=181, plan_seed=7, tf=REF_MODEL, gain_shift=None):
    spec = synth.SynthSpec(
        tf=tf, increments=synth.jittered_increments(n - 1, 2.2, plan_seed),
        noise_fraction=noise, seed=seed)
    dataset, _ = synth.generate(spec, gain_shift=gain_shift)
    return normalize(dataset)


@pytest.fixture(scope="module")
def noiseless_report():
    return run_protocol(make_pair(), OPTS)


class TestRunProtocol:
    def test_noiseless_recovers_generator_everywhere(self, noiseless_report):
        assert len(noiseless_report.outcomes) == 9
        for out in noiseless_report.outcomes:
            b, a = lti.first_order_params(out.model.tf)
            assert abs(b - 0.6646) / 0.6646 < 1e-6
            assert abs(a - 0.6687) / 0.6687 < 1e-6
            assert out.estimation.unfitness_percent < 0.01
            if out.validation is not None and out.validation.unfitness_percent is not None:
                assert out.validation.unfitness_percent < 0.01

    def test_last_partition_validation_undefined(self, noiseless_report):
        last = noiseless_report.outcomes[-1]
        assert last.split_hour == 180.0
        assert last.validation.unfitness_percent is None
        assert last.validation.fpe is None

    def test_monotone_information_on_noiseless_data(self, noiseless_report):
        unfits = [o.estimation.unfitness_percent for o in noiseless_report.outcomes]
        for earlier, later in zip(unfits, unfits[1:]):
            assert later <= earlier + 1e-9

    def test_report_is_reproducible(self, noiseless_report):
        again = run_protocol(make_pair(), OPTS)
        assert again.dataset_fingerprint == noiseless_report.dataset_fingerprint
        for a, b in zip(again.outcomes, noiseless_report.outcomes):
            assert a.model.tf.num == b.model.tf.num
            assert a.model.tf.den == b.model.tf.den
            assert a.model.cost == b.model.cost


class TestValidateModel:
    def test_generator_validates_cleanly(self):
        pair = make_pair(n=101)
        parts = partition_grid(101, 1.0, 20.0)
        truth_candidate = CandidateModel(REF_MODEL, 0.0, 2, 0, True)
        metrics = validate_model(truth_candidate, pair, parts[0])
        assert metrics.unfitness_percent < 1e-6

    def test_wrong_gain_scores_worse_than_truth(self):
        pair = make_pair(n=101)
        parts = partition_grid(101, 1.0, 20.0)
        truth_candidate = CandidateModel(REF_MODEL, 0.0, 2, 0, True)
        doubled = CandidateModel(lti.first_order(2 * 0.6646, 0.6687), 0.0, 2, 0, True)
        v_true = validate_model(truth_candidate, pair, parts[0])
        v_wrong = validate_model(doubled, pair, parts[0])
        assert v_wrong.unfitness_percent > 50.0
        assert v_wrong.unfitness_percent > v_true.unfitness_percent

    def test_regime_change_blows_up_late_validation(self):
        # gain doubles after hour 160: the pre-shift model misses the tail
        pair = make_pair(noise=0.01, seed=4, gain_shift=(160.0, 2.0))
        best, est_m, val_m, _ = evaluate_split(pair, 160.0, OPTS)
        assert val_m.unfitness_percent > 3.0 * est_m.unfitness_percent


class TestChooseOverall:
    def test_single_partition_fills_both_roles(self):
        m = quality_metrics([0.0, 1.0, 2.0], [0.0, 1.0, 2.0], 2)
        out = PartitionOutcome(1, 20.0, 20, CandidateModel(REF_MODEL, 0.0, 2, 1, True),
                               m, m)
        assert choose_overall([out]) == (1, 1)

    def test_tie_breaks_to_earliest(self):
        m = quality_metrics([0.0, 1.0, 2.0], [0.0, 1.0, 2.0], 2)
        cand = CandidateModel(REF_MODEL, 0.0, 2, 1, True)
        outs = [PartitionOutcome(i, 20.0 * i, 20 * i, cand, m, m)
                for i in (1, 2, 3)]
        chosen, predictor = choose_overall(outs)
        assert chosen == 1 and predictor == 1

    def test_undefined_validation_cannot_be_predictor(self):
        good = quality_metrics([0.0, 1.0, 2.0], [0.0, 1.0, 2.0], 2)
        undefined = quality_metrics([5.0], [4.0], 2)
        cand = CandidateModel(REF_MODEL, 0.0, 2, 1, True)
        outs = [PartitionOutcome(1, 20.0, 20, cand, good, undefined),
                PartitionOutcome(2, 40.0, 40, cand, good, good)]
        _, predictor = choose_overall(outs)
        assert predictor == 2

    def test_fixture_chooses_last_partition_and_early_predictor(self):
        dataset, _ = synth.campaign_fixture()
        report = run_protocol(normalize(dataset), OPTS)
        assert report.chosen_partition == 9
        assert report.predictor_partition == 2
        val = report.outcomes[report.predictor_partition - 1].validation
        assert val.unfitness_percent < 15.0


class TestEvaluateSplit:
    def test_best_no_worse_than_all_candidates(self):
        pair = make_pair(noise=0.02, seed=8, n=121)
        best, est_m, _, part = evaluate_split(pair, 40.0, OPTS)
        est_pair, _ = split_at(pair, 40.0)
        for cand in multistart(est_pair, OPTS):
            assert best.cost <= cand.cost + 1e-15

    def test_estimation_metrics_cover_prefix_only(self):
        pair = make_pair(n=61)
        _, est_m, val_m, part = evaluate_split(pair, 20.0, OPTS)
        assert est_m.n_samples == 21
        assert val_m.n_samples == 40
