"""Repetition-group reports, ROC/EER sweeps, and attack scoring."""

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

import gesturekit as gk
from gesturekit.evaluation import (
    REPETITION_GROUPS,
    TrialLabel,
    group_of,
    roc_from_scores,
    split_groups,
)

import oracles
from conftest import family_traces, recall_corpus, renumber


class TestGroups:
    def test_ranges(self):
        assert REPETITION_GROUPS == {"Generate": (1, 10), "Recall1": (11, 12), "Recall2": (13, 17)}
        assert group_of(1) == "Generate" and group_of(10) == "Generate"
        assert group_of(11) == "Recall1" and group_of(12) == "Recall1"
        assert group_of(13) == "Recall2" and group_of(17) == "Recall2"
        with pytest.raises(ValueError):
            group_of(0)
        with pytest.raises(ValueError):
            group_of(18)

    def test_split(self):
        traces = list(family_traces("circle", seed=70, reps=17 - 0))
        # family_traces assigns trials 1..17
        groups = split_groups(traces[:17])
        assert [t.trial_index for t in groups["Generate"]] == list(range(1, 11))
        assert [t.trial_index for t in groups["Recall1"]] == [11, 12]
        assert [t.trial_index for t in groups["Recall2"]] == list(range(13, 18))


def scored_corpus(seed, n=20):
    """Tiny synthetic trial corpus: 2 gestures, 10 trials each vs both claims."""
    rng = np.random.default_rng(seed)
    gids = ["a", "b"]
    traces = {
        gid: family_traces("signature", seed=71 + i, reps=10, sigma=8.0, wobble=30.0,
                           scale=1000.0, gesture_id=gid)
        for i, gid in enumerate(gids)
    }
    sets = {gid: gk.build_template_set(list(traces[gid])[:5]) for gid in gids}
    trials = []
    for gid in gids:
        picks = rng.choice(5, size=n // 4, replace=True)
        for p in picks:
            trace = traces[gid][5 + int(p)]
            for claimed in gids:
                trials.append(TrialLabel(claimed, gid, trace))
    return trials[:n], sets


class TestRocSweep:
    def test_separable_corpus_zero_eer(self):
        corpus = recall_corpus(n_gestures=4, n_two_finger=1,
                               enroll_sigma=3.0, enroll_wobble=8.0,
                               recall_sigma=4.0, recall_wobble=10.0, base_seed=500)
        sets = gk.build_template_sets(corpus, 10)
        trials = gk.build_trial_corpus(corpus, "Recall2")
        report = gk.roc_sweep(trials, sets)
        assert report.eer == 0.0
        assert not report.degenerate

    def test_matches_confusion_oracle(self):
        trials, sets = scored_corpus(seed=1)
        report = gk.roc_sweep(trials, sets)
        scores = [gk.match(t.trace, sets[t.claimed_gesture_id]).score for t in trials]
        genuine = [t.genuine for t in trials]
        for p in report.points:
            tpr, fpr = oracles.confusion_rates(scores, genuine, p.threshold)
            assert p.tpr == pytest.approx(tpr)
            assert p.fpr == pytest.approx(fpr)

    def test_monotone_rates(self):
        trials, sets = scored_corpus(seed=2)
        report = gk.roc_sweep(trials, sets)
        tprs = [p.tpr for p in report.points]
        fprs = [p.fpr for p in report.points]
        assert all(a >= b for a, b in zip(tprs, tprs[1:]))
        assert all(a >= b for a, b in zip(fprs, fprs[1:]))
        assert report.points[0].tpr == 1.0 and report.points[0].fpr == 1.0
        assert report.points[-1].tpr == 0.0 and report.points[-1].fpr == 0.0

    def test_shuffled_labels_near_chance(self):
        eers = []
        for seed in range(6):
            rng = np.random.default_rng(seed)
            scores = rng.uniform(0.5, 9.5, 120)
            genuine = np.zeros(120, dtype=bool)
            genuine[rng.choice(120, 60, replace=False)] = True
            eers.append(roc_from_scores(scores, genuine).eer)
        assert abs(float(np.mean(eers)) - 0.5) < 0.1

    def test_missing_template_set(self):
        trials, sets = scored_corpus(seed=3)
        del sets["b"]
        with pytest.raises(ValueError, match="no template set"):
            gk.roc_sweep(trials, sets)

    def test_needs_both_classes(self):
        trials, sets = scored_corpus(seed=4)
        only_genuine = [t for t in trials if t.genuine]
        with pytest.raises(ValueError, match="genuine and one impostor"):
            gk.roc_sweep(only_genuine, sets)

    def test_degenerate_flag(self):
        report = roc_from_scores([1.0, 1.0, 1.0, 1.0], [True, True, False, False])
        assert report.degenerate
        assert 0.0 <= report.eer <= 1.0

    @given(
        seed=st.integers(0, 5000),
        transform=st.sampled_from(["affine", "cube", "exp"]),
    )
    @settings(max_examples=40, deadline=None)
    def test_eer_rank_invariance(self, seed, transform):
        rng = np.random.default_rng(seed)
        n = 40
        scores = rng.uniform(0.0, 10.0, n)
        genuine = np.concatenate([np.ones(20, bool), np.zeros(20, bool)])
        scores[:20] += rng.uniform(0.0, 4.0, 20)  # genuine slightly higher
        f = {
            "affine": lambda x: 3.0 * x + 1.0,
            "cube": lambda x: x**3 + x,
            "exp": lambda x: np.expm1(x / 5.0),
        }[transform]
        base = roc_from_scores(scores, genuine)
        mapped = roc_from_scores(f(scores), genuine)
        assert mapped.eer == pytest.approx(base.eer, abs=1e-12)

    def test_eer_bounds_and_order_independence(self):
        trials, sets = scored_corpus(seed=5)
        report = gk.roc_sweep(trials, sets)
        assert 0.0 <= report.eer <= 1.0
        shuffled = list(trials)
        np.random.default_rng(0).shuffle(shuffled)
        assert gk.roc_sweep(shuffled, sets).eer == pytest.approx(report.eer)


class TestTemplateCountStudy:
    def test_single_count(self):
        corpus = recall_corpus(n_gestures=3, n_two_finger=0, base_seed=600,
                               enroll_sigma=4.0, enroll_wobble=10.0,
                               recall_sigma=5.0, recall_wobble=12.0)
        out = gk.template_count_study(corpus, counts=[4])
        assert len(out) == 1 and out[0]["n_templates"] == 4

    def test_separable_zero_at_every_count(self):
        corpus = recall_corpus(n_gestures=3, n_two_finger=1, base_seed=610,
                               enroll_sigma=2.0, enroll_wobble=5.0,
                               recall_sigma=2.5, recall_wobble=6.0)
        out = gk.template_count_study(corpus, counts=[2, 6, 10])
        assert [e["eer"] for e in out] == [0.0, 0.0, 0.0]

    def test_insufficient_repetitions(self):
        corpus = recall_corpus(n_gestures=2, base_seed=620)
        short = {gid: [t for t in trs if t.trial_index <= 8 or t.trial_index >= 13]
                 for gid, trs in corpus.items()}
        with pytest.raises(ValueError, match="needs 10"):
            gk.template_count_study(short, counts=[10])


class TestTrialCorpus:
    def test_counts(self):
        corpus = recall_corpus(n_gestures=3, base_seed=630)
        trials = gk.build_trial_corpus(corpus, "Recall2")
        assert len(trials) == 3 * 5 * 3  # gestures x recall traces x claims
        assert sum(t.genuine for t in trials) == 15

    def test_recall1_empty_when_absent(self):
        corpus = recall_corpus(n_gestures=2, base_seed=640)
        assert gk.build_trial_corpus(corpus, "Recall1") == []


class TestAnalyzeGesture:
    def test_uniform_noise_ratio_near_one(self):
        traces = list(family_traces("zigzag", seed=80, reps=17, sigma=2.0))
        report = gk.analyze_gesture(traces)
        assert report.mean_mi_generate is not None
        assert report.mean_mi_recall1 is not None
        assert report.mean_mi_recall2 is not None
        assert 0.7 < report.memorability_ratio < 1.3
        assert report.finger_count == 1
        assert set(report.mean_duration_s) == {"Generate", "Recall1", "Recall2"}

    def test_degraded_recall_lowers_ratio(self):
        gen = list(family_traces("zigzag", seed=81, reps=10, sigma=1.5, path_seed=81, gesture_id="g"))
        bad = family_traces("zigzag", seed=82, reps=5, sigma=5.0, path_seed=81, gesture_id="g")
        traces = gen + [renumber(t, 13 + i, 2) for i, t in enumerate(bad)]
        report = gk.analyze_gesture(traces)
        assert report.memorability_ratio < 1.0

    def test_generate_only_leaves_recall_fields_none(self):
        traces = list(family_traces("circle", seed=83, reps=10))
        report = gk.analyze_gesture(traces)
        assert report.mean_mi_generate is not None
        assert report.mean_mi_generate_stable is not None
        assert report.mean_mi_recall1 is None
        assert report.mean_mi_recall2 is None
        assert report.cross_mi is None
        assert report.memorability_ratio is None

    def test_missing_generate_group(self):
        traces = [renumber(t, 13 + i, 2) for i, t in
                  enumerate(family_traces("circle", seed=84, reps=5))]
        with pytest.raises(ValueError, match="Generate"):
            gk.analyze_gesture(traces)

    def test_per_trial_series(self):
        traces = list(family_traces("zigzag", seed=85, reps=12, sigma=2.0))
        report = gk.analyze_gesture(traces)
        assert set(report.duration_by_trial) == set(range(1, 13))
        assert all(report.mi_by_trial[t] is not None for t in range(1, 11))

    def test_to_dict_roundtrips_to_json(self):
        import json
        traces = list(family_traces("circle", seed=86, reps=10))
        d = gk.analyze_gesture(traces).to_dict()
        json.dumps(d)  # must be JSON-serializable
        assert d["gesture_id"] == traces[0].gesture_id


class TestAttackReport:
    def test_wrong_finger_count_scores_zero(self):
        targets = list(family_traces("zigzag", seed=90, reps=10, sigma=4.0, scale=1000.0))
        tset = gk.build_template_set(targets)
        attacker = [t for t in family_traces("zigzag", seed=91, reps=5, sigma=4.0,
                                             finger_count=2, scale=1000.0)]
        rows = gk.attack_report(tset, targets[:2], {"att1": attacker})
        att = [r for r in rows if r.participant == "att1"][0]
        assert att.best_score == 0.0

    def test_target_above_attackers_at_triple_noise(self):
        target_fam = dict(kind="signature", scale=1000.0, path_seed=92, gesture_id="t")
        enroll = list(family_traces(seed=92, reps=10, sigma=4.0, wobble=12.0, **target_fam))
        recalls = [t for t in family_traces(seed=93, reps=3, sigma=4.0, wobble=12.0, **target_fam)]
        tset = gk.build_template_set(enroll)
        attackers = {
            f"att{k}": [t for t in family_traces(seed=94 + k, reps=5, sigma=12.0,
                                                 wobble=60.0, **target_fam)]
            for k in range(3)
        }
        rows = gk.attack_report(tset, recalls, attackers)
        target_row = rows[0]
        assert target_row.participant == "target"
        assert all(target_row.best_score > r.best_score for r in rows[1:])

    def test_empty_attackers(self):
        targets = list(family_traces("circle", seed=95, reps=10))
        tset = gk.build_template_set(targets)
        rows = gk.attack_report(tset, targets[:2], {})
        assert len(rows) == 1 and rows[0].participant == "target"
