import datetime as dt

import numpy as np
import pytest

from crimecast.detector import (
    BaselineModel,
    classify_corpus,
    evaluate,
    train_baseline,
)
from crimecast.exceptions import InvalidArgumentError
from crimecast.signals import ArticleRecord

FILL = ["the", "a", "report", "city", "local", "community", "police", "street",
        "meeting", "group", "member", "public", "area", "years", "officials"]
POS = ["attacked", "bias", "slur", "vandalism", "threat"]
NEG = ["budget", "festival", "weather", "parade", "election"]


def rec(i, text, label=None):
    return ArticleRecord(
        id=f"a{i:04d}",
        date=dt.date(2010, 1 + (i % 12), 1 + (i % 28)),
        title="",
        body=text,
        gold_label=label,
    )


def separable_corpus(n=200, seed=0):
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n):
        positive = i % 2 == 0
        words = list(rng.choice(FILL, size=9))
        words += list(rng.choice(POS if positive else NEG, size=3))
        rng.shuffle(words)
        records.append(rec(i, " ".join(words), "hate_crime" if positive else "not_hate_crime"))
    return records


def shuffled_corpus(n=600, base_rate=0.8, seed=3):
    rng = np.random.default_rng(seed)
    n_pos = int(base_rate * n)
    labels = ["hate_crime"] * n_pos + ["not_hate_crime"] * (n - n_pos)
    rng.shuffle(labels)
    return [rec(i, " ".join(rng.choice(FILL, size=12)), labels[i]) for i in range(n)]


class TestTraining:
    def test_separable_corpus_training_f1_is_one(self):
        corpus = separable_corpus()
        train_ids = {r.id for r in corpus[:140]}
        val_ids = {r.id for r in corpus[140:170]}
        test_ids = {r.id for r in corpus[170:]}
        model = train_baseline(corpus, split=(train_ids, val_ids, test_ids), seed=1)
        train_records = [r for r in corpus if r.id in train_ids]
        labeled, _ = classify_corpus(model, train_records)
        metrics = evaluate(labeled, train_records)
        assert metrics.f1 == 1.0

    def test_label_shuffled_chance_level(self):
        # Chance-level oracle: an uninformative detector tuned for F1 sits at
        # the all-positive corner, F1 = 2p/(1+p) = 0.889 for p = 0.8.
        corpus = shuffled_corpus(n=600, base_rate=0.8, seed=3)
        model = train_baseline(corpus, seed=3)
        assert abs(model.metadata["validation_f1"] - 0.8) <= 0.1

    def test_refit_same_seed_identical(self):
        corpus = separable_corpus(seed=5)
        m1 = train_baseline(corpus, seed=42)
        m2 = train_baseline(corpus, seed=42)
        assert m1.vocabulary == m2.vocabulary
        assert m1.bias == m2.bias
        assert m1.threshold == m2.threshold

    def test_single_class_rejected(self):
        corpus = [rec(i, "some text here", "hate_crime") for i in range(80)]
        with pytest.raises(InvalidArgumentError):
            train_baseline(corpus)

    def test_too_small_corpus_rejected(self):
        corpus = separable_corpus(n=30)
        with pytest.raises(InvalidArgumentError):
            train_baseline(corpus)

    def test_frequency_cutoff_drops_rare_tokens(self):
        corpus = separable_corpus(n=100, seed=9)
        rare = rec(999, "zyzzyx " + corpus[0].body, "hate_crime")
        model = train_baseline(corpus + [rare], split=({r.id for r in corpus + [rare]}, set(), set()), seed=0)
        assert "zyzzyx" not in model.vocabulary


class TestClassification:
    def test_empty_corpus(self):
        model = train_baseline(separable_corpus(), seed=1)
        labeled, scores = classify_corpus(model, [])
        assert labeled == [] and scores == {}

    def test_training_positive_classified_positive(self):
        corpus = separable_corpus(seed=2)
        ids = {r.id for r in corpus}
        model = train_baseline(corpus, split=(ids, set(), set()), seed=2)
        positive = corpus[0]
        label, score = model.classify(positive)
        assert label == "hate_crime"
        assert score >= model.threshold

    def test_batch_equals_record_by_record(self):
        corpus = separable_corpus(seed=4)
        model = train_baseline(corpus, seed=4)
        batch, batch_scores = classify_corpus(model, corpus)
        for record, labeled in zip(corpus, batch):
            label, score = model.classify(record)
            assert labeled.predicted_label == label
            assert batch_scores[record.id] == score

    def test_order_invariance(self):
        corpus = separable_corpus(seed=6)
        model = train_baseline(corpus, seed=6)
        forward, _ = classify_corpus(model, corpus)
        backward, _ = classify_corpus(model, corpus[::-1])
        assert {r.id: r.predicted_label for r in forward} == {
            r.id: r.predicted_label for r in backward
        }

    def test_threshold_monotonicity(self):
        corpus = separable_corpus(seed=8)
        model = train_baseline(corpus, seed=8)
        _, scores = classify_corpus(model, corpus)
        values = sorted(scores.values())
        recalls = []
        gold_pos = {r.id for r in corpus if r.gold_label == "hate_crime"}
        for threshold in values:
            predicted_pos = {rid for rid, s in scores.items() if s >= threshold}
            recalls.append(len(predicted_pos & gold_pos) / len(gold_pos))
        assert all(b <= a for a, b in zip(recalls, recalls[1:]))


class TestEvaluate:
    def test_f1_identity_at_reference_point(self):
        # Reference operating point; F1 must follow from the harmonic form.
        p, r = 0.8162, 0.8325
        f1 = 2 * p * r / (p + r)
        assert f1 == pytest.approx(0.8243, abs=5e-4)

    def test_all_correct(self):
        gold = {"a": "hate_crime", "b": "not_hate_crime"}
        m = evaluate(gold, gold)
        assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)

    def test_hand_counts(self):
        pred = {"1": "hate_crime", "2": "hate_crime", "3": "not_hate_crime",
                "4": "not_hate_crime", "5": "not_hate_crime"}
        gold = {"1": "hate_crime", "2": "not_hate_crime", "3": "hate_crime",
                "4": "hate_crime", "5": "hate_crime"}
        m = evaluate(pred, gold)
        assert m.counts.tp == 1 and m.counts.fp == 1 and m.counts.fn == 3
        assert m.precision == 0.5
        assert m.recall == 0.25
        assert m.f1 == pytest.approx(1 / 3, abs=1e-12)

    def test_f1_forms_agree(self, rng):
        for _ in range(20):
            ids = [f"i{k}" for k in range(40)]
            pred = {i: "hate_crime" if rng.random() < 0.5 else "not_hate_crime" for i in ids}
            gold = {i: "hate_crime" if rng.random() < 0.5 else "not_hate_crime" for i in ids}
            m = evaluate(pred, gold)
            if m.precision + m.recall > 0:
                harmonic = 2 * m.precision * m.recall / (m.precision + m.recall)
                assert abs(m.f1 - harmonic) < 1e-12
            assert min(m.precision, m.recall) - 1e-12 <= m.f1 <= max(m.precision, m.recall) + 1e-12

    def test_zero_denominator_warns(self):
        pred = {"a": "not_hate_crime"}
        gold = {"a": "not_hate_crime"}
        with pytest.warns(UserWarning):
            m = evaluate(pred, gold)
        assert m.precision == 0.0 and m.recall == 0.0 and m.f1 == 0.0

    def test_id_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            evaluate({"a": "hate_crime"}, {"b": "hate_crime"})


class TestModelFile:
    def test_json_roundtrip(self, tmp_path):
        model = train_baseline(separable_corpus(seed=7), seed=7)
        path = tmp_path / "model.json"
        model.to_json(path)
        back = BaselineModel.from_json(path)
        assert back.vocabulary == dict(model.vocabulary)
        assert back.bias == model.bias
        assert back.threshold == model.threshold

    def test_threshold_bounds_enforced(self):
        with pytest.raises(InvalidArgumentError):
            BaselineModel(vocabulary={"a": 1.0}, bias=0.0, threshold=1.5, metadata={})

    def test_empty_vocabulary_rejected(self):
        with pytest.raises(InvalidArgumentError):
            BaselineModel(vocabulary={}, bias=0.0, threshold=0.5, metadata={})
