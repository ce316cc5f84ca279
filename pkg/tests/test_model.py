import numpy as np
import pytest

from codeswitch.corpus import Dataset
from codeswitch.errors import DataError
from codeswitch.model import JointLinearModel, TrainConfig, train
from codeswitch.toygen import ToySpec, generate_toy

from util import utt


@pytest.fixture(scope="module")
def toy200():
    return generate_toy(ToySpec(n_train=200, n_test=40, seed=3))


@pytest.fixture(scope="module")
def model200(toy200):
    return train(TrainConfig(seed=0), toy200.train.pivot)


def intent_accuracy(model, ds):
    preds = model.predict_batch([u.tokens for u in ds])
    return sum(p[0] == u.intent for u, p in zip(ds, preds)) / len(ds)


class TestTrain:
    def test_templated_corpus_convergence(self, toy200, model200):
        # 200 templated utterances train to near-perfect intent accuracy
        assert intent_accuracy(model200, toy200.train.pivot) >= 0.95

    def test_beats_majority_baseline(self, toy200, model200):
        counts = {}
        for u in toy200.train.pivot:
            counts[u.intent] = counts.get(u.intent, 0) + 1
        majority = max(counts.values()) / len(toy200.train.pivot)
        assert intent_accuracy(model200, toy200.train.pivot) >= majority

    def test_memorizes_single_utterance(self):
        u = utt("book a hotel", "O O B-what", intent="hotel")
        ds = Dataset("aa", tuple(
            utt("book a hotel", "O O B-what", intent="hotel", uid=str(i)) for i in range(8)
        ))
        m = train(TrainConfig(epochs=20, seed=1), ds)
        assert m.predict(u.tokens) == ("hotel", ["O", "O", "B-what"])
        assert m.loss(u) < 0.1

    def test_deterministic_for_seed(self, toy200):
        cfg = TrainConfig(epochs=5, seed=42)
        a = train(cfg, toy200.train.pivot)
        b = train(cfg, toy200.train.pivot)
        assert np.array_equal(a.intent_weights, b.intent_weights)
        assert np.array_equal(a.slot_weights, b.slot_weights)
        assert a.intent_feature_list == b.intent_feature_list

    def test_seed_changes_weights(self, toy200):
        a = train(TrainConfig(epochs=5, seed=1), toy200.train.pivot)
        b = train(TrainConfig(epochs=5, seed=2), toy200.train.pivot)
        assert not np.array_equal(a.intent_weights, b.intent_weights)

    def test_empty_data_rejected(self):
        with pytest.raises(DataError, match="empty"):
            train(TrainConfig(), [])

    def test_heldout_loss_decreases_over_early_epochs(self, toy200):
        held = list(toy200.test.pivot)
        losses = []
        for epochs in (1, 2, 3):
            m = train(TrainConfig(epochs=epochs, seed=7), toy200.train.pivot)
            losses.append(float(np.mean(m.loss_batch(held))))
        assert losses[0] > losses[1] > losses[2]

    def test_slot_vocab_closed_over_continuations(self, model200):
        for lab in model200.slot_labels:
            if lab.startswith("B"):
                assert "I" + lab[1:] in model200.slot_labels


class TestLoss:
    def test_nonnegative_and_finite(self, toy200, model200):
        losses = model200.loss_batch(list(toy200.test.pivot))
        assert all(np.isfinite(l) and l >= 0 for l in losses)

    def test_wrong_intent_increases_loss(self, toy200, model200):
        u = toy200.train.pivot.utterances[0]
        other = next(i for i in model200.intent_labels if i != u.intent)
        wrong = utt(u.tokens, u.slots, intent=other, uid=u.id, lang=u.lang)
        assert model200.loss(wrong) > model200.loss(u)

    def test_batch_of_duplicates(self, toy200, model200):
        u = toy200.test.pivot.utterances[0]
        a, b = model200.loss_batch([u, u])
        assert a == b == model200.loss(u)

    def test_oov_tokens_never_error(self, model200):
        u = utt("zzz qqq www", "O O O", intent=model200.intent_labels[0])
        loss = model200.loss(u)
        assert np.isfinite(loss) and loss >= 0

    def test_unknown_gold_label_is_an_error(self, model200):
        u = utt("show me", "O O", intent="no_such_intent")
        with pytest.raises(DataError, match="unknown to this model"):
            model200.loss(u)


class TestPredict:
    def test_memorized(self, toy200, model200):
        u = toy200.train.pivot.utterances[0]
        intent, slots = model200.predict(u.tokens)
        assert intent == u.intent
        assert tuple(slots) == u.slots

    def test_all_oov_sequence(self, model200):
        intent, slots = model200.predict(("zzz", "qqq"))
        assert intent in model200.intent_labels
        assert len(slots) == 2
        assert all(s in model200.slot_labels for s in slots)

    def test_batch_order(self, toy200, model200):
        us = list(toy200.test.pivot)[:6]
        batch = model200.predict_batch([u.tokens for u in us])
        singles = [model200.predict(u.tokens) for u in us]
        assert batch == singles

    def test_empty_tokens_rejected(self, model200):
        with pytest.raises(DataError):
            model200.predict(())


class TestSerialization:
    def test_loss_invariant_under_round_trip(self, tmp_path, toy200, model200):
        path = tmp_path / "model.json"
        model200.save(path)
        again = JointLinearModel.load(path)
        us = list(toy200.test.pivot)[:10]
        assert model200.loss_batch(us) == again.loss_batch(us)
        assert model200.predict_batch([u.tokens for u in us]) == again.predict_batch(
            [u.tokens for u in us]
        )

    def test_save_is_deterministic(self, tmp_path, model200):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        model200.save(a)
        model200.save(b)
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_foreign_files(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"format": "something-else"}', encoding="utf-8")
        with pytest.raises(DataError):
            JointLinearModel.load(path)
