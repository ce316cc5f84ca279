import pytest

from codeswitch.corpus import Dataset
from codeswitch.errors import DataError, ScorerContractError
from codeswitch.metrics import (
    EvalReport,
    LangMetrics,
    bio_spans,
    combine,
    evaluate,
    load_report_json,
    render_report,
    save_report_json,
)
from codeswitch.seeding import derive_rng

from util import StubPredictScorer, micro_f1_oracle, utt

PAPER_ROW = (0.980, 0.975, 0.968, 0.972, 0.977, 0.970, 0.968)
PAPER_LANGS = ("en", "de", "es", "fr", "ja", "pt", "zh")


def report_from_values(values, metric="intent_accuracy", langs=PAPER_LANGS):
    rows = {}
    for lang, v in zip(langs, values):
        fields = {m: 0.0 for m in ("intent_accuracy", "slot_f1_micro", "semantic_accuracy")}
        fields[metric] = v
        rows[lang] = LangMetrics(**fields, n_utterances=1, n_tokens=1)
    return combine(rows)


class TestEvaluate:
    def test_half_right(self):
        ds = Dataset("en", (utt("a b", "B-x O", uid="1", intent="p", lang="en"),
                            utt("c d", "O O", uid="2", intent="p", lang="en")))
        preds = [("p", ["B-x", "O"]), ("q", ["O", "O"])]
        rep = evaluate(StubPredictScorer(preds), ds)
        m = rep.per_lang["en"]
        assert m.intent_accuracy == 0.5
        assert m.semantic_accuracy == 0.5
        assert m.slot_f1_micro == 1.0  # slots all correct

    def test_identity_predictions(self, toy_small):
        ds = toy_small.test.pivot
        preds = [(u.intent, list(u.slots)) for u in ds]
        rep = evaluate(StubPredictScorer(preds), ds)
        m = rep.per_lang["aa"]
        assert (m.intent_accuracy, m.slot_f1_micro, m.semantic_accuracy) == (1.0, 1.0, 1.0)

    def random_fixture(self, rng, n=50):
        intents = ["p", "q", "r"]
        labels = ["O", "B-x", "I-x", "B-y", "I-y"]
        golds, preds, utts = [], [], []
        for i in range(n):
            length = int(rng.integers(1, 9))
            gold_slots = [labels[int(rng.integers(len(labels)))] for _ in range(length)]
            from codeswitch.corpus import repair_bio

            gold_slots = list(repair_bio(gold_slots))
            pred_slots = [labels[int(rng.integers(len(labels)))] for _ in range(length)]
            gold_intent = intents[int(rng.integers(3))]
            pred_intent = intents[int(rng.integers(3))]
            utts.append(utt(["t"] * length, gold_slots, intent=gold_intent, uid=str(i), lang="en"))
            golds.append(gold_slots)
            preds.append((pred_intent, pred_slots))
        return Dataset("en", tuple(utts)), golds, preds

    def test_micro_f1_matches_brute_force_oracle(self):
        rng = derive_rng(7, "metrics")
        for trial in range(50):
            ds, golds, preds = self.random_fixture(rng)
            rep = evaluate(StubPredictScorer(preds), ds)
            expected = micro_f1_oracle(golds, [p[1] for p in preds])
            assert abs(rep.per_lang["en"].slot_f1_micro - expected) <= 1e-12
            assert rep.per_lang["en"].semantic_accuracy <= rep.per_lang["en"].intent_accuracy

    def test_semantic_bounded_by_exact_slot_match(self):
        rng = derive_rng(8, "metrics")
        ds, golds, preds = self.random_fixture(rng)
        rep = evaluate(StubPredictScorer(preds), ds)
        exact = sum(tuple(p[1]) == u.slots for u, p in zip(ds, preds)) / len(ds)
        assert rep.per_lang["en"].semantic_accuracy <= exact

    def test_permutation_invariance(self):
        rng = derive_rng(9, "metrics")
        ds, _, preds = self.random_fixture(rng, n=20)
        rep1 = evaluate(StubPredictScorer(preds), ds)
        order = [int(i) for i in rng.permutation(len(preds))]
        shuffled = Dataset("en", tuple(ds.utterances[i] for i in order))
        rep2 = evaluate(StubPredictScorer([preds[i] for i in order]), shuffled)
        assert rep1.per_lang["en"] == rep2.per_lang["en"]

    def test_empty_dataset_rejected(self):
        with pytest.raises(DataError):
            evaluate(StubPredictScorer([]), Dataset("en", ()))

    def test_length_mismatch_is_contract_violation(self):
        ds = Dataset("en", (utt("a b", "O O", uid="1", lang="en"),))
        with pytest.raises(ScorerContractError):
            evaluate(StubPredictScorer([("p", ["O"])]), ds)

    def test_groups_by_language(self):
        ds = Dataset(
            "mix",
            (utt("a", "O", uid="1", lang="de", intent="p"),
             utt("b", "O", uid="2", lang="fr", intent="p")),
        )
        rep = evaluate(StubPredictScorer([("p", ["O"]), ("q", ["O"])]), ds)
        assert rep.per_lang["de"].intent_accuracy == 1.0
        assert rep.per_lang["fr"].intent_accuracy == 0.0
        assert rep.average.intent_accuracy == 0.5


class TestSpanF1:
    def test_spans(self):
        assert bio_spans(["B-x", "I-x", "O", "B-y"]) == {("x", 0, 2), ("y", 3, 4)}
        assert bio_spans(["I-x", "I-y"]) == {("x", 0, 1), ("y", 1, 2)}
        assert bio_spans(["O", "O"]) == set()

    def test_span_level_differs_from_token_level(self):
        # boundary error: token-level gets partial credit, span-level none
        ds = Dataset("en", (utt("a b c", "B-x I-x O", uid="1", intent="p", lang="en"),))
        preds = [("p", ["B-x", "O", "O"])]
        token_rep = evaluate(StubPredictScorer(preds), ds)
        span_rep = evaluate(StubPredictScorer(preds), ds, span_f1=True)
        assert token_rep.per_lang["en"].slot_f1_micro == pytest.approx(2 / 3)
        assert span_rep.per_lang["en"].slot_f1_micro == 0.0


class TestRenderReport:
    def test_paper_intent_row_byte_exact(self):
        rep = report_from_values(PAPER_ROW)
        text = render_report({"xlm-r": rep}, fmt="tsv", metrics=("intent_accuracy",))
        expected = "xlm-r\t0.980\t0.975\t0.968\t0.972\t0.977\t0.970\t0.968\t0.973"
        assert expected in text.splitlines()

    def test_avg_is_unweighted_mean(self):
        rep = report_from_values(PAPER_ROW)
        assert abs(rep.average.intent_accuracy - sum(PAPER_ROW) / 7) <= 1e-9

    def test_single_language_two_columns(self):
        rep = report_from_values((0.5,), langs=("en",))
        text = render_report({"m": rep}, fmt="tsv", metrics=("intent_accuracy",))
        lines = text.splitlines()
        assert lines[1] == "model\ten\tavg"
        assert lines[2] == "m\t0.500\t0.500"

    def test_markdown_round_trips(self):
        rep = report_from_values(PAPER_ROW)
        text = render_report({"xlm-r": rep}, fmt="markdown", metrics=("intent_accuracy",))
        table_lines = [l for l in text.splitlines() if l.startswith("|")]
        parsed = [
            [cell.strip() for cell in line.strip("|").split("|")]
            for line in table_lines
            if "---" not in line
        ]
        header, row = parsed
        assert header == ["model", *PAPER_LANGS, "avg"]
        assert row == ["xlm-r", "0.980", "0.975", "0.968", "0.972", "0.977", "0.970", "0.968", "0.973"]

    def test_rounding_is_half_up(self):
        rep = report_from_values((0.9725,), langs=("en",))
        text = render_report({"m": rep}, fmt="tsv", metrics=("intent_accuracy",))
        assert "m\t0.973\t0.973" in text

    def test_language_mismatch_rejected(self):
        a = report_from_values((0.5,), langs=("en",))
        b = report_from_values((0.5,), langs=("de",))
        with pytest.raises(ValueError, match="languages"):
            render_report({"a": a, "b": b})

    def test_json_round_trip(self, tmp_path):
        rep = report_from_values(PAPER_ROW)
        path = tmp_path / "report.json"
        save_report_json(rep, path)
        again = load_report_json(path)
        assert again == EvalReport(dict(rep.per_lang), rep.average)
