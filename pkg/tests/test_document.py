import re
from pathlib import Path

import pytest

from steplacer.document import (
    KITCHEN_VOCABULARY,
    DocumentError,
    LabelVocabulary,
    apply_predictions,
    assign_key_object,
    author_profile,
    delete_step,
    dump_document_profile,
    edit_text,
    load_document_profile,
    merge_steps,
    new_profile,
    read_predictions_tsv,
    rule_label,
    segment_document,
    split_step,
)

DATA = Path(__file__).parent.parent / "data"


def nonspace(s: str) -> str:
    return re.sub(r"\s+", "", s)


class TestSegmentation:
    def test_two_paragraphs(self):
        texts = segment_document("Boil water.\n\nPour it out.")
        assert texts == ["Boil water.", "Pour it out."]

    def test_sentence_mode_splits_paragraph(self):
        texts = segment_document("Boil water. Pour it out! Serve now.", mode="sentence")
        assert texts == ["Boil water.", "Pour it out!", "Serve now."]

    def test_decimal_numbers_do_not_split(self):
        texts = segment_document("Microwave for 1.5 minutes.", mode="sentence")
        assert texts == ["Microwave for 1.5 minutes."]

    def test_empty_document_rejected(self):
        with pytest.raises(DocumentError):
            segment_document("   \n\n  ")

    def test_unknown_mode_rejected(self):
        with pytest.raises(DocumentError):
            segment_document("hi", mode="word")

    def test_lossless_up_to_whitespace(self):
        raw = Path(DATA / "recipes" / "t2.txt").read_text()
        for mode in ("paragraph", "sentence"):
            texts = segment_document(raw, mode=mode)
            assert nonspace("".join(texts)) == nonspace(raw)

    def test_t2_has_thirteen_paragraph_steps(self):
        raw = Path(DATA / "recipes" / "t2.txt").read_text()
        assert len(segment_document(raw, mode="paragraph")) == 13

    def test_multiline_paragraph_is_one_step(self):
        texts = segment_document("Boil water\nand stir.\n\nDone.")
        assert texts == ["Boil water and stir.", "Done."]


class TestRuleLabel:
    def test_microwave_sentence(self):
        label, matches = rule_label("boiling a cup of water in the microwave for 5 min")
        assert label == "microwave"
        assert matches == {"microwave"}

    def test_keyword_free_sentence(self):
        label, matches = rule_label("boiling a cup of water for 5 min")
        assert label is None
        assert matches == frozenset()

    def test_two_matches_abstain(self):
        label, matches = rule_label("rinse in the sink then chill in the fridge")
        assert label is None
        assert matches == {"sink", "fridge"}

    def test_alias_coffee_machine(self):
        label, _ = rule_label("fill the coffee machine with water")
        assert label == "coffee maker"

    def test_alias_and_canonical_same_label(self):
        label, matches = rule_label("the coffee maker, also called a coffee machine")
        assert label == "coffee maker"
        assert matches == {"coffee maker"}

    def test_case_insensitive_whole_word(self):
        assert rule_label("Preheat the OVEN now")[0] == "oven"
        assert rule_label("That was a blustery ovenlike day")[0] is None

    def test_label_always_present_in_text(self):
        import numpy as np

        rng = np.random.default_rng(2)
        words = ["stir", "the", "mix", "oven", "sink", "bowl", "microwave", "plate", "now"]
        for _ in range(200):
            text = " ".join(rng.choice(words, size=rng.integers(1, 8)))
            label, matches = rule_label(text)
            if label is not None:
                assert label in text
            for m in matches:
                terms = KITCHEN_VOCABULARY.terms(m)
                assert any(t.split()[0] in text for t in terms)

    def test_vocabulary_validation(self):
        with pytest.raises(DocumentError):
            LabelVocabulary(labels=("Oven",))
        with pytest.raises(DocumentError):
            LabelVocabulary(labels=("oven", "oven"))
        with pytest.raises(DocumentError):
            LabelVocabulary(labels=("oven",), aliases={"sink": ("basin",)})

    def test_vocabulary_file(self, tmp_path):
        import json

        from steplacer.document import load_vocabulary

        path = tmp_path / "vocab.json"
        path.write_text(json.dumps({"labels": ["drill", "vise"], "aliases": {"vise": ["clamp"]}}))
        vocab = load_vocabulary(path)
        assert rule_label("tighten the clamp", vocab) == ("vise", frozenset({"vise"}))
        assert rule_label("use the drill and the vise", vocab)[0] is None


class TestAuthoring:
    def test_rule_labels_applied(self):
        profile = author_profile("demo", "Chill in the fridge.\n\nStir the bowl.")
        assert profile.steps[0].key_object == "fridge"
        assert profile.steps[0].source == "rule"
        assert profile.steps[0].confidence == 1.0
        assert profile.steps[1].key_object is None
        assert profile.steps[1].source == "unassigned"

    def test_rule_label_outside_available_stays_unassigned(self):
        profile = author_profile("demo", "Preheat the oven.", available=["sink"])
        assert profile.steps[0].key_object is None

    def test_t2_microwave_steps(self):
        raw = Path(DATA / "recipes" / "t2.txt").read_text()
        profile = author_profile("t2", raw)
        assert len(profile.steps) == 13
        by_index = {i: s.key_object for i, s in enumerate(profile.steps)}
        assert by_index[1] == "fridge"
        assert by_index[7] == "microwave"


class TestEditing:
    @pytest.fixture
    def profile(self):
        return new_profile(
            "demo", ["Take eggs.", "Crack them.", "Whisk well.", "Serve."], ["sink", "fridge"]
        )

    def test_merge_adjacent(self, profile):
        merged = merge_steps(profile, "s02", "s03")
        assert len(merged.steps) == 3
        step = merged.steps[1]
        assert step.text == "Crack them. Whisk well."
        assert step.source == "unassigned"

    def test_merge_non_adjacent_rejected(self, profile):
        with pytest.raises(DocumentError):
            merge_steps(profile, "s01", "s03")

    def test_delete(self, profile):
        out = delete_step(profile, "s02")
        assert [s.id for s in out.steps] == ["s01", "s03", "s04"]

    def test_delete_only_step_rejected(self):
        single = new_profile("one", ["Only step."], [])
        with pytest.raises(DocumentError):
            delete_step(single, "s01")

    def test_edit_resets_source(self, profile):
        labeled = assign_key_object(profile, "s01", "fridge")
        assert labeled.step("s01").source == "manual"
        edited = edit_text(labeled, "s01", "Take three eggs.")
        assert edited.step("s01").source == "unassigned"
        assert edited.step("s01").key_object is None

    def test_edit_same_text_is_noop(self, profile):
        assert edit_text(profile, "s01", "Take eggs.") is profile

    def test_split(self, profile):
        out = split_step(profile, "s02", len("Crack"))
        assert len(out.steps) == 5
        assert out.steps[1].text == "Crack"
        assert out.steps[2].text == "them."
        # splitting produces fresh ids, never reusing existing ones
        assert len({s.id for s in out.steps}) == 5

    def test_split_empty_half_rejected(self, profile):
        with pytest.raises(DocumentError):
            split_step(profile, "s02", 0)

    def test_edits_are_pure(self, profile):
        before = dump_document_profile(profile)
        merge_steps(profile, "s02", "s03")
        delete_step(profile, "s04")
        edit_text(profile, "s01", "changed")
        assert dump_document_profile(profile) == before


class TestApplyPredictions:
    @pytest.fixture
    def profile(self):
        p = new_profile(
            "demo",
            ["Boil a cup of water.", "Wash hands.", "Chill the juice."],
            ["microwave", "sink"],
        )
        return p

    def test_available_set_constraint(self, profile):
        predictions = {"s01": [("oven", 0.6), ("microwave", 0.3)]}
        out = apply_predictions(profile, predictions)
        step = out.step("s01")
        assert step.key_object == "microwave"
        assert step.confidence == pytest.approx(0.3)
        assert step.source == "model"

    def test_no_qualifying_label(self, profile):
        out = apply_predictions(profile, {"s02": [("oven", 0.9)]})
        assert out.step("s02").key_object is None
        assert out.step("s02").source == "unassigned"

    def test_manual_assignment_kept(self, profile):
        manual = assign_key_object(profile, "s03", "sink")
        out = apply_predictions(manual, {"s03": [("microwave", 0.99)]})
        assert out.step("s03").key_object == "sink"
        assert out.step("s03").source == "manual"

    def test_rule_assignment_kept(self):
        profile = author_profile("demo", "Chill in the fridge.")
        out = apply_predictions(profile, {"s01": [("sink", 0.99)]})
        assert out.step("s01").key_object == "fridge"
        assert out.step("s01").source == "rule"

    def test_empty_available_rejected(self):
        profile = new_profile("demo", ["Stir."], [])
        with pytest.raises(DocumentError):
            apply_predictions(profile, {"s01": [("sink", 0.5)]})

    def test_invariant_holds(self, profile):
        predictions = {
            "s01": [("oven", 0.9), ("toaster", 0.8)],
            "s02": [("sink", 0.7)],
            "s03": [("microwave", 0.2), ("sink", 0.1)],
        }
        out = apply_predictions(profile, predictions)
        for s in out.steps:
            assert s.key_object is None or s.key_object in out.available_key_objects


class TestSerialization:
    def test_profile_round_trip(self):
        profile = author_profile("demo", "Chill in the fridge.\n\nStir.")
        dumped = dump_document_profile(profile)
        again = load_document_profile(dumped)
        assert dump_document_profile(again) == dumped

    def test_schema_keys(self):
        import json

        profile = author_profile("demo", "Chill in the fridge.")
        data = json.loads(dump_document_profile(profile))
        assert set(data) == {"title", "available_key_objects", "steps"}
        assert set(data["steps"][0]) == {
            "id", "text", "key_object", "confidence", "source", "pref_pos",
        }

    def test_tsv_parse(self, tmp_path):
        path = tmp_path / "preds.tsv"
        path.write_text(
            "step_id\tlabel\tconfidence\n"
            "s01\toven\t0.6\n"
            "s01\tmicrowave\t0.3\n"
            "s02\tsink\t0.9\n"
        )
        preds = read_predictions_tsv(path)
        assert preds["s01"] == [("oven", 0.6), ("microwave", 0.3)]
        assert preds["s02"] == [("sink", 0.9)]

    def test_tsv_bad_row_rejected(self, tmp_path):
        path = tmp_path / "preds.tsv"
        path.write_text("s01\toven\n")
        with pytest.raises(DocumentError):
            read_predictions_tsv(path)

    def test_assigned_outside_available_rejected(self):
        import json

        broken = json.dumps(
            {
                "title": "demo",
                "available_key_objects": ["sink"],
                "steps": [
                    {
                        "id": "s01",
                        "text": "Chill it.",
                        "key_object": "spaceship",
                        "confidence": 1.0,
                        "source": "manual",
                        "pref_pos": None,
                    }
                ],
            }
        )
        with pytest.raises(DocumentError):
            load_document_profile(broken)
