import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speechforge import textnorm
from speechforge.errors import ConfigError, EmptyDocument

from synth import english_norm_config_path, russian_norm_config_path

RU_LEXICON = {
    "0": "ноль", "1": "один", "2": "два", "3": "три", "4": "четыре",
    "5": "пять", "6": "шесть", "7": "семь", "8": "восемь", "9": "девять",
}
EN_LEXICON = {
    "0": "zero", "1": "one", "2": "two", "3": "three", "4": "four",
    "5": "five", "6": "six", "7": "seven", "8": "eight", "9": "nine",
}


@pytest.fixture(scope="module")
def ru_config():
    return textnorm.load_config(russian_norm_config_path())


@pytest.fixture(scope="module")
def en_config():
    return textnorm.load_config(english_norm_config_path())


class TestExpandNumbers:
    def test_paper_russian_pair(self):
        assert textnorm.expand_numbers("19", RU_LEXICON) == "один девять"

    def test_digit_free_identity(self):
        assert textnorm.expand_numbers("no digits here", EN_LEXICON) == "no digits here"

    def test_embedded_digits_get_separating_spaces(self):
        # per-digit lookup applied by hand: v|2|.|0
        assert textnorm.expand_numbers("v2.0", EN_LEXICON) == "v two . zero"

    def test_run_after_space_does_not_double_space(self):
        assert textnorm.expand_numbers("page 42", EN_LEXICON) == "page four two"

    def test_incomplete_lexicon_rejected(self):
        with pytest.raises(ConfigError):
            textnorm.expand_numbers("1", {"1": "one"})

    def test_idempotent_on_expanded_output(self):
        once = textnorm.expand_numbers("x19y", EN_LEXICON)
        assert textnorm.expand_numbers(once, EN_LEXICON) == once


class TestApplySubstitutions:
    def test_paper_abbreviation(self):
        assert textnorm.apply_substitutions("т.д.", [("т.д.", "так далее")]) == "так далее"

    def test_empty_table_identity(self):
        assert textnorm.apply_substitutions("any text", []) == "any text"

    def test_single_pass_no_rescanning(self):
        # leftmost match consumes its span; the produced text is never rescanned
        assert textnorm.apply_substitutions("abab", [("aba", "X")]) == "Xb"

    def test_longest_pattern_wins_at_same_position(self):
        table = [("ab", "SHORT"), ("abc", "LONG")]
        assert textnorm.apply_substitutions("abc", table) == "LONG"

    def test_replacement_containing_pattern_not_reexpanded(self):
        assert textnorm.apply_substitutions("x", [("x", "xx")]) == "xx"


class TestTransliterate:
    def test_paper_pairs(self, ru_config):
        assert textnorm.transliterate("i", ru_config.transliteration) == "и"
        assert textnorm.transliterate("j", ru_config.transliteration) == "ж"

    def test_empty_string(self, ru_config):
        assert textnorm.transliterate("", ru_config.transliteration) == ""

    def test_multicharacter_mapping(self):
        assert textnorm.transliterate("x", {"x": "кс"}) == "кс"

    def test_unmapped_pass_through(self):
        assert textnorm.transliterate("да", {"i": "и"}) == "да"


class TestSplitSentences:
    MARKS = ".!?…"

    def test_two_sentences(self):
        got = textnorm.split_sentences("A b. C d!", self.MARKS)
        assert [t for t, _ in got] == ["A b.", "C d!"]

    def test_mark_run_binds_left(self):
        got = textnorm.split_sentences("Wait... really?", self.MARKS)
        assert [t for t, _ in got] == ["Wait...", "really?"]

    def test_no_terminal_mark(self):
        got = textnorm.split_sentences("no terminal mark", self.MARKS)
        assert [t for t, _ in got] == ["no terminal mark"]

    def test_whitespace_only_fragment_dropped(self):
        got = textnorm.split_sentences("a.   ", self.MARKS)
        assert [t for t, _ in got] == ["a."]

    def test_marks_only_fragment_survives_standalone_split(self):
        got = textnorm.split_sentences("a.   . b.", self.MARKS)
        assert [t for t, _ in got] == ["a.", ".", "b."]

    def test_spans_are_byte_offsets_and_ordered(self):
        text = "Привет. Пока!"
        got = textnorm.split_sentences(text, self.MARKS)
        raw = text.encode("utf-8")
        assert [raw[a:b].decode("utf-8") for _, (a, b) in got] == ["Привет.", "Пока!"]
        spans = [s for _, s in got]
        assert all(a < b for a, b in spans)
        assert all(spans[i][1] <= spans[i + 1][0] for i in range(len(spans) - 1))


class TestNormalize:
    def test_russian_composition(self, ru_config):
        # substitution + digit expansion composed through the whole pipeline
        got = textnorm.normalize("Т.Д. 19.", ru_config)
        assert len(got) == 1
        assert got[0].text == "так далее один девять."
        assert got[0].flags == frozenset({textnorm.HAD_SUBSTITUTION, textnorm.HAD_DIGITS})

    def test_already_normalized_english(self, en_config):
        got = textnorm.normalize("hello world.", en_config)
        assert [u.text for u in got] == ["hello world."]
        assert got[0].flags == frozenset()

    def test_all_oov_raises(self, en_config):
        with pytest.raises(EmptyDocument):
            textnorm.normalize("§§§", en_config)

    def test_oov_flagged(self, en_config):
        got = textnorm.normalize("good § stuff.", en_config)
        assert got[0].text == "good stuff."
        assert textnorm.HAD_OOV_DROP in got[0].flags

    def test_transliteration_flagged(self, ru_config):
        got = textnorm.normalize("просто i слово.", ru_config)
        assert got[0].text == "просто и слово."
        assert textnorm.HAD_TRANSLITERATION in got[0].flags

    def test_lowercasing(self, en_config):
        got = textnorm.normalize("HELLO World.", en_config)
        assert got[0].text == "hello world."

    def test_spans_strictly_ordered_nonoverlapping(self, en_config):
        raw = "First one. Second two! Third three?"
        got = textnorm.normalize(raw, en_config)
        spans = [u.source_span for u in got]
        assert all(a < b for a, b in spans)
        assert all(spans[i][1] <= spans[i + 1][0] for i in range(len(spans) - 1))

    def test_span_decodes_to_source_region(self, en_config):
        raw = "alpha beta. gamma delta."
        got = textnorm.normalize(raw, en_config)
        raw_bytes = raw.encode("utf-8")
        assert raw_bytes[slice(*got[1].source_span)].decode("utf-8") == "gamma delta."


class TestProperties:
    @given(st.text(min_size=0, max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_alphabet_closure(self, raw):
        config = textnorm.load_config(english_norm_config_path())
        allowed = set(config.alphabet) | set(config.sentence_end_marks)
        try:
            utterances = textnorm.normalize(raw, config)
        except EmptyDocument:
            return
        for utt in utterances:
            assert set(utt.text) <= allowed

    @given(st.text(min_size=0, max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_determinism(self, raw):
        config = textnorm.load_config(english_norm_config_path())
        try:
            first = textnorm.normalize(raw, config)
        except EmptyDocument:
            first = None
        try:
            second = textnorm.normalize(raw, config)
        except EmptyDocument:
            second = None
        assert first == second

    @given(st.text(min_size=0, max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_no_stray_spaces(self, raw):
        config = textnorm.load_config(english_norm_config_path())
        try:
            utterances = textnorm.normalize(raw, config)
        except EmptyDocument:
            return
        for utt in utterances:
            assert not utt.text.startswith(" ")
            assert not utt.text.endswith(" ")
            assert "  " not in utt.text

    @given(st.text(alphabet="абвгд 19ij.!", min_size=1, max_size=120))
    @settings(max_examples=150, deadline=None)
    def test_idempotence_on_rejoined_output(self, raw):
        # the shipped Russian config is alphabet-closed, so renormalizing
        # its own output must be a fixed point
        config = textnorm.load_config(russian_norm_config_path())
        try:
            first = textnorm.normalize(raw, config)
        except EmptyDocument:
            return
        rejoined = " ".join(u.text for u in first)
        second = textnorm.normalize(rejoined, config)
        assert [u.text for u in second] == [u.text for u in first]

    @given(st.text(min_size=0, max_size=150))
    @settings(max_examples=150, deadline=None)
    def test_span_monotonicity(self, raw):
        config = textnorm.load_config(russian_norm_config_path())
        try:
            utterances = textnorm.normalize(raw, config)
        except EmptyDocument:
            return
        spans = [u.source_span for u in utterances]
        assert all(a < b for a, b in spans)
        assert all(spans[i][1] <= spans[i + 1][0] for i in range(len(spans) - 1))


class TestConfigIO:
    def test_round_trip_preserves_substitution_order(self, tmp_path):
        config = textnorm.NormalizationConfig(
            digit_lexicon=EN_LEXICON,
            substitutions=(("zz", "a"), ("aa", "b"), ("mm", "c")),
            transliteration={"é": "e"},
            sentence_end_marks=frozenset(".!"),
            alphabet=frozenset(" abcdefghijklmnopqrstuvwxyz"),
        )
        path = tmp_path / "norm.json"
        textnorm.save_config(path, config)
        loaded = textnorm.load_config(path)
        assert loaded.substitutions == config.substitutions
        textnorm.save_config(tmp_path / "again.json", loaded)
        assert json.loads((tmp_path / "again.json").read_text())["substitutions"] == [
            ["zz", "a"], ["aa", "b"], ["mm", "c"],
        ]

    def test_alphabet_must_contain_space(self):
        with pytest.raises(ConfigError):
            textnorm.NormalizationConfig(alphabet=frozenset("abc"))

    def test_digit_lexicon_must_cover_ten_digits(self):
        with pytest.raises(ConfigError):
            textnorm.NormalizationConfig(
                digit_lexicon={"1": "one"}, alphabet=frozenset(" abc")
            )

    def test_empty_pattern_rejected(self):
        with pytest.raises(ConfigError):
            textnorm.NormalizationConfig(
                substitutions=(("", "x"),), alphabet=frozenset(" abc")
            )
