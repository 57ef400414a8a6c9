import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speechforge.dataset import (
    CHAR_RATE_HIGH,
    CHAR_RATE_LOW,
    SUSPECT_EXTRA_WORDS,
    SUSPECT_MISSING_WORDS,
    FilterRule,
    ManifestEntry,
    apply_filters,
    char_rate_screen,
    compute_stats,
    kfold_split,
    read_manifest,
    rule_from_dict,
    write_manifest,
)
from speechforge.errors import (
    EmptyDataset,
    IncompatibleRule,
    KExceedsGroups,
    MalformedLine,
    MissingGroupKey,
    MissingRequiredField,
)

from oracles import greedy_fold_loads


def entry(path="a.wav", duration=1.0, text="hi there", **extra):
    known = {}
    for key in ("pred_text", "score", "group_key"):
        if key in extra:
            known[key] = extra.pop(key)
    return ManifestEntry(
        audio_filepath=path, duration=duration, text=text, extra=extra, **known
    )


class TestManifestIO:
    def test_direct_parse(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text('{"audio_filepath":"a.wav","duration":1.5,"text":"hi"}\n')
        (got,) = read_manifest(path)
        assert got.audio_filepath == "a.wav"
        assert got.duration == 1.5
        assert got.text == "hi"

    def test_missing_required_field(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text('{"audio_filepath":"a.wav","text":"hi"}\n')
        with pytest.raises(MissingRequiredField) as err:
            read_manifest(path)
        assert err.value.field == "duration"
        assert err.value.line_number == 1

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text('{"audio_filepath":"a.wav","duration":1.0,"text":"x"}\nnot json\n')
        with pytest.raises(MalformedLine) as err:
            read_manifest(path)
        assert err.value.line_number == 2

    def test_unknown_fields_preserved(self, tmp_path):
        path = tmp_path / "m.jsonl"
        record = {
            "audio_filepath": "a.wav", "duration": 1.0, "text": "x",
            "custom_metric": 0.42, "nested": {"k": [1, 2]},
        }
        path.write_text(json.dumps(record) + "\n")
        (got,) = read_manifest(path)
        assert got.extra["custom_metric"] == 0.42
        assert got.extra["nested"] == {"k": [1, 2]}
        out = tmp_path / "out.jsonl"
        write_manifest(out, [got])
        assert json.loads(out.read_text()) == record

    @given(
        rows=st.lists(
            st.tuples(
                st.floats(min_value=0.01, max_value=100, allow_nan=False),
                st.text(
                    alphabet=st.characters(blacklist_categories=("Cs", "Cc")),
                    min_size=1, max_size=30,
                ),
                st.integers(min_value=0, max_value=99),
            ),
            min_size=1, max_size=40,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_round_trip_byte_identical(self, tmp_path_factory, rows):
        tmp = tmp_path_factory.mktemp("manifests")
        entries = [
            entry(path=f"clip{i}.wav", duration=d, text=t, custom=c)
            for i, (d, t, c) in enumerate(rows)
        ]
        first = tmp / "first.jsonl"
        write_manifest(first, entries)
        second = tmp / "second.jsonl"
        write_manifest(second, read_manifest(first))
        assert first.read_bytes() == second.read_bytes()

    def test_empty_text_rejected_by_default(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text('{"audio_filepath":"a.wav","duration":1.0,"text":""}\n')
        with pytest.raises(MissingRequiredField):
            read_manifest(path)
        assert read_manifest(path, allow_empty_text=True)[0].text == ""

    def test_nonpositive_duration_rejected(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text('{"audio_filepath":"a.wav","duration":0,"text":"x"}\n')
        with pytest.raises(MalformedLine):
            read_manifest(path)


class TestComputeStats:
    def test_total_hours(self):
        stats = compute_stats([entry(duration=1.5), entry(duration=2.5)])
        assert stats.total_hours == pytest.approx(4.0 / 3600.0)
        assert stats.entry_count == 2

    def test_alphabet_and_vocabulary(self):
        stats = compute_stats([entry(text="ab"), entry(text="bc")])
        assert stats.alphabet == frozenset("abc")
        assert stats.vocabulary_size == 2

    def test_histogram_counts_sum_to_entries(self):
        entries = [entry(duration=d, text="x" * 12) for d in (0.5, 1.2, 3.9, 19.9, 20.0)]
        stats = compute_stats(entries)
        assert sum(stats.duration_histogram.counts) == 5
        assert sum(stats.char_rate_histogram.counts) == 5
        assert stats.duration_histogram.edges[1] - stats.duration_histogram.edges[0] == 1.0
        assert stats.duration_histogram.edges[-1] >= 20.0

    def test_empty_dataset(self):
        with pytest.raises(EmptyDataset):
            compute_stats([])


class TestApplyFilters:
    def test_cer_threshold(self):
        entries = [entry(cer=0.05), entry(cer=0.2)]
        kept, dropped, report = apply_filters(
            entries, [FilterRule(field="cer", op=">", value=0.10)]
        )
        assert len(kept) == 1
        assert len(dropped) == 1
        assert dropped[0].extra["cer"] == 0.2
        assert report.rule_fired["cer>0.1"] == 1

    def test_score_gate(self):
        entries = [entry(score=-1.0), entry(score=-2.5)]
        kept, dropped, _ = apply_filters(
            entries, [FilterRule(field="score", op="<", value=-2.0)]
        )
        assert [e.score for e in kept] == [-1.0]
        assert [e.score for e in dropped] == [-2.5]

    def test_empty_rules_identity(self):
        entries = [entry(), entry()]
        kept, dropped, _ = apply_filters(entries, [])
        assert kept == entries
        assert dropped == []

    def test_missing_field_skipped_and_counted(self):
        entries = [entry(cer=0.5), entry()]
        kept, dropped, report = apply_filters(
            entries, [FilterRule(field="cer", op=">", value=0.1)]
        )
        assert len(dropped) == 1
        assert len(kept) == 1
        assert report.rule_skipped["cer>0.1"] == 1

    def test_flag_rule_annotates_without_removing(self):
        entries = [entry(duration=25.0)]
        kept, dropped, _ = apply_filters(
            entries, [FilterRule(field="duration", op=">", value=20.0, action="flag")]
        )
        assert dropped == []
        assert kept[0].extra["flags"] == ["duration>20.0"]

    def test_partition_property(self):
        entries = [entry(cer=c / 10.0) for c in range(10)]
        kept, dropped, _ = apply_filters(entries, [FilterRule(field="cer", op=">", value=0.45)])
        assert len(kept) + len(dropped) == len(entries)
        assert {id(e) for e in kept}.isdisjoint({id(e) for e in dropped})

    def test_filter_monotonicity(self):
        entries = [entry(cer=c / 20.0) for c in range(20)]
        kept_loose, _, _ = apply_filters(entries, [FilterRule(field="cer", op=">", value=0.5)])
        kept_tight, _, _ = apply_filters(entries, [FilterRule(field="cer", op=">", value=0.3)])
        assert len(kept_tight) <= len(kept_loose)

    def test_stats_consistency_after_partition(self):
        entries = [entry(duration=float(i + 1), cer=i / 10.0, text="abc") for i in range(10)]
        kept, dropped, _ = apply_filters(entries, [FilterRule(field="cer", op=">", value=0.55)])
        total = compute_stats(entries).total_hours
        assert (
            compute_stats(kept).total_hours + compute_stats(dropped).total_hours
            == pytest.approx(total)
        )

    def test_string_ops(self):
        entries = [entry(text="to-day we go"), entry(text="today we go")]
        kept, dropped, _ = apply_filters(
            entries, [FilterRule(field="text", op="contains", value="to-")]
        )
        assert len(dropped) == 1
        kept, dropped, _ = apply_filters(
            entries, [FilterRule(field="text", op="matches-regex", value=r"^to-")]
        )
        assert len(dropped) == 1

    def test_incompatible_rule_rejected(self):
        with pytest.raises(IncompatibleRule):
            FilterRule(field="cer", op=">", value="high")
        with pytest.raises(IncompatibleRule):
            FilterRule(field="text", op="contains", value=3)
        with pytest.raises(IncompatibleRule):
            FilterRule(field="text", op="matches-regex", value="([")
        with pytest.raises(IncompatibleRule):
            rule_from_dict({"field": "cer", "op": "~", "value": 1})

    def test_unicode_op_aliases(self):
        rule = FilterRule(field="cer", op="≥", value=0.5)
        assert rule.op == ">="


class TestCharRateScreen:
    def test_typical_pace_unflagged(self):
        (got,) = char_rate_screen([entry(duration=1.0, text="x" * 15)])
        assert got.extra["char_rate"] == 15.0
        assert "flags" not in got.extra

    def test_high_rate_flagged(self):
        (got,) = char_rate_screen([entry(duration=1.0, text="y" * 31)])
        assert got.extra["char_rate"] == 31.0
        assert SUSPECT_EXTRA_WORDS in got.extra["flags"]

    def test_boundary_thirty_flagged(self):
        (got,) = char_rate_screen([entry(duration=1.0, text="y" * 30)])
        assert SUSPECT_EXTRA_WORDS in got.extra["flags"]

    def test_zero_rate_flagged_missing_words(self):
        (got,) = char_rate_screen([entry(duration=1.0, text="")])
        assert got.extra["char_rate"] == 0.0
        assert SUSPECT_MISSING_WORDS in got.extra["flags"]

    def test_default_bounds(self):
        assert CHAR_RATE_HIGH == 30.0
        assert CHAR_RATE_LOW == 5.0


class TestKfoldSplit:
    def _grouped(self, hours):
        entries = []
        for key, h in hours.items():
            entries.append(entry(path=f"{key}.wav", duration=h * 3600.0, group_key=key))
        return entries

    def test_three_folds_no_group_overlap(self):
        hours = {f"book{i}": 1.0 + i * 0.3 for i in range(9)}
        folds = kfold_split(self._grouped(hours), 3)
        groups = [{e.group_key for e in fold} for fold in folds]
        assert groups[0] | groups[1] | groups[2] == set(hours)
        assert groups[0] & groups[1] == set()
        assert groups[0] & groups[2] == set()
        assert groups[1] & groups[2] == set()

    def test_single_fold_identity(self):
        entries = self._grouped({"a": 1.0, "b": 2.0})
        (fold,) = kfold_split(entries, 1)
        assert fold == entries

    def test_greedy_packing_oracle(self):
        # faithful simulation of longest-duration-first into the lightest
        # fold: 5->A, 4->B, 3->B(4), 2->A(5), 1->A(7); loads {8, 7}
        hours = {"g5": 5.0, "g4": 4.0, "g3": 3.0, "g2": 2.0, "g1": 1.0}
        want = greedy_fold_loads({k: v * 3600.0 for k, v in hours.items()}, 2)
        folds = kfold_split(self._grouped(hours), 2)
        for fold_idx, fold in enumerate(folds):
            for e in fold:
                assert want[e.group_key] == fold_idx
        loads = sorted(sum(e.duration for e in fold) / 3600.0 for fold in folds)
        assert loads == [7.0, 8.0]
        assert {e.group_key for e in folds[0]} == {"g5", "g2", "g1"}
        assert {e.group_key for e in folds[1]} == {"g4", "g3"}

    def test_k_exceeds_groups(self):
        with pytest.raises(KExceedsGroups):
            kfold_split(self._grouped({"a": 1.0}), 2)

    def test_missing_group_key(self):
        with pytest.raises(MissingGroupKey):
            kfold_split([entry()], 1)

    def test_partition_union(self):
        hours = {f"g{i}": float(i + 1) for i in range(7)}
        entries = self._grouped(hours)
        folds = kfold_split(entries, 3)
        assert sorted(e.group_key for fold in folds for e in fold) == sorted(
            e.group_key for e in entries
        )

    @given(
        st.integers(min_value=2, max_value=4),
        st.lists(st.floats(min_value=0.5, max_value=10.0), min_size=4, max_size=14),
    )
    @settings(max_examples=120, deadline=None)
    def test_greedy_balance_bound(self, k, durations):
        if k > len(durations):
            return
        mean_fold = sum(durations) / k
        if max(durations) > mean_fold:
            return  # guarantee only holds when no group exceeds the mean fold
        entries = [
            entry(path=f"g{i}.wav", duration=d, group_key=f"g{i}")
            for i, d in enumerate(durations)
        ]
        folds = kfold_split(entries, k)
        loads = [sum(e.duration for e in fold) for fold in folds]
        assert max(loads) <= 2.0 * min(loads) + 1e-9
