import pytest
from hypothesis import given, settings, strategies as st

from dialcorpus.errors import MissingLine, ParseError
from dialcorpus.evaluation import (
    AgreementReport,
    GoldLabel,
    agreement,
    boundary_flags,
    dump_gold,
    gold_from_annotated,
    load_gold,
)
from dialcorpus.projection import UNKNOWN, AnnotatedLine
from dialcorpus.subtitles import TimeSpan
from dialcorpus.synthetic import generate_episode

from harness import run_episode
from oracles import oracle_agreement


def _line(i, speaker, dialogue_id):
    return AnnotatedLine(i, TimeSpan(i, i + 1), "x", "", speaker, dialogue_id)


def test_load_gold_row():
    assert load_gold(b"3\tJOEY\t1\n") == [GoldLabel(3, "JOEY", True)]


def test_load_gold_empty_and_sorted():
    assert load_gold(b"") == []
    assert [g.line_id for g in load_gold("# header\n5\tROSS\t0\n2\tJOEY\t1\n")] == [2, 5]


@pytest.mark.parametrize("text, bad_line", [
    ("0\tJOEY\t1\n1\tROSS\n", 2),
    ("x\tJOEY\t1\n", 1),
    ("0\tJOEY\t2\n", 1),
    ("0\tJOEY\t1\n\n0\tROSS\t0\n", 3),
])
def test_load_gold_errors(text, bad_line):
    with pytest.raises(ParseError) as err:
        load_gold(text)
    assert err.value.line_no == bad_line


def test_gold_round_trip():
    labels = [GoldLabel(0, "JOEY", True), GoldLabel(1, "DR. GELLER", False)]
    assert load_gold(dump_gold(labels)) == labels


def test_boundary_flags():
    lines = [_line(i, "A", d) for i, d in enumerate([0, 0, 1, 1, 1, 3])]
    assert list(boundary_flags(lines).values()) == [True, False, True, False, False, True]


def test_perfect_agreement():
    auto = [_line(i, s, d) for i, (s, d) in enumerate([("JOEY", 0), ("ROSS", 0), ("ROSS", 1)])]
    report = agreement(auto, gold_from_annotated(auto))
    assert (report.speaker_agreement, report.boundary_agreement) == (100.0, 100.0)


def test_one_speaker_error_in_ten():
    auto = [_line(i, "JOEY" if i % 2 else "ROSS", i // 5) for i in range(10)]
    gold = gold_from_annotated(auto)
    gold[4] = GoldLabel(4, "MONICA", gold[4].dialogue_boundary)
    report = agreement(auto, gold)
    assert report == AgreementReport(10, 9, 10)
    assert f"{report.speaker_agreement:.2f}" == "90.00"
    assert report.boundary_agreement == 100.0
    assert "90.00%" in report.table()
    assert "speaker_agreement=90.0000" in report.key_values()


def test_case_insensitive_and_unknown():
    auto = [_line(0, "joey", 0), _line(1, UNKNOWN, 0)]
    gold = [GoldLabel(0, "JOEY", True), GoldLabel(1, UNKNOWN, False)]
    assert agreement(auto, gold) == AgreementReport(2, 1, 2)


def test_missing_line():
    with pytest.raises(MissingLine):
        agreement([_line(0, "JOEY", 0)], [GoldLabel(7, "JOEY", True)])


def test_empty_gold():
    report = agreement([_line(0, "JOEY", 0)], [])
    assert (report.speaker_agreement, report.boundary_agreement) == (0.0, 0.0)


def _oracle_inputs(auto, gold):
    flags, prev = {}, None
    for a in auto:
        flags[a.line_id] = prev is None or a.dialogue_id != prev
        prev = a.dialogue_id
    return ({a.line_id: (a.speaker, flags[a.line_id]) for a in auto},
            {g.line_id: (g.speaker, g.dialogue_boundary) for g in gold})


def test_perturbed_synthetic_matches_oracle():
    for seed in range(5):
        ep = generate_episode(seed, dropout=0.2, split_rate=0.1, noise_rate=0.05)
        annotated = run_episode(ep)[3]
        report = agreement(annotated, ep.gold())
        sp, bd = oracle_agreement(*_oracle_inputs(annotated, ep.gold()))
        assert abs(report.speaker_agreement - sp) < 1e-9
        assert abs(report.boundary_agreement - bd) < 1e-9


names = st.sampled_from(["JOEY", "joey", "ROSS", "MONICA", UNKNOWN])


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(names, st.integers(0, 1), names, st.booleans(), st.booleans()), min_size=1, max_size=30))
def test_agreement_properties(rows):
    auto, gold, dialogue = [], [], 0
    for i, (speaker, step, gold_speaker, gold_flag, keep) in enumerate(rows):
        dialogue += step
        auto.append(_line(i, speaker, dialogue))
        if keep:
            gold.append(GoldLabel(i, gold_speaker, gold_flag))
    report = agreement(auto, gold)
    assert 0 <= report.speaker_agreement <= 100 and 0 <= report.boundary_agreement <= 100
    if gold:
        assert abs(report.speaker_agreement - 100 * report.speaker_matches / len(gold)) < 1e-9
    sp, bd = oracle_agreement(*_oracle_inputs(auto, gold))
    assert abs(report.speaker_agreement - sp) < 1e-9 and abs(report.boundary_agreement - bd) < 1e-9
    self_report = agreement(auto, gold_from_annotated(auto))
    if self_report.lines_total:
        assert (self_report.speaker_agreement, self_report.boundary_agreement) == (100.0, 100.0)
