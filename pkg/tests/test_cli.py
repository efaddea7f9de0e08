import shutil
import subprocess
import sys

import pytest

from dialcorpus.cli import EXIT_CONFIG, EXIT_INPUT, EXIT_OK, main
from dialcorpus.config import PipelineConfig, load_config, parse_config
from dialcorpus.errors import ConfigError
from dialcorpus.matcher import dump_decisions_tsv, match_script
from dialcorpus.projection import compute_stats, format_stats_table, parse_xml
from dialcorpus.script_parser import RawDocument, parse_script
from dialcorpus.subtitles import align_bitext, read_subtitles
from dialcorpus.synthetic import generate_episode, two_style_corpus
from dialcorpus.projection import emit_xml


@pytest.fixture
def workdir(tmp_path, fixtures):
    for name in ("scene_pair.txt", "scene_pair.srt", "pair_en.srt", "pair_zh.srt", "scene_pair.cfg",
                 "scene_pair.gold", "attributes.tsv"):
        shutil.copy(fixtures / name, tmp_path / name)
    return tmp_path


def _run_chain(tmp, script, subs, target=None, extra=()):
    utt, lines, dec, xml = (tmp / f"chain.{ext}" for ext in ("utt.tsv", "lines.tsv", "dec.tsv", "xml"))
    assert main(["parse-script", str(script), "-o", str(utt)]) == EXIT_OK
    argv = ["parse-subs", str(subs), "-o", str(lines)]
    if target:
        argv += ["--target", str(target)]
    assert main(argv) == EXIT_OK
    assert main(["match", "--script", str(utt), "--lines", str(lines), "-o", str(dec), *extra]) == EXIT_OK
    assert main(["project", "--script", str(utt), "--lines", str(lines), "--decisions", str(dec),
                 "-o", str(xml)]) == EXIT_OK
    return xml.read_bytes(), dec.read_text(encoding="utf-8")


def test_pipeline_golden(workdir, fixtures):
    out = workdir / "out"
    assert main(["pipeline", "--config", str(workdir / "scene_pair.cfg"), "--out", str(out)]) == EXIT_OK
    assert (out / "scene_pair.xml").read_bytes() == (fixtures / "scene_pair_golden.xml").read_bytes()
    for name in ("scene_pair.utterances.tsv", "scene_pair.lines.tsv", "scene_pair.decisions.tsv",
                 "scene_pair-2.xml", "stats.txt", "manifest.txt"):
        assert (out / name).is_file()
    manifest = (out / "manifest.txt").read_text(encoding="utf-8")
    assert "scene_pair\tok\tutterances=8 segments=2 malformed_cues=0 lines=11 matched_lines=10 dialogues=2" in manifest
    assert "threshold = 0.3" in manifest and str(out) not in manifest
    two_file = parse_xml((out / "scene_pair-2.xml").read_bytes())
    assert two_file.subtitle_name == "pair_en.srt+pair_zh.srt"
    assert [line.target_text for line in two_file.lines()] == ["你好 你好吗?", "很好,谢谢.", "", "走吧."]


def test_pipeline_equals_subcommand_chain(workdir):
    out = workdir / "out"
    assert main(["pipeline", "--config", str(workdir / "scene_pair.cfg"), "--out", str(out), "--jobs", "1"]) == 0
    xml, dec = _run_chain(workdir, workdir / "scene_pair.txt", workdir / "scene_pair.srt")
    assert xml == (out / "scene_pair.xml").read_bytes()
    assert dec == (out / "scene_pair.decisions.tsv").read_text(encoding="utf-8")
    xml2, _ = _run_chain(workdir, workdir / "scene_pair.txt", workdir / "pair_en.srt", workdir / "pair_zh.srt")
    assert xml2 == (out / "scene_pair-2.xml").read_bytes()


def test_match_subcommand_equals_library(workdir, fixtures):
    _, dec = _run_chain(workdir, workdir / "scene_pair.txt", workdir / "scene_pair.srt")
    script = parse_script(RawDocument.from_file(fixtures / "scene_pair.txt"))
    lines = align_bitext(read_subtitles(fixtures / "scene_pair.srt"))
    assert dec == dump_decisions_tsv(match_script(script, lines))


def test_stats_subcommand(workdir, fixtures, capsys):
    assert main(["stats", str(fixtures / "scene_pair_golden.xml")]) == EXIT_OK
    expected = format_stats_table(compute_stats([parse_xml((fixtures / "scene_pair_golden.xml").read_bytes())]))
    assert capsys.readouterr().out == expected


def test_eval_subcommand(workdir, fixtures, capsys):
    # gold disagrees on the speaker of line 10 only
    assert main(["eval", "--auto", str(fixtures / "scene_pair_golden.xml"),
                 "--gold", str(workdir / "scene_pair.gold")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "speaker_matches=10" in out and "boundary_matches=11" in out
    assert "speaker_agreement=90.9091" in out and "boundary_agreement=100.0000" in out


def test_lm_study_subcommand(tmp_path, fixtures, capsys):
    corpus, _ = two_style_corpus(2)
    path = tmp_path / "styles.xml"
    path.write_bytes(emit_xml(corpus))
    argv = ["lm-study", str(path), "--attributes", str(fixtures / "attributes.tsv"), "--seed", "5"]
    assert main(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out == first
    assert first.splitlines()[1].startswith("female") and first.splitlines()[2].startswith("male")


def test_override_flags(workdir):
    out = workdir / "strict"
    assert main(["pipeline", "--config", str(workdir / "scene_pair.cfg"), "--out", str(out),
                 "--threshold", "0.95", "--weighting", "boolean", "--window", "3"]) == EXIT_OK
    manifest = (out / "manifest.txt").read_text(encoding="utf-8")
    assert "threshold = 0.95" in manifest and "weighting = boolean" in manifest and "window = 3" in manifest


def test_missing_subtitle_is_config_error(workdir, capsys):
    cfg = workdir / "bad.cfg"
    cfg.write_text("pair = scene_pair.txt | nope.srt\n", encoding="utf-8")
    assert main(["pipeline", "--config", str(cfg), "--out", str(workdir / "o")]) == EXIT_CONFIG
    assert "pair[0].subtitle" in capsys.readouterr().err


@pytest.mark.parametrize("text, field", [
    ("pair = a | b\nthreshold = 2\n", "threshold"),
    ("pair = a | b\nwindow = 0\n", "window"),
    ("pair = a | b\nwindow = wide\n", "window"),
    ("pair = a | b\nweighting = bm25\n", "weighting"),
    ("pair = a | b\nrecover_after = -1\n", "recover_after"),
    ("pair = a | b\nsimplify_target = maybe\n", "simplify_target"),
    ("pair = a | b\ncolour = blue\n", "colour"),
    ("pair = a\n", "pair"),
])
def test_config_errors_name_field(text, field):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.field == field


def test_config_parsing(workdir):
    cfg = load_config(workdir / "scene_pair.cfg")
    assert len(cfg.pairs) == 2 and cfg.pairs[1].target_subtitle == workdir / "pair_zh.srt"
    assert cfg.match.threshold == 0.3 and cfg.match.window == 20
    with pytest.raises(ConfigError):
        PipelineConfig().validate()


def test_empty_out_dir_is_populated(workdir):
    out = workdir / "fresh"
    out.mkdir()
    assert main(["pipeline", "--config", str(workdir / "scene_pair.cfg"), "--out", str(out)]) == EXIT_OK
    assert (out / "stats.txt").read_text(encoding="utf-8").startswith("Item")


def test_per_pair_failures_continue(workdir, capsys):
    (workdir / "action.txt").write_text("(nothing but directions)\n", encoding="utf-8")
    cfg = workdir / "mixed.cfg"
    cfg.write_text("pair = action.txt | scene_pair.srt\npair = scene_pair.txt | scene_pair.srt\n", encoding="utf-8")
    out = workdir / "mixed"
    assert main(["pipeline", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    manifest = (out / "manifest.txt").read_text(encoding="utf-8")
    assert "action\tFAILED\tEmptyScript" in manifest and "scene_pair\tok" in manifest
    only_bad = workdir / "bad_only.cfg"
    only_bad.write_text("pair = action.txt | scene_pair.srt\n", encoding="utf-8")
    assert main(["pipeline", "--config", str(only_bad), "--out", str(workdir / "b")]) == EXIT_INPUT


def test_stage_input_errors(workdir, capsys):
    (workdir / "prose.srt").write_text("no cues here\n", encoding="utf-8")
    assert main(["parse-subs", str(workdir / "prose.srt")]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err
    assert main(["parse-script", str(workdir / "missing.txt")]) == EXIT_INPUT


def test_malformed_warning(fixtures, capsys):
    assert main(["parse-subs", str(fixtures / "episode.srt")]) == EXIT_OK
    captured = capsys.readouterr()
    assert "1 malformed" in captured.err
    assert captured.out.startswith("#source\tepisode.srt\n")


@pytest.mark.parametrize("seed, reports", [(2, True), (4, False)])
def test_lm_study_in_pipeline(tmp_path, fixtures, seed, reports):
    # seed 4 draws no male speaker, so the study must be recorded as failed
    ep = generate_episode(seed, n_utterances=150)
    (tmp_path / "ep.txt").write_text(ep.script_text, encoding="utf-8")
    (tmp_path / "ep.srt").write_text(ep.srt_text, encoding="utf-8")
    shutil.copy(fixtures / "attributes.tsv", tmp_path / "attributes.tsv")
    cfg = tmp_path / "run.cfg"
    cfg.write_text("pair = ep.txt | ep.srt\nlm.attributes = attributes.tsv\nlm.seed = 3\n", encoding="utf-8")
    assert main(["pipeline", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    manifest = (tmp_path / "o" / "manifest.txt").read_text(encoding="utf-8")
    study = tmp_path / "o" / "lm_study.txt"
    if reports:
        rows = study.read_text(encoding="utf-8").splitlines()
        assert [r.split()[0] for r in rows[1:]] == ["female", "male", "(all)"]
        assert "lm-study" not in manifest
    else:
        assert not study.exists()
        assert "lm-study\tFAILED\tInsufficientData" in manifest


def test_module_entry_point(fixtures):
    proc = subprocess.run([sys.executable, "-m", "dialcorpus", "stats", str(fixtures / "scene_pair_golden.xml")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "Total number of dialogues" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "dialcorpus", "pipeline", "--config", "/nonexistent.cfg"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2


def test_inline_comments_and_readme_example():
    cfg = parse_config("pair = a.txt | b#1.srt   # trailing note\nwindow = 7 # radius\n# whole line\n")
    assert cfg.match.window == 7 and cfg.pairs[0].subtitle.name == "b#1.srt"
    from pathlib import Path
    readme = (Path(__file__).parent.parent / "README.md").read_text(encoding="utf-8")
    block = readme.split("### Config file")[1].split("```")[1]
    cfg = parse_config(block)
    assert cfg.match.threshold == 0.3 and cfg.match.recover_after == 3 and cfg.jobs == 4
    assert len(cfg.pairs) == 2 and cfg.lm.attributes.name == "speakers.tsv"
