"""End-to-end orchestration over script/subtitle pairs."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusError
from .lm import adaptation_study, load_attribute_map
from .matcher import build_index, dump_decisions_tsv, load_decisions_tsv, match_document
from .projection import assemble, compute_stats, emit_xml, format_stats_table, parse_xml, project
from .script_parser import RawDocument, dump_script_tsv, load_script_tsv, parse_script
from .subtitles import align_bitext, dump_lines_tsv, load_lines_tsv, read_subtitles

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairResult:
    stem: str
    error: str | None = None
    utterances_tsv: str = ""
    lines_tsv: str = ""
    decisions_tsv: str = ""
    xml: bytes = b""
    counts: tuple = ()


def subtitle_name(pair):
    names = [pair.subtitle.name]
    if pair.target_subtitle is not None:
        names.append(pair.target_subtitle.name)
    return "+".join(names)


def stage_parse_script(path, cfg):
    doc = RawDocument.from_file(path, cfg.encodings)
    return dump_script_tsv(parse_script(doc, cfg.script))


def stage_parse_subs(subtitle, target, cfg, name=None):
    """Returns the lines TSV and the number of skipped malformed blocks."""
    cues = read_subtitles(subtitle, cfg.encodings)
    malformed = cues.malformed
    target_cues = None
    if target is not None:
        target_cues = read_subtitles(target, cfg.encodings)
        malformed += target_cues.malformed
    lines = align_bitext(cues, cfg.languages, target_cues)
    return dump_lines_tsv(lines, name or Path(subtitle).name), malformed


def stage_match(script_tsv, lines_tsv, cfg):
    script = load_script_tsv(script_tsv)
    lines, _ = load_lines_tsv(lines_tsv)
    index = build_index(script.utterances, cfg.match.weighting)
    return dump_decisions_tsv(match_document(index, lines, cfg.match))


def stage_project(script_tsv, lines_tsv, decisions_tsv):
    script = load_script_tsv(script_tsv)
    lines, sub_name = load_lines_tsv(lines_tsv)
    decisions = load_decisions_tsv(decisions_tsv)
    return assemble(project(script, lines, decisions), script.source_name, sub_name)


def process_pair(args):
    stem, pair, cfg = args
    try:
        utt = stage_parse_script(pair.script, cfg)
        lines, malformed = stage_parse_subs(pair.subtitle, pair.target_subtitle, cfg, subtitle_name(pair))
        decisions = stage_match(utt, lines, cfg)
        corpus = stage_project(utt, lines, decisions)
    except (CorpusError, OSError) as exc:
        return PairResult(stem, error=f"{type(exc).__name__}: {exc}")
    script = load_script_tsv(utt)
    matched = sum(1 for line in corpus.lines() if line.match is not None)
    counts = (
        ("utterances", len(script.utterances)),
        ("segments", len(script.segments)),
        ("malformed_cues", malformed),
        ("lines", corpus.stats.total_utterances),
        ("matched_lines", matched),
        ("dialogues", corpus.stats.total_dialogues),
    )
    return PairResult(stem, None, utt, lines, decisions, emit_xml(corpus), counts)


def _stems(pairs):
    seen = {}
    stems = []
    for pair in pairs:
        stem = pair.script.stem
        seen[stem] = seen.get(stem, 0) + 1
        stems.append(stem if seen[stem] == 1 else f"{stem}-{seen[stem]}")
    return stems


def run_pipeline(cfg):
    """Run every pair, write artifacts under ``cfg.out``; returns the exit status."""
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(stem, pair, cfg) for stem, pair in zip(_stems(cfg.pairs), cfg.pairs)]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(jobs))) as pool:
            results = list(pool.map(process_pair, jobs))
    else:
        results = [process_pair(job) for job in jobs]

    manifest = ["# config", cfg.echo().rstrip("\n"), "", "# pairs"]
    corpora = []
    for result in results:
        if result.error:
            log.error("%s: %s", result.stem, result.error)
            manifest.append(f"{result.stem}\tFAILED\t{result.error}")
            continue
        (out / f"{result.stem}.utterances.tsv").write_text(result.utterances_tsv, encoding="utf-8")
        (out / f"{result.stem}.lines.tsv").write_text(result.lines_tsv, encoding="utf-8")
        (out / f"{result.stem}.decisions.tsv").write_text(result.decisions_tsv, encoding="utf-8")
        (out / f"{result.stem}.xml").write_bytes(result.xml)
        corpora.append(parse_xml(result.xml))
        manifest.append(f"{result.stem}\tok\t" + " ".join(f"{k}={v}" for k, v in result.counts))

    (out / "stats.txt").write_text(format_stats_table(compute_stats(corpora)), encoding="utf-8")
    if cfg.lm.attributes is not None and corpora:
        try:
            attrs = load_attribute_map(cfg.lm.attributes.read_text(encoding="utf-8"))
            report = adaptation_study(corpora, attrs, cfg.lm.order, cfg.lm.k, cfg.lm.holdout, cfg.lm.seed)
            (out / "lm_study.txt").write_text(report.table(), encoding="utf-8")
        except CorpusError as exc:
            log.error("lm study: %s", exc)
            manifest.append(f"lm-study\tFAILED\t{type(exc).__name__}: {exc}")
    (out / "manifest.txt").write_text("\n".join(manifest) + "\n", encoding="utf-8")
    return 0 if corpora else 1
