"""Shared glue for running the in-memory pipeline on synthetic episodes."""

from dialcorpus.matcher import MatchConfig, match_script
from dialcorpus.projection import project
from dialcorpus.script_parser import RawDocument, parse_script
from dialcorpus.subtitles import align_bitext, parse_srt


def run_episode(ep, cfg=MatchConfig()):
    script = parse_script(RawDocument.from_text("episode.txt", ep.script_text))
    lines = align_bitext(parse_srt(ep.srt_text.encode("utf-8")))
    decisions = match_script(script, lines, cfg)
    return script, lines, decisions, project(script, lines, decisions)


def alignment_accuracy(decisions, truth):
    planted = [(d, t) for d, t in zip(decisions, truth) if t.utterance_id is not None]
    hits = sum(1 for d, t in planted if d.result is not None and d.result.utterance_id == t.utterance_id)
    return hits / len(planted)
