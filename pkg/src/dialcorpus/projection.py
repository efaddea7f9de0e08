"""Projection of script annotations onto subtitle lines, plus corpus output."""

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources

from .errors import LengthMismatch
from .matcher import MatchCandidate
from .subtitles import TimeSpan

UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class AnnotatedLine:
    line_id: int
    time: TimeSpan
    source_text: str
    target_text: str
    speaker: str
    dialogue_id: int
    match: MatchCandidate | None = None


@dataclass(frozen=True)
class Dialogue:
    dialogue_id: int
    lines: tuple


@dataclass(frozen=True)
class CorpusStats:
    scripts_processed: int = 0
    total_dialogues: int = 0
    total_speakers: int = 0
    total_utterances: int = 0
    # sum over dialogues of the number of distinct speakers in each
    speaker_dialogue_pairs: int = 0

    @property
    def avg_dialogues_per_script(self):
        return self.total_dialogues / self.scripts_processed if self.scripts_processed else 0.0

    @property
    def avg_speakers_per_dialogue(self):
        return self.speaker_dialogue_pairs / self.total_dialogues if self.total_dialogues else 0.0

    @property
    def avg_utterances_per_dialogue(self):
        return self.total_utterances / self.total_dialogues if self.total_dialogues else 0.0


@dataclass(frozen=True)
class DialogueCorpus:
    script_name: str
    subtitle_name: str
    dialogues: tuple
    stats: CorpusStats

    def lines(self):
        return [line for d in self.dialogues for line in d.lines]


def project(script, lines, decisions):
    """Copy speaker and dialogue id from matched utterances to subtitle lines.

    Unmatched lines inherit from the nearest preceding match; lines before
    any match get UNKNOWN and the first match's dialogue. Dialogue ids
    never decrease.
    """
    if len(decisions) != len(lines):
        raise LengthMismatch(f"{len(decisions)} decisions for {len(lines)} lines")
    for line, decision in zip(lines, decisions):
        if line.line_id != decision.line_id:
            raise LengthMismatch(f"decision for line {decision.line_id} paired with line {line.line_id}")

    first = next((d.result for d in decisions if d.result is not None), None)
    current_dialogue = script.utterance(first.utterance_id).segment_id if first else 0
    speaker = UNKNOWN
    out = []
    for line, decision in zip(lines, decisions):
        if decision.result is not None:
            utterance = script.utterance(decision.result.utterance_id)
            speaker = utterance.speaker
            current_dialogue = max(current_dialogue, utterance.segment_id)
        out.append(AnnotatedLine(line.line_id, line.time, line.source_text, line.target_text,
                                 speaker, current_dialogue, decision.result))
    return out


def _stats_for(dialogues_by_corpus):
    speakers = set()
    pairs = dialogues = utterances = 0
    for dialogues_ in dialogues_by_corpus:
        for d in dialogues_:
            named = {line.speaker for line in d.lines if line.speaker != UNKNOWN}
            speakers |= named
            pairs += len(named)
            dialogues += 1
            utterances += len(d.lines)
    return CorpusStats(len(dialogues_by_corpus), dialogues, len(speakers), utterances, pairs)


def assemble(annotated, script_name="", subtitle_name=""):
    """Group consecutive lines sharing a dialogue id into dialogues."""
    dialogues = []
    run = []
    for line in annotated:
        if run and line.dialogue_id != run[-1].dialogue_id:
            dialogues.append(Dialogue(run[0].dialogue_id, tuple(run)))
            run = []
        run.append(line)
    if run:
        dialogues.append(Dialogue(run[0].dialogue_id, tuple(run)))
    dialogues = tuple(dialogues)
    stats = _stats_for([dialogues]) if dialogues else CorpusStats()
    return DialogueCorpus(script_name, subtitle_name, dialogues, stats)


def compute_stats(corpora):
    if not corpora:
        return CorpusStats()
    return _stats_for([c.dialogues for c in corpora])


def _half_up(value, places):
    quantum = Decimal(1).scaleb(-places)
    return str(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def format_stats_table(stats):
    rows = [
        ("Total number of scripts processed", f"{stats.scripts_processed:,}"),
        ("Total number of dialogues", f"{stats.total_dialogues:,}"),
        ("Total number of speakers", f"{stats.total_speakers:,}"),
        ("Total number of utterances", f"{stats.total_utterances:,}"),
        ("Average amount of dialogues per script", _half_up(stats.avg_dialogues_per_script, 0)),
        ("Average amount of speakers per dialogue", _half_up(stats.avg_speakers_per_dialogue, 1)),
        ("Average amount of utterances per dialogue", _half_up(stats.avg_utterances_per_dialogue, 0)),
    ]
    width = max(len(label) for label, _ in rows)
    lines = [f"{'Item'.ljust(width)}  Size"]
    lines += [f"{label.ljust(width)}  {value}" for label, value in rows]
    return "\n".join(lines) + "\n"


def emit_xml(corpus):
    root = ET.Element("corpus", {"script": corpus.script_name, "subtitle": corpus.subtitle_name})
    for dialogue in corpus.dialogues:
        d_el = ET.SubElement(root, "dialogue", {"id": str(dialogue.dialogue_id)})
        for line in dialogue.lines:
            attrs = {
                "id": str(line.line_id),
                "speaker": line.speaker,
                "start": str(line.time.start_ms),
                "end": str(line.time.end_ms),
            }
            if line.match is not None:
                attrs["match"] = str(line.match.utterance_id)
                attrs["score"] = repr(line.match.score)
            u_el = ET.SubElement(d_el, "utterance", attrs)
            ET.SubElement(u_el, "source").text = line.source_text
            ET.SubElement(u_el, "target").text = line.target_text
    ET.indent(root, space="  ")
    body = ET.tostring(root, encoding="unicode")
    return ('<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n").encode("utf-8")


def parse_xml(data):
    root = ET.fromstring(data)
    dialogues = []
    for d_el in root.findall("dialogue"):
        did = int(d_el.get("id"))
        lines = []
        for u_el in d_el.findall("utterance"):
            match = None
            if u_el.get("match") is not None:
                match = MatchCandidate(int(u_el.get("match")), float(u_el.get("score")))
            lines.append(AnnotatedLine(
                int(u_el.get("id")),
                TimeSpan(int(u_el.get("start")), int(u_el.get("end"))),
                u_el.findtext("source") or "",
                u_el.findtext("target") or "",
                u_el.get("speaker"),
                did,
                match,
            ))
        dialogues.append(Dialogue(did, tuple(lines)))
    dialogues = tuple(dialogues)
    stats = _stats_for([dialogues]) if dialogues else CorpusStats()
    return DialogueCorpus(root.get("script", ""), root.get("subtitle", ""), dialogues, stats)


def schema_text():
    return resources.files(__package__).joinpath("data/corpus.xsd").read_bytes()


def validate_xml(data):
    """Validate corpus XML against the bundled schema; raises on failure."""
    from lxml import etree

    schema = etree.XMLSchema(etree.fromstring(schema_text()))
    schema.assertValid(etree.fromstring(data))
