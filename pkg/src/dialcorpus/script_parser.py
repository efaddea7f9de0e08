"""Screenplay parsing: speaker-attributed utterances grouped into dialogues.

Scene/shot tags delimit dialogue segments, speaker cues open utterances,
and action blocks are discarded.
"""

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyScript, ParseError
from .normalize import decode

DEFAULT_BOUNDARY_KEYWORDS = (
    "SCENE", "SHOT", "CUT TO:", "CUT INTO:", "FADE IN", "FADE OUT", "INT.", "EXT.",
)


@dataclass(frozen=True)
class ScriptParseConfig:
    boundary_keywords: tuple = DEFAULT_BOUNDARY_KEYWORDS
    speaker_max_len: int = 40
    # text lines indented less than this are action (screenplay layout); None disables
    dialogue_min_indent: int | None = None
    # accept "NAME: words" on one line
    inline_cues: bool = True


@dataclass(frozen=True)
class RawDocument:
    source_name: str
    lines: tuple

    @classmethod
    def from_text(cls, source_name, text):
        return cls(source_name, tuple(text.split("\n")))

    @classmethod
    def from_file(cls, path, fallbacks=("gb18030",)):
        path = Path(path)
        return cls.from_text(path.name, decode(path.read_bytes(), fallbacks))


@dataclass(frozen=True)
class BoundaryTag:
    tag: str


@dataclass(frozen=True)
class SpeakerCue:
    name: str
    inline_text: str = ""


@dataclass(frozen=True)
class UtteranceText:
    pass


@dataclass(frozen=True)
class ActionText:
    pass


@dataclass(frozen=True)
class Blank:
    pass


@dataclass(frozen=True)
class ScriptUtterance:
    utterance_id: int
    segment_id: int
    speaker: str
    text: str
    source_span: tuple
    cue_line: int


@dataclass(frozen=True)
class DialogueSegment:
    segment_id: int
    utterance_range: tuple
    opening_tag: str
    closing_tag: str | None = None


@dataclass(frozen=True)
class ScriptDocument:
    source_name: str
    utterances: tuple
    segments: tuple

    def utterance(self, utterance_id):
        return self.utterances[utterance_id]


_CUE = re.compile(
    r"^(?P<name>[^():\[\]]+)(?P<paren>\([^)]*\))?\s*(?P<colon>:)?\s*(?P<rest>.*)$"
)
_PAREN_ONLY = re.compile(r"^\([^)]*\)$")
_LEADING_PAREN = re.compile(r"^\([^)]*\)\s*")
_NAME_PUNCT = set(" .'-&#")


def normalize_speaker(name):
    return " ".join(name.upper().split())


def _is_cue_name(name, max_len):
    if not name or len(name) > max_len or not name[-1].isalnum():
        return False
    has_letter = False
    for ch in name:
        if ch.isalpha():
            if not ch.isupper():
                return False
            has_letter = True
        elif not (ch.isdigit() or ch in _NAME_PUNCT):
            return False
    return has_letter


def _starts_with_keyword(text, keyword):
    if not text.startswith(keyword):
        return False
    # "SCENE" must not fire on "SCENERY"
    rest = text[len(keyword):]
    return not (keyword[-1].isalnum() and rest[:1].isalnum())


def _speaker_cue(stripped, cfg):
    m = _CUE.match(stripped)
    if not m or not _is_cue_name(m.group("name").strip(), cfg.speaker_max_len):
        return None
    name = normalize_speaker(m.group("name"))
    rest = m.group("rest")
    if not rest or _PAREN_ONLY.match(rest):
        return SpeakerCue(name)
    if m.group("colon") and cfg.inline_cues:
        text = _LEADING_PAREN.sub("", rest)
        return SpeakerCue(name, text)
    return None


def classify_line(line, cfg=ScriptParseConfig()):
    stripped = line.strip()
    for keyword in cfg.boundary_keywords:
        if _starts_with_keyword(stripped, keyword):
            return BoundaryTag(stripped)
    cue = _speaker_cue(stripped, cfg)
    if cue is not None:
        return cue
    if not stripped:
        return Blank()
    if (stripped[0], stripped[-1]) in (("(", ")"), ("[", "]")):
        return ActionText()
    if cfg.dialogue_min_indent is not None:
        expanded = line.expandtabs(8)
        if len(expanded) - len(expanded.lstrip()) < cfg.dialogue_min_indent:
            return ActionText()
    return UtteranceText()


def parse_script(doc, cfg=ScriptParseConfig()):
    """Turn a raw screenplay into utterances and dialogue segments.

    Text lines after a speaker cue accumulate into one utterance until a
    blank line, a new cue or a boundary tag. Text with no open speaker is
    treated as narration and dropped, as are action lines.
    """
    # raw segments: [opening_tag, closing_tag, [pending utterances]]
    raw_segments = [["", None, []]]
    speaker = None
    cue_line = None
    parts = []
    span = None

    def flush():
        nonlocal parts, span
        text = " ".join(" ".join(parts).split())
        if speaker and text:
            raw_segments[-1][2].append((speaker, text, span, cue_line))
        parts = []
        span = None

    for line_no, line in enumerate(doc.lines):
        cls = classify_line(line, cfg)
        if isinstance(cls, BoundaryTag):
            flush()
            speaker = None
            raw_segments[-1][1] = cls.tag
            raw_segments.append([cls.tag, None, []])
        elif isinstance(cls, SpeakerCue):
            flush()
            speaker, cue_line = cls.name, line_no
            if cls.inline_text:
                parts.append(cls.inline_text)
                span = (line_no, line_no)
        elif isinstance(cls, UtteranceText):
            if speaker is not None:
                parts.append(line.strip())
                span = (line_no, line_no) if span is None else (span[0], line_no)
        elif isinstance(cls, Blank):
            flush()
            speaker = None
    flush()

    utterances = []
    segments = []
    for opening, closing, pending in raw_segments:
        if not pending:
            continue
        seg_id = len(segments)
        first = len(utterances)
        for spk, text, sp, cue in pending:
            utterances.append(ScriptUtterance(len(utterances), seg_id, spk, text, sp, cue))
        segments.append(DialogueSegment(seg_id, (first, len(utterances) - 1), opening, closing))
    if not utterances:
        raise EmptyScript(f"{doc.source_name}: no speaker-attributed utterance found")
    return ScriptDocument(doc.source_name, tuple(utterances), tuple(segments))


def _clean(value):
    return " ".join(value.split())


def dump_script_tsv(script):
    """Serialize a parsed script to the inspectable interchange TSV."""
    out = [f"#source\t{_clean(script.source_name)}"]
    for seg in script.segments:
        closing = "-" if seg.closing_tag is None else _clean(seg.closing_tag)
        out.append(f"S\t{seg.segment_id}\t{seg.utterance_range[0]}\t{seg.utterance_range[1]}"
                   f"\t{_clean(seg.opening_tag) or '-'}\t{closing}")
    for u in script.utterances:
        out.append(f"U\t{u.utterance_id}\t{u.segment_id}\t{u.speaker}\t{u.cue_line}"
                   f"\t{u.source_span[0]}\t{u.source_span[1]}\t{u.text}")
    return "\n".join(out) + "\n"


def load_script_tsv(text):
    source = ""
    segments = []
    utterances = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line:
            continue
        fields = line.split("\t")
        try:
            if fields[0] == "#source":
                source = fields[1]
            elif fields[0] == "S":
                _, seg_id, first, last, opening, closing = fields
                segments.append(DialogueSegment(
                    int(seg_id), (int(first), int(last)),
                    "" if opening == "-" else opening,
                    None if closing == "-" else closing))
            elif fields[0] == "U":
                _, uid, seg_id, spk, cue, first, last, utext = fields
                utterances.append(ScriptUtterance(
                    int(uid), int(seg_id), spk, utext, (int(first), int(last)), int(cue)))
            elif not fields[0].startswith("#"):
                raise ValueError(f"unknown record type {fields[0]!r}")
        except ValueError as exc:
            raise ParseError(str(exc), line_no) from exc
    return ScriptDocument(source, tuple(utterances), tuple(segments))
