"""SRT/ASS subtitle parsing and bilingual line alignment."""

import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import MixedFormat, NoCuesParsed, ParseError
from .normalize import LangTag, decode, detect_language, normalize_punct, to_simplified, writing_systems

log = logging.getLogger(__name__)

# minimum intersection-over-union for pairing cues across two files
OVERLAP_THRESHOLD = 0.5


@dataclass(frozen=True)
class TimeSpan:
    start_ms: int
    end_ms: int

    def __post_init__(self):
        if self.start_ms < 0 or self.end_ms < self.start_ms:
            raise ValueError(f"invalid span {self.start_ms}..{self.end_ms}")

    @property
    def duration(self):
        return self.end_ms - self.start_ms

    def intersection(self, other):
        return max(0, min(self.end_ms, other.end_ms) - max(self.start_ms, other.start_ms))


@dataclass(frozen=True)
class SubtitleCue:
    cue_index: int
    time: TimeSpan
    text_lines: tuple


@dataclass(frozen=True)
class ParallelLine:
    line_id: int
    time: TimeSpan
    source_text: str
    target_text: str = ""


@dataclass(frozen=True)
class LanguagePair:
    pivot: str = "en"
    other: str = "zh"
    simplify_target: bool = True


class CueList(list):
    """A list of cues that remembers how many malformed blocks were skipped."""

    def __init__(self, cues=(), malformed=0):
        super().__init__(cues)
        self.malformed = malformed


_TAGS = re.compile(r"<[^>]*>|\{[^}]*\}")
_SRT_TIME = r"(\d+):(\d{1,2}):(\d{1,2})[,.](\d{1,3})"
_SRT_TIMING = re.compile(rf"^\s*{_SRT_TIME}\s*-->\s*{_SRT_TIME}")
_ASS_TIME = re.compile(r"^\s*(\d+):(\d{1,2}):(\d{1,2})(?:\.(\d{1,3}))?\s*$")


def _ms(h, m, s, frac):
    # fractional digits are a decimal fraction of a second: "5" is 500 ms
    return ((int(h) * 60 + int(m)) * 60 + int(s)) * 1000 + int(frac.ljust(3, "0"))


def parse_srt_time(value):
    m = re.fullmatch(r"\s*" + _SRT_TIME + r"\s*", value)
    if not m:
        raise ValueError(f"bad SRT timestamp {value!r}")
    return _ms(*m.groups())


def format_srt_time(ms):
    s, ms = divmod(ms, 1000)
    m, s = divmod(s, 60)
    h, m = divmod(m, 60)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def parse_ass_time(value):
    m = _ASS_TIME.match(value)
    if not m:
        raise ValueError(f"bad ASS timestamp {value!r}")
    h, mi, s, frac = m.groups()
    return _ms(h, mi, s, frac or "0")


def _clean_lines(lines):
    cleaned = (_TAGS.sub("", line).strip() for line in lines)
    return tuple(line for line in cleaned if line)


def _blocks(text):
    block = []
    for line in text.split("\n"):
        if line.strip():
            block.append(line)
        elif block:
            yield block
            block = []
    if block:
        yield block


def parse_srt(data, fallbacks=("gb18030",)):
    """Parse SubRip text. Malformed blocks are skipped and counted."""
    text = decode(data, fallbacks)
    cues = CueList()
    for block in _blocks(text):
        head = block[0].strip().lstrip("﻿")
        timing_at = 1
        if _SRT_TIMING.match(head):
            # tolerate a missing index line
            index, timing_at = (cues[-1].cue_index + 1 if cues else 1), 0
        elif head.isdigit():
            index = int(head)
        else:
            cues.malformed += 1
            continue
        m = _SRT_TIMING.match(block[timing_at]) if len(block) > timing_at else None
        if not m:
            cues.malformed += 1
            continue
        start, end = _ms(*m.groups()[:4]), _ms(*m.groups()[4:])
        if end < start:
            cues.malformed += 1
            continue
        lines = _clean_lines(block[timing_at + 1:])
        if lines:
            cues.append(SubtitleCue(index, TimeSpan(start, end), lines))
    if cues.malformed:
        log.warning("skipped %d malformed SRT block(s)", cues.malformed)
    if not cues:
        raise NoCuesParsed("no SRT cue could be parsed")
    return cues


def dump_srt(cues):
    out = []
    for cue in cues:
        out.append(str(cue.cue_index))
        out.append(f"{format_srt_time(cue.time.start_ms)} --> {format_srt_time(cue.time.end_ms)}")
        out.extend(cue.text_lines)
        out.append("")
    return "\n".join(out)


def parse_ass(data, fallbacks=("gb18030",)):
    """Parse the ``[Events]`` section of an Advanced SubStation Alpha file."""
    text = decode(data, fallbacks)
    cues = CueList()
    section = None
    fields = None
    event_no = 0
    for raw in text.split("\n"):
        line = raw.strip().lstrip("﻿")
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            continue
        if section != "events" or ":" not in line:
            continue
        kind, _, value = line.partition(":")
        kind = kind.strip().lower()
        if kind == "format":
            fields = [f.strip().lower() for f in value.split(",")]
        elif kind == "dialogue":
            if fields is None:
                raise NoCuesParsed("Dialogue event before the Format: header")
            event_no += 1
            values = [v.strip() for v in value.split(",", len(fields) - 1)]
            if len(values) != len(fields):
                cues.malformed += 1
                continue
            event = dict(zip(fields, values))
            try:
                start, end = parse_ass_time(event["start"]), parse_ass_time(event["end"])
                span = TimeSpan(start, end)
            except (KeyError, ValueError):
                cues.malformed += 1
                continue
            body = event.get("text", "").replace("\\h", " ")
            lines = _clean_lines(re.split(r"\\[Nn]", _TAGS.sub("", body)))
            if lines:
                cues.append(SubtitleCue(event_no, span, lines))
    if fields is None:
        raise NoCuesParsed("no [Events] section with a Format: header")
    if cues.malformed:
        log.warning("skipped %d malformed ASS event(s)", cues.malformed)
    if not cues:
        raise NoCuesParsed("no ASS dialogue event could be parsed")
    return cues


def parse_subtitles(data, name="", fallbacks=("gb18030",)):
    """Dispatch on file extension, falling back to content sniffing."""
    suffix = Path(name).suffix.lower()
    if suffix in (".ass", ".ssa"):
        return parse_ass(data, fallbacks)
    if suffix == ".srt":
        return parse_srt(data, fallbacks)
    text = decode(data, fallbacks)
    if "[events]" in text.lower():
        return parse_ass(text)
    return parse_srt(text)


def read_subtitles(path, fallbacks=("gb18030",)):
    path = Path(path)
    return parse_subtitles(path.read_bytes(), path.name, fallbacks)


def _finish_target(parts, lang_pair):
    text = normalize_punct(" ".join(parts))
    return to_simplified(text) if lang_pair.simplify_target else text


def _align_in_cue(cues, lang_pair):
    out = []
    for cue in cues:
        systems = set()
        for line in cue.text_lines:
            systems |= writing_systems(line)
        if len(systems) > 2:
            raise MixedFormat(f"cue {cue.cue_index} mixes writing systems {sorted(systems)}")
        source, target = [], []
        side = source
        for line in cue.text_lines:
            tag = detect_language(line)
            if tag is LangTag.PIVOT:
                side = source
            elif tag is LangTag.OTHER:
                side = target
            # unknown lines (digits, "...") stay with the preceding side
            side.append(line)
        source_text = normalize_punct(" ".join(source))
        if not source_text:
            continue
        out.append(ParallelLine(len(out), cue.time, source_text, _finish_target(target, lang_pair)))
    return out


def _merged_length(spans):
    total, cur_lo, cur_hi = 0, None, None
    for lo, hi in sorted(spans):
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


def _overlap_ratio(span, group):
    """Intersection over union of ``span`` against the merged group spans."""
    targets = [(t.time.start_ms, t.time.end_ms) for t in group]
    clipped = [(max(lo, span.start_ms), min(hi, span.end_ms)) for lo, hi in targets]
    inter = _merged_length([c for c in clipped if c[0] < c[1]])
    union = _merged_length(targets + [(span.start_ms, span.end_ms)])
    return inter / union if union else 0.0


def _align_streams(source_cues, target_cues, lang_pair):
    targets = sorted(target_cues, key=lambda c: c.time.start_ms)
    groups = [[] for _ in source_cues]
    for t in targets:
        best, best_inter = None, 0
        for i, s in enumerate(source_cues):
            inter = s.time.intersection(t.time)
            if inter > best_inter:
                best, best_inter = i, inter
        if best is not None:
            groups[best].append(t)
    out = []
    for s, group in zip(source_cues, groups):
        # greedily shed the weakest target until the merged span overlaps enough
        while group and _overlap_ratio(s.time, group) < OVERLAP_THRESHOLD:
            weakest = min(group, key=lambda t: (s.time.intersection(t.time), -t.time.start_ms))
            group = [t for t in group if t is not weakest]
        source_text = normalize_punct(" ".join(s.text_lines))
        if not source_text:
            continue
        target_parts = [" ".join(t.text_lines) for t in group]
        out.append(ParallelLine(len(out), s.time, source_text, _finish_target(target_parts, lang_pair)))
    return out


def align_bitext(cues, lang_pair=LanguagePair(), target_cues=None):
    """Produce ParallelLines from one bilingual stream or two parallel streams.

    With ``target_cues`` absent, each cue is split into pivot and other
    language lines. Otherwise source and target cues are paired by time
    overlap, allowing one source cue to absorb several target cues.
    """
    ordered = sorted(cues, key=lambda c: c.time.start_ms)
    if target_cues is None:
        return _align_in_cue(ordered, lang_pair)
    return _align_streams(ordered, target_cues, lang_pair)


def _clean(value):
    return " ".join(value.split())


def dump_lines_tsv(lines, source_name):
    out = [f"#source\t{_clean(source_name)}"]
    for pl in lines:
        out.append(f"{pl.line_id}\t{pl.time.start_ms}\t{pl.time.end_ms}\t{pl.source_text}\t{pl.target_text}")
    return "\n".join(out) + "\n"


def load_lines_tsv(text):
    source = ""
    lines = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line:
            continue
        fields = line.split("\t")
        if fields[0] == "#source":
            source = fields[1] if len(fields) > 1 else ""
            continue
        if fields[0].startswith("#"):
            continue
        try:
            line_id, start, end, src, tgt = fields
            lines.append(ParallelLine(int(line_id), TimeSpan(int(start), int(end)), src, tgt))
        except ValueError as exc:
            raise ParseError(str(exc), line_no) from exc
    return lines, source
