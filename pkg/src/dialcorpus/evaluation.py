"""Agreement between projected annotations and hand-made gold labels."""

from dataclasses import dataclass

from .errors import MissingLine, ParseError
from .normalize import decode
from .projection import UNKNOWN


@dataclass(frozen=True)
class GoldLabel:
    line_id: int
    speaker: str
    dialogue_boundary: bool


@dataclass(frozen=True)
class AgreementReport:
    lines_total: int
    speaker_matches: int
    boundary_matches: int

    @property
    def speaker_agreement(self):
        return 100.0 * self.speaker_matches / self.lines_total if self.lines_total else 0.0

    @property
    def boundary_agreement(self):
        return 100.0 * self.boundary_matches / self.lines_total if self.lines_total else 0.0

    def table(self):
        return (
            f"{'label':<10}{'agreement':>11}{'matches':>9}{'total':>7}\n"
            f"{'speaker':<10}{self.speaker_agreement:>10.2f}%{self.speaker_matches:>9}{self.lines_total:>7}\n"
            f"{'boundary':<10}{self.boundary_agreement:>10.2f}%{self.boundary_matches:>9}{self.lines_total:>7}\n"
        )

    def key_values(self):
        return (
            f"lines_total={self.lines_total}\n"
            f"speaker_matches={self.speaker_matches}\n"
            f"boundary_matches={self.boundary_matches}\n"
            f"speaker_agreement={self.speaker_agreement:.4f}\n"
            f"boundary_agreement={self.boundary_agreement:.4f}\n"
        )


def load_gold(data):
    """Parse a ``line_id<TAB>speaker<TAB>0|1`` file; ``#`` lines are comments."""
    text = data if isinstance(data, str) else decode(data)
    labels = {}
    for line_no, line in enumerate(text.split("\n"), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.rstrip("\n").split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}", line_no)
        line_id, speaker, flag = fields
        if not line_id.strip().isdigit():
            raise ParseError(f"bad line id {line_id!r}", line_no)
        if flag.strip() not in ("0", "1"):
            raise ParseError(f"boundary flag must be 0 or 1, got {flag!r}", line_no)
        if int(line_id) in labels:
            raise ParseError(f"duplicate line id {line_id}", line_no)
        labels[int(line_id)] = GoldLabel(int(line_id), speaker.strip(), flag.strip() == "1")
    return [labels[k] for k in sorted(labels)]


def dump_gold(labels):
    return "".join(f"{g.line_id}\t{g.speaker}\t{int(g.dialogue_boundary)}\n" for g in labels)


def boundary_flags(annotated):
    """Per line: does a new dialogue start here?"""
    flags = {}
    previous = None
    for line in annotated:
        flags[line.line_id] = previous is None or line.dialogue_id != previous
        previous = line.dialogue_id
    return flags


def gold_from_annotated(annotated):
    """Treat automatic output as gold; UNKNOWN lines carry no speaker label."""
    flags = boundary_flags(annotated)
    return [GoldLabel(line.line_id, line.speaker, flags[line.line_id])
            for line in annotated if line.speaker != UNKNOWN]


def agreement(auto, gold):
    by_id = {line.line_id: line for line in auto}
    flags = boundary_flags(auto)
    speaker_matches = boundary_matches = 0
    for label in gold:
        line = by_id.get(label.line_id)
        if line is None:
            raise MissingLine(f"gold line {label.line_id} has no automatic annotation")
        if line.speaker != UNKNOWN and line.speaker.casefold() == label.speaker.casefold():
            speaker_matches += 1
        if flags[label.line_id] == label.dialogue_boundary:
            boundary_matches += 1
    return AgreementReport(len(gold), speaker_matches, boundary_matches)
