"""Flat ``key = value`` pipeline configuration.

Blank lines and ``#`` comments (whole-line, or after whitespace) are ignored. ``pair`` may repeat; its value
is ``SCRIPT | SUBTITLE`` or ``SCRIPT | SOURCE_SUBS | TARGET_SUBS`` with
paths relative to the config file. Example::

    pair = ep01.txt | ep01.srt
    threshold = 0.3
    window = 20
    out = build
"""

import os
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .matcher import WEIGHTINGS, MatchConfig
from .script_parser import DEFAULT_BOUNDARY_KEYWORDS, ScriptParseConfig
from .subtitles import LanguagePair


@dataclass(frozen=True)
class FilePair:
    script: Path
    subtitle: Path
    target_subtitle: Path | None = None


@dataclass(frozen=True)
class LMSettings:
    attributes: Path | None = None
    order: int = 3
    k: float = 0.1
    holdout: float = 0.1
    seed: int = 0


@dataclass(frozen=True)
class PipelineConfig:
    pairs: tuple = ()
    out: Path = Path("out")
    languages: LanguagePair = LanguagePair()
    script: ScriptParseConfig = ScriptParseConfig()
    match: MatchConfig = MatchConfig()
    lm: LMSettings = LMSettings()
    encodings: tuple = ("gb18030",)
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)

    def validate(self):
        if not self.pairs:
            raise ConfigError("pair", "at least one script/subtitle pair is required")
        for i, pair in enumerate(self.pairs):
            for name in ("script", "subtitle", "target_subtitle"):
                path = getattr(pair, name)
                if path is not None and not path.is_file():
                    raise ConfigError(f"pair[{i}].{name}", f"no such file: {path}")
        if self.lm.attributes is not None and not self.lm.attributes.is_file():
            raise ConfigError("lm.attributes", f"no such file: {self.lm.attributes}")
        if self.jobs < 1:
            raise ConfigError("jobs", "must be >= 1")
        return self

    def echo(self):
        """Deterministic key = value rendering for the run manifest (output dir left out)."""
        lines = [f"pair = {' | '.join(str(p) for p in (pr.script, pr.subtitle, pr.target_subtitle) if p)}"
                 for pr in self.pairs]
        lines += [
            f"pivot = {self.languages.pivot}",
            f"other = {self.languages.other}",
            f"simplify_target = {str(self.languages.simplify_target).lower()}",
            f"boundary_keywords = {', '.join(self.script.boundary_keywords)}",
            f"speaker_max_len = {self.script.speaker_max_len}",
            f"dialogue_min_indent = {'' if self.script.dialogue_min_indent is None else self.script.dialogue_min_indent}",
            f"inline_cues = {str(self.script.inline_cues).lower()}",
            f"threshold = {self.match.threshold!r}",
            f"window = {self.match.window}",
            f"weighting = {self.match.weighting}",
            f"recover_after = {self.match.recover_after}",
            f"encodings = {', '.join(self.encodings)}",
            f"lm.attributes = {self.lm.attributes or ''}",
            f"lm.order = {self.lm.order}",
            f"lm.k = {self.lm.k!r}",
            f"lm.holdout = {self.lm.holdout!r}",
            f"lm.seed = {self.lm.seed}",
        ]
        return "\n".join(lines) + "\n"


# a comment starts at a "#" that opens the line or follows whitespace
_COMMENT = re.compile(r"(^|\s)#.*$")


def _bool(key, value):
    if value.lower() in ("1", "true", "yes", "on"):
        return True
    if value.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {value!r}")


def _num(key, value, kind):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(key, f"expected {kind.__name__}, got {value!r}") from None


def parse_config(text, base=Path(".")):
    pairs = []
    values = {}
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT.sub("", raw).strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {line_no}", "expected key = value")
        key, value = key.strip(), value.strip()
        if key == "pair":
            parts = [p.strip() for p in value.split("|")]
            if len(parts) not in (2, 3) or not all(parts):
                raise ConfigError("pair", f"line {line_no}: expected SCRIPT | SUBS [| TARGET_SUBS]")
            paths = [base / p for p in parts]
            pairs.append(FilePair(*paths))
        else:
            values[key] = value

    known = {
        "out", "pivot", "other", "simplify_target", "boundary_keywords", "speaker_max_len",
        "dialogue_min_indent", "inline_cues", "threshold", "window", "weighting", "recover_after", "encodings",
        "jobs", "lm.attributes", "lm.order", "lm.k", "lm.holdout", "lm.seed",
    }
    for key in values:
        if key not in known:
            raise ConfigError(key, "unknown setting")

    cfg = PipelineConfig(pairs=tuple(pairs))
    get = values.get
    if "out" in values:
        cfg = replace(cfg, out=base / get("out"))
    cfg = replace(cfg, languages=LanguagePair(
        get("pivot", "en"), get("other", "zh"), _bool("simplify_target", get("simplify_target", "true"))))
    keywords = DEFAULT_BOUNDARY_KEYWORDS
    if "boundary_keywords" in values:
        keywords = tuple(k.strip() for k in get("boundary_keywords").split(",") if k.strip())
    indent = get("dialogue_min_indent", "")
    cfg = replace(cfg, script=ScriptParseConfig(
        keywords,
        _num("speaker_max_len", get("speaker_max_len", "40"), int),
        _num("dialogue_min_indent", indent, int) if indent else None,
        _bool("inline_cues", get("inline_cues", "true")),
    ))
    cfg = with_match(cfg, get("threshold"), get("window"), get("weighting"), get("recover_after"))
    if "encodings" in values:
        cfg = replace(cfg, encodings=tuple(e.strip() for e in get("encodings").split(",") if e.strip()))
    if "jobs" in values:
        cfg = replace(cfg, jobs=_num("jobs", get("jobs"), int))
    attributes = get("lm.attributes", "")
    cfg = replace(cfg, lm=LMSettings(
        base / attributes if attributes else None,
        _num("lm.order", get("lm.order", "3"), int),
        _num("lm.k", get("lm.k", "0.1"), float),
        _num("lm.holdout", get("lm.holdout", "0.1"), float),
        _num("lm.seed", get("lm.seed", "0"), int),
    ))
    return cfg


def with_match(cfg, threshold=None, window=None, weighting=None, recover_after=None):
    """Return ``cfg`` with whichever match settings are given replaced."""
    m = cfg.match
    recover = m.recover_after if recover_after is None else _num("recover_after", str(recover_after), int)
    threshold = m.threshold if threshold is None else _num("threshold", str(threshold), float)
    window = m.window if window is None else _num("window", str(window), int)
    weighting = m.weighting if weighting is None else weighting
    if not 0 <= threshold <= 1:
        raise ConfigError("threshold", f"must lie in [0, 1], got {threshold}")
    if window < 1:
        raise ConfigError("window", f"must be >= 1, got {window}")
    if weighting not in WEIGHTINGS:
        raise ConfigError("weighting", f"must be one of {', '.join(WEIGHTINGS)}")
    if recover < 0:
        raise ConfigError("recover_after", f"must be >= 0, got {recover}")
    return replace(cfg, match=MatchConfig(threshold, window, weighting, recover))


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, path.parent)
