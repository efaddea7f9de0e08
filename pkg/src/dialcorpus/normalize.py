"""Text hygiene shared by scripts and subtitles.

Decoding, language detection, traditional to simplified Chinese mapping,
punctuation normalization, sentence splitting and tokenization into the
lowercased terms used by the retrieval index.
"""

import codecs
import enum
import re
import unicodedata
from functools import lru_cache
from importlib import resources

from .errors import UndecodableInput

Term = str


class LangTag(enum.Enum):
    PIVOT = "pivot"
    OTHER = "other"
    UNKNOWN = "unknown"


_BOMS = [
    (codecs.BOM_UTF32_LE, "utf-32-le"),
    (codecs.BOM_UTF32_BE, "utf-32-be"),
    (codecs.BOM_UTF8, "utf-8"),
    (codecs.BOM_UTF16_LE, "utf-16-le"),
    (codecs.BOM_UTF16_BE, "utf-16-be"),
]


def decode(data, fallbacks=("gb18030",)):
    """Decode raw file bytes to text with ``\\n`` line endings.

    A byte-order mark wins; otherwise strict UTF-8 is tried, then each
    legacy encoding in ``fallbacks`` in turn.
    """
    if isinstance(data, str):
        text = data
    else:
        text = None
        for bom, encoding in _BOMS:
            if data.startswith(bom):
                try:
                    text = data[len(bom):].decode(encoding)
                except UnicodeDecodeError as exc:
                    raise UndecodableInput(f"bad {encoding} after BOM: {exc}") from exc
                break
        if text is None:
            for encoding in ("utf-8", *fallbacks):
                try:
                    text = data.decode(encoding)
                    break
                except UnicodeDecodeError:
                    continue
            else:
                raise UndecodableInput(f"tried utf-8 and {', '.join(fallbacks) or 'no fallback'}")
    return text.replace("\r\n", "\n").replace("\r", "\n")


_CJK_RANGES = (
    (0x3040, 0x30FF),  # kana
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xAC00, 0xD7AF),  # hangul syllables
    (0xF900, 0xFAFF),
    (0x20000, 0x2FA1F),
)


def is_cjk(ch):
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def detect_language(text):
    """Classify by the share of CJK codepoints among alphabetic ones."""
    alpha = cjk = 0
    for ch in text:
        if ch.isalpha():
            alpha += 1
            if is_cjk(ch):
                cjk += 1
    if alpha == 0:
        return LangTag.UNKNOWN
    if cjk / alpha > 0.5:
        return LangTag.OTHER
    return LangTag.PIVOT


def writing_systems(text):
    """Return the set of writing systems used by the letters in ``text``.

    Han, kana and hangul count as one system (``"CJK"``); every other
    letter is keyed by the first word of its Unicode name (``LATIN``,
    ``CYRILLIC``, ...).
    """
    systems = set()
    for ch in text:
        if not ch.isalpha():
            continue
        if is_cjk(ch):
            systems.add("CJK")
        else:
            systems.add(unicodedata.name(ch, "UNKNOWN").split()[0])
    return systems


@lru_cache(maxsize=None)
def _t2s_table():
    table = {}
    text = resources.files(__package__).joinpath("data/t2s.tsv").read_text(encoding="utf-8")
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        trad, simp = line.split("\t")
        table[ord(trad)] = simp
    return table


def to_simplified(text):
    return text.translate(_t2s_table())


_PUNCT = {
    "　": " ",
    "。": ".", "、": ",", "．": ".",
    "「": '"', "」": '"', "『": '"', "』": '"',
    "“": '"', "”": '"', "‘": "'", "’": "'",
    "【": "[", "】": "]", "〔": "[", "〕": "]",
    "《": '"', "》": '"', "〈": '"', "〉": '"',
    "…": "...", "⋯": "...",
    "—": "-", "–": "-", "～": "~",
}
# full-width ASCII variants U+FF01..U+FF5E sit at a fixed offset from ASCII
_PUNCT.update({chr(cp): chr(cp - 0xFEE0) for cp in range(0xFF01, 0xFF5F)})
_PUNCT_TABLE = str.maketrans(_PUNCT)


def normalize_punct(text):
    return " ".join(text.translate(_PUNCT_TABLE).split())


@lru_cache(maxsize=None)
def default_abbreviations():
    text = resources.files(__package__).joinpath("data/abbreviations.txt").read_text(encoding="utf-8")
    return frozenset(
        line.strip().lower() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


_CLOSERS = "'\"”’)]」』"
_SENT_END = re.compile(r"(?:\.\.\.|[.!?…])+[" + re.escape(_CLOSERS) + r"]*(?=\s|$)")
_CJK_END = re.compile(r"[。！？]+[" + re.escape(_CLOSERS) + r"]*")


def split_sentences(text, lang=LangTag.PIVOT, abbreviations=None):
    """Split ``text`` after terminal punctuation.

    Western terminals only split when followed by whitespace or the end
    of text; an abbreviation from ``abbreviations`` never ends a sentence.
    CJK terminals split unconditionally.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    cuts = set()
    for m in _SENT_END.finditer(text):
        start = text.rfind(" ", 0, m.start()) + 1
        word = text[start:m.end()].lower().lstrip("\"'([")
        if m.group().startswith(".") and word in abbreviations:
            continue
        cuts.add(m.end())
    for m in _CJK_END.finditer(text):
        cuts.add(m.end())
    pieces = []
    prev = 0
    for cut in sorted(cuts):
        pieces.append(text[prev:cut])
        prev = cut
    pieces.append(text[prev:])
    return [p.strip() for p in pieces if p.strip()]


# contractions stay whole; hyphens and other punctuation separate words
_WORD = re.compile(r"[^\W_]+(?:'[^\W_]+)*")


def tokenize(text, lang=LangTag.PIVOT):
    """Lowercased terms of ``text``; punctuation dropped, stop words kept."""
    text = text.replace("’", "'").replace("‘", "'").lower()
    if lang is not LangTag.OTHER:
        return _WORD.findall(text)
    terms = []
    for word in _WORD.findall(text):
        run = []
        for ch in word:
            if is_cjk(ch):
                if run:
                    terms.append("".join(run))
                    run = []
                terms.append(ch)
            else:
                run.append(ch)
        if run:
            terms.append("".join(run))
    return terms
