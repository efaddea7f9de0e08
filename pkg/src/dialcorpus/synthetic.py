"""Synthetic episodes with known ground truth.

Generates a screenplay, a bilingual SRT derived from it with controlled
perturbations (word dropout, split cues, inserted noise), and the planted
line-to-utterance alignment, so the whole pipeline can be scored.
"""

import random
import textwrap
from dataclasses import dataclass

from .evaluation import GoldLabel
from .projection import AnnotatedLine, assemble
from .subtitles import SubtitleCue, TimeSpan, dump_srt

NAMES = ("MONICA", "JOEY", "CHANDLER", "RACHEL", "ROSS", "PHOEBE", "GUNTHER", "JANICE", "CAROL", "MIKE")
PLACES = ("CENTRAL PERK", "MONICA'S APARTMENT", "THE HALLWAY", "A RESTAURANT", "THE MUSEUM", "ROSS'S OFFICE")
STOPWORDS = (
    "i", "you", "the", "a", "to", "and", "it", "is", "that", "of", "what", "we", "me", "this",
    "in", "do", "was", "so", "no", "just", "oh", "know", "are", "have", "not", "with", "on",
    "my", "be", "okay", "yeah", "your", "can", "about", "there", "he", "she", "all", "right",
)
STOCK_PHRASES = ("Oh my god!", "What?", "Okay.", "Yeah, I know.", "Are you okay?", "No way!", "Hi.")
_SYLLABLES = ("ba", "ko", "ri", "ten", "mo", "sa", "lu", "dra", "fen", "qui", "zor", "pel", "ni",
              "gar", "vo", "shi", "tum", "el", "wik", "ra", "dun", "ópo", "kel", "mar")
_NOISE_SYLLABLES = ("xy", "zz", "qw", "vv", "jx", "kh", "pf", "tz")
_CJK_POOL = [chr(cp) for cp in range(0x4E00, 0x4E00 + 800)]


@dataclass(frozen=True)
class PlantedUtterance:
    utterance_id: int
    segment_id: int
    speaker: str
    text: str


@dataclass(frozen=True)
class PlantedLine:
    """Ground truth for one subtitle line; noise lines have no utterance."""

    line_id: int
    utterance_id: int | None
    speaker: str | None
    segment_id: int | None


@dataclass(frozen=True)
class SyntheticEpisode:
    script_text: str
    srt_text: str
    utterances: tuple
    segment_count: int
    truth: tuple

    def gold(self):
        """Gold labels for every line with a planted utterance."""
        labels = []
        previous = None
        for t in self.truth:
            if t.utterance_id is None:
                continue
            labels.append(GoldLabel(t.line_id, t.speaker, previous is None or t.segment_id != previous))
            previous = t.segment_id
        return labels


def _word(rng, syllables, lo=2, hi=3):
    return "".join(rng.choice(syllables) for _ in range(rng.randint(lo, hi)))


def _lexicon(rng, size):
    words = set()
    while len(words) < size:
        words.add(_word(rng, _SYLLABLES))
    words = sorted(words)
    rng.shuffle(words)
    # mildly skewed rank-frequency curve: weight ~ rank ** -0.5
    weights = [(rank + 1) ** -0.5 for rank in range(size)]
    return words, weights


def _sentence(rng, content, min_words=4, max_words=10):
    words_, weights = content
    n = rng.randint(min_words, max_words)
    words = []
    for _ in range(n):
        if rng.random() < 0.35:
            words.append(rng.choice(STOPWORDS))
        else:
            words.append(rng.choices(words_, weights)[0])
    words[0] = words[0].capitalize()
    return " ".join(words) + rng.choice(".!?.")


def _translate(text, table):
    out = []
    for word in text.split():
        key = word.strip(".!?").lower()
        out.append(table.setdefault(key, "".join(random.Random(key).sample(_CJK_POOL, 2))))
    return "".join(out) + "。"


def _perturb(rng, sentence, dropout):
    words = sentence.split()
    end = words[-1][-1] if words[-1][-1] in ".!?" else ""
    kept = [w for w in words if rng.random() >= dropout] or [rng.choice(words)]
    text = " ".join(w.strip(".!?") for w in kept)
    return text[:1].upper() + text[1:] + end


def _script_text(rng, utterances, segment_count):
    out = ["FADE IN:", ""]
    for seg in range(segment_count):
        out.append(f"SCENE {seg + 1}: {rng.choice(PLACES)}")
        out.append("")
        out.append(f"[{rng.choice(NAMES).title()} is sitting on the couch.]")
        out.append("")
        for u in (x for x in utterances if x.segment_id == seg):
            style = rng.random()
            if style < 0.2:
                wrapped = textwrap.wrap(f"{u.speaker}: {u.text}", 50)
                out.extend(wrapped)
            else:
                cue = u.speaker
                if style < 0.3:
                    cue += " (V.O.)"
                out.append(cue)
                if style > 0.85:
                    out.append("(quietly)")
                out.extend(textwrap.wrap(u.text, 40))
            out.append("")
            if rng.random() < 0.1:
                out.append("The door swings open.")
                out.append("")
        if rng.random() < 0.6:
            out.append("CUT TO:")
            out.append("")
    out.append("FADE OUT.")
    return "\n".join(out) + "\n"


def generate_episode(seed=0, n_utterances=120, n_segments=6, n_speakers=6, dropout=0.0,
                     split_rate=0.0, noise_rate=0.0, lexicon_size=400, stock_rate=0.08):
    """Build one episode; all perturbation rates default to zero (verbatim)."""
    rng = random.Random(seed)
    content = _lexicon(rng, lexicon_size)
    cast = rng.sample(NAMES, n_speakers)
    # contiguous segments of at least 5 utterances each
    cuts = sorted(rng.sample(range(5, n_utterances - 4, 5), n_segments - 1))
    bounds = [0] + cuts + [n_utterances]
    utterances = []
    for seg in range(n_segments):
        present = rng.sample(cast, rng.randint(2, min(4, len(cast))))
        if seg == 0:
            present = cast[:]  # every speaker appears at least once
        for _ in range(bounds[seg], bounds[seg + 1]):
            if rng.random() < stock_rate:
                text = rng.choice(STOCK_PHRASES)
            else:
                text = " ".join(_sentence(rng, content) for _ in range(rng.choice((1, 1, 2, 3))))
            utterances.append(PlantedUtterance(len(utterances), seg, rng.choice(present), text))
    script = _script_text(rng, utterances, n_segments)

    table = {}
    pieces = []  # (english, chinese, planted utterance or None)
    for u in utterances:
        sentences = [s + "." if not s[-1] in ".!?" else s for s in _split_planted(u.text)]
        english = " ".join(_perturb(rng, s, dropout) for s in sentences) if dropout else u.text
        chinese = _translate(u.text, table)
        words = english.split()
        if split_rate and len(words) >= 4 and rng.random() < split_rate:
            cut = len(words) // 2
            pieces.append((" ".join(words[:cut]), chinese[: len(chinese) // 2], u))
            pieces.append((" ".join(words[cut:]), chinese[len(chinese) // 2:], u))
        else:
            pieces.append((english, chinese, u))
        if noise_rate and rng.random() < noise_rate:
            noise = " ".join(rng.choice(STOPWORDS) if rng.random() < 0.4 else _word(rng, _NOISE_SYLLABLES)
                             for _ in range(rng.randint(3, 7)))
            pieces.append((noise.capitalize() + ".", "".join(rng.sample(_CJK_POOL, 4)), None))

    cues, truth = [], []
    clock = 1000
    for i, (english, chinese, u) in enumerate(pieces):
        duration = 500 + 300 * len(english.split())
        cues.append(SubtitleCue(i + 1, TimeSpan(clock, clock + duration), (english, chinese)))
        clock += duration + rng.randint(100, 600)
        if u is None:
            truth.append(PlantedLine(i, None, None, None))
        else:
            truth.append(PlantedLine(i, u.utterance_id, u.speaker, u.segment_id))
    return SyntheticEpisode(script, dump_srt(cues), tuple(utterances), n_segments, tuple(truth))


def _split_planted(text):
    out, cur = [], []
    for word in text.split():
        cur.append(word)
        if word[-1] in ".!?":
            out.append(" ".join(cur))
            cur = []
    if cur:
        out.append(" ".join(cur))
    return out


def noise_lines(seed=0, n=50):
    """Subtitle source sentences made only of out-of-script nonsense terms."""
    rng = random.Random(seed)
    return [" ".join(_word(rng, _NOISE_SYLLABLES) for _ in range(rng.randint(2, 8))).capitalize() + "."
            for _ in range(n)]


def two_style_corpus(seed=0, per_group=250, divergence=1.0):
    """A corpus whose target side depends on the speaker's group.

    Each group draws ``divergence`` of its characters from a private style
    pool and the rest from a shared pool; ``divergence=0`` makes the groups
    indistinguishable. Returns the corpus and the speaker to group map.
    """
    rng = random.Random(seed)
    shared = _CJK_POOL[:60]
    style = {"female": _CJK_POOL[100:160], "male": _CJK_POOL[200:260]}
    members = {"female": ("MONICA", "RACHEL", "PHOEBE"), "male": ("JOEY", "CHANDLER", "ROSS")}
    attribute_map = {name: group for group, names in members.items() for name in names}
    plan = [g for g in style for _ in range(per_group)]
    rng.shuffle(plan)
    lines = []
    for i, group in enumerate(plan):
        chars = []
        for _ in range(rng.randint(5, 12)):
            pool = style[group] if rng.random() < divergence * 0.6 else shared
            # bigram habit: style characters often come in a fixed pair
            ch = rng.choice(pool)
            chars.append(ch)
            if pool is style[group] and rng.random() < 0.5:
                chars.append(pool[(pool.index(ch) + 1) % len(pool)])
        span = TimeSpan(i * 2000, i * 2000 + 1500)
        lines.append(AnnotatedLine(i, span, "line", "".join(chars), rng.choice(members[group]), i // 20))
    return assemble(lines, "synthetic-script", "synthetic-subs"), attribute_map
