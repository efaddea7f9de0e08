"""Speaker-conditioned n-gram language models.

Partitions a corpus's target-side sentences by a speaker attribute, trains
add-k smoothed back-off n-gram models per group and compares holdout
perplexity against a single pooled model.
"""

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import mpmath

from .errors import EmptyTraining, InsufficientData, ParseError
from .normalize import LangTag, tokenize
from .projection import UNKNOWN
from .script_parser import normalize_speaker

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
_DPS = 40


@dataclass
class NGramModel:
    """Add-k smoothed n-gram model that backs off when a context is unseen.

    ``vocab`` is the prediction set: training terms plus the end and
    unknown symbols. Every seen context yields a proper distribution
    over it, so backing off to the longest seen suffix stays normalized.
    """

    order: int
    k: float
    vocab: frozenset
    counts: dict = field(default_factory=dict)
    totals: dict = field(default_factory=dict)

    @classmethod
    def uniform(cls, terms):
        return cls(1, 1.0, frozenset(terms) | {EOS, UNK}, {(): Counter()}, {(): 0})

    def _map(self, term):
        return term if term in self.vocab or term == BOS else UNK

    def context_of(self, history):
        if self.order == 1:
            return ()
        history = [BOS] * (self.order - 1) + [self._map(t) for t in history]
        ctx = tuple(history[len(history) - (self.order - 1):])
        while ctx and ctx not in self.counts:
            ctx = ctx[1:]
        return ctx

    def _counts(self, term, history):
        ctx = self.context_of(list(history))
        return self.counts.get(ctx, {}).get(self._map(term), 0), self.totals.get(ctx, 0)

    def prob(self, term, history=()):
        count, total = self._counts(term, history)
        return (count + self.k) / (total + self.k * len(self.vocab))

    def sentence_logprob(self, sentence):
        """Log-probabilities of each sentence token and of the end symbol.

        Computed at 40 significant digits so perplexities are exact to
        double precision.
        """
        history = []
        logs = []
        k = mpmath.mpf(self.k)
        with mpmath.workdps(_DPS):
            for term in list(sentence) + [EOS]:
                count, total = self._counts(term, history)
                logs.append(mpmath.log((count + k) / (total + k * len(self.vocab))))
                history.append(term)
        return logs


def train(sentences, order=3, k=0.1, vocab=None):
    """Collect n-gram counts at every context length up to ``order - 1``.

    With ``vocab`` given, terms outside it are counted as the unknown symbol.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if k <= 0:
        raise ValueError("k must be > 0")
    sentences = [list(s) for s in sentences]
    if not any(sentences):
        raise EmptyTraining("no non-empty training sentence")
    if vocab is None:
        vocab = {t for s in sentences for t in s}
    prediction = frozenset(vocab) | {EOS, UNK}
    counts = defaultdict(Counter)
    for sentence in sentences:
        padded = [BOS] * (order - 1) + [t if t in prediction else UNK for t in sentence] + [EOS]
        for i in range(order - 1, len(padded)):
            for length in range(order):
                counts[tuple(padded[i - length:i])][padded[i]] += 1
    counts = dict(counts)
    totals = {ctx: sum(c.values()) for ctx, c in counts.items()}
    return NGramModel(order, k, prediction, counts, totals)


def _ppl(logs):
    if not logs:
        raise ValueError("no evaluation tokens")
    with mpmath.workdps(_DPS):
        return float(mpmath.exp(-mpmath.fsum(logs) / len(logs)))


def perplexity(model, sentences):
    """exp of the mean negative log-probability per token, end symbols included."""
    logs = []
    for sentence in sentences:
        logs.extend(model.sentence_logprob(sentence))
    return _ppl(logs)


@dataclass(frozen=True)
class SpeakerPartition:
    attribute_name: str
    mapping: dict
    groups: dict


def load_attribute_map(text):
    mapping = {}
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
            raise ParseError("expected speaker<TAB>group", line_no)
        mapping[normalize_speaker(fields[0])] = fields[1].strip()
    return mapping


def partition(corpora, attribute_map, attribute_name="sex", unknown_group=UNKNOWN):
    """Target-side token lists grouped by the speaker's attribute value."""
    if not isinstance(corpora, (list, tuple)):
        corpora = [corpora]
    groups = defaultdict(list)
    for corpus in corpora:
        for line in corpus.lines():
            tokens = tokenize(line.target_text, LangTag.OTHER)
            if not tokens:
                continue
            groups[attribute_map.get(normalize_speaker(line.speaker), unknown_group)].append(tokens)
    return SpeakerPartition(attribute_name, dict(attribute_map), dict(groups))


@dataclass(frozen=True)
class GroupResult:
    group: str
    train_sentences: int
    holdout_sentences: int
    pooled_ppl: float
    adapted_ppl: float

    @property
    def delta(self):
        return self.pooled_ppl - self.adapted_ppl


@dataclass(frozen=True)
class StudyReport:
    order: int
    k: float
    seed: int
    groups: tuple
    pooled_overall: float
    adapted_overall: float

    @property
    def mean_delta(self):
        return sum(g.delta for g in self.groups) / len(self.groups)

    def table(self):
        out = [f"{'group':<12}{'train':>7}{'holdout':>9}{'pooled-PPL':>13}{'adapted-PPL':>13}{'delta':>11}"]
        for g in self.groups:
            out.append(f"{g.group:<12}{g.train_sentences:>7}{g.holdout_sentences:>9}"
                       f"{g.pooled_ppl:>13.4f}{g.adapted_ppl:>13.4f}{g.delta:>11.4f}")
        out.append(f"{'(all)':<12}{'':>7}{'':>9}{self.pooled_overall:>13.4f}"
                   f"{self.adapted_overall:>13.4f}{self.pooled_overall - self.adapted_overall:>11.4f}")
        return "\n".join(out) + "\n"


def _split(sentences, fraction, rng):
    order = list(range(len(sentences)))
    rng.shuffle(order)
    n_hold = max(1, round(fraction * len(sentences)))
    hold = [sentences[i] for i in sorted(order[:n_hold])]
    keep = [sentences[i] for i in sorted(order[n_hold:])]
    return keep, hold


def adaptation_study(corpora, attribute_map, order=3, k=0.1, holdout_fraction=0.1, seed=0,
                     min_train=20, unknown_group=UNKNOWN):
    """Holdout perplexity of per-group models against one pooled model.

    All models share the pooled training vocabulary so their perplexities
    are computed over the same event space.
    """
    if not 0 < holdout_fraction < 1:
        raise ValueError("holdout_fraction must lie in (0, 1)")
    parts = partition(corpora, attribute_map, unknown_group=unknown_group)
    labels = sorted(g for g in parts.groups if g != unknown_group)
    if len(labels) < 2:
        raise InsufficientData(labels[0] if labels else unknown_group,
                               "at least two speaker groups are required")
    splits = {}
    for label in labels:
        rng = random.Random(f"{seed}:{label}")
        keep, hold = _split(parts.groups[label], holdout_fraction, rng)
        if len(keep) < min_train:
            raise InsufficientData(label, f"{len(keep)} training sentences < {min_train}")
        splits[label] = (keep, hold)
    pooled_train = [s for label in labels for s in splits[label][0]]
    vocab = {t for s in pooled_train for t in s}
    pooled = train(pooled_train, order, k, vocab)
    results = []
    pooled_logs, adapted_logs = [], []
    for label in labels:
        keep, hold = splits[label]
        own = train(keep, order, k, vocab)
        for s in hold:
            pooled_logs.extend(pooled.sentence_logprob(s))
            adapted_logs.extend(own.sentence_logprob(s))
        results.append(GroupResult(label, len(keep), len(hold),
                                   perplexity(pooled, hold), perplexity(own, hold)))
    return StudyReport(order, k, seed, tuple(results), _ppl(pooled_logs), _ppl(adapted_logs))
