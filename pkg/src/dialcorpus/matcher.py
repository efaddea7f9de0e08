"""TF-IDF vector-space matching of subtitle lines against script utterances.

Each utterance of one script is a document; each subtitle source sentence
is a query. Multi-sentence queries vote through their sentence-level
sub-queries, and a window around the last match keeps the search local.
"""

import enum
import math
from collections import Counter, defaultdict
from dataclasses import dataclass

from .errors import EmptyCollection, ParseError
from .normalize import split_sentences, tokenize

DEFAULT_THRESHOLD = 0.3
DEFAULT_WINDOW = 20
# consecutive misses after which the next line is searched script-wide
DEFAULT_RECOVER_AFTER = 3
WEIGHTINGS = ("tfidf", "boolean")
# scores closer than this count as a tie
TIE_EPS = 1e-12


@dataclass(frozen=True)
class MatchCandidate:
    utterance_id: int
    score: float


@dataclass
class MatchState:
    last_matched_id: int | None = None
    window_radius: int = DEFAULT_WINDOW

    def __post_init__(self):
        if self.window_radius < 1:
            raise ValueError("window_radius must be >= 1")

    def expected(self):
        return None if self.last_matched_id is None else self.last_matched_id + 1

    def admits(self, utterance_id):
        if self.last_matched_id is None:
            return True
        return abs(utterance_id - self.last_matched_id) <= self.window_radius


class Method(enum.Enum):
    DIRECT = "Direct"
    VOTED = "Voted"
    NO_MATCH = "NoMatch"


@dataclass(frozen=True)
class MatchDecision:
    line_id: int
    result: MatchCandidate | None
    method: Method


@dataclass(frozen=True)
class MatchConfig:
    threshold: float = DEFAULT_THRESHOLD
    window: int = DEFAULT_WINDOW
    weighting: str = "tfidf"
    recover_after: int = DEFAULT_RECOVER_AFTER

    def __post_init__(self):
        if not 0 <= self.threshold <= 1:
            raise ValueError("threshold must lie in [0, 1]")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"weighting must be one of {WEIGHTINGS}")
        if self.recover_after < 0:
            raise ValueError("recover_after must be >= 0 (0 disables recovery)")


def tf(term, doc_terms):
    return sum(1 for t in doc_terms if t == term)


def _norm(vector):
    return math.sqrt(math.fsum(w * w for w in vector.values()))


def _dot(v1, v2):
    # fsum is correctly rounded, so the result does not depend on term order
    if len(v2) < len(v1):
        v1, v2 = v2, v1
    return math.fsum(w * v2[t] for t, w in v1.items() if t in v2)


class InvertedIndex:
    """Postings, weighted document vectors and their norms for one script.

    Immutable once built; ``weighting`` selects TF-IDF or Boolean (0/1)
    term weights for documents and queries alike.
    """

    def __init__(self, docs, weighting="tfidf"):
        if weighting not in WEIGHTINGS:
            raise ValueError(f"weighting must be one of {WEIGHTINGS}")
        self.weighting = weighting
        self.doc_count = len(docs)
        postings = defaultdict(list)
        for doc_id, terms in docs.items():
            for term, count in Counter(terms).items():
                postings[term].append((doc_id, count))
        self.postings = dict(postings)
        self.doc_vectors = {doc_id: weigh(terms, self) for doc_id, terms in docs.items()}
        self.doc_norms = {doc_id: _norm(vec) for doc_id, vec in self.doc_vectors.items()}

    def df(self, term):
        return len(self.postings.get(term, ()))

    def docs_sharing(self, terms):
        ids = set()
        for term in set(terms):
            ids.update(doc_id for doc_id, _ in self.postings.get(term, ()))
        return ids


def idf(term, index):
    df = index.df(term)
    if df == 0:
        return 0.0
    return math.log(index.doc_count / df)


def weigh(doc_terms, index):
    vector = {}
    for term, count in Counter(doc_terms).items():
        if index.weighting == "boolean":
            w = 1.0 if index.df(term) else 0.0
        else:
            w = count * idf(term, index)
        if w > 0:
            vector[term] = w
    return vector


def cosine(v1, v2):
    n1, n2 = _norm(v1), _norm(v2)
    if n1 == 0 or n2 == 0:
        return 0.0
    return min(1.0, max(0.0, _dot(v1, v2) / (n1 * n2)))


def utterance_terms(text):
    terms = []
    for sentence in split_sentences(text):
        terms.extend(tokenize(sentence))
    return terms


def build_index(utterances, weighting="tfidf"):
    docs = {u.utterance_id: utterance_terms(u.text) for u in utterances}
    if not any(docs.values()):
        raise EmptyCollection("no utterance produced an index term")
    return InvertedIndex(docs, weighting)


def _closest(ids, state):
    expected = state.expected() if state is not None else None
    if expected is None:
        return min(ids)
    return min(ids, key=lambda i: (abs(i - expected), i))


def search_vector(index, query_vector, candidates, state=None, threshold=DEFAULT_THRESHOLD):
    """Rank ``candidates`` by cosine against an already weighted query."""
    qnorm = _norm(query_vector)
    scored = {}
    for doc_id in candidates:
        if state is not None and not state.admits(doc_id):
            continue
        dnorm = index.doc_norms[doc_id]
        if qnorm == 0 or dnorm == 0:
            scored[doc_id] = 0.0
            continue
        dot = _dot(query_vector, index.doc_vectors[doc_id])
        scored[doc_id] = min(1.0, max(0.0, dot / (qnorm * dnorm)))
    if not scored:
        return None
    best = max(scored.values())
    winner = _closest([i for i, s in scored.items() if s >= best - TIE_EPS], state)
    if scored[winner] < threshold:
        return None
    return MatchCandidate(winner, scored[winner])


def search(index, query_terms, state=None, threshold=DEFAULT_THRESHOLD):
    return search_vector(index, weigh(query_terms, index), index.docs_sharing(query_terms),
                         state, threshold)


def subquery_vote(index, sentence, state=None, threshold=DEFAULT_THRESHOLD):
    """1-best search per sentence of ``sentence``, combined by majority vote.

    Vote ties go to the larger summed score, then to the candidate closest
    to the position after the last match. The reported score is the best
    sub-query score, or the whole line's cosine against the winner when
    that is higher.
    """
    subqueries = split_sentences(sentence) or [sentence]
    if len(subqueries) == 1:
        return search(index, tokenize(subqueries[0]), state, threshold)
    votes = Counter()
    totals = defaultdict(float)
    best = {}
    for sub in subqueries:
        hit = search(index, tokenize(sub), state, threshold)
        if hit is None:
            continue
        votes[hit.utterance_id] += 1
        totals[hit.utterance_id] += hit.score
        best[hit.utterance_id] = max(best.get(hit.utterance_id, 0.0), hit.score)
    if not votes:
        return None
    top = max(votes.values())
    tied = [i for i, v in votes.items() if v == top]
    top_total = max(totals[i] for i in tied)
    tied = [i for i in tied if totals[i] >= top_total - TIE_EPS]
    winner = _closest(tied, state)
    # the whole line may fit the winner better than any single sentence did
    whole = search_vector(index, weigh(tokenize(sentence), index), [winner], None, 0.0)
    return MatchCandidate(winner, max(best[winner], whole.score if whole else 0.0))


def match_document(index, lines, cfg=MatchConfig()):
    """One decision per subtitle line, carrying the window along the way.

    After ``cfg.recover_after`` consecutive misses the window is assumed
    lost and the next line is searched over the whole script; a hit there
    re-anchors the window. Isolated misses never move it.
    """
    state = MatchState(window_radius=cfg.window)
    decisions = []
    misses = 0
    for line in lines:
        n = len(split_sentences(line.source_text))
        hit = subquery_vote(index, line.source_text, state, cfg.threshold)
        if hit is None and cfg.recover_after and misses >= cfg.recover_after:
            hit = subquery_vote(index, line.source_text, None, cfg.threshold)
            if hit is not None:
                state.last_matched_id = hit.utterance_id
        if hit is None:
            misses += 1
            decisions.append(MatchDecision(line.line_id, None, Method.NO_MATCH))
            continue
        misses = 0
        decisions.append(MatchDecision(line.line_id, hit, Method.VOTED if n > 1 else Method.DIRECT))
        last = state.last_matched_id
        # drift guard: never let one hit drag the window far backwards
        if last is None or hit.utterance_id >= last - cfg.window:
            state.last_matched_id = hit.utterance_id
    return decisions


def match_script(script, lines, cfg=MatchConfig()):
    return match_document(build_index(script.utterances, cfg.weighting), lines, cfg)


def dump_decisions_tsv(decisions):
    out = []
    for d in decisions:
        if d.result is None:
            out.append(f"{d.line_id}\t-\t-\t{d.method.value}")
        else:
            out.append(f"{d.line_id}\t{d.result.utterance_id}\t{d.result.score!r}\t{d.method.value}")
    return "\n".join(out) + ("\n" if out else "")


def load_decisions_tsv(text):
    decisions = []
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line or line.startswith("#"):
            continue
        try:
            line_id, uid, score, method = line.split("\t")
            method = Method(method)
            result = None if uid == "-" else MatchCandidate(int(uid), float(score))
        except ValueError as exc:
            raise ParseError(str(exc), line_no) from exc
        if (result is None) != (method is Method.NO_MATCH):
            raise ParseError("NoMatch must coincide with a missing utterance id", line_no)
        decisions.append(MatchDecision(int(line_id), result, method))
    return decisions
