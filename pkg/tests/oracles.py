"""Brute-force reference implementations used to cross-check the package.

These deliberately avoid the package's data structures: vectors are dense
lists over an explicit vocabulary and every quantity is recomputed from the
raw documents each time it is needed.
"""

import math
from collections import Counter

EPS = 1e-12


def dense_tf(term, doc):
    n = 0
    for t in doc:
        if t == term:
            n += 1
    return n


def dense_idf(term, docs):
    df = sum(1 for d in docs if term in d)
    return math.log(len(docs) / df) if df else 0.0


def dense_vector(doc, docs, vocab, boolean=False):
    out = []
    for term in vocab:
        if boolean:
            out.append(1.0 if term in doc and any(term in d for d in docs) else 0.0)
        else:
            out.append(dense_tf(term, doc) * dense_idf(term, docs))
    return out


def dense_cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0 or nb == 0:
        return 0.0
    return min(1.0, max(0.0, dot / (na * nb)))


def sparse_to_dense(vec, vocab):
    return [vec.get(t, 0.0) for t in vocab]


def oracle_scores(docs, query, boolean=False, last=None, radius=None, scale=None):
    """Score every eligible document; ``docs`` is a list indexed by id."""
    vocab = sorted(set(query) | {t for d in docs for t in d})
    q = dense_vector(query, docs, vocab, boolean)
    if scale is not None:
        q = [w * scale.get(t, 1.0) for w, t in zip(q, vocab)]
    scores = {}
    for doc_id, doc in enumerate(docs):
        if not set(doc) & set(query):
            continue
        if last is not None and abs(doc_id - last) > radius:
            continue
        scores[doc_id] = dense_cosine(q, dense_vector(doc, docs, vocab, boolean))
    return scores


def oracle_search(docs, query, threshold, boolean=False, last=None, radius=None, scale=None):
    scores = oracle_scores(docs, query, boolean, last, radius, scale)
    if not scores:
        return None
    best = max(scores.values())
    tied = sorted(i for i, s in scores.items() if s >= best - EPS)
    if last is None:
        winner = tied[0]
    else:
        winner = sorted(tied, key=lambda i: (abs(i - (last + 1)), i))[0]
    if scores[winner] < threshold:
        return None
    return winner, scores[winner]


def oracle_ngram_prob(sentences, vocab, order, k, term, history):
    """Add-k probability with longest-seen-context backoff, by direct counting."""
    padded = []
    for s in sentences:
        padded.append(["<s>"] * (order - 1) + [t if t in vocab else "<unk>" for t in s] + ["</s>"])
    history = ["<s>"] * (order - 1) + [t if t in vocab else "<unk>" for t in history]
    term = term if term in vocab else "<unk>"
    for n in range(order - 1, -1, -1):
        ctx = tuple(history[len(history) - n:]) if n else ()
        follow = Counter()
        for p in padded:
            for i in range(order - 1, len(p)):
                if tuple(p[i - n:i]) == ctx:
                    follow[p[i]] += 1
        total = sum(follow.values())
        if total or n == 0:
            return (follow[term] + k) / (total + k * len(vocab))
    raise AssertionError("unreachable")


def oracle_agreement(auto, gold):
    """Percentages by direct enumeration over the gold ids."""
    if not gold:
        return 0.0, 0.0
    sp = sum(1 for i, (s, _) in gold.items()
             if auto[i][0] != "UNKNOWN" and auto[i][0].lower() == s.lower())
    bd = sum(1 for i, (_, b) in gold.items() if auto[i][1] == b)
    return 100.0 * sp / len(gold), 100.0 * bd / len(gold)
