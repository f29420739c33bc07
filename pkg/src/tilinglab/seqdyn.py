"""Word substitutions and their subshift languages.

Languages are computed exactly.  A word of length at most m is legal when it
is a factor of some iterate of some letter, and every such word sits inside
the image of a shorter legal word, so the length-bounded factor set is the
least fixed point of "take factors of images".  Correlation sets are read off
covering words: iterates of the legal one- and two-letter words that are long
enough to contain every legal factor of the required length.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NotStabilized, SchemaError, WordNotInLanguage


class WordSubstitution:
    def __init__(self, images: dict[str, str], alphabet=None, name: str = "word", metadata=None):
        if not images:
            raise SchemaError("word substitution needs at least one symbol")
        self.alphabet = tuple(alphabet) if alphabet is not None else tuple(images)
        self.images = {a: images.get(a) for a in self.alphabet}
        self.name = name
        self.metadata = dict(metadata or {})
        for a, w in self.images.items():
            if not isinstance(a, str) or len(a) != 1:
                raise SchemaError(f"symbols must be single characters, got {a!r}")
            if not isinstance(w, str) or not w:
                raise SchemaError(f"image of {a!r} must be a nonempty word")
            bad = set(w) - set(self.alphabet)
            if bad:
                raise SchemaError(f"image of {a!r} uses symbols outside the alphabet: {sorted(bad)}")
        if set(images) - set(self.alphabet):
            raise SchemaError("images given for symbols outside the alphabet")

    kind = "word"

    def grows(self) -> bool:
        return any(len(w) > 1 for w in self.images.values())

    def apply(self, word: str) -> str:
        return "".join(self.images[c] for c in word)

    def iterate(self, word: str, n: int) -> str:
        for _ in range(n):
            word = self.apply(word)
        return word

    def reversed(self) -> "WordSubstitution":
        return WordSubstitution({a: w[::-1] for a, w in self.images.items()}, self.alphabet, self.name + "~")

    def abelianization(self) -> list[list[int]]:
        """M[b][a] = number of b in the image of a."""
        return [[self.images[a].count(b) for a in self.alphabet] for b in self.alphabet]

    def to_json(self) -> dict:
        doc = {"kind": "word", "name": self.name, "alphabet": list(self.alphabet),
               "images": {a: self.images[a] for a in self.alphabet}}
        if self.metadata:
            doc["metadata"] = self.metadata
        return doc

    def digest(self) -> str:
        text = json.dumps({k: v for k, v in self.to_json().items() if k != "metadata"},
                          sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def __repr__(self):
        return f"WordSubstitution({self.name}: " + ", ".join(f"{a}->{w}" for a, w in self.images.items()) + ")"


def word_rule_from_dict(doc: dict) -> WordSubstitution:
    if doc.get("kind") != "word":
        raise SchemaError("word rule needs kind 'word'")
    images = doc.get("images")
    if not isinstance(images, dict):
        raise SchemaError("word rule needs an 'images' object")
    return WordSubstitution(images, doc.get("alphabet"), doc.get("name", "word"), doc.get("metadata"))


def word_rule_parse(text: str) -> WordSubstitution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"rule file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("rule file must hold a JSON object")
    return word_rule_from_dict(doc)


def _factors(word: str, m: int):
    for i in range(len(word) - m + 1):
        yield word[i:i + m]


def legal_words_upto(z: WordSubstitution, m: int, max_iter: int = 10_000) -> set[str]:
    """All legal words of length 1..m (least fixed point, exact)."""
    known = set(z.alphabet)
    todo = list(known)
    rounds = 0
    while todo:
        rounds += 1
        if rounds > max_iter:
            raise NotStabilized(f"factor sets still growing after {max_iter} rounds", max_iter=max_iter)
        fresh = []
        for u in todo:
            img = z.apply(u)
            for k in range(1, min(m, len(img)) + 1):
                for w in _factors(img, k):
                    if w not in known:
                        known.add(w)
                        fresh.append(w)
        todo = fresh
    return known


def seq_language(z: WordSubstitution, m: int, max_iter: int = 10_000) -> set[str]:
    if m < 1:
        raise ValueError("word length must be at least 1")
    return {w for w in legal_words_upto(z, m, max_iter) if len(w) == m}


def seq_primitive(z: WordSubstitution) -> bool:
    k = len(z.alphabet)
    M = z.abelianization()
    base = [sum(1 << j for j in range(k) if M[i][j]) for i in range(k)]
    full = (1 << k) - 1
    # boolean powers; stop at the bound or when the sequence cycles
    cur, seen = base, set()
    for _ in range((k - 1) ** 2 + 1):
        if all(row == full for row in cur):
            return True
        key = tuple(cur)
        if key in seen:
            return False
        seen.add(key)
        cur = [_bool_row_times(row, base) for row in cur]
    return False


def _bool_row_times(row: int, mat: list[int]) -> int:
    out = 0
    j = 0
    while row:
        if row & 1:
            out |= mat[j]
        row >>= 1
        j += 1
    return out


def covering_words(z: WordSubstitution, length: int) -> list[str]:
    """Legal words whose factors include every legal word of the given length."""
    if length <= 2:
        return sorted(legal_words_upto(z, 2))
    lens = {a: 1 for a in z.alphabet}
    k = 0
    shorter = []
    # iterate until every letter's image is at least `length` long
    while min(lens.values()) < length:
        prev = dict(lens)
        lens = {a: sum(prev[c] for c in z.images[a]) for a in z.alphabet}
        k += 1
        if lens == prev or k > 4 * length + 64:
            raise NotStabilized("some letter never grows; covering words do not exist", max_iter=k)
    for n in range(k):
        shorter.extend(z.iterate(a, n) for a in z.alphabet)
    seeds = sorted(legal_words_upto(z, 2))
    return shorter + [z.iterate(u, k) for u in seeds]


def _check_word(z: WordSubstitution, w: str, words: list[str]):
    if not w or set(w) - set(z.alphabet) or not any(w in u for u in words):
        raise WordNotInLanguage(f"{w!r} is not in the language of {z.name}", word=w)


def _indicator(word: str, w: str) -> np.ndarray:
    out = np.zeros(len(word), dtype=np.int64)
    i = word.find(w)
    while i >= 0:
        out[i] = 1
        i = word.find(w, i + 1)
    return out


@dataclass
class CorrelationSet:
    w1: str
    w2: str
    N: int
    hits: frozenset
    exact: bool = True
    rule_digest: str = ""

    def sorted_hits(self) -> list[int]:
        return sorted(self.hits)

    def to_json(self) -> dict:
        return {"w1": self.w1, "w2": self.w2, "N": self.N, "hits": self.sorted_hits(), "exact": self.exact}


def correlation_set(z: WordSubstitution, w1: str, w2: str, N: int) -> CorrelationSet:
    """Offsets n in [0, N] with w1 at 0 and w2 at n inside one legal word."""
    if N < 0:
        raise ValueError("horizon must be nonnegative")
    length = max(len(w1), N + len(w2))
    words = covering_words(z, length)
    _check_word(z, w1, words)
    _check_word(z, w2, words)
    hits = np.zeros(N + 1, dtype=bool)
    for u in words:
        a, b = _indicator(u, w1), _indicator(u, w2)
        if not a.any() or not b.any():
            continue
        # c[n] = sum_i a[i] b[i+n], exact integer correlation
        c = np.correlate(b, a, mode="full")[len(a) - 1:]
        top = min(N + 1, len(c))
        hits[:top] |= c[:top] > 0
    return CorrelationSet(w1, w2, N, frozenset(int(n) for n in np.flatnonzero(hits)), True, z.digest())


def gap_density(c: CorrelationSet) -> Fraction:
    return Fraction(c.N + 1 - len(c.hits), c.N + 1)


@dataclass
class GapProfile:
    density: Fraction
    prefix: list = field(default_factory=list)      # gap density of [0, n]
    tail_max: list = field(default_factory=list)    # max over n' >= n of prefix[n']; the limsup estimator


def gap_profile(c: CorrelationSet) -> GapProfile:
    prefix, gaps = [], 0
    for n in range(c.N + 1):
        gaps += n not in c.hits
        prefix.append(Fraction(gaps, n + 1))
    tail, best = [Fraction(0)] * len(prefix), Fraction(0)
    for n in range(len(prefix) - 1, -1, -1):
        best = max(best, prefix[n])
        tail[n] = best
    return GapProfile(gap_density(c), prefix, tail)


def gap_union(z: WordSubstitution, w: str, N: int) -> frozenset:
    """Offsets missed by at least one partner word of the same length as w."""
    out = set()
    for w2 in sorted(seq_language(z, len(w))):
        c = correlation_set(z, w, w2, N)
        out.update(n for n in range(N + 1) if n not in c.hits)
    return frozenset(out)
