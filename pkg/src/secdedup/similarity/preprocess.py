"""Shared tokenization for the lexical engines.

Deliberately minimal: lowercase, split on non-alphanumeric runs, drop stop
words and single characters. No stemming, so reproduction gaps stay easy to
diagnose.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from ..corpus import CorpusDocument

_TOKEN_RUN = re.compile(r"[0-9a-z]+")

# Standard minimal English stop list; security jargon never collides with it.
STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because
    been before being below between both but by can could did do does doing
    down during each few for from further had has have having he her here hers
    him his how i if in into is it its itself just me more most my no nor not
    now of off on once only or other our ours out over own same she should so
    some such than that the their theirs them then there these they this those
    through to too under until up very was we were what when where which while
    who whom why will with would you your yours
    """.split()
)


@dataclass(frozen=True)
class TokenizedDoc:
    doc_id: int
    tokens: tuple[str, ...]


def tokenize(doc: CorpusDocument, stoplist: frozenset[str] = STOPWORDS) -> TokenizedDoc:
    """Lowercase, split on non-alphanumeric runs, drop stop/single-char tokens."""
    tokens = tuple(
        t
        for t in _TOKEN_RUN.findall(doc.text.lower())
        if len(t) > 1 and t not in stoplist
    )
    return TokenizedDoc(doc_id=doc.doc_id, tokens=tokens)


def tokenize_corpus(
    documents: Iterable[CorpusDocument], stoplist: frozenset[str] = STOPWORDS
) -> list[TokenizedDoc]:
    return [tokenize(doc, stoplist) for doc in documents]


def document_frequencies(corpus: list[TokenizedDoc]) -> Counter[str]:
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(doc.tokens))
    return df


def idf_weights(corpus: list[TokenizedDoc]) -> dict[str, float]:
    """idf(t) = ln(n / df(t)); terms present in every document weigh 0."""
    n = len(corpus)
    return {term: math.log(n / df) for term, df in document_frequencies(corpus).items()}
