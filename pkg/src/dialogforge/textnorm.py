"""Text normalization shared by the fuzzy NLU, the intent model and the
paraphrase filters.

Tokenization is deliberately aggressive: lowercase, *delete* punctuation
characters (so "e-mail" and "email" collapse to the same token) and split
on whitespace. Candidate messages coming out of the parser may contain the
wildcard token ``*`` standing in for a stripped ``{placeholder}`` span;
``tokenize_candidate`` preserves it while plain message tokenization drops
any literal punctuation, ``*`` included.
"""

from __future__ import annotations

import re

WILDCARD = "*"

_PUNCT = re.compile(r"[^\w\s]|_")
_WS = re.compile(r"\s+")


def normalize_space(text: str) -> str:
    """Lowercase and collapse runs of whitespace."""
    return _WS.sub(" ", text.strip().lower())


def tokenize(text: str) -> list[str]:
    """Tokens of a plain message: punctuation deleted, lowercased."""
    return _PUNCT.sub("", text.lower()).split()


def tokenize_candidate(text: str) -> tuple[frozenset[str], int]:
    """Tokens of a stored dialog-act candidate.

    Returns the set of word tokens plus the number of wildcard tokens.
    """
    words = []
    wildcards = 0
    for raw in text.lower().split():
        if raw == WILDCARD:
            wildcards += 1
            continue
        cleaned = _PUNCT.sub("", raw)
        if cleaned:
            words.append(cleaned)
    return frozenset(words), wildcards
