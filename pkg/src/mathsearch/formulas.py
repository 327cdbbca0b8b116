"""LaTeX formula normalization, canonical keys, and n-gram similarity.

Everything in this module is a pure function on immutable values, so all of
it is safe to call from any number of threads without coordination.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

__all__ = [
    "EmptyFormula",
    "MalformedLatex",
    "Formula",
    "normalize",
    "canonical_key",
    "key_low64",
    "gram_set",
    "similarity",
    "make_formula",
]


class EmptyFormula(ValueError):
    """No token survives normalization."""


class MalformedLatex(ValueError):
    """Brace nesting of the input is unbalanced."""


# A token is, in order of precedence: a backslash command (longest run of
# letters), a backslash-escaped symbol (covers \, \; \! \{ \} \\ ...), a
# maximal digit run, a single letter, or any single non-space symbol.
_TOKEN_RE = re.compile(r"\\[a-zA-Z]+|\\[^a-zA-Z\s]|[0-9]+|[^\W\d_]|\S", re.UNICODE)

# Spacing and sizing commands carry no content; they are dropped outright.
_DROPPED = frozenset(
    ["\\,", "\\;", "\\!", "\\quad", "\\qquad", "\\left", "\\right", "\\displaystyle"]
)

_DIGEST_PREFIX = b"mathsearch.formula.v1\x00"


def normalize(latex: str) -> tuple[str, ...]:
    """Tokenize a raw LaTeX string into its normalized token sequence.

    Whitespace between tokens is discarded, as are pure-spacing commands.
    Raises MalformedLatex when structural braces do not balance and
    EmptyFormula when nothing survives.
    """
    tokens = []
    depth = 0
    for tok in _TOKEN_RE.findall(latex):
        if tok in _DROPPED:
            continue
        if tok == "{":
            depth += 1
        elif tok == "}":
            depth -= 1
            if depth < 0:
                raise MalformedLatex(f"unbalanced brace in {latex!r}")
        tokens.append(tok)
    if depth != 0:
        raise MalformedLatex(f"unbalanced brace in {latex!r}")
    if not tokens:
        raise EmptyFormula(f"no tokens survive normalization of {latex!r}")
    return tuple(tokens)


def canonical_key(tokens: tuple[str, ...] | list[str]) -> bytes:
    """128-bit digest of a token sequence, stable across runs and platforms.

    Tokens never contain whitespace, so the space-joined serialization is
    injective and the digest is a pure function of the sequence.
    """
    if not tokens:
        raise EmptyFormula("cannot key an empty token sequence")
    h = hashlib.blake2b(digest_size=16)
    h.update(_DIGEST_PREFIX)
    h.update(" ".join(tokens).encode("utf-8"))
    return h.digest()


def key_low64(key: bytes) -> int:
    """Low 64 bits of a canonical key, read as a big-endian integer."""
    return int.from_bytes(key, "big") & 0xFFFFFFFFFFFFFFFF


def _elide_redundant_braces(tokens: tuple[str, ...]) -> tuple[str, ...]:
    """Drop brace pairs wrapping exactly one token, until none remain.

    Makes `x^2` and `x^{2}` produce the same gram set.
    """
    toks = list(tokens)
    changed = True
    while changed:
        changed = False
        out = []
        i = 0
        n = len(toks)
        while i < n:
            if (
                i + 2 < n
                and toks[i] == "{"
                and toks[i + 2] == "}"
                and toks[i + 1] != "{"
                and toks[i + 1] != "}"
            ):
                out.append(toks[i + 1])
                i += 3
                changed = True
            else:
                out.append(toks[i])
                i += 1
        toks = out
    return tuple(toks)


def gram_set(tokens: tuple[str, ...] | list[str]) -> frozenset[tuple[str, ...]]:
    """All contiguous 1-, 2-, and 3-grams of the sequence, duplicates collapsed.

    Redundant single-token brace pairs are elided before extraction.
    """
    if not tokens:
        raise EmptyFormula("cannot extract grams from an empty token sequence")
    toks = _elide_redundant_braces(tuple(tokens))
    n = len(toks)
    grams = set()
    for i in range(n):
        grams.add((toks[i],))
    for i in range(n - 1):
        grams.add((toks[i], toks[i + 1]))
    for i in range(n - 2):
        grams.add((toks[i], toks[i + 1], toks[i + 2]))
    return frozenset(grams)


def similarity(a: frozenset, b: frozenset) -> float:
    """Jaccard coefficient |a∩b| / |a∪b| of two nonempty gram sets."""
    if not a or not b:
        raise ValueError("similarity requires nonempty gram sets")
    inter = len(a & b)
    if inter == 0:
        return 0.0
    return inter / (len(a) + len(b) - inter)


@dataclass(frozen=True, slots=True)
class Formula:
    """One indexed mathematical expression."""

    id: int
    source: str
    latex: str
    tokens: tuple[str, ...]
    canonical_key: bytes


def make_formula(id: int, source: str, latex: str) -> Formula:
    """Build a Formula from a raw record, normalizing its LaTeX."""
    tokens = normalize(latex)
    return Formula(
        id=id,
        source=source,
        latex=latex,
        tokens=tokens,
        canonical_key=canonical_key(tokens),
    )
