"""Synthetic LaTeX corpora for tests and desk-scale experiments.

Formulas are built from a small grammar of commands, variables, and
operators.  A `density` knob shrinks the vocabulary so that gram sets
collide heavily, which is what makes per-query scoring CPU-bound in the
scaling experiments.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Sequence

__all__ = [
    "random_latex",
    "random_corpus_records",
    "write_corpus_file",
    "whitespace_jitter",
    "make_query_set",
]

_COMMANDS = ["\\frac", "\\sqrt", "\\sin", "\\cos", "\\log", "\\sum", "\\int", "\\alpha", "\\beta", "\\pi"]
_VARIABLES = list("abcdefghijklmnopqrstuvwxyz")
_OPERATORS = ["+", "-", "=", "^", "_", "/", "<", ">"]


def _vocab(rng: random.Random, density: float) -> tuple[list, list, list]:
    """Shrink the alphabet as density grows; more shared grams per formula."""
    keep = lambda items, lo: items[: max(lo, int(len(items) * (1.0 - density)))]
    return keep(_COMMANDS, 2), keep(_VARIABLES, 3), keep(_OPERATORS, 2)


def random_latex(rng: random.Random, min_len: int = 3, max_len: int = 24, density: float = 0.0) -> str:
    """One random formula; always brace-balanced, never empty."""
    commands, variables, operators = _vocab(rng, density)
    parts = []
    length = rng.randint(min_len, max_len)
    while len(parts) < length:
        roll = rng.random()
        if roll < 0.2:
            parts.append(rng.choice(commands))
            parts.append("{" + rng.choice(variables) + rng.choice(operators) + rng.choice(variables) + "}")
        elif roll < 0.35:
            parts.append(str(rng.randint(0, 99)))
        elif roll < 0.6:
            parts.append(rng.choice(operators))
        else:
            parts.append(rng.choice(variables))
    return " ".join(parts)


def whitespace_jitter(rng: random.Random, latex: str) -> str:
    """Same token sequence, different spacing."""
    out = []
    for ch in latex:
        out.append(ch)
        if ch == " " and rng.random() < 0.5:
            out.append(" ")
    return ("  " if rng.random() < 0.5 else "") + "".join(out)


def random_corpus_records(
    n: int,
    seed: int,
    source: str = "synthetic",
    id_start: int = 0,
    density: float = 0.0,
    min_len: int = 3,
    max_len: int = 24,
) -> list[dict]:
    """Corpus records with distinct LaTeX strings (ids are sequential)."""
    rng = random.Random(seed)
    seen = set()
    records = []
    fid = id_start
    while len(records) < n:
        latex = random_latex(rng, min_len=min_len, max_len=max_len, density=density)
        if latex in seen:
            continue
        seen.add(latex)
        records.append({"id": fid, "source": source, "latex": latex})
        fid += 1
    return records


def write_corpus_file(path: str | Path, records: Sequence[dict]) -> Path:
    import json

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return path


def make_query_set(
    records: Sequence[dict], n: int, seed: int, miss_fraction: float = 0.1
) -> list[str]:
    """Queries drawn from corpus formulas, plus spacing variants and misses."""
    rng = random.Random(seed)
    queries = []
    for _ in range(n):
        roll = rng.random()
        if roll < miss_fraction:
            queries.append(random_latex(rng, density=0.0) + " \\Xi")
        elif roll < 0.5:
            queries.append(rng.choice(records)["latex"])
        else:
            queries.append(whitespace_jitter(rng, rng.choice(records)["latex"]))
    return queries
