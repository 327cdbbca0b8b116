"""Immutable inverted index over one shard's formulas, with top-k queries.

The index maps every 1/2/3-gram to the sorted ids of the formulas that
contain it.  Candidate generation for a query is the union of the postings
lists of the query's grams, which makes retrieval exact: any formula sharing
at least one gram is scored, and only positive scores are returned.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .formulas import Formula, gram_set, key_low64

__all__ = [
    "WrongShard",
    "DuplicateId",
    "RankedHit",
    "ShardIndex",
    "assign_shard",
    "build_index",
    "query_topk",
]


class WrongShard(ValueError):
    """A formula's canonical key does not map to this shard."""


class DuplicateId(ValueError):
    """Two formulas with the same id reached one index."""


def assign_shard(canonical_key: bytes, n_shards: int) -> int:
    """Shard id for a canonical key: its low 64 bits modulo n_shards."""
    if n_shards < 1:
        raise ValueError("n_shards must be >= 1")
    return key_low64(canonical_key) % n_shards


@dataclass(frozen=True, slots=True)
class RankedHit:
    formula_id: int
    score: float


@dataclass(frozen=True)
class ShardIndex:
    shard_id: int
    n_shards: int
    formulas: dict[int, Formula]
    postings: dict[tuple[str, ...], tuple[int, ...]]
    gram_counts: dict[int, int]

    def __len__(self) -> int:
        return len(self.formulas)


def build_index(formulas: Iterable[Formula], shard_id: int, n_shards: int) -> ShardIndex:
    """Single pass over a deduplicated formula stream into a ShardIndex.

    Verifies that every formula belongs to this shard and that ids are
    unique; postings lists come out sorted by formula id.
    """
    store: dict[int, Formula] = {}
    postings: dict[tuple[str, ...], list[int]] = {}
    gram_counts: dict[int, int] = {}
    for f in formulas:
        if assign_shard(f.canonical_key, n_shards) != shard_id:
            raise WrongShard(f"formula {f.id} does not belong to shard {shard_id}")
        if f.id in store:
            raise DuplicateId(f"formula id {f.id} already indexed")
        store[f.id] = f
        grams = gram_set(f.tokens)
        gram_counts[f.id] = len(grams)
        for g in grams:
            postings.setdefault(g, []).append(f.id)
    frozen = {g: tuple(sorted(ids)) for g, ids in postings.items()}
    return ShardIndex(
        shard_id=shard_id,
        n_shards=n_shards,
        formulas=store,
        postings=frozen,
        gram_counts=gram_counts,
    )


def query_topk(index: ShardIndex, query_grams: frozenset, k: int) -> list[RankedHit]:
    """The k most similar formulas in the shard, (score desc, id asc).

    Formulas sharing no gram with the query score zero and are never
    returned, so the result may be shorter than k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not query_grams:
        raise ValueError("query gram set must be nonempty")
    overlap: Counter[int] = Counter()
    postings = index.postings
    for g in query_grams:
        ids = postings.get(g)
        if ids:
            overlap.update(ids)
    if not overlap:
        return []
    nq = len(query_grams)
    gram_counts = index.gram_counts
    scored = (
        (fid, inter / (nq + gram_counts[fid] - inter)) for fid, inter in overlap.items()
    )
    top = heapq.nsmallest(k, scored, key=lambda hit: (-hit[1], hit[0]))
    return [RankedHit(formula_id=fid, score=score) for fid, score in top]
