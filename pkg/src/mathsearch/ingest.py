"""Corpus ingestion: load JSONL sources, dedup across them, split into shards.

File formats
------------
Corpus record file: UTF-8, one JSON object per line,
    {"id": <u64>, "source": <string>, "latex": <string>}

Shard file: one header line
    {"format_version": 1, "shard_id": <int>, "n_shards": <int>, "count": <u64>}
followed by one record per line, the corpus record schema plus "tokens".
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .formulas import Formula, canonical_key, make_formula
from .shard import DuplicateId, assign_shard

log = logging.getLogger(__name__)

SHARD_FORMAT_VERSION = 1

__all__ = [
    "FileUnreadable",
    "FormatError",
    "CorruptShardFile",
    "LoadedCorpus",
    "CorpusManifest",
    "load_corpus",
    "build_union",
    "split_shards",
    "write_shard_file",
    "read_shard_file",
]


class FileUnreadable(OSError):
    """Corpus file missing or not openable."""


class FormatError(ValueError):
    """File is structurally invalid (as opposed to single bad records)."""


class CorruptShardFile(ValueError):
    """Shard file fails header or record validation."""


@dataclass
class LoadedCorpus:
    """One source after per-source dedup."""

    name: str
    path: str
    formulas: list[Formula]
    records: int  # well-formed records, before in-source dedup
    skipped: int  # malformed records (bad JSON, bad fields, bad LaTeX)
    duplicates: int  # in-source canonical-key collisions, first kept

    @property
    def count(self) -> int:
        return len(self.formulas)


@dataclass
class CorpusManifest:
    """Per-source and union counts of an ingestion run."""

    sources: list[dict] = field(default_factory=list)
    union_count: int = 0
    cross_source_duplicates: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "sources": self.sources,
                "union_count": self.union_count,
                "cross_source_duplicates": self.cross_source_duplicates,
            },
            indent=2,
        )


def _parse_record(line: str) -> tuple[int, str, str]:
    rec = json.loads(line)
    if not isinstance(rec, dict):
        raise ValueError("record is not an object")
    fid, source, latex = rec["id"], rec["source"], rec["latex"]
    if not isinstance(fid, int) or fid < 0:
        raise ValueError("id must be a non-negative integer")
    if not isinstance(source, str) or not isinstance(latex, str):
        raise ValueError("source and latex must be strings")
    return fid, source, latex


def load_corpus(path: str | Path, name: str | None = None) -> LoadedCorpus:
    """Load one corpus record file, skipping bad records, deduping by key.

    First occurrence wins on duplicate canonical keys.  Duplicate ids with
    *different* content are treated as bad records and skipped.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FileUnreadable(f"cannot read corpus file {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise FormatError(f"corpus file {path} is not UTF-8 text") from e

    formulas: list[Formula] = []
    seen_keys: set[bytes] = set()
    seen_ids: set[int] = set()
    records = skipped = duplicates = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            fid, source, latex = _parse_record(line)
            f = make_formula(fid, source, latex)
            records += 1
        except (json.JSONDecodeError, KeyError, ValueError, TypeError) as e:
            # MalformedLatex and EmptyFormula land here too: count and skip.
            skipped += 1
            log.info("skipping %s:%d: %s", path, lineno, e)
            continue
        if f.canonical_key in seen_keys:
            duplicates += 1
            continue
        if f.id in seen_ids:
            skipped += 1
            log.info("skipping %s:%d: duplicate id %d", path, lineno, f.id)
            continue
        seen_keys.add(f.canonical_key)
        seen_ids.add(f.id)
        formulas.append(f)
    return LoadedCorpus(
        name=name or path.stem,
        path=str(path),
        formulas=formulas,
        records=records,
        skipped=skipped,
        duplicates=duplicates,
    )


def build_union(corpora: Sequence[LoadedCorpus]) -> tuple[list[Formula], CorpusManifest]:
    """Union of all sources with cross-source dedup by canonical key.

    Sources are merged in the given order; the first source containing a
    formula keeps the id/source attribution.
    """
    if not corpora:
        raise ValueError("build_union requires at least one corpus")
    union: list[Formula] = []
    by_key: set[bytes] = set()
    ids: set[int] = set()
    cross_duplicates = 0
    manifest = CorpusManifest()
    for corpus in corpora:
        for f in corpus.formulas:
            if f.canonical_key in by_key:
                cross_duplicates += 1
                continue
            if f.id in ids:
                raise DuplicateId(
                    f"id {f.id} from {corpus.name} collides with an earlier source"
                )
            by_key.add(f.canonical_key)
            ids.add(f.id)
            union.append(f)
        manifest.sources.append(
            {
                "name": corpus.name,
                "path": corpus.path,
                "records": corpus.records,
                "formulas": corpus.count,
                "skipped": corpus.skipped,
                "in_source_duplicates": corpus.duplicates,
            }
        )
    manifest.union_count = len(union)
    manifest.cross_source_duplicates = cross_duplicates
    return union, manifest


def _formula_record(f: Formula) -> str:
    return json.dumps(
        {"id": f.id, "source": f.source, "latex": f.latex, "tokens": list(f.tokens)},
        ensure_ascii=False,
    )


def write_shard_file(path: str | Path, formulas: Iterable[Formula], shard_id: int, n_shards: int) -> None:
    formulas = list(formulas)
    header = {
        "format_version": SHARD_FORMAT_VERSION,
        "shard_id": shard_id,
        "n_shards": n_shards,
        "count": len(formulas),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for f in formulas:
            fh.write(_formula_record(f) + "\n")


def read_shard_file(path: str | Path) -> tuple[list[Formula], int, int]:
    """Load a shard file, returning (formulas, shard_id, n_shards).

    Canonical keys are recomputed from the stored token sequences.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise CorruptShardFile(f"cannot read shard file {path}: {e}") from e
    if not lines:
        raise CorruptShardFile(f"shard file {path} is empty")
    try:
        header = json.loads(lines[0])
        if header["format_version"] != SHARD_FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {header['format_version']}")
        shard_id, n_shards, count = header["shard_id"], header["n_shards"], header["count"]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise CorruptShardFile(f"bad shard header in {path}: {e}") from e

    formulas = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            tokens = tuple(rec["tokens"])
            if not tokens or not all(isinstance(t, str) for t in tokens):
                raise ValueError("bad token sequence")
            formulas.append(
                Formula(
                    id=rec["id"],
                    source=rec["source"],
                    latex=rec["latex"],
                    tokens=tokens,
                    canonical_key=canonical_key(tokens),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise CorruptShardFile(f"bad record at {path}:{lineno}: {e}") from e
    if len(formulas) != count:
        raise CorruptShardFile(
            f"{path}: header count {count} != {len(formulas)} records"
        )
    return formulas, shard_id, n_shards


def split_shards(union: Sequence[Formula], n_shards: int, output_dir: str | Path) -> list[Path]:
    """Write the union into N shard files; placement follows assign_shard."""
    if not 1 <= n_shards <= 16:
        raise ValueError("n_shards must be in [1, 16]")
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    buckets: list[list[Formula]] = [[] for _ in range(n_shards)]
    for f in union:
        buckets[assign_shard(f.canonical_key, n_shards)].append(f)
    paths = []
    for shard_id, bucket in enumerate(buckets):
        path = output_dir / f"shard_{shard_id:02d}.jsonl"
        write_shard_file(path, bucket, shard_id, n_shards)
        paths.append(path)
    return paths
