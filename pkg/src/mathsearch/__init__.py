"""Distributed mathematical-formula search at desk scale.

Subsystems: LaTeX normalization and n-gram similarity (`formulas`), the
per-shard inverted index (`shard`), corpus ingestion and shard files
(`ingest`), the worker/coordinator cluster tier (`worker`, `coordinator`,
`wire`), and the fleet-enumeration plus timing harness (`fleet`, `stats`,
`bench`).
"""

__version__ = "0.1.0"
