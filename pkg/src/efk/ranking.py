"""Shared ranking result type and dense-rank helper.

Rank 1 is best (highest score). Dense ranking: entities with equal
scores share a rank and the next distinct score gets the next integer.
Ties affect only the row order of reports (broken lexicographically by
code), never the scores themselves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .errors import MalformedRecord, EmptyInput

SCHEMA_VERSION = 1


def dense_rank(scores, descending: bool = True) -> np.ndarray:
    """Dense ranks (1 = best); equal scores receive equal ranks."""
    scores = np.asarray(scores, dtype=np.float64)
    uniq = np.unique(scores)  # ascending, deduplicated
    idx = np.searchsorted(uniq, scores)
    if descending:
        return (len(uniq) - idx).astype(np.int64)
    return (idx + 1).astype(np.int64)


@dataclass(frozen=True, eq=False)
class RankingResult:
    """Scores plus dense ranks for one entity axis of one algorithm run."""

    algorithm: str
    entities: tuple[str, ...]
    scores: np.ndarray
    ranks: np.ndarray
    metadata: dict = field(default_factory=dict)

    def rank_of(self, entity: str) -> int:
        return int(self.ranks[self.entities.index(entity)])

    def score_of(self, entity: str) -> float:
        return float(self.scores[self.entities.index(entity)])

    def rows(self) -> list[tuple[str, float, int]]:
        """(entity, score, rank) sorted by rank, ties by entity code."""
        order = sorted(
            range(len(self.entities)), key=lambda i: (self.ranks[i], self.entities[i])
        )
        return [
            (self.entities[i], float(self.scores[i]), int(self.ranks[i])) for i in order
        ]

    def to_csv_text(self) -> str:
        lines = ["entity,score,rank"]
        for entity, score, rank in self.rows():
            lines.append(f"{entity},{score!r},{rank}")
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        obj = {"schema_version": SCHEMA_VERSION, "algorithm": self.algorithm}
        obj.update(self.metadata)
        obj["entities"] = [
            {"entity": e, "score": s, "rank": r} for e, s, r in self.rows()
        ]
        return obj


def read_ranking_csv(source: str | IO, algorithm: str = "file") -> RankingResult:
    """Read the ``entity,score,rank`` CSV back into a RankingResult."""
    text = source.read() if hasattr(source, "read") else source
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "entity,score,rank":
        raise MalformedRecord("expected header 'entity,score,rank'", 1)
    entities, scores, ranks = [], [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 3:
            raise MalformedRecord(f"expected 3 columns, got {len(parts)}", lineno)
        try:
            entities.append(parts[0].strip())
            scores.append(float(parts[1]))
            ranks.append(int(parts[2]))
        except ValueError:
            raise MalformedRecord(f"bad ranking row {ln!r}", lineno) from None
    if not entities:
        raise EmptyInput("no ranking rows")
    return RankingResult(
        algorithm=algorithm,
        entities=tuple(entities),
        scores=np.array(scores),
        ranks=np.array(ranks, dtype=np.int64),
    )


def write_ranking_json(result: RankingResult, stream: IO[str]) -> None:
    json.dump(result.to_json_obj(), stream, indent=2)
    stream.write("\n")
