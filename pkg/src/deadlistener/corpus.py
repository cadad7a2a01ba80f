"""Occurrence aggregation and the count queries the classifier consumes.

A :class:`CountsIndex` groups listener-registration pairs by the root
package of the access path and keeps three tallies per package: the pair
count ``k`` for each (path, event), the per-path total across all events,
and the per-event total across all paths. All counts are raw occurrence
counts (no per-project deduplication). Per-pair project sets are kept when
aggregating from occurrence records; they are dropped by the CSV format.

Stable interchange formats:

* occurrences: JSON Lines, one object per line with keys
  ``path``, ``event``, ``pkg``, ``project``, ``file``, ``line``;
* aggregated index: CSV with header ``pkg,path,event,count``, UTF-8,
  LF line endings, paths in canonical serialization, rows sorted.
"""

from __future__ import annotations

import csv
import io
import json
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .miner import PairOccurrence
from .paths import AccessPath, parse_path, serialize_path

CSV_HEADER = ["pkg", "path", "event", "count"]


class MissingPair(KeyError):
    def __init__(self, pkg: str, path: AccessPath, event: str):
        super().__init__(f"pair not in index: {pkg} {serialize_path(path)} {event}")


@dataclass(frozen=True)
class EventKey:
    root_package: str
    event_name: str


@dataclass(frozen=True)
class PairStats:
    """Count statistics for one pair, all scoped to its root package."""

    count: int  # occurrences of the pair itself
    path_total: int  # occurrences involving the path, any event
    event_total: int  # occurrences involving the event, any path
    cumulative_path_count: int  # occurrences of paths co-occurring with the
    # event no more often than this one, this pair included
    cumulative_event_count: int  # symmetric, over events for the path


class CountsIndex:
    """Immutable-by-convention aggregate of pair occurrence counts."""

    def __init__(self) -> None:
        self._pairs: dict[str, dict[tuple[AccessPath, str], int]] = {}
        self._path_totals: dict[str, dict[AccessPath, int]] = {}
        self._event_totals: dict[str, dict[str, int]] = {}
        self._projects: dict[str, dict[tuple[AccessPath, str], frozenset[str]]] | None = {}

    # -- construction

    def _add(self, pkg: str, path: AccessPath, event: str, count: int, projects: frozenset[str] | None) -> None:
        pairs = self._pairs.setdefault(pkg, {})
        key = (path, event)
        pairs[key] = pairs.get(key, 0) + count
        totals = self._path_totals.setdefault(pkg, {})
        totals[path] = totals.get(path, 0) + count
        events = self._event_totals.setdefault(pkg, {})
        events[event] = events.get(event, 0) + count
        if projects is None:
            self._projects = None
        elif self._projects is not None:
            bucket = self._projects.setdefault(pkg, {})
            bucket[key] = bucket.get(key, frozenset()) | projects

    def merge(self, other: "CountsIndex") -> "CountsIndex":
        merged = CountsIndex()
        for source in (self, other):
            for pkg, pairs in source._pairs.items():
                for (path, event), count in pairs.items():
                    merged._add(pkg, path, event, count, source._pair_projects(pkg, path, event))
        return merged

    def _pair_projects(self, pkg: str, path: AccessPath, event: str) -> frozenset[str] | None:
        if self._projects is None:
            return None
        return self._projects.get(pkg, {}).get((path, event), frozenset())

    # -- queries

    def packages(self) -> list[str]:
        return sorted(self._pairs)

    def pairs(self, pkg: str) -> list[tuple[AccessPath, str]]:
        return sorted(self._pairs.get(pkg, {}), key=lambda k: (serialize_path(k[0]), k[1]))

    def has_pair(self, pkg: str, path: AccessPath, event: str) -> bool:
        return (path, event) in self._pairs.get(pkg, {})

    def count(self, pkg: str, path: AccessPath, event: str) -> int:
        try:
            return self._pairs[pkg][(path, event)]
        except KeyError:
            raise MissingPair(pkg, path, event) from None

    def path_total(self, pkg: str, path: AccessPath) -> int:
        return self._path_totals.get(pkg, {}).get(path, 0)

    def event_total(self, pkg: str, event: str) -> int:
        return self._event_totals.get(pkg, {}).get(event, 0)

    def project_count(self, pkg: str, path: AccessPath, event: str) -> int | None:
        projects = self._pair_projects(pkg, path, event)
        return None if projects is None else len(projects)

    def projects_of(self, pkg: str, path: AccessPath, event: str) -> frozenset[str] | None:
        return self._pair_projects(pkg, path, event)

    def has_project_data(self) -> bool:
        return self._projects is not None

    def total_occurrences(self) -> int:
        return sum(sum(pairs.values()) for pairs in self._pairs.values())

    def unique_pair_count(self) -> int:
        return sum(len(pairs) for pairs in self._pairs.values())

    def summary(self) -> dict:
        return {
            "packages": len(self._pairs),
            "unique_pairs": self.unique_pair_count(),
            "total_occurrences": self.total_occurrences(),
        }

    def stats_for(self, pkg: str, path: AccessPath, event: str) -> PairStats:
        count = self.count(pkg, path, event)
        return PairStats(
            count=count,
            path_total=self.path_total(pkg, path),
            event_total=self.event_total(pkg, event),
            cumulative_path_count=cumulative_count_for_path(self, path, event),
            cumulative_event_count=cumulative_count_for_event(self, path, event),
        )

    def pair_statistics(self) -> Iterator[tuple[str, AccessPath, str, PairStats]]:
        """Bulk statistics for every pair, computed in one pass per package."""
        for pkg in self.packages():
            pairs = self._pairs[pkg]
            by_event: dict[str, list[int]] = {}
            by_path: dict[AccessPath, list[int]] = {}
            for (path, event), count in pairs.items():
                by_event.setdefault(event, []).append(count)
                by_path.setdefault(path, []).append(count)
            event_cum = {e: _prefix_sums(c) for e, c in by_event.items()}
            path_cum = {p: _prefix_sums(c) for p, c in by_path.items()}
            for path, event in self.pairs(pkg):
                count = pairs[(path, event)]
                yield (
                    pkg,
                    path,
                    event,
                    PairStats(
                        count=count,
                        path_total=self._path_totals[pkg][path],
                        event_total=self._event_totals[pkg][event],
                        cumulative_path_count=_cumulative(event_cum[event], count),
                        cumulative_event_count=_cumulative(path_cum[path], count),
                    ),
                )

    # -- equality (used by determinism checks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CountsIndex):
            return NotImplemented
        return self._pairs == other._pairs and self._projects == other._projects

    def __repr__(self) -> str:
        return f"CountsIndex(packages={len(self._pairs)}, pairs={self.unique_pair_count()})"


def _prefix_sums(counts: list[int]) -> tuple[list[int], list[int]]:
    ordered = sorted(counts)
    sums = []
    acc = 0
    for value in ordered:
        acc += value
        sums.append(acc)
    return ordered, sums


def _cumulative(prepared: tuple[list[int], list[int]], count: int) -> int:
    ordered, sums = prepared
    idx = bisect_right(ordered, count)
    return sums[idx - 1] if idx else 0


def aggregate(occurrences: Iterable[PairOccurrence]) -> CountsIndex:
    """Order-independent aggregation of an occurrence stream."""
    index = CountsIndex()
    for occ in occurrences:
        index._add(occ.root_package, occ.path, occ.event, 1, frozenset({occ.project_id}))
    return index


def cumulative_count_for_path(index: CountsIndex, path: AccessPath, event: str) -> int:
    """Total occurrences of paths seen with ``event`` no more often than
    ``path`` is, the pair itself included; ties all count."""
    pkg = path.root_package
    own = index.count(pkg, path, event)
    total = 0
    for (other_path, other_event), count in index._pairs[pkg].items():
        if other_event == event and 0 < count <= own:
            total += count
    return total


def cumulative_count_for_event(index: CountsIndex, path: AccessPath, event: str) -> int:
    """Symmetric form: over events co-occurring with ``path``."""
    pkg = path.root_package
    own = index.count(pkg, path, event)
    total = 0
    for (other_path, other_event), count in index._pairs[pkg].items():
        if other_path == path and 0 < count <= own:
            total += count
    return total


# ---------------------------------------------------------------------------
# Occurrence JSONL


def occurrence_to_json(occ: PairOccurrence) -> str:
    record = {
        "path": serialize_path(occ.path),
        "event": occ.event,
        "pkg": occ.root_package,
        "project": occ.project_id,
        "file": occ.file,
        "line": occ.line,
    }
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def occurrence_from_json(line: str) -> PairOccurrence:
    record = json.loads(line)
    path = parse_path(record["path"])
    return PairOccurrence(
        path=path,
        event=record["event"],
        root_package=record["pkg"],
        project_id=record["project"],
        file=record["file"],
        line=int(record["line"]),
    )


def write_occurrences(target: str | Path, occurrences: Iterable[PairOccurrence]) -> int:
    count = 0
    with open(target, "w", encoding="utf-8", newline="\n") as handle:
        for occ in occurrences:
            handle.write(occurrence_to_json(occ))
            handle.write("\n")
            count += 1
    return count


def read_occurrences(source: str | Path) -> list[PairOccurrence]:
    out = []
    with open(source, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                out.append(occurrence_from_json(line))
    return out


# ---------------------------------------------------------------------------
# Aggregated-index CSV


def index_to_csv_text(index: CountsIndex) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for pkg in index.packages():
        for path, event in index.pairs(pkg):
            writer.writerow([pkg, serialize_path(path), event, index.count(pkg, path, event)])
    return buffer.getvalue()


def write_index_csv(target: str | Path, index: CountsIndex) -> None:
    Path(target).write_text(index_to_csv_text(index), encoding="utf-8", newline="\n")


def read_index_csv(source: str | Path) -> CountsIndex:
    index = CountsIndex()
    with open(source, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"bad index header {header!r}, expected {CSV_HEADER!r}")
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"row {row_number}: expected 4 columns, got {len(row)}")
            pkg, path_text, event, count_text = row
            path = parse_path(path_text)
            count = int(count_text)
            if count <= 0:
                raise ValueError(f"row {row_number}: non-positive count {count}")
            index._add(pkg, path, event, count, None)
    return index


def load_counts(source: str | Path) -> CountsIndex:
    """Load either occurrence JSONL or aggregated CSV, by content sniffing."""
    path = Path(source)
    suffix = path.suffix.lower()
    if suffix == ".jsonl":
        return aggregate(read_occurrences(path))
    if suffix == ".csv":
        return read_index_csv(path)
    with open(path, "r", encoding="utf-8") as handle:
        first = handle.readline().strip()
    if first.startswith("{"):
        return aggregate(read_occurrences(path))
    return read_index_csv(path)
