"""Query layer over memories and related persons: filter, sort, search.

All functions are read-only over snapshots handed in by the caller; clause
semantics are conjunctive across fields and disjunctive within set fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .domain import (
    EmotionValence,
    LifeStage,
    Memory,
    PartialDate,
    PreservationStatus,
    RelatedPerson,
)
from .errors import EMPTY_QUERY, INVALID_FILTER, DomainError


@dataclass(frozen=True)
class MemoryFilter:
    """Empty set / None clauses match everything; set clauses match on
    non-empty intersection; date bounds are inclusive on normal form."""

    life_stages: frozenset[LifeStage] = frozenset()
    date_from: PartialDate | None = None
    date_to: PartialDate | None = None
    categories: frozenset[str] = frozenset()
    location_contains: str | None = None
    related_person_ids: frozenset[str] = frozenset()
    preservation_statuses: frozenset[PreservationStatus] = frozenset()
    emotion_valences: frozenset[EmotionValence] = frozenset()

    def validate(self) -> None:
        if (
            self.date_from is not None
            and self.date_to is not None
            and self.date_from.normal_form() > self.date_to.normal_form()
        ):
            raise DomainError(
                INVALID_FILTER,
                f"date_from {self.date_from} after date_to {self.date_to}",
            )

    def matches(self, memory: Memory) -> bool:
        if self.life_stages and memory.life_stage not in self.life_stages:
            return False
        if self.date_from is not None and memory.date < self.date_from:
            return False
        if self.date_to is not None and self.date_to < memory.date:
            return False
        if self.categories and not (self.categories & memory.categories):
            return False
        if self.location_contains is not None:
            if memory.location is None:
                return False
            if self.location_contains.lower() not in memory.location.lower():
                return False
        if self.related_person_ids and not (
            self.related_person_ids & memory.related_person_ids
        ):
            return False
        if (
            self.preservation_statuses
            and memory.preservation_status not in self.preservation_statuses
        ):
            return False
        if self.emotion_valences and memory.emotion_valence not in self.emotion_valences:
            return False
        return True


class SortField(Enum):
    DATE = "date"
    LOCATION = "location"
    PRESERVATION_STATUS = "preservation_status"
    EMOTION_VALENCE = "emotion_valence"
    RELATED_PERSON_COUNT = "related_person_count"


class SortDirection(Enum):
    ASC = "asc"
    DESC = "desc"


@dataclass(frozen=True)
class SortKey:
    field: SortField = SortField.DATE
    direction: SortDirection = SortDirection.ASC


_PRESERVATION_ORDER = {s: i for i, s in enumerate(PreservationStatus)}
_EMOTION_ORDER = {v: i for i, v in enumerate(EmotionValence)}


def _sort_value(memory: Memory, key: SortField):
    if key is SortField.DATE:
        return memory.date.normal_form()
    if key is SortField.LOCATION:
        # missing location sorts after any present one under ascending order
        if memory.location is None:
            return (1, "")
        return (0, memory.location.lower())
    if key is SortField.PRESERVATION_STATUS:
        return _PRESERVATION_ORDER[memory.preservation_status]
    if key is SortField.EMOTION_VALENCE:
        return _EMOTION_ORDER[memory.emotion_valence]
    return len(memory.related_person_ids)


def sort_memories(memories: list[Memory], key: SortKey | None = None) -> list[Memory]:
    """Stable sort by key then memory id ascending; never mutates input."""
    key = key or SortKey()
    # Tie-break by id ascending regardless of direction: pre-sort by id,
    # then stable-sort on the field value.
    ordered = sorted(memories, key=lambda m: m.id)
    ordered.sort(
        key=lambda m: _sort_value(m, key.field),
        reverse=key.direction is SortDirection.DESC,
    )
    return ordered


def filter_memories(
    memories: list[Memory], flt: MemoryFilter | None = None
) -> list[Memory]:
    """All memories matching every present clause, date-ascending by default."""
    flt = flt or MemoryFilter()
    flt.validate()
    hits = [m for m in memories if flt.matches(m)]
    return sort_memories(hits, SortKey(SortField.DATE, SortDirection.ASC))


def search_memories(memories: list[Memory], query: str) -> list[Memory]:
    """Case-insensitive substring match over description, location, and tags."""
    needle = query.strip().lower()
    if not needle:
        raise DomainError(EMPTY_QUERY, "search query is empty")
    hits = []
    for m in memories:
        haystacks = [m.description.lower()]
        if m.location:
            haystacks.append(m.location.lower())
        haystacks.extend(m.categories)
        if any(needle in h for h in haystacks):
            hits.append(m)
    return sort_memories(hits, SortKey(SortField.DATE, SortDirection.ASC))


class RelatedPersonSort(Enum):
    RELATIONSHIP_TYPE = "relationship_type"
    NAME = "name"


def list_related_persons(
    persons: list[RelatedPerson],
    sort: RelatedPersonSort = RelatedPersonSort.NAME,
) -> list[RelatedPerson]:
    """Sorted case-insensitively by the requested key, tie-broken by id."""
    if sort is RelatedPersonSort.RELATIONSHIP_TYPE:
        return sorted(persons, key=lambda p: (p.relationship_type.lower(), p.id))
    return sorted(persons, key=lambda p: (p.display_name.lower(), p.id))
