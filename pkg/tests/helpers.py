"""Random-data builders and independent oracles shared across the suite.

The oracles here are deliberately written from scratch against each
operation's documented behavior (plain predicate scans, explicit comparators) so they never
share code with the implementations they check.
"""

import random
import string

from reminisce.catalog import MemoryFilter, SortDirection, SortField
from reminisce.domain import (
    EmotionValence,
    LifeStage,
    Memory,
    PartialDate,
    PreservationStatus,
)

WORDS = (
    "harbour school wedding garden workshop beach festival kitchen bicycle "
    "orchard market train lighthouse vineyard bakery church river bridge"
).split()

LOCATIONS = ["Ribeira", "Santiago", "Ferrol", "Vigo", "Lugo", None]
CATEGORY_POOL = ["family", "friends", "work", "hobbies", "pets", "travel", "music"]


def random_partial_date(rng: random.Random) -> PartialDate:
    year = rng.randint(1900, 2024)
    shape = rng.randrange(3)
    if shape == 0:
        return PartialDate(year)
    month = rng.randint(1, 12)
    if shape == 1:
        return PartialDate(year, month)
    return PartialDate(year, month, rng.randint(1, 28))


def random_memory(rng: random.Random, patient_id="p1", person_ids=()) -> Memory:
    return Memory(
        id=f"m{rng.randrange(10**9):09d}",
        patient_id=patient_id,
        description=" ".join(rng.sample(WORDS, rng.randint(1, 4))),
        location=rng.choice(LOCATIONS),
        date=random_partial_date(rng),
        life_stage=rng.choice(list(LifeStage)),
        categories=set(rng.sample(CATEGORY_POOL, rng.randint(0, 3))),
        related_person_ids=set(
            rng.sample(list(person_ids), rng.randint(0, min(2, len(person_ids))))
        )
        if person_ids
        else set(),
        preservation_status=rng.choice(list(PreservationStatus)),
        emotion_valence=rng.choice(list(EmotionValence)),
        mood_score=rng.randint(0, 10),
        media=[],
    )


def random_catalog(rng: random.Random, size: int, person_ids=("r1", "r2", "r3")):
    return [random_memory(rng, person_ids=person_ids) for _ in range(size)]


def random_filter(rng: random.Random) -> MemoryFilter:
    kwargs = {}
    if rng.random() < 0.5:
        kwargs["life_stages"] = frozenset(
            rng.sample(list(LifeStage), rng.randint(1, 3))
        )
    if rng.random() < 0.5:
        a, b = sorted((random_partial_date(rng), random_partial_date(rng)),
                      key=lambda d: d.normal_form())
        if rng.random() < 0.5:
            kwargs["date_from"] = a
        if rng.random() < 0.7:
            kwargs["date_to"] = b
    if rng.random() < 0.4:
        kwargs["categories"] = frozenset(rng.sample(CATEGORY_POOL, rng.randint(1, 2)))
    if rng.random() < 0.3:
        kwargs["location_contains"] = rng.choice(
            ["ri", "Santi", "go", "zzz", rng.choice(string.ascii_lowercase)]
        )
    if rng.random() < 0.3:
        kwargs["related_person_ids"] = frozenset(
            rng.sample(["r1", "r2", "r3", "r9"], rng.randint(1, 2))
        )
    if rng.random() < 0.3:
        kwargs["preservation_statuses"] = frozenset(
            rng.sample(list(PreservationStatus), rng.randint(1, 2))
        )
    if rng.random() < 0.3:
        kwargs["emotion_valences"] = frozenset(
            rng.sample(list(EmotionValence), rng.randint(1, 2))
        )
    return MemoryFilter(**kwargs)


# -- independent oracles ---------------------------------------------------


def oracle_matches(flt: MemoryFilter, m: Memory) -> bool:
    """Brute-force predicate written straight from the clause semantics."""
    ok = True
    if len(flt.life_stages) > 0:
        ok = ok and (m.life_stage in flt.life_stages)
    if flt.date_from is not None:
        ok = ok and (
            (m.date.year, m.date.month or 1, m.date.day or 1)
            >= (flt.date_from.year, flt.date_from.month or 1, flt.date_from.day or 1)
        )
    if flt.date_to is not None:
        ok = ok and (
            (m.date.year, m.date.month or 1, m.date.day or 1)
            <= (flt.date_to.year, flt.date_to.month or 1, flt.date_to.day or 1)
        )
    if len(flt.categories) > 0:
        ok = ok and any(c in m.categories for c in flt.categories)
    if flt.location_contains is not None:
        ok = ok and (
            m.location is not None
            and flt.location_contains.lower() in m.location.lower()
        )
    if len(flt.related_person_ids) > 0:
        ok = ok and any(r in m.related_person_ids for r in flt.related_person_ids)
    if len(flt.preservation_statuses) > 0:
        ok = ok and (m.preservation_status in flt.preservation_statuses)
    if len(flt.emotion_valences) > 0:
        ok = ok and (m.emotion_valence in flt.emotion_valences)
    return ok


def oracle_filter(flt: MemoryFilter, memories) -> list:
    """Scan + explicit date-ascending sort with id tiebreak."""
    hits = [m for m in memories if oracle_matches(flt, m)]
    hits.sort(key=lambda m: ((m.date.year, m.date.month or 1, m.date.day or 1), m.id))
    return hits


_PRES_RANK = {
    PreservationStatus.PRESERVED: 0,
    PreservationStatus.AT_RISK: 1,
    PreservationStatus.LOST: 2,
}
_EMO_RANK = {
    EmotionValence.POSITIVE: 0,
    EmotionValence.NEUTRAL: 1,
    EmotionValence.NEGATIVE: 2,
}


def oracle_sort_value(m: Memory, field: SortField):
    if field == SortField.DATE:
        return (0, (m.date.year, m.date.month or 1, m.date.day or 1))
    if field == SortField.LOCATION:
        return (1, "") if m.location is None else (0, m.location.lower())
    if field == SortField.PRESERVATION_STATUS:
        return (0, _PRES_RANK[m.preservation_status])
    if field == SortField.EMOTION_VALENCE:
        return (0, _EMO_RANK[m.emotion_valence])
    return (0, len(m.related_person_ids))


def oracle_sort(memories, field: SortField, direction: SortDirection) -> list:
    out = sorted(memories, key=lambda m: m.id)
    out.sort(
        key=lambda m: oracle_sort_value(m, field),
        reverse=direction == SortDirection.DESC,
    )
    return out
