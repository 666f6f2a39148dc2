"""Life-story generation: story entry selection, book layout, storyboard.

Both renderings are pure functions of the selected entries and the clock
value the caller passes in, so repeated composition is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

from .catalog import MemoryFilter, filter_memories
from .domain import (
    LifeStage,
    MediaAsset,
    Memory,
    PartialDate,
    Patient,
    RelatedPerson,
)

DEFAULT_SLIDE_SECONDS = 5.0


def life_story_query(
    life_stages: frozenset[LifeStage] = frozenset(),
    date_from: PartialDate | None = None,
    date_to: PartialDate | None = None,
    categories: frozenset[str] = frozenset(),
) -> MemoryFilter:
    """The book/storyboard query: the catalog filter restricted to the
    stage / date-interval / category axes."""
    return MemoryFilter(
        life_stages=life_stages,
        date_from=date_from,
        date_to=date_to,
        categories=categories,
    )


@dataclass(frozen=True)
class StoryEntry:
    memory_id: str
    date: PartialDate
    life_stage: LifeStage
    caption: str
    location: str | None
    visual_media: tuple[str, ...]  # MediaAsset ids, photos/images only
    av_media: tuple[str, ...]  # MediaAsset ids, audio/video
    related_person_names: tuple[str, ...]


def select_story_entries(
    memories: list[Memory],
    query: MemoryFilter,
    media_by_id: dict[str, MediaAsset],
    persons_by_id: dict[str, RelatedPerson],
) -> list[StoryEntry]:
    """Filtered memories as story entries, ordered by (life stage, date, id)."""
    selected = filter_memories(memories, query)
    selected.sort(key=lambda m: (m.life_stage.order, m.date.normal_form(), m.id))
    entries = []
    for m in selected:
        visual, av = [], []
        for mid in m.media:
            asset = media_by_id.get(mid)
            if asset is None:
                continue
            (visual if asset.kind.is_visual else av).append(mid)
        names = sorted(
            persons_by_id[rid].display_name
            for rid in m.related_person_ids
            if rid in persons_by_id
        )
        entries.append(
            StoryEntry(
                memory_id=m.id,
                date=m.date,
                life_stage=m.life_stage,
                caption=m.description,
                location=m.location,
                visual_media=tuple(visual),
                av_media=tuple(av),
                related_person_names=tuple(names),
            )
        )
    return entries


@dataclass(frozen=True)
class TitlePage:
    patient_name: str
    generated_at: datetime
    query_summary: str


@dataclass(frozen=True)
class BookLayout:
    title_page: TitlePage
    chapters: tuple[tuple[LifeStage, tuple[StoryEntry, ...]], ...]
    entry_count: int


def describe_query(query: MemoryFilter) -> str:
    parts = []
    if query.life_stages:
        stages = sorted(query.life_stages, key=lambda s: s.order)
        parts.append("stages: " + ", ".join(s.label for s in stages))
    if query.date_from or query.date_to:
        lo = str(query.date_from) if query.date_from else "..."
        hi = str(query.date_to) if query.date_to else "..."
        parts.append(f"dates: {lo} to {hi}")
    if query.categories:
        parts.append("categories: " + ", ".join(sorted(query.categories)))
    return "; ".join(parts) if parts else "all memories"


@dataclass(frozen=True)
class BookOptions:
    include_av_placeholders: bool = True


def compose_book(
    patient: Patient,
    entries: list[StoryEntry],
    *,
    generated_at: datetime,
    query_summary: str = "all memories",
    options: BookOptions = BookOptions(),
) -> BookLayout:
    """Chapters in life-stage order, date-ascending within; empty chapters
    omitted.  ``options.include_av_placeholders`` only affects rendering
    downstream; the layout always carries av ids."""
    chapters = []
    for stage in LifeStage:
        stage_entries = tuple(e for e in entries if e.life_stage is stage)
        if stage_entries:
            ordered = tuple(
                sorted(stage_entries, key=lambda e: (e.date.normal_form(), e.memory_id))
            )
            chapters.append((stage, ordered))
    return BookLayout(
        title_page=TitlePage(
            patient_name=patient.display_name,
            generated_at=generated_at,
            query_summary=query_summary,
        ),
        chapters=tuple(chapters),
        entry_count=sum(len(es) for _, es in chapters),
    )


class SlideKind(Enum):
    TITLE_CARD = "title_card"
    MEMORY_CARD = "memory_card"
    MEDIA_SLIDE = "media_slide"


@dataclass(frozen=True)
class Slide:
    kind: SlideKind
    caption: str
    media_ref: str | None = None  # content hash of the asset
    duration_seconds: float = DEFAULT_SLIDE_SECONDS


@dataclass(frozen=True)
class StoryboardManifest:
    slides: tuple[Slide, ...]
    audio_track_refs: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "slides": [
                {
                    "kind": s.kind.value,
                    "caption": s.caption,
                    **({"media_ref": s.media_ref} if s.media_ref else {}),
                    "duration_seconds": s.duration_seconds,
                }
                for s in self.slides
            ],
            "audio_track_refs": list(self.audio_track_refs),
        }


@dataclass(frozen=True)
class StoryboardOptions:
    slide_seconds: float = DEFAULT_SLIDE_SECONDS


def compose_storyboard(
    patient: Patient,
    entries: list[StoryEntry],
    media_by_id: dict[str, MediaAsset],
    *,
    query_summary: str = "all memories",
    options: StoryboardOptions = StoryboardOptions(),
) -> StoryboardManifest:
    """Title card, then per entry one memory card plus one media slide per
    visual asset; audio assets are collected into the audio track list.
    Slide count is therefore 1 + sum over entries of (1 + #visuals)."""
    if options.slide_seconds <= 0:
        raise ValueError("slide duration must be positive")
    slides = [
        Slide(
            kind=SlideKind.TITLE_CARD,
            caption=f"{patient.display_name} - Life Story ({query_summary})",
            duration_seconds=options.slide_seconds,
        )
    ]
    audio_refs: list[str] = []
    for entry in entries:
        caption = entry.caption
        if entry.location:
            caption = f"{caption} ({entry.location}, {entry.date})"
        else:
            caption = f"{caption} ({entry.date})"
        slides.append(
            Slide(
                kind=SlideKind.MEMORY_CARD,
                caption=caption,
                duration_seconds=options.slide_seconds,
            )
        )
        for mid in entry.visual_media:
            asset = media_by_id[mid]
            slides.append(
                Slide(
                    kind=SlideKind.MEDIA_SLIDE,
                    caption=asset.description or entry.caption,
                    media_ref=asset.content_hash,
                    duration_seconds=options.slide_seconds,
                )
            )
        for mid in entry.av_media:
            asset = media_by_id[mid]
            if asset.kind.value == "audio":
                audio_refs.append(asset.content_hash)
    return StoryboardManifest(slides=tuple(slides), audio_track_refs=tuple(audio_refs))
