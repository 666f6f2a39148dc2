// Wire shapes of the JSON API. Field names mirror the server exactly;
// everything here is read from responses, never invented client-side.

export interface PartialDate {
    year: number;
    month?: number;
    day?: number;
}

export type LifeStage =
    | 'childhood'
    | 'adolescence'
    | 'young_adult'
    | 'adult'
    | 'older_adult';

export const LIFE_STAGE_ORDER: LifeStage[] = [
    'childhood',
    'adolescence',
    'young_adult',
    'adult',
    'older_adult',
];

export type PreservationStatus = 'preserved' | 'at_risk' | 'lost';
export type EmotionValence = 'positive' | 'neutral' | 'negative';
export type SessionStatus = 'planned' | 'in_progress' | 'completed' | 'cancelled';

export interface Memory {
    id: string;
    patient_id: string;
    description: string;
    date: PartialDate;
    life_stage: LifeStage;
    preservation_status: PreservationStatus;
    emotion_valence: EmotionValence;
    mood_score: number;
    location?: string | null;
    categories: string[];
    related_person_ids: string[];
    media: string[];
    record_version: number;
}

export interface MediaAsset {
    id: string;
    kind: 'photo' | 'image' | 'audio' | 'video';
    content_hash: string;
    media_type_label: string;
    byte_length: number;
    description?: string | null;
}

export interface AmendmentEntry {
    memory_id: string;
    summary: string;
    at: string;
}

export interface Session {
    id: string;
    patient_id: string;
    scheduled_at: string;
    status: SessionStatus;
    objectives: string;
    description: string;
    barriers?: string | null;
    facilitators?: string | null;
    session_location?: string | null;
    activity_sequence: string[];
    planned_memory_ids: string[];
    planned_media_ids: string[];
    amendment_log: AmendmentEntry[];
    record_version: number;
}

export interface Patient {
    id: string;
    display_name: string;
    file_number?: string | null;
    record_version: number;
}

export interface EvolutionPoint {
    assessed_at: PartialDate;
    score: number;
    range_min: number;
    range_max: number;
}

export type SlideKind = 'title_card' | 'memory_card' | 'media_slide';

export interface Slide {
    kind: SlideKind;
    duration_seconds: number;
    memory_id?: string | null;
    media_ref?: string | null;
    caption?: string | null;
}

export interface StoryboardManifest {
    slides: Slide[];
    audio_track_refs: string[];
}
