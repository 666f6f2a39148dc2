import { MediaAsset, Memory, Session } from './types.js';

// View model for the live-session screen. The deck follows the planned
// order exactly; memories amended in during the session are appended in
// amendment-log order. The end-session control is a fixed primary action
// so it is always visible without scrolling.

export interface PromptCard {
    memoryId: string;
    description: string;
    media: MediaAsset[];
    addedLive: boolean;
}

export interface SessionConsoleViewModel {
    sessionId: string;
    header: {
        objectives: string;
        barriers: string | null;
        facilitators: string | null;
        activitySequence: string[];
    };
    deck: PromptCard[];
    readOnly: boolean;
    quickActions: string[];
    endSessionControl: { visible: boolean; prominence: 'primary' } | null;
}

export function buildSessionConsole(
    session: Session,
    catalog: Memory[],
    mediaById: Record<string, MediaAsset> = {},
): SessionConsoleViewModel {
    const byId = new Map(catalog.map((memory) => [memory.id, memory]));
    const live = session.status === 'in_progress';

    const deckIds = [...session.planned_memory_ids];
    for (const entry of session.amendment_log) {
        if (!deckIds.includes(entry.memory_id) && byId.has(entry.memory_id)) {
            deckIds.push(entry.memory_id);
        }
    }

    const deck: PromptCard[] = [];
    for (const memoryId of deckIds) {
        const memory = byId.get(memoryId);
        if (!memory) {
            continue;
        }
        deck.push({
            memoryId,
            description: memory.description,
            media: memory.media
                .map((assetId) => mediaById[assetId])
                .filter((asset): asset is MediaAsset => asset !== undefined),
            addedLive: !session.planned_memory_ids.includes(memoryId),
        });
    }

    return {
        sessionId: session.id,
        header: {
            objectives: session.objectives,
            barriers: session.barriers ?? null,
            facilitators: session.facilitators ?? null,
            activitySequence: session.activity_sequence,
        },
        deck,
        readOnly: !live,
        quickActions: live ? ['amend-memory', 'add-memory'] : [],
        endSessionControl: live
            ? { visible: true, prominence: 'primary' }
            : null,
    };
}
