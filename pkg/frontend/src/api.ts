import {
    EvolutionPoint,
    Memory,
    Patient,
    Session,
    StoryboardManifest,
} from './types.js';

// Thin typed client over the JSON API. Every mutation sends
// `If-Match: <record_version>`; a 409 surfaces as ConflictError carrying
// a reload-and-retry affordance for the UI — the client never silently
// overwrites.

export class ApiError extends Error {
    constructor(
        public status: number,
        public code: string,
        public body: unknown,
    ) {
        super(`${status} ${code}`);
    }
}

export class ConflictError extends ApiError {
    readonly affordance = 'reload-and-retry';

    constructor(status: number, code: string, body: unknown) {
        super(status, code, body);
    }
}

export type FetchLike = (
    url: string,
    init: {
        method: string;
        headers: Record<string, string>;
        body?: string | FormData;
    },
) => Promise<{
    status: number;
    json(): Promise<unknown>;
    text(): Promise<string>;
}>;

export class ApiClient {
    constructor(
        private baseUrl: string,
        private token: string,
        private fetchImpl: FetchLike = fetch as unknown as FetchLike,
    ) {}

    private async request<T>(
        method: string,
        path: string,
        options: { body?: unknown; ifMatch?: number } = {},
    ): Promise<T> {
        const headers: Record<string, string> = {
            Authorization: `Bearer ${this.token}`,
        };
        let body: string | undefined;
        if (options.body !== undefined) {
            headers['Content-Type'] = 'application/json';
            body = JSON.stringify(options.body);
        }
        if (options.ifMatch !== undefined) {
            headers['If-Match'] = String(options.ifMatch);
        }
        const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
            method,
            headers,
            body,
        });
        if (response.status >= 400) {
            const text = await response.text();
            let payload: any = null;
            try {
                payload = JSON.parse(text);
            } catch {
                payload = text;
            }
            const code = payload?.error ?? `HTTP_${response.status}`;
            if (response.status === 409) {
                throw new ConflictError(response.status, code, payload);
            }
            throw new ApiError(response.status, code, payload);
        }
        if (response.status === 204) {
            return undefined as T;
        }
        return (await response.json()) as T;
    }

    me(): Promise<{ id: string; display_name: string }> {
        return this.request('GET', '/me');
    }

    listPatients(): Promise<Patient[]> {
        return this.request('GET', '/patients');
    }

    registerPatient(draft: object): Promise<Patient> {
        return this.request('POST', '/patients', { body: draft });
    }

    updatePatient(id: string, changes: object, version: number): Promise<Patient> {
        return this.request('PATCH', `/patients/${id}`, {
            body: changes,
            ifMatch: version,
        });
    }

    listMemories(patientId: string, query = ''): Promise<Memory[]> {
        const suffix = query ? `?${query}` : '';
        return this.request('GET', `/patients/${patientId}/memories${suffix}`);
    }

    createMemory(patientId: string, draft: object): Promise<Memory> {
        return this.request('POST', `/patients/${patientId}/memories`, {
            body: draft,
        });
    }

    updateMemory(id: string, changes: object, version: number): Promise<Memory> {
        return this.request('PATCH', `/memories/${id}`, {
            body: changes,
            ifMatch: version,
        });
    }

    listRelatedPersons(patientId: string, sort = 'name'): Promise<any[]> {
        return this.request(
            'GET',
            `/patients/${patientId}/related-persons?sort=${sort}`,
        );
    }

    registerRelatedPerson(patientId: string, draft: object): Promise<any> {
        return this.request('POST', `/patients/${patientId}/related-persons`, {
            body: draft,
        });
    }

    listSessions(patientId: string): Promise<Session[]> {
        return this.request('GET', `/patients/${patientId}/sessions`);
    }

    planSession(patientId: string, draft: object): Promise<Session> {
        return this.request('POST', `/patients/${patientId}/sessions`, {
            body: draft,
        });
    }

    startSession(id: string, version: number): Promise<Session> {
        return this.request('POST', `/sessions/${id}/start`, { ifMatch: version });
    }

    amendSession(
        id: string,
        draft: object,
        version: number,
    ): Promise<{ memory: Memory; session: Session }> {
        return this.request('POST', `/sessions/${id}/amend`, {
            body: draft,
            ifMatch: version,
        });
    }

    endSession(
        id: string,
        report: object,
        version: number,
    ): Promise<{ session: Session; report: any }> {
        return this.request('POST', `/sessions/${id}/end`, {
            body: report,
            ifMatch: version,
        });
    }

    rescheduleSession(
        id: string,
        scheduledAt: string,
        version: number,
    ): Promise<Session> {
        return this.request('POST', `/sessions/${id}/reschedule`, {
            body: { scheduled_at: scheduledAt },
            ifMatch: version,
        });
    }

    sessionReport(id: string): Promise<any> {
        return this.request('GET', `/sessions/${id}/report`);
    }

    calendar(patientId: string, from: string, to: string): Promise<any[]> {
        const params = new URLSearchParams({ from, to });
        return this.request('GET', `/patients/${patientId}/calendar?${params}`);
    }

    listAssessments(patientId: string): Promise<any[]> {
        return this.request('GET', `/patients/${patientId}/assessments`);
    }

    recordAssessment(patientId: string, draft: object): Promise<any> {
        return this.request('POST', `/patients/${patientId}/assessments`, {
            body: draft,
        });
    }

    updateAssessment(id: string, changes: object, version: number): Promise<any> {
        return this.request('PATCH', `/assessments/${id}`, {
            body: changes,
            ifMatch: version,
        });
    }

    evolution(patientId: string, instrument: string): Promise<EvolutionPoint[]> {
        return this.request(
            'GET',
            `/patients/${patientId}/evolution/${instrument}`,
        );
    }

    lifeStoryPreview(patientId: string, query: object): Promise<any[]> {
        return this.request('POST', `/patients/${patientId}/life-story/preview`, {
            body: query,
        });
    }

    storyboard(patientId: string, query: object): Promise<StoryboardManifest> {
        return this.request(
            'POST',
            `/patients/${patientId}/life-story/storyboard`,
            { body: query },
        );
    }

    emailRelatedPerson(id: string, subject: string, body: string): Promise<any> {
        return this.request('POST', `/related-persons/${id}/email`, {
            body: { subject, body },
        });
    }
}
