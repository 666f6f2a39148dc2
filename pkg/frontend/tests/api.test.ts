import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError, ConflictError, FetchLike } from '../src/api.js';

interface Recorded {
    url: string;
    method: string;
    headers: Record<string, string>;
    body?: string | FormData;
}

function stubFetch(
    status: number,
    payload: unknown,
): { fetch: FetchLike; calls: Recorded[] } {
    const calls: Recorded[] = [];
    const fetch: FetchLike = async (url, init) => {
        calls.push({ url, ...init });
        return {
            status,
            json: async () => payload,
            text: async () => JSON.stringify(payload),
        };
    };
    return { fetch, calls };
}

describe('ApiClient', () => {
    it('sends the bearer token on every call', async () => {
        const { fetch, calls } = stubFetch(200, []);
        await new ApiClient('http://x', 'tok-1', fetch).listPatients();
        expect(calls[0].headers.Authorization).toBe('Bearer tok-1');
        expect(calls[0].url).toBe('http://x/patients');
    });

    it('attaches If-Match to every mutation', async () => {
        const { fetch, calls } = stubFetch(200, {});
        const client = new ApiClient('http://x', 't', fetch);
        await client.updateMemory('m1', { location: 'Vigo' }, 4);
        await client.startSession('s1', 2);
        await client.endSession('s1', { overall_impression: 'ok' }, 3);
        await client.updateAssessment('a1', { observations: 'x' }, 7);
        expect(calls.map((c) => c.headers['If-Match'])).toEqual(['4', '2', '3', '7']);
    });

    it('serializes JSON bodies with the right content type', async () => {
        const { fetch, calls } = stubFetch(201, {});
        await new ApiClient('http://x', 't', fetch).createMemory('p1', {
            description: 'd',
        });
        expect(calls[0].headers['Content-Type']).toBe('application/json');
        expect(JSON.parse(calls[0].body as string)).toEqual({ description: 'd' });
    });

    it('raises ConflictError with a reload-and-retry affordance on 409', async () => {
        const { fetch } = stubFetch(409, { error: 'VERSION_CONFLICT' });
        const client = new ApiClient('http://x', 't', fetch);
        const failure = await client
            .updatePatient('p1', {}, 1)
            .then(() => null, (e) => e);
        expect(failure).toBeInstanceOf(ConflictError);
        expect(failure.code).toBe('VERSION_CONFLICT');
        expect(failure.affordance).toBe('reload-and-retry');
    });

    it('maps other failures to ApiError with the server code', async () => {
        const { fetch } = stubFetch(404, { error: 'UNKNOWN_PATIENT' });
        const failure = await new ApiClient('http://x', 't', fetch)
            .listMemories('ghost')
            .then(() => null, (e) => e);
        expect(failure).toBeInstanceOf(ApiError);
        expect(failure).not.toBeInstanceOf(ConflictError);
        expect(failure.status).toBe(404);
        expect(failure.code).toBe('UNKNOWN_PATIENT');
    });

    it('handles empty error bodies (401/403) without crashing', async () => {
        const calls: Recorded[] = [];
        const fetch: FetchLike = async (url, init) => {
            calls.push({ url, ...init });
            return {
                status: 403,
                json: async () => {
                    throw new Error('no body');
                },
                text: async () => '',
            };
        };
        const failure = await new ApiClient('http://x', 't', fetch)
            .listMemories('p1')
            .then(() => null, (e) => e);
        expect(failure.status).toBe(403);
        expect(failure.code).toBe('HTTP_403');
    });

    it('builds calendar query parameters', async () => {
        const { fetch, calls } = stubFetch(200, []);
        await new ApiClient('http://x', 't', fetch).calendar(
            'p1',
            '2025-01-01T00:00:00+00:00',
            '2025-12-31T00:00:00+00:00',
        );
        const url = new URL(calls[0].url);
        expect(url.pathname).toBe('/patients/p1/calendar');
        expect(url.searchParams.get('from')).toBe('2025-01-01T00:00:00+00:00');
    });
});
