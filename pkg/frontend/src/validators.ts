// Client-side form validation mirroring the server's bounds. The server
// remains authoritative; these exist so forms can flag problems before a
// round trip. Error codes match the server's so messages can be shared.

export interface FieldError {
    field: string;
    code: string;
}

const YEAR_MIN = 1850;
const YEAR_MAX = 2100;

function isInt(value: unknown): value is number {
    return typeof value === 'number' && Number.isInteger(value);
}

export function validatePartialDate(date: {
    year?: unknown;
    month?: unknown;
    day?: unknown;
}): FieldError[] {
    const errors: FieldError[] = [];
    if (!isInt(date.year) || date.year < YEAR_MIN || date.year > YEAR_MAX) {
        errors.push({ field: 'date.year', code: 'BAD_DATE' });
        return errors;
    }
    if (date.month !== undefined && date.month !== null) {
        if (!isInt(date.month) || date.month < 1 || date.month > 12) {
            errors.push({ field: 'date.month', code: 'BAD_DATE' });
            return errors;
        }
    }
    if (date.day !== undefined && date.day !== null) {
        if (date.month === undefined || date.month === null) {
            errors.push({ field: 'date.day', code: 'BAD_DATE' });
            return errors;
        }
        const daysInMonth = new Date(
            date.year as number, date.month as number, 0,
        ).getDate();
        if (!isInt(date.day) || date.day < 1 || date.day > daysInMonth) {
            errors.push({ field: 'date.day', code: 'BAD_DATE' });
        }
    }
    return errors;
}

export function validateMemoryForm(form: {
    description?: string;
    date?: { year?: number; month?: number; day?: number };
    mood_score?: unknown;
}): FieldError[] {
    const errors: FieldError[] = [];
    if (!form.description || form.description.trim() === '') {
        errors.push({ field: 'description', code: 'EMPTY_DESCRIPTION' });
    }
    if (!form.date) {
        errors.push({ field: 'date', code: 'BAD_DATE' });
    } else {
        errors.push(...validatePartialDate(form.date));
    }
    if (!isInt(form.mood_score) || form.mood_score < 0 || form.mood_score > 10) {
        errors.push({ field: 'mood_score', code: 'MOOD_OUT_OF_RANGE' });
    }
    return errors;
}

export function validateReportForm(form: {
    overall_impression?: string;
    participation_score?: unknown;
}): FieldError[] {
    const errors: FieldError[] = [];
    if (!form.overall_impression || form.overall_impression.trim() === '') {
        errors.push({ field: 'overall_impression', code: 'EMPTY_FIELD' });
    }
    const score = form.participation_score;
    if (!isInt(score) || score < 0 || score > 10) {
        errors.push({
            field: 'participation_score',
            code: 'PARTICIPATION_OUT_OF_RANGE',
        });
    }
    return errors;
}

export function validateAssessmentForm(form: {
    gds_stage?: unknown;
    instrument_results?: { score?: number; range_min?: number; range_max?: number }[];
}): FieldError[] {
    const errors: FieldError[] = [];
    if (!isInt(form.gds_stage) || form.gds_stage < 1 || form.gds_stage > 7) {
        errors.push({ field: 'gds_stage', code: 'GDS_OUT_OF_RANGE' });
    }
    (form.instrument_results ?? []).forEach((result, index) => {
        const { score, range_min, range_max } = result;
        if (
            typeof score !== 'number' ||
            typeof range_min !== 'number' ||
            typeof range_max !== 'number' ||
            score < range_min ||
            score > range_max
        ) {
            errors.push({
                field: `instrument_results.${index}.score`,
                code: 'SCORE_OUTSIDE_INSTRUMENT_RANGE',
            });
        }
    });
    return errors;
}
