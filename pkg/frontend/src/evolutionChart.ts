import { EvolutionPoint, PartialDate } from './types.js';

// Declarative chart spec for an instrument's score evolution. The UI
// draws whatever this describes; tests count segments instead of pixels.

export interface ChartPoint {
    x: string;
    y: number;
}

export interface ChartSegment {
    from: ChartPoint;
    to: ChartPoint;
}

export type EvolutionChartSpec =
    | { kind: 'placeholder'; message: string }
    | {
          kind: 'dot' | 'line';
          points: ChartPoint[];
          segments: ChartSegment[];
          rangeBand: { min: number; max: number };
      };

function dateLabel(date: PartialDate): string {
    const month = date.month ? `-${String(date.month).padStart(2, '0')}` : '';
    const day = date.day ? `-${String(date.day).padStart(2, '0')}` : '';
    return `${date.year}${month}${day}`;
}

export function evolutionChartSpec(series: EvolutionPoint[]): EvolutionChartSpec {
    if (series.length === 0) {
        return { kind: 'placeholder', message: 'no data' };
    }
    const points = series.map((point) => ({
        x: dateLabel(point.assessed_at),
        y: point.score,
    }));
    const segments: ChartSegment[] = [];
    for (let index = 1; index < points.length; index += 1) {
        segments.push({ from: points[index - 1], to: points[index] });
    }
    return {
        kind: points.length === 1 ? 'dot' : 'line',
        points,
        segments,
        rangeBand: {
            min: Math.min(...series.map((point) => point.range_min)),
            max: Math.max(...series.map((point) => point.range_max)),
        },
    };
}
