import { Slide, StoryboardManifest } from './types.js';

// Photo-carousel state for the life-story slideshow. Pure transition
// function so the UI layer just re-renders from the returned state.

export interface CarouselState {
    slides: Slide[];
    cursor: number;
    playing: boolean;
    loop: boolean;
}

export type CarouselEvent = 'next' | 'prev' | 'tick' | 'play' | 'pause';

export function carouselFromManifest(
    manifest: StoryboardManifest,
    options: { loop?: boolean; autoplay?: boolean } = {},
): CarouselState {
    return {
        slides: manifest.slides,
        cursor: 0,
        playing: options.autoplay ?? false,
        loop: options.loop ?? false,
    };
}

export function advanceCarousel(
    state: CarouselState,
    event: CarouselEvent,
): CarouselState {
    const last = state.slides.length - 1;
    if (last < 0) {
        return { ...state, cursor: 0, playing: false };
    }
    switch (event) {
        case 'play':
            return { ...state, playing: true };
        case 'pause':
            return { ...state, playing: false };
        case 'prev':
            return { ...state, cursor: Math.max(0, state.cursor - 1) };
        case 'next':
        case 'tick': {
            if (event === 'tick' && !state.playing) {
                return state;
            }
            if (state.cursor >= last) {
                // past the end: loop around or stop in place
                return state.loop
                    ? { ...state, cursor: 0 }
                    : { ...state, playing: false };
            }
            return { ...state, cursor: state.cursor + 1 };
        }
    }
}

export function currentSlide(state: CarouselState): Slide | null {
    return state.slides[state.cursor] ?? null;
}
