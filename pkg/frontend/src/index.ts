export * from './types.js';
export * from './validators.js';
export * from './carousel.js';
export * from './sessionConsole.js';
export * from './evolutionChart.js';
export * from './checklist.js';
export * from './api.js';
