// One-to-one mapping from the console's screens to the therapist workflow
// tasks they cover. The test suite asserts the mapping is total: every
// task has a screen and every screen exists in the inventory.

export const SCREENS = [
    'patient-list',
    'patient-register',
    'related-person-register',
    'memory-editor',
    'media-uploader',
    'related-person-list',
    'calendar',
    'session-planner',
    'session-console',
    'session-report-viewer',
    'assessment-editor',
    'assessment-report-viewer',
    'life-story-builder',
    'book-viewer',
    'presentation-view',
] as const;

export type Screen = (typeof SCREENS)[number];

export interface WorkflowTask {
    id: number;
    summary: string;
    screens: Screen[];
}

export const WORKFLOW_TASKS: WorkflowTask[] = [
    { id: 1, summary: 'Review planned sessions and their completion status', screens: ['calendar', 'session-planner'] },
    { id: 2, summary: 'Browse session reports and export to PDF', screens: ['session-report-viewer'] },
    { id: 3, summary: 'Browse assessment reports and export to PDF', screens: ['assessment-report-viewer'] },
    { id: 4, summary: 'Generate a filtered life story, view the book, run the slideshow', screens: ['life-story-builder', 'book-viewer', 'presentation-view'] },
    { id: 5, summary: 'Edit a memory and attach an image', screens: ['memory-editor', 'media-uploader'] },
    { id: 6, summary: 'List related persons sorted by relationship', screens: ['related-person-list'] },
    { id: 7, summary: 'Review and modify the session calendar', screens: ['calendar'] },
    { id: 8, summary: 'Create, conduct, and end a session with its report', screens: ['session-planner', 'session-console', 'session-report-viewer'] },
    { id: 9, summary: 'Create or edit a clinical assessment', screens: ['assessment-editor'] },
    { id: 10, summary: 'Register a new patient', screens: ['patient-list', 'patient-register'] },
    { id: 11, summary: 'Register a caregiver and link them to a patient', screens: ['related-person-register'] },
];
