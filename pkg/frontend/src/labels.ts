/**
 * Annotation label vocabulary: five filler labels and eight non-filler
 * labels. The server's /api/labels endpoint is the source of truth at
 * runtime; these constants are the offline fallback and must match it.
 */

export interface LabelGroups {
  filler: string[];
  non_filler: string[];
}

export const DEFAULT_LABELS: LabelGroups = {
  filler: ['uh', 'um', 'you_know', 'like', 'other'],
  non_filler: [
    'laughter',
    'breath',
    'agreement_sound',
    'regular_words',
    'repetitions',
    'simultaneous_speakers',
    'music',
    'noise',
  ],
};

const DISPLAY: Record<string, string> = {
  uh: 'Uh',
  um: 'Um',
  you_know: 'You know',
  like: 'Like',
  other: 'Other filler',
  laughter: 'Laughter',
  breath: 'Breath',
  agreement_sound: 'Agreement sound (mmm, uh-huh)',
  regular_words: 'Regular words',
  repetitions: 'Repetitions',
  simultaneous_speakers: 'Simultaneous speakers',
  music: 'Music',
  noise: 'Noise',
};

export function displayName(label: string): string {
  return DISPLAY[label] ?? label;
}

export function isValidChoice(groups: LabelGroups, isFiller: boolean, label: string): boolean {
  const pool = isFiller ? groups.filler : groups.non_filler;
  return pool.includes(label);
}
