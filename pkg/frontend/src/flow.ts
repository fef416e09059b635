/**
 * Two-step labeling flow: first "is the highlighted region a filler word?",
 * then the fine-grained label list for the chosen side. The state machine
 * guarantees a submission is always a valid label from the chosen group
 * and that only one submission is in flight per candidate.
 */

import { LabelGroups, isValidChoice } from './labels.js';

export type FlowPhase = 'step1' | 'step2' | 'submitting' | 'submitted' | 'error';

export interface FlowState {
  phase: FlowPhase;
  isFiller: boolean | null;
  options: string[];
  error: string | null;
}

export class LabelFlow {
  private phase: FlowPhase = 'step1';
  private isFiller: boolean | null = null;
  private error: string | null = null;

  constructor(private readonly groups: LabelGroups) {}

  state(): FlowState {
    return {
      phase: this.phase,
      isFiller: this.isFiller,
      options: this.options(),
      error: this.error,
    };
  }

  options(): string[] {
    if (this.phase === 'step1' || this.isFiller === null) {
      return [];
    }
    return this.isFiller ? [...this.groups.filler] : [...this.groups.non_filler];
  }

  chooseFiller(isFiller: boolean): void {
    if (this.phase !== 'step1' && this.phase !== 'step2') {
      throw new Error(`cannot choose filler/non-filler in phase ${this.phase}`);
    }
    this.isFiller = isFiller;
    this.phase = 'step2';
    this.error = null;
  }

  /** Validate and lock in a fine-grained label; returns it for submission. */
  beginSubmit(label: string): string {
    if (this.phase !== 'step2' || this.isFiller === null) {
      throw new Error(`cannot submit in phase ${this.phase}`);
    }
    if (!isValidChoice(this.groups, this.isFiller, label)) {
      throw new Error(`label ${label} is not a valid ${this.isFiller ? 'filler' : 'non-filler'} choice`);
    }
    this.phase = 'submitting';
    return label;
  }

  submitSucceeded(): void {
    this.phase = 'submitted';
  }

  submitFailed(message: string): void {
    this.phase = 'step2';
    this.error = message;
  }

  reset(): void {
    this.phase = 'step1';
    this.isFiller = null;
    this.error = null;
  }
}
