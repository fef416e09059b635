/**
 * Typed client for the annotation server's JSON API. The UI holds no
 * authoritative state; every read and write goes through these calls.
 */

import { LabelGroups } from './labels.js';

export interface CandidateDescriptor {
  id: string;
  episode: string;
  highlight_start_s: number;
  highlight_end_s: number;
  audio_url: string;
}

export interface NextResponse {
  done?: boolean;
}

export interface LabelAck {
  candidate_id: string;
  state: string;
  final_label: string | null;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class AnnotationApi {
  constructor(private baseUrl: string = '') {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(this.baseUrl + path);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body.error ?? `GET ${path} failed`);
    }
    return body as T;
  }

  /** Next candidate for this annotator, or null when the queue is empty. */
  async nextCandidate(annotator: string): Promise<CandidateDescriptor | null> {
    const body = await this.getJson<CandidateDescriptor & NextResponse>(
      `/api/next?annotator=${encodeURIComponent(annotator)}`,
    );
    return body.done ? null : (body as CandidateDescriptor);
  }

  async submitLabel(candidateId: string, annotator: string, label: string): Promise<LabelAck> {
    const resp = await fetch(this.baseUrl + '/api/label', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ candidate_id: candidateId, annotator_id: annotator, label }),
    });
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body.error ?? 'label submission failed');
    }
    return body as LabelAck;
  }

  async fetchAudio(audioUrl: string): Promise<ArrayBuffer> {
    const resp = await fetch(this.baseUrl + audioUrl);
    if (!resp.ok) {
      throw new ApiError(resp.status, `audio fetch failed (${resp.status})`);
    }
    return resp.arrayBuffer();
  }

  async labelGroups(): Promise<LabelGroups> {
    return this.getJson<LabelGroups>('/api/labels');
  }

  async stats(): Promise<Record<string, unknown>> {
    return this.getJson('/api/stats');
  }
}
