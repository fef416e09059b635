/**
 * Annotation app: waveform player for the 5 s candidate clip with the
 * highlighted region, two-step labeling, submit with auto-advance.
 *
 * createApp() builds the whole interface inside a host element; tests
 * drive it through the DOM exactly as an annotator would.
 */

import { AnnotationApi, CandidateDescriptor } from './api.js';
import { LabelFlow } from './flow.js';
import { DEFAULT_LABELS, LabelGroups, displayName } from './labels.js';
import { AudioLike, SegmentPlayer } from './player.js';
import { computePeaks, decodeWav, drawWaveform } from './wav.js';

export interface AppOptions {
  baseUrl?: string;
  annotator: string;
  /** Injectable audio element factory (tests pass a scripted stand-in). */
  audioFactory?: () => AudioLike;
  waveformBuckets?: number;
}

export interface AppHandle {
  /** Resolves when the current candidate (or the done state) is rendered. */
  ready: Promise<void>;
  currentCandidate(): CandidateDescriptor | null;
  root: HTMLElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className: string,
  text = '',
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function createApp(root: HTMLElement, options: AppOptions): AppHandle {
  const doc = root.ownerDocument;
  const api = new AnnotationApi(options.baseUrl ?? '');
  const audio: AudioLike = options.audioFactory ? options.audioFactory() : (new Audio() as AudioLike);
  const player = new SegmentPlayer(audio);
  const buckets = options.waveformBuckets ?? 400;

  let groups: LabelGroups = DEFAULT_LABELS;
  let flow = new LabelFlow(groups);
  let candidate: CandidateDescriptor | null = null;
  let clipDuration = 5.0;
  let inFlight = false;

  // --- static layout ---
  const title = el(doc, 'h1', 'fk-title', 'Filler candidate annotation');
  const status = el(doc, 'div', 'fk-status', 'Loading…');
  const waveWrap = el(doc, 'div', 'fk-wave-wrap');
  const canvas = el(doc, 'canvas', 'fk-wave');
  canvas.width = 800;
  canvas.height = 160;
  const highlight = el(doc, 'div', 'fk-highlight');
  waveWrap.append(canvas, highlight);
  const controls = el(doc, 'div', 'fk-controls');
  const playBtn = el(doc, 'button', 'fk-play', 'Play / pause');
  playBtn.dataset.role = 'play';
  const replayBtn = el(doc, 'button', 'fk-replay', 'Replay highlight');
  replayBtn.dataset.role = 'replay-highlight';
  controls.append(playBtn, replayBtn);
  const question = el(doc, 'div', 'fk-question');
  const step1 = el(doc, 'div', 'fk-step1');
  const yesBtn = el(doc, 'button', 'fk-yes', 'Filler word');
  yesBtn.dataset.role = 'choose-filler';
  const noBtn = el(doc, 'button', 'fk-no', 'Not a filler');
  noBtn.dataset.role = 'choose-non-filler';
  step1.append(yesBtn, noBtn);
  const step2 = el(doc, 'div', 'fk-step2');
  const errorBox = el(doc, 'div', 'fk-error');
  errorBox.dataset.role = 'error';
  root.append(title, status, waveWrap, controls, question, step1, step2, errorBox);

  function renderFlow(): void {
    const state = flow.state();
    errorBox.textContent = state.error ?? '';
    step1.style.display = candidate ? '' : 'none';
    question.textContent = candidate ? 'Does the highlighted region contain a filler word?' : '';
    yesBtn.classList.toggle('fk-chosen', state.isFiller === true);
    noBtn.classList.toggle('fk-chosen', state.isFiller === false);
    step2.textContent = '';
    if (candidate && (state.phase === 'step2' || state.phase === 'submitting')) {
      const forCandidate = candidate.id;
      for (const label of state.options) {
        const btn = el(doc, 'button', 'fk-label', displayName(label));
        btn.dataset.role = 'label';
        btn.dataset.label = label;
        btn.disabled = state.phase === 'submitting';
        btn.addEventListener('click', () => submit(label, forCandidate));
        step2.append(btn);
      }
    }
  }

  function renderHighlight(): void {
    if (!candidate) {
      highlight.style.display = 'none';
      return;
    }
    const start = Math.max(0, candidate.highlight_start_s);
    const end = Math.min(clipDuration, candidate.highlight_end_s);
    highlight.style.display = '';
    highlight.style.left = `${(start / clipDuration) * 100}%`;
    highlight.style.width = `${((end - start) / clipDuration) * 100}%`;
  }

  async function loadAudio(c: CandidateDescriptor): Promise<void> {
    try {
      const bytes = await api.fetchAudio(c.audio_url);
      const decoded = decodeWav(bytes);
      clipDuration = decoded.samples.length / decoded.sampleRate;
      drawWaveform(canvas, computePeaks(decoded.samples, buckets));
    } catch (err) {
      // keep the nominal 5 s timeline; playback may still work via the element
      clipDuration = 5.0;
      errorBox.textContent = `audio decode failed: ${(err as Error).message}`;
    }
    player.load((options.baseUrl ?? '') + c.audio_url);
  }

  async function advance(): Promise<void> {
    status.textContent = 'Loading…';
    candidate = null;
    renderFlow();
    let next: CandidateDescriptor | null = null;
    try {
      next = await api.nextCandidate(options.annotator);
    } catch (err) {
      status.textContent = `server error: ${(err as Error).message}`;
      status.dataset.state = 'error';
      return;
    }
    if (!next) {
      status.textContent = 'All candidates labeled. Thank you!';
      status.dataset.state = 'done';
      renderHighlight();
      return;
    }
    candidate = next;
    flow = new LabelFlow(groups);
    await loadAudio(next);
    status.textContent = `Candidate ${next.id}`;
    status.dataset.state = 'ready';
    renderHighlight();
    renderFlow();
  }

  async function submit(label: string, forCandidate: string): Promise<void> {
    if (!candidate || inFlight || candidate.id !== forCandidate) {
      return; // double-click guard + stale-button guard after auto-advance
    }
    let chosen: string;
    try {
      chosen = flow.beginSubmit(label);
    } catch (err) {
      errorBox.textContent = (err as Error).message;
      return;
    }
    inFlight = true;
    renderFlow();
    try {
      await api.submitLabel(candidate.id, options.annotator, chosen);
      flow.submitSucceeded();
      inFlight = false;
      await advance();
    } catch (err) {
      inFlight = false;
      flow.submitFailed((err as Error).message);
      renderFlow();
    }
  }

  yesBtn.addEventListener('click', () => {
    if (candidate) {
      flow.chooseFiller(true);
      renderFlow();
    }
  });
  noBtn.addEventListener('click', () => {
    if (candidate) {
      flow.chooseFiller(false);
      renderFlow();
    }
  });
  playBtn.addEventListener('click', () => player.toggle());
  replayBtn.addEventListener('click', () => {
    if (candidate) {
      player.playRange(candidate.highlight_start_s, candidate.highlight_end_s);
    }
  });
  doc.addEventListener('keydown', (event: KeyboardEvent) => {
    if (event.key === 'h' && candidate) {
      player.playRange(candidate.highlight_start_s, candidate.highlight_end_s);
    }
  });

  const ready = (async () => {
    try {
      groups = await api.labelGroups();
    } catch {
      groups = DEFAULT_LABELS; // offline fallback; server still validates
    }
    await advance();
  })();

  return {
    ready,
    currentCandidate: () => candidate,
    root,
  };
}
