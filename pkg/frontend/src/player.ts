/**
 * Playback control over an audio element, including highlight-only replay.
 * The element is injected so tests can substitute a scripted stand-in.
 */

export interface AudioLike {
  currentTime: number;
  src: string;
  paused: boolean;
  play(): Promise<void> | void;
  pause(): void;
  addEventListener(type: string, listener: () => void): void;
  removeEventListener(type: string, listener: () => void): void;
}

export class SegmentPlayer {
  private stopAt: number | null = null;
  private readonly onTimeUpdate = () => {
    if (this.stopAt !== null && this.audio.currentTime >= this.stopAt) {
      this.audio.pause();
      this.stopAt = null;
    }
  };

  constructor(private readonly audio: AudioLike) {
    audio.addEventListener('timeupdate', this.onTimeUpdate);
  }

  load(src: string): void {
    this.audio.pause();
    this.stopAt = null;
    this.audio.src = src;
    this.audio.currentTime = 0;
  }

  playAll(): void {
    this.stopAt = null;
    void this.audio.play();
  }

  pause(): void {
    this.audio.pause();
  }

  toggle(): void {
    if (this.audio.paused) {
      this.playAll();
    } else {
      this.pause();
    }
  }

  /** Seek to the highlight start and stop playback at its end. */
  playRange(start: number, end: number): void {
    this.audio.currentTime = start;
    this.stopAt = end;
    void this.audio.play();
  }

  dispose(): void {
    this.audio.pause();
    this.audio.removeEventListener('timeupdate', this.onTimeUpdate);
  }
}
