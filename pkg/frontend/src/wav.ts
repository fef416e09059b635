/**
 * Client-side RIFF/WAVE decoding and peak extraction. The server only ever
 * emits PCM16 or float32 mono clips, so that is all this parser handles;
 * peaks are computed here to avoid a server-side peaks endpoint.
 */

export interface DecodedWav {
  sampleRate: number;
  samples: Float32Array;
}

export interface PeakBucket {
  min: number;
  max: number;
}

export function decodeWav(buffer: ArrayBuffer): DecodedWav {
  const view = new DataView(buffer);
  if (view.getUint32(0, false) !== 0x52494646 /* RIFF */ || view.getUint32(8, false) !== 0x57415645 /* WAVE */) {
    throw new Error('not a RIFF/WAVE file');
  }
  let offset = 12;
  let format = 0;
  let channels = 1;
  let sampleRate = 0;
  let bitsPerSample = 0;
  let dataOffset = -1;
  let dataLength = 0;
  while (offset + 8 <= view.byteLength) {
    const chunkId = view.getUint32(offset, false);
    const chunkSize = view.getUint32(offset + 4, true);
    if (chunkId === 0x666d7420 /* fmt  */) {
      format = view.getUint16(offset + 8, true);
      channels = view.getUint16(offset + 10, true);
      sampleRate = view.getUint32(offset + 12, true);
      bitsPerSample = view.getUint16(offset + 22, true);
    } else if (chunkId === 0x64617461 /* data */) {
      dataOffset = offset + 8;
      dataLength = chunkSize;
    }
    offset += 8 + chunkSize + (chunkSize % 2);
  }
  if (dataOffset < 0 || sampleRate === 0) {
    throw new Error('missing fmt/data chunk');
  }
  let samples: Float32Array;
  if (format === 1 && bitsPerSample === 16) {
    const n = Math.floor(dataLength / 2);
    samples = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      samples[i] = view.getInt16(dataOffset + 2 * i, true) / 32768;
    }
  } else if (format === 3 && bitsPerSample === 32) {
    const n = Math.floor(dataLength / 4);
    samples = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      samples[i] = view.getFloat32(dataOffset + 4 * i, true);
    }
  } else {
    throw new Error(`unsupported WAV encoding (format ${format}, ${bitsPerSample} bit)`);
  }
  if (channels > 1) {
    const mono = new Float32Array(Math.floor(samples.length / channels));
    for (let i = 0; i < mono.length; i++) {
      let acc = 0;
      for (let c = 0; c < channels; c++) acc += samples[i * channels + c];
      mono[i] = acc / channels;
    }
    samples = mono;
  }
  return { sampleRate, samples };
}

/** Min/max peaks over equal sample buckets, for waveform rendering. */
export function computePeaks(samples: Float32Array, buckets: number): PeakBucket[] {
  const out: PeakBucket[] = [];
  if (buckets <= 0 || samples.length === 0) {
    return out;
  }
  const per = samples.length / buckets;
  for (let b = 0; b < buckets; b++) {
    const lo = Math.floor(b * per);
    const hi = Math.max(lo + 1, Math.floor((b + 1) * per));
    let mn = samples[lo];
    let mx = samples[lo];
    for (let i = lo + 1; i < hi && i < samples.length; i++) {
      if (samples[i] < mn) mn = samples[i];
      if (samples[i] > mx) mx = samples[i];
    }
    out.push({ min: mn, max: mx });
  }
  return out;
}

/** Draw peaks onto a canvas; quietly does nothing when 2D contexts are
 * unavailable (DOM emulators in tests). */
export function drawWaveform(canvas: HTMLCanvasElement, peaks: PeakBucket[]): void {
  const ctx = canvas.getContext && (canvas.getContext('2d') as CanvasRenderingContext2D | null);
  if (!ctx || peaks.length === 0) {
    return;
  }
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = '#3a6ea5';
  const mid = height / 2;
  const barWidth = width / peaks.length;
  peaks.forEach((p, i) => {
    const top = mid - p.max * mid;
    const bottom = mid - p.min * mid;
    ctx.fillRect(i * barWidth, top, Math.max(1, barWidth - 0.5), Math.max(1, bottom - top));
  });
}
