import { describe, expect, it } from 'vitest';

import { computePeaks, decodeWav } from '../src/wav.js';

function wavBytes(samples: Float32Array, sampleRate: number, pcm16: boolean): ArrayBuffer {
  const bytesPer = pcm16 ? 2 : 4;
  const dataLen = samples.length * bytesPer;
  const buffer = new ArrayBuffer(44 + dataLen);
  const view = new DataView(buffer);
  const writeTag = (offset: number, tag: string) => {
    for (let i = 0; i < 4; i++) view.setUint8(offset + i, tag.charCodeAt(i));
  };
  writeTag(0, 'RIFF');
  view.setUint32(4, 36 + dataLen, true);
  writeTag(8, 'WAVE');
  writeTag(12, 'fmt ');
  view.setUint32(16, 16, true);
  view.setUint16(20, pcm16 ? 1 : 3, true);
  view.setUint16(22, 1, true);
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * bytesPer, true);
  view.setUint16(32, bytesPer, true);
  view.setUint16(34, pcm16 ? 16 : 32, true);
  writeTag(36, 'data');
  view.setUint32(40, dataLen, true);
  samples.forEach((s, i) => {
    if (pcm16) {
      view.setInt16(44 + 2 * i, Math.max(-32768, Math.min(32767, Math.round(s * 32768))), true);
    } else {
      view.setFloat32(44 + 4 * i, s, true);
    }
  });
  return buffer;
}

describe('decodeWav', () => {
  it('decodes float32 to the original samples', () => {
    const samples = new Float32Array([0, 0.5, -0.5, 0.25]);
    const out = decodeWav(wavBytes(samples, 16000, false));
    expect(out.sampleRate).toBe(16000);
    expect(Array.from(out.samples)).toEqual(Array.from(samples));
  });

  it('decodes pcm16 within quantization error', () => {
    const samples = new Float32Array([0.1, -0.9, 0.7]);
    const out = decodeWav(wavBytes(samples, 8000, true));
    out.samples.forEach((s, i) => expect(Math.abs(s - samples[i])).toBeLessThan(1 / 32768));
  });

  it('rejects non-wav payloads', () => {
    expect(() => decodeWav(new ArrayBuffer(64))).toThrow(/RIFF/);
  });
});

describe('computePeaks', () => {
  it('captures min and max per bucket', () => {
    const samples = new Float32Array([0.1, 0.9, -0.4, 0.2, -0.8, 0.3]);
    const peaks = computePeaks(samples, 2);
    expect(peaks).toHaveLength(2);
    expect(peaks[0].max).toBeCloseTo(0.9);
    expect(peaks[0].min).toBeCloseTo(-0.4);
    expect(peaks[1].min).toBeCloseTo(-0.8);
  });

  it('handles empty input', () => {
    expect(computePeaks(new Float32Array(0), 10)).toEqual([]);
  });
});
