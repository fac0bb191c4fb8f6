import { describe, expect, it } from 'vitest';

import { channelsFromCombo, emptySpec, parseSpecText, serializeSpec } from '../src/spec.js';

describe('spec document', () => {
  it('serializes and parses losslessly', () => {
    const doc = emptySpec();
    doc.channels.push({ kind: 'color_intensity', palette: ['#000000', '#ffffff'] });
    doc.labels = { strategy: 'situated' };
    const text = serializeSpec(doc);
    expect(parseSpecText(text)).toEqual(doc);
  });

  it('rejects structurally broken documents', () => {
    expect(() => parseSpecText('nope')).toThrow(/JSON/);
    expect(() => parseSpecText('[1]')).toThrow(/object/);
    expect(() => parseSpecText('{}')).toThrow(/channels/);
    expect(() => parseSpecText('{"channels": [{"palette": []}]}')).toThrow(/kind/);
  });
});

describe('channelsFromCombo', () => {
  it('keeps params already chosen for a kind', () => {
    const existing = [{ kind: 'color_intensity', palette: ['#111111', '#222222'] }];
    const out = channelsFromCombo(existing, ['color_intensity', 'length_2d']);
    expect(out[0]).toEqual(existing[0]);
    expect(out[1]).toEqual({ kind: 'length_2d' });
  });

  it('marks suggested glyphs monochrome with a default icon', () => {
    const out = channelsFromCombo([], ['color_hue', 'glyph']);
    expect(out[1]).toEqual({ kind: 'glyph', glyph: { icon: 'pin' }, glyph_monochrome: true });
  });
});
