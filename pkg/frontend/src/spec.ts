/**
 * The editor's spec document: a plain JSON structure mirroring what the
 * render service accepts. The editor never interprets the design rules
 * itself; it only assembles this document and asks the service.
 */

export interface ChannelDoc {
  kind: string;
  [param: string]: unknown;
}

export interface SpecDoc {
  name?: string;
  channels: ChannelDoc[];
  basemap?: string | Record<string, unknown>;
  labels?: Record<string, unknown>;
  highlights?: Record<string, unknown>[];
  projection?: string;
  viewport?: [number, number];
  seed?: number;
  aliases?: Record<string, string>;
}

export function emptySpec(): SpecDoc {
  return { channels: [], viewport: [800, 600] };
}

export function cloneSpec(doc: SpecDoc): SpecDoc {
  return JSON.parse(JSON.stringify(doc)) as SpecDoc;
}

export function serializeSpec(doc: SpecDoc): string {
  return JSON.stringify(doc, null, 2);
}

/** Parse editor-exported spec text back into a document. */
export function parseSpecText(text: string): SpecDoc {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new Error(`spec is not valid JSON: ${String(err)}`);
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    throw new Error('spec must be a JSON object');
  }
  const record = doc as Record<string, unknown>;
  if (!Array.isArray(record.channels)) {
    throw new Error('spec needs a channels array');
  }
  for (const ch of record.channels) {
    if (typeof ch !== 'object' || ch === null || typeof (ch as ChannelDoc).kind !== 'string') {
      throw new Error('every channel needs a string kind');
    }
  }
  return record as unknown as SpecDoc;
}

/** Channel list for a suggested combination, keeping params already chosen. */
export function channelsFromCombo(existing: ChannelDoc[], combo: string[]): ChannelDoc[] {
  const byKind = new Map(existing.map((c) => [c.kind, c]));
  return combo.map((kind) => {
    const base: ChannelDoc = { ...(byKind.get(kind) ?? {}), kind };
    if (kind === 'glyph') {
      // suggested glyphs are monochrome so conditional pairs stay legal
      base.glyph = base.glyph ?? { icon: 'pin' };
      base.glyph_monochrome = true;
    }
    return base;
  });
}
