/**
 * Typed client for the render service. All design verdicts and all SVG
 * bytes come from these endpoints; the editor never rebuilds either.
 */

import type { DataRow } from './data.js';
import type { SpecDoc } from './spec.js';

export interface Issue {
  code: string;
  severity: 'error' | 'warning';
  message: string;
  element: string;
}

export interface ValidationReport {
  verdict: 'valid' | 'invalid';
  issues: Issue[];
  suggestions: string[][];
}

export type RenderOutcome =
  | { ok: true; svg: Uint8Array }
  | { ok: false; report: ValidationReport };

export interface GalleryEntry {
  name: string;
  title: string;
  spec: SpecDoc;
  data: DataRow[];
}

export interface MatrixEntry {
  a: string;
  b: string;
  verdict: string;
  reason: string;
}

export interface Catalog {
  channels: string[];
  basemaps: { kind: string; supported: boolean }[];
  label_strategies: string[];
  highlights: string[];
  matrix: MatrixEntry[];
}

export interface RenderService {
  validate(spec: SpecDoc, data: DataRow[]): Promise<ValidationReport>;
  render(spec: SpecDoc, data: DataRow[]): Promise<RenderOutcome>;
  suggest(spec: SpecDoc, data: DataRow[]): Promise<ValidationReport>;
  catalog(): Promise<Catalog>;
  gallery(): Promise<GalleryEntry[]>;
}

type FetchLike = typeof fetch;

export class ServiceClient implements RenderService {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async post(path: string, spec: SpecDoc, data: DataRow[]): Promise<Response> {
    return this.fetchImpl(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ spec, data }),
    });
  }

  async validate(spec: SpecDoc, data: DataRow[]): Promise<ValidationReport> {
    const res = await this.post('/validate', spec, data);
    if (!res.ok) throw new Error(`validate failed with status ${res.status}`);
    return (await res.json()) as ValidationReport;
  }

  async render(spec: SpecDoc, data: DataRow[]): Promise<RenderOutcome> {
    const res = await this.post('/render', spec, data);
    if (res.status === 200) {
      return { ok: true, svg: new Uint8Array(await res.arrayBuffer()) };
    }
    if (res.status === 422) {
      return { ok: false, report: (await res.json()) as ValidationReport };
    }
    throw new Error(`render failed with status ${res.status}`);
  }

  async suggest(spec: SpecDoc, data: DataRow[]): Promise<ValidationReport> {
    const res = await this.post('/suggest', spec, data);
    if (!res.ok) throw new Error(`suggest failed with status ${res.status}`);
    return (await res.json()) as ValidationReport;
  }

  async catalog(): Promise<Catalog> {
    const res = await this.fetchImpl(`${this.baseUrl}/catalog`);
    if (!res.ok) throw new Error(`catalog failed with status ${res.status}`);
    return (await res.json()) as Catalog;
  }

  async gallery(): Promise<GalleryEntry[]> {
    const res = await this.fetchImpl(`${this.baseUrl}/gallery`);
    if (!res.ok) throw new Error(`gallery failed with status ${res.status}`);
    return (await res.json()) as GalleryEntry[];
  }
}
