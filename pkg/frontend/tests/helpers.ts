import type {
  Catalog,
  GalleryEntry,
  RenderOutcome,
  RenderService,
  ValidationReport,
} from '../src/api.js';
import type { CompatibilityAlert, EditorView } from '../src/controller.js';
import type { DataRow, TablePreview } from '../src/data.js';
import type { SpecDoc } from '../src/spec.js';

export class RecordingView implements EditorView {
  preview: TablePreview | null = null;
  banner: string | null = null;
  canvas: Uint8Array | null = null;
  modal: CompatibilityAlert | null = null;
  exportEnabled = false;
  report: ValidationReport | null = null;
  retry: (() => void) | undefined;

  showPreview(preview: TablePreview): void {
    this.preview = preview;
  }
  showBanner(message: string, retry?: () => void): void {
    this.banner = message;
    this.retry = retry;
  }
  clearBanner(): void {
    this.banner = null;
    this.retry = undefined;
  }
  showCanvas(svg: Uint8Array): void {
    this.canvas = svg;
  }
  showModal(alert: CompatibilityAlert): void {
    this.modal = alert;
  }
  closeModal(): void {
    this.modal = null;
  }
  setExportEnabled(enabled: boolean): void {
    this.exportEnabled = enabled;
  }
  showReport(report: ValidationReport): void {
    this.report = report;
  }
}

export const VALID: ValidationReport = { verdict: 'valid', issues: [], suggestions: [] };

export function invalidReport(reason: string, suggestions: string[][]): ValidationReport {
  return {
    verdict: 'invalid',
    issues: [{ code: 'incompatible_pair', severity: 'error', message: reason, element: 'channels' }],
    suggestions,
  };
}

type Deferred<T> = { promise: Promise<T>; resolve: (value: T) => void };

function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((r) => (resolve = r));
  return { promise, resolve };
}

/**
 * Scripted service double. By default every spec validates and renders to
 * bytes derived from the spec's channel list, so tests can tell responses
 * apart. Individual calls can be held open through `holdNextRender`.
 */
export class FakeService implements RenderService {
  validateCalls: SpecDoc[] = [];
  renderCalls: SpecDoc[] = [];
  inflightRenders = 0;
  maxInflightRenders = 0;
  reportFor: (spec: SpecDoc) => ValidationReport = () => VALID;
  private heldRenders: Deferred<void>[] = [];

  holdNextRender(): () => void {
    const gate = deferred<void>();
    this.heldRenders.push(gate);
    return () => gate.resolve(undefined);
  }

  svgFor(spec: SpecDoc): Uint8Array {
    return new TextEncoder().encode(`<svg>${spec.channels.map((c) => c.kind).join('+')}</svg>`);
  }

  async validate(spec: SpecDoc): Promise<ValidationReport> {
    this.validateCalls.push(spec);
    return this.reportFor(spec);
  }

  async render(spec: SpecDoc): Promise<RenderOutcome> {
    this.renderCalls.push(spec);
    this.inflightRenders += 1;
    this.maxInflightRenders = Math.max(this.maxInflightRenders, this.inflightRenders);
    const gate = this.heldRenders.shift();
    if (gate) await gate.promise;
    this.inflightRenders -= 1;
    return { ok: true, svg: this.svgFor(spec) };
  }

  async suggest(spec: SpecDoc): Promise<ValidationReport> {
    return this.reportFor(spec);
  }

  async catalog(): Promise<Catalog> {
    return { channels: [], basemaps: [], label_strategies: [], highlights: [], matrix: [] };
  }

  async gallery(): Promise<GalleryEntry[]> {
    return [];
  }
}

export const QUANT_ROWS: DataRow[] = [
  { name: 'alpha', value: 10 },
  { name: 'beta', value: 25 },
];

export const QUANT_JSON = JSON.stringify(QUANT_ROWS);

export function decode(bytes: Uint8Array | null): string {
  return bytes === null ? '' : new TextDecoder().decode(bytes);
}
