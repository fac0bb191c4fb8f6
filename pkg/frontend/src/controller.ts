/**
 * Editor state machine. Holds the spec document and uploaded table, keeps
 * the canvas in sync through the render service, and gates SVG export on
 * having an up-to-date valid render.
 *
 * Concurrency: edits bump a sequence number; at most one request chain is
 * in flight, and any response whose sequence is stale is discarded.
 */

import type { RenderService, ValidationReport, GalleryEntry } from './api.js';
import { previewTable, type DataRow, type TablePreview } from './data.js';
import {
  channelsFromCombo,
  cloneSpec,
  emptySpec,
  parseSpecText,
  serializeSpec,
  type SpecDoc,
} from './spec.js';

export interface CompatibilityAlert {
  reason: string;
  suggestions: string[][];
}

export interface EditorView {
  showPreview(preview: TablePreview): void;
  showBanner(message: string, retry?: () => void): void;
  clearBanner(): void;
  showCanvas(svg: Uint8Array): void;
  showModal(alert: CompatibilityAlert): void;
  closeModal(): void;
  setExportEnabled(enabled: boolean): void;
  showReport(report: ValidationReport): void;
}

export type Dimension = 'channel' | 'basemap' | 'labels' | 'highlight';

export const DEBOUNCE_MS = 250;

type Outcome =
  | { kind: 'rendered'; svg: Uint8Array; report: ValidationReport }
  | { kind: 'invalid'; report: ValidationReport };

export class EditorController {
  private specDoc: SpecDoc = emptySpec();
  private dataRows: DataRow[] | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private seq = 0;
  private inflight = false;
  private lastSvg: Uint8Array | null = null;
  private exportable = false;

  constructor(
    private readonly client: RenderService,
    private readonly view: EditorView,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  // -- state access ----------------------------------------------------------

  currentSpec(): SpecDoc {
    return cloneSpec(this.specDoc);
  }

  currentData(): DataRow[] | null {
    return this.dataRows ? [...this.dataRows] : null;
  }

  specText(): string {
    return serializeSpec(this.specDoc);
  }

  loadSpecText(text: string): void {
    this.specDoc = parseSpecText(text);
    this.invalidate();
    this.scheduleRefresh();
  }

  // -- operations ------------------------------------------------------------

  uploadData(text: string): void {
    const result = previewTable(text);
    if (!result.ok) {
      this.view.showBanner(result.error);
      return;
    }
    this.view.clearBanner();
    this.dataRows = result.rows;
    this.view.showPreview(result);
    this.invalidate();
    this.scheduleRefresh();
  }

  selectComponent(dimension: Dimension, choice: string, params: Record<string, unknown> = {}): void {
    switch (dimension) {
      case 'channel': {
        const { slot, ...rest } = params;
        const index = typeof slot === 'number' ? slot : this.specDoc.channels.length;
        this.specDoc.channels[Math.min(index, this.specDoc.channels.length)] = {
          ...rest,
          kind: choice,
        };
        break;
      }
      case 'basemap':
        this.specDoc.basemap =
          Object.keys(params).length > 0 ? { kind: choice, ...params } : choice;
        break;
      case 'labels':
        if (choice === '') delete this.specDoc.labels;
        else this.specDoc.labels = { strategy: choice, ...params };
        break;
      case 'highlight':
        this.specDoc.highlights = [...(this.specDoc.highlights ?? []), { kind: choice, ...params }];
        break;
    }
    this.invalidate();
    this.scheduleRefresh();
  }

  removeChannel(slot: number): void {
    this.specDoc.channels.splice(slot, 1);
    this.invalidate();
    this.scheduleRefresh();
  }

  applySuggestion(combo: string[]): void {
    this.view.closeModal();
    this.specDoc.channels = channelsFromCombo(this.specDoc.channels, combo);
    this.invalidate();
    void this.refreshNow();
  }

  exportSvg(): Uint8Array {
    if (!this.exportable || this.lastSvg === null) {
      throw new Error('no up-to-date valid render to export');
    }
    return this.lastSvg;
  }

  get exportEnabled(): boolean {
    return this.exportable;
  }

  async loadGallery(): Promise<GalleryEntry[]> {
    try {
      return await this.client.gallery();
    } catch (err) {
      this.view.showBanner(`gallery unavailable: ${String(err)}`);
      return [];
    }
  }

  openGalleryEntry(entry: GalleryEntry): void {
    this.specDoc = cloneSpec(entry.spec);
    this.dataRows = entry.data.map((row) => ({ ...row }));
    this.invalidate();
    void this.refreshNow();
  }

  // -- render loop -----------------------------------------------------------

  private invalidate(): void {
    this.seq += 1;
    this.exportable = false;
    this.view.setExportEnabled(false);
  }

  private scheduleRefresh(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.refreshNow();
    }, this.debounceMs);
  }

  async refreshNow(): Promise<void> {
    if (this.inflight) return; // the running chain re-checks the sequence
    this.inflight = true;
    try {
      for (;;) {
        const seq = this.seq;
        if (this.dataRows === null || this.specDoc.channels.length === 0) return;
        const spec = cloneSpec(this.specDoc);
        const data = this.dataRows;
        let outcome: Outcome;
        try {
          outcome = await this.requestOnce(spec, data);
        } catch (err) {
          this.view.showBanner(`service unreachable: ${String(err)}`, () => void this.refreshNow());
          return;
        }
        if (seq !== this.seq) continue; // superseded by a newer edit
        this.applyOutcome(outcome);
        return;
      }
    } finally {
      this.inflight = false;
    }
  }

  private async requestOnce(spec: SpecDoc, data: DataRow[]): Promise<Outcome> {
    const report = await this.client.validate(spec, data);
    if (report.verdict !== 'valid') return { kind: 'invalid', report };
    const result = await this.client.render(spec, data);
    if (!result.ok) return { kind: 'invalid', report: result.report };
    return { kind: 'rendered', svg: result.svg, report };
  }

  private applyOutcome(outcome: Outcome): void {
    this.view.clearBanner();
    this.view.showReport(outcome.report);
    if (outcome.kind === 'rendered') {
      this.lastSvg = outcome.svg;
      this.exportable = true;
      this.view.closeModal();
      this.view.showCanvas(outcome.svg);
      this.view.setExportEnabled(true);
      return;
    }
    const error = outcome.report.issues.find((i) => i.severity === 'error');
    this.view.showModal({
      reason: error ? error.message : 'the service rejected this spec',
      suggestions: outcome.report.suggestions,
    });
  }
}
