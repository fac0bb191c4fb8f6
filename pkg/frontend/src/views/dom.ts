/**
 * Browser view: renders the editor layout (components panel left, canvas
 * right), the alert modal, banners, and the export button.
 */

import type { ValidationReport } from '../api.js';
import type { CompatibilityAlert, EditorView } from '../controller.js';
import type { TablePreview } from '../data.js';

export interface DomViewHooks {
  onSuggestion(combo: string[]): void;
  onRetry?(): void;
}

export class DomView implements EditorView {
  private readonly canvas: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly preview: HTMLElement;
  private readonly report: HTMLElement;
  private readonly modal: HTMLElement;
  private readonly exportButton: HTMLButtonElement;
  private lastRetry: (() => void) | undefined;

  constructor(
    root: HTMLElement,
    private readonly hooks: DomViewHooks,
  ) {
    root.innerHTML = `
      <div class="studio">
        <aside class="panel" id="panel"></aside>
        <main>
          <div id="banner" class="banner" hidden></div>
          <div id="preview" class="preview"></div>
          <div id="canvas" class="canvas"><p class="hint">Upload data and pick a channel.</p></div>
          <div id="report" class="report"></div>
          <button id="export" disabled>Export SVG</button>
        </main>
      </div>
      <dialog id="modal">
        <p id="modal-reason"></p>
        <ul id="modal-suggestions"></ul>
        <button id="modal-close">Close</button>
      </dialog>`;
    this.canvas = root.querySelector('#canvas')!;
    this.banner = root.querySelector('#banner')!;
    this.preview = root.querySelector('#preview')!;
    this.report = root.querySelector('#report')!;
    this.modal = root.querySelector('#modal')!;
    this.exportButton = root.querySelector('#export')!;
    root.querySelector('#modal-close')!.addEventListener('click', () => this.closeModal());
    this.banner.addEventListener('click', () => this.lastRetry?.());
  }

  get exportElement(): HTMLButtonElement {
    return this.exportButton;
  }

  showPreview(preview: TablePreview): void {
    const head = preview.columns.map((c) => `<th>${escapeHtml(c)}</th>`).join('');
    const body = preview.rows
      .slice(0, 8)
      .map(
        (row) =>
          `<tr>${preview.columns
            .map((c) => `<td>${escapeHtml(String(row[c] ?? ''))}</td>`)
            .join('')}</tr>`,
      )
      .join('');
    this.preview.innerHTML = `<span class="badge">${preview.kind}</span>
      <table><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>`;
  }

  showBanner(message: string, retry?: () => void): void {
    this.lastRetry = retry;
    this.banner.textContent = retry ? `${message} (click to retry)` : message;
    this.banner.hidden = false;
  }

  clearBanner(): void {
    this.lastRetry = undefined;
    this.banner.hidden = true;
  }

  showCanvas(svg: Uint8Array): void {
    this.canvas.innerHTML = new TextDecoder().decode(svg);
  }

  showModal(alert: CompatibilityAlert): void {
    this.modal.querySelector('#modal-reason')!.textContent = alert.reason;
    const list = this.modal.querySelector('#modal-suggestions')!;
    list.innerHTML = '';
    for (const combo of alert.suggestions) {
      const item = document.createElement('li');
      const button = document.createElement('button');
      button.textContent = combo.join(' + ');
      button.addEventListener('click', () => this.hooks.onSuggestion(combo));
      item.appendChild(button);
      list.appendChild(item);
    }
    (this.modal as HTMLDialogElement).showModal();
  }

  closeModal(): void {
    const dialog = this.modal as HTMLDialogElement;
    if (dialog.open) dialog.close();
  }

  setExportEnabled(enabled: boolean): void {
    this.exportButton.disabled = !enabled;
  }

  showReport(report: ValidationReport): void {
    this.report.innerHTML = report.issues
      .map((i) => `<p class="${i.severity}">${escapeHtml(i.message)}</p>`)
      .join('');
  }
}

/** Trigger a browser download of the exact exported bytes. */
export function downloadSvg(bytes: Uint8Array, filename = 'infographic.svg'): void {
  const blob = new Blob([bytes.buffer as ArrayBuffer], { type: 'image/svg+xml' });
  const url = URL.createObjectURL(blob);
  const link = document.createElement('a');
  link.href = url;
  link.download = filename;
  link.click();
  URL.revokeObjectURL(url);
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}
