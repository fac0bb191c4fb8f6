/** Browser entry point wiring the controller to the DOM view. */

import { ServiceClient } from './api.js';
import { EditorController } from './controller.js';
import { DomView, downloadSvg } from './views/dom.js';
import { ABOUT_HTML, renderGallery } from './views/pages.js';

const BASE_URL = (window as { GEOGLYPH_SERVICE?: string }).GEOGLYPH_SERVICE ?? 'http://127.0.0.1:8008';

const CHANNELS = [
  'color_intensity', 'color_hue', 'length_2d', 'length_3d', 'size',
  'quantity', 'glyph', 'directional_flow', 'non_directional_flow', 'text',
];
const BASEMAPS = ['implicit', 'minimal_political', 'shape_based_uniform', 'shape_based_varied'];
const LABELS = ['', 'situated', 'linked_convenient', 'linked_aligned', 'matched_color'];

export function bootstrap(root: HTMLElement): EditorController {
  const client = new ServiceClient(BASE_URL);
  const view = new DomView(root, {
    onSuggestion: (combo) => controller.applySuggestion(combo),
  });
  const controller = new EditorController(client, view);

  const panel = root.querySelector<HTMLElement>('#panel')!;
  panel.innerHTML = `
    <label>Data <input type="file" id="data-file" accept=".json"></label>
    <label>Channel 1 <select id="ch0">${options(CHANNELS)}</select></label>
    <label>Channel 2 <select id="ch1"><option value="">none</option>${options(CHANNELS)}</select></label>
    <label>Base map <select id="basemap">${options(BASEMAPS)}</select></label>
    <label>Labels <select id="labels">${options(LABELS)}</select></label>
    <nav><a href="#editor">Editor</a> <a href="#gallery">Gallery</a> <a href="#about">About</a></nav>
    <section id="gallery" class="page" hidden></section>
    <section id="about" class="page" hidden>${ABOUT_HTML}</section>`;

  panel.querySelector<HTMLInputElement>('#data-file')!.addEventListener('change', async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) controller.uploadData(await file.text());
  });
  bindSelect(panel, '#ch0', (v) => controller.selectComponent('channel', v, { slot: 0 }));
  bindSelect(panel, '#ch1', (v) =>
    v === '' ? controller.removeChannel(1) : controller.selectComponent('channel', v, { slot: 1 }));
  bindSelect(panel, '#basemap', (v) => controller.selectComponent('basemap', v));
  bindSelect(panel, '#labels', (v) => controller.selectComponent('labels', v));

  view.exportElement.addEventListener('click', () => downloadSvg(controller.exportSvg()));

  const galleryPage = panel.querySelector<HTMLElement>('#gallery')!;
  window.addEventListener('hashchange', async () => {
    const page = window.location.hash.slice(1) || 'editor';
    panel.querySelectorAll<HTMLElement>('.page').forEach((el) => (el.hidden = el.id !== page));
    if (page === 'gallery') {
      renderGallery(galleryPage, BASE_URL, await controller.loadGallery(), (entry) => {
        controller.openGalleryEntry(entry);
        window.location.hash = '#editor';
      });
    }
  });
  return controller;
}

function options(values: string[]): string {
  return values.map((v) => `<option value="${v}">${v || 'none'}</option>`).join('');
}

function bindSelect(panel: HTMLElement, selector: string, apply: (value: string) => void): void {
  panel.querySelector<HTMLSelectElement>(selector)!.addEventListener('change', (ev) => {
    apply((ev.target as HTMLSelectElement).value);
  });
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  bootstrap(document.getElementById('app')!);
}
