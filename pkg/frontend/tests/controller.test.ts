import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { EditorController } from '../src/controller.js';
import {
  decode,
  FakeService,
  invalidReport,
  QUANT_JSON,
  RecordingView,
  VALID,
} from './helpers.js';

describe('upload_data', () => {
  it('shows a preview with the inferred field kind', () => {
    const view = new RecordingView();
    const controller = new EditorController(new FakeService(), view);
    controller.uploadData(QUANT_JSON);
    expect(view.preview?.kind).toBe('quantitative');
    expect(view.preview?.rows).toHaveLength(2);
    expect(view.banner).toBeNull();
  });

  it('flags flow-shaped files', () => {
    const view = new RecordingView();
    const controller = new EditorController(new FakeService(), view);
    controller.uploadData(JSON.stringify([{ name: 'a', to: 'b', magnitude: 3 }]));
    expect(view.preview?.kind).toBe('flow');
  });

  it('malformed text raises a banner and changes nothing', () => {
    const view = new RecordingView();
    const controller = new EditorController(new FakeService(), view);
    controller.uploadData('{nope');
    expect(view.banner).toMatch(/JSON/);
    expect(view.preview).toBeNull();
    expect(controller.currentData()).toBeNull();
  });
});

describe('render loop', () => {
  let service: FakeService;
  let view: RecordingView;
  let controller: EditorController;

  beforeEach(() => {
    vi.useFakeTimers();
    service = new FakeService();
    view = new RecordingView();
    controller = new EditorController(service, view);
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  async function settle(): Promise<void> {
    await vi.advanceTimersByTimeAsync(250);
  }

  it('debounces rapid edits into a single request', async () => {
    controller.uploadData(QUANT_JSON);
    await settle();
    service.validateCalls = [];
    controller.selectComponent('channel', 'color_intensity', { slot: 0 });
    await vi.advanceTimersByTimeAsync(100);
    controller.selectComponent('channel', 'length_2d', { slot: 1 });
    await vi.advanceTimersByTimeAsync(249);
    expect(service.validateCalls).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(1);
    expect(service.validateCalls).toHaveLength(1);
    expect(decode(view.canvas)).toBe('<svg>color_intensity+length_2d</svg>');
  });

  it('discards stale responses and keeps one request in flight', async () => {
    controller.uploadData(QUANT_JSON);
    controller.selectComponent('channel', 'color_intensity', { slot: 0 });
    const release = service.holdNextRender();
    await settle(); // first request now blocked inside render
    controller.selectComponent('channel', 'size', { slot: 0 });
    await settle(); // debounce fires but the chain is already in flight
    expect(service.renderCalls).toHaveLength(1);
    release();
    await vi.runAllTimersAsync();
    // stale first response discarded; chain re-requested the newer spec
    expect(service.renderCalls).toHaveLength(2);
    expect(decode(view.canvas)).toBe('<svg>size</svg>');
    expect(service.maxInflightRenders).toBe(1);
  });

  it('network failure shows a banner whose retry re-renders', async () => {
    controller.uploadData(QUANT_JSON);
    controller.selectComponent('channel', 'color_intensity', { slot: 0 });
    const failOnce = vi
      .spyOn(service, 'validate')
      .mockRejectedValueOnce(new Error('connection refused'));
    await settle();
    expect(view.banner).toMatch(/unreachable/);
    expect(view.canvas).toBeNull();
    failOnce.mockRestore();
    view.retry?.();
    await vi.runAllTimersAsync();
    expect(view.banner).toBeNull();
    expect(decode(view.canvas)).toContain('color_intensity');
  });
});

describe('compatibility alerts', () => {
  it('invalid pair opens a modal; applying a suggestion fixes the canvas', async () => {
    vi.useFakeTimers();
    const service = new FakeService();
    service.reportFor = (spec) =>
      spec.channels.some((c) => c.kind === 'color_hue')
        ? invalidReport('color_intensity cannot be combined with color_hue', [
            ['color_intensity', 'length_2d'],
          ])
        : VALID;
    const view = new RecordingView();
    const controller = new EditorController(service, view);
    controller.uploadData(QUANT_JSON);
    controller.selectComponent('channel', 'color_intensity', { slot: 0 });
    controller.selectComponent('channel', 'color_hue', { slot: 1 });
    await vi.advanceTimersByTimeAsync(250);
    expect(view.modal?.reason).toMatch(/cannot be combined/);
    expect(view.modal?.suggestions.length).toBeGreaterThan(0);
    expect(view.exportEnabled).toBe(false);

    controller.applySuggestion(view.modal!.suggestions[0]!);
    await vi.runAllTimersAsync();
    expect(view.modal).toBeNull();
    expect(decode(view.canvas)).toBe('<svg>color_intensity+length_2d</svg>');
    vi.useRealTimers();
  });
});

describe('export_svg', () => {
  it('is disabled before any render, enabled after, disabled after edits', async () => {
    vi.useFakeTimers();
    const service = new FakeService();
    const view = new RecordingView();
    const controller = new EditorController(service, view);
    expect(controller.exportEnabled).toBe(false);
    expect(() => controller.exportSvg()).toThrow(/no up-to-date/);

    controller.uploadData(QUANT_JSON);
    controller.selectComponent('channel', 'color_intensity', { slot: 0 });
    await vi.advanceTimersByTimeAsync(250);
    expect(controller.exportEnabled).toBe(true);
    expect(controller.exportSvg()).toBe(view.canvas); // the exact same bytes

    controller.selectComponent('basemap', 'implicit');
    expect(controller.exportEnabled).toBe(false);
    expect(() => controller.exportSvg()).toThrow();
    await vi.advanceTimersByTimeAsync(250);
    expect(controller.exportEnabled).toBe(true);
    vi.useRealTimers();
  });
});

describe('gallery and spec state', () => {
  it('opening a gallery entry loads its spec into the editor', () => {
    const service = new FakeService();
    const controller = new EditorController(service, new RecordingView());
    const entry = {
      name: 'demo',
      title: 'Demo',
      spec: { channels: [{ kind: 'color_intensity' }], viewport: [800, 600] as [number, number] },
      data: [{ name: 'alpha', value: 1 }],
    };
    controller.openGalleryEntry(entry);
    expect(controller.currentSpec()).toEqual(entry.spec);
    expect(controller.currentSpec()).not.toBe(entry.spec); // deep copy
  });

  it('gallery failure yields an empty list, not a crash', async () => {
    const service = new FakeService();
    vi.spyOn(service, 'gallery').mockRejectedValue(new Error('down'));
    const view = new RecordingView();
    const controller = new EditorController(service, view);
    await expect(controller.loadGallery()).resolves.toEqual([]);
    expect(view.banner).toMatch(/unavailable/);
  });

  it('spec state round-trips through serialize and load', () => {
    const controller = new EditorController(new FakeService(), new RecordingView());
    controller.selectComponent('channel', 'size', { slot: 0, cartogram: true });
    controller.selectComponent('labels', 'linked_aligned', { sides: ['left', 'right'] });
    controller.selectComponent('highlight', 'contour', { region: 'france' });
    const text = controller.specText();

    const reloaded = new EditorController(new FakeService(), new RecordingView());
    reloaded.loadSpecText(text);
    expect(reloaded.currentSpec()).toEqual(controller.currentSpec());
    expect(reloaded.specText()).toBe(text);
  });
});
