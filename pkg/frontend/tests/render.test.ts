// Fixture-driven rendering checks against a recorded /api/v1/predict response.
import { describe, expect, it } from 'vitest';

import { renderHistogram, renderNeighborTable, renderResult, renderSummaryStrip } from '../src/render';
import type { PredictionResponse } from '../src/types';
import fixture from './fixtures/predict_response.json';

const response = fixture as unknown as PredictionResponse;

describe('histogram rendering', () => {
  it('draws every served bin and carries total mass 1.0', () => {
    const panel = renderHistogram(response);
    const bars = panel.querySelectorAll<HTMLElement>('.bar');
    expect(bars.length).toBe(response.histogram.length);
    const total = Array.from(bars).reduce((acc, bar) => acc + Number(bar.dataset.mass), 0);
    expect(Math.abs(total - 1.0)).toBeLessThanOrEqual(1e-9);
    // bins are rendered exactly as served, no re-binning
    bars.forEach((bar, i) => {
      expect(Number(bar.dataset.lo)).toBe(response.histogram[i]!.lo);
      expect(Number(bar.dataset.hi)).toBe(response.histogram[i]!.hi);
      expect(Number(bar.dataset.mass)).toBe(response.histogram[i]!.mass);
    });
  });

  it('shades the two class regions at the 25 boundary', () => {
    const panel = renderHistogram(response);
    for (const bar of panel.querySelectorAll<HTMLElement>('.bar')) {
      const hi = Number(bar.dataset.hi);
      expect(bar.classList.contains(hi <= 25 ? 'band-le25' : 'band-gt25')).toBe(true);
    }
  });

  it('labels class probabilities verbatim from the response', () => {
    const panel = renderHistogram(response);
    const le = panel.querySelector<HTMLElement>('.prob-le25')!;
    const gt = panel.querySelector<HTMLElement>('.prob-gt25')!;
    expect(le.dataset.value).toBe(String(response.summary.binary_probs.le25));
    expect(gt.dataset.value).toBe(String(response.summary.binary_probs.gt25));
    const low = panel.querySelector<HTMLElement>('.prob-low')!;
    const mid = panel.querySelector<HTMLElement>('.prob-intermediate')!;
    const high = panel.querySelector<HTMLElement>('.prob-high')!;
    expect(low.dataset.value).toBe(String(response.summary.class_probs.low));
    expect(mid.dataset.value).toBe(String(response.summary.class_probs.intermediate));
    expect(high.dataset.value).toBe(String(response.summary.class_probs.high));
  });
});

describe('summary strip', () => {
  it('carries mean, median and SD verbatim', () => {
    const strip = renderSummaryStrip(response.summary);
    expect(strip.querySelector<HTMLElement>('.estimate-mean')!.dataset.value).toBe(
      String(response.summary.mean),
    );
    expect(strip.querySelector<HTMLElement>('.estimate-median')!.dataset.value).toBe(
      String(response.summary.median),
    );
    expect(strip.querySelector<HTMLElement>('.estimate-std-error')!.dataset.value).toBe(
      String(response.summary.std_error),
    );
    expect(strip.querySelector('.estimate-interval')!.textContent).toContain('90% interval');
  });
});

describe('neighbor table', () => {
  it('renders rows in the served weight-descending order', () => {
    const weights = response.neighbors.map((n) => n.weight);
    expect([...weights].sort((a, b) => b - a)).toEqual(weights); // fixture sanity
    const table = renderNeighborTable(response.neighbors);
    const rows = table.querySelectorAll<HTMLElement>('tbody tr');
    expect(rows.length).toBe(response.neighbors.length);
    rows.forEach((row, i) => {
      expect(row.dataset.id).toBe(response.neighbors[i]!.id);
      expect(Number(row.dataset.weight)).toBe(response.neighbors[i]!.weight);
    });
  });

  it('never reorders a deliberately shuffled list', () => {
    const shuffled = [...response.neighbors].reverse();
    const table = renderNeighborTable(shuffled);
    const ids = Array.from(table.querySelectorAll<HTMLElement>('tbody tr')).map((r) => r.dataset.id);
    expect(ids).toEqual(shuffled.map((n) => n.id));
  });
});

describe('full result rendering', () => {
  it('is deterministic for a fixed response', () => {
    const a = document.createElement('div');
    const b = document.createElement('div');
    renderResult(a, response);
    renderResult(b, response);
    expect(a.innerHTML).toBe(b.innerHTML);
  });

  it('clears stale marking on fresh render', () => {
    const container = document.createElement('div');
    container.classList.add('stale');
    renderResult(container, response);
    expect(container.classList.contains('stale')).toBe(false);
  });
});
