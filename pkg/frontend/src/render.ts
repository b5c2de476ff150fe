/**
 * DOM rendering for prediction results.
 *
 * Bars, labels and table cells are built straight from response fields:
 * the served histogram is drawn bin-for-bin (no client re-binning), class
 * probabilities are attached verbatim via data-value attributes, and the
 * neighbor table preserves the served (weight-descending) order. Rendering
 * is a pure function of the response, so identical responses produce
 * identical DOM.
 */

import { BINARY_CUT, LOW_CUT } from './types';
import type { NeighborEntry, PredictionResponse, Summary } from './types';

const NEIGHBOR_COLUMNS: Array<{ key: string; label: string }> = [
  { key: 'age', label: 'age' },
  { key: 'tumor_size', label: 'size' },
  { key: 'p53', label: 'p53' },
  { key: 'sbr_grade', label: 'SBR' },
  { key: 'mitotic_grade', label: 'mitotic' },
  { key: 'er', label: 'ER' },
  { key: 'pr', label: 'PR' },
  { key: 'ki67', label: 'Ki67' },
  { key: 'lymph_nodes', label: 'nodes' },
];

const el = <K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] => {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
};

const fmt = (value: number, digits = 1): string => value.toFixed(digits);

/**
 * A probability label whose data-value carries the response value verbatim;
 * the visible text is a display rounding of that same value.
 */
const probLabel = (className: string, caption: string, value: number): HTMLElement => {
  const span = el('span', className);
  span.dataset.value = String(value);
  span.textContent = `${caption} = ${value.toFixed(3)}`;
  return span;
};

export function renderHistogram(response: PredictionResponse): HTMLElement {
  const panel = el('div', 'histogram-panel');
  const bars = el('div', 'histogram');
  const peak = Math.max(...response.histogram.map((b) => b.mass), 1e-12);
  for (const bin of response.histogram) {
    const bar = el('div', 'bar');
    bar.classList.add(bin.hi <= BINARY_CUT ? 'band-le25' : 'band-gt25');
    bar.dataset.lo = String(bin.lo);
    bar.dataset.hi = String(bin.hi);
    bar.dataset.mass = String(bin.mass);
    bar.style.height = `${(100 * bin.mass) / peak}%`;
    bar.title = `(${bin.lo}, ${bin.hi}]: mass ${bin.mass.toFixed(4)}`;
    bars.appendChild(bar);
  }
  panel.appendChild(bars);

  const binary = el('div', 'binary-probs');
  binary.appendChild(probLabel('prob prob-le25', 'P(ODX ≤ 25)', response.summary.binary_probs.le25));
  binary.appendChild(probLabel('prob prob-gt25', 'P(ODX > 25)', response.summary.binary_probs.gt25));
  panel.appendChild(binary);

  const bands = el('div', 'band-probs');
  bands.appendChild(probLabel('prob prob-low', `P(< ${LOW_CUT})`, response.summary.class_probs.low));
  bands.appendChild(
    probLabel('prob prob-intermediate', `P(${LOW_CUT}–${BINARY_CUT})`, response.summary.class_probs.intermediate),
  );
  bands.appendChild(probLabel('prob prob-high', `P(> ${BINARY_CUT})`, response.summary.class_probs.high));
  panel.appendChild(bands);
  return panel;
}

export function renderSummaryStrip(summary: Summary): HTMLElement {
  const strip = el('div', 'summary-strip');
  const items: Array<[string, string, number | null, string]> = [
    ['mean', 'Mean', summary.mean, fmt(summary.mean)],
    ['median', 'Median', summary.median, fmt(summary.median)],
    ['std-error', 'SD', summary.std_error, `±${fmt(summary.std_error)}`],
    [
      'interval',
      '90% interval',
      null,
      `[${fmt(summary.credible_interval_90[0])}, ${fmt(summary.credible_interval_90[1])}]`,
    ],
  ];
  for (const [cls, caption, value, text] of items) {
    const item = el('span', `estimate estimate-${cls}`);
    if (value !== null) item.dataset.value = String(value);
    item.textContent = `${caption}: ${text}`;
    strip.appendChild(item);
  }
  return strip;
}

export function renderNeighborTable(neighbors: NeighborEntry[]): HTMLElement {
  const table = el('table', 'neighbor-table');
  const head = el('thead');
  const headRow = el('tr');
  for (const label of ['#', 'patient', 'weight', ...NEIGHBOR_COLUMNS.map((c) => c.label), 'ODX']) {
    headRow.appendChild(el('th', undefined, label));
  }
  head.appendChild(headRow);
  table.appendChild(head);

  const body = el('tbody');
  for (const entry of neighbors) {
    const row = el('tr', 'neighbor-row');
    row.dataset.weight = String(entry.weight);
    row.dataset.id = entry.id;
    row.appendChild(el('td', undefined, String(entry.rank)));
    row.appendChild(el('td', undefined, entry.id));
    const weightCell = el('td', 'weight', entry.weight.toFixed(4));
    weightCell.dataset.value = String(entry.weight);
    row.appendChild(weightCell);
    for (const column of NEIGHBOR_COLUMNS) {
      const value = entry.features[column.key];
      const text =
        column.key === 'lymph_nodes' && value === -1 ? 'NA' : value === undefined ? '' : fmt(value, 1);
      row.appendChild(el('td', undefined, text));
    }
    row.appendChild(el('td', 'odx', fmt(entry.odx_score, 1)));
    body.appendChild(row);
  }
  table.appendChild(body);
  return table;
}

export function renderResult(container: HTMLElement, response: PredictionResponse): void {
  container.replaceChildren();
  container.classList.remove('stale');
  container.appendChild(renderHistogram(response));
  container.appendChild(renderSummaryStrip(response.summary));
  const caption = el('div', 'neighbor-caption', 'Most similar cohort patients');
  container.appendChild(caption);
  container.appendChild(renderNeighborTable(response.neighbors));
  if (response.warnings.length > 0) {
    const warnings = el('div', 'warnings', response.warnings.join('; '));
    container.appendChild(warnings);
  }
}

/** Mark a rendered result as stale (kept on screen after a failed refresh). */
export function markStale(container: HTMLElement): void {
  container.classList.add('stale');
}

export function renderBanner(container: HTMLElement, message: string, retryable: boolean): HTMLElement {
  const banner = el('div', retryable ? 'banner banner-retryable' : 'banner', message);
  container.replaceChildren(banner);
  return banner;
}
