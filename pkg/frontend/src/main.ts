/**
 * Page glue: submit renders the baseline result; subsequent edits re-query
 * through the debounced what-if controller and render side by side with the
 * shift in P(ODX > 25) highlighted.
 */

import { ApiClient, ApiError, defaultBaseUrl } from './api';
import { buildPatientForm } from './form';
import { markStale, renderBanner, renderResult } from './render';
import { WhatIfController } from './whatif';
import type { PredictionResponse } from './types';

export function mountApp(root: HTMLElement, client: ApiClient = new ApiClient(defaultBaseUrl())): void {
  root.replaceChildren();
  const formPanel = document.createElement('section');
  formPanel.id = 'form-panel';
  const statusPanel = document.createElement('div');
  statusPanel.id = 'status-panel';
  const baselinePanel = document.createElement('section');
  baselinePanel.id = 'baseline-panel';
  const whatIfPanel = document.createElement('section');
  whatIfPanel.id = 'whatif-panel';
  const deltaPanel = document.createElement('div');
  deltaPanel.id = 'delta-panel';
  root.append(formPanel, statusPanel, baselinePanel, deltaPanel, whatIfPanel);

  const form = buildPatientForm();
  formPanel.appendChild(form.element);

  const whatIf = new WhatIfController(
    (features) => client.predict(features),
    {
      onResult: (_baseline, edited, delta) => {
        renderResult(whatIfPanel, edited);
        deltaPanel.dataset.delta = String(delta);
        const direction = delta > 0 ? '↑' : delta < 0 ? '↓' : '±';
        deltaPanel.textContent = `Δ P(ODX > 25) = ${direction} ${Math.abs(delta).toFixed(3)}`;
      },
      onError: (message) => {
        markStale(whatIfPanel);
        renderBanner(statusPanel, message, true);
      },
    },
  );

  form.setOnSubmit(async (features) => {
    statusPanel.replaceChildren();
    statusPanel.textContent = 'predicting...';
    let response: PredictionResponse;
    try {
      response = await client.predict(features);
    } catch (err) {
      const message =
        err instanceof ApiError && err.failure.kind === 'unavailable'
          ? 'model not loaded'
          : err instanceof Error
            ? err.message
            : String(err);
      markStale(baselinePanel);
      renderBanner(statusPanel, message, true);
      return;
    }
    statusPanel.replaceChildren();
    renderResult(baselinePanel, response);
    whatIfPanel.replaceChildren();
    deltaPanel.textContent = '';
    whatIf.setBaseline(response);
  });

  form.setOnEdit((features) => {
    whatIf.edit(features);
  });
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  mountApp(document.getElementById('app')!);
}
