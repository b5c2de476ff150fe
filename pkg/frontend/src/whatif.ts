/**
 * What-if exploration: keep the submitted baseline, re-query on debounced
 * field edits, and report the shift in P(ODX > 25) between baseline and the
 * edited scenario. Only the latest in-flight edit may render (latest wins);
 * a failed edit leaves the baseline untouched.
 */

import type { FeaturePayload, PredictionResponse } from './types';

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, waitMs);
  };
}

/**
 * Difference in P(ODX > 25), edited minus baseline, straight from the
 * response fields. Identical responses give exactly 0.
 */
export function deltaGt25(baseline: PredictionResponse, edited: PredictionResponse): number {
  return edited.summary.binary_probs.gt25 - baseline.summary.binary_probs.gt25;
}

export interface WhatIfEvents {
  onResult: (baseline: PredictionResponse, edited: PredictionResponse, delta: number) => void;
  onError: (message: string) => void;
}

export class WhatIfController {
  readonly debounceMs: number;
  private predictFn: (features: FeaturePayload) => Promise<PredictionResponse>;
  private events: WhatIfEvents;
  private baseline: PredictionResponse | null = null;
  private requestSeq = 0;
  private scheduled: (features: FeaturePayload) => void;

  constructor(
    predictFn: (features: FeaturePayload) => Promise<PredictionResponse>,
    events: WhatIfEvents,
    debounceMs = 300,
  ) {
    this.predictFn = predictFn;
    this.events = events;
    this.debounceMs = debounceMs;
    this.scheduled = debounce((features: FeaturePayload) => {
      void this.issue(features);
    }, debounceMs);
  }

  setBaseline(response: PredictionResponse): void {
    this.baseline = response;
  }

  hasBaseline(): boolean {
    return this.baseline !== null;
  }

  /** Debounced entry point: rapid successive edits issue one request. */
  edit(features: FeaturePayload): void {
    if (this.baseline === null) return;
    this.scheduled(features);
  }

  private async issue(features: FeaturePayload): Promise<void> {
    const seq = ++this.requestSeq;
    let edited: PredictionResponse;
    try {
      edited = await this.predictFn(features);
    } catch (err) {
      if (seq === this.requestSeq) {
        this.events.onError(err instanceof Error ? err.message : String(err));
      }
      return;
    }
    if (seq !== this.requestSeq || this.baseline === null) {
      return; // superseded by a newer edit
    }
    this.events.onResult(this.baseline, edited, deltaGt25(this.baseline, edited));
  }
}
