/**
 * Thin fetch client for the prediction service. Maps the service's error
 * contract (400/422 field messages, 503 unavailable) onto typed failures so
 * the UI can route them to inline messages vs. banners.
 */

import type { FeaturePayload, FieldError, ModelInfo, PredictionResponse } from './types';

export type ApiFailure =
  | { kind: 'fields'; status: number; errors: FieldError[] }
  | { kind: 'unavailable' }
  | { kind: 'network'; detail: string };

export class ApiError extends Error {
  failure: ApiFailure;

  constructor(failure: ApiFailure) {
    super(
      failure.kind === 'fields'
        ? failure.errors.map((e) => `${e.field}: ${e.message}`).join('; ')
        : failure.kind === 'unavailable'
          ? 'model not loaded'
          : failure.detail,
    );
    this.failure = failure;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private baseUrl: string;
  private fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, '');
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError({ kind: 'network', detail: String(err) });
    }
    if (response.status === 503) {
      throw new ApiError({ kind: 'unavailable' });
    }
    if (response.status === 400 || response.status === 422) {
      const payload = await response.json().catch(() => ({ errors: [] }));
      throw new ApiError({
        kind: 'fields',
        status: response.status,
        errors: Array.isArray(payload.errors) ? payload.errors : [],
      });
    }
    if (!response.ok) {
      throw new ApiError({ kind: 'network', detail: `unexpected status ${response.status}` });
    }
    return (await response.json()) as T;
  }

  predict(features: FeaturePayload): Promise<PredictionResponse> {
    return this.post<PredictionResponse>('/api/v1/predict', features);
  }

  neighbors(features: FeaturePayload, k: number): Promise<unknown> {
    return this.post('/api/v1/neighbors', { ...features, k });
  }

  async modelInfo(): Promise<ModelInfo> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/api/v1/model/info`);
    } catch (err) {
      throw new ApiError({ kind: 'network', detail: String(err) });
    }
    if (response.status === 503) {
      throw new ApiError({ kind: 'unavailable' });
    }
    return (await response.json()) as ModelInfo;
  }
}

declare global {
  // Optional page-level override for the service origin.
  // eslint-disable-next-line no-var
  var DISTFOREST_BASE_URL: string | undefined;
}

export const defaultBaseUrl = (): string =>
  globalThis.DISTFOREST_BASE_URL ?? 'http://127.0.0.1:8723';
