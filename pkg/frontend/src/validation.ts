/**
 * Client-side field validation. The ranges mirror the server's exactly, so a
 * request is only sent once it would pass the 400/422 checks.
 */

import type { FeatureName, FeaturePayload } from './types';

export interface FieldSpec {
  name: FeatureName;
  label: string;
  kind: 'real' | 'percent' | 'grade' | 'lymph';
  /** exclusive lower bound for 'real' fields */
  min?: number;
  step?: string;
}

export const FIELD_SPECS: FieldSpec[] = [
  { name: 'age', label: 'Age (years)', kind: 'real', min: 0, step: '1' },
  { name: 'tumor_size_cm', label: 'Tumor size (cm)', kind: 'real', min: 0, step: '0.1' },
  { name: 'p53_pct', label: 'p53 (%)', kind: 'percent', step: '1' },
  { name: 'sbr_grade', label: 'SBR grade', kind: 'grade' },
  { name: 'mitotic_grade', label: 'Mitotic grade', kind: 'grade' },
  { name: 'er_pct', label: 'ER (%)', kind: 'percent', step: '1' },
  { name: 'pr_pct', label: 'PR (%)', kind: 'percent', step: '1' },
  { name: 'ki67_pct', label: 'Ki67 (%)', kind: 'percent', step: '1' },
  { name: 'lymph_nodes', label: 'Lymph nodes', kind: 'lymph' },
];

export type FieldResult = { ok: true; value: number } | { ok: false; message: string };

export function parseField(spec: FieldSpec, raw: string): FieldResult {
  const text = raw.trim();
  if (text === '') {
    return { ok: false, message: 'required' };
  }
  if (spec.kind === 'lymph') {
    if (text.toUpperCase() === 'NA' || text === 'unknown' || text === '-1') {
      return { ok: true, value: -1 };
    }
    const n = Number(text);
    if (!Number.isInteger(n) || n < 0 || n > 3) {
      return { ok: false, message: 'must be a node count 0-3 or unknown' };
    }
    return { ok: true, value: n };
  }
  const value = Number(text);
  if (!Number.isFinite(value)) {
    return { ok: false, message: 'must be a number' };
  }
  switch (spec.kind) {
    case 'percent':
      if (value < 0 || value > 100) {
        return { ok: false, message: 'out of range [0, 100]' };
      }
      break;
    case 'grade':
      if (value !== 1 && value !== 2 && value !== 3) {
        return { ok: false, message: 'must be 1, 2, or 3' };
      }
      break;
    case 'real':
      if (spec.min !== undefined && value <= spec.min) {
        return { ok: false, message: 'must be positive' };
      }
      break;
  }
  return { ok: true, value };
}

export interface FormState {
  values: Partial<FeaturePayload>;
  errors: Partial<Record<FeatureName, string>>;
}

/** Parse every field; the form is submittable only when errors is empty. */
export function validateForm(raw: Record<FeatureName, string>): FormState {
  const values: Partial<FeaturePayload> = {};
  const errors: Partial<Record<FeatureName, string>> = {};
  for (const spec of FIELD_SPECS) {
    const result = parseField(spec, raw[spec.name] ?? '');
    if (result.ok) {
      values[spec.name] = result.value;
    } else {
      errors[spec.name] = result.message;
    }
  }
  return { values, errors };
}

export const isComplete = (state: FormState): boolean =>
  Object.keys(state.errors).length === 0 &&
  FIELD_SPECS.every((spec) => state.values[spec.name] !== undefined);
