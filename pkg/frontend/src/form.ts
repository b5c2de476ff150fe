/**
 * Patient feature form: one input per feature with inline validation; the
 * submit button stays disabled until every field parses within the server's
 * ranges, so invalid values never produce a request.
 */

import { FIELD_SPECS, isComplete, validateForm } from './validation';
import type { FormState } from './validation';
import type { FeatureName, FeaturePayload } from './types';

export interface PatientForm {
  element: HTMLFormElement;
  /** Current parse state of all fields. */
  state: () => FormState;
  /** Values, only meaningful when the form is valid. */
  values: () => FeaturePayload;
  setOnSubmit: (handler: (features: FeaturePayload) => void) => void;
  setOnEdit: (handler: (features: FeaturePayload) => void) => void;
}

const DEFAULTS: Record<FeatureName, string> = {
  age: '55',
  tumor_size_cm: '1.5',
  p53_pct: '10',
  sbr_grade: '2',
  mitotic_grade: '2',
  er_pct: '90',
  pr_pct: '60',
  ki67_pct: '20',
  lymph_nodes: 'NA',
};

export function buildPatientForm(doc: Document = document): PatientForm {
  const form = doc.createElement('form');
  form.className = 'patient-form';
  const inputs = new Map<FeatureName, HTMLInputElement | HTMLSelectElement>();
  const errorSlots = new Map<FeatureName, HTMLElement>();

  for (const spec of FIELD_SPECS) {
    const row = doc.createElement('label');
    row.className = 'field';
    const caption = doc.createElement('span');
    caption.textContent = spec.label;
    row.appendChild(caption);

    let input: HTMLInputElement | HTMLSelectElement;
    if (spec.kind === 'lymph') {
      const select = doc.createElement('select');
      for (const option of ['unknown', '0', '1', '2', '3']) {
        const opt = doc.createElement('option');
        opt.value = option;
        opt.textContent = option;
        select.appendChild(opt);
      }
      input = select;
    } else if (spec.kind === 'grade') {
      const select = doc.createElement('select');
      for (const option of ['1', '2', '3']) {
        const opt = doc.createElement('option');
        opt.value = option;
        opt.textContent = option;
        select.appendChild(opt);
      }
      input = select;
    } else {
      const box = doc.createElement('input');
      box.type = 'number';
      if (spec.step) box.step = spec.step;
      input = box;
    }
    input.setAttribute('name', spec.name);
    const defaultRaw = DEFAULTS[spec.name];
    if (input instanceof HTMLSelectElement && spec.kind === 'lymph') {
      input.value = defaultRaw === 'NA' ? 'unknown' : defaultRaw;
    } else {
      input.value = defaultRaw;
    }
    inputs.set(spec.name, input);
    row.appendChild(input);

    const error = doc.createElement('span');
    error.className = 'field-error';
    error.dataset.for = spec.name;
    errorSlots.set(spec.name, error);
    row.appendChild(error);
    form.appendChild(row);
  }

  const submit = doc.createElement('button');
  submit.type = 'submit';
  submit.textContent = 'Predict';
  form.appendChild(submit);

  const rawValues = (): Record<FeatureName, string> => {
    const out = {} as Record<FeatureName, string>;
    for (const spec of FIELD_SPECS) {
      out[spec.name] = inputs.get(spec.name)!.value;
    }
    return out;
  };

  const refresh = (): FormState => {
    const state = validateForm(rawValues());
    for (const spec of FIELD_SPECS) {
      const slot = errorSlots.get(spec.name)!;
      slot.textContent = state.errors[spec.name] ?? '';
    }
    submit.disabled = !isComplete(state);
    return state;
  };

  let onSubmit: ((features: FeaturePayload) => void) | undefined;
  let onEdit: ((features: FeaturePayload) => void) | undefined;

  form.addEventListener('input', () => {
    const state = refresh();
    if (onEdit && isComplete(state)) {
      onEdit(state.values as FeaturePayload);
    }
  });
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const state = refresh();
    if (onSubmit && isComplete(state)) {
      onSubmit(state.values as FeaturePayload);
    }
  });
  refresh();

  return {
    element: form,
    state: () => validateForm(rawValues()),
    values: () => validateForm(rawValues()).values as FeaturePayload,
    setOnSubmit: (handler) => {
      onSubmit = handler;
    },
    setOnEdit: (handler) => {
      onEdit = handler;
    },
  };
}
