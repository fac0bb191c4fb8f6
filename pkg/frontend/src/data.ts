/**
 * Client-side structural check of an uploaded data file. This mirrors the
 * service's table parser just closely enough to preview rows and show the
 * inferred field kind; the service remains the authority.
 */

export type FieldKind = 'quantitative' | 'categorical' | 'flow';

export interface DataRow {
  [key: string]: unknown;
}

export interface TablePreview {
  ok: true;
  rows: DataRow[];
  kind: FieldKind;
  columns: string[];
}

export interface TableError {
  ok: false;
  error: string;
}

const NAME_KEYS = ['name', 'country'];
const VALUE_KEYS = ['value', 'data', 'magnitude'];

function pick(row: DataRow, keys: string[]): unknown {
  for (const key of keys) {
    if (key in row) return row[key];
  }
  return undefined;
}

export function previewTable(text: string): TablePreview | TableError {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    return { ok: false, error: `not valid JSON: ${String(err)}` };
  }
  if (!Array.isArray(doc) || doc.length === 0) {
    return { ok: false, error: 'data must be a non-empty JSON array of rows' };
  }
  const rows: DataRow[] = [];
  let sawFlow = false;
  let sawNumber = false;
  let sawString = false;
  for (const entry of doc) {
    if (typeof entry !== 'object' || entry === null || Array.isArray(entry)) {
      return { ok: false, error: 'every row must be a JSON object' };
    }
    const row = entry as DataRow;
    if (typeof pick(row, NAME_KEYS) !== 'string') {
      return { ok: false, error: 'every row needs a name (or country) string' };
    }
    if ('to' in row) {
      sawFlow = true;
    } else {
      const value = pick(row, VALUE_KEYS);
      if (typeof value === 'number' && Number.isFinite(value)) sawNumber = true;
      else if (typeof value === 'string') sawString = true;
      else return { ok: false, error: 'every row needs a value (or data) field' };
    }
    rows.push(row);
  }
  if (sawFlow && (sawNumber || sawString)) {
    return { ok: false, error: 'flow rows and plain value rows cannot be mixed' };
  }
  if (sawNumber && sawString) {
    return { ok: false, error: 'values mix numbers and categories' };
  }
  const kind: FieldKind = sawFlow ? 'flow' : sawNumber ? 'quantitative' : 'categorical';
  const columns = [...new Set(rows.flatMap((r) => Object.keys(r)))];
  return { ok: true, rows, kind, columns };
}
