/**
 * Minimal CSV access for the analyzer/bench output schemas: comma-separated,
 * newline rows, no quoting (names are restricted to [A-Za-z0-9_.\[\]]).
 */

import * as fs from 'fs';

export interface Csv {
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {
  constructor(message: string, public readonly expected: string[], public readonly actual: string[]) {
    super(message);
  }
}

export function readCsv(path: string): Csv {
  const text = fs.readFileSync(path, 'utf8');
  const lines = text.split('\n').filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty file`, [], []);
  }
  const header = lines[0].split(',');
  const rows = lines.slice(1).map((l) => l.split(','));
  return { header, rows };
}

/** Reject inputs whose columns differ from the schema the figure consumes. */
export function requireColumns(csv: Csv, expected: string[], label: string): void {
  if (csv.header.length === expected.length && csv.header.every((c, i) => c === expected[i])) {
    return;
  }
  const missing = expected.filter((c) => !csv.header.includes(c));
  const surplus = csv.header.filter((c) => !expected.includes(c));
  const parts = [`${label}: column mismatch`, `expected: ${expected.join(',')}`, `got: ${csv.header.join(',')}`];
  if (missing.length) parts.push(`missing: ${missing.join(',')}`);
  if (surplus.length) parts.push(`unexpected: ${surplus.join(',')}`);
  throw new SchemaError(parts.join('\n  '), expected, csv.header);
}

export function toNumber(value: string, where: string): number {
  const n = Number(value);
  if (!Number.isFinite(n)) {
    throw new SchemaError(`${where}: not a number: '${value}'`, [], []);
  }
  return n;
}
