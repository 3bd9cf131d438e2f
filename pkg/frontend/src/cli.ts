/**
 * Shared command line handling for the figure scripts.
 * Exit codes follow the analyzer convention: 0 ok, 2 unreadable input or
 * schema mismatch, 3 bad arguments.
 */

import * as fs from 'fs';

import { Csv, SchemaError, readCsv, requireColumns } from './csv';

export const EXIT_FORMAT = 2;
export const EXIT_USAGE = 3;

export interface FigureArgs {
  input: string;
  output: string;
  title?: string;
}

export function parseFigureArgs(prog: string, argv: string[]): FigureArgs {
  let input: string | undefined;
  let output: string | undefined;
  let title: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (flag === '--in' && value !== undefined) {
      input = value;
      i++;
    } else if (flag === '--out' && value !== undefined) {
      output = value;
      i++;
    } else if (flag === '--title' && value !== undefined) {
      title = value;
      i++;
    } else {
      console.error(`usage: ${prog} --in data.csv --out figure.svg [--title TEXT]`);
      process.exit(EXIT_USAGE);
    }
  }
  if (!input || !output) {
    console.error(`usage: ${prog} --in data.csv --out figure.svg [--title TEXT]`);
    process.exit(EXIT_USAGE);
  }
  return { input, output, title };
}

/** Load + schema-check the input, render, write; map errors to exit codes. */
export function runFigure(
  prog: string,
  expectedColumns: string[],
  render: (csv: Csv, args: FigureArgs) => string,
): void {
  const args = parseFigureArgs(prog, process.argv.slice(2));
  let svg: string;
  try {
    const csv = readCsv(args.input);
    requireColumns(csv, expectedColumns, prog);
    svg = render(csv, args);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(err.message);
    } else {
      console.error(`${prog}: ${(err as Error).message}`);
    }
    process.exit(EXIT_FORMAT);
  }
  fs.writeFileSync(args.output, svg);
}
