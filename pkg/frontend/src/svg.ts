/**
 * Hand-rolled SVG figure scaffolding: linear scales, tick generation, and a
 * framed plot area with axes. No DOM, no canvas; figures are plain strings,
 * so rendering is headless and byte-deterministic.
 */

export interface Scale {
  (value: number): number;
  readonly d0: number;
  readonly d1: number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  const fn = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  Object.defineProperty(fn, 'd0', { value: d0 });
  Object.defineProperty(fn, 'd1', { value: d1 });
  return fn;
}

/** Round tick positions covering [min, max] at a 1/2/5 step. */
export function niceTicks(min: number, max: number, count = 6): number[] {
  if (min === max) {
    return [min];
  }
  const rawStep = (max - min) / Math.max(1, count);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * power);
  const step = candidates.find((s) => (max - min) / s <= count) ?? candidates[3];
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) return '0';
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(6)));
}

export function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;').replace(/"/g, '&quot;');
}

export function el(tag: string, attrs: Record<string, string | number>, content = ''): string {
  const attrText = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join('');
  return content === '' ? `<${tag}${attrText}/>` : `<${tag}${attrText}>${content}</${tag}>`;
}

export interface FrameSpec {
  width?: number;
  height?: number;
  title: string;
  xLabel: string;
  yLabel: string;
  xTicks: number[];
  yTicks: number[];
  xScale: Scale;
  yScale: Scale;
  /** y positions + labels instead of numeric yTicks (categorical axes) */
  yCategories?: Array<{ y: number; label: string }>;
  xCategories?: Array<{ x: number; label: string }>;
  defs?: string;
  body: string;
}

export const MARGIN = { top: 36, right: 16, bottom: 48, left: 64 };

/** Wrap a figure body in axes, grid lines, labels and a title. */
export function renderFigure(spec: FrameSpec): string {
  const width = spec.width ?? 840;
  const height = spec.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const parts: string[] = [];

  parts.push(el('rect', { x: 0, y: 0, width, height, fill: 'white' }));
  parts.push(
    el('text', {
      x: width / 2, y: 20, 'text-anchor': 'middle',
      'font-size': 14, 'font-family': 'sans-serif', 'font-weight': 'bold',
    }, esc(spec.title)),
  );

  const grid: string[] = [];
  const labels: string[] = [];
  if (!spec.xCategories) {
    for (const t of spec.xTicks) {
      const x = MARGIN.left + spec.xScale(t);
      grid.push(el('line', { x1: x, y1: MARGIN.top, x2: x, y2: MARGIN.top + plotH, stroke: '#ddd', 'stroke-width': 0.5 }));
      labels.push(el('text', { x, y: MARGIN.top + plotH + 16, 'text-anchor': 'middle', 'font-size': 10, 'font-family': 'sans-serif' }, formatTick(t)));
    }
  } else {
    for (const c of spec.xCategories) {
      const x = MARGIN.left + c.x;
      labels.push(el('text', { x, y: MARGIN.top + plotH + 16, 'text-anchor': 'middle', 'font-size': 10, 'font-family': 'sans-serif' }, esc(c.label)));
    }
  }
  if (!spec.yCategories) {
    for (const t of spec.yTicks) {
      const y = MARGIN.top + spec.yScale(t);
      grid.push(el('line', { x1: MARGIN.left, y1: y, x2: MARGIN.left + plotW, y2: y, stroke: '#ddd', 'stroke-width': 0.5 }));
      labels.push(el('text', { x: MARGIN.left - 6, y: y + 3, 'text-anchor': 'end', 'font-size': 10, 'font-family': 'sans-serif' }, formatTick(t)));
    }
  } else {
    for (const c of spec.yCategories) {
      const y = MARGIN.top + c.y;
      labels.push(el('text', { x: MARGIN.left - 6, y: y + 3, 'text-anchor': 'end', 'font-size': 10, 'font-family': 'sans-serif' }, esc(c.label)));
    }
  }

  parts.push(...grid);
  parts.push(el('rect', { x: MARGIN.left, y: MARGIN.top, width: plotW, height: plotH, fill: 'none', stroke: '#333', 'stroke-width': 1 }));
  parts.push(el('g', { class: 'plot', transform: `translate(${MARGIN.left},${MARGIN.top})` }, spec.body));
  parts.push(...labels);
  parts.push(
    el('text', { x: MARGIN.left + plotW / 2, y: height - 10, 'text-anchor': 'middle', 'font-size': 12, 'font-family': 'sans-serif' }, esc(spec.xLabel)),
  );
  parts.push(
    el('text', {
      x: 14, y: MARGIN.top + plotH / 2, 'text-anchor': 'middle', 'font-size': 12, 'font-family': 'sans-serif',
      transform: `rotate(-90 14 ${MARGIN.top + plotH / 2})`,
    }, esc(spec.yLabel)),
  );

  const defs = spec.defs ? `<defs>${spec.defs}</defs>` : '';
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">` +
    `${defs}${parts.join('')}</svg>\n`
  );
}

export interface Quartiles {
  q1: number;
  median: number;
  q3: number;
}

/** Linear-interpolation quartiles over a sorted sample. */
export function quartiles(sorted: number[]): Quartiles {
  if (sorted.length === 0) {
    throw new Error('quartiles of an empty sample');
  }
  const at = (p: number): number => {
    const pos = p * (sorted.length - 1);
    const lo = Math.floor(pos);
    const hi = Math.ceil(pos);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
  };
  return { q1: at(0.25), median: at(0.5), q3: at(0.75) };
}
