/**
 * Overhead box plot: the bench harness per-run CSV in, SVG out. One box per
 * (configuration, trace set) group over its run distribution: median line,
 * quartile box, min/max whiskers.
 */

import { toNumber } from './csv';
import { el, esc, linearScale, niceTicks, quartiles, renderFigure, MARGIN } from './svg';
import { runFigure } from './cli';

const COLUMNS = ['configuration', 'traces', 'run', 'wall_s'];
const WIDTH = 840;
const HEIGHT = 420;

runFigure('overhead_box', COLUMNS, (csv, args) => {
  const groups = new Map<string, number[]>();
  csv.rows.forEach((row, i) => {
    const key = `${row[0]}|${row[1]}`;
    const wall = toNumber(row[3], `row ${i + 1} wall_s`);
    const walls = groups.get(key);
    if (walls) {
      walls.push(wall);
    } else {
      groups.set(key, [wall]);
    }
  });

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const keys = [...groups.keys()];
  const all = [...groups.values()].flat();
  const yMax = all.length ? Math.max(...all) : 1;
  const yMin = all.length ? Math.min(...all) : 0;
  const pad = (yMax - yMin) * 0.15 || yMax * 0.1 || 1;
  const y = linearScale(Math.max(0, yMin - pad), yMax + pad, plotH, 0);
  const x = linearScale(0, 1, 0, plotW);

  const slot = plotW / Math.max(1, keys.length);
  const boxW = Math.min(60, slot * 0.5);
  const sameTraces = new Set(keys.map((k) => k.split('|')[1])).size === 1;

  const parts: string[] = [];
  const categories: Array<{ x: number; label: string }> = [];
  keys.forEach((key, i) => {
    const walls = groups.get(key)!.slice().sort((a, b) => a - b);
    const { q1, median, q3 } = quartiles(walls);
    const cx = slot * (i + 0.5);
    const [configuration, traces] = key.split('|');
    categories.push({ x: cx, label: sameTraces ? configuration : `${configuration} ${traces}` });
    const lo = walls[0];
    const hi = walls[walls.length - 1];
    parts.push(
      el('g', { class: 'box' },
        el('line', { x1: cx, y1: y(lo).toFixed(2), x2: cx, y2: y(q1).toFixed(2), stroke: '#333', 'stroke-width': 1 }) +
        el('line', { x1: cx, y1: y(q3).toFixed(2), x2: cx, y2: y(hi).toFixed(2), stroke: '#333', 'stroke-width': 1 }) +
        el('line', { x1: cx - boxW / 4, y1: y(lo).toFixed(2), x2: cx + boxW / 4, y2: y(lo).toFixed(2), stroke: '#333', 'stroke-width': 1 }) +
        el('line', { x1: cx - boxW / 4, y1: y(hi).toFixed(2), x2: cx + boxW / 4, y2: y(hi).toFixed(2), stroke: '#333', 'stroke-width': 1 }) +
        el('rect', {
          x: (cx - boxW / 2).toFixed(2), y: y(q3).toFixed(2),
          width: boxW.toFixed(2), height: (y(q1) - y(q3)).toFixed(2),
          fill: '#9edae5', stroke: '#333', 'stroke-width': 1,
        }) +
        el('line', {
          x1: (cx - boxW / 2).toFixed(2), y1: y(median).toFixed(2),
          x2: (cx + boxW / 2).toFixed(2), y2: y(median).toFixed(2),
          stroke: '#d62728', 'stroke-width': 1.5, class: 'median',
        }),
      ),
    );
  });

  return renderFigure({
    width: WIDTH,
    height: HEIGHT,
    title: args.title ?? `Wall time per configuration (${esc(String(groups.get(keys[0])?.length ?? 0))} runs)`,
    xLabel: 'Configuration',
    yLabel: 'Wall time [s]',
    xTicks: [],
    yTicks: niceTicks(Math.max(0, yMin - pad), yMax + pad),
    xScale: x,
    yScale: y,
    xCategories: categories,
    body: parts.join(''),
  });
});
