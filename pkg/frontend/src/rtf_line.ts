/**
 * Real-time-factor line figure: `nistt-analyze rtf` CSV in, SVG out.
 */

import { toNumber } from './csv';
import { el, linearScale, niceTicks, renderFigure, MARGIN } from './svg';
import { runFigure } from './cli';

const COLUMNS = ['bucket_mid_s', 'rtf'];
const WIDTH = 840;
const HEIGHT = 420;

runFigure('rtf_line', COLUMNS, (csv, args) => {
  const points = csv.rows.map((row, i) => ({
    t: toNumber(row[0], `row ${i + 1} bucket_mid_s`),
    rtf: toNumber(row[1], `row ${i + 1} rtf`),
  }));
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const tMax = points.length ? Math.max(...points.map((p) => p.t)) : 1;
  const rtfMax = points.length ? Math.max(...points.map((p) => p.rtf)) : 1;
  const x = linearScale(0, tMax, 0, plotW);
  const y = linearScale(0, rtfMax * 1.05, plotH, 0);

  const path = points.map((p) => `${x(p.t).toFixed(2)},${y(p.rtf).toFixed(2)}`).join(' ');
  const body =
    (points.length ? el('polyline', { points: path, fill: 'none', stroke: '#1f77b4', 'stroke-width': 1.5, class: 'series' }) : '') +
    points.map((p) => el('circle', { cx: x(p.t).toFixed(2), cy: y(p.rtf).toFixed(2), r: 1.5, fill: '#1f77b4' })).join('');

  return renderFigure({
    width: WIDTH,
    height: HEIGHT,
    title: args.title ?? 'Real-time factor',
    xLabel: 'Simulation time [s]',
    yLabel: 'Real-time factor',
    xTicks: niceTicks(0, tMax),
    yTicks: niceTicks(0, rtfMax * 1.05),
    xScale: x,
    yScale: y,
    body,
  });
});
