/**
 * Quantum-duration scatter figure: `nistt-analyze quantum` CSV in, SVG out.
 * Gaps on the time axis are real information: stretches without points were
 * never simulated for that process.
 */

import { toNumber } from './csv';
import { el, linearScale, niceTicks, renderFigure, MARGIN } from './svg';
import { runFigure } from './cli';

const COLUMNS = ['process', 'sim_ps', 'duration_ps'];
const WIDTH = 840;
const HEIGHT = 420;

runFigure('quantum_scatter', COLUMNS, (csv, args) => {
  const points = csv.rows.map((row, i) => ({
    t: toNumber(row[1], `row ${i + 1} sim_ps`) / 1e12,
    us: toNumber(row[2], `row ${i + 1} duration_ps`) / 1e6,
  }));
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const tMax = points.length ? Math.max(...points.map((p) => p.t)) : 1;
  const usMax = points.length ? Math.max(...points.map((p) => p.us)) : 1;
  const x = linearScale(0, tMax, 0, plotW);
  const y = linearScale(0, usMax * 1.1, plotH, 0);

  const body = points
    .map((p) =>
      el('circle', {
        cx: x(p.t).toFixed(2), cy: y(p.us).toFixed(2), r: 1.8,
        fill: '#2ca02c', 'fill-opacity': 0.6, class: 'pt',
      }),
    )
    .join('');

  return renderFigure({
    width: WIDTH,
    height: HEIGHT,
    title: args.title ?? 'Quantum durations',
    xLabel: 'Simulation time [s]',
    yLabel: 'Quantum duration [us]',
    xTicks: niceTicks(0, tMax),
    yTicks: niceTicks(0, usMax * 1.1),
    xScale: x,
    yScale: y,
    body,
  });
});
