/**
 * Event notification timeline: `nistt-analyze events` CSV in, SVG out.
 * One lane per event. Immediate notifications draw as ticks; delayed
 * notifications draw as arrows from the programming time to the firing time.
 */

import { toNumber } from './csv';
import { el, linearScale, niceTicks, renderFigure, MARGIN } from './svg';
import { runFigure } from './cli';

const COLUMNS = ['event', 'kind', 'programmed_ps', 'fires_ps'];
const WIDTH = 840;

interface Row {
  event: string;
  kind: string;
  programmed: number;
  fires: number;
}

runFigure('event_timeline', COLUMNS, (csv, args) => {
  const rows: Row[] = csv.rows.map((r, i) => ({
    event: r[0],
    kind: r[1],
    programmed: toNumber(r[2], `row ${i + 1} programmed_ps`) / 1e12,
    fires: toNumber(r[3], `row ${i + 1} fires_ps`) / 1e12,
  }));
  const lanes: string[] = [];
  for (const r of rows) {
    if (!lanes.includes(r.event)) lanes.push(r.event);
  }

  const laneGap = 44;
  const height = MARGIN.top + MARGIN.bottom + laneGap * Math.max(1, lanes.length);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const tMax = rows.length ? Math.max(...rows.map((r) => r.fires)) : 1;
  const x = linearScale(0, tMax, 0, plotW);
  const y = linearScale(0, 1, plotH, 0);
  const laneY = (event: string) => (lanes.indexOf(event) + 0.5) * laneGap;

  const parts: string[] = [];
  for (const lane of lanes) {
    const ly = laneY(lane);
    parts.push(el('line', { x1: 0, y1: ly, x2: plotW, y2: ly, stroke: '#eee', 'stroke-width': 1 }));
  }
  for (const r of rows) {
    const ly = laneY(r.event);
    if (r.kind === 'delayed') {
      parts.push(
        el('line', {
          x1: x(r.programmed).toFixed(2), y1: ly, x2: x(r.fires).toFixed(2), y2: ly,
          stroke: '#d62728', 'stroke-width': 1.5, 'marker-end': 'url(#arrowhead)', class: 'arrow',
        }),
      );
      parts.push(
        el('circle', { cx: x(r.programmed).toFixed(2), cy: ly, r: 2.5, fill: '#d62728', class: 'programmed' }),
      );
    } else {
      parts.push(
        el('line', {
          x1: x(r.fires).toFixed(2), y1: ly - 7, x2: x(r.fires).toFixed(2), y2: ly + 7,
          stroke: '#1f77b4', 'stroke-width': 1.5, class: 'instant',
        }),
      );
    }
  }

  const defs =
    '<marker id="arrowhead" markerWidth="8" markerHeight="8" refX="7" refY="3" orient="auto">' +
    '<path d="M0,0 L7,3 L0,6 z" fill="#d62728"/></marker>';

  return renderFigure({
    width: WIDTH,
    height,
    title: args.title ?? 'Notified events',
    xLabel: 'Simulation time [s]',
    yLabel: '',
    xTicks: niceTicks(0, tMax),
    yTicks: [],
    xScale: x,
    yScale: y,
    yCategories: lanes.map((lane) => ({ y: laneY(lane), label: lane })),
    defs,
    body: parts.join(''),
  });
});
