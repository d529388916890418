// Dependency-free SVG plots. The service ships plot data as CSV and the
// static frontend is served without a bundler, so charts are built directly
// on the DOM with hand-rolled scales.

import { column, numericColumn, parseCsv } from './csv.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export const WIDTH = 600;
export const HEIGHT = 230;
const MARGIN = { top: 14, right: 16, bottom: 36, left: 64 };

export interface Scale {
  map(v: number): number;
  invert(px: number): number;
  ticks(): number[];
}

export class LinearScale implements Scale {
  constructor(
    private readonly d0: number,
    private readonly d1: number,
    private readonly r0: number,
    private readonly r1: number,
  ) {}

  map(v: number): number {
    const f = (v - this.d0) / (this.d1 - this.d0 || 1);
    return this.r0 + f * (this.r1 - this.r0);
  }

  invert(px: number): number {
    const f = (px - this.r0) / (this.r1 - this.r0 || 1);
    return this.d0 + f * (this.d1 - this.d0);
  }

  ticks(): number[] {
    const span = Math.abs(this.d1 - this.d0);
    if (span === 0) return [this.d0];
    const raw = span / 5;
    const mag = Math.pow(10, Math.floor(Math.log10(raw)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= 6) ?? 10 * mag;
    const lo = Math.ceil(Math.min(this.d0, this.d1) / step) * step;
    const out: number[] = [];
    for (let v = lo; v <= Math.max(this.d0, this.d1) + step * 1e-9; v += step) {
      out.push(Number(v.toPrecision(12)));
    }
    return out;
  }
}

export class Log10Scale implements Scale {
  private readonly lin: LinearScale;

  constructor(
    private readonly d0: number,
    private readonly d1: number,
    r0: number,
    r1: number,
  ) {
    if (d0 <= 0 || d1 <= 0) throw new Error('log scale needs a positive domain');
    this.lin = new LinearScale(Math.log10(d0), Math.log10(d1), r0, r1);
  }

  map(v: number): number {
    return this.lin.map(Math.log10(v));
  }

  invert(px: number): number {
    return Math.pow(10, this.lin.invert(px));
  }

  ticks(): number[] {
    return decades(Math.min(this.d0, this.d1), Math.max(this.d0, this.d1));
  }
}

function el<K extends keyof SVGElementTagNameMap>(
  name: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, name);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function fmtTick(v: number): string {
  if (v === 0) return '0';
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Number(v.toPrecision(6)));
}

interface Frame {
  svg: SVGSVGElement;
  plot: SVGGElement;
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

function frame(xLabel: string, yLabel: string): Frame {
  const svg = el('svg', {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: 'plot',
    role: 'img',
  });
  const plot = el('g');
  svg.appendChild(plot);
  const xl = el('text', {
    x: (MARGIN.left + WIDTH - MARGIN.right) / 2,
    y: HEIGHT - 4,
    class: 'axis-label',
    'text-anchor': 'middle',
  });
  xl.textContent = xLabel;
  const yl = el('text', {
    x: 14,
    y: (MARGIN.top + HEIGHT - MARGIN.bottom) / 2,
    class: 'axis-label',
    'text-anchor': 'middle',
    transform: `rotate(-90 14 ${(MARGIN.top + HEIGHT - MARGIN.bottom) / 2})`,
  });
  yl.textContent = yLabel;
  svg.append(xl, yl);
  return {
    svg,
    plot,
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

function drawAxes(f: Frame, xs: Scale, ys: Scale, xTicks: number[], yTicks: number[]): void {
  f.plot.appendChild(el('rect', {
    x: f.x0, y: f.y1, width: f.x1 - f.x0, height: f.y0 - f.y1, class: 'plot-bg',
  }));
  for (const t of xTicks) {
    const x = xs.map(t);
    f.plot.appendChild(el('line', { x1: x, x2: x, y1: f.y0, y2: f.y1, class: 'grid' }));
    const lbl = el('text', { x, y: f.y0 + 16, class: 'tick', 'text-anchor': 'middle' });
    lbl.textContent = fmtTick(t);
    f.plot.appendChild(lbl);
  }
  for (const t of yTicks) {
    const y = ys.map(t);
    f.plot.appendChild(el('line', { x1: f.x0, x2: f.x1, y1: y, y2: y, class: 'grid' }));
    const lbl = el('text', { x: f.x0 - 6, y: y + 4, class: 'tick', 'text-anchor': 'end' });
    lbl.textContent = fmtTick(t);
    f.plot.appendChild(lbl);
  }
}

function polyline(xs: number[], ys: number[], cls: string): SVGPolylineElement {
  const pts = xs.map((x, i) => `${x.toFixed(2)},${ys[i].toFixed(2)}`).join(' ');
  return el('polyline', { points: pts, class: cls, fill: 'none' });
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [lo, hi];
}

function decades(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.log10(hi) + 1e-9; e++) {
    out.push(Math.pow(10, e));
  }
  return out;
}

/** Every nth index so at most `cap` items survive; keeps the first sample. */
export function strideIndices(n: number, cap: number): number[] {
  const stride = Math.max(1, Math.ceil(n / cap));
  const out: number[] = [];
  for (let i = 0; i < n; i += stride) out.push(i);
  return out;
}

/** Delay sweep curve on a log-x axis with the minimum marked. The marker
 * label reuses the CSV's own text for the best candidate, so the displayed
 * delay is the service's value, not a reformatted one. */
export function sweepPlot(csvText: string): SVGSVGElement {
  const table = parseCsv(csvText);
  const tRaw = column(table, 't_m_s');
  const t = tRaw.map(Number);
  const rmse = numericColumn(table, 'rmse');

  let best = 0;
  for (let i = 1; i < rmse.length; i++) if (rmse[i] < rmse[best]) best = i;

  const f = frame('candidate T_m (s, log)', 'fit RMSE (m/s^2)');
  const xs = new Log10Scale(Math.min(...t), Math.max(...t), f.x0, f.x1);
  const [rLo, rHi] = extent(rmse);
  const ys = new LinearScale(rLo, rHi, f.y0, f.y1);
  drawAxes(f, xs, ys, decades(Math.min(...t), Math.max(...t)), ys.ticks());

  f.plot.appendChild(polyline(t.map((v) => xs.map(v)), rmse.map((v) => ys.map(v)), 'line-sweep'));
  const mx = xs.map(t[best]);
  const my = ys.map(rmse[best]);
  f.plot.appendChild(el('circle', { cx: mx, cy: my, r: 5, class: 'argmin' }));
  const lbl = el('text', {
    x: Math.min(mx + 8, f.x1 - 4),
    y: Math.max(my - 8, f.y1 + 12),
    class: 'argmin-label',
    'text-anchor': mx > (f.x0 + f.x1) / 2 ? 'end' : 'start',
  });
  lbl.textContent = `T_m = ${tRaw[best]} s`;
  f.plot.appendChild(lbl);

  f.svg.dataset.pointCount = String(t.length);
  f.svg.dataset.argminIndex = String(best);
  return f.svg;
}

/** Measured vs predicted specific-force components with the identity line;
 * points on the diagonal mean a perfect thrust fit. */
export function thrustFitPlot(csvText: string): SVGSVGElement {
  const table = parseCsv(csvText);
  const axes: [string, string, string][] = [
    ['meas_fx_n', 'pred_fx_n', 'pt-x'],
    ['meas_fy_n', 'pred_fy_n', 'pt-y'],
    ['meas_fz_n', 'pred_fz_n', 'pt-z'],
  ];
  const all: number[] = [];
  for (const [m, p] of axes) {
    all.push(...numericColumn(table, m), ...numericColumn(table, p));
  }
  const [lo, hi] = extent(all);

  const f = frame('measured force (N)', 'predicted force (N)');
  const xs = new LinearScale(lo, hi, f.x0, f.x1);
  const ys = new LinearScale(lo, hi, f.y0, f.y1);
  drawAxes(f, xs, ys, xs.ticks(), ys.ticks());
  f.plot.appendChild(el('line', {
    x1: xs.map(lo), y1: ys.map(lo), x2: xs.map(hi), y2: ys.map(hi), class: 'identity',
  }));

  for (const [m, p, cls] of axes) {
    const mv = numericColumn(table, m);
    const pv = numericColumn(table, p);
    const g = el('g', { class: cls });
    for (const i of strideIndices(mv.length, 700)) {
      g.appendChild(el('circle', { cx: xs.map(mv[i]), cy: ys.map(pv[i]), r: 2 }));
    }
    f.plot.appendChild(g);
  }
  addLegend(f, [['x', 'pt-x'], ['y', 'pt-y'], ['z', 'pt-z']]);
  f.svg.dataset.pointCount = String(table.rows.length);
  return f.svg;
}

/** Angular acceleration against the torque drive, one point class per axis;
 * the fitted inertia is the slope of each cloud. */
export function angularFitPlot(csvText: string): SVGSVGElement {
  const table = parseCsv(csvText);
  const axis = column(table, 'axis');
  const wd = numericColumn(table, 'ang_accel_rads2');
  const drive = numericColumn(table, 'torque_term');

  const f = frame('angular accel (rad/s^2)', 'torque drive');
  const xs = new LinearScale(...extent(wd), f.x0, f.x1);
  const ys = new LinearScale(...extent(drive), f.y0, f.y1);
  drawAxes(f, xs, ys, xs.ticks(), ys.ticks());

  const names = [...new Set(axis)];
  for (const name of names) {
    const g = el('g', { class: `pt-${name}` });
    const idx = axis.map((a, i) => (a === name ? i : -1)).filter((i) => i >= 0);
    for (const i of strideIndices(idx.length, 500).map((k) => idx[k])) {
      g.appendChild(el('circle', { cx: xs.map(wd[i]), cy: ys.map(drive[i]), r: 2 }));
    }
    f.plot.appendChild(g);
  }
  addLegend(f, names.map((n) => [n, `pt-${n}`]));
  f.svg.dataset.pointCount = String(table.rows.length);
  return f.svg;
}

/** Per-motor histograms of the commands inside the hover window. */
export function hoverHistPlot(csvText: string): SVGSVGElement {
  const table = parseCsv(csvText);
  const motors = table.header;
  const series = motors.map((m) => numericColumn(table, m));
  const [lo, hi] = extent(series.flat());
  const bins = 30;
  const width = (hi - lo) / bins;

  let peak = 0;
  const counts = series.map((vals) => {
    const c = new Array<number>(bins).fill(0);
    for (const v of vals) {
      const b = Math.min(bins - 1, Math.max(0, Math.floor((v - lo) / width)));
      c[b] += 1;
    }
    peak = Math.max(peak, ...c);
    return c;
  });

  const f = frame('hover command (normalized)', 'samples');
  const xs = new LinearScale(lo, hi, f.x0, f.x1);
  const ys = new LinearScale(0, peak, f.y0, f.y1);
  drawAxes(f, xs, ys, xs.ticks(), ys.ticks());

  counts.forEach((c, mi) => {
    const g = el('g', { class: `hist-m${mi}` });
    c.forEach((n, b) => {
      if (n === 0) return;
      const x = xs.map(lo + b * width);
      const x2 = xs.map(lo + (b + 1) * width);
      g.appendChild(el('rect', {
        x, y: ys.map(n), width: Math.max(x2 - x, 0.5), height: f.y0 - ys.map(n),
      }));
    });
    f.plot.appendChild(g);
  });
  addLegend(f, motors.map((m, i) => [m, `hist-m${i}`]));
  f.svg.dataset.pointCount = String(table.rows.length);
  return f.svg;
}

function addLegend(f: Frame, entries: [string, string][]): void {
  const g = el('g', { class: 'legend' });
  entries.forEach(([name, cls], i) => {
    const x = f.x1 - 54;
    const y = f.y1 + 8 + i * 14;
    g.appendChild(el('rect', { x, y: y - 7, width: 9, height: 9, class: cls }));
    const t = el('text', { x: x + 13, y: y + 1, class: 'tick' });
    t.textContent = name;
    g.appendChild(t);
  });
  f.plot.appendChild(g);
}
