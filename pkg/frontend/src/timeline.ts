// Stacked per-channel preview panels with drag-to-select segment windows.

import { PreviewSeries } from './api.js';
import { LinearScale } from './plot.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export const PANEL_WIDTH = 860;
export const PANEL_HEIGHT = 96;
const PAD = { left: 46, right: 10, top: 6, bottom: 16 };

export interface SegmentWindow {
  start_s: number;
  end_s: number;
}

export type Segments = Partial<Record<string, SegmentWindow>>;

function el<K extends keyof SVGElementTagNameMap>(
  name: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, name);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

export interface Panel {
  root: HTMLDivElement;
  svg: SVGSVGElement;
  xScale: LinearScale;
}

export function buildPanel(
  name: string,
  series: PreviewSeries,
  domain: [number, number],
  segments: Segments,
): Panel {
  const root = document.createElement('div');
  root.className = 'timeline-panel';
  const title = document.createElement('div');
  title.className = 'timeline-title';
  title.textContent = name;
  root.appendChild(title);

  const svg = el('svg', {
    viewBox: `0 0 ${PANEL_WIDTH} ${PANEL_HEIGHT}`,
    class: 'timeline',
    'data-channel': name,
  });
  const xScale = new LinearScale(domain[0], domain[1], PAD.left, PANEL_WIDTH - PAD.right);

  let lo = Infinity;
  let hi = -Infinity;
  for (const field of series.values) {
    for (const v of field) {
      if (!Number.isFinite(v)) continue;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo > hi) [lo, hi] = [0, 1];
  if (lo === hi) [lo, hi] = [lo - 1, hi + 1];
  const yScale = new LinearScale(lo, hi, PANEL_HEIGHT - PAD.bottom, PAD.top);

  svg.appendChild(el('rect', {
    x: PAD.left, y: PAD.top,
    width: PANEL_WIDTH - PAD.left - PAD.right,
    height: PANEL_HEIGHT - PAD.top - PAD.bottom,
    class: 'plot-bg',
  }));

  // segment shading sits under the traces
  for (const [label, w] of Object.entries(segments)) {
    if (!w) continue;
    const x0 = xScale.map(Math.max(w.start_s, domain[0]));
    const x1 = xScale.map(Math.min(w.end_s, domain[1]));
    if (x1 <= x0) continue;
    svg.appendChild(el('rect', {
      x: x0, y: PAD.top, width: x1 - x0, height: PANEL_HEIGHT - PAD.top - PAD.bottom,
      class: `seg seg-${label}`, 'data-segment': label,
    }));
  }

  series.values.forEach((field, i) => {
    const pts = series.t
      .map((t, k) => `${xScale.map(t).toFixed(2)},${yScale.map(field[k]).toFixed(2)}`)
      .join(' ');
    svg.appendChild(el('polyline', { points: pts, class: `trace trace-${i}`, fill: 'none' }));
  });

  for (const lbl of [lo, hi]) {
    const t = el('text', {
      x: PAD.left - 4, y: yScale.map(lbl) + 4, class: 'tick', 'text-anchor': 'end',
    });
    t.textContent = lbl.toPrecision(3);
    svg.appendChild(t);
  }
  const tEnd = el('text', {
    x: PANEL_WIDTH - PAD.right, y: PANEL_HEIGHT - 3, class: 'tick', 'text-anchor': 'end',
  });
  tEnd.textContent = `${domain[1].toPrecision(4)} s`;
  svg.appendChild(tEnd);

  root.appendChild(svg);
  return { root, svg, xScale };
}

/** Converts a mouse event to a time on the panel's x axis, clamped to the
 * axis span. Accounts for the viewBox-to-client scaling. */
export function timeAtEvent(panel: Panel, clientX: number): number {
  const rect = panel.svg.getBoundingClientRect();
  const scale = rect.width > 0 ? PANEL_WIDTH / rect.width : 1;
  const px = (clientX - rect.left) * scale;
  const clamped = Math.min(Math.max(px, PAD.left), PANEL_WIDTH - PAD.right);
  return panel.xScale.invert(clamped);
}

/** Drag on the panel selects a [start, end] window; the callback fires on
 * release with the endpoints in time order. */
export function attachBrush(panel: Panel, onPick: (a: number, b: number) => void): void {
  let anchor: number | null = null;
  let ghost: SVGRectElement | null = null;

  const update = (t: number) => {
    if (anchor === null || !ghost) return;
    const x0 = panel.xScale.map(Math.min(anchor, t));
    const x1 = panel.xScale.map(Math.max(anchor, t));
    ghost.setAttribute('x', String(x0));
    ghost.setAttribute('width', String(Math.max(x1 - x0, 0)));
  };

  const finish = (ev: MouseEvent) => {
    if (anchor === null) return;
    const t = timeAtEvent(panel, ev.clientX);
    const [a, b] = anchor <= t ? [anchor, t] : [t, anchor];
    ghost?.remove();
    ghost = null;
    anchor = null;
    document.removeEventListener('mousemove', move);
    document.removeEventListener('mouseup', finish);
    if (b > a) onPick(a, b);
  };

  const move = (ev: MouseEvent) => update(timeAtEvent(panel, ev.clientX));

  panel.svg.addEventListener('mousedown', (ev) => {
    anchor = timeAtEvent(panel, ev.clientX);
    ghost = el('rect', {
      x: panel.xScale.map(anchor), y: PAD.top, width: 0,
      height: PANEL_HEIGHT - PAD.top - PAD.bottom, class: 'seg-ghost',
    });
    panel.svg.appendChild(ghost);
    document.addEventListener('mousemove', move);
    document.addEventListener('mouseup', finish);
    ev.preventDefault();
  });
}
