// DOM rendering for the app's panels. Pure functions of (container, data)
// so they can be exercised directly in tests.

import { ApiError, Report, ReportEnvelope, UploadResponse } from './api.js';
import { numberLiterals } from './rawjson.js';
import { SegmentLabel, SEGMENT_LABELS } from './state.js';

export function clear(container: HTMLElement): void {
  container.replaceChildren();
}

function td(text: string, cls: string): HTMLTableCellElement {
  const cell = document.createElement('td');
  cell.textContent = text;
  cell.className = cls;
  return cell;
}

export function renderInventory(container: HTMLElement, up: UploadResponse): void {
  clear(container);
  const line = document.createElement('p');
  line.className = 'log-line';
  line.textContent =
    `${up.name} (${up.size_bytes} bytes, log id ${up.log_id.slice(0, 12)}, ` +
    `${up.duration_s.toFixed(2)} s)`;
  container.appendChild(line);

  const table = document.createElement('table');
  table.className = 'channels';
  const head = document.createElement('tr');
  for (const h of ['channel', 'fields', 'samples', 'span (s)']) {
    const th = document.createElement('th');
    th.textContent = h;
    head.appendChild(th);
  }
  table.appendChild(head);
  for (const ch of up.channels) {
    const tr = document.createElement('tr');
    tr.appendChild(td(ch.name, 'name'));
    tr.appendChild(td(ch.fields.join(', '), 'fields'));
    tr.appendChild(td(String(ch.samples), 'samples'));
    const span =
      ch.t_start_s !== null && ch.t_end_s !== null
        ? `${ch.t_start_s.toFixed(2)} .. ${ch.t_end_s.toFixed(2)}`
        : 'empty';
    tr.appendChild(td(span, 'span'));
    table.appendChild(tr);
  }
  container.appendChild(table);
}

interface ParamRow {
  label: string;
  path: string;
  unit: string;
}

function parameterRows(report: Report): ParamRow[] {
  const rows: ParamRow[] = [];
  if (report.motor) {
    rows.push({ label: 'motor time constant T_m', path: 'motor.time_constant_s', unit: 's' });
    report.motor.thrust_coeffs_n.forEach((coeffs, i) => {
      const who = report.motor!.lumped ? 'shared' : `motor ${i}`;
      coeffs.forEach((_, j) => {
        rows.push({
          label: `thrust curve K${j} (${who})`,
          path: `motor.thrust_coeffs_n.${i}.${j}`,
          unit: 'N',
        });
      });
    });
    rows.push({ label: 'thrust fit RMSE', path: 'motor.fit_rmse_ms2', unit: 'm/s^2' });
  }
  rows.push(
    { label: 'inertia Ixx', path: 'inertia.ixx_kg_m2', unit: 'kg m^2' },
    { label: 'inertia Iyy', path: 'inertia.iyy_kg_m2', unit: 'kg m^2' },
    { label: 'inertia Izz (predicted)', path: 'inertia.izz_kg_m2', unit: 'kg m^2' },
    { label: 'torque coefficient K_tau', path: 'inertia.k_tau_nm_per_n', unit: 'N m / N' },
    { label: 'yaw ratio Izz/K_tau', path: 'inertia.yaw_ratio_kg_m', unit: 'kg m' },
    { label: 'Izz prediction ratio', path: 'inertia.c_xy_z', unit: '' },
  );
  if (report.hover) {
    report.hover.mean_command.forEach((_, i) => {
      rows.push({ label: `hover command m${i} (measured)`, path: `hover.mean_command.${i}`, unit: '' });
    });
    rows.push({
      label: 'hover command (predicted)',
      path: 'hover.predicted_hover_command',
      unit: '',
    });
  } else {
    rows.push(
      { label: 'hover command (measured)', path: 'hover.mean_command', unit: '' },
      { label: 'hover command (predicted)', path: 'hover.predicted_hover_command', unit: '' },
    );
  }
  for (const key of Object.keys(report.inertia?.diagnostics ?? {})) {
    rows.push({ label: `diagnostic ${key}`, path: `inertia.diagnostics.${key}`, unit: '' });
  }
  return rows;
}

/** Longest skip entry covering the path: exact key first, then prefixes
 * ("hover" covers "hover.mean_command.0"). */
function skipReason(report: Report, path: string): string | null {
  const parts = path.split('.');
  for (let n = parts.length; n >= 1; n--) {
    const key = parts.slice(0, n).join('.');
    if (key in report.skipped) return report.skipped[key];
  }
  return null;
}

/** Parameter table. Every value cell is the exact number literal from the
 * service's JSON response; nothing is parsed and re-formatted. */
export function renderParamTable(container: HTMLElement, env: ReportEnvelope): void {
  clear(container);
  const literals = numberLiterals(env.text);
  const table = document.createElement('table');
  table.className = 'params';
  const head = document.createElement('tr');
  for (const h of ['parameter', 'value', 'unit', 'note']) {
    const th = document.createElement('th');
    th.textContent = h;
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const row of parameterRows(env.report)) {
    const tr = document.createElement('tr');
    tr.dataset.path = row.path;
    tr.appendChild(td(row.label, 'param'));
    const literal = literals.get(row.path);
    const reason = skipReason(env.report, row.path);
    if (reason !== null) {
      tr.classList.add('skipped');
      tr.appendChild(td('skipped', 'value'));
      tr.appendChild(td(row.unit, 'unit'));
      tr.appendChild(td(reason, 'note'));
    } else if (literal !== undefined) {
      tr.appendChild(td(literal, 'value'));
      tr.appendChild(td(row.unit, 'unit'));
      tr.appendChild(td('', 'note'));
    } else {
      tr.appendChild(td('n/a', 'value'));
      tr.appendChild(td(row.unit, 'unit'));
      tr.appendChild(td('not in this report', 'note'));
    }
    table.appendChild(tr);
  }
  container.appendChild(table);
}

export function renderReportMeta(container: HTMLElement, env: ReportEnvelope): void {
  clear(container);
  const p = document.createElement('p');
  p.className = 'report-meta';
  const inputs = env.report.provenance.inputs
    .map((i) => `${i.name} (${i.sha256.slice(0, 12)})`)
    .join(', ');
  p.textContent =
    `report ${env.report.report_id} at ${env.report.created_utc} ` +
    `from ${inputs}, tool ${env.report.provenance.tool_version}`;
  container.appendChild(p);
}

export function renderWarnings(container: HTMLElement, report: Report): void {
  clear(container);
  if (report.warnings.length === 0) return;
  const title = document.createElement('p');
  title.className = 'warnings-title';
  title.textContent = `warnings (${report.warnings.length})`;
  container.appendChild(title);
  const ul = document.createElement('ul');
  ul.className = 'warnings';
  for (const w of report.warnings) {
    const li = document.createElement('li');
    li.textContent = w;
    ul.appendChild(li);
  }
  container.appendChild(ul);
}

/** Inline error banner; pass null to clear. */
export function renderError(slot: HTMLElement, err: unknown): void {
  clear(slot);
  if (err === null || err === undefined) return;
  const div = document.createElement('div');
  div.className = 'error-banner';
  if (err instanceof ApiError) {
    div.textContent = err.message;
    if (err.stage) div.dataset.stage = err.stage;
  } else if (err instanceof Error) {
    div.textContent = err.message;
  } else {
    div.textContent = String(err);
  }
  slot.appendChild(div);
}

/** Segments implicated by a failed pipeline stage; used to highlight the
 * offending picker rows next to the 422 banner. */
export function stageSegments(stage: string | null): SegmentLabel[] {
  switch (stage) {
    case 'segments':
      return [...SEGMENT_LABELS];
    case 'sweep':
    case 'hover':
      return ['linear'];
    case 'roll_pitch':
      return ['roll_pitch'];
    case 'yaw':
      return ['yaw'];
    default:
      return [];
  }
}

export function renderStale(banner: HTMLElement, stale: boolean): void {
  banner.hidden = !stale;
  banner.textContent = stale
    ? 'stale: the settings changed after this report was computed; run identify again'
    : '';
}
