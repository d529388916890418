// Wires the page together: one SessionState, one Client, and DOM events.
// Single-page flow: upload, pick segments on the timeline, tune the sweep,
// identify, read the report.

import { ApiError, Client, SerialQueue } from './api.js';
import { angularFitPlot, hoverHistPlot, sweepPlot, thrustFitPlot } from './plot.js';
import { buildConfig, SessionState, SEGMENT_LABELS, SegmentLabel } from './state.js';
import { attachBrush, buildPanel } from './timeline.js';
import {
  clear, renderError, renderInventory, renderParamTable, renderReportMeta,
  renderStale, renderWarnings, stageSegments,
} from './views.js';

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export class App {
  private readonly client = new Client();
  private readonly state = new SessionState();
  private readonly queue = new SerialQueue();
  private running = false;

  constructor() {
    byId<HTMLInputElement>('upload-input').addEventListener('change', (ev) => {
      const input = ev.target as HTMLInputElement;
      const file = input.files?.[0];
      if (file) void this.upload(file);
      input.value = '';
    });

    for (const label of SEGMENT_LABELS) {
      const start = byId<HTMLInputElement>(`seg-${label}-start`);
      const end = byId<HTMLInputElement>(`seg-${label}-end`);
      const onEdit = () => {
        const a = Number(start.value);
        const b = Number(end.value);
        if (start.value !== '' && end.value !== '' && Number.isFinite(a) && Number.isFinite(b)) {
          this.state.draft.segments[label] = { start_s: a, end_s: b };
        } else {
          delete this.state.draft.segments[label];
        }
        this.state.touch();
        this.rebuildTimeline();
        this.refresh();
      };
      start.addEventListener('change', onEdit);
      end.addEventListener('change', onEdit);
      byId<HTMLButtonElement>(`seg-${label}-clear`).addEventListener('click', () => {
        start.value = '';
        end.value = '';
        onEdit();
      });
    }

    this.bindDraftNumber('sweep-tmin', (v) => (this.state.draft.sweep.t_min_s = v));
    this.bindDraftNumber('sweep-tmax', (v) => (this.state.draft.sweep.t_max_s = v));
    this.bindDraftNumber('sweep-points', (v) => (this.state.draft.sweep.points = v));
    this.bindDraftNumber('resample-dt', (v) => (this.state.draft.resample_dt_s = v));
    this.bindDraftNumber('opt-hover-pct', (v) => (this.state.draft.hover_percentile = v));
    this.bindOptionalNumber('opt-mass', (v) => (this.state.draft.mass_kg = v));
    this.bindOptionalNumber('opt-arm', (v) => (this.state.draft.arm_m = v));
    byId<HTMLInputElement>('opt-lumped').addEventListener('change', (ev) => {
      this.state.draft.lumped = (ev.target as HTMLInputElement).checked;
      this.state.touch();
      this.refresh();
    });

    byId<HTMLButtonElement>('identify-btn').addEventListener('click', () => {
      void this.identify();
    });
    this.refresh();
  }

  private bindDraftNumber(id: string, set: (v: number) => void): void {
    byId<HTMLInputElement>(id).addEventListener('change', (ev) => {
      set(Number((ev.target as HTMLInputElement).value));
      this.state.touch();
      this.refresh();
    });
  }

  private bindOptionalNumber(id: string, set: (v: number | null) => void): void {
    byId<HTMLInputElement>(id).addEventListener('change', (ev) => {
      const raw = (ev.target as HTMLInputElement).value;
      set(raw === '' ? null : Number(raw));
      this.state.touch();
      this.refresh();
    });
  }

  private activeSegment(): SegmentLabel {
    for (const label of SEGMENT_LABELS) {
      if (byId<HTMLInputElement>(`pick-${label}`).checked) return label;
    }
    return 'linear';
  }

  async upload(file: File): Promise<void> {
    renderError(byId('upload-error'), null);
    try {
      const up = await this.client.uploadLog(file, file.name);
      this.state.setUpload(up);
    } catch (err) {
      // failed upload leaves the session untouched
      renderError(byId('upload-error'), err);
      return;
    }
    renderInventory(byId('inventory'), this.state.upload!);
    byId('session').hidden = false;
    this.rebuildTimeline();
    this.refresh();
  }

  private rebuildTimeline(): void {
    const container = byId('timeline');
    clear(container);
    const up = this.state.upload;
    if (!up) return;
    const domain = this.state.timeDomain();
    for (const name of Object.keys(up.preview).sort()) {
      const panel = buildPanel(name, up.preview[name], domain, this.state.draft.segments);
      attachBrush(panel, (a, b) => this.pickSegment(a, b));
      container.appendChild(panel.root);
    }
  }

  private pickSegment(a: number, b: number): void {
    const label = this.activeSegment();
    this.state.draft.segments[label] = { start_s: a, end_s: b };
    byId<HTMLInputElement>(`seg-${label}-start`).value = String(a);
    byId<HTMLInputElement>(`seg-${label}-end`).value = String(b);
    this.state.touch();
    this.rebuildTimeline();
    this.refresh();
  }

  async identify(): Promise<void> {
    if (!this.state.canIdentify() || this.running) return;
    await this.queue.run(async () => {
      this.running = true;
      this.refresh();
      renderError(byId('identify-error'), null);
      this.highlight([]);
      try {
        const env = await this.client.identify(
          this.state.upload!.log_id,
          buildConfig(this.state.draft),
        );
        this.state.acceptReport(env);
        renderReportMeta(byId('report-meta'), env);
        renderParamTable(byId('param-table'), env);
        renderWarnings(byId('warnings'), env.report);
        byId('report').hidden = false;
        await this.renderPlots(env.report.report_id);
      } catch (err) {
        renderError(byId('identify-error'), err);
        if (err instanceof ApiError) this.highlight(stageSegments(err.stage));
      } finally {
        this.running = false;
        this.refresh();
      }
    });
  }

  private async renderPlots(reportId: string): Promise<void> {
    const kinds: [string, (csv: string) => SVGSVGElement][] = [
      ['sweep', sweepPlot],
      ['thrust_fit', thrustFitPlot],
      ['angular_fit', angularFitPlot],
      ['hover_hist', hoverHistPlot],
    ];
    await Promise.all(kinds.map(async ([kind, build]) => {
      const slot = byId(`plot-${kind}`);
      clear(slot);
      try {
        const csv = await this.client.fetchPlot(reportId, kind);
        slot.appendChild(build(csv));
      } catch (err) {
        // a skipped stage has no series; say so instead of an empty box
        const note = document.createElement('p');
        note.className = 'plot-missing';
        note.textContent = err instanceof ApiError ? err.message : String(err);
        slot.appendChild(note);
      }
    }));
  }

  private highlight(labels: SegmentLabel[]): void {
    for (const label of SEGMENT_LABELS) {
      byId(`seg-row-${label}`).classList.toggle('error-highlight', labels.includes(label));
    }
  }

  private refresh(): void {
    const btn = byId<HTMLButtonElement>('identify-btn');
    btn.disabled = !this.state.canIdentify() || this.running;
    btn.textContent = this.running ? 'identifying...' : 'identify';
    renderStale(byId('stale-banner'), this.state.isStale());
    byId('report').classList.toggle('stale', this.state.isStale());
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  new App();
}
