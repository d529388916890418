// Session state for one analysis: the uploaded log, the config draft, and
// the latest report. A revision counter ties reports to the settings they
// were computed from so the UI can flag stale results.

import { IdentifyConfig, ReportEnvelope, SegmentSpec, UploadResponse } from './api.js';

export type SegmentLabel = 'linear' | 'roll_pitch' | 'yaw';

export const SEGMENT_LABELS: readonly SegmentLabel[] = ['linear', 'roll_pitch', 'yaw'];

export interface SegmentWindow {
  start_s: number;
  end_s: number;
}

export interface ConfigDraft {
  segments: Partial<Record<SegmentLabel, SegmentWindow>>;
  sweep: { t_min_s: number; t_max_s: number; points: number };
  resample_dt_s: number;
  lumped: boolean;
  hover_percentile: number;
  // both set -> geometry override sent; otherwise the service default is used
  mass_kg: number | null;
  arm_m: number | null;
}

export function defaultDraft(): ConfigDraft {
  return {
    segments: {},
    sweep: { t_min_s: 0.001, t_max_s: 1.0, points: 200 },
    resample_dt_s: 0.001,
    lumped: true,
    hover_percentile: 0.05,
    mass_kg: null,
    arm_m: null,
  };
}

function validWindow(w: SegmentWindow | undefined): w is SegmentWindow {
  return !!w && Number.isFinite(w.start_s) && Number.isFinite(w.end_s) && w.end_s > w.start_s;
}

/** The identify request body's config, built only from the draft. Segment
 * windows are passed through as typed, so what the user sees in the form is
 * exactly what the service receives. */
export function buildConfig(draft: ConfigDraft): IdentifyConfig {
  const segments: SegmentSpec[] = [];
  for (const label of SEGMENT_LABELS) {
    const w = draft.segments[label];
    if (validWindow(w)) {
      segments.push({ label, log: 0, start_s: w.start_s, end_s: w.end_s });
    }
  }
  const config: IdentifyConfig = {
    segments,
    sweep: { ...draft.sweep },
    resample_dt_s: draft.resample_dt_s,
    options: { lumped: draft.lumped, hover_percentile: draft.hover_percentile },
  };
  if (draft.mass_kg !== null && draft.arm_m !== null) {
    config.geometry = { mass_kg: draft.mass_kg, arm_m: draft.arm_m };
  }
  return config;
}

export class SessionState {
  upload: UploadResponse | null = null;
  draft: ConfigDraft = defaultDraft();
  report: ReportEnvelope | null = null;

  private revision = 0;
  private reportRevision = -1;

  /** Call after any change that would alter the next identify request. */
  touch(): void {
    this.revision += 1;
  }

  setUpload(upload: UploadResponse): void {
    this.upload = upload;
    this.touch();
  }

  acceptReport(env: ReportEnvelope): void {
    this.report = env;
    this.reportRevision = this.revision;
  }

  /** True when the displayed report no longer matches the displayed config. */
  isStale(): boolean {
    return this.report !== null && this.reportRevision !== this.revision;
  }

  sweepValid(): boolean {
    const s = this.draft.sweep;
    return (
      Number.isFinite(s.t_min_s) && Number.isFinite(s.t_max_s) &&
      s.t_min_s > 0 && s.t_min_s < s.t_max_s &&
      Number.isInteger(s.points) && s.points >= 2 &&
      Number.isFinite(this.draft.resample_dt_s) && this.draft.resample_dt_s > 0
    );
  }

  /** The linear segment feeds every later stage, so it is the one required
   * selection; roll_pitch and yaw degrade into skipped estimates. */
  canIdentify(): boolean {
    return this.upload !== null && validWindow(this.draft.segments.linear) && this.sweepValid();
  }

  /** Full time span covered by the uploaded log's channels. */
  timeDomain(): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    for (const ch of this.upload?.channels ?? []) {
      if (ch.t_start_s !== null) lo = Math.min(lo, ch.t_start_s);
      if (ch.t_end_s !== null) hi = Math.max(hi, ch.t_end_s);
    }
    if (lo >= hi) return [0, 1];
    return [lo, hi];
  }
}
