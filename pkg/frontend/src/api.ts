// Typed client for the identification service. Every view in the app talks
// to the service through this module and nothing else.

export interface ChannelInfo {
  name: string;
  fields: string[];
  samples: number;
  t_start_s: number | null;
  t_end_s: number | null;
}

/** Downsampled traces for timeline rendering: values[i] is field i's series. */
export interface PreviewSeries {
  t: number[];
  values: number[][];
}

export interface UploadResponse {
  schema_version: string;
  log_id: string;
  name: string;
  size_bytes: number;
  channels: ChannelInfo[];
  duration_s: number;
  preview: Record<string, PreviewSeries>;
}

export interface SegmentSpec {
  label: string;
  log: number;
  start_s: number;
  end_s: number;
}

export interface IdentifyConfig {
  geometry?: { mass_kg: number; arm_m: number };
  segments: SegmentSpec[];
  sweep?: { t_min_s: number; t_max_s: number; points: number };
  resample_dt_s?: number;
  options?: Record<string, unknown>;
}

export interface Report {
  schema_version: string;
  report_id: string;
  created_utc: string;
  warnings: string[];
  skipped: Record<string, string>;
  provenance: {
    inputs: { name: string; sha256: string }[];
    config: IdentifyConfig & Record<string, unknown>;
    tool_version: string;
  };
  motor?: {
    time_constant_s: number;
    fit_rmse_ms2: number;
    lumped: boolean;
    thrust_coeffs_n: number[][];
  };
  inertia?: Record<string, unknown> & {
    ixx_kg_m2?: number;
    iyy_kg_m2?: number;
    izz_kg_m2?: number;
    k_tau_nm_per_n?: number;
    yaw_ratio_kg_m?: number;
    c_xy_z?: number;
    diagnostics?: Record<string, number>;
  };
  hover?: {
    percentile: number;
    mean_command: number[];
    predicted_hover_command: number;
  };
  validation?: Record<string, unknown>;
}

/** The raw response text is kept alongside the parsed form so number
 * literals can be displayed exactly as the service wrote them. */
export interface ReportEnvelope {
  text: string;
  report: Report;
}

interface ErrorDetail {
  schema_version?: string;
  message?: string;
  stage?: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly stage: string | null;

  constructor(status: number, message: string, stage: string | null = null) {
    super(message);
    this.status = status;
    this.stage = stage;
  }
}

async function raiseForStatus(resp: Response): Promise<void> {
  if (resp.ok) return;
  let message = `${resp.status} ${resp.statusText}`;
  let stage: string | null = null;
  try {
    const body = (await resp.json()) as { detail?: ErrorDetail | string };
    if (typeof body.detail === 'string') {
      message = body.detail;
    } else if (body.detail?.message) {
      message = body.detail.message;
      stage = body.detail.stage ?? null;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(resp.status, message, stage);
}

export class Client {
  constructor(private readonly base: string = '') {}

  async uploadLog(blob: Blob, name: string): Promise<UploadResponse> {
    const form = new FormData();
    form.append('file', blob, name);
    const resp = await fetch(`${this.base}/api/logs`, { method: 'POST', body: form });
    await raiseForStatus(resp);
    return (await resp.json()) as UploadResponse;
  }

  async identify(logId: string, config: IdentifyConfig): Promise<ReportEnvelope> {
    const resp = await fetch(`${this.base}/api/identify`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ log_id: logId, config }),
    });
    await raiseForStatus(resp);
    const text = await resp.text();
    return { text, report: JSON.parse(text) as Report };
  }

  async fetchReport(reportId: string): Promise<ReportEnvelope> {
    const resp = await fetch(`${this.base}/api/report/${reportId}`);
    await raiseForStatus(resp);
    const text = await resp.text();
    return { text, report: JSON.parse(text) as Report };
  }

  async fetchPlot(reportId: string, kind: string): Promise<string> {
    const resp = await fetch(`${this.base}/api/plot/${reportId}/${kind}`);
    await raiseForStatus(resp);
    return await resp.text();
  }
}

/** Chains async jobs so at most one runs at a time (per browser tab). */
export class SerialQueue {
  private tail: Promise<unknown> = Promise.resolve();

  run<T>(job: () => Promise<T>): Promise<T> {
    const next = this.tail.then(job, job);
    this.tail = next.catch(() => undefined);
    return next;
  }
}
