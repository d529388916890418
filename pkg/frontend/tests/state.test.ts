import { describe, expect, it } from 'vitest';
import { ReportEnvelope, UploadResponse } from '../src/api.js';
import { buildConfig, defaultDraft, SessionState } from '../src/state.js';

function fakeUpload(): UploadResponse {
  return {
    schema_version: '1',
    log_id: 'f'.repeat(64),
    name: 'suite.ulg',
    size_bytes: 1234,
    channels: [
      { name: 'sensor_accel', fields: ['x', 'y', 'z'], samples: 100, t_start_s: 0.0, t_end_s: 59.999 },
      { name: 'actuator_motors', fields: ['m0', 'm1', 'm2', 'm3'], samples: 100, t_start_s: 0.0, t_end_s: 59.999 },
    ],
    duration_s: 59.999,
    preview: {},
  };
}

function fakeReport(): ReportEnvelope {
  return { text: '{}', report: {} as ReportEnvelope['report'] };
}

describe('buildConfig', () => {
  it('passes segment endpoints through exactly', () => {
    const draft = defaultDraft();
    draft.segments.linear = { start_s: 0.0012345678901234567, end_s: 26.000000000000004 };
    draft.segments.yaw = { start_s: 46.000000000000014, end_s: 59.5 };
    const config = buildConfig(draft);
    expect(config.segments).toEqual([
      { label: 'linear', log: 0, start_s: 0.0012345678901234567, end_s: 26.000000000000004 },
      { label: 'yaw', log: 0, start_s: 46.000000000000014, end_s: 59.5 },
    ]);
    // JSON round trip keeps the doubles bit for bit
    const echo = JSON.parse(JSON.stringify(config)) as typeof config;
    expect(echo.segments[0].start_s).toBe(0.0012345678901234567);
    expect(echo.segments[1].start_s).toBe(46.000000000000014);
  });

  it('drops empty or inverted windows', () => {
    const draft = defaultDraft();
    draft.segments.linear = { start_s: 5, end_s: 5 };
    draft.segments.roll_pitch = { start_s: 10, end_s: 4 };
    expect(buildConfig(draft).segments).toEqual([]);
  });

  it('sends geometry only when both overrides are set', () => {
    const draft = defaultDraft();
    expect(buildConfig(draft).geometry).toBeUndefined();
    draft.mass_kg = 0.027;
    expect(buildConfig(draft).geometry).toBeUndefined();
    draft.arm_m = 0.0325;
    expect(buildConfig(draft).geometry).toEqual({ mass_kg: 0.027, arm_m: 0.0325 });
  });

  it('carries sweep, resampling and options', () => {
    const draft = defaultDraft();
    draft.sweep = { t_min_s: 0.02, t_max_s: 0.2, points: 25 };
    draft.lumped = false;
    draft.hover_percentile = 0.1;
    const config = buildConfig(draft);
    expect(config.sweep).toEqual({ t_min_s: 0.02, t_max_s: 0.2, points: 25 });
    expect(config.resample_dt_s).toBe(0.001);
    expect(config.options).toEqual({ lumped: false, hover_percentile: 0.1 });
  });
});

describe('SessionState', () => {
  it('requires an upload, a linear window and a sane sweep to identify', () => {
    const s = new SessionState();
    expect(s.canIdentify()).toBe(false);
    s.setUpload(fakeUpload());
    expect(s.canIdentify()).toBe(false);
    s.draft.segments.roll_pitch = { start_s: 26, end_s: 46 };
    expect(s.canIdentify()).toBe(false); // linear is the required one
    s.draft.segments.linear = { start_s: 0, end_s: 26 };
    expect(s.canIdentify()).toBe(true);
    s.draft.sweep.points = 1;
    expect(s.canIdentify()).toBe(false);
    s.draft.sweep.points = 40;
    s.draft.sweep.t_min_s = 0.5;
    s.draft.sweep.t_max_s = 0.5;
    expect(s.canIdentify()).toBe(false);
  });

  it('flags the report stale after any later change', () => {
    const s = new SessionState();
    s.setUpload(fakeUpload());
    s.draft.segments.linear = { start_s: 0, end_s: 26 };
    s.touch();
    expect(s.isStale()).toBe(false); // nothing reported yet
    s.acceptReport(fakeReport());
    expect(s.isStale()).toBe(false);
    s.draft.sweep.points = 50;
    s.touch();
    expect(s.isStale()).toBe(true);
    s.acceptReport(fakeReport());
    expect(s.isStale()).toBe(false);
    s.setUpload(fakeUpload()); // new log invalidates too
    expect(s.isStale()).toBe(true);
  });

  it('reports the union time span of the channels', () => {
    const s = new SessionState();
    expect(s.timeDomain()).toEqual([0, 1]);
    s.setUpload(fakeUpload());
    expect(s.timeDomain()).toEqual([0.0, 59.999]);
  });
});
