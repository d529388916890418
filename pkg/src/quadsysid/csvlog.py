"""CSV flight-log parsing (Crazyflie deck logs and simulator exports)."""

from __future__ import annotations

import csv
import io
from typing import Optional, Union

import numpy as np

from .errors import MissingColumn, NonNumericCell
from .types import ChannelMapping, ChannelSpec, RawLog

# header names commonly used for the time column, in preference order
_TIME_COLUMNS = ("timestamp", "time_s", "time", "t", "tick")


def _find_time_column(header: list[str]) -> int:
    lowered = [h.strip().lower() for h in header]
    for cand in _TIME_COLUMNS:
        if cand in lowered:
            return lowered.index(cand)
    return 0


def _parse_rows(text: str) -> tuple[list[str], np.ndarray]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn("empty CSV: no header row")
    header = [h.strip() for h in header]
    rows = []
    for i, row in enumerate(reader):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise NonNumericCell(f"row {i + 2} has {len(row)} cells, header has {len(header)}")
        try:
            rows.append([float(c) for c in row])
        except ValueError:
            bad = next(c for c in row if not _is_float(c))
            raise NonNumericCell(f"row {i + 2}: cannot parse {bad!r} as a number")
    return header, np.asarray(rows, dtype=np.float64).reshape(len(rows), len(header))


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _resolve_column(header: list[str], field: Union[int, str], channel: str) -> int:
    if isinstance(field, int):
        if not 0 <= field < len(header):
            raise MissingColumn(f"channel {channel!r}: column index {field} out of range "
                                f"for {len(header)} columns")
        return field
    if field not in header:
        raise MissingColumn(f"channel {channel!r}: no column named {field!r}")
    return header.index(field)


def parse_crazyflie_csv(text: str, mapping: ChannelMapping) -> RawLog:
    """Group the mapped columns into channels, timestamps in seconds.

    String fields select columns by header name, integers by raw column
    position. The time column is found by name ("timestamp", "time", "t",
    ...) falling back to the first column; Crazyflie-style "timestamp"
    columns are in milliseconds unless mapping.csv_time_scale says otherwise.
    """
    header, table = _parse_rows(text)
    t_col = _find_time_column(header)
    scale = mapping.csv_time_scale
    if scale is None:
        scale = 1e-3 if header[t_col].strip().lower() in ("timestamp", "tick") else 1.0
    ts = table[:, t_col] * scale

    channels: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    metadata: dict[str, str] = {"source": "csv", "time_column": header[t_col]}
    for spec in (mapping.accel, mapping.gyro, mapping.setpoint):
        idxs = [_resolve_column(header, f, spec.name) for f in spec.fields]
        channels[spec.name] = (ts, table[:, idxs])
        metadata[f"fields.{spec.name}"] = ",".join(header[j] for j in idxs)
    return RawLog.from_channels(channels, metadata)


def positional_mapping(mapping: ChannelMapping) -> ChannelMapping:
    """After parse_crazyflie_csv the channel columns are already in mapping
    order, so downstream consumers index them positionally."""
    def pos(spec: ChannelSpec) -> ChannelSpec:
        return ChannelSpec(spec.name, tuple(range(len(spec.fields))))
    return ChannelMapping(accel=pos(mapping.accel), gyro=pos(mapping.gyro),
                          setpoint=pos(mapping.setpoint),
                          setpoint_scale=mapping.setpoint_scale,
                          csv_time_scale=mapping.csv_time_scale)


def csv_inventory(text: str) -> RawLog:
    """Mapping-free parse for channel listings: columns sharing a dotted
    prefix become one channel, bare columns stand alone."""
    header, table = _parse_rows(text)
    t_col = _find_time_column(header)
    scale = 1e-3 if header[t_col].strip().lower() in ("timestamp", "tick") else 1.0
    ts = table[:, t_col] * scale

    groups: dict[str, list[int]] = {}
    for j, name in enumerate(header):
        if j == t_col:
            continue
        prefix = name.rsplit(".", 1)[0] if "." in name else name
        groups.setdefault(prefix, []).append(j)
    channels = {}
    metadata: dict[str, str] = {"source": "csv", "time_column": header[t_col]}
    for prefix, idxs in groups.items():
        channels[prefix] = (ts, table[:, idxs])
        metadata[f"fields.{prefix}"] = ",".join(
            header[j].rsplit(".", 1)[-1] if "." in header[j] else header[j] for j in idxs)
    return RawLog.from_channels(channels, metadata)


def write_dataset_csv(ds) -> str:
    """Simulator export: one row per sample, dotted column groups."""
    header = ["t", "acc.x", "acc.y", "acc.z", "gyro.x", "gyro.y", "gyro.z",
              "motor.m0", "motor.m1", "motor.m2", "motor.m3"]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    t = ds.times
    for k in range(ds.n_samples):
        writer.writerow([repr(float(v)) for v in
                         (t[k], *ds.accel[k], *ds.gyro[k], *ds.setpoints[k])])
    return out.getvalue()


def csv_default_mapping() -> ChannelMapping:
    """Mapping matching write_dataset_csv's column names."""
    return ChannelMapping(
        accel=ChannelSpec("acc", ("acc.x", "acc.y", "acc.z")),
        gyro=ChannelSpec("gyro", ("gyro.x", "gyro.y", "gyro.z")),
        setpoint=ChannelSpec("motor", ("motor.m0", "motor.m1", "motor.m2", "motor.m3")),
    )
