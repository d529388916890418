"""Read-only ULog parsing plus a small writer for fixtures and exports.

Covers the subset of the PX4 ULog container needed for time-series work:
header, flag bits, format definitions, info messages, subscriptions, and data
messages. Everything else (parameters, logged strings, sync, dropouts) is
skipped without error. Payloads are little-endian throughout.
"""

from __future__ import annotations

import struct
from typing import Optional, Union

import numpy as np

from .errors import MagicMismatch, TruncatedMessage, UnsupportedVersion
from .types import RawLog

ULOG_MAGIC = bytes([0x55, 0x4C, 0x6F, 0x67, 0x01, 0x12, 0x35])
MAX_SUPPORTED_VERSION = 1
HEADER_SIZE = 16  # magic(7) + version(1) + timestamp(8)

# scalar ULog field types -> struct format characters
_SCALARS = {
    "int8_t": "b", "uint8_t": "B",
    "int16_t": "h", "uint16_t": "H",
    "int32_t": "i", "uint32_t": "I",
    "int64_t": "q", "uint64_t": "Q",
    "float": "f", "double": "d",
    "bool": "B", "char": "c",
}
_SCALAR_SIZES = {k: struct.calcsize("<" + v) for k, v in _SCALARS.items()}


class _Field:
    __slots__ = ("type", "count", "name")

    def __init__(self, type_: str, count: int, name: str):
        self.type = type_
        self.count = count
        self.name = name


def _parse_format(payload: bytes) -> tuple[str, list[_Field]]:
    text = payload.decode("utf-8", errors="replace")
    name, _, body = text.partition(":")
    fields = []
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        type_str, _, field_name = part.partition(" ")
        if "[" in type_str:
            base, _, rest = type_str.partition("[")
            count = int(rest.rstrip("]"))
        else:
            base, count = type_str, 1
        fields.append(_Field(base, count, field_name))
    return name, fields


class _Subscription:
    __slots__ = ("channel", "fmt", "unpack", "columns", "timestamps", "rows")

    def __init__(self, channel: str, fields: list[_Field]):
        self.channel = channel
        self.fmt = fields
        pattern = "<"
        columns: list[str] = []
        for f in fields:
            if f.type not in _SCALARS:
                # nested type: cannot decode the fixed layout; take no columns
                # beyond this point (nested fields are last per the format spec)
                break
            pattern += _SCALARS[f.type] * f.count
            if f.name.startswith("_padding"):
                columns.extend([None] * f.count)
            elif f.type == "char":
                columns.extend([None] * f.count)
            elif f.count == 1:
                columns.append(f.name)
            else:
                columns.extend(f"{f.name}[{j}]" for j in range(f.count))
        self.unpack = struct.Struct(pattern)
        self.columns = columns
        self.timestamps: list[int] = []
        self.rows: list[tuple] = []

    def add(self, payload: bytes):
        if len(payload) < self.unpack.size:
            raise TruncatedMessage(
                f"data message for {self.channel!r} has {len(payload)} bytes, "
                f"format needs {self.unpack.size}")
        values = self.unpack.unpack_from(payload)
        # first field is the uint64 timestamp in microseconds by convention
        self.timestamps.append(values[0])
        self.rows.append(values)


def parse_ulog(data: bytes) -> RawLog:
    """Decode a ULog byte string into one channel per subscription.

    Timestamps come out in seconds. Message types other than format,
    subscription, info, and data are skipped; a file that ends mid-message
    raises TruncatedMessage.
    """
    if len(data) < len(ULOG_MAGIC) or data[:len(ULOG_MAGIC)] != ULOG_MAGIC:
        raise MagicMismatch("not a ULog file (bad magic bytes)")
    if len(data) < HEADER_SIZE:
        raise TruncatedMessage(f"header needs {HEADER_SIZE} bytes, got {len(data)}")
    version = data[len(ULOG_MAGIC)]
    if version > MAX_SUPPORTED_VERSION:
        raise UnsupportedVersion(f"ULog version {version} not supported")
    start_us = struct.unpack_from("<Q", data, 8)[0]

    formats: dict[str, list[_Field]] = {}
    subs: dict[int, _Subscription] = {}
    order: list[_Subscription] = []
    metadata: dict[str, str] = {"start_time_s": repr(start_us / 1e6)}

    pos = HEADER_SIZE
    end = len(data)
    while pos < end:
        if end - pos < 3:
            raise TruncatedMessage("file ends inside a message header")
        size, msg_type = struct.unpack_from("<HB", data, pos)
        pos += 3
        if end - pos < size:
            raise TruncatedMessage(
                f"message {chr(msg_type)!r} claims {size} bytes, {end - pos} remain")
        payload = data[pos:pos + size]
        pos += size

        if msg_type == ord("F"):
            name, fields = _parse_format(payload)
            formats[name] = fields
        elif msg_type == ord("A"):
            if size < 3:
                raise TruncatedMessage("subscription message too short")
            multi_id, msg_id = struct.unpack_from("<BH", payload, 0)
            name = payload[3:].decode("utf-8", errors="replace")
            channel = name if multi_id == 0 else f"{name}[{multi_id}]"
            sub = _Subscription(channel, formats.get(name, []))
            subs[msg_id] = sub
            order.append(sub)
        elif msg_type == ord("D"):
            if size < 2:
                raise TruncatedMessage("data message too short")
            msg_id = struct.unpack_from("<H", payload, 0)[0]
            sub = subs.get(msg_id)
            if sub is not None and sub.columns:
                sub.add(payload[2:])
        elif msg_type == ord("I"):
            if size >= 1:
                key_len = payload[0]
                if 1 + key_len <= size:
                    key_spec = payload[1:1 + key_len].decode("utf-8", errors="replace")
                    value = payload[1 + key_len:]
                    type_str = key_spec.split(" ")[0]
                    key_name = key_spec.split(" ")[-1]
                    if type_str.startswith("char"):
                        metadata[key_name] = value.decode("utf-8", errors="replace")
                    else:
                        metadata[key_name] = value.hex()
        # 'B', 'M', 'P', 'Q', 'L', 'S', 'O', 'R', 'C' and anything else: skipped

    channels: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for sub in order:
        # column 0 is the timestamp; char and padding columns carry no data
        keep = [j for j, c in enumerate(sub.columns) if c is not None and j > 0]
        names = [sub.columns[j] for j in keep]
        if sub.rows:
            ts = np.array(sub.timestamps, dtype=np.float64) / 1e6
            vals = np.array([[row[j] for j in keep] for row in sub.rows], dtype=np.float64)
            vals = vals.reshape(len(sub.rows), len(keep))
        else:
            ts = np.zeros(0)
            vals = np.zeros((0, len(keep)))
        channels[sub.channel] = (ts, vals)
        if names:
            metadata[f"fields.{sub.channel}"] = ",".join(names)
    return RawLog.from_channels(channels, metadata)


def write_ulog(channels: dict[str, tuple[np.ndarray, np.ndarray]],
               metadata: Optional[dict[str, str]] = None,
               field_names: Optional[dict[str, list[str]]] = None,
               start_us: int = 0) -> bytes:
    """Serialize channels (timestamps in seconds, float64 values) to ULog.

    Values are stored as doubles, so a write/parse round trip is bit exact;
    timestamps are stored as integer microseconds. Data messages are merged
    in timestamp order across channels, like a real logger would emit them.
    """
    out = bytearray()
    out += ULOG_MAGIC
    out.append(MAX_SUPPORTED_VERSION)
    out += struct.pack("<Q", start_us)

    def emit(msg_type: str, payload: bytes):
        out.extend(struct.pack("<HB", len(payload), ord(msg_type)))
        out.extend(payload)

    # flag bits: 8 compat + 8 incompat flag bytes + 3 appended-data offsets
    emit("B", bytes(8 + 8 + 24))

    for key, value in (metadata or {}).items():
        key_spec = f"char[{len(value.encode())}] {key}".encode()
        emit("I", bytes([len(key_spec)]) + key_spec + value.encode())

    packers: list[tuple[int, np.ndarray, np.ndarray, struct.Struct]] = []
    for msg_id, (name, (ts, vals)) in enumerate(channels.items()):
        ts = np.asarray(ts, dtype=np.float64)
        vals = np.asarray(vals, dtype=np.float64)
        if vals.ndim == 1:
            vals = vals[:, None]
        ncols = vals.shape[1]
        cols = (field_names or {}).get(name) or [f"f{j}" for j in range(ncols)]
        if len(cols) != ncols:
            raise ValueError(f"channel {name!r}: {len(cols)} field names for {ncols} columns")
        fmt = f"{name}:uint64_t timestamp;" + "".join(f"double {c};" for c in cols)
        emit("F", fmt.encode())
        packers.append((msg_id, ts, vals, struct.Struct(f"<Q{ncols}d")))

    for msg_id, (name, _) in enumerate(channels.items()):
        emit("A", struct.pack("<BH", 0, msg_id) + name.encode())

    # merge data messages by time
    queue: list[tuple[float, int, int]] = []
    for msg_id, ts, _, _ in packers:
        queue.extend((float(t), msg_id, k) for k, t in enumerate(ts))
    queue.sort()
    for _, msg_id, k in queue:
        _, ts, vals, packer = packers[msg_id]
        us = int(round(ts[k] * 1e6))
        payload = struct.pack("<H", msg_id) + packer.pack(us, *vals[k])
        emit("D", payload)
    return bytes(out)


def dataset_channels(ds) -> tuple[dict[str, tuple[np.ndarray, np.ndarray]], dict[str, list[str]]]:
    """Standard channel layout for persisting a SysIdDataset."""
    t = ds.times
    channels = {
        "sensor_accel": (t, ds.accel),
        "sensor_gyro": (t, ds.gyro),
        "actuator_motors": (t, ds.setpoints),
    }
    names = {
        "sensor_accel": ["x", "y", "z"],
        "sensor_gyro": ["x", "y", "z"],
        "actuator_motors": ["m0", "m1", "m2", "m3"],
    }
    return channels, names


def write_dataset_ulog(ds, metadata: Optional[dict[str, str]] = None) -> bytes:
    channels, names = dataset_channels(ds)
    meta = {"generator": "quadsysid simulator"}
    meta.update(metadata or {})
    return write_ulog(channels, metadata=meta, field_names=names)
