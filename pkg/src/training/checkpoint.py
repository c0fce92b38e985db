"""
Checkpoint Binary Format

    magic     4 bytes  b"SCN1"
    version   u32
    header    u32 length + UTF-8 ``key = value`` text (iteration, precision, run config)
    params    u32 count + records
    adam      u32 step + u32 count + records named ``m:<param>`` / ``v:<param>``
    rng       u32 length + UTF-8 JSON of the stream states

    record    u32 name length, name, u32 rank, rank x u32 dims, little-endian reals

All integers are little-endian. Reals are 32- or 64-bit as the header's
``precision`` says. Nothing time-dependent is written, so equal runs give
equal files.
"""
import json
import struct
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple
import logging

import numpy as np

from ..errors import ConfigError, DatasetIOError, FormatError
from ..models.config import RunConfig, parse_kv_text
from .optim import AdamState

logger = logging.getLogger(__name__)

MAGIC = b"SCN1"
VERSION = 1
PRECISIONS = {32: "<f4", 64: "<f8"}
HEADER_EXCLUDE = ("out", "checkpoint_precision")


@dataclass
class Checkpoint:
    """Everything needed to continue or reproduce a run at one iteration."""
    run: RunConfig
    iteration: int
    params: "OrderedDict[str, np.ndarray]"
    adam: AdamState = field(default_factory=AdamState)
    rng_state: Dict[str, Any] = field(default_factory=dict)

    @property
    def precision(self) -> int:
        return self.run.checkpoint_precision


class _Writer:
    def __init__(self, dtype: str):
        self.parts: List[bytes] = []
        self.dtype = dtype

    def u32(self, value: int) -> None:
        self.parts.append(struct.pack("<I", value))

    def blob(self, data: bytes) -> None:
        self.u32(len(data))
        self.parts.append(data)

    def records(self, arrays: List[Tuple[str, np.ndarray]]) -> None:
        self.u32(len(arrays))
        for name, array in arrays:
            self.blob(name.encode("utf-8"))
            self.u32(array.ndim)
            for dim in array.shape:
                self.u32(dim)
            self.parts.append(np.ascontiguousarray(array, dtype=self.dtype).tobytes())

    def bytes(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0
        self.dtype = "<f4"

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.data):
            raise FormatError(f"truncated checkpoint while reading {what}", offset=self.offset)
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def blob(self, what: str) -> bytes:
        return self.take(self.u32(what), what)

    def text(self, what: str) -> str:
        start = self.offset
        raw = self.blob(what)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"{what} is not UTF-8", offset=start) from e

    def records(self, what: str) -> "OrderedDict[str, np.ndarray]":
        arrays: "OrderedDict[str, np.ndarray]" = OrderedDict()
        for _ in range(self.u32(f"{what} count")):
            name = self.text(f"{what} name")
            rank = self.u32(f"rank of {name}")
            shape = tuple(self.u32(f"dims of {name}") for _ in range(rank))
            itemsize = np.dtype(self.dtype).itemsize
            raw = self.take(int(np.prod(shape, dtype=np.int64)) * itemsize, f"data of {name}")
            arrays[name] = np.frombuffer(raw, dtype=self.dtype).astype(np.float64).reshape(shape)
        return arrays


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    precision = checkpoint.precision
    header = f"iteration = {checkpoint.iteration}\nprecision = {precision}\n"
    header += checkpoint.run.to_kv_text(exclude=HEADER_EXCLUDE)

    writer = _Writer(PRECISIONS[precision])
    writer.parts.append(MAGIC)
    writer.u32(VERSION)
    writer.blob(header.encode("utf-8"))
    writer.records(list(checkpoint.params.items()))
    writer.u32(checkpoint.adam.t)
    moments = [(f"m:{k}", v) for k, v in checkpoint.adam.m.items()]
    moments += [(f"v:{k}", v) for k, v in checkpoint.adam.v.items()]
    writer.records(moments)
    writer.blob(json.dumps(checkpoint.rng_state, sort_keys=True).encode("utf-8"))
    return writer.bytes()


def decode_checkpoint(data: bytes, out: Path = None) -> Checkpoint:
    reader = _Reader(data)
    magic = reader.take(4, "magic")
    if magic != MAGIC:
        raise FormatError(f"not a checkpoint: magic {magic!r}, expected {MAGIC!r}", offset=0)
    version = reader.u32("version")
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}", offset=4)

    header_offset = reader.offset
    header = reader.text("header")
    try:
        values = parse_kv_text(header)
        iteration = int(values.pop("iteration"))
        precision = int(values.pop("precision"))
        reader.dtype = PRECISIONS[precision]
    except (KeyError, ValueError, ConfigError) as e:
        raise FormatError(f"bad checkpoint header: {e}", offset=header_offset) from e
    values["checkpoint_precision"] = precision
    if out is not None:
        values["out"] = str(out)
    try:
        run = RunConfig.from_flat(values)
    except ConfigError as e:
        raise FormatError(f"bad checkpoint header: {e}", offset=header_offset) from e

    params = reader.records("parameter")
    adam = AdamState(t=reader.u32("adam step"))
    for name, array in reader.records("moment").items():
        kind, _, param = name.partition(":")
        if kind not in ("m", "v"):
            raise FormatError(f"unknown optimizer record {name!r}", offset=reader.offset)
        getattr(adam, kind)[param] = array

    rng_offset = reader.offset
    try:
        rng_state = json.loads(reader.text("rng state"))
    except json.JSONDecodeError as e:
        raise FormatError(f"bad rng state: {e}", offset=rng_offset) from e
    if reader.offset != len(data):
        raise FormatError("trailing bytes after checkpoint", offset=reader.offset)
    return Checkpoint(run, iteration, params, adam, rng_state)


def save_checkpoint(path: Path, checkpoint: Checkpoint) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(checkpoint))
    logger.debug(f"Saved checkpoint at iteration {checkpoint.iteration} to {path}")


def load_checkpoint(path: Path) -> Checkpoint:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise DatasetIOError(f"cannot read checkpoint {path}: {e}") from e
    return decode_checkpoint(data, out=path.parent)
