"""GFLD1 field files.

One ASCII header line, newline-terminated::

    GFLD1 n=<n> shape=<N1,...,Nn> rank=<0|1|2> sym=<0|1|-1> layout=component-major dtype=f64le

followed immediately by the raw little-endian float64 payload, component
major and row-major within each component.  Symmetric tensors store
11, 12, ..., 1n, 22, ..., nn; 2-forms (sym=-1) store the strictly-upper
components.
"""
from __future__ import annotations

import os

import numpy as np

from .errors import BadMagic, ShapeMismatch, TruncatedPayload
from .fields import FIELD_TYPES, Field, VectorField

MAGIC = b"GFLD1"
_MAX_HEADER = 4096


def header_line(field: Field) -> bytes:
    shape = ",".join(str(s) for s in field.shape)
    return (f"GFLD1 n={field.n} shape={shape} rank={field.rank} sym={field.sym} "
            f"layout=component-major dtype=f64le\n").encode("ascii")


def encode_field(field: Field) -> bytes:
    return header_line(field) + field.data.astype("<f8", copy=False).tobytes(order="C")


def decode_field(blob: bytes) -> Field:
    if not blob.startswith(MAGIC + b" "):
        raise BadMagic("missing GFLD1 magic")
    end = blob.find(b"\n", 0, _MAX_HEADER)
    if end < 0:
        raise BadMagic("header line not terminated")
    try:
        tokens = blob[:end].decode("ascii").split()
        meta = dict(t.split("=", 1) for t in tokens[1:])
        n = int(meta["n"])
        shape = tuple(int(s) for s in meta["shape"].split(","))
        rank, sym = int(meta["rank"]), int(meta["sym"])
    except (UnicodeDecodeError, KeyError, ValueError) as exc:
        raise BadMagic(f"malformed GFLD1 header: {exc}") from exc
    if meta.get("layout") != "component-major" or meta.get("dtype") != "f64le":
        raise BadMagic(f"unsupported layout/dtype {meta.get('layout')}/{meta.get('dtype')}")
    if len(shape) != n:
        raise ShapeMismatch(f"header declares n={n} but shape {shape}")
    cls = FIELD_TYPES.get((rank, sym))
    if cls is None:
        raise ShapeMismatch(f"unknown rank/sym combination {rank}/{sym}")
    ncomp = cls.ncomp_for(n)
    expected = ncomp * int(np.prod(shape)) * 8
    payload = blob[end + 1:]
    if len(payload) < expected:
        raise TruncatedPayload(f"payload has {len(payload)} bytes, header requires {expected}")
    if len(payload) > expected:
        raise ShapeMismatch(f"payload has {len(payload)} bytes, header requires {expected}")
    data = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape((ncomp,) + shape)
    return cls(data, copy=False)


def write_field(path, field: Field) -> None:
    if isinstance(field, VectorField):
        raise TypeError("vector fields are not a GFLD1 rank; lower the index first")
    with open(path, "wb") as fh:
        fh.write(encode_field(field))


def read_field(path) -> Field:
    with open(os.fspath(path), "rb") as fh:
        return decode_field(fh.read())
