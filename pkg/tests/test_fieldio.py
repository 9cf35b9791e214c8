import numpy as np
import pytest
from hypothesis import given, strategies as st

from ahlfors import OneFormField, ScalarField, SymTensorField, TwoFormField, VectorField, read_field, write_field
from ahlfors.errors import BadMagic, ShapeMismatch, TruncatedPayload
from ahlfors.fieldio import decode_field, encode_field, header_line

CLASSES = [ScalarField, OneFormField, SymTensorField, TwoFormField]


@given(cls=st.sampled_from(CLASSES), n=st.sampled_from([2, 3]), seed=st.integers(0, 2**32 - 1),
       size=st.sampled_from([8, 10]))
def test_round_trip_bitwise(cls, n, seed, size):
    rng = np.random.default_rng(seed)
    shape = (size,) * n
    data = rng.standard_normal((cls.ncomp_for(n),) + shape) * 10.0 ** rng.integers(-300, 300)
    f = cls(data)
    g = decode_field(encode_field(f))
    assert type(g) is cls and g.data.tobytes() == f.data.tobytes()


def test_special_values_survive(tmp_path):
    data = np.array([[np.nan, np.inf], [-0.0, 5e-324]])[None].repeat(1, 0)
    f = ScalarField(np.pad(data, ((0, 0), (0, 6), (0, 6))))
    write_field(tmp_path / "s.gfld", f)
    assert read_field(tmp_path / "s.gfld").data.tobytes() == f.data.tobytes()


def test_header_text():
    f = SymTensorField.zeros((32, 32))
    assert header_line(f) == b"GFLD1 n=2 shape=32,32 rank=2 sym=1 layout=component-major dtype=f64le\n"
    assert len(encode_field(f)) == len(header_line(f)) + 3 * 32 * 32 * 8


def test_component_order():
    full = np.zeros((3, 3, 8, 8, 8))
    for i in range(3):
        for j in range(3):
            a, b = sorted((i, j))
            full[i, j] = 10 * (a + 1) + (b + 1)
    blob = encode_field(SymTensorField.from_full(full))
    vals = np.frombuffer(blob[blob.index(b"\n") + 1:], "<f8").reshape(6, -1)[:, 0]
    assert list(vals) == [11, 12, 13, 22, 23, 33]
    w = np.zeros((3, 3, 8, 8, 8))
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        w[i, j], w[j, i] = 10 * (i + 1) + (j + 1), -(10 * (i + 1) + (j + 1))
    blob = encode_field(TwoFormField.from_full(w))
    vals = np.frombuffer(blob[blob.index(b"\n") + 1:], "<f8").reshape(3, -1)[:, 0]
    assert list(vals) == [12, 13, 23]


def test_truncated_payload():
    blob = encode_field(SymTensorField.zeros((32, 32)))
    with pytest.raises(TruncatedPayload):
        decode_field(blob[:-8])


def test_trailing_bytes():
    with pytest.raises(ShapeMismatch):
        decode_field(encode_field(ScalarField.zeros((8, 8))) + b"\0" * 8)


@pytest.mark.parametrize("blob", [b"GFLD2 n=2", b"", b"GFLD1 n=2 shape=8,8 rank=0 sym=0 layout=component-major dtype=f64le"])
def test_bad_magic(blob):
    with pytest.raises(BadMagic):
        decode_field(blob)


@pytest.mark.parametrize("header", [
    b"GFLD1 n=3 shape=8,8 rank=0 sym=0 layout=component-major dtype=f64le\n",
    b"GFLD1 n=2 shape=8,8 rank=1 sym=1 layout=component-major dtype=f64le\n",
])
def test_inconsistent_header(header):
    with pytest.raises(ShapeMismatch):
        decode_field(header + b"\0" * 8 * 64)


def test_vector_fields_not_writable(tmp_path):
    with pytest.raises(TypeError):
        write_field(tmp_path / "v.gfld", VectorField.zeros((8, 8)))
