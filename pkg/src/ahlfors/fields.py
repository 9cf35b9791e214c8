"""Grid-sampled tensor fields.

Every field stores a component-major float64 array of shape
``(ncomp, N1, ..., Nn)``.  Symmetric 2-tensors keep the upper-triangular
components in lexicographic order (11, 12, ..., 1n, 22, ..., nn);
2-forms keep the strictly-upper components (12, 13, ..., 23, ...).
Symmetry and antisymmetry therefore hold exactly by construction.

Fields are immutable: the backing array is marked read-only, and copied
on construction unless the caller hands over a fresh array with
``copy=False``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import ClassVar

import numpy as np

from .errors import BadShape


@lru_cache(maxsize=None)
def sym_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i, n))


@lru_cache(maxsize=None)
def antisym_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


class Field:
    """Base class; subclasses fix ``rank``, ``sym`` and the component count."""

    rank: ClassVar[int]
    sym: ClassVar[int] = 0

    __slots__ = ("data",)

    def __init__(self, data, copy: bool = True):
        if copy or not (isinstance(data, np.ndarray) and data.dtype == np.float64 and data.flags.c_contiguous):
            arr = np.array(data, dtype=np.float64, copy=True, order="C")
        else:
            arr = data
        n = arr.ndim - 1
        if n < 1:
            raise BadShape("field data needs a component axis and at least one grid axis")
        if arr.shape[0] != self.ncomp_for(n):
            raise BadShape(
                f"{type(self).__name__} on a {n}-dimensional grid needs "
                f"{self.ncomp_for(n)} components, got {arr.shape[0]}"
            )
        arr.setflags(write=False)
        self.data = arr

    @classmethod
    def ncomp_for(cls, n: int) -> int:
        raise NotImplementedError

    @property
    def n(self) -> int:
        return self.data.ndim - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape[1:]

    @classmethod
    def zeros(cls, shape):
        shape = tuple(shape)
        return cls(np.zeros((cls.ncomp_for(len(shape)),) + shape))

    def _new(self, data):
        return type(self)(data, copy=False)

    def _check_same(self, other):
        if type(other) is not type(self) or other.data.shape != self.data.shape:
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")

    def __add__(self, other):
        self._check_same(other)
        return self._new(self.data + other.data)

    def __sub__(self, other):
        self._check_same(other)
        return self._new(self.data - other.data)

    def __neg__(self):
        return self._new(-self.data)

    def __mul__(self, c):
        if isinstance(c, ScalarField):
            return self._new(self.data * c.data[0])
        return self._new(self.data * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self._new(self.data / c)

    def __repr__(self):
        return f"{type(self).__name__}(shape={self.shape})"


class ScalarField(Field):
    rank = 0

    @classmethod
    def ncomp_for(cls, n):
        return 1

    @classmethod
    def from_values(cls, values):
        return cls(np.asarray(values, dtype=np.float64)[None])

    @property
    def values(self) -> np.ndarray:
        return self.data[0]


class OneFormField(Field):
    """Covariant 1-tensor theta_i."""

    rank = 1

    @classmethod
    def ncomp_for(cls, n):
        return n


class VectorField(Field):
    """Contravariant 1-tensor xi^i; obtained from a one-form via ``sharp``."""

    rank = 1

    @classmethod
    def ncomp_for(cls, n):
        return n


@lru_cache(maxsize=None)
def sym_index(n: int) -> dict[tuple[int, int], int]:
    """Packed component index of (i, j) and (j, i) in symmetric storage."""
    out = {}
    for c, (i, j) in enumerate(sym_pairs(n)):
        out[i, j] = out[j, i] = c
    return out


class _Rank2(Field):
    rank = 2

    def full(self) -> np.ndarray:
        raise NotImplementedError

    @classmethod
    def from_full(cls, arr):
        raise NotImplementedError


class SymTensorField(_Rank2):
    sym = 1

    @classmethod
    def ncomp_for(cls, n):
        return n * (n + 1) // 2

    def full(self) -> np.ndarray:
        """Return the ``(n, n, *shape)`` array of all components."""
        n = self.n
        out = np.empty((n, n) + self.shape)
        for c, (i, j) in enumerate(sym_pairs(n)):
            out[i, j] = self.data[c]
            out[j, i] = self.data[c]
        return out

    @classmethod
    def from_full(cls, arr, symmetrize: bool = True):
        """Pack an ``(n, n, *shape)`` array.

        With ``symmetrize`` the packed value is ``(a_ij + a_ji)/2``;
        otherwise only the upper triangle is read.
        """
        arr = np.asarray(arr)
        n = arr.shape[0]
        pairs = sym_pairs(n)
        if symmetrize:
            data = [0.5 * (arr[i, j] + arr[j, i]) if i != j else arr[i, i] for i, j in pairs]
        else:
            data = [arr[i, j] for i, j in pairs]
        return cls(np.stack(data), copy=False)

    @classmethod
    def diag(cls, entries):
        """Diagonal tensor from a list of n arrays (or scalars broadcast to the first array's shape)."""
        entries = [np.asarray(e, dtype=np.float64) for e in entries]
        shape = np.broadcast_shapes(*(e.shape for e in entries))
        n = len(entries)
        data = np.zeros((n * (n + 1) // 2,) + shape)
        for c, (i, j) in enumerate(sym_pairs(n)):
            if i == j:
                data[c] = entries[i]
        return cls(data)


class TwoFormField(_Rank2):
    sym = -1

    @classmethod
    def ncomp_for(cls, n):
        return n * (n - 1) // 2

    def full(self) -> np.ndarray:
        n = self.n
        out = np.zeros((n, n) + self.shape)
        for c, (i, j) in enumerate(antisym_pairs(n)):
            out[i, j] = self.data[c]
            out[j, i] = -self.data[c]
        return out

    @classmethod
    def from_full(cls, arr, antisymmetrize: bool = True):
        arr = np.asarray(arr)
        n = arr.shape[0]
        if antisymmetrize:
            data = [0.5 * (arr[i, j] - arr[j, i]) for i, j in antisym_pairs(n)]
        else:
            data = [arr[i, j] for i, j in antisym_pairs(n)]
        return cls(np.stack(data), copy=False)


FIELD_TYPES = {
    (0, 0): ScalarField,
    (1, 0): OneFormField,
    (2, 1): SymTensorField,
    (2, -1): TwoFormField,
}
