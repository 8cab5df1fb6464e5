"""Dense bit-packed linear algebra over GF(2).

Vectors and matrices are stored as little-endian 64-bit words (bit i of word w
holds coordinate 64*w + i). All operations are pure; values are treated as
immutable after construction. Row convention throughout: vectors are row
vectors, so the nullspace of a matrix m is the *left* nullspace {c : c·m = 0}
and solve(m, b) finds x with x·m = b. Column-space questions go through
transpose().
"""

from __future__ import annotations

import numpy as np

_WORD = 64


def _nwords(nbits: int) -> int:
    return max(1, (nbits + _WORD - 1) // _WORD)


def _tail_mask(nbits: int) -> np.uint64:
    rem = nbits % _WORD
    if rem == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << rem) - 1)


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a (... , n) array of 0/1 into (..., nwords) uint64, little-endian."""
    bits = np.asarray(bits, dtype=np.uint8) & 1
    n = bits.shape[-1]
    nw = _nwords(n)
    pad = nw * _WORD - n
    if pad:
        bits = np.concatenate(
            [bits, np.zeros(bits.shape[:-1] + (pad,), dtype=np.uint8)], axis=-1
        )
    # np.packbits packs big-endian within bytes; ask for little-endian directly.
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return packed.view(np.uint64).reshape(bits.shape[:-1] + (nw,))


def _unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    by = np.ascontiguousarray(words).view(np.uint8)
    bits = np.unpackbits(by, axis=-1, bitorder="little")
    return bits[..., :n]


class BitVector:
    """A length-`n` row vector over GF(2), packed into uint64 words."""

    __slots__ = ("n", "words")

    def __init__(self, n: int, words: np.ndarray | None = None):
        self.n = int(n)
        if words is None:
            self.words = np.zeros(_nwords(self.n), dtype=np.uint64)
        else:
            words = np.asarray(words, dtype=np.uint64)
            if words.shape != (_nwords(self.n),):
                raise ValueError(f"expected {_nwords(self.n)} words, got {words.shape}")
            self.words = words

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        bits = np.asarray(bits, dtype=np.uint8)
        v = cls(len(bits), _pack_bits(bits))
        return v

    @classmethod
    def from_support(cls, n: int, support) -> "BitVector":
        bits = np.zeros(n, dtype=np.uint8)
        idx = np.asarray(list(support), dtype=np.int64)
        if len(idx):
            bits[idx] = 1
        return cls.from_bits(bits)

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n)

    def copy(self) -> "BitVector":
        return BitVector(self.n, self.words.copy())

    def to_bits(self) -> np.ndarray:
        return _unpack_bits(self.words, self.n)

    def support(self) -> np.ndarray:
        return np.nonzero(self.to_bits())[0]

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def is_zero(self) -> bool:
        return not self.words.any()

    def get(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return int((self.words[i // _WORD] >> np.uint64(i % _WORD)) & np.uint64(1))

    def __getitem__(self, i: int) -> int:
        return self.get(i)

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return BitVector(self.n, self.words ^ other.words)

    def __and__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return BitVector(self.n, self.words & other.words)

    def dot(self, other: "BitVector") -> int:
        """Inner product parity <self, other> over GF(2)."""
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return int(np.bitwise_count(self.words & other.words).sum()) & 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVector)
            and self.n == other.n
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.words.tobytes()))

    def __repr__(self) -> str:
        if self.n <= 64:
            return f"BitVector({''.join(str(b) for b in self.to_bits())})"
        return f"BitVector(n={self.n}, weight={self.weight()})"


class BitMatrix:
    """A rows×cols matrix over GF(2), row-major, rows packed into uint64 words."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        self.rows = int(rows)
        self.cols = int(cols)
        nw = _nwords(self.cols)
        if data is None:
            self.data = np.zeros((self.rows, nw), dtype=np.uint64)
        else:
            data = np.asarray(data, dtype=np.uint64)
            if data.shape != (self.rows, nw):
                raise ValueError(f"expected shape {(self.rows, nw)}, got {data.shape}")
            self.data = data

    @classmethod
    def from_dense(cls, arr) -> "BitMatrix":
        arr = np.atleast_2d(np.asarray(arr, dtype=np.uint8)) & 1
        if arr.size == 0:
            rows = arr.shape[0]
            cols = arr.shape[1] if arr.ndim == 2 else 0
            return cls(rows, cols)
        return cls(arr.shape[0], arr.shape[1], _pack_bits(arr))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8)) if n else cls(0, 0)

    @classmethod
    def from_rows(cls, rows: list[BitVector], cols: int | None = None) -> "BitMatrix":
        if not rows:
            if cols is None:
                raise ValueError("cols required for an empty row list")
            return cls(0, cols)
        n = rows[0].n
        if any(r.n != n for r in rows):
            raise ValueError("row length mismatch")
        data = np.stack([r.words for r in rows])
        return cls(len(rows), n, data)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        return _unpack_bits(self.data, self.cols)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i].copy())

    def get(self, i: int, j: int) -> int:
        return int((self.data[i, j // _WORD] >> np.uint64(j % _WORD)) & np.uint64(1))

    def column_bits(self, j: int) -> np.ndarray:
        """The 0/1 entries of column j as a length-`rows` uint8 array."""
        return ((self.data[:, j // _WORD] >> np.uint64(j % _WORD)) & np.uint64(1)).astype(np.uint8)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def row_weights(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros(0, dtype=np.int64)
        return np.bitwise_count(self.data).sum(axis=1).astype(np.int64)

    def is_zero(self) -> bool:
        return not self.data.any()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def _row_reduce_raw(data: np.ndarray, rows: int, cols: int):
    """In-place RREF on packed `data`, mirroring ops into an identity transform.

    Returns (pivot column list, transform packed array).
    """
    tw = _nwords(rows)
    transform = np.zeros((rows, tw), dtype=np.uint64)
    for i in range(rows):
        transform[i, i // _WORD] = np.uint64(1) << np.uint64(i % _WORD)
    pivots: list[int] = []
    pr = 0
    one = np.uint64(1)
    for c in range(cols):
        if pr >= rows:
            break
        w, b = divmod(c, _WORD)
        col = (data[pr:, w] >> np.uint64(b)) & one
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        i = pr + int(nz[0])
        if i != pr:
            data[[pr, i]] = data[[i, pr]]
            transform[[pr, i]] = transform[[i, pr]]
        colall = (data[:, w] >> np.uint64(b)) & one
        colall[pr] = 0
        fix = np.nonzero(colall)[0]
        if len(fix):
            data[fix] ^= data[pr]
            transform[fix] ^= transform[pr]
        pivots.append(c)
        pr += 1
    return pivots, transform


def row_reduce(m: BitMatrix) -> tuple[BitMatrix, list[int], BitMatrix]:
    """Reduced row echelon form.

    Returns (rref, pivot_cols, transform) with rref = transform · m and
    transform invertible (a product of row swaps and eliminations).
    """
    data = m.data.copy()
    pivots, transform = _row_reduce_raw(data, m.rows, m.cols)
    return BitMatrix(m.rows, m.cols, data), pivots, BitMatrix(m.rows, m.rows, transform)


def rank(m: BitMatrix) -> int:
    data = m.data.copy()
    pivots, _ = _row_reduce_raw(data, m.rows, m.cols)
    return len(pivots)


def nullspace_basis(m: BitMatrix) -> BitMatrix:
    """Basis of the left nullspace {c : c·m = 0}, one vector per row.

    Row count equals rows(m) - rank(m); rows are linearly independent.
    """
    _, pivots, transform = row_reduce(m)
    r = len(pivots)
    return BitMatrix(m.rows - r, m.rows, transform.data[r:].copy())


def solve(m: BitMatrix, b: BitVector) -> BitVector | None:
    """Some x with x·m = b, or None if b is not in the row space of m."""
    if b.n != m.cols:
        raise ValueError(f"b has length {b.n}, expected {m.cols}")
    rref, pivots, transform = row_reduce(m)
    y = np.zeros(m.rows, dtype=np.uint8)
    acc = np.zeros_like(b.words)
    xwords = np.zeros(_nwords(m.rows), dtype=np.uint64)
    for i, c in enumerate(pivots):
        if b.get(c):
            y[i] = 1
            acc ^= rref.data[i]
            xwords ^= transform.data[i]
    if not np.array_equal(acc, b.words):
        return None
    return BitVector(m.rows, xwords)


def matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """GF(2) matrix product a·b."""
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch: {a.cols} vs {b.rows}")
    out = np.zeros((a.rows, _nwords(b.cols)), dtype=np.uint64)
    # Accumulate rows of b selected by the bits of each row of a.
    for j in range(a.cols):
        w, bit = divmod(j, _WORD)
        sel = ((a.data[:, w] >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        if sel.any():
            out[sel] ^= b.data[j]
    return BitMatrix(a.rows, b.cols, out)


def mat_vec(a: BitMatrix, v: BitVector) -> BitVector:
    """The row vector v·a^T, i.e. per-row inner-product parities of a with v."""
    if a.cols != v.n:
        raise ValueError(f"shape mismatch: {a.cols} vs {v.n}")
    if a.rows == 0:
        return BitVector(0)
    par = (np.bitwise_count(a.data & v.words).sum(axis=1) & 1).astype(np.uint8)
    return BitVector.from_bits(par)


def vec_mat(v: BitVector, a: BitMatrix) -> BitVector:
    """The product v·a (XOR of the rows of a selected by v)."""
    if v.n != a.rows:
        raise ValueError(f"shape mismatch: {v.n} vs {a.rows}")
    acc = np.zeros(_nwords(a.cols), dtype=np.uint64)
    for i in v.support():
        acc ^= a.data[i]
    return BitVector(a.cols, acc)


def stack_rows(*mats: BitMatrix) -> BitMatrix:
    mats = [m for m in mats]
    if not mats:
        raise ValueError("nothing to stack")
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise ValueError("column count mismatch")
    data = np.concatenate([m.data for m in mats], axis=0)
    return BitMatrix(sum(m.rows for m in mats), cols, data)


def stack_cols(*mats: BitMatrix) -> BitMatrix:
    mats = [m for m in mats]
    if not mats:
        raise ValueError("nothing to stack")
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise ValueError("row count mismatch")
    dense = np.concatenate([m.to_dense() for m in mats], axis=1)
    return BitMatrix.from_dense(dense) if rows else BitMatrix(0, sum(m.cols for m in mats))


def submatrix(m: BitMatrix, row_idx, col_idx) -> BitMatrix:
    """Select rows then columns, preserving the order of the given index lists."""
    ri = np.asarray(list(row_idx), dtype=np.int64)
    ci = np.asarray(list(col_idx), dtype=np.int64)
    if len(ri) == 0 or len(ci) == 0:
        return BitMatrix(len(ri), len(ci))
    dense = m.to_dense()
    return BitMatrix.from_dense(dense[np.ix_(ri, ci)])


def popcount_u64(words: np.ndarray) -> np.ndarray:
    """Per-element popcount of a uint64 array."""
    return np.bitwise_count(words)
