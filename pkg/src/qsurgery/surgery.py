"""Gauge-fixed ancilla systems for logical measurements on CSS codes.

Builds the merged codes that measure a single logical (X or Z system), a
product of two logicals (XX system, including the two-block adapter), or a
Y-type logical where an X and a Z logical overlap on one qubit. Also provides
the boundary expansion constant that sizes the ancilla, gauge-basis
computation, redundancy pruning, and cellulation.

Layer conventions for a single X system measuring xbar with support V_0 and
adjacent Z checks C_0 (induced graph F = hz[C_0, V_0]):

  qubit layers   C_1, V_2, C_3, ..., C_L      (odd layers sized |C_0|,
                                               even layers sized |V_0|)
  X checks       V_j for odd j: identity on layer j-1 (V_0 for j=1), F^T on
                 layer j, identity on layer j+1 when j < L
  Z checks       base rows in C_0 gain identity on C_1; C_i for even i:
                 identity on C_{i-1}, F on V_i, identity on C_{i+1}
  gauge checks   U_L = rows of G (left nullspace of F) on C_L

The product of all V_j checks is exactly X(V_0) = xbar, which is how the
merged code measures it. Z systems are the same construction with the roles
of the two check types swapped.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gf2
from .gf2 import BitMatrix, BitVector
from .code import (
    CssCode,
    InducedGraph,
    NotLogicalError,
    PauliOperator,
    format_check_matrix,
    induced_graph,
    parse_check_matrix,
)


class CapExceededError(ValueError):
    """Vertex count exceeds the exhaustive enumeration cap."""


class ReducibleOperatorError(ValueError):
    """The operator's induced graph is disconnected in the code sense."""


@dataclass
class BridgeSpec:
    """Bridge qubits joining two ancilla systems.

    s1/s2 assign each bridge qubit to one interface check per side (one 1 per
    column, at most one per row). ub holds the bridge gauge checks over the
    columns (C-layer side 1, C-layer side 2, bridges) for XX systems and
    (first X layer, first Z layer, bridges) for Y systems.
    """

    b_count: int
    s1: BitMatrix
    s2: BitMatrix
    ub: BitMatrix
    attach_layers: tuple[int, int]


@dataclass
class BridgeSolution:
    """Solution of the bridge-weight problem: t1·f1 = c_r·s1^T, c_r·s2^T = t2·f2."""

    c_r: BitMatrix
    s1: BitMatrix
    s2: BitMatrix
    t1: BitMatrix
    t2: BitMatrix


@dataclass
class IndexMaps:
    """Qubit and check-row bookkeeping for a merged code.

    layer_qubits keys are like "C1", "V2" (single systems), "1:C1" (joint
    systems), "X:C1" (Y systems). checks_x/checks_z map row-group names to row
    indices of the corresponding check matrix; "base" rows come first.
    """

    base_qubits: np.ndarray
    layer_qubits: dict[str, np.ndarray]
    bridge_qubits: np.ndarray
    checks_x: dict[str, np.ndarray]
    checks_z: dict[str, np.ndarray]


@dataclass
class MergedCode:
    """A built ancilla system.

    Checks are stored as two families with explicit X and Z parts so mixed
    checks (Y systems) fit the same shape; for CSS kinds xmat_z and zmat_x
    are zero and hx_merged/hz_merged expose plain parity-check matrices.
    """

    kind: str
    base: CssCode | tuple[CssCode, CssCode]
    layers: int | tuple[int, int]
    n: int
    xmat_x: BitMatrix
    xmat_z: BitMatrix
    zmat_x: BitMatrix
    zmat_z: BitMatrix
    f: tuple[InducedGraph, ...]
    g: BitMatrix
    bridge: BridgeSpec | None
    index_maps: IndexMaps
    measured_op: PauliOperator
    gauge_fixed: bool

    @property
    def hx_merged(self) -> BitMatrix:
        if not self.xmat_z.is_zero():
            raise ValueError("X-family checks have Z parts; not a CSS system")
        return self.xmat_x

    @property
    def hz_merged(self) -> BitMatrix:
        if not self.zmat_x.is_zero():
            raise ValueError("Z-family checks have X parts; not a CSS system")
        return self.zmat_z

    def as_css(self) -> CssCode:
        return CssCode(self.hx_merged, self.hz_merged)

    def stabilizer_matrix(self) -> BitMatrix:
        """All check rows as symplectic (x|z) vectors; X family first."""
        top = gf2.stack_cols(self.xmat_x, self.xmat_z)
        bot = gf2.stack_cols(self.zmat_x, self.zmat_z)
        return gf2.stack_rows(top, bot)

    def validate(self) -> list[tuple[int, int]]:
        """Pairs of non-commuting check rows (global indices); empty = ok."""
        allx = gf2.stack_rows(self.xmat_x, self.zmat_x)
        allz = gf2.stack_rows(self.xmat_z, self.zmat_z)
        comm = gf2.matmul(allx, allz.transpose()).to_dense()
        comm ^= comm.T
        out = []
        for i, j in zip(*np.nonzero(np.triu(comm))):
            out.append((int(i), int(j)))
        return out

    def num_logicals(self) -> int:
        return self.n - gf2.rank(self.stabilizer_matrix())


@dataclass
class CellulationResult:
    code: CssCode
    new_row_index: int
    gauge_checks: BitMatrix
    induced: InducedGraph


# ---------------------------------------------------------------------------
# Expansion and gauge structure
# ---------------------------------------------------------------------------


def boundary_cheeger(ft: BitMatrix, cap: int = 24) -> tuple[Fraction, np.ndarray]:
    """Exact boundary Cheeger constant of a Tanner graph.

    ft has one row per vertex and one column per check; beta is the minimum
    over vertex subsets v with 1 <= |v| <= |V|/2 of |v·ft| / |v|, where the
    product is the parity vector of check overlaps. Returns the exact value
    and the first minimizing subset (vertex row indices) in subset-mask order.
    """
    nv = ft.rows
    if nv > cap:
        raise CapExceededError(f"{nv} vertices exceeds the cap of {cap}")
    if nv < 2:
        raise ValueError("need at least 2 vertices for a nonempty valid subset")
    lo = nv // 2
    hi = nv - lo
    words = ft.data.shape[1]

    def table(first: int, count: int):
        acc = np.zeros((1 << count, words), dtype=np.uint64)
        size = np.zeros(1 << count, dtype=np.int64)
        for i in range(count):
            half = 1 << i
            acc[half : 2 * half] = acc[:half] ^ ft.data[first + i]
            size[half : 2 * half] = size[:half] + 1
        return acc, size

    lo_acc, lo_size = table(0, lo)
    hi_acc, hi_size = table(lo, hi)
    best_num = int(np.bitwise_count(ft.data[0]).sum())
    best_den = 1
    best_mask = 1
    for h in range(1 << hi):
        acc = lo_acc ^ hi_acc[h]
        bnd = np.bitwise_count(acc).sum(axis=1).astype(np.int64)
        size = lo_size + hi_size[h]
        valid = (size >= 1) & (2 * size <= nv)
        while True:
            improving = valid & (bnd * best_den < best_num * size)
            if not improving.any():
                break
            i = int(np.argmax(improving))
            best_num = int(bnd[i])
            best_den = int(size[i])
            best_mask = (h << lo) | i
    witness = np.array([v for v in range(nv) if (best_mask >> v) & 1], dtype=np.int64)
    return Fraction(best_num, best_den), witness


def min_layers(beta) -> int:
    """Smallest odd L with ceil(L/2) >= 1/beta."""
    beta = Fraction(beta)
    if beta <= 0:
        raise ValueError("beta must be positive")
    layers = 1
    while Fraction(layers + 1, 2) < 1 / beta:
        layers += 2
    return layers


def gauge_basis(f: BitMatrix) -> BitMatrix:
    """A basis of left-null(f) with greedy pairwise-XOR weight reduction."""
    g = gf2.nullspace_basis(f)
    if g.rows <= 1:
        return g
    rows = [g.row(i) for i in range(g.rows)]
    changed = True
    while changed:
        changed = False
        for i in range(len(rows)):
            wi = rows[i].weight()
            for j in range(len(rows)):
                if i == j:
                    continue
                cand = rows[i] ^ rows[j]
                w = cand.weight()
                if w < wi:
                    rows[i] = cand
                    wi = w
                    changed = True
    return BitMatrix.from_rows(rows)


# ---------------------------------------------------------------------------
# Single-operator systems
# ---------------------------------------------------------------------------


def _layer_sizes(nv: int, nc: int, layers: int):
    return {j: (nc if j % 2 == 1 else nv) for j in range(1, layers + 1)}


def _layer_key(j: int) -> str:
    return f"C{j}" if j % 2 == 1 else f"V{j}"


def build_x_system(
    code: CssCode, xbar: PauliOperator, layers: int | None = None, gauge_fix: bool = True
) -> MergedCode:
    """The merged code measuring a pure-X logical through an L-layer ancilla.

    layers defaults to min_layers(boundary_cheeger(...)) of the induced graph.
    With gauge_fix the gauge checks U_L are included as Z checks and the
    merged code has one fewer logical than the base; without it they are only
    reported in g (subsystem view).
    """
    ig = induced_graph(code, xbar, basis="X")
    nv = len(ig.v0)
    nc = len(ig.c0)
    if gf2.rank(ig.f) != nv - 1:
        raise ReducibleOperatorError(
            "operator is reducible; measure its irreducible pieces instead"
        )
    if layers is None:
        beta, _ = boundary_cheeger(ig.f.transpose())
        layers = min_layers(beta)
    if layers < 1 or layers % 2 == 0:
        raise ValueError("layer count must be odd and at least 1")

    n_base = code.n
    layer_qubits: dict[str, np.ndarray] = {}
    cursor = n_base
    for j in range(1, layers + 1):
        size = nc if j % 2 == 1 else nv
        layer_qubits[_layer_key(j)] = np.arange(cursor, cursor + size)
        cursor += size
    n_total = cursor
    fd = ig.f.to_dense()

    # X family: base rows then V_j blocks.
    x_rows = [np.concatenate([code.hx.to_dense(), np.zeros((code.hx.rows, n_total - n_base), dtype=np.uint8)], axis=1)]
    checks_x: dict[str, np.ndarray] = {"base": np.arange(code.hx.rows)}
    row_cursor = code.hx.rows
    for j in range(1, layers + 1, 2):
        block = np.zeros((nv, n_total), dtype=np.uint8)
        prev = ig.v0 if j == 1 else layer_qubits[_layer_key(j - 1)]
        block[np.arange(nv), prev] = 1
        block[:, layer_qubits[_layer_key(j)]] = fd.T
        if j < layers:
            block[np.arange(nv), layer_qubits[_layer_key(j + 1)]] = 1
        x_rows.append(block)
        checks_x[f"V{j}"] = np.arange(row_cursor, row_cursor + nv)
        row_cursor += nv

    # Z family: modified base rows, C_i blocks, gauge rows.
    base_z = np.concatenate(
        [code.hz.to_dense(), np.zeros((code.hz.rows, n_total - n_base), dtype=np.uint8)], axis=1
    )
    base_z[ig.c0, layer_qubits["C1"]] = 1
    z_rows = [base_z]
    checks_z: dict[str, np.ndarray] = {"base": np.arange(code.hz.rows)}
    row_cursor = code.hz.rows
    for j in range(2, layers, 2):
        block = np.zeros((nc, n_total), dtype=np.uint8)
        block[np.arange(nc), layer_qubits[_layer_key(j - 1)]] = 1
        block[:, layer_qubits[_layer_key(j)]] = fd
        block[np.arange(nc), layer_qubits[_layer_key(j + 1)]] = 1
        z_rows.append(block)
        checks_z[f"C{j}"] = np.arange(row_cursor, row_cursor + nc)
        row_cursor += nc
    g = gauge_basis(ig.f)
    if gauge_fix and g.rows:
        block = np.zeros((g.rows, n_total), dtype=np.uint8)
        block[:, layer_qubits[_layer_key(layers)]] = g.to_dense()
        z_rows.append(block)
        checks_z["UL"] = np.arange(row_cursor, row_cursor + g.rows)
        row_cursor += g.rows
    else:
        checks_z["UL"] = np.arange(0)

    xmat = BitMatrix.from_dense(np.concatenate(x_rows, axis=0))
    zmat = BitMatrix.from_dense(np.concatenate(z_rows, axis=0))
    measured = PauliOperator(_pad_bits(xbar.xbits, n_total), BitVector.zeros(n_total))
    merged = MergedCode(
        kind="X",
        base=code,
        layers=layers,
        n=n_total,
        xmat_x=xmat,
        xmat_z=BitMatrix.zeros(xmat.rows, n_total),
        zmat_x=BitMatrix.zeros(zmat.rows, n_total),
        zmat_z=zmat,
        f=(ig,),
        g=g,
        bridge=None,
        index_maps=IndexMaps(
            base_qubits=np.arange(n_base),
            layer_qubits=layer_qubits,
            bridge_qubits=np.arange(0),
            checks_x=checks_x,
            checks_z=checks_z,
        ),
        measured_op=measured,
        gauge_fixed=gauge_fix,
    )
    _assert_measured_product(merged)
    bad = merged.validate()
    assert not bad, f"merged checks do not commute: {bad[:4]}"
    return merged


def _pad_bits(v: BitVector, n: int) -> BitVector:
    bits = np.zeros(n, dtype=np.uint8)
    bits[: v.n] = v.to_bits()
    return BitVector.from_bits(bits)


def _assert_measured_product(merged: MergedCode) -> None:
    """The XOR of all interface-family check rows must equal measured_op."""
    keys_x = [k for k in merged.index_maps.checks_x if k.split(":")[-1].startswith("V") or k == "q1"]
    keys_z = [k for k in merged.index_maps.checks_z if k.split(":")[-1].startswith("V")]
    accx = np.zeros(merged.n, dtype=np.uint8)
    accz = np.zeros(merged.n, dtype=np.uint8)
    for key in keys_x:
        for r in merged.index_maps.checks_x[key]:
            accx ^= merged.xmat_x.row(int(r)).to_bits()
            accz ^= merged.xmat_z.row(int(r)).to_bits()
    for key in keys_z:
        for r in merged.index_maps.checks_z[key]:
            accx ^= merged.zmat_x.row(int(r)).to_bits()
            accz ^= merged.zmat_z.row(int(r)).to_bits()
    assert (accx == merged.measured_op.xbits.to_bits()).all()
    assert (accz == merged.measured_op.zbits.to_bits()).all()


def _transpose_merged(merged: MergedCode) -> MergedCode:
    kind = {"X": "Z", "Z": "X"}.get(merged.kind, merged.kind)
    base = merged.base
    if isinstance(base, tuple):
        base = tuple(CssCode(c.hz, c.hx, name=c.name) for c in base)
    else:
        base = CssCode(base.hz, base.hx, name=base.name)
    return MergedCode(
        kind=kind,
        base=base,
        layers=merged.layers,
        n=merged.n,
        xmat_x=merged.zmat_z,
        xmat_z=merged.zmat_x,
        zmat_x=merged.xmat_z,
        zmat_z=merged.xmat_x,
        f=merged.f,
        g=merged.g,
        bridge=merged.bridge,
        index_maps=IndexMaps(
            base_qubits=merged.index_maps.base_qubits,
            layer_qubits=merged.index_maps.layer_qubits,
            bridge_qubits=merged.index_maps.bridge_qubits,
            checks_x=merged.index_maps.checks_z,
            checks_z=merged.index_maps.checks_x,
        ),
        measured_op=PauliOperator(
            merged.measured_op.zbits, merged.measured_op.xbits, merged.measured_op.sign
        ),
        gauge_fixed=merged.gauge_fixed,
    )


def build_z_system(
    code: CssCode, zbar: PauliOperator, layers: int | None = None, gauge_fix: bool = True
) -> MergedCode:
    """The merged code measuring a pure-Z logical (X construction transposed)."""
    if not zbar.is_z_type():
        raise NotLogicalError("expected a pure-Z operator")
    tcode = CssCode(code.hz, code.hx, name=code.name)
    top = PauliOperator(zbar.zbits, BitVector.zeros(code.n), zbar.sign)
    return _transpose_merged(build_x_system(tcode, top, layers, gauge_fix))


# ---------------------------------------------------------------------------
# Pruning and cellulation
# ---------------------------------------------------------------------------


def _gauge_row_refs(merged: MergedCode) -> list[tuple[str, str, int, int]]:
    """(family, key, position, row) for every gauge check, in stable order."""
    refs = []
    for family, table in (("x", merged.index_maps.checks_x), ("z", merged.index_maps.checks_z)):
        for key in sorted(table):
            short = key.split(":")[-1]
            if short in ("UL", "UB"):
                for pos, row in enumerate(table[key]):
                    refs.append((family, key, pos, int(row)))
    return refs


def prune_redundant_gauge_checks(
    merged: MergedCode,
) -> tuple[MergedCode, list[tuple[str, int]], list[tuple[str, int]]]:
    """Drop gauge checks whose removal keeps the stabilizer rank unchanged.

    Greedy in stable key order; returns (pruned system, kept, removed) where
    entries are (map key, position within the key's block).
    """
    refs = _gauge_row_refs(merged)
    stab = merged.stabilizer_matrix()
    full_rank = gf2.rank(stab)
    nx = merged.xmat_x.rows
    active = np.ones(stab.rows, dtype=bool)
    removed: list[tuple[str, int]] = []
    kept: list[tuple[str, int]] = []
    for family, key, pos, row in refs:
        gidx = row if family == "x" else nx + row
        active[gidx] = False
        sub = gf2.submatrix(stab, np.nonzero(active)[0], range(stab.cols))
        if gf2.rank(sub) == full_rank:
            removed.append((key, pos))
        else:
            active[gidx] = True
            kept.append((key, pos))
    if not removed:
        return merged, kept, removed

    drop_x = {r for f, k, p, r in refs if f == "x" and (k, p) in set(removed)}
    drop_z = {r for f, k, p, r in refs if f == "z" and (k, p) in set(removed)}
    merged2 = _drop_rows(merged, drop_x, drop_z)
    return merged2, kept, removed


def _drop_rows(merged: MergedCode, drop_x: set, drop_z: set) -> MergedCode:
    def filt(mat: BitMatrix, drop: set) -> BitMatrix:
        keep = [i for i in range(mat.rows) if i not in drop]
        return gf2.submatrix(mat, keep, range(mat.cols))

    def remap(table: dict, drop: set, nrows: int) -> dict:
        old_to_new = np.full(nrows, -1, dtype=np.int64)
        new = 0
        for i in range(nrows):
            if i not in drop:
                old_to_new[i] = new
                new += 1
        out = {}
        for key, ids in table.items():
            mapped = old_to_new[ids]
            out[key] = mapped[mapped >= 0]
        return out

    maps = merged.index_maps
    return MergedCode(
        kind=merged.kind,
        base=merged.base,
        layers=merged.layers,
        n=merged.n,
        xmat_x=filt(merged.xmat_x, drop_x),
        xmat_z=filt(merged.xmat_z, drop_x),
        zmat_x=filt(merged.zmat_x, drop_z),
        zmat_z=filt(merged.zmat_z, drop_z),
        f=merged.f,
        g=merged.g,
        bridge=merged.bridge,
        index_maps=IndexMaps(
            base_qubits=maps.base_qubits,
            layer_qubits=maps.layer_qubits,
            bridge_qubits=maps.bridge_qubits,
            checks_x=remap(maps.checks_x, drop_x, merged.xmat_x.rows),
            checks_z=remap(maps.checks_z, drop_z, merged.zmat_x.rows),
        ),
        measured_op=merged.measured_op,
        gauge_fixed=merged.gauge_fixed,
    )


def cellulate(code: CssCode, ig: InducedGraph, c: BitVector, subset, basis: str = "X") -> CellulationResult:
    """Split a gauge check by adding a redundant product row to the base code.

    c is a gauge check over ig's check rows (c·f = 0); subset is a nonempty
    proper subset of c's support positions (indices into ig.c0). The product
    of the chosen base checks is appended as a redundant row, and the gauge
    check splits into two lighter checks against the enlarged check set.
    """
    if c.n != ig.f.rows:
        raise ValueError("gauge vector length must match the induced check count")
    if not gf2.vec_mat(c, ig.f).is_zero():
        raise ValueError("not a gauge check: c·f != 0")
    supp = set(int(i) for i in c.support())
    chosen = set(int(i) for i in subset)
    if not chosen or not chosen < supp:
        raise ValueError("subset must be a nonempty proper subset of the gauge support")

    h_other = code.hz if basis == "X" else code.hx
    rows = ig.c0[sorted(chosen)]
    new_row = BitVector.zeros(code.n)
    for r in rows:
        new_row = new_row ^ h_other.row(int(r))
    enlarged = gf2.stack_rows(h_other, BitMatrix.from_rows([new_row]))
    assert gf2.rank(enlarged) == gf2.rank(h_other), "product row must be redundant"
    new_code = (
        CssCode(code.hx, enlarged, name=code.name)
        if basis == "X"
        else CssCode(enlarged, code.hz, name=code.name)
    )
    op = (
        PauliOperator.x_type(code.n, ig.v0)
        if basis == "X"
        else PauliOperator.z_type(code.n, ig.v0)
    )
    new_ig = induced_graph(new_code, op, basis=basis)
    # Positions of the old c0 rows and the appended row in the new c0 order.
    pos = {int(r): i for i, r in enumerate(new_ig.c0)}
    nc = len(new_ig.c0)
    new_row_index = h_other.rows
    half1 = np.zeros(nc, dtype=np.uint8)
    half2 = np.zeros(nc, dtype=np.uint8)
    for i in chosen:
        half1[pos[int(ig.c0[i])]] = 1
    for i in supp - chosen:
        half2[pos[int(ig.c0[i])]] = 1
    if new_row_index in pos:
        half1[pos[new_row_index]] = 1
        half2[pos[new_row_index]] = 1
    gauge_checks = BitMatrix.from_dense(np.stack([half1, half2]))
    for i in range(2):
        assert gf2.vec_mat(gauge_checks.row(i), new_ig.f).is_zero()
        assert gauge_checks.row(i).weight() < len(supp) + 1
    return CellulationResult(
        code=new_code,
        new_row_index=new_row_index,
        gauge_checks=gauge_checks,
        induced=new_ig,
    )


# ---------------------------------------------------------------------------
# Bridges: XX systems and adapters
# ---------------------------------------------------------------------------


def _default_assignment(n_checks: int, b_count: int) -> BitMatrix:
    """Sorted-index bridge assignment: bridge b goes to check b."""
    dense = np.zeros((n_checks, b_count), dtype=np.uint8)
    dense[np.arange(b_count), np.arange(b_count)] = 1
    return BitMatrix.from_dense(dense)


def solve_bridge_weights(
    f1: BitMatrix, f2: BitMatrix, weight_cap: int | None = None
) -> BridgeSolution | None:
    """C_R, assignments and lifts for the bridge gauge checks, or None.

    C_R is (|B|-1) x |B| spanning the even-weight subspace. When f1 = f2 the
    rows of C_R are taken directly from f1 and the lifts are row selectors;
    otherwise C_R rows pair adjacent bridges along a greedily chosen chain and
    each lift is found with solve(), subject to the optional weight cap.
    """
    b_count = min(f1.cols, f2.cols)
    if b_count < 1:
        raise ValueError("need at least one bridge qubit")
    if b_count == 1:
        return BridgeSolution(
            c_r=BitMatrix.zeros(0, 1),
            s1=_default_assignment(f1.cols, 1),
            s2=_default_assignment(f2.cols, 1),
            t1=BitMatrix.zeros(0, f1.rows),
            t2=BitMatrix.zeros(0, f2.rows),
        )
    same = (
        f1.rows == f2.rows
        and f1.cols == f2.cols
        and (f1.data == f2.data).all()
    )
    if same and gf2.rank(f1) == b_count - 1:
        _, pivots, _ = gf2.row_reduce(f1.transpose())
        chosen = list(pivots)  # row indices of f1 forming an independent set
        c_r = gf2.submatrix(f1, chosen, range(f1.cols))
        t = np.zeros((b_count - 1, f1.rows), dtype=np.uint8)
        t[np.arange(b_count - 1), chosen] = 1
        tmat = BitMatrix.from_dense(t)
        s = BitMatrix.identity(b_count)
        return BridgeSolution(c_r=c_r, s1=s, s2=s, t1=tmat, t2=tmat)

    s1 = _default_assignment(f1.cols, b_count)
    s2 = _default_assignment(f2.cols, b_count)

    def pair_target(f: BitMatrix, a: int, b: int) -> BitVector:
        bits = np.zeros(f.cols, dtype=np.uint8)
        bits[a] ^= 1
        bits[b] ^= 1
        return BitVector.from_bits(bits)

    chain = [0]
    remaining = list(range(1, b_count))
    rows_cr = []
    rows_t1 = []
    rows_t2 = []
    while remaining:
        last = chain[-1]
        best = None
        for cand in remaining:
            # Default assignment maps bridge i to check i on both sides.
            lift1 = gf2.solve(f1, pair_target(f1, last, cand))
            lift2 = gf2.solve(f2, pair_target(f2, last, cand))
            if lift1 is None or lift2 is None:
                continue
            w = lift1.weight() + lift2.weight()
            if weight_cap is not None and max(lift1.weight(), lift2.weight()) > weight_cap:
                continue
            if best is None or w < best[0]:
                best = (w, cand, lift1, lift2)
        if best is None:
            return None
        _, cand, lift1, lift2 = best
        cr = np.zeros(b_count, dtype=np.uint8)
        cr[last] = 1
        cr[cand] = 1
        rows_cr.append(BitVector.from_bits(cr))
        rows_t1.append(lift1)
        rows_t2.append(lift2)
        chain.append(cand)
        remaining.remove(cand)
    return BridgeSolution(
        c_r=BitMatrix.from_rows(rows_cr),
        s1=s1,
        s2=s2,
        t1=BitMatrix.from_rows(rows_t1),
        t2=BitMatrix.from_rows(rows_t2),
    )


def build_xx_system(
    sys1: MergedCode,
    sys2: MergedCode,
    bridge: BridgeSpec | None = None,
    separate_blocks: bool = False,
) -> MergedCode:
    """Join two single-operator systems into one measuring the product.

    Both systems must be the same kind (X or Z). With separate_blocks the two
    base codes are kept as distinct blocks (the adapter); otherwise they must
    be the same code and the measured supports disjoint. Bridge qubits attach
    to the last layer of each system by default.
    """
    if sys1.kind != sys2.kind or sys1.kind not in ("X", "Z"):
        raise ValueError("need two X systems or two Z systems")
    if sys1.kind == "Z":
        joined = build_xx_system(
            _transpose_merged(sys1), _transpose_merged(sys2), bridge, separate_blocks
        )
        return _transpose_merged(joined)

    code1 = sys1.base
    code2 = sys2.base
    if not separate_blocks:
        if not (
            code1.hx.rows == code2.hx.rows
            and (code1.hx.data == code2.hx.data).all()
            and (code1.hz.data == code2.hz.data).all()
        ):
            raise ValueError("same-block join requires identical base codes")
        if set(sys1.measured_op.support()) & set(sys2.measured_op.support()):
            raise ValueError("same-block operators must have disjoint support")

    ig1, ig2 = sys1.f[0], sys2.f[0]
    if bridge is None:
        sol = solve_bridge_weights(ig1.f, ig2.f)
        assert sol is not None, "bridge lift must exist for irreducible operators"
        attach = (sys1.layers, sys2.layers)
        ub = gf2.stack_cols(gf2.stack_cols(sol.t1, sol.t2), sol.c_r)
        bridge = BridgeSpec(
            b_count=sol.c_r.cols, s1=sol.s1, s2=sol.s2, ub=ub, attach_layers=attach
        )
    b_count = bridge.b_count

    n1_base = code1.n
    n2_base = code2.n
    anc1 = sys1.n - n1_base
    anc2 = sys2.n - n2_base
    if separate_blocks:
        n_base = n1_base + n2_base
        colmap1 = np.concatenate([np.arange(n1_base), n_base + np.arange(anc1)])
        colmap2 = np.concatenate(
            [n1_base + np.arange(n2_base), n_base + anc1 + np.arange(anc2)]
        )
    else:
        n_base = n1_base
        colmap1 = np.arange(sys1.n)
        colmap2 = np.concatenate([np.arange(n_base), n_base + anc1 + np.arange(anc2)])
    bridge_ids = np.arange(n_base + anc1 + anc2, n_base + anc1 + anc2 + b_count)
    n_total = n_base + anc1 + anc2 + b_count

    def embed(mat: BitMatrix, colmap: np.ndarray) -> np.ndarray:
        out = np.zeros((mat.rows, n_total), dtype=np.uint8)
        out[:, colmap] = mat.to_dense()
        return out

    maps1, maps2 = sys1.index_maps, sys2.index_maps
    x1 = embed(sys1.xmat_x, colmap1)
    x2 = embed(sys2.xmat_x, colmap2)
    z1 = embed(sys1.zmat_z, colmap1)
    z2 = embed(sys2.zmat_z, colmap2)

    # X family: base rows, then V blocks of each side.
    layer_qubits: dict[str, np.ndarray] = {}
    for key, ids in maps1.layer_qubits.items():
        layer_qubits[f"1:{key}"] = colmap1[ids]
    for key, ids in maps2.layer_qubits.items():
        layer_qubits[f"2:{key}"] = colmap2[ids]

    if separate_blocks:
        base_x = np.concatenate([x1[maps1.checks_x["base"]], x2[maps2.checks_x["base"]]])
        base_z = np.concatenate([z1[maps1.checks_z["base"]], z2[maps2.checks_z["base"]]])
    else:
        plain = embed(code1.hx, np.arange(n1_base))
        base_x = x1[maps1.checks_x["base"]] ^ x2[maps2.checks_x["base"]] ^ plain
        plainz = embed(code1.hz, np.arange(n1_base))
        base_z = z1[maps1.checks_z["base"]] ^ z2[maps2.checks_z["base"]] ^ plainz

    x_rows = [base_x]
    checks_x: dict[str, np.ndarray] = {"base": np.arange(base_x.shape[0])}
    row_cursor = base_x.shape[0]
    s1d = bridge.s1.to_dense()
    s2d = bridge.s2.to_dense()
    for side, (sysk, xk, mapsk, sd) in enumerate(
        ((sys1, x1, maps1, s1d), (sys2, x2, maps2, s2d)), start=1
    ):
        attach = bridge.attach_layers[side - 1]
        for key in sorted(mapsk.checks_x, key=_vkey_order):
            if not key.startswith("V"):
                continue
            block = xk[mapsk.checks_x[key]].copy()
            if int(key[1:]) == attach:
                block[:, bridge_ids] ^= sd
            x_rows.append(block)
            checks_x[f"{side}:{key}"] = np.arange(row_cursor, row_cursor + block.shape[0])
            row_cursor += block.shape[0]

    z_rows = [base_z]
    checks_z: dict[str, np.ndarray] = {"base": np.arange(base_z.shape[0])}
    row_cursor = base_z.shape[0]
    for side, (zk, mapsk) in enumerate(((z1, maps1), (z2, maps2)), start=1):
        for key in sorted(mapsk.checks_z, key=_vkey_order):
            if key == "base":
                continue
            block = zk[mapsk.checks_z[key]]
            z_rows.append(block)
            checks_z[f"{side}:{key}"] = np.arange(row_cursor, row_cursor + block.shape[0])
            row_cursor += block.shape[0]
    # Bridge gauge checks: T1 on C_{attach} of side 1, T2 on side 2, C_R on B.
    ubd = bridge.ub.to_dense()
    nc1 = len(maps1.layer_qubits[_layer_key(bridge.attach_layers[0])])
    nc2 = len(maps2.layer_qubits[_layer_key(bridge.attach_layers[1])])
    ub_block = np.zeros((ubd.shape[0], n_total), dtype=np.uint8)
    ub_block[:, layer_qubits[f"1:{_layer_key(bridge.attach_layers[0])}"]] = ubd[:, :nc1]
    ub_block[:, layer_qubits[f"2:{_layer_key(bridge.attach_layers[1])}"]] = ubd[:, nc1 : nc1 + nc2]
    ub_block[:, bridge_ids] = ubd[:, nc1 + nc2 :]
    z_rows.append(ub_block)
    checks_z["UB"] = np.arange(row_cursor, row_cursor + ub_block.shape[0])

    xmat = BitMatrix.from_dense(np.concatenate(x_rows))
    zmat = BitMatrix.from_dense(np.concatenate(z_rows))
    m1 = sys1.measured_op
    m2 = sys2.measured_op
    mx = np.zeros(n_total, dtype=np.uint8)
    mx[colmap1] ^= m1.xbits.to_bits()
    mx[colmap2] ^= m2.xbits.to_bits()
    measured = PauliOperator(BitVector.from_bits(mx), BitVector.zeros(n_total))

    gd1 = sys1.g.to_dense()
    gd2 = sys2.g.to_dense()
    gjoint = np.zeros((gd1.shape[0] + gd2.shape[0], gd1.shape[1] + gd2.shape[1]), dtype=np.uint8)
    gjoint[: gd1.shape[0], : gd1.shape[1]] = gd1
    gjoint[gd1.shape[0] :, gd1.shape[1] :] = gd2

    merged = MergedCode(
        kind="Adapter" if separate_blocks else "XX",
        base=(code1, code2) if separate_blocks else code1,
        layers=(sys1.layers, sys2.layers),
        n=n_total,
        xmat_x=xmat,
        xmat_z=BitMatrix.zeros(xmat.rows, n_total),
        zmat_x=BitMatrix.zeros(zmat.rows, n_total),
        zmat_z=zmat,
        f=sys1.f + sys2.f,
        g=BitMatrix.from_dense(gjoint) if gjoint.size else BitMatrix.zeros(0, 0),
        bridge=bridge,
        index_maps=IndexMaps(
            base_qubits=np.arange(n_base),
            layer_qubits=layer_qubits,
            bridge_qubits=bridge_ids,
            checks_x=checks_x,
            checks_z=checks_z,
        ),
        measured_op=measured,
        gauge_fixed=sys1.gauge_fixed and sys2.gauge_fixed,
    )
    _assert_measured_product(merged)
    bad = merged.validate()
    assert not bad, f"joint checks do not commute: {bad[:4]}"
    return merged


def _vkey_order(key: str):
    short = key.split(":")[-1]
    if short == "base":
        return (0, 0)
    if short == "UL":
        return (2, 0)
    if short == "UB":
        return (3, 0)
    return (1, int(short[1:]))


# ---------------------------------------------------------------------------
# Y systems
# ---------------------------------------------------------------------------


def build_y_system(
    code: CssCode,
    xbar: PauliOperator,
    zbar: PauliOperator,
    layers_x: int = 1,
    layers_z: int = 1,
) -> MergedCode:
    """The merged code measuring Y-type xbar·zbar overlapping on one qubit.

    Two ancilla systems (one per operator) attach to the base code with their
    first check layers each missing the slot for the shared qubit q0; a single
    mixed check q1 plays that role for both sides at once, and bridge qubits
    with one gauge check each tie the first layers together.
    """
    igx = induced_graph(code, xbar, basis="X")
    igz = induced_graph(code, zbar, basis="Z")
    if gf2.rank(igx.f) != len(igx.v0) - 1 or gf2.rank(igz.f) != len(igz.v0) - 1:
        raise ReducibleOperatorError("both operators must be irreducible")
    overlap = sorted(set(int(q) for q in xbar.support()) & set(int(q) for q in zbar.support()))
    if len(overlap) != 1:
        raise ValueError(f"operators overlap on {len(overlap)} qubits; need exactly 1")
    for lcount in (layers_x, layers_z):
        if lcount < 1 or lcount % 2 == 0:
            raise ValueError("layer count must be odd and at least 1")
    q0 = overlap[0]
    nvx, ncx = len(igx.v0), len(igx.c0)
    nvz, ncz = len(igz.v0), len(igz.c0)
    b_count = min(nvx, nvz) - 1
    qx = int(np.nonzero(igx.v0 == q0)[0][0])
    qz = int(np.nonzero(igz.v0 == q0)[0][0])

    n_base = code.n
    layer_qubits: dict[str, np.ndarray] = {}
    cursor = n_base
    for side, lcount, nv, nc in (("X", layers_x, nvx, ncx), ("Z", layers_z, nvz, ncz)):
        for j in range(1, lcount + 1):
            size = nc if j % 2 == 1 else nv
            layer_qubits[f"{side}:{_layer_key(j)}"] = np.arange(cursor, cursor + size)
            cursor += size
    bridge_ids = np.arange(cursor, cursor + b_count)
    n_total = cursor + b_count

    fxd = igx.f.to_dense()
    fzd = igz.f.to_dense()
    keep_x = [v for v in range(nvx) if v != qx]
    keep_z = [v for v in range(nvz) if v != qz]
    # Bridge assignment over the shrunk first layers, sorted-index default.
    sx = np.zeros((nvx - 1, b_count), dtype=np.uint8)
    sx[np.arange(b_count), np.arange(b_count)] = 1
    sz = np.zeros((nvz - 1, b_count), dtype=np.uint8)
    sz[np.arange(b_count), np.arange(b_count)] = 1

    x_rows: list[np.ndarray] = []
    z_rows: list[np.ndarray] = []
    checks_x: dict[str, np.ndarray] = {}
    checks_z: dict[str, np.ndarray] = {}
    x_zparts: dict[int, np.ndarray] = {}
    z_xparts: dict[int, np.ndarray] = {}

    # Base rows with interface attachments.
    base_x = np.concatenate(
        [code.hx.to_dense(), np.zeros((code.hx.rows, n_total - n_base), dtype=np.uint8)], axis=1
    )
    base_x[igz.c0, layer_qubits["Z:C1"]] = 1
    x_rows.append(base_x)
    checks_x["base"] = np.arange(code.hx.rows)
    xrow_cursor = code.hx.rows
    base_z = np.concatenate(
        [code.hz.to_dense(), np.zeros((code.hz.rows, n_total - n_base), dtype=np.uint8)], axis=1
    )
    base_z[igx.c0, layer_qubits["X:C1"]] = 1
    z_rows.append(base_z)
    checks_z["base"] = np.arange(code.hz.rows)
    zrow_cursor = code.hz.rows

    # X-side interface checks V1 (one per support qubit except q0).
    vx1 = np.zeros((nvx - 1, n_total), dtype=np.uint8)
    vx1[np.arange(nvx - 1), igx.v0[keep_x]] = 1
    vx1[:, layer_qubits["X:C1"]] = fxd.T[keep_x]
    if layers_x >= 3:
        vx1[np.arange(nvx - 1), layer_qubits["X:V2"][keep_x]] = 1
    vx1[:, bridge_ids] = sx
    for i in range(nvx - 1):
        zpart = np.zeros(n_total, dtype=np.uint8)
        zpart[bridge_ids] = sx[i]
        x_zparts[xrow_cursor + i] = zpart
    x_rows.append(vx1)
    checks_x["X:V1"] = np.arange(xrow_cursor, xrow_cursor + nvx - 1)
    xrow_cursor += nvx - 1

    # Deeper X-side layers follow the plain recursion with full-size sets.
    for j in range(3, layers_x + 1, 2):
        block = np.zeros((nvx, n_total), dtype=np.uint8)
        block[np.arange(nvx), layer_qubits[f"X:{_layer_key(j - 1)}"]] = 1
        block[:, layer_qubits[f"X:{_layer_key(j)}"]] = fxd.T
        if j < layers_x:
            block[np.arange(nvx), layer_qubits[f"X:{_layer_key(j + 1)}"]] = 1
        x_rows.append(block)
        checks_x[f"X:V{j}"] = np.arange(xrow_cursor, xrow_cursor + nvx)
        xrow_cursor += nvx
    for j in range(2, layers_z, 2):
        block = np.zeros((ncz, n_total), dtype=np.uint8)
        block[np.arange(ncz), layer_qubits[f"Z:{_layer_key(j - 1)}"]] = 1
        block[:, layer_qubits[f"Z:{_layer_key(j)}"]] = fzd
        block[np.arange(ncz), layer_qubits[f"Z:{_layer_key(j + 1)}"]] = 1
        x_rows.append(block)
        checks_x[f"Z:C{j}"] = np.arange(xrow_cursor, xrow_cursor + ncz)
        xrow_cursor += ncz
    gz = gauge_basis(igz.f)
    if gz.rows:
        block = np.zeros((gz.rows, n_total), dtype=np.uint8)
        block[:, layer_qubits[f"Z:{_layer_key(layers_z)}"]] = gz.to_dense()
        x_rows.append(block)
        checks_x["Z:UL"] = np.arange(xrow_cursor, xrow_cursor + gz.rows)
        xrow_cursor += gz.rows

    # The shared mixed check q1: Y on q0, X into the X ancilla, Z into the Z.
    q1x = np.zeros(n_total, dtype=np.uint8)
    q1z = np.zeros(n_total, dtype=np.uint8)
    q1x[q0] = 1
    q1z[q0] = 1
    q1x[layer_qubits["X:C1"]] = fxd[:, qx]
    q1z[layer_qubits["Z:C1"]] = fzd[:, qz]
    if layers_x >= 3:
        q1x[layer_qubits["X:V2"][qx]] = 1
    if layers_z >= 3:
        q1z[layer_qubits["Z:V2"][qz]] = 1
    x_rows.append(q1x[None, :])
    x_zparts[xrow_cursor] = q1z
    checks_x["q1"] = np.arange(xrow_cursor, xrow_cursor + 1)
    xrow_cursor += 1

    # Z-side interface checks and deeper layers.
    vz1 = np.zeros((nvz - 1, n_total), dtype=np.uint8)
    vz1[np.arange(nvz - 1), igz.v0[keep_z]] = 1
    vz1[:, layer_qubits["Z:C1"]] = fzd.T[keep_z]
    if layers_z >= 3:
        vz1[np.arange(nvz - 1), layer_qubits["Z:V2"][keep_z]] = 1
    vz1[:, bridge_ids] = sz
    for i in range(nvz - 1):
        xpart = np.zeros(n_total, dtype=np.uint8)
        xpart[bridge_ids] = sz[i]
        z_xparts[zrow_cursor + i] = xpart
    z_rows.append(vz1)
    checks_z["Z:V1"] = np.arange(zrow_cursor, zrow_cursor + nvz - 1)
    zrow_cursor += nvz - 1
    for j in range(3, layers_z + 1, 2):
        block = np.zeros((nvz, n_total), dtype=np.uint8)
        block[np.arange(nvz), layer_qubits[f"Z:{_layer_key(j - 1)}"]] = 1
        block[:, layer_qubits[f"Z:{_layer_key(j)}"]] = fzd.T
        if j < layers_z:
            block[np.arange(nvz), layer_qubits[f"Z:{_layer_key(j + 1)}"]] = 1
        z_rows.append(block)
        checks_z[f"Z:V{j}"] = np.arange(zrow_cursor, zrow_cursor + nvz)
        zrow_cursor += nvz
    for j in range(2, layers_x, 2):
        block = np.zeros((ncx, n_total), dtype=np.uint8)
        block[np.arange(ncx), layer_qubits[f"X:{_layer_key(j - 1)}"]] = 1
        block[:, layer_qubits[f"X:{_layer_key(j)}"]] = fxd
        block[np.arange(ncx), layer_qubits[f"X:{_layer_key(j + 1)}"]] = 1
        z_rows.append(block)
        checks_z[f"X:C{j}"] = np.arange(zrow_cursor, zrow_cursor + ncx)
        zrow_cursor += ncx
    gx = gauge_basis(igx.f)
    if gx.rows:
        block = np.zeros((gx.rows, n_total), dtype=np.uint8)
        block[:, layer_qubits[f"X:{_layer_key(layers_x)}"]] = gx.to_dense()
        z_rows.append(block)
        checks_z["X:UL"] = np.arange(zrow_cursor, zrow_cursor + gx.rows)
        zrow_cursor += gx.rows

    # Bridge gauge checks: one per bridge, solving against the shrunk graphs.
    ftx = BitMatrix.from_dense(fxd[:, keep_x])
    ftz = BitMatrix.from_dense(fzd[:, keep_z])
    ub_xpart = np.zeros((b_count, n_total), dtype=np.uint8)
    ub_zpart = np.zeros((b_count, n_total), dtype=np.uint8)
    wmat = np.zeros((b_count, ncx), dtype=np.uint8)
    umat = np.zeros((b_count, ncz), dtype=np.uint8)
    for b in range(b_count):
        w = gf2.solve(ftx, BitVector.from_bits(sx[:, b]))
        u = gf2.solve(ftz, BitVector.from_bits(sz[:, b]))
        assert w is not None and u is not None, "full column rank of shrunk graphs"
        wmat[b] = w.to_bits()
        umat[b] = u.to_bits()
        ub_xpart[b, bridge_ids[b]] = 1
        ub_xpart[b, layer_qubits["Z:C1"]] = umat[b]
        ub_zpart[b, layer_qubits["X:C1"]] = wmat[b]
    z_rows.append(ub_zpart)
    for i in range(b_count):
        z_xparts[zrow_cursor + i] = ub_xpart[i]
    checks_z["UB"] = np.arange(zrow_cursor, zrow_cursor + b_count)
    zrow_cursor += b_count

    xd = np.concatenate(x_rows)
    zd = np.concatenate(z_rows)
    xz = np.zeros_like(xd)
    for r, part in x_zparts.items():
        xz[r] = part
    zx = np.zeros_like(zd)
    for r, part in z_xparts.items():
        zx[r] = part

    measured = xbar * zbar
    measured = PauliOperator(
        _pad_bits(measured.xbits, n_total), _pad_bits(measured.zbits, n_total), measured.sign
    )
    gjoint = np.zeros((gx.rows + gz.rows, ncx + ncz), dtype=np.uint8)
    gjoint[: gx.rows, :ncx] = gx.to_dense()
    gjoint[gx.rows :, ncx:] = gz.to_dense()
    ub_abstract = np.concatenate([wmat, umat, np.eye(b_count, dtype=np.uint8)], axis=1)
    bridge = BridgeSpec(
        b_count=b_count,
        s1=BitMatrix.from_dense(sx),
        s2=BitMatrix.from_dense(sz),
        ub=BitMatrix.from_dense(ub_abstract),
        attach_layers=(1, 1),
    )
    merged = MergedCode(
        kind="Y",
        base=code,
        layers=(layers_x, layers_z),
        n=n_total,
        xmat_x=BitMatrix.from_dense(xd),
        xmat_z=BitMatrix.from_dense(xz),
        zmat_x=BitMatrix.from_dense(zx),
        zmat_z=BitMatrix.from_dense(zd),
        f=(igx, igz),
        g=BitMatrix.from_dense(gjoint) if gjoint.size else BitMatrix.zeros(0, 0),
        bridge=bridge,
        index_maps=IndexMaps(
            base_qubits=np.arange(n_base),
            layer_qubits=layer_qubits,
            bridge_qubits=bridge_ids,
            checks_x=checks_x,
            checks_z=checks_z,
        ),
        measured_op=measured,
        gauge_fixed=True,
    )
    _assert_measured_product_y(merged)
    bad = merged.validate()
    assert not bad, f"Y-system checks do not commute: {bad[:4]}"
    return merged


def _assert_measured_product_y(merged: MergedCode) -> None:
    maps = merged.index_maps
    accx = np.zeros(merged.n, dtype=np.uint8)
    accz = np.zeros(merged.n, dtype=np.uint8)
    for key, ids in maps.checks_x.items():
        short = key.split(":")[-1]
        if short.startswith("V") or key == "q1":
            for r in ids:
                accx ^= merged.xmat_x.row(int(r)).to_bits()
                accz ^= merged.xmat_z.row(int(r)).to_bits()
    for key, ids in maps.checks_z.items():
        short = key.split(":")[-1]
        if short.startswith("V"):
            for r in ids:
                accx ^= merged.zmat_x.row(int(r)).to_bits()
                accz ^= merged.zmat_z.row(int(r)).to_bits()
    assert (accx == merged.measured_op.xbits.to_bits()).all()
    assert (accz == merged.measured_op.zbits.to_bits()).all()


# ---------------------------------------------------------------------------
# Bundle IO
# ---------------------------------------------------------------------------


def _fmt_ids(ids) -> str:
    return " ".join(str(int(i)) for i in ids)


def save_merged(merged: MergedCode, path: str) -> None:
    """Write a merged-code bundle: matrices as text files plus metadata."""
    os.makedirs(path, exist_ok=True)
    mats = {
        "cx_x": merged.xmat_x,
        "cx_z": merged.xmat_z,
        "cz_x": merged.zmat_x,
        "cz_z": merged.zmat_z,
        "g": merged.g,
    }
    bases = merged.base if isinstance(merged.base, tuple) else (merged.base,)
    for i, b in enumerate(bases):
        mats[f"base{i}_hx"] = b.hx
        mats[f"base{i}_hz"] = b.hz
    for i, ig in enumerate(merged.f):
        mats[f"f{i}"] = ig.f
    if merged.bridge is not None:
        mats["bridge_s1"] = merged.bridge.s1
        mats["bridge_s2"] = merged.bridge.s2
        mats["bridge_ub"] = merged.bridge.ub
    for name, mat in mats.items():
        with open(os.path.join(path, f"{name}.txt"), "w") as fh:
            fh.write(format_check_matrix(mat))

    meta: dict[str, str] = {
        "kind": merged.kind,
        "layers": _fmt_ids(merged.layers if isinstance(merged.layers, tuple) else (merged.layers,)),
        "n": str(merged.n),
        "gauge_fixed": "1" if merged.gauge_fixed else "0",
        "num_bases": str(len(bases)),
        "num_f": str(len(merged.f)),
        "measured_x": _fmt_ids(np.nonzero(merged.measured_op.xbits.to_bits())[0]),
        "measured_z": _fmt_ids(np.nonzero(merged.measured_op.zbits.to_bits())[0]),
        "measured_sign": str(merged.measured_op.sign),
        "qubits.base": _fmt_ids(merged.index_maps.base_qubits),
        "qubits.bridge": _fmt_ids(merged.index_maps.bridge_qubits),
    }
    if merged.bridge is not None:
        meta["bridge.attach"] = _fmt_ids(merged.bridge.attach_layers)
        meta["bridge.count"] = str(merged.bridge.b_count)
    for i, ig in enumerate(merged.f):
        meta[f"f{i}.v0"] = _fmt_ids(ig.v0)
        meta[f"f{i}.c0"] = _fmt_ids(ig.c0)
    for key, ids in merged.index_maps.layer_qubits.items():
        meta[f"qubits.layer.{key}"] = _fmt_ids(ids)
    for key, ids in merged.index_maps.checks_x.items():
        meta[f"checks_x.{key}"] = _fmt_ids(ids)
    for key, ids in merged.index_maps.checks_z.items():
        meta[f"checks_z.{key}"] = _fmt_ids(ids)
    with open(os.path.join(path, "metadata.txt"), "w") as fh:
        for key in sorted(meta):
            fh.write(f"{key} = {meta[key]}\n")


def load_merged(path: str) -> MergedCode:
    meta: dict[str, str] = {}
    with open(os.path.join(path, "metadata.txt")) as fh:
        for line in fh:
            if "=" in line:
                key, _, value = line.partition("=")
                meta[key.strip()] = value.strip()

    def ids(key: str) -> np.ndarray:
        text = meta.get(key, "")
        if not text:
            return np.arange(0)
        return np.array([int(t) for t in text.split()], dtype=np.int64)

    def mat(name: str) -> BitMatrix:
        with open(os.path.join(path, f"{name}.txt")) as fh:
            return parse_check_matrix(fh.read())

    n = int(meta["n"])
    bases = tuple(
        CssCode(mat(f"base{i}_hx"), mat(f"base{i}_hz")) for i in range(int(meta["num_bases"]))
    )
    figs = tuple(
        InducedGraph(f=mat(f"f{i}"), v0=ids(f"f{i}.v0"), c0=ids(f"f{i}.c0"))
        for i in range(int(meta["num_f"]))
    )
    bridge = None
    if "bridge.count" in meta:
        attach = ids("bridge.attach")
        bridge = BridgeSpec(
            b_count=int(meta["bridge.count"]),
            s1=mat("bridge_s1"),
            s2=mat("bridge_s2"),
            ub=mat("bridge_ub"),
            attach_layers=(int(attach[0]), int(attach[1])),
        )
    layer_qubits = {}
    checks_x = {}
    checks_z = {}
    for key in meta:
        if key.startswith("qubits.layer."):
            layer_qubits[key[len("qubits.layer.") :]] = ids(key)
        elif key.startswith("checks_x."):
            checks_x[key[len("checks_x.") :]] = ids(key)
        elif key.startswith("checks_z."):
            checks_z[key[len("checks_z.") :]] = ids(key)
    layers_list = ids("layers")
    layers = int(layers_list[0]) if len(layers_list) == 1 else tuple(int(v) for v in layers_list)
    xsup = ids("measured_x")
    zsup = ids("measured_z")
    measured = PauliOperator(
        BitVector.from_support(n, xsup),
        BitVector.from_support(n, zsup),
        int(meta.get("measured_sign", "1")),
    )
    return MergedCode(
        kind=meta["kind"],
        base=bases[0] if len(bases) == 1 else bases,
        layers=layers,
        n=n,
        xmat_x=mat("cx_x"),
        xmat_z=mat("cx_z"),
        zmat_x=mat("cz_x"),
        zmat_z=mat("cz_z"),
        f=figs,
        g=mat("g"),
        bridge=bridge,
        index_maps=IndexMaps(
            base_qubits=ids("qubits.base"),
            layer_qubits=layer_qubits,
            bridge_qubits=ids("qubits.bridge"),
            checks_x=checks_x,
            checks_z=checks_z,
        ),
        measured_op=measured,
        gauge_fixed=meta.get("gauge_fixed") == "1",
    )
