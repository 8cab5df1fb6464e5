"""CSS code model, logical-operator machinery, and code families.

Provides the CssCode/PauliOperator/LogicalBasis data model, the induced Tanner
graph of a logical operator, irreducibility and weight reduction, hypergraph
product codes with their explicit logical basis, and bivariate bicycle codes
(including the [[144,12,12]] gross code with its automorphisms, ZX duality,
and the four case-study logical operators).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .gf2 import BitMatrix, BitVector


@dataclass(frozen=True)
class CssCode:
    """A CSS code given by its X and Z parity-check matrices."""

    hx: BitMatrix
    hz: BitMatrix
    name: str = ""

    def __post_init__(self):
        if self.hx.cols != self.hz.cols:
            raise ValueError(
                f"hx has {self.hx.cols} columns but hz has {self.hz.cols}"
            )

    @property
    def n(self) -> int:
        return self.hx.cols


@dataclass(frozen=True)
class PauliOperator:
    """A Pauli word X(xbits)·Z(zbits) with a ±1 sign.

    Phases of i from Y = iXZ are tracked modulo global phase; only the ±1
    frame matters for the commutation algebra used here.
    """

    xbits: BitVector
    zbits: BitVector
    sign: int = 1

    def __post_init__(self):
        if self.xbits.n != self.zbits.n:
            raise ValueError("x and z parts must have equal length")
        if self.sign not in (1, -1):
            raise ValueError("sign must be ±1")

    @classmethod
    def x_type(cls, n: int, support) -> "PauliOperator":
        return cls(BitVector.from_support(n, support), BitVector.zeros(n))

    @classmethod
    def z_type(cls, n: int, support) -> "PauliOperator":
        return cls(BitVector.zeros(n), BitVector.from_support(n, support))

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(BitVector.zeros(n), BitVector.zeros(n))

    @property
    def n(self) -> int:
        return self.xbits.n

    def weight(self) -> int:
        return int(np.bitwise_count(self.xbits.words | self.zbits.words).sum())

    def support(self) -> np.ndarray:
        return np.nonzero(self.xbits.to_bits() | self.zbits.to_bits())[0]

    def is_x_type(self) -> bool:
        return self.zbits.is_zero()

    def is_z_type(self) -> bool:
        return self.xbits.is_zero()

    def is_identity(self) -> bool:
        return self.xbits.is_zero() and self.zbits.is_zero()

    def commutes_with(self, other: "PauliOperator") -> bool:
        return (self.xbits.dot(other.zbits) ^ self.zbits.dot(other.xbits)) == 0

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if self.n != other.n:
            raise ValueError("length mismatch")
        # Reordering other's X part past self's Z part picks up the sign.
        flip = -1 if self.zbits.dot(other.xbits) else 1
        return PauliOperator(
            self.xbits ^ other.xbits,
            self.zbits ^ other.zbits,
            self.sign * other.sign * flip,
        )

    def __repr__(self) -> str:
        return (
            f"PauliOperator(n={self.n}, weight={self.weight()}, "
            f"|x|={self.xbits.weight()}, |z|={self.zbits.weight()}, sign={self.sign:+d})"
        )


@dataclass(frozen=True)
class LogicalBasis:
    """Paired logical operators: xops[i] anticommutes only with zops[i]."""

    xops: list[PauliOperator]
    zops: list[PauliOperator]

    @property
    def k(self) -> int:
        return len(self.xops)


@dataclass(frozen=True)
class InducedGraph:
    """Restriction of the Tanner graph to a logical operator's support.

    f has one row per adjacent opposite-type check (c0) and one column per
    support qubit (v0): f = hz[c0, v0] for an X operator.
    """

    f: BitMatrix
    v0: np.ndarray
    c0: np.ndarray


@dataclass(frozen=True)
class BBCodeSpec:
    """A bivariate bicycle code on the torus group ⟨x, y | x^l, y^m, xy=yx⟩.

    a_terms / b_terms list the (x-exponent, y-exponent) monomials of the two
    defining polynomials, reduced mod (l, m).
    """

    l: int
    m: int
    a_terms: tuple[tuple[int, int], ...]
    b_terms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for terms in (self.a_terms, self.b_terms):
            for (a, b) in terms:
                if not (0 <= a < self.l and 0 <= b < self.m):
                    raise ValueError(f"exponent {(a, b)} out of range for ({self.l},{self.m})")


# ---------------------------------------------------------------------------
# Validation and logical structure
# ---------------------------------------------------------------------------


def validate(code: CssCode) -> list[tuple[int, int]]:
    """Check pairs of anticommuting (x-check, z-check) rows; empty list = ok."""
    prod = gf2.matmul(code.hx, code.hz.transpose())
    violations = []
    dense = prod.to_dense()
    for i, j in zip(*np.nonzero(dense)):
        violations.append((int(i), int(j)))
    return violations


def num_logicals(code: CssCode) -> int:
    return code.n - gf2.rank(code.hx) - gf2.rank(code.hz)


def _kernel_mod_rowspace(h_other: BitMatrix, h_same: BitMatrix) -> list[BitVector]:
    """Vectors v with h_other·v^T = 0, independent modulo rowspace(h_same)."""
    kernel = gf2.nullspace_basis(h_other.transpose())
    picked: list[BitVector] = []
    base = h_same
    base_rank = gf2.rank(base)
    for i in range(kernel.rows):
        v = kernel.row(i)
        cand = gf2.stack_rows(base, BitMatrix.from_rows([v]))
        r = gf2.rank(cand)
        if r > base_rank:
            picked.append(v)
            base = cand
            base_rank = r
    return picked


def logical_basis(code: CssCode) -> LogicalBasis:
    """A symplectic logical basis via Gram-Schmidt over kernel representatives."""
    k = num_logicals(code)
    xs = [PauliOperator(v, BitVector.zeros(code.n)) for v in _kernel_mod_rowspace(code.hz, code.hx)]
    zs = [PauliOperator(BitVector.zeros(code.n), v) for v in _kernel_mod_rowspace(code.hx, code.hz)]
    if len(xs) != k or len(zs) != k:
        raise AssertionError("logical candidate count does not match k")
    xs, zs = symplectic_pairing(xs, zs)
    return LogicalBasis(xs, zs)


def symplectic_pairing(
    xs: list[PauliOperator], zs: list[PauliOperator]
) -> tuple[list[PauliOperator], list[PauliOperator]]:
    """Re-pair candidate logicals so xs[i] anticommutes exactly with zs[i]."""
    xs = list(xs)
    zs = list(zs)
    k = len(xs)
    for i in range(k):
        hit = None
        for a in range(i, k):
            for b in range(i, k):
                if not xs[a].commutes_with(zs[b]):
                    hit = (a, b)
                    break
            if hit:
                break
        if hit is None:
            raise AssertionError("degenerate symplectic form on logical candidates")
        a, b = hit
        xs[i], xs[a] = xs[a], xs[i]
        zs[i], zs[b] = zs[b], zs[i]
        for j in range(k):
            if j != i and not xs[j].commutes_with(zs[i]):
                xs[j] = xs[j] * xs[i]
            if j != i and not zs[j].commutes_with(xs[i]):
                zs[j] = zs[j] * zs[i]
    return xs, zs


class NotLogicalError(ValueError):
    """Raised when an operator is not a (nontrivial) logical of the code."""


def _require_pure_logical(code: CssCode, op: PauliOperator, basis: str) -> None:
    if basis not in ("X", "Z"):
        raise ValueError(f"basis must be 'X' or 'Z', got {basis!r}")
    if basis == "X":
        if not op.is_x_type():
            raise NotLogicalError("expected a pure-X operator")
        syndrome = gf2.mat_vec(code.hz, op.xbits)
        if not syndrome.is_zero():
            raise NotLogicalError("operator anticommutes with a Z check")
        stab = code.hx
        bits = op.xbits
    else:
        if not op.is_z_type():
            raise NotLogicalError("expected a pure-Z operator")
        syndrome = gf2.mat_vec(code.hx, op.zbits)
        if not syndrome.is_zero():
            raise NotLogicalError("operator anticommutes with an X check")
        stab = code.hz
        bits = op.zbits
    if op.is_identity():
        raise NotLogicalError("identity is not a logical operator")
    if _in_rowspace(stab, bits):
        raise NotLogicalError("operator is a stabilizer (trivial logical)")


def _in_rowspace(m: BitMatrix, v: BitVector) -> bool:
    return gf2.solve(m, v) is not None


def induced_graph(code: CssCode, op: PauliOperator, basis: str = "X") -> InducedGraph:
    """The induced Tanner graph F of a pure-type logical operator.

    For an X operator: v0 = its support, c0 = the Z checks overlapping v0,
    f = hz restricted to (c0, v0). Every row of f has even weight exactly
    because op commutes with the Z checks.
    """
    _require_pure_logical(code, op, basis)
    h = code.hz if basis == "X" else code.hx
    bits = op.xbits if basis == "X" else op.zbits
    v0 = bits.support()
    overlap = gf2.submatrix(h, range(h.rows), v0)
    c0 = np.nonzero(overlap.row_weights())[0]
    f = gf2.submatrix(h, c0, v0)
    return InducedGraph(f=f, v0=v0, c0=c0)


def is_irreducible(code: CssCode, op: PauliOperator, basis: str = "X") -> bool:
    """True iff the column nullspace of the induced F is exactly {0, all-ones}."""
    ig = induced_graph(code, op, basis)
    nv = len(ig.v0)
    return gf2.rank(ig.f) == nv - 1


def reduce_weight(
    code: CssCode, op: PauliOperator, budget: int = 20
) -> tuple[PauliOperator, bool]:
    """An equivalent operator (op times stabilizers) of minimal found weight.

    Exhaustive over the full stabilizer group when its dimension is at most
    `budget` (the second return value flags exactness); greedy single-row
    descent otherwise.
    """
    gens: list[PauliOperator] = []
    for i in range(code.hx.rows):
        gens.append(PauliOperator(code.hx.row(i), BitVector.zeros(code.n)))
    for i in range(code.hz.rows):
        gens.append(PauliOperator(BitVector.zeros(code.n), code.hz.row(i)))
    # Independent generators only.
    dim = gf2.rank(code.hx) + gf2.rank(code.hz)
    indep: list[PauliOperator] = []
    seen = BitMatrix.zeros(0, 2 * code.n)
    for g in gens:
        row = BitMatrix.from_rows([_sym_word(g)])
        cand = gf2.stack_rows(seen, row) if seen.rows else row
        if gf2.rank(cand) > seen.rows:
            indep.append(g)
            seen = cand
    if dim <= budget:
        best = _coset_min_exhaustive(op, indep)
        return best, True
    cur = op
    improved = True
    while improved:
        improved = False
        for g in indep:
            trial = cur * g
            if trial.weight() < cur.weight():
                cur = trial
                improved = True
    return PauliOperator(cur.xbits, cur.zbits), False


def _sym_word(op: PauliOperator) -> BitVector:
    bits = np.concatenate([op.xbits.to_bits(), op.zbits.to_bits()])
    return BitVector.from_bits(bits)


def _coset_min_exhaustive(op: PauliOperator, gens: list[PauliOperator]) -> PauliOperator:
    """Minimum-weight element of op·⟨gens⟩ by iterative doubling."""
    n = op.n
    xs = op.xbits.words[None, :].copy()
    zs = op.zbits.words[None, :].copy()
    for g in gens:
        xs = np.concatenate([xs, xs ^ g.xbits.words])
        zs = np.concatenate([zs, zs ^ g.zbits.words])
    weights = np.bitwise_count(xs | zs).sum(axis=1)
    i = int(np.argmin(weights))
    return PauliOperator(BitVector(n, xs[i].copy()), BitVector(n, zs[i].copy()))


# ---------------------------------------------------------------------------
# Hypergraph product codes
# ---------------------------------------------------------------------------


def hgp(h: BitMatrix, name: str = "") -> CssCode:
    """The hypergraph product of a binary matrix with itself.

    H_Z = [H⊗I_n, I_m⊗H^T], H_X = [I_n⊗H, H^T⊗I_m]; qubits are the n² left
    (vertical) block followed by the m² right block, both row-major.
    """
    hd = h.to_dense()
    m, n = hd.shape
    eye_n = np.eye(n, dtype=np.uint8)
    eye_m = np.eye(m, dtype=np.uint8)
    hz = np.concatenate([np.kron(hd, eye_n), np.kron(eye_m, hd.T)], axis=1) % 2
    hx = np.concatenate([np.kron(eye_n, hd), np.kron(hd.T, eye_m)], axis=1) % 2
    return CssCode(BitMatrix.from_dense(hx), BitMatrix.from_dense(hz), name=name)


def _systematic_kernel(h: np.ndarray) -> tuple[list[int], dict[int, np.ndarray]]:
    """Non-pivot columns and systematic kernel vectors w_s (H·w_s = 0, w_s[s]=1)."""
    mat = BitMatrix.from_dense(h)
    rref, pivots, _ = gf2.row_reduce(mat)
    dense = rref.to_dense()
    ncols = h.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    vecs = {}
    for s in free:
        w = np.zeros(ncols, dtype=np.uint8)
        w[s] = 1
        for i, p in enumerate(pivots):
            w[p] = dense[i, s]
        vecs[s] = w
    return free, vecs


def hgp_logical_basis(h: BitMatrix) -> LogicalBasis:
    """The explicit paired logical basis of hgp(h).

    Left-block pairs are indexed by ordered pairs of non-pivot columns of H
    (X = kernel vector ⊗ unit, Z = unit ⊗ kernel vector); right-block pairs
    use the non-pivot columns of H^T. The systematic choice of kernel vectors
    makes the symplectic pairing exactly diagonal.
    """
    hd = h.to_dense()
    m, n = hd.shape
    n_qubits = n * n + m * m
    free_n, wvec = _systematic_kernel(hd)
    free_m, uvec = _systematic_kernel(hd.T)
    xops: list[PauliOperator] = []
    zops: list[PauliOperator] = []
    for s1 in free_n:
        for s2 in free_n:
            xbits = np.zeros(n_qubits, dtype=np.uint8)
            rows = np.nonzero(wvec[s1])[0]
            xbits[rows * n + s2] = 1
            zbits = np.zeros(n_qubits, dtype=np.uint8)
            cols = np.nonzero(wvec[s2])[0]
            zbits[s1 * n + cols] = 1
            xops.append(PauliOperator(BitVector.from_bits(xbits), BitVector.zeros(n_qubits)))
            zops.append(PauliOperator(BitVector.zeros(n_qubits), BitVector.from_bits(zbits)))
    for t1 in free_m:
        for t2 in free_m:
            xbits = np.zeros(n_qubits, dtype=np.uint8)
            cols = np.nonzero(uvec[t1])[0]
            xbits[n * n + t2 * m + cols] = 1
            zbits = np.zeros(n_qubits, dtype=np.uint8)
            rows = np.nonzero(uvec[t2])[0]
            zbits[n * n + rows * m + t1] = 1
            xops.append(PauliOperator(BitVector.from_bits(xbits), BitVector.zeros(n_qubits)))
            zops.append(PauliOperator(BitVector.zeros(n_qubits), BitVector.from_bits(zbits)))
    return LogicalBasis(xops, zops)


# ---------------------------------------------------------------------------
# Bivariate bicycle codes
# ---------------------------------------------------------------------------


def _monomial_matrix(spec: BBCodeSpec, a: int, b: int) -> np.ndarray:
    """M[g, g'] = 1 iff g' = g·x^a y^b in the row-major (i*m + j) group layout."""
    lm = spec.l * spec.m
    mat = np.zeros((lm, lm), dtype=np.uint8)
    for i in range(spec.l):
        for j in range(spec.m):
            g = i * spec.m + j
            gp = ((i + a) % spec.l) * spec.m + (j + b) % spec.m
            mat[g, gp] = 1
    return mat


def _poly_matrix(spec: BBCodeSpec, terms) -> np.ndarray:
    lm = spec.l * spec.m
    acc = np.zeros((lm, lm), dtype=np.uint8)
    for (a, b) in terms:
        acc ^= _monomial_matrix(spec, a, b)
    return acc


def bb_code(spec: BBCodeSpec, name: str = "") -> CssCode:
    """The bivariate bicycle code hx = [A|B], hz = [B^T|A^T].

    Qubits are the L block (one per group element, row-major i*m + j)
    followed by the R block in the same order; check X(g) is row g of hx.
    """
    a = _poly_matrix(spec, spec.a_terms)
    b = _poly_matrix(spec, spec.b_terms)
    hx = np.concatenate([a, b], axis=1)
    hz = np.concatenate([b.T, a.T], axis=1)
    return CssCode(BitMatrix.from_dense(hx), BitMatrix.from_dense(hz), name=name)


def bb_group(spec: BBCodeSpec) -> list[tuple[int, int]]:
    """All monomials of the torus group, row-major."""
    return [(i, j) for i in range(spec.l) for j in range(spec.m)]


def bb_qubit(spec: BBCodeSpec, block: str, g: tuple[int, int]) -> int:
    """Qubit index of L(x^i y^j) or R(x^i y^j)."""
    i, j = g[0] % spec.l, g[1] % spec.m
    base = 0 if block == "L" else spec.l * spec.m
    return base + i * spec.m + j


def bb_support(spec: BBCodeSpec, l_monomials, r_monomials) -> list[int]:
    """Qubit indices of L(monomials) ∪ R(monomials)."""
    out = [bb_qubit(spec, "L", g) for g in l_monomials]
    out += [bb_qubit(spec, "R", g) for g in r_monomials]
    return out


def poly_shift(spec: BBCodeSpec, terms, w: tuple[int, int]) -> list[tuple[int, int]]:
    """Multiply a monomial list by w."""
    return [((a + w[0]) % spec.l, (b + w[1]) % spec.m) for (a, b) in terms]


def poly_transpose(spec: BBCodeSpec, terms) -> list[tuple[int, int]]:
    """Monomial-wise inverse: x^a y^b ↦ x^{l-a} y^{m-b}."""
    return [((-a) % spec.l, (-b) % spec.m) for (a, b) in terms]


def bb_automorphism(spec: BBCodeSpec, w: tuple[int, int]) -> np.ndarray:
    """Qubit permutation of the shift automorphism L(g)→L(wg), R(g)→R(wg)."""
    lm = spec.l * spec.m
    perm = np.zeros(2 * lm, dtype=np.int64)
    for i in range(spec.l):
        for j in range(spec.m):
            g = i * spec.m + j
            gp = ((i + w[0]) % spec.l) * spec.m + (j + w[1]) % spec.m
            perm[g] = gp
            perm[lm + g] = lm + gp
    return perm


def bb_zx_duality(spec: BBCodeSpec) -> tuple[np.ndarray, bool]:
    """The ZX duality: qubit permutation L(g)→R(g^{-1}), R(g)→L(g^{-1}), plus
    an X/Z swap flag (always True). Maps the support pattern of check X(g)
    onto that of Z(g^{-1})."""
    lm = spec.l * spec.m
    perm = np.zeros(2 * lm, dtype=np.int64)
    for i in range(spec.l):
        for j in range(spec.m):
            g = i * spec.m + j
            ginv = ((-i) % spec.l) * spec.m + (-j) % spec.m
            perm[g] = lm + ginv
            perm[lm + g] = ginv
    return perm, True


def apply_permutation(op: PauliOperator, perm: np.ndarray, swap_xz: bool = False) -> PauliOperator:
    """Relabel an operator's qubits by perm (and optionally swap X/Z parts)."""
    n = op.n
    xb = np.zeros(n, dtype=np.uint8)
    zb = np.zeros(n, dtype=np.uint8)
    xb[perm] = op.xbits.to_bits()
    zb[perm] = op.zbits.to_bits()
    if swap_xz:
        xb, zb = zb, xb
    return PauliOperator(BitVector.from_bits(xb), BitVector.from_bits(zb), op.sign)


GROSS_SPEC = BBCodeSpec(
    l=12,
    m=6,
    a_terms=((3, 0), (0, 1), (0, 2)),
    b_terms=((0, 3), (1, 0), (2, 0)),
)

# Monomial supports of the case-study logical operators on the gross code.
_P_TERMS = (
    (0, 1), (1, 5), (2, 2), (2, 4), (3, 1), (3, 2),
    (4, 1), (4, 2), (9, 3), (10, 0), (11, 0), (11, 3),
)
_Q_TERMS = ((0, 2), (1, 1), (1, 5), (6, 0))
_R_TERMS = ((2, 3), (2, 5), (3, 0), (3, 3), (3, 4), (3, 5))
_S_TERMS = ((1, 3), (1, 5), (2, 0), (2, 4), (3, 2), (3, 4))
_W_SHIFT = (10, 5)


def gross_code() -> CssCode:
    return bb_code(GROSS_SPEC, name="gross")


def gross_operators() -> tuple[PauliOperator, PauliOperator, PauliOperator, PauliOperator]:
    """The four case-study logicals (X̄, Z̄, X̄', Z̄') of the gross code.

    X̄ is supported on L(p) ∪ R(q), Z̄ on L(r) ∪ R(s); the primed pair is the
    ZX dual of the unprimed pair shifted by x^10 y^5 (polynomial transpose =
    monomial-wise inverse with x^{-a} = x^{l-a}).
    """
    spec = GROSS_SPEC
    n = 2 * spec.l * spec.m
    xbar = PauliOperator.x_type(n, bb_support(spec, _P_TERMS, _Q_TERMS))
    zbar = PauliOperator.z_type(n, bb_support(spec, _R_TERMS, _S_TERMS))
    xbar_p = PauliOperator.x_type(
        n,
        bb_support(
            spec,
            poly_shift(spec, poly_transpose(spec, _S_TERMS), _W_SHIFT),
            poly_shift(spec, poly_transpose(spec, _R_TERMS), _W_SHIFT),
        ),
    )
    zbar_p = PauliOperator.z_type(
        n,
        bb_support(
            spec,
            poly_shift(spec, poly_transpose(spec, _Q_TERMS), _W_SHIFT),
            poly_shift(spec, poly_transpose(spec, _P_TERMS), _W_SHIFT),
        ),
    )
    return xbar, zbar, xbar_p, zbar_p


# ---------------------------------------------------------------------------
# Check-matrix text format
# ---------------------------------------------------------------------------


def format_check_matrix(m: BitMatrix) -> str:
    """Render: header `rows cols`, then per row the set columns in order."""
    lines = [f"{m.rows} {m.cols}"]
    dense = m.to_dense()
    for i in range(m.rows):
        lines.append(" ".join(str(j) for j in np.nonzero(dense[i])[0]))
    return "\n".join(lines) + "\n"


def parse_check_matrix(text: str) -> BitMatrix:
    # Comment lines (leading `#`) are skipped anywhere; blank lines are
    # skipped before the header but count as zero rows after it.
    data: list[str] = []
    header: str | None = None
    for raw in text.splitlines():
        stripped = raw.split("#", 1)[0].rstrip()
        if raw.lstrip().startswith("#"):
            continue
        if header is None:
            if not stripped.strip():
                continue
            header = stripped
        else:
            data.append(stripped)
    if header is None:
        raise ValueError("empty check-matrix text")
    head = header.split()
    if len(head) != 2:
        raise ValueError(f"bad header line: {header!r}")
    rows, cols = int(head[0]), int(head[1])
    while len(data) > rows and not data[-1].strip():
        data.pop()
    if len(data) != rows:
        raise ValueError(f"expected {rows} row lines, found {len(data)}")
    dense = np.zeros((rows, cols), dtype=np.uint8)
    for i, line in enumerate(data):
        if line.strip():
            idx = np.array([int(t) for t in line.split()], dtype=np.int64)
            if (idx < 0).any() or (idx >= cols).any():
                raise ValueError(f"column index out of range on row {i}")
            dense[i, idx] = 1
    return BitMatrix.from_dense(dense)


def save_check_matrix(m: BitMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_check_matrix(m))


def load_check_matrix(path) -> BitMatrix:
    with open(path) as fh:
        return parse_check_matrix(fh.read())
