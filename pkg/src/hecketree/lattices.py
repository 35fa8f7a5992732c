"""Hermitian spaces over the unramified quadratic extension and their lattices.

Lattices are full-rank O_E-submodules of E^n (n = 2 or 3), stored as
``p^scale * column-span(H)`` where H is an integral matrix in canonical
column Hermite normal form over the local PID O_E:

  * H is upper triangular with pivot H[i][i] = p^{a_i};
  * every entry in row i to the right of the pivot is reduced mod p^{a_i};
  * the minimum valuation over all entries of H is zero.

Entries are exact elements of Z[omega] represented as integer pairs (a, b)
meaning a + b*omega, where omega satisfies x^2 + c1 x + c0 = 0.  All span
computations (products, adjugates, eliminations, valuations) are exact
integer arithmetic; the only inexact step is the normalization of pivot
units inside the HNF, performed modulo an adaptive power of p that provably
exceeds every digit the canonical form can contain.  Global unit factors
(e.g. the unit part of a determinant) are dropped outright since they do
not change a column span.

The Hermitian pairing is <x, y> = conj(x)^T Phi y, conjugate-linear in the
first argument, with Phi the antidiagonal Gram matrix (with middle entry 1
in rank 3).
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import (
    NotHyperspecial,
    PrecisionExhausted,
    RankDeficient,
)
from .localring import LocalElement, LocalField

Pair = tuple[int, int]

_VINF = 1 << 62  # valuation of the exact zero


# ---------------------------------------------------------------------------
# exact Z[omega] scalar arithmetic
# ---------------------------------------------------------------------------

def padd(x: Pair, y: Pair) -> Pair:
    return (x[0] + y[0], x[1] + y[1])


def psub(x: Pair, y: Pair) -> Pair:
    return (x[0] - y[0], x[1] - y[1])


def pneg(x: Pair) -> Pair:
    return (-x[0], -x[1])


def pmul(x: Pair, y: Pair, c1: int, c0: int) -> Pair:
    bd = x[1] * y[1]
    return (x[0] * y[0] - c0 * bd, x[0] * y[1] + x[1] * y[0] - c1 * bd)


def pconj(x: Pair, c1: int) -> Pair:
    return (x[0] - c1 * x[1], -x[1])


def pis_zero(x: Pair) -> bool:
    return x[0] == 0 and x[1] == 0


def intval(n: int, p: int) -> int:
    if n == 0:
        return _VINF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def pval(x: Pair, p: int) -> int:
    """Valuation min(v_p(a), v_p(b)); exact because entries are exact."""
    return min(intval(x[0], p), intval(x[1], p))


def pdiv_ppow(x: Pair, pk: int) -> Pair:
    """Exact division by a power of p (caller guarantees divisibility)."""
    a, b = x
    assert a % pk == 0 and b % pk == 0
    return (a // pk, b // pk)


def pmod(x: Pair, m: int) -> Pair:
    return (x[0] % m, x[1] % m)


def punit_inverse(x: Pair, p: int, c1: int, c0: int, modulus: int) -> Pair:
    """Inverse of a unit modulo the given power of p, via the norm form."""
    a, b = x[0] % modulus, x[1] % modulus
    n = (a * a - c1 * a * b + c0 * b * b) % modulus
    ninv = pow(n, -1, modulus)
    ca, cb = pconj((a, b), c1)
    return ((ca * ninv) % modulus, (cb * ninv) % modulus)


# ---------------------------------------------------------------------------
# exact matrices (lists of rows of Pairs)
# ---------------------------------------------------------------------------

def mat_identity(n: int) -> list[list[Pair]]:
    return [[(1, 0) if i == j else (0, 0) for j in range(n)] for i in range(n)]


def mat_mul(A, B, c1, c0):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        Ai = A[i]
        for j in range(m):
            sa = sb = 0
            for t in range(k):
                xa, xb = Ai[t]
                ya, yb = B[t][j]
                bd = xb * yb
                sa += xa * ya - c0 * bd
                sb += xa * yb + xb * ya - c1 * bd
            row.append((sa, sb))
        out.append(row)
    return out


def mat_conj_transpose(A, c1):
    n, m = len(A), len(A[0])
    return [[pconj(A[i][j], c1) for i in range(n)] for j in range(m)]


def mat_scale_entries(A, f):
    return [[f(x) for x in row] for row in A]


def det2(M, c1, c0):
    return psub(pmul(M[0][0], M[1][1], c1, c0), pmul(M[0][1], M[1][0], c1, c0))


def det3(M, c1, c0):
    tot = (0, 0)
    for j, sgn in ((0, 1), (1, -1), (2, 1)):
        minor = [[M[r][c] for c in range(3) if c != j] for r in (1, 2)]
        term = pmul(M[0][j], det2(minor, c1, c0), c1, c0)
        tot = padd(tot, term) if sgn == 1 else psub(tot, term)
    return tot


def mat_det(M, c1, c0):
    return det2(M, c1, c0) if len(M) == 2 else det3(M, c1, c0)


def mat_adjugate(M, c1, c0):
    """adj(M) with M * adj(M) = det(M) * I, for n in {2, 3}."""
    n = len(M)
    if n == 2:
        return [[M[1][1], pneg(M[0][1])], [pneg(M[1][0]), M[0][0]]]
    adj = [[(0, 0)] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != j]
            cols = [c for c in range(3) if c != i]
            minor = [[M[r][c] for c in cols] for r in rows]
            m = det2(minor, c1, c0)
            adj[i][j] = m if (i + j) % 2 == 0 else pneg(m)
    return adj


def gram_matrix(dim: int) -> list[list[Pair]]:
    """Antidiagonal Witt-basis Gram matrix; its own inverse."""
    return [[(1, 0) if i + j == dim - 1 else (0, 0) for j in range(dim)] for i in range(dim)]


# ---------------------------------------------------------------------------
# Hermite normal form over the local PID
# ---------------------------------------------------------------------------

def _hnf_columns(cols, p, c1, c0, dim, known_mod=None):
    """Canonicalize integral columns with global min valuation 0.

    Returns (pivot_list, rows) for the canonical upper-triangular basis.

    Phase 1 triangularizes with exact cross-multiplication column operations
    (scaling a column by the unit part of a pivot preserves its span), so no
    precision is lost.  Phase 2 normalizes each pivot column by a unit
    inverse computed modulo p^K where K = sum(pivots) + max(pivots) + 6;
    every canonical digit lives below p^{max pivot}, so K provably suffices.
    Phase 3 reduces the entries above the pivots.
    """
    cols = [list(c) for c in cols]
    pool = list(range(len(cols)))
    pivot_at: dict[int, int] = {}

    for i in range(dim - 1, -1, -1):
        best, bestv = None, _VINF
        for ci in pool:
            v = pval(cols[ci][i], p)
            if v < bestv:
                best, bestv = ci, v
        if best is None or bestv >= _VINF:
            raise RankDeficient(f"no pivot available in row {i}")
        if known_mod is not None and bestv >= known_mod:
            raise PrecisionExhausted(
                f"pivot valuation in row {i} is at least the known precision {known_mod}"
            )
        pool.remove(best)
        pivot_at[i] = best
        a = bestv
        pk = p ** a
        piv = cols[best]
        u = pdiv_ppow(piv[i], pk)
        for ci in pool:
            e = cols[ci][i]
            if pis_zero(e):
                continue
            q = pdiv_ppow(e, pk)
            col = cols[ci]
            for r in range(dim):
                col[r] = psub(pmul(u, col[r], c1, c0), pmul(q, piv[r], c1, c0))
            assert pis_zero(col[i])

    for ci in pool:  # redundant generators must have been eliminated to zero
        assert all(pis_zero(x) for x in cols[ci]), "non-zero residual generator"

    order = [pivot_at[i] for i in range(dim)]
    basis = [cols[ci] for ci in order]
    pivots = [pval(basis[i][i], p) for i in range(dim)]

    total = sum(pivots)
    K = total + max(pivots) + 6
    modK = p ** K
    for i in range(dim):
        a = pivots[i]
        pk = p ** a
        u = pdiv_ppow(basis[i][i], pk)
        uinv = punit_inverse(u, p, c1, c0, modK)
        col = basis[i]
        for r in range(i):
            col[r] = pmod(pmul(uinv, col[r], c1, c0), modK)
        col[i] = (pk, 0)
        for r in range(i + 1, dim):
            assert pis_zero(col[r])

    for i in range(dim - 1, -1, -1):
        a = pivots[i]
        pk = p ** a
        piv = basis[i]
        for j in range(i + 1, dim):
            col = basis[j]
            ea, eb = col[i]
            qa, qb = (ea - ea % pk) // pk, (eb - eb % pk) // pk
            if qa or qb:
                q = (qa, qb)
                for r in range(i + 1):
                    col[r] = psub(col[r], pmul(q, piv[r], c1, c0))
            col[i] = (col[i][0] % pk, col[i][1] % pk)

    rows = tuple(tuple(basis[j][i] for j in range(dim)) for i in range(dim))
    return pivots, rows


# ---------------------------------------------------------------------------
# Smith normal form (elementary divisor exponents), exact
# ---------------------------------------------------------------------------

def snf_exponents(M, p, c1, c0):
    """Valuations of the elementary divisors of a full-rank square matrix.

    Min-valuation pivoting makes the sequence automatically nondecreasing,
    which over a local ring is exactly the divisibility chain.
    """
    n = len(M)
    W = [list(row) for row in M]
    exps = []
    for s in range(n):
        best, bestv = None, _VINF
        for i in range(s, n):
            for j in range(s, n):
                v = pval(W[i][j], p)
                if v < bestv:
                    best, bestv = (i, j), v
        if best is None or bestv >= _VINF:
            raise RankDeficient("matrix is singular")
        bi, bj = best
        W[s], W[bi] = W[bi], W[s]
        for row in W:
            row[s], row[bj] = row[bj], row[s]
        a = bestv
        pk = p ** a
        u = pdiv_ppow(W[s][s], pk)
        for i in range(s + 1, n):
            e = W[i][s]
            if pis_zero(e):
                continue
            q = pdiv_ppow(e, pk)
            for j in range(s, n):
                W[i][j] = psub(pmul(u, W[i][j], c1, c0), pmul(q, W[s][j], c1, c0))
        for j in range(s + 1, n):
            e = W[s][j]
            if pis_zero(e):
                continue
            q = pdiv_ppow(e, pk)
            for i in range(s, n):
                W[i][j] = psub(pmul(u, W[i][j], c1, c0), pmul(q, W[i][s], c1, c0))
        exps.append(a)
    return exps


# ---------------------------------------------------------------------------
# spaces and lattices
# ---------------------------------------------------------------------------

class HermSpace:
    """A 2- or 3-dimensional Hermitian space in its Witt basis."""

    __slots__ = ("field", "dim", "gram")

    def __init__(self, field: LocalField, dim: int):
        if dim not in (2, 3):
            raise ValueError("only ranks 2 and 3 are supported")
        self.field = field
        self.dim = dim
        self.gram = gram_matrix(dim)
        assert mat_conj_transpose(self.gram, field.c1) == self.gram

    def __eq__(self, other):
        return (
            isinstance(other, HermSpace)
            and self.dim == other.dim
            and self.field == other.field
        )

    def __hash__(self):
        return hash((self.dim, self.field))

    def __repr__(self):
        return f"HermSpace(dim={self.dim}, p={self.field.p})"


class HermLattice:
    """A lattice p^scale * span(columns of H) in canonical form."""

    __slots__ = ("space", "scale", "rows", "pivots", "_gram0", "_hyper")

    def __init__(self, space: HermSpace, scale: int, rows, pivots):
        self.space = space
        self.scale = scale
        self.rows = rows
        self.pivots = tuple(pivots)
        self._gram0 = None
        self._hyper = None

    # --- constructors ---

    @staticmethod
    def standard(space: HermSpace) -> "HermLattice":
        n = space.dim
        rows = tuple(tuple((1, 0) if i == j else (0, 0) for j in range(n)) for i in range(n))
        return HermLattice(space, 0, rows, (0,) * n)

    @staticmethod
    def from_generators(space: HermSpace, generators, known_mod=None) -> "HermLattice":
        """Canonicalize a list of (column_vector, scale) generators.

        Column vectors are length-dim sequences of (a, b) integer pairs; the
        generator contributes p^scale times its O_E-span.
        """
        f = space.field
        p = f.p
        primitive = []  # (vector with min valuation 0, effective scale)
        for vec, s in generators:
            mv = min(pval(x, p) for x in vec)
            if mv >= _VINF:
                continue  # zero generator
            pk = p ** mv
            primitive.append(([pdiv_ppow(x, pk) for x in vec], s + mv))
        if not primitive:
            raise RankDeficient("all generators vanish")
        shift_base = min(e for _, e in primitive)
        scaled = []
        for vec, e in primitive:
            pk = p ** (e - shift_base)
            scaled.append([(x[0] * pk, x[1] * pk) for x in vec])
        pivots, rows = _hnf_columns(scaled, p, f.c1, f.c0, space.dim, known_mod=known_mod)
        return HermLattice(space, shift_base, rows, pivots)

    @staticmethod
    def from_field_matrix(space: HermSpace, mat: list[list[LocalElement]], scale: int = 0) -> "HermLattice":
        """Canonicalize from a matrix of LocalElements (columns generate).

        Representatives are taken as exact integers; pivots at valuation >= N
        raise PrecisionExhausted since they cannot be distinguished from 0.
        """
        cols = []
        for j in range(len(mat[0])):
            cols.append(([(mat[i][j].a, mat[i][j].b) for i in range(space.dim)], scale))
        return HermLattice.from_generators(space, cols, known_mod=space.field.precision)

    # --- identity ---

    def key(self):
        return (self.space.dim, self.scale, self.rows)

    def __eq__(self, other):
        return isinstance(other, HermLattice) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"HermLattice(dim={self.space.dim}, scale={self.scale}, pivots={self.pivots})"

    def debug_dump(self) -> str:
        """Stable dump: base-p digit strings per entry (a then b), row-major."""
        p = self.space.field.p

        def digits(n: int) -> str:
            if n == 0:
                return "0"
            out = []
            while n:
                out.append(str(n % p))
                n //= p
            return "".join(out)

        parts = [f"scale={self.scale}"]
        for row in self.rows:
            parts.append(" ".join(f"{digits(a)}|{digits(b)}" for (a, b) in row))
        return "\n".join(parts)

    # --- module operations ---

    def rescale(self, k: int) -> "HermLattice":
        """The lattice p^k * L (same canonical matrix, shifted scale)."""
        return HermLattice(self.space, self.scale + k, self.rows, self.pivots)

    def apply_matrix(self, mat, scale: int = 0) -> "HermLattice":
        """Image under an exact matrix given with its own scale exponent."""
        f = self.space.field
        prod = mat_mul(mat, [list(r) for r in self.rows], f.c1, f.c0)
        cols = [([prod[i][j] for i in range(self.space.dim)], self.scale + scale)
                for j in range(self.space.dim)]
        return HermLattice.from_generators(self.space, cols)

    def contains(self, vec, vscale: int = 0) -> bool:
        """Exact membership of p^vscale * vec.

        v is in p^s span(H) iff H^{-1} v p^{vscale - s} is integral; with
        det(H) = p^w * unit this reads val(adj(H) v) + vscale - s >= w
        componentwise, a pure valuation test on exact integers.
        """
        f = self.space.field
        A = mat_adjugate([list(r) for r in self.rows], f.c1, f.c0)
        w = sum(self.pivots)
        need = w - (vscale - self.scale)
        for i in range(self.space.dim):
            acc = (0, 0)
            for j in range(self.space.dim):
                acc = padd(acc, pmul(A[i][j], vec[j], f.c1, f.c0))
            if pval(acc, f.p) < need:
                return False
        return True

    def sublattice_of(self, other: "HermLattice") -> bool:
        cols = [[self.rows[i][j] for i in range(self.space.dim)] for j in range(self.space.dim)]
        return all(other.contains(c, self.scale) for c in cols)

    # --- duality and classification ---

    def gram0(self):
        """conj(H)^T Phi H (true Gram is p^{2 scale} times this)."""
        if self._gram0 is None:
            f = self.space.field
            H = [list(r) for r in self.rows]
            G = mat_mul(mat_conj_transpose(H, f.c1), mat_mul(self.space.gram, H, f.c1, f.c0), f.c1, f.c0)
            self._gram0 = G
        return self._gram0

    def dual(self) -> "HermLattice":
        """The dual lattice {v : <l, v> integral for all l in L}.

        Basis Phi^{-1} conj(H)^{-T} p^{-scale}; the adjugate replaces the
        inverse and the determinant's unit part is dropped (it rescales the
        span by a unit).  Exact.
        """
        f = self.space.field
        H = [list(r) for r in self.rows]
        w = sum(self.pivots)
        ct = mat_conj_transpose(H, f.c1)
        adj = mat_adjugate(ct, f.c1, f.c0)
        D = mat_mul(self.space.gram, adj, f.c1, f.c0)  # Phi^{-1} = Phi
        cols = [([D[i][j] for i in range(self.space.dim)], -self.scale - w)
                for j in range(self.space.dim)]
        return HermLattice.from_generators(self.space, cols)

    def is_hyperspecial(self) -> bool:
        """Self-dual iff the true Gram is integral with unit determinant."""
        if self._hyper is None:
            f = self.space.field
            G = self.gram0()
            s2 = 2 * self.scale
            minv = min(pval(x, f.p) for row in G for x in row)
            if minv + s2 < 0:
                self._hyper = False
            else:
                dv = pval(mat_det(G, f.c1, f.c0), f.p)
                self._hyper = (dv + self.space.dim * s2) == 0
        return self._hyper

    def classify(self) -> str:
        """'hyperspecial' (self-dual), 'special' (almost self-dual), or 'neither'."""
        if self.is_hyperspecial():
            return "hyperspecial"
        dualL = self.dual()
        pdual = dualL.rescale(1)
        if (
            self.sublattice_of(dualL)
            and self != dualL
            and pdual.sublattice_of(self)
            and pdual != self
        ):
            return "special"
        return "neither"


# ---------------------------------------------------------------------------
# relative position
# ---------------------------------------------------------------------------

def relative_invariants(L1: HermLattice, L2: HermLattice) -> tuple[int, ...]:
    """Elementary divisor exponents of B1^{-1} B2, sorted descending.

    Computed from adj(H1) H2 (exact); the unit part of det(H1) is irrelevant
    and the power p^{sum pivots of H1} is subtracted from every exponent.
    """
    if L1.space != L2.space:
        raise ValueError("lattices live in different spaces")
    f = L1.space.field
    A = mat_adjugate([list(r) for r in L1.rows], f.c1, f.c0)
    M = mat_mul(A, [list(r) for r in L2.rows], f.c1, f.c0)
    exps = snf_exponents(M, f.p, f.c1, f.c0)
    w1 = sum(L1.pivots)
    shift = L2.scale - L1.scale - w1
    out = sorted((e + shift for e in exps), reverse=True)
    return tuple(out)


def distance(L1: HermLattice, L2: HermLattice) -> int:
    """Hyperspecial distance: the top invariant a of (a, 0, -a) / (a, -a)."""
    if not (L1.is_hyperspecial() and L2.is_hyperspecial()):
        raise NotHyperspecial("distance requires self-dual lattices")
    inv = relative_invariants(L1, L2)
    if L1.space.dim == 3:
        assert inv[1] == 0 and inv[0] == -inv[2], f"unexpected invariants {inv}"
    else:
        assert inv[0] == -inv[1], f"unexpected invariants {inv}"
    return inv[0]


# ---------------------------------------------------------------------------
# residue-field helpers (F_{q^2} = O_E/p)
# ---------------------------------------------------------------------------

def _res_mul(x, y, p, c1, c0):
    bd = x[1] * y[1]
    return ((x[0] * y[0] - c0 * bd) % p, (x[0] * y[1] + x[1] * y[0] - c1 * bd) % p)


def _res_conj(x, p, c1):
    return ((x[0] - c1 * x[1]) % p, (-x[1]) % p)


def _res_inv(x, p, c1, c0):
    n = (x[0] * x[0] - c1 * x[0] * x[1] + c0 * x[1] * x[1]) % p
    ninv = pow(n, -1, p)
    c = _res_conj(x, p, c1)
    return ((c[0] * ninv) % p, (c[1] * ninv) % p)


def _residue_units(p):
    return [(a, b) for a in range(p) for b in range(p) if (a, b) != (0, 0)]


def residue_line_reps(dim: int, p: int):
    """Canonical representatives of the projective lines of F_{q^2}^dim."""
    k = [(a, b) for a in range(p) for b in range(p)]
    reps = []
    for lead in range(dim):
        free = dim - lead - 1
        for tail in itertools.product(k, repeat=free):
            v = [(0, 0)] * lead + [(1, 0)] + list(tail)
            reps.append(tuple(v))
    return reps


def _true_gram_mod(L: HermLattice, modulus_exp: int):
    """The integral Gram p^{2 scale} conj(H)^T Phi H reduced mod p^modulus_exp.

    Requires integrality (<L, L> subset O_E), which holds for sublattices of
    self-dual lattices and for self-dual lattices themselves.
    """
    f = L.space.field
    G = L.gram0()
    s2 = 2 * L.scale
    m = f.p ** modulus_exp
    out = []
    for row in G:
        r = []
        for x in row:
            if s2 >= 0:
                pk = f.p ** s2
                r.append(((x[0] * pk) % m, (x[1] * pk) % m))
            else:
                pk = f.p ** (-s2)
                assert x[0] % pk == 0 and x[1] % pk == 0, "non-integral Gram"
                r.append(((x[0] // pk) % m, (x[1] // pk) % m))
        out.append(r)
    return out


def isotropic_residue_lines(L: HermLattice):
    """Isotropic lines of the residue Hermitian space L/pL (L self-dual)."""
    if not L.is_hyperspecial():
        raise NotHyperspecial("residue form requires a self-dual lattice")
    f = L.space.field
    p = f.p
    G = _true_gram_mod(L, 1)
    out = []
    for v in residue_line_reps(L.space.dim, p):
        ta, tb = 0, 0
        for i in range(L.space.dim):
            ci = _res_conj(v[i], p, f.c1)
            for j in range(L.space.dim):
                t = _res_mul(_res_mul(ci, G[i][j], p, f.c1, f.c0), v[j], p, f.c1, f.c0)
                ta = (ta + t[0]) % p
                tb = (tb + t[1]) % p
        if ta == 0 and tb == 0:
            out.append(v)
    return out


def special_sublattice(L: HermLattice, line) -> HermLattice:
    """Preimage in L of the orthogonal complement of an isotropic residue line."""
    f = L.space.field
    p = f.p
    n = L.space.dim
    G = _true_gram_mod(L, 1)
    # w = G * v; condition on coordinates x of a lattice vector: conj(x)^T w = 0,
    # equivalently x^T conj(w) = 0.
    w = []
    for i in range(n):
        ta, tb = 0, 0
        for j in range(n):
            t = _res_mul(G[i][j], line[j], p, f.c1, f.c0)
            ta = (ta + t[0]) % p
            tb = (tb + t[1]) % p
        w.append((ta, tb))
    wbar = [_res_conj(x, p, f.c1) for x in w]
    kernel = _residue_kernel_of_form(wbar, p, f.c1, f.c0, n)
    assert len(kernel) == n - 1, "orthogonal complement has wrong dimension"
    H = [list(r) for r in L.rows]
    gens = []
    for x in kernel:
        col = []
        for i in range(n):
            acc = (0, 0)
            for j in range(n):
                acc = padd(acc, pmul(H[i][j], x[j], f.c1, f.c0))
            col.append(acc)
        gens.append((col, L.scale))
    for j in range(n):
        gens.append(([pmul((p, 0), H[i][j], f.c1, f.c0) for i in range(n)], L.scale))
    return HermLattice.from_generators(L.space, gens)


def _residue_kernel_of_form(coeffs, p, c1, c0, n):
    """Kernel basis of the linear form sum coeffs[i] * x_i over F_{q^2}."""
    pivot = next((i for i in range(n) if coeffs[i] != (0, 0)), None)
    if pivot is None:
        return [tuple((1, 0) if j == i else (0, 0) for j in range(n)) for i in range(n)]
    cinv = _res_inv(coeffs[pivot], p, c1, c0)
    basis = []
    for i in range(n):
        if i == pivot:
            continue
        coef = _res_mul(cinv, coeffs[i], p, c1, c0)
        vec = [(0, 0)] * n
        vec[i] = (1, 0)
        vec[pivot] = ((-coef[0]) % p, (-coef[1]) % p)
        basis.append(tuple(vec))
    return basis


def _kernel_mod_p(G, p, c1, c0, n):
    """Kernel of an n x n residue matrix over F_{q^2} (tiny Gaussian elim)."""
    rows = [list(r) for r in G]
    cols = list(range(n))
    pr = 0
    pivots = []
    for c in range(n):
        sel = next((r for r in range(pr, n) if rows[r][c] != (0, 0)), None)
        if sel is None:
            continue
        rows[pr], rows[sel] = rows[sel], rows[pr]
        inv = _res_inv(rows[pr][c], p, c1, c0)
        rows[pr] = [_res_mul(inv, x, p, c1, c0) for x in rows[pr]]
        for r in range(n):
            if r != pr and rows[r][c] != (0, 0):
                f = rows[r][c]
                rows[r] = [
                    ((rows[r][j][0] - _res_mul(f, rows[pr][j], p, c1, c0)[0]) % p,
                     (rows[r][j][1] - _res_mul(f, rows[pr][j], p, c1, c0)[1]) % p)
                    for j in range(n)
                ]
        pivots.append(c)
        pr += 1
        if pr == n:
            break
    free = [c for c in cols if c not in pivots]
    basis = []
    for fc in free:
        vec = [(0, 0)] * n
        vec[fc] = (1, 0)
        for r, pc in enumerate(pivots):
            x = rows[r][fc]
            vec[pc] = ((-x[0]) % p, (-x[1]) % p)
        basis.append(tuple(vec))
    return basis


def hyperspecial_neighbors(L: HermLattice) -> list[HermLattice]:
    """All self-dual lattices at distance 1 from L.

    For each isotropic line l of the residue space, the preimage L' of its
    orthogonal complement is almost self-dual; the self-dual lattices M with
    L' < M < L'^dual correspond to the isotropic vectors of the rank-2
    residue quotient.  A candidate M = L' + O_E * m with m in p^{-1} L' and
    <m, L'> integral is self-dual iff <m, m> is integral: M is then
    self-orthogonal of covolume zero.  Counts: q(q^3+1) in rank 3 and
    q(q+1) in rank 2.
    """
    if not L.is_hyperspecial():
        raise NotHyperspecial("neighbors require a self-dual lattice")
    f = L.space.field
    p = f.p
    n = L.space.dim
    q = f.q
    out = []
    seen = set()
    for line in isotropic_residue_lines(L):
        Lp = special_sublattice(L, line)
        Gp = _true_gram_mod(Lp, 1)
        kernel = _kernel_mod_p(Gp, p, f.c1, f.c0, n)
        assert len(kernel) == 2, f"residue radical has dimension {len(kernel)}, expected 2"
        k1, k2 = kernel
        candidates = [k2] + [
            tuple(padd(k1[i], _res_mul(t, k2[i], p, f.c1, f.c0)) for i in range(n))
            for t in [(a, b) for a in range(p) for b in range(p)]
        ]
        Hp = [list(r) for r in Lp.rows]
        Gex = Lp.gram0()
        accepted = 0
        for x in candidates:
            # exact isotropy: conj(x)^T (p^{2s'} Gex) x must vanish mod p^2
            val = (0, 0)
            for i in range(n):
                ci = pconj(x[i], f.c1)
                for j in range(n):
                    val = padd(val, pmul(pmul(ci, Gex[i][j], f.c1, f.c0), x[j], f.c1, f.c0))
            if pval(val, p) + 2 * Lp.scale < 2:
                continue
            accepted += 1
            col = []
            for i in range(n):
                acc = (0, 0)
                for j in range(n):
                    acc = padd(acc, pmul(Hp[i][j], x[j], f.c1, f.c0))
                col.append(acc)
            gens = [([Hp[i][j] for i in range(n)], Lp.scale) for j in range(n)]
            gens.append((col, Lp.scale - 1))
            M = HermLattice.from_generators(L.space, gens)
            if M.key() == L.key() or M.key() in seen:
                continue
            seen.add(M.key())
            out.append(M)
        assert accepted == q + 1, f"expected {q + 1} isotropic quotient lines, got {accepted}"
    expected = q * (q ** 3 + 1) if n == 3 else q * (q + 1)
    assert len(out) == expected, f"neighbor count {len(out)} != {expected}"
    return out


# ---------------------------------------------------------------------------
# brute-force neighbor oracle (independent path, vectorized residue filter)
# ---------------------------------------------------------------------------

_candidate_cache: dict = {}


def _np_conj(X, p2, c1):
    out = np.empty_like(X)
    out[..., 0] = (X[..., 0] - c1 * X[..., 1]) % p2
    out[..., 1] = (-X[..., 1]) % p2
    return out


def _np_mul(X, Y, p2, c1, c0):
    bd = X[..., 1] * Y[..., 1]
    out = np.empty(np.broadcast(X, Y).shape, dtype=np.int64)
    out[..., 0] = (X[..., 0] * Y[..., 0] - c0 * bd) % p2
    out[..., 1] = (X[..., 0] * Y[..., 1] + X[..., 1] * Y[..., 0] - c1 * bd) % p2
    return out


def _np_herm(X, G, Y, p2, c1, c0, dim):
    """Hermitian products conj(X)^T G Y, vectorized over leading axes."""
    Xc = _np_conj(X, p2, c1)
    shape = np.broadcast(X[..., 0, :], Y[..., 0, :]).shape[:-1]
    acc = np.zeros(shape + (2,), dtype=np.int64)
    for i in range(dim):
        for j in range(dim):
            g = np.array(G[i][j], dtype=np.int64)
            t = _np_mul(_np_mul(Xc[..., i, :], g, p2, c1, c0), Y[..., j, :], p2, c1, c0)
            acc = (acc + t) % p2
    return acc


def _unit_pivot_candidates(p: int, dim: int):
    """All residue-module columns with topmost unit coordinate normalized to 1.

    Entries above the pivot lie in pR, entries below range over all of
    R = O_E/p^2.  Returned per pivot row as an int64 array (count, dim, 2).
    """
    key = ("v1", p, dim)
    if key in _candidate_cache:
        return _candidate_cache[key]
    p2 = p * p
    above = [(a * p, b * p) for a in range(p) for b in range(p)]
    below = [(a, b) for a in range(p2) for b in range(p2)]
    per_row = {}
    for r1 in range(dim):
        rows_choices = []
        for r in range(dim):
            if r < r1:
                rows_choices.append(above)
            elif r == r1:
                rows_choices.append([(1, 0)])
            else:
                rows_choices.append(below)
        cands = [c for c in itertools.product(*rows_choices)]
        per_row[r1] = np.array(cands, dtype=np.int64)
    _candidate_cache[key] = per_row
    return per_row


def _torsion_candidates(p: int, dim: int):
    """Residue vectors supported on the complement of the pivot coordinate."""
    key = ("u2", p, dim)
    if key in _candidate_cache:
        return _candidate_cache[key]
    k = [(a, b) for a in range(p) for b in range(p)]
    per_row = {}
    for r1 in range(dim):
        others = [r for r in range(dim) if r != r1]
        cands = []
        for tail in itertools.product(k, repeat=len(others)):
            if all(t == (0, 0) for t in tail):
                continue
            v = [(0, 0)] * dim
            for rr, t in zip(others, tail):
                v[rr] = t
            cands.append(tuple(v))
        per_row[r1] = np.array(cands, dtype=np.int64)
    _candidate_cache[key] = per_row
    return per_row


def _dedupe_key(v1, u2, r1, p, c1, c0):
    """Canonical fingerprint of the candidate module R*v1 + k*u2 (+ pL).

    Normalizes the torsion generator to a leading 1 with zero coordinate at
    the free pivot row, then cancels the whole v1 coordinate at the torsion
    pivot row using torsion adjustments (v1 is only defined modulo them).
    """
    p2 = p * p
    if u2 is None:
        return (r1, tuple(int(x) for pair in v1 for x in pair))
    # reduce u2 modulo the residue line of v1: zero its r1 coordinate
    t = (int(u2[r1][0]) % p, int(u2[r1][1]) % p)
    u = []
    for i in range(len(u2)):
        s = _res_mul(t, (int(v1[i][0]) % p, int(v1[i][1]) % p), p, c1, c0)
        u.append((((int(u2[i][0]) - s[0]) % p), ((int(u2[i][1]) - s[1]) % p)))
    lead = next((i for i in range(len(u)) if u[i] != (0, 0)), None)
    if lead is None:
        return None  # degenerate: torsion generator inside the free line
    inv = _res_inv(u[lead], p, c1, c0)
    u = [_res_mul(inv, x, p, c1, c0) for x in u]
    # the free generator is defined only modulo p * (torsion): cancel the
    # p-part of its entry at the torsion pivot row (nothing else is a
    # symmetry, so distinct candidate modules keep distinct keys)
    v = [[int(a) % p2, int(b) % p2] for (a, b) in v1]
    corr = ((v[lead][0] // p) % p, (v[lead][1] // p) % p)
    for i in range(len(v)):
        s = _res_mul(corr, u[i], p, c1, c0)
        v[i][0] = (v[i][0] - p * s[0]) % p2
        v[i][1] = (v[i][1] - p * s[1]) % p2
    return (r1, tuple((a, b) for a, b in v), tuple(u))


def brute_force_neighbors(L: HermLattice) -> list[HermLattice]:
    """Independent oracle for hyperspecial_neighbors (q <= 3).

    Enumerates intermediate modules pL <= M <= p^{-1}L through generators of
    the finite module p^{-1}L/pL: any lattice at distance 1 contains pL with
    quotient isomorphic to R + R/p (R = O_E/p^2), so a free generator with a
    normalized unit pivot plus a p-torsion generator cover every candidate.
    Candidates are pruned by exact residue self-orthogonality (vectorized),
    deduplicated by a canonical residue fingerprint, and the survivors are
    confirmed with the exact self-duality and distance tests.
    """
    if not L.is_hyperspecial():
        raise NotHyperspecial("neighbors require a self-dual lattice")
    f = L.space.field
    p = f.p
    if p > 3:
        raise ValueError("brute-force oracle is restricted to q <= 3")
    n = L.space.dim
    p2 = p * p
    rc1, rc0 = f.c1 % p, f.c0 % p
    G = _true_gram_mod(L, 2)
    v1s = _unit_pivot_candidates(p, n)
    u2s = _torsion_candidates(p, n) if n == 3 else None

    H = [list(r) for r in L.rows]
    survivors = []
    for r1 in range(n):
        V1 = v1s[r1]
        d11 = _np_herm(V1, G, V1, p2, f.c1, f.c0, n)
        iso = (d11[..., 0] % p2 == 0) & (d11[..., 1] % p2 == 0)
        V1i = V1[iso]
        if n == 2:
            for v1 in V1i:
                key = _dedupe_key(v1, None, r1, p, rc1, rc0)
                survivors.append((key, v1, None))
            continue
        U2 = u2s[r1]
        cross = _np_herm(V1i[:, None, :, :], G, U2[None, :, :, :], p2, f.c1, f.c0, n)
        ok = (cross[..., 0] % p == 0) & (cross[..., 1] % p == 0)
        idx_v, idx_u = np.nonzero(ok)
        for iv, iu in zip(idx_v, idx_u):
            key = _dedupe_key(V1i[iv], U2[iu], r1, p, rc1, rc0)
            if key is not None:
                survivors.append((key, V1i[iv], U2[iu]))

    out = {}
    seen = set()
    for key, v1, u2 in survivors:
        if key in seen:
            continue
        seen.add(key)
        gens = [([pmul((p, 0), H[i][j], f.c1, f.c0) for i in range(n)], L.scale)
                for j in range(n)]
        col1 = []
        for i in range(n):
            acc = (0, 0)
            for j in range(n):
                acc = padd(acc, pmul(H[i][j], (int(v1[j][0]), int(v1[j][1])), f.c1, f.c0))
            col1.append(acc)
        gens.append((col1, L.scale - 1))
        if u2 is not None:
            col2 = []
            for i in range(n):
                acc = (0, 0)
                for j in range(n):
                    acc = padd(acc, pmul(H[i][j], (int(u2[j][0]), int(u2[j][1])), f.c1, f.c0))
                col2.append(acc)
            gens.append((col2, L.scale))
        try:
            M = HermLattice.from_generators(L.space, gens)
        except RankDeficient:
            continue
        if M.key() in out or M.key() == L.key():
            continue
        if not M.is_hyperspecial():
            continue
        if distance(L, M) != 1:
            continue
        out[M.key()] = M
    return list(out.values())


# ---------------------------------------------------------------------------
# embedding of the rank-2 space
# ---------------------------------------------------------------------------

def embed_W_lattice(Lw: HermLattice, V: HermSpace) -> HermLattice:
    """Lw + O_E * e_0 inside the rank-3 space (W spans coordinates 0 and 2)."""
    if Lw.space.dim != 2 or V.dim != 3:
        raise ValueError("embedding goes from the rank-2 space into the rank-3 space")
    gens = []
    for j in range(2):
        col = [Lw.rows[0][j], (0, 0), Lw.rows[1][j]]
        gens.append((col, Lw.scale))
    gens.append(([(0, 0), (1, 0), (0, 0)], 0))
    return HermLattice.from_generators(V, gens)
