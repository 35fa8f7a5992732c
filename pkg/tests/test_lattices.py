"""Tests for Hermitian lattices: canonical forms, duals, distances, neighbors."""

import random

import pytest

from hecketree.errors import NotHyperspecial, PrecisionExhausted, RankDeficient
from hecketree.lattices import (
    HermLattice,
    HermSpace,
    brute_force_neighbors,
    distance,
    embed_W_lattice,
    hyperspecial_neighbors,
    isotropic_residue_lines,
    relative_invariants,
    special_sublattice,
)
from hecketree.localring import LocalField


def make_spaces(p, precision=24):
    f = LocalField(p, precision)
    return HermSpace(f, 3), HermSpace(f, 2)


V2, W2 = make_spaces(2)
V3, W3 = make_spaces(3)


def delta_matrix(space):
    """diag(p, 1, p^-1) resp. diag(p, p^-1) as (integral matrix, scale)."""
    p = space.field.p
    if space.dim == 3:
        mat = [[(p * p, 0), (0, 0), (0, 0)], [(0, 0), (p, 0), (0, 0)], [(0, 0), (0, 0), (1, 0)]]
    else:
        mat = [[(p * p, 0), (0, 0)], [(0, 0), (1, 0)]]
    return mat, -1


def apartment_lattice(space, m):
    L = HermLattice.standard(space)
    mat, s = delta_matrix(space)
    if m >= 0:
        for _ in range(m):
            L = L.apply_matrix(mat, s)
    else:
        p = space.field.p
        if space.dim == 3:
            inv = [[(1, 0), (0, 0), (0, 0)], [(0, 0), (p, 0), (0, 0)], [(0, 0), (0, 0), (p * p, 0)]]
        else:
            inv = [[(1, 0), (0, 0)], [(0, 0), (p * p, 0)]]
        for _ in range(-m):
            L = L.apply_matrix(inv, -1)
    return L


def random_unimodular(space, rng):
    """Product of random elementary column operations (exact, det a unit)."""
    n = space.dim
    p = space.field.p
    M = [[(1, 0) if i == j else (0, 0) for j in range(n)] for i in range(n)]
    from hecketree.lattices import mat_mul

    f = space.field
    for _ in range(6):
        i, j = rng.sample(range(n), 2)
        E = [[(1, 0) if a == b else (0, 0) for b in range(n)] for a in range(n)]
        E[i][j] = (rng.randrange(-8, 9), rng.randrange(-8, 9))
        M = mat_mul(M, E, f.c1, f.c0)
    # random unit diagonal
    D = [[(0, 0)] * n for _ in range(n)]
    for i in range(n):
        a = rng.randrange(p ** 3)
        b = rng.randrange(p ** 3)
        if a % p == 0 and b % p == 0:
            a += 1
        D[i][i] = (a, b)
    return mat_mul(M, D, f.c1, f.c0)


def random_hyperspecial(space, rng, steps=3):
    L = HermLattice.standard(space)
    for _ in range(steps):
        L = rng.choice(hyperspecial_neighbors(L))
    return L


# --- canonical form -------------------------------------------------------


def test_identity_basis_is_canonical():
    L = HermLattice.standard(V2)
    gens = [([(1, 0), (0, 0), (0, 0)], 0), ([(0, 0), (1, 0), (0, 0)], 0), ([(0, 0), (0, 0), (1, 0)], 0)]
    assert HermLattice.from_generators(V2, gens) == L
    assert L.scale == 0 and L.pivots == (0, 0, 0)


def test_recombined_witt_basis_canonicalizes_to_standard():
    # columns e_+ + e_-, e_-, e_0 span the standard lattice
    gens = [([(1, 0), (0, 0), (1, 0)], 0), ([(0, 0), (0, 0), (1, 0)], 0), ([(0, 0), (1, 0), (0, 0)], 0)]
    L = HermLattice.from_generators(V2, gens)
    std = HermLattice.standard(V2)
    assert L == std
    # membership both ways confirms equal spans
    for j in range(3):
        col = [std.rows[i][j] for i in range(3)]
        assert L.contains(col, std.scale)


@pytest.mark.parametrize("space", [V2, V3, W2])
def test_random_unimodular_recombination(space):
    rng = random.Random(7)
    std = HermLattice.standard(space)
    for _ in range(100):
        U = random_unimodular(space, rng)
        L = std.apply_matrix(U, 0)
        assert L == std


def test_canonicalization_idempotent():
    rng = random.Random(5)
    for _ in range(20):
        L = random_hyperspecial(V2, rng, steps=2)
        cols = [([L.rows[i][j] for i in range(3)], L.scale) for j in range(3)]
        assert HermLattice.from_generators(V2, cols) == L


def test_rank_deficient_rejected():
    gens = [([(1, 0), (0, 0), (0, 0)], 0), ([(2, 0), (0, 0), (0, 0)], 0), ([(3, 0), (0, 0), (0, 0)], 0)]
    with pytest.raises(RankDeficient):
        HermLattice.from_generators(V2, gens)


def test_precision_exhausted_from_field_matrix():
    f = LocalField(2, 3)
    sp = HermSpace(f, 2)
    m = f.modulus
    mat = [[f.from_int(1), f.zero()], [f.zero(), f.from_int(m)]]  # second pivot ~ p^N
    with pytest.raises((PrecisionExhausted, RankDeficient)):
        HermLattice.from_field_matrix(sp, mat)


def test_equality_iff_same_encoding():
    rng = random.Random(11)
    for _ in range(20):
        L = random_hyperspecial(V2, rng, steps=2)
        M = random_hyperspecial(V2, rng, steps=2)
        cols_subset = all(
            M.contains([L.rows[i][j] for i in range(3)], L.scale) for j in range(3)
        ) and all(L.contains([M.rows[i][j] for i in range(3)], M.scale) for j in range(3))
        assert (L == M) == cols_subset


def test_debug_dump_is_stable():
    L = apartment_lattice(V2, 2)
    assert L.debug_dump() == apartment_lattice(V2, 2).debug_dump()
    assert "scale=" in L.debug_dump()


# --- duals and classification ---------------------------------------------


def test_standard_lattices_self_dual():
    for sp in (V2, V3, W2, W3):
        L = HermLattice.standard(sp)
        assert L.dual() == L
        assert L.is_hyperspecial()
        assert L.classify() == "hyperspecial"


def test_dual_of_scaled():
    L = HermLattice.standard(V2)
    assert L.rescale(1).dual() == L.rescale(-1)
    assert L.rescale(1).classify() == "neither"


@pytest.mark.parametrize("space", [V2, W2])
def test_dual_is_involution(space):
    rng = random.Random(3)
    for _ in range(100):
        L = random_hyperspecial(space, rng, steps=rng.randrange(1, 4))
        M = L.rescale(rng.randrange(-1, 2))
        assert M.dual().dual() == M


def test_dual_reverses_inclusion():
    L = HermLattice.standard(V2)
    M = L.rescale(1)  # pL < L
    assert M.sublattice_of(L)
    assert L.dual().sublattice_of(M.dual())


def test_special_sublattice_is_special():
    L = HermLattice.standard(V2)
    lines = isotropic_residue_lines(L)
    assert len(lines) == 2 ** 3 + 1
    for line in lines[:3]:
        Lp = special_sublattice(L, line)
        assert Lp.classify() == "special"


def test_isotropic_line_counts():
    assert len(isotropic_residue_lines(HermLattice.standard(V3))) == 3 ** 3 + 1
    assert len(isotropic_residue_lines(HermLattice.standard(W2))) == 2 + 1
    assert len(isotropic_residue_lines(HermLattice.standard(W3))) == 3 + 1


# --- relative invariants and distance --------------------------------------


def test_invariants_of_equal_lattices():
    L = HermLattice.standard(V2)
    assert relative_invariants(L, L) == (0, 0, 0)


def test_invariants_of_delta_translate():
    L = HermLattice.standard(V2)
    M = apartment_lattice(V2, 1)
    assert relative_invariants(L, M) == (1, 0, -1)
    assert relative_invariants(L, apartment_lattice(V2, -3)) == (3, 0, -3)


def test_invariant_shape_on_random_self_dual_pairs():
    rng = random.Random(17)
    for _ in range(200):
        L = random_hyperspecial(W2, rng, steps=rng.randrange(0, 4))
        M = random_hyperspecial(W2, rng, steps=rng.randrange(0, 4))
        a, b = relative_invariants(L, M)
        assert a == -b and a >= 0


def test_distance_on_apartment():
    for m in range(-3, 4):
        assert distance(HermLattice.standard(V2), apartment_lattice(V2, m)) == abs(m)
    assert distance(apartment_lattice(V2, 2), apartment_lattice(V2, 5)) == 3


def test_distance_symmetry():
    rng = random.Random(23)
    for _ in range(200):
        L = random_hyperspecial(W2, rng, steps=rng.randrange(0, 3))
        M = random_hyperspecial(W2, rng, steps=rng.randrange(0, 3))
        assert distance(L, M) == distance(M, L)


def test_distance_requires_self_dual():
    L = HermLattice.standard(V2)
    with pytest.raises(NotHyperspecial):
        distance(L, L.rescale(1))


def bfs_distances(origin, radius):
    dist = {origin.key(): 0}
    frontier = [origin]
    store = {origin.key(): origin}
    for d in range(radius):
        nxt = []
        for L in frontier:
            for M in hyperspecial_neighbors(L):
                if M.key() not in dist:
                    dist[M.key()] = d + 1
                    store[M.key()] = M
                    nxt.append(M)
        frontier = nxt
    return dist, store


def test_distance_agrees_with_bfs_radius2():
    origin = HermLattice.standard(V2)
    dist, store = bfs_distances(origin, 2)
    keys = list(store)
    for k in keys:
        assert distance(origin, store[k]) == dist[k]
    # all pairs within radius 2 against BFS through the graph is covered by
    # symmetry + the triangle structure; spot-check random pairs exactly
    rng = random.Random(9)
    sample = rng.sample(keys, 40)
    for a in sample:
        da, _ = bfs_distances(store[a], 2)
        for b in rng.sample(keys, 10):
            if b in da:
                assert distance(store[a], store[b]) == da[b]


# --- neighbors --------------------------------------------------------------


def test_neighbor_counts_dim3_q2():
    nbrs = hyperspecial_neighbors(HermLattice.standard(V2))
    assert len(nbrs) == 2 * (2 ** 3 + 1) == 18
    assert all(M.is_hyperspecial() for M in nbrs)
    assert all(distance(HermLattice.standard(V2), M) == 1 for M in nbrs)


def test_neighbor_counts_dim2():
    assert len(hyperspecial_neighbors(HermLattice.standard(W2))) == 6
    assert len(hyperspecial_neighbors(HermLattice.standard(W3))) == 12


def test_neighbor_counts_dim3_q3():
    nbrs = hyperspecial_neighbors(HermLattice.standard(V3))
    assert len(nbrs) == 3 * (3 ** 3 + 1) == 84


def test_delta_translate_is_neighbor():
    L = HermLattice.standard(V2)
    nbrs = {M.key() for M in hyperspecial_neighbors(L)}
    assert apartment_lattice(V2, 1).key() in nbrs


def test_neighbor_relation_symmetric():
    L = HermLattice.standard(V2)
    for M in hyperspecial_neighbors(L):
        back = {X.key() for X in hyperspecial_neighbors(M)}
        assert L.key() in back


@pytest.mark.parametrize("space", [V2, W2, W3])
def test_brute_force_agrees_at_origin(space):
    L = HermLattice.standard(space)
    a = {M.key() for M in hyperspecial_neighbors(L)}
    b = {M.key() for M in brute_force_neighbors(L)}
    assert a == b


def test_brute_force_agrees_off_origin():
    rng = random.Random(31)
    for _ in range(3):
        L = random_hyperspecial(V2, rng, steps=2)
        a = {M.key() for M in hyperspecial_neighbors(L)}
        b = {M.key() for M in brute_force_neighbors(L)}
        assert a == b


# --- embedding --------------------------------------------------------------


def test_embed_standard():
    assert embed_W_lattice(HermLattice.standard(W2), V2) == HermLattice.standard(V2)


def test_embed_apartment():
    for m in range(-3, 4):
        got = embed_W_lattice(apartment_lattice(W2, m), V2)
        assert got == apartment_lattice(V2, m)


def test_embed_preserves_distances():
    rng = random.Random(41)
    pts = [random_hyperspecial(W2, rng, steps=rng.randrange(0, 4)) for _ in range(12)]
    for A in pts:
        for B in pts:
            assert distance(A, B) == distance(embed_W_lattice(A, V2), embed_W_lattice(B, V2))
