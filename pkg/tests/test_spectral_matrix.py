"""Tensor-space matrix algebra: embeddings, partial traces, r-matrix."""

import random

import pytest

from bilax.phase_ring import Fraction, StructureError
from bilax.spectral_matrix import (
    commutator,
    det_2x2,
    embed_a,
    embed_b,
    identity,
    inverse_2x2,
    kron,
    lam,
    matrix,
    mu,
    partial_trace_a,
    permutation,
    rational_r,
    swap_legs,
    tensor_bracket,
)
from bilax.toda_models import build_bcn


@pytest.fixture(scope="module")
def model():
    return build_bcn(2)


def rand_matrix(ring, rng, dim=2):
    return matrix(
        ring,
        [[ring.const(rng.randint(-4, 4)) for _ in range(dim)] for _ in range(dim)],
    )


# ---------------------------------------------------------------------------
# embeddings and tensor products


def test_embed_identity(model):
    ring = model.ring
    assert embed_a(identity(ring, 2)) == identity(ring, 4)
    assert embed_b(identity(ring, 2)) == identity(ring, 4)


def test_embed_factors_commute(model):
    ring = model.ring
    rng = random.Random(2)
    m, n = rand_matrix(ring, rng), rand_matrix(ring, rng)
    assert embed_a(m) @ embed_b(n) == embed_b(n) @ embed_a(m)
    assert embed_a(m) @ embed_b(n) == kron(m, n)


def test_embed_entries_kronecker_oracle(model):
    # embed_a(E_12) against the explicit Kronecker product layout
    ring = model.ring
    e12 = matrix(ring, [[ring.zero, ring.one], [ring.zero, ring.zero]])
    m4 = embed_a(e12)
    for i in range(2):
        for k in range(2):
            for j in range(2):
                for l in range(2):
                    want = e12.rows[i][j] * (ring.one if k == l else ring.zero)
                    assert m4.rows[2 * i + k][2 * j + l] == want


def test_embed_requires_2x2(model):
    with pytest.raises(StructureError):
        embed_a(identity(model.ring, 4))


# ---------------------------------------------------------------------------
# permutation and partial trace


def test_permutation_squares_to_identity(model):
    p = permutation(model.ring)
    assert p @ p == identity(model.ring, 4)


def test_permutation_swaps_factors(model):
    rng = random.Random(5)
    for _ in range(5):
        m, n = rand_matrix(model.ring, rng), rand_matrix(model.ring, rng)
        p = permutation(model.ring)
        assert p @ kron(m, n) @ p == kron(n, m)


def test_partial_trace_identity(model):
    ring = model.ring
    assert partial_trace_a(identity(ring, 4)) == identity(ring, 2) * ring.const(2)


def test_partial_trace_factorized(model):
    rng = random.Random(9)
    m, n = rand_matrix(model.ring, rng), rand_matrix(model.ring, rng)
    assert partial_trace_a(kron(m, n)) == n * m.trace()


def test_partial_trace_permutation(model):
    # direct sum over P entries: (tr_a P)_{kl} = sum_i P_{(i,k),(i,l)} = delta_{kl}
    ring = model.ring
    p = permutation(ring)
    direct = [
        [
            sum(
                (p.rows[2 * i + k][2 * i + l].num.constant_value())
                for i in range(2)
            )
            for l in range(2)
        ]
        for k in range(2)
    ]
    assert direct == [[1, 0], [0, 1]]
    assert partial_trace_a(p) == identity(ring, 2)


def test_partial_trace_pullout(model):
    # tr_a(A_ab B_b C_a) = B tr_a(A_ab C_a) and the left-multiplied variant
    ring = model.ring
    rng = random.Random(13)
    for _ in range(5):
        a4 = rand_matrix(ring, rng, dim=4)
        b, c = rand_matrix(ring, rng), rand_matrix(ring, rng)
        lhs = partial_trace_a(a4 @ embed_b(b) @ embed_a(c))
        rhs = partial_trace_a(a4 @ embed_a(c)) @ b
        assert lhs == rhs
        lhs2 = partial_trace_a(embed_b(b) @ a4 @ embed_a(c))
        assert lhs2 == b @ partial_trace_a(a4 @ embed_a(c))


def test_partial_trace_requires_4x4(model):
    with pytest.raises(StructureError):
        partial_trace_a(identity(model.ring, 2))


# ---------------------------------------------------------------------------
# rational r-matrix


def test_rational_r_is_permutation_over_pole(model):
    ring = model.ring
    arg = lam(ring) - mu(ring)
    r = rational_r(ring, arg)
    assert r * Fraction(arg) == permutation(ring)


def test_rational_r_skew_symmetry(model):
    ring = model.ring
    arg = lam(ring) - mu(ring)
    assert (rational_r(ring, arg) + swap_legs(rational_r(ring, -arg))).is_zero


def test_scalar_associativity_cross_multiplied(model):
    ring = model.ring
    a = Fraction(ring.gen("X1"), lam(ring) - mu(ring))
    b = Fraction(ring.gen("u1"), lam(ring) + mu(ring))
    c = Fraction(ring.one, lam(ring))
    assert (a * b) * c == a * (b * c)


# ---------------------------------------------------------------------------
# tensor brackets


def test_tensor_bracket_distinct_sites_vanish(model):
    ring, ps = model.ring, model.ps
    lax = model.lax
    tb = tensor_bracket(ps, lax(1, lam(ring)), lax(2, mu(ring)))
    assert tb.is_zero


def test_tensor_bracket_k_lax_locality(dn2):
    ring, ps = dn2.ring, dn2.ps
    tb = tensor_bracket(ps, dn2.km(lam(ring)), dn2.lax(1, mu(ring)))
    assert tb.is_zero


def test_tensor_bracket_onsite_component(model):
    # ((1,1),(1,2)) component is {lam + X_j, -e^{x_j}} = -u_j
    ring, ps = model.ring, model.ps
    tb = tensor_bracket(ps, model.lax(1, lam(ring)), model.lax(1, mu(ring)))
    direct = ps.bracket(lam(ring) + ring.gen("X1"), -ring.gen("u1"))
    assert direct == -ring.gen("u1")
    assert tb.rows[0][1] == Fraction(direct)


def test_tensor_bracket_antisymmetry(model):
    # swapping arguments, spectral variables and legs negates the bracket
    ring, ps = model.ring, model.ps
    a = model.lax(1, lam(ring))
    b_swapped = model.lax(1, lam(ring))  # B evaluated at lam after the swap
    tb = tensor_bracket(ps, a, model.lax(1, mu(ring)))
    tb_swapped = tensor_bracket(ps, model.lax(1, mu(ring)), a)
    assert tb == -swap_legs(tb_swapped)
    assert b_swapped == a


# ---------------------------------------------------------------------------
# inverse


def test_toda_lax_unit_determinant(model):
    # (lam + X)*0 + e^{x} e^{-x} = 1 by direct expansion
    ring = model.ring
    l1 = model.lax(1, lam(ring))
    assert det_2x2(l1) == Fraction(ring.one)


def test_inverse_adjugate_oracle(model):
    # inverse of l(j, -lam) equals [[0, u],[-1/u, X - lam]] for det = 1
    ring = model.ring
    u1, x1 = ring.gen("u1"), ring.gen("X1")
    li = inverse_2x2(model.lax(1, -lam(ring)))
    want = matrix(
        ring, [[ring.zero, u1], [-(u1 ** -1), x1 - lam(ring)]]
    )
    assert li == want


def test_inverse_identity(model):
    assert inverse_2x2(identity(model.ring, 2)) == identity(model.ring, 2)


def test_inverse_product_cross_multiplied(model):
    ring = model.ring
    m = matrix(ring, [[lam(ring) + 1, ring.gen("u1")], [ring.one, lam(ring)]])
    assert m @ inverse_2x2(m) == identity(ring, 2)


def test_inverse_rejects_singular(model):
    ring = model.ring
    m = matrix(ring, [[ring.one, ring.one], [ring.one, ring.one]])
    with pytest.raises(StructureError):
        inverse_2x2(m)


def test_commutator_helper(model):
    ring = model.ring
    rng = random.Random(21)
    a, b = rand_matrix(ring, rng), rand_matrix(ring, rng)
    assert commutator(a, b) == a @ b - b @ a
