import random

import pytest

from nttmul import build_params
from nttmul.polymul import (
    Polynomial,
    bit_reverse_permute,
    naive_negacyclic_mul,
    negacyclic_mul_ntt,
    ntt_forward,
    ntt_inverse,
    pointwise_mul,
)

FIXED_M = 1_049_089


def rand_poly(rng, params, **tags):
    return Polynomial(tuple(rng.randrange(params.M) for _ in range(params.n)),
                      params.M, **tags)


def schoolbook_reference(a, b, N, M):
    # second, independently structured schoolbook: expand to 2N terms, then
    # fold the upper half back in with a sign flip
    full = [0] * (2 * N)
    for i in range(N):
        for j in range(N):
            full[i + j] += a[i] * b[j]
    return tuple((full[k] - full[k + N]) % M for k in range(N))


class TestPolynomialType:
    def test_accepts_lists_and_freezes(self):
        p = Polynomial([1, 2, 3, 4], 17)
        assert p.coeffs == (1, 2, 3, 4)
        assert p.domain == "coefficient" and p.order == "natural"

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            Polynomial((1, 2, 3), 17)
        with pytest.raises(ValueError):
            Polynomial((), 17)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Polynomial((0, 17, 0, 0), 17)
        with pytest.raises(ValueError):
            Polynomial((0, -1, 0, 0), 17)

    def test_rejects_unknown_tags(self):
        with pytest.raises(ValueError):
            Polynomial((1, 2), 17, domain="spectral")
        with pytest.raises(ValueError):
            Polynomial((1, 2), 17, order="shuffled")


class TestNaiveMul:
    def test_identity(self, p17_8):
        rng = random.Random(1)
        one = Polynomial((1,) + (0,) * 7, 17)
        b = rand_poly(rng, p17_8)
        assert naive_negacyclic_mul(one, b, p17_8).coeffs == b.coeffs

    def test_wraparound_sign(self, p17_8):
        # x**7 * x = x**8 = -1 in this ring
        xh = Polynomial((0,) * 7 + (1,), 17)
        x1 = Polynomial((0, 1) + (0,) * 6, 17)
        assert naive_negacyclic_mul(xh, x1, p17_8).coeffs == (16,) + (0,) * 7

    def test_against_independent_schoolbook(self, p17_8):
        rng = random.Random(0x5EED)
        for _ in range(300):
            a = rand_poly(rng, p17_8)
            b = rand_poly(rng, p17_8)
            want = schoolbook_reference(a.coeffs, b.coeffs, 8, 17)
            assert naive_negacyclic_mul(a, b, p17_8).coeffs == want

    def test_wide_modulus_path(self):
        # 3*2**30 + 1 pushes N*(M-1)**2 past the vectorised range
        M = 3221225473
        p = build_params(M, 8)
        rng = random.Random(2)
        for _ in range(20):
            a = rand_poly(rng, p)
            b = rand_poly(rng, p)
            want = schoolbook_reference(a.coeffs, b.coeffs, 8, M)
            assert naive_negacyclic_mul(a, b, p).coeffs == want

    def test_commutative(self, fixed_params):
        p = fixed_params[16]
        rng = random.Random(3)
        for _ in range(200):
            a = rand_poly(rng, p)
            b = rand_poly(rng, p)
            assert (naive_negacyclic_mul(a, b, p).coeffs
                    == naive_negacyclic_mul(b, a, p).coeffs)

    def test_distributes_over_addition(self, p17_8):
        rng = random.Random(4)
        M = 17
        for _ in range(200):
            a = rand_poly(rng, p17_8)
            b = rand_poly(rng, p17_8)
            c = rand_poly(rng, p17_8)
            bc = Polynomial(tuple((x + y) % M for x, y in
                                  zip(b.coeffs, c.coeffs)), M)
            lhs = naive_negacyclic_mul(a, bc, p17_8).coeffs
            ab = naive_negacyclic_mul(a, b, p17_8).coeffs
            ac = naive_negacyclic_mul(a, c, p17_8).coeffs
            assert lhs == tuple((x + y) % M for x, y in zip(ab, ac))

    def test_rejects_wrong_length(self, p17_8):
        a = Polynomial((1, 2, 3, 4), 17)
        with pytest.raises(ValueError):
            naive_negacyclic_mul(a, a, p17_8)

    def test_rejects_evaluation_domain(self, p17_8):
        rng = random.Random(5)
        a = rand_poly(rng, p17_8)
        spec = Polynomial(a.coeffs, 17, "evaluation")
        with pytest.raises(ValueError):
            naive_negacyclic_mul(spec, a, p17_8)


class TestForwardTransform:
    def test_impulse_gives_constant_spectrum(self, p17_8):
        a = Polynomial((5,) + (0,) * 7, 17)
        out = ntt_forward(a, p17_8)
        assert out.coeffs == (5,) * 8
        assert out.domain == "evaluation"

    def test_all_ones_collapses(self, p17_8):
        a = Polynomial((1,) * 8, 17)
        assert ntt_forward(a, p17_8).coeffs == (8,) + (0,) * 7

    def test_against_matrix_oracle(self, p17_8, fixed_params):
        for p, seed in ((p17_8, 6), (fixed_params[16], 7)):
            N, M, w = p.n, p.M, p.omega
            rng = random.Random(seed)
            for _ in range(100):
                a = rand_poly(rng, p)
                want = tuple(
                    sum(a.coeffs[j] * pow(w, i * j, M) for j in range(N)) % M
                    for i in range(N))
                assert ntt_forward(a, p).coeffs == want

    def test_linearity(self, fixed_params):
        p = fixed_params[16]
        M = p.M
        rng = random.Random(8)
        for _ in range(100):
            a = rand_poly(rng, p)
            b = rand_poly(rng, p)
            alpha = rng.randrange(M)
            beta = rng.randrange(M)
            mix = Polynomial(tuple((alpha * x + beta * y) % M for x, y in
                                   zip(a.coeffs, b.coeffs)), M)
            fa = ntt_forward(a, p).coeffs
            fb = ntt_forward(b, p).coeffs
            want = tuple((alpha * x + beta * y) % M for x, y in zip(fa, fb))
            assert ntt_forward(mix, p).coeffs == want


class TestInverseTransform:
    def test_round_trip_impulse(self, p17_8):
        a = Polynomial((0, 3) + (0,) * 6, 17)
        assert ntt_inverse(ntt_forward(a, p17_8), p17_8).coeffs == a.coeffs

    def test_collapsed_spectrum_inverts_to_ones(self, p17_8):
        spec = Polynomial((8,) + (0,) * 7, 17, "evaluation")
        assert ntt_inverse(spec, p17_8).coeffs == (1,) * 8

    def test_round_trip_random(self, p17_4, p17_8, fixed_params):
        for p, seed in ((p17_4, 9), (p17_8, 10), (fixed_params[16], 11)):
            rng = random.Random(seed)
            for _ in range(300):
                a = rand_poly(rng, p)
                back = ntt_inverse(ntt_forward(a, p), p)
                assert back.coeffs == a.coeffs
                assert back.domain == "coefficient"

    def test_rejects_coefficient_domain(self, p17_8):
        a = Polynomial((1,) * 8, 17)
        with pytest.raises(ValueError):
            ntt_inverse(a, p17_8)


class TestPointwise:
    def test_ones_is_identity(self, p17_8):
        rng = random.Random(12)
        a = rand_poly(rng, p17_8, domain="evaluation")
        ones = Polynomial((1,) * 8, 17, "evaluation")
        assert pointwise_mul(a, ones, p17_8).coeffs == a.coeffs

    def test_zero_propagates(self, p17_8):
        a = Polynomial((0, 5, 6, 7, 8, 9, 10, 11), 17, "evaluation")
        b = Polynomial((3,) * 8, 17, "evaluation")
        assert pointwise_mul(a, b, p17_8).coeffs[0] == 0

    def test_elementwise_oracle(self, fixed_params):
        p = fixed_params[32]
        rng = random.Random(13)
        for _ in range(100):
            a = rand_poly(rng, p, domain="evaluation")
            b = rand_poly(rng, p, domain="evaluation")
            want = tuple(x * y % p.M for x, y in zip(a.coeffs, b.coeffs))
            assert pointwise_mul(a, b, p).coeffs == want

    def test_order_tag_mismatch_rejected(self, p17_8):
        rng = random.Random(14)
        a = rand_poly(rng, p17_8, domain="evaluation")
        b = rand_poly(rng, p17_8, domain="evaluation", order="permuted")
        with pytest.raises(ValueError):
            pointwise_mul(a, b, p17_8)

    def test_coefficient_domain_rejected(self, p17_8):
        rng = random.Random(15)
        a = rand_poly(rng, p17_8)
        b = rand_poly(rng, p17_8, domain="evaluation")
        with pytest.raises(ValueError):
            pointwise_mul(a, b, p17_8)


class TestBitReversePermute:
    def test_length_two_is_identity(self):
        p = Polynomial((5, 9), 17)
        assert bit_reverse_permute(p).coeffs == (5, 9)

    def test_length_eight_mapping(self):
        p = Polynomial(tuple(range(8)), 17)
        out = bit_reverse_permute(p)
        assert out.coeffs[4] == 1   # index 1 lands at its bit reversal
        assert out.coeffs[6] == 3
        assert out.coeffs == (0, 4, 2, 6, 1, 5, 3, 7)

    def test_involution_and_tag_toggle(self, fixed_params):
        p = fixed_params[64]
        rng = random.Random(16)
        a = rand_poly(rng, p)
        once = bit_reverse_permute(a)
        assert once.order == "permuted"
        twice = bit_reverse_permute(once)
        assert twice.order == "natural"
        assert twice.coeffs == a.coeffs


class TestFiveStepMul:
    def test_identity(self, p17_8):
        rng = random.Random(17)
        one = Polynomial((1,) + (0,) * 7, 17)
        b = rand_poly(rng, p17_8)
        assert negacyclic_mul_ntt(one, b, p17_8).coeffs == b.coeffs

    def test_wraparound_sign(self, p17_8):
        xh = Polynomial((0,) * 7 + (1,), 17)
        x1 = Polynomial((0, 1) + (0,) * 6, 17)
        assert negacyclic_mul_ntt(xh, x1, p17_8).coeffs == (16,) + (0,) * 7

    def test_matches_oracle_small_grid(self, p17_4):
        # every combination of {0, 1, M-1} in all four positions, both sides
        vals = (0, 1, 16)
        polys = [Polynomial((w, x, y, z), 17)
                 for w in vals for x in vals for y in vals for z in vals]
        for a in polys[:20]:
            for b in polys:
                assert (negacyclic_mul_ntt(a, b, p17_4).coeffs
                        == naive_negacyclic_mul(a, b, p17_4).coeffs)

    def test_matches_oracle_random(self, p17_8, fixed_params):
        for p, seed in ((p17_8, 18), (fixed_params[32], 19),
                        (fixed_params[256], 20)):
            rng = random.Random(seed)
            for _ in range(100):
                a = rand_poly(rng, p)
                b = rand_poly(rng, p)
                assert (negacyclic_mul_ntt(a, b, p).coeffs
                        == naive_negacyclic_mul(a, b, p).coeffs)

    def test_result_tags(self, p17_8):
        rng = random.Random(21)
        a = rand_poly(rng, p17_8)
        b = rand_poly(rng, p17_8)
        c = negacyclic_mul_ntt(a, b, p17_8)
        assert c.domain == "coefficient" and c.order == "natural"
