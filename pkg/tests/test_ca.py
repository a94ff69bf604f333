"""Rule normalization, evaluation, composition, window maps, equivariance."""

import itertools
import random

import numpy as np
import pytest

from conftest import random_finite_support, random_integer_ca
from linca import (
    BallSequence,
    IntegerGroup,
    LatticeGroup,
    LinearCA,
    Pattern,
    compose,
    config_equal,
    constant,
    equals_identity,
    equivariance_check,
    finite_support,
    identity_ca,
    periodic,
)
from linca.ca import CAError, pattern_to_vec, vec_to_pattern

Z = IntegerGroup()
NILPOTENT = np.array([[0, 1], [0, 0]], dtype=np.int64)


def shift_ca(p=2, dim_v=1):
    """tau(x)(n) = x(n+1)."""
    return LinearCA(Z, p, dim_v, (1,), (np.eye(dim_v, dtype=np.int64),))


def sigma2_block_ca(p=2):
    """tau(x)(n) = x(n) - N x(n+1) with N the 2x2 nilpotent block."""
    return LinearCA(Z, p, 2, (0, 1), (np.eye(2, dtype=np.int64), (-NILPOTENT) % p))


# -- normalization -------------------------------------------------------------


def test_normalize_pads_identity():
    ca = shift_ca()
    assert ca.memory == (0, 1)
    assert ca.blocks[0].tolist() == [[0]]
    assert ca.blocks[1].tolist() == [[1]]


def test_normalize_prunes_zero_blocks():
    ca = LinearCA(Z, 2, 1, (0, 1), ([[1]], [[0]]))
    assert ca.memory == (0,)
    assert equals_identity(ca)


def test_normalize_idempotent():
    ca = sigma2_block_ca()
    again = LinearCA(Z, 2, 2, ca.memory, ca.blocks)
    assert ca == again


def test_duplicate_memory_rejected():
    with pytest.raises(CAError):
        LinearCA(Z, 2, 1, (1, 1), ([[1]], [[1]]))


# -- pattern evaluation ----------------------------------------------------------


def test_apply_pattern_shift_reindexes():
    ca = shift_ca()
    pattern = Pattern({0: np.array([1]), 1: np.array([0]), 2: np.array([1])})
    out = ca.apply_pattern(pattern)
    assert set(out.cells) == {-1, 0, 1}
    assert [out.cells[g].tolist() for g in (-1, 0, 1)] == [[1], [0], [1]]


def test_apply_pattern_identity_restricts():
    ca = identity_ca(Z, 3, 2)
    pattern = Pattern({g: np.array([g % 3, 1]) for g in range(4)})
    out = ca.apply_pattern(pattern)
    assert out == pattern


def test_apply_pattern_nilpotent_block_example():
    ca = sigma2_block_ca()
    pattern = Pattern({0: np.array([0, 1]), 1: np.array([0, 1])})
    out = ca.apply_pattern(pattern)
    # out(0) = x(0) + N x(1) = (0,1) + (1,0) = (1,1) over GF(2).
    assert set(out.cells) == {0}
    assert out.cells[0].tolist() == [1, 1]


def test_apply_empty_pattern():
    ca = shift_ca()
    assert ca.apply_pattern(Pattern({})) == Pattern({})


def test_pattern_linearity_randomized():
    rng = random.Random(31)
    for _ in range(15):
        p = rng.choice((2, 3))
        ca = random_integer_ca(rng, p, 2)
        window = list(range(-3, 4))
        x = Pattern({g: np.array([rng.randrange(p), rng.randrange(p)]) for g in window})
        y = Pattern({g: np.array([rng.randrange(p), rng.randrange(p)]) for g in window})
        lam = rng.randrange(p)
        combo = Pattern({g: (x.cells[g] + lam * y.cells[g]) % p for g in window})
        lhs = ca.apply_pattern(combo)
        fx, fy = ca.apply_pattern(x), ca.apply_pattern(y)
        for g in lhs.cells:
            assert np.array_equal(lhs.cells[g], (fx.cells[g] + lam * fy.cells[g]) % p)


def test_pattern_locality():
    """Values outside g*M never influence the output at g."""
    rng = random.Random(37)
    ca = random_integer_ca(rng, 3, 2)
    window = list(range(-3, 4))
    x = Pattern({g: np.array([rng.randrange(3), rng.randrange(3)]) for g in window})
    base = ca.apply_pattern(x)
    for g in base.cells:
        needed = {g + m for m in ca.memory}
        tampered = Pattern(
            {
                h: v if h in needed else np.array([rng.randrange(3), rng.randrange(3)])
                for h, v in x.cells.items()
            }
        )
        out = ca.apply_pattern(tampered)
        assert np.array_equal(out.cells[g], base.cells[g])


# -- configuration evaluation ------------------------------------------------------


def test_apply_config_zero():
    ca = sigma2_block_ca()
    out = ca.apply_config(finite_support(2, 2, {}))
    assert not out.cells


def test_apply_config_difference_rule_on_constant():
    # x(n+1) - x(n) sends constants to zero.
    ca = LinearCA(Z, 2, 1, (0, 1), ([[-1]], [[1]]))
    out = ca.apply_config(constant(2, 1, [1]))
    assert not np.any(out.value)


def test_apply_config_shift_periodic():
    ca = shift_ca()
    out = ca.apply_config(periodic(2, 1, [[1], [0]]))
    assert [v.tolist() for v in out.values] == [[0], [1]]


def test_apply_config_finite_support_shift():
    ca = shift_ca()
    out = ca.apply_config(finite_support(2, 1, {0: [1]}))
    assert set(out.cells) == {-1}


def test_periodic_requires_integers():
    ca = identity_ca(LatticeGroup(2), 2, 1)
    with pytest.raises(CAError):
        ca.apply_config(periodic(2, 1, [[1]]))


def test_compose_agreement_on_configs():
    rng = random.Random(41)
    for _ in range(10):
        p = rng.choice((2, 3))
        a = random_integer_ca(rng, p, 2)
        b = random_integer_ca(rng, p, 2)
        x = random_finite_support(rng, Z, p, 2, range(-2, 3))
        lhs = compose(b, a).apply_config(x)
        rhs = b.apply_config(a.apply_config(x))
        assert config_equal(Z, 2, lhs, rhs)


# -- composition and identity -------------------------------------------------------


def test_compose_shifts_add():
    ca = compose(shift_ca(), shift_ca())
    assert ca.memory == (0, 2)
    assert ca.blocks[1].tolist() == [[1]]


def test_compose_with_identity():
    ca = sigma2_block_ca()
    assert compose(ca, identity_ca(Z, 2, 2)) == ca
    assert compose(identity_ca(Z, 2, 2), ca) == ca


def test_nilpotent_inverse_composition():
    # nu = Id + N shift inverts tau = Id - N shift since N^2 = 0.
    tau = sigma2_block_ca()
    nu = LinearCA(Z, 2, 2, (0, 1), (np.eye(2, dtype=np.int64), NILPOTENT))
    assert equals_identity(compose(nu, tau))
    assert equals_identity(compose(tau, nu))


def test_equals_identity_examples():
    assert equals_identity(identity_ca(Z, 5, 3))
    assert not equals_identity(shift_ca())
    assert not equals_identity(LinearCA(Z, 2, 1, (0,), ([[0]],)))


# -- equivariance ---------------------------------------------------------------------


def test_equivariance_trivial_at_identity():
    ca = sigma2_block_ca()
    x = finite_support(2, 2, {0: [1, 1]})
    assert equivariance_check(ca, Z, 2, [(0, x)])


def test_equivariance_randomized():
    rng = random.Random(43)
    for _ in range(10):
        p = rng.choice((2, 3))
        ca = random_integer_ca(rng, p, 2)
        samples = []
        for _ in range(4):
            g = rng.randrange(-5, 6)
            samples.append((g, random_finite_support(rng, Z, p, 2, range(-2, 3))))
        samples.append((3, periodic(p, 2, [[1, 0], [0, 1]])))
        assert equivariance_check(ca, Z, 2, samples)


def test_equivariance_rejects_corrupted_map():
    # A map that inspects absolute position cannot commute with the shift.
    def crooked(config):
        return finite_support(
            2, 1, {g: v for g, v in config.cells.items() if g >= 0}
        )

    x = finite_support(2, 1, {-1: [1], 2: [1]})
    assert not equivariance_check(crooked, Z, 1, [(1, x)])


# -- window maps -------------------------------------------------------------------------


def test_window_map_identity_ca():
    ca = identity_ca(Z, 2, 1)
    w = ca.window_map(2)
    assert w.source == w.target == (-2, -1, 0, 1, 2)
    assert np.array_equal(w.matrix, np.eye(5, dtype=np.int64))


def test_window_map_shift_selects():
    ca = shift_ca()
    w = ca.window_map(1)  # A_1 = ball(2) since r0 = 1
    assert w.source == (-2, -1, 0, 1, 2)
    assert w.target == (-2, -1, 0, 1)
    vec = np.array([5 % 2, 1, 0, 1, 1], dtype=np.int64)
    out = (w.matrix @ vec) % 2
    assert out.tolist() == [1, 0, 1, 1]


def test_window_map_matches_pattern_evaluation_exhaustively():
    """All 2^6 GF(2) patterns on A_1 for the nilpotent-block rule."""
    ca = sigma2_block_ca()
    balls = BallSequence(Z, 1)
    w = ca.window_map(0, balls)
    assert w.source == (-1, 0, 1) and w.target == (-1, 0)
    assert w.matrix.shape == (4, 6)
    for bits in itertools.product((0, 1), repeat=6):
        vec = np.array(bits, dtype=np.int64)
        pattern = vec_to_pattern(vec, w.source, 2)
        direct = ca.apply_pattern(pattern)
        via_matrix = (w.matrix @ vec) % 2
        assert np.array_equal(
            pattern_to_vec(direct.restrict(w.target), w.target, 2, 2), via_matrix
        )


def test_window_map_ten_bit_exhaustive():
    """A random GF(2) two-coordinate rule checked on all 2^10 patterns."""
    rng = random.Random(49)
    ca = random_integer_ca(rng, 2, 2)
    balls = BallSequence(Z, 2)
    w = ca.window_map(0, balls)
    assert w.matrix.shape[1] == 10
    for bits in itertools.product((0, 1), repeat=10):
        vec = np.array(bits, dtype=np.int64)
        pattern = vec_to_pattern(vec, w.source, 2)
        direct = ca.apply_pattern(pattern).restrict(w.target)
        assert np.array_equal(
            pattern_to_vec(direct, w.target, 2, 2), (w.matrix @ vec) % 2
        )


def test_window_map_random_rules_match_pattern_evaluation():
    rng = random.Random(47)
    for _ in range(10):
        p = rng.choice((2, 3))
        ca = random_integer_ca(rng, p, rng.choice((1, 2)))
        w = ca.window_map(1)
        for _ in range(10):
            vec = np.array(
                [rng.randrange(p) for _ in range(w.matrix.shape[1])], dtype=np.int64
            )
            pattern = vec_to_pattern(vec, w.source, ca.dim_v)
            direct = ca.apply_pattern(pattern).restrict(w.target)
            assert np.array_equal(
                pattern_to_vec(direct, w.target, ca.dim_v, p),
                (w.matrix @ vec) % p,
            )


def test_window_map_on_lattice():
    lat = LatticeGroup(2)
    ca = LinearCA(
        lat, 2, 1, (((0, 0)), ((1, 0))), ([[1]], [[1]])
    )
    w = ca.window_map(0)
    assert all(isinstance(g, tuple) for g in w.source)
    assert set(w.target) == {
        g for g in w.source if tuple(np.add(g, (1, 0))) in set(w.source)
    }
