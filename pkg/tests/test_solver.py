"""Inverse synthesis, witness searches, universal chains and extraction."""

import random

import numpy as np

from conftest import random_finite_support, random_integer_ca
from linca import (
    AffineSubspace,
    IntegerGroup,
    LatticeGroup,
    LinearCA,
    NotInvertible,
    PeriodicConfig,
    ReversibilityCertificate,
    SolverUnknown,
    WindowSystem,
    config_equal,
    finite_support,
    identity_ca,
    induce,
    invert_ca,
    kernel_sequence,
    kernel_witness,
    lift_element,
    periodic,
    preimage_extract,
    preimage_sequence,
    restrict,
    subgroup_generated,
    surjectivity_counterexample,
    universal_spaces,
)
from linca.ca import pattern_to_vec
from linca.solver import KernelWitness, ProjectiveAffineSequence
from linca import gallery

Z = IntegerGroup()
NILPOTENT = np.array([[0, 1], [0, 0]], dtype=np.int64)


def shift_ca(p=2):
    return LinearCA(Z, p, 1, (1,), ([[1]],))


def add_rule(p=2):
    """tau(x)(n) = x(n) + x(n+1)."""
    return LinearCA(Z, p, 1, (0, 1), ([[1]], [[1]]))


def sigma2_block_ca(p=2):
    return LinearCA(Z, p, 2, (0, 1), (np.eye(2, dtype=np.int64), (-NILPOTENT) % p))


def constant_full_sequence(p=2, ambient=2, levels=10):
    """X_n = the full space with identity bonding maps."""
    return ProjectiveAffineSequence(
        p,
        lambda n: ambient,
        lambda n: AffineSubspace.full(ambient, p),
        lambda n, m: np.eye(ambient, dtype=np.int64),
    )


# -- projective sequences and chains ------------------------------------------


def test_projective_axioms_on_window_sequences():
    ws = WindowSystem(add_rule())
    seq = preimage_sequence(ws, finite_support(2, 1, {0: [1]}))
    assert seq.verify_axioms([(0, 0, 0), (0, 1, 2), (1, 2, 4), (0, 2, 3)])


def test_universal_chain_constant_sequence_plateaus_immediately():
    seq = constant_full_sequence()
    chain = universal_spaces(seq, 3, 10)
    assert chain.plateau == 3
    assert chain.stabilized == AffineSubspace.full(2, 2)
    assert chain.nonincreasing()


def test_kernel_chain_of_add_rule_keeps_constants():
    """Window kernels of x(n)+x(n+1) are the constants; restricted to the
    radius-0 window they fill the whole one-dimensional space."""
    seq = kernel_sequence(add_rule())
    chain = universal_spaces(seq, 0, 8)
    assert chain.plateau is not None
    stab = chain.stabilized
    assert stab.ambient == 1 and stab.dim == 1
    for m in range(9):
        level = seq.level(m)
        # Kernel of each window map is exactly the constants.
        assert level.dim == 1
        member = level.point + level.directions.basis[0]
        assert len(set((member % 2).tolist())) == 1


def test_kernel_chain_of_reversible_rule_dies():
    seq = kernel_sequence(sigma2_block_ca())
    chain = universal_spaces(seq, 0, 6)
    assert chain.plateau is not None
    assert chain.stabilized.dim == 0
    assert chain.stabilized.contains(np.zeros(2, dtype=np.int64))
    assert chain.nonincreasing()
    dims = chain.dims()
    assert dims == sorted(dims, reverse=True)


def test_lift_element_identity_bonds():
    seq = constant_full_sequence()
    x = np.array([1, 0], dtype=np.int64)
    assert np.array_equal(lift_element(seq, 0, x, 8), x)


def test_lift_element_shift_preimage_chain():
    ws = WindowSystem(shift_ca())
    seq = preimage_sequence(ws, finite_support(2, 1, {0: [1]}))
    chain0 = universal_spaces(seq, 0, 10)
    x0 = chain0.stabilized.point
    x1 = lift_element(seq, 0, x0, 10)
    assert np.array_equal((seq.bond(0, 1) @ x1) % 2, x0)


def test_lift_element_sigma2_preimage_chain():
    target = finite_support(2, 2, {0: [1, 1]})
    ws = WindowSystem(sigma2_block_ca())
    seq = preimage_sequence(ws, target)
    chain0 = universal_spaces(seq, 0, 10)
    x0 = chain0.stabilized.point
    x1 = lift_element(seq, 0, x0, 10)
    assert x1.shape[0] == seq.ambient(1)


def test_extraction_single_point_chain():
    ca = identity_ca(Z, 2, 1)
    target = finite_support(2, 1, {0: [1]})
    result = preimage_extract(ca, target, window_index=3, cutoff=8)
    assert result.status == "ok"
    assert result.pattern.cells[0].tolist() == [1]
    assert all(
        not np.any(v) for g, v in result.pattern.cells.items() if g != 0
    )


def test_extraction_shift_delta():
    res = preimage_extract(shift_ca(), finite_support(2, 1, {0: [1]}), 4, 10)
    assert res.status == "ok"
    # tau(x)(n) = x(n+1) pulls the impulse back to cell 1.
    for g, v in res.pattern.cells.items():
        assert v.tolist() == ([1] if g == 1 else [0])
    assert res.extraction.chains_nonincreasing()
    assert all(res.extraction.lift_checks)


def test_extraction_add_rule_step_configuration():
    """The impulse target for x(n)+x(n+1) has no finitely supported
    preimage; extraction still produces a window prefix, one of the two
    step configurations (the canonical coset representative)."""
    res = preimage_extract(add_rule(), finite_support(2, 1, {0: [1]}), 5, 12)
    assert res.status == "ok"
    cells = res.pattern.cells
    window = sorted(cells)
    values = [int(cells[g][0]) for g in window]
    step_up = [1 if g >= 1 else 0 for g in window]
    step_down = [1 if g <= 0 else 0 for g in window]
    assert values in (step_up, step_down)
    # Canonical tie-break picks the lexicographically smallest member.
    assert values == step_up
    # The image matches the target on the matched window.
    ws = WindowSystem(add_rule())
    w = ws.window(5)
    vec = pattern_to_vec(res.pattern, w.source, 1, 2)
    assert np.array_equal((w.matrix @ vec) % 2, ws.target_vec(finite_support(2, 1, {0: [1]}), 5))


def test_extraction_not_in_image_reports_empty_level():
    proj = LinearCA(Z, 2, 2, (0,), (np.diag([1, 0]),))
    target = finite_support(2, 2, {0: [0, 1]})
    res = preimage_extract(proj, target, 3, 8)
    assert res.status == "not-in-image"
    assert res.witness is not None and res.witness.verify()


def test_extraction_periodic_and_constant_targets():
    ca = add_rule(3)
    res = preimage_extract(ca, periodic(3, 1, [[2], [1]]), 3, 10)
    assert res.status == "ok"
    res2 = preimage_extract(ca, periodic(3, 1, [[0]]), 3, 10)
    assert res2.status == "ok"


# -- inverse synthesis -----------------------------------------------------------


def test_invert_shift():
    result = invert_ca(shift_ca(), 4)
    assert isinstance(result, ReversibilityCertificate)
    assert result.radius == 1
    assert result.inverse.support_memory == (-1,)
    assert result.verify()


def test_invert_sigma2_block():
    result = invert_ca(sigma2_block_ca(), 4)
    assert isinstance(result, ReversibilityCertificate)
    expected = LinearCA(Z, 2, 2, (0, 1), (np.eye(2, dtype=np.int64), NILPOTENT))
    assert result.inverse == expected
    assert result.verify()


def test_invert_add_rule_returns_kernel_witness():
    result = invert_ca(add_rule(), 4)
    assert isinstance(result, NotInvertible)
    witness = result.witness
    assert isinstance(witness, KernelWitness)
    assert isinstance(witness.config, PeriodicConfig)
    assert witness.config.values[0].tolist() == [1]
    assert witness.verify()


def test_invert_identity_and_zero():
    assert isinstance(invert_ca(identity_ca(Z, 3, 2), 2), ReversibilityCertificate)
    zero = LinearCA(Z, 2, 1, (0,), ([[0]],))
    res = invert_ca(zero, 2)
    assert isinstance(res, NotInvertible)


def test_invert_unknown_at_small_cutoff():
    deep = gallery.sigma_truncated_ca(4, 2)  # inverse needs memory {0..3}
    res = invert_ca(deep, 1)
    assert isinstance(res, SolverUnknown)
    res_full = invert_ca(deep, 4)
    assert isinstance(res_full, ReversibilityCertificate)


def test_invert_on_lattice_group():
    lat = LatticeGroup(2)
    n = NILPOTENT
    ca = LinearCA(lat, 2, 2, ((0, 0), (1, 0)), (np.eye(2, dtype=np.int64), n))
    res = invert_ca(ca, 3)
    assert isinstance(res, ReversibilityCertificate)
    assert res.inverse.support_memory == ((0, 0), (1, 0))


def test_invert_and_preimage_on_free_group():
    from linca import FreeGroup

    f = FreeGroup(2)
    ca = LinearCA(f, 2, 1, ((1,),), ([[1]],))  # tau(x)(g) = x(g a)
    res = invert_ca(ca, 2)
    assert isinstance(res, ReversibilityCertificate)
    assert res.inverse.support_memory == ((-1,),)
    target = finite_support(2, 1, {(): [1]})
    pre = preimage_extract(ca, target, window_index=2, cutoff=5)
    assert pre.status == "ok"
    live = {g for g, v in pre.pattern.cells.items() if np.any(v)}
    assert live == {(1,)}


def test_invert_dim_zero_is_trivially_reversible():
    ca = LinearCA(Z, 2, 0, (0, 1), (np.zeros((0, 0)), np.zeros((0, 0))))
    res = invert_ca(ca, 2)
    assert isinstance(res, ReversibilityCertificate)


def test_left_inverse_system_matches_scalar_brute_force():
    """The blockwise left-inverse solve agrees with a naive scalar system
    posed equation by equation (solvability and the composed result)."""
    import itertools

    from linca.linalg import solve_affine as plain_solve
    from linca.solver import _solve_left_inverse

    rng = random.Random(73)
    for _ in range(12):
        p = rng.choice((2, 3))
        d = rng.choice((1, 2))
        ca = random_integer_ca(rng, p, d)
        candidates = tuple(range(-1, 2))
        fast = _solve_left_inverse(ca, candidates)

        # Scalar route: unknowns C_w[i, k] indexed densely.
        unknowns = {(w, i, k): idx for idx, (w, i, k) in enumerate(
            itertools.product(candidates, range(d), range(d))
        )}
        products = {}
        for w in candidates:
            for m, bm in zip(ca.memory, ca.blocks):
                products.setdefault(w + m, []).append((w, bm))
        rows = []
        rhs = []
        for u, pairs in sorted(products.items()):
            for i in range(d):
                for j in range(d):
                    row = np.zeros(len(unknowns), dtype=np.int64)
                    for w, bm in pairs:
                        for k in range(d):
                            row[unknowns[(w, i, k)]] += bm[k, j]
                    rows.append(row % p)
                    rhs.append(1 if (u == 0 and i == j) else 0)
        sols = plain_solve(np.array(rows), np.array(rhs), p)
        assert (fast is not None) == (not sols.is_empty)
        if fast is not None:
            from linca import compose, equals_identity

            nu = LinearCA(Z, p, d, candidates, fast)
            assert equals_identity(compose(nu, ca))


# -- kernel witnesses ---------------------------------------------------------------


def test_kernel_witness_identity_none():
    assert kernel_witness(identity_ca(Z, 2, 1), 3, 3) is None


def test_kernel_witness_add_rule_periodic_constant():
    w = kernel_witness(add_rule(), 3, 3)
    assert isinstance(w, PeriodicConfig)
    assert w.values[0].tolist() == [1]


def test_kernel_witness_difference_rule_gf3():
    ca = LinearCA(Z, 3, 1, (0, 1), ([[-1]], [[1]]))
    w = kernel_witness(ca, 3, 3)
    assert isinstance(w, PeriodicConfig)
    assert int(w.values[0][0]) != 0
    assert KernelWitness(ca, w).verify()


def test_kernel_witness_zero_rule_finite_support():
    zero = LinearCA(Z, 2, 1, (0,), ([[0]],))
    w = kernel_witness(zero, 2, 2)
    assert w is not None and KernelWitness(zero, w).verify()


# -- surjectivity counterexamples ------------------------------------------------------


def test_surjectivity_zero_rule():
    zero = LinearCA(Z, 2, 1, (0,), ([[0]],))
    witness = surjectivity_counterexample(zero, 3)
    assert witness is not None and witness.level == 0
    assert witness.verify()


def test_surjectivity_shift_none():
    assert surjectivity_counterexample(shift_ca(), 3) is None


def test_surjectivity_projection_rule():
    proj = LinearCA(Z, 2, 2, (0,), (np.diag([1, 0]),))
    witness = surjectivity_counterexample(proj, 3)
    assert witness is not None and witness.verify()
    vec = np.concatenate([witness.pattern.cells[g] for g in witness.window_cells])
    assert np.any(vec)


# -- transport across induction ----------------------------------------------------------


def test_invert_transports_across_induction():
    lat = LatticeGroup(2)
    sub = subgroup_generated(lat, ((1, 0),))
    tau_h = sigma2_block_ca()
    tau_g = induce(tau_h, sub)
    res_h = invert_ca(tau_h, 4)
    res_g = invert_ca(tau_g, 4)
    assert isinstance(res_h, ReversibilityCertificate)
    assert isinstance(res_g, ReversibilityCertificate)
    assert restrict(res_g.inverse, sub) == res_h.inverse
    assert induce(res_h.inverse, sub) == res_g.inverse


def test_nonreversibility_transports_across_induction():
    lat = LatticeGroup(2)
    sub = subgroup_generated(lat, ((1, 0),))
    tau_g = induce(add_rule(), sub)
    res = invert_ca(tau_g, 3)
    assert isinstance(res, NotInvertible)


def test_preimage_transports_across_induction():
    lat = LatticeGroup(2)
    sub = subgroup_generated(lat, ((1, 0),))
    tau_h = sigma2_block_ca()
    tau_g = induce(tau_h, sub)
    target_h = finite_support(2, 2, {0: [1, 0]})
    target_g = finite_support(2, 2, {(0, 0): [1, 0]})
    res_h = preimage_extract(tau_h, target_h, 2, 8)
    res_g = preimage_extract(tau_g, target_g, 2, 8)
    assert res_h.status == "ok" and res_g.status == "ok"
    # The lattice preimage restricted to the embedded line matches an
    # integer preimage of the restricted target (both are exact preimages).
    line_values = {
        g[0]: v for g, v in res_g.pattern.cells.items() if g[1] == 0 and np.any(v)
    }
    image_h = tau_h.apply_config(finite_support(2, 2, line_values))
    assert config_equal(Z, 2, image_h, target_h)


# -- randomized round trip: extract then re-apply -------------------------------------------


def test_preimage_roundtrip_randomized():
    rng = random.Random(61)
    failures = 0
    for _ in range(25):
        p = rng.choice((2, 3))
        dim_v = rng.choice((1, 2))
        ca = random_integer_ca(rng, p, dim_v)
        x = random_finite_support(rng, Z, p, dim_v, range(-2, 3))
        y = ca.apply_config(x)
        res = preimage_extract(ca, y, 4, 12)
        assert res.status == "ok"
        ws = WindowSystem(ca)
        w = ws.window(4)
        vec = pattern_to_vec(res.pattern, w.source, dim_v, p)
        assert np.array_equal((w.matrix @ vec) % p, ws.target_vec(y, 4))
        assert res.extraction.chains_nonincreasing()
        assert all(res.extraction.lift_checks)
    assert failures == 0
