import numpy as np
import pytest

from epistate.linalg import (
    ContractViolation,
    StateVector,
    apply,
    basis_state,
    born_sample,
    born_weights,
    check_resolution,
    cumulative,
    hermitian,
    inner,
    is_projector,
    ket_projector,
    pick_index,
    projector,
    tensor,
    unitary,
)
from epistate.rng import RowRng, block_draws, make_rng, shot_draws


def test_state_vector_validation():
    with pytest.raises(ContractViolation):
        StateVector([])
    with pytest.raises(ContractViolation):
        StateVector(np.ones(17))
    with pytest.raises(ContractViolation):
        StateVector([1, np.nan])
    with pytest.raises(ContractViolation):
        StateVector([1, 0], ("a",))


def test_labels_and_lookup():
    v = StateVector([0.6, 0.8j], ("H", "V"))
    assert v["V"] == 0.8j
    assert v.is_normalized()
    assert np.isclose(StateVector([3, 4]).normalize().norm(), 1.0)


def test_tensor_labels_and_amplitudes():
    a = StateVector([1, 0], ("+", "-"))
    b = StateVector([0, 1], ("+", "-"))
    t = tensor(a, b)
    assert t.labels == ("++", "+-", "-+", "--")
    assert t["+-"] == 1


def test_apply_does_not_renormalize():
    v = StateVector([1, 1]).normalize()
    p = np.diag([1.0, 0.0])
    w = apply(p, v)
    assert np.isclose(w.norm() ** 2, 0.5)
    with pytest.raises(ContractViolation):
        apply(np.eye(3), v)


def test_constructors_validate():
    with pytest.raises(ContractViolation):
        hermitian([[0, 1], [0, 0]])
    with pytest.raises(ContractViolation):
        unitary([[1, 1], [0, 1]])
    with pytest.raises(ContractViolation):
        projector([[1, 0], [0, 0.5]])
    assert is_projector(ket_projector(basis_state(3, 1)))


def test_resolution_check():
    check_resolution([np.diag([1.0, 0]), np.diag([0, 1.0])])
    with pytest.raises(ContractViolation):
        check_resolution([np.diag([1.0, 0]), np.diag([1.0, 1.0])])


def test_inner_is_conjugate_linear_in_first():
    a = StateVector([1j, 0])
    b = StateVector([1, 0])
    assert inner(a, b) == -1j


def test_born_weights_zero_branches_snapped():
    v = StateVector([1, 1e-7]).normalize()
    w = born_weights(v, [np.diag([1.0, 0]), np.diag([0, 1.0])])
    assert w[1] == 0.0


def test_cumulative_and_pick():
    cum, last = cumulative([0.0, 0.25, 0.0, 0.75])
    assert last == 3
    assert cum[0] == 0.0 and cum[1] == 0.25 and cum[3] == 1.0
    assert pick_index([0.0, 0.25, 0.0, 0.75], 0.0) == 1
    assert pick_index([0.0, 0.25, 0.0, 0.75], 0.25) == 3
    with pytest.raises(ContractViolation):
        cumulative([0.0, 0.0])


def test_born_sample_one_draw_and_post_state():
    v = StateVector([1, 1]).normalize()
    rng = RowRng([0.7])
    k, post = born_sample(v, [np.diag([1.0, 0]), np.diag([0, 1.0])], rng)
    assert rng.used == 1
    assert k == 1
    assert np.allclose(post.amplitudes, [0, 1])


def test_born_sample_repeat_is_reproducible():
    rng = make_rng(3)
    v = StateVector([0.6, 0.8])
    ps = [np.diag([1.0, 0]), np.diag([0, 1.0])]
    for _ in range(50):
        k, post = born_sample(v, ps, rng)
        assert born_sample(post, ps, rng)[0] == k


def test_row_rng_exhaustion():
    r = RowRng([0.1])
    r.random()
    with pytest.raises(RuntimeError):
        r.random()


def test_shot_draws_stitch_blocks():
    from epistate.rng import BLOCK_SHOTS

    whole = np.concatenate([block_draws(9, 1, 0, BLOCK_SHOTS, 2), block_draws(9, 1, 1, BLOCK_SHOTS, 2)])
    part = shot_draws(9, 1, BLOCK_SHOTS - 5, BLOCK_SHOTS + 7, 2)
    assert np.array_equal(part, whole[BLOCK_SHOTS - 5: BLOCK_SHOTS + 7])


def test_seed_range():
    with pytest.raises(ValueError):
        make_rng(-1)
    with pytest.raises(ValueError):
        make_rng(2**64)
    make_rng(2**64 - 1)
