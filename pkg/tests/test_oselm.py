import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pltelm.elm import encode_targets, scores, train_batch
from pltelm.errors import EmptyChunkError, InsufficientDataError, UnknownClassError
from pltelm.linalg import matmul
from pltelm.oselm import init_online, update_chunk
from pltelm.projection import hidden_matrix, init_projection

CLASSES = ("a", "b", "c")


def random_problem(seed, n_samples=120, dim=4):
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-1, 1, size=(n_samples, dim))
    labels = list(rng.choice(CLASSES, size=n_samples))
    labels[:3] = list(CLASSES)
    return rng, xs, labels


def random_chunks(rng, start, stop):
    edges = [start]
    while edges[-1] < stop:
        edges.append(min(stop, edges[-1] + int(rng.integers(1, 12))))
    return list(zip(edges, edges[1:]))


def run_online(proj, xs, labels, n0, chunks):
    state = init_online(proj, xs[:n0], labels[:n0])
    for a, b in chunks:
        state = update_chunk(state, xs[a:b], labels[a:b])
    return state


def test_init_matches_batch_on_block():
    _, xs, labels = random_problem(1)
    proj = init_projection(4, 10, seed=1)
    state = init_online(proj, xs[:30], labels[:30])
    batch = train_batch(proj, xs[:30], labels[:30])
    assert state.classes == batch.classes
    np.testing.assert_allclose(
        scores(state.beta, proj, xs), scores(batch.beta, proj, xs), atol=1e-8
    )
    assert state.samples_seen == 30 and state.weight_updates == 90
    assert np.array_equal(state.last_h, hidden_matrix(proj, xs[:30]))


def test_init_square_block_zero_residual():
    _, xs, labels = random_problem(2)
    proj = init_projection(4, 20, seed=2)
    state = init_online(proj, xs[:20], labels[:20])
    h = hidden_matrix(proj, xs[:20])
    assert np.abs(matmul(h, state.beta) - encode_targets(labels[:20], state.classes)).max() < 1e-6


def test_init_preconditions():
    _, xs, labels = random_problem(3)
    proj = init_projection(4, 10, seed=3)
    with pytest.raises(InsufficientDataError):
        init_online(proj, xs[:9], labels[:9])
    with pytest.raises(InsufficientDataError):
        init_online(proj, xs[:30], ["a"] * 30)


def test_single_sample_update_reduces_its_residual():
    _, xs, labels = random_problem(4)
    proj = init_projection(4, 10, seed=4)
    state = init_online(proj, xs[:30], labels[:30])
    x, t = xs[30:31], encode_targets(labels[30:31], state.classes)
    before = np.abs(scores(state.beta, proj, x) - t).sum()
    after_state = update_chunk(state, x, labels[30:31])
    after = np.abs(scores(after_state.beta, proj, x) - t).sum()
    assert after < before
    # The change is rank one.
    assert np.linalg.matrix_rank(after_state.beta - state.beta, tol=1e-12) == 1


def test_update_errors():
    _, xs, labels = random_problem(5)
    proj = init_projection(4, 10, seed=5)
    state = init_online(proj, xs[:30], labels[:30])
    with pytest.raises(EmptyChunkError):
        update_chunk(state, xs[:0], [])
    with pytest.raises(UnknownClassError):
        update_chunk(state, xs[30:31], ["new"])


@pytest.mark.parametrize("seed", range(5))
def test_chunking_invariance_and_batch_equivalence(seed):
    rng, xs, labels = random_problem(seed)
    proj = init_projection(4, 10, seed=seed)
    ones = run_online(proj, xs, labels, 30, [(i, i + 1) for i in range(30, 120)])
    big = run_online(proj, xs, labels, 30, [(30, 120)])
    mixed = run_online(proj, xs, labels, 30, random_chunks(rng, 30, 120))
    batch = train_batch(proj, xs, labels)
    for state in (ones, big, mixed):
        assert state.classes == batch.classes
        assert np.abs(state.beta - batch.beta).max() < 1e-6
    # Independent oracle: SVD-based least squares.
    ref, *_ = np.linalg.lstsq(hidden_matrix(proj, xs), encode_targets(labels, batch.classes), rcond=None)
    assert np.abs(mixed.beta - ref).max() < 1e-6


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_m_tracks_gram_inverse(seed):
    rng, xs, labels = random_problem(seed)
    proj = init_projection(4, 10, seed=seed)
    state = init_online(proj, xs[:30], labels[:30])
    seen = 30
    for a, b in random_chunks(rng, 30, 120):
        state = update_chunk(state, xs[a:b], labels[a:b])
        seen = b
        h_all = hidden_matrix(proj, xs[:seen])
        ref = np.linalg.inv(h_all.T @ h_all)
        assert np.abs(state.m - ref).max() < 1e-6
        assert np.abs(state.m - state.m.T).max() <= 1e-9 * np.abs(state.m).max()
    assert state.samples_seen == 120


def test_weight_updates_static_classes():
    rng, xs, labels = random_problem(7)
    proj = init_projection(4, 10, seed=7)
    state = run_online(proj, xs, labels, 30, random_chunks(rng, 30, 120))
    assert state.weight_updates == 120 * 3
