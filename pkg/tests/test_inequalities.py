import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fwerbound.errors import InvalidSystemError
from fwerbound.inequalities import (
    FiniteEventSpace,
    PairwiseSystem,
    kounias_upper,
    kwerel_upper,
    random_event_space,
    union_oracle,
)

SLACK = 1e-12


def test_two_events_is_inclusion_exclusion():
    s = PairwiseSystem([0.3, 0.3], [[0, 0.1], [0.1, 0]])
    assert kwerel_upper(s) == pytest.approx(0.5)
    assert kounias_upper(s) == (pytest.approx(0.5), 0)


def test_disjoint_events():
    s = PairwiseSystem([0.1, 0.2, 0.3], np.zeros((3, 3)))
    assert kwerel_upper(s) == pytest.approx(0.6)
    assert kounias_upper(s)[0] == pytest.approx(0.6)


def test_equal_pairwise_gives_equal_bounds():
    s = PairwiseSystem([0.2, 0.25, 0.3, 0.1], np.full((4, 4), 0.05))
    assert kounias_upper(s, clamp=False)[0] == pytest.approx(kwerel_upper(s, clamp=False), abs=1e-15)


def test_kounias_tie_goes_to_first_row():
    p = np.array([[0, 0.1, 0.0], [0.1, 0, 0.0], [0.0, 0.0, 0]])
    assert kounias_upper(PairwiseSystem([0.2, 0.2, 0.2], p))[1] == 0


def test_clamping():
    s = PairwiseSystem([0.9, 0.9, 0.9], np.zeros((3, 3)))
    assert kwerel_upper(s) == 1.0
    assert kwerel_upper(s, clamp=False) == pytest.approx(2.7)


@pytest.mark.parametrize("marginals,pairwise", [
    ([0.5], [[0]]),
    ([0.5, 1.2], [[0, 0], [0, 0]]),
    ([0.5, 0.5], [[0, 0.1], [0.2, 0]]),
    ([0.5, 0.1], [[0, 0.2], [0.2, 0]]),
    ([0.5, 0.5], [[0, 0.1, 0], [0.1, 0, 0]]),
    ([0.5, float("nan")], [[0, 0], [0, 0]]),
])
def test_invalid_systems(marginals, pairwise):
    with pytest.raises(InvalidSystemError):
        PairwiseSystem(marginals, pairwise)


def test_event_space_oracle():
    space = FiniteEventSpace([0.25, 0.25, 0.5], [[0], [1]])
    assert union_oracle(space) == pytest.approx(0.5)
    full = FiniteEventSpace([0.25, 0.25, 0.5], [[0, 1, 2], [0, 1, 2]])
    assert union_oracle(full) == 1.0
    with pytest.raises(InvalidSystemError):
        FiniteEventSpace([0.5, 0.6], [[0]])
    with pytest.raises(InvalidSystemError):
        FiniteEventSpace([0.5, 0.5], [[2]])


def test_eight_atoms_four_events():
    rng = np.random.default_rng(7)
    space = random_event_space(rng, max_atoms=8, max_events=4)
    exact = union_oracle(space)
    system = space.pairwise_system()
    assert exact <= kounias_upper(system)[0] + SLACK <= kwerel_upper(system) + 2 * SLACK


@st.composite
def event_spaces(draw):
    n_atoms = draw(st.integers(1, 10))
    weights = draw(st.lists(st.floats(0.01, 10.0), min_size=n_atoms, max_size=n_atoms))
    probs = np.array(weights) / sum(weights)
    probs[-1] = 1.0 - probs[:-1].sum()
    n_events = draw(st.integers(2, 6))
    membership = [draw(st.sets(st.integers(0, n_atoms - 1))) for _ in range(n_events)]
    return FiniteEventSpace(np.clip(probs, 0, 1), membership)


@settings(max_examples=300, deadline=None)
@given(event_spaces())
def test_bounds_dominate_union(space):
    exact = union_oracle(space)
    system = space.pairwise_system()
    kou, _ = kounias_upper(system)
    kwe = kwerel_upper(system)
    assert exact <= kou + SLACK
    assert kou <= kwe + SLACK


def test_thousand_random_spaces():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        space = random_event_space(rng)
        system = space.pairwise_system()
        exact = union_oracle(space)
        kou, _ = kounias_upper(system)
        assert exact <= kou + SLACK <= kwerel_upper(system) + 2 * SLACK
