import numpy as np
import pytest

import condquant as cq
from condquant.errors import (
    NonPositiveProbability,
    ProbabilitiesDoNotSumToOne,
    SpaceMismatch,
)


def test_make_space_validates():
    sp = cq.make_space([0.2, 0.3, 0.5])
    assert sp.n == 3
    with pytest.raises(NonPositiveProbability):
        cq.make_space([0.5, 0.5, 0.0])
    with pytest.raises(ProbabilitiesDoNotSumToOne):
        cq.make_space([0.5, 0.6])


def test_probs_are_read_only():
    sp = cq.uniform_space(4)
    with pytest.raises(ValueError):
        sp.probs[0] = 0.9


def test_rv_arithmetic():
    sp = cq.uniform_space(3)
    X = cq.rv(sp, [1.0, 2.0, 3.0])
    Y = cq.rv(sp, [1.0, 1.0, 1.0])
    assert np.allclose((X + Y).values, [2, 3, 4])
    assert np.allclose((X - 1.0).values, [0, 1, 2])
    assert np.allclose((2.0 * X).values, [2, 4, 6])
    assert np.allclose((1.0 - X).values, [0, -1, -2])
    assert np.allclose((-X).values, [-1, -2, -3])
    assert X.expectation() == pytest.approx(2.0)


def test_rv_space_mismatch():
    X = cq.rv(cq.uniform_space(3), [1, 2, 3])
    Y = cq.rv(cq.uniform_space(3), [1, 2, 3])
    Z = cq.rv(cq.make_space([0.5, 0.25, 0.25]), [1, 2, 3])
    assert np.allclose((X + Y).values, [2, 4, 6])  # identical spaces compare equal
    with pytest.raises(SpaceMismatch):
        X + Z


def test_partition_canonical_form():
    sp = cq.uniform_space(4)
    a = cq.partition_from_atoms(sp, [[3, 1], [2, 0]])
    b = cq.partition_from_atoms(sp, [[0, 2], [1, 3]])
    assert a.atoms == b.atoms == ((0, 2), (1, 3))
    assert list(a.atom_of) == [0, 1, 0, 1]


def test_partition_from_labels():
    sp = cq.uniform_space(3)
    G = cq.partition_from_labels(sp, ["A", "A", "B"])
    assert G.atoms == ((0, 1), (2,))


def test_partition_must_cover():
    sp = cq.uniform_space(3)
    with pytest.raises(Exception):
        cq.partition_from_atoms(sp, [[0, 1]])
    with pytest.raises(Exception):
        cq.partition_from_atoms(sp, [[0, 1], [1, 2]])


def test_refines_and_measurable():
    sp = cq.uniform_space(4)
    coarse = cq.partition_from_atoms(sp, [[0, 1], [2, 3]])
    fine = cq.partition_from_atoms(sp, [[0], [1], [2, 3]])
    assert cq.refines(fine, coarse)
    assert not cq.refines(coarse, fine)
    Z = cq.rv(sp, [5.0, 5.0, -1.0, -1.0])
    assert cq.is_measurable(Z, coarse)
    assert cq.is_measurable(Z, fine)
    W = cq.rv(sp, [5.0, 4.0, -1.0, -1.0])
    assert not cq.is_measurable(W, coarse)


def test_distribution_merges_duplicates():
    d = cq.distribution([2.0, 1.0, 2.0], [0.25, 0.5, 0.25])
    assert np.allclose(d.support, [1.0, 2.0])
    assert np.allclose(d.weights, [0.5, 0.5])


def test_conditional_distribution_renormalizes():
    sp = cq.make_space([0.1, 0.3, 0.6])
    X = cq.rv(sp, [5.0, 5.0, 1.0])
    G = cq.partition_from_atoms(sp, [[0, 1], [2]])
    d0 = cq.conditional_distribution(X, G, 0)
    assert np.allclose(d0.support, [5.0])
    assert np.allclose(d0.weights, [1.0])
    d1 = cq.conditional_distribution(X, G, 1)
    assert np.allclose(d1.support, [1.0])


def test_conditional_expectation_tower():
    rng = np.random.default_rng(3)
    sp = cq.make_space(np.array([0.1, 0.2, 0.3, 0.4]))
    X = cq.rv(sp, rng.uniform(-1, 1, 4))
    G = cq.partition_from_atoms(sp, [[0, 1], [2, 3]])
    ce = cq.conditional_expectation(X, G)
    assert cq.is_measurable(ce, G)
    assert ce.expectation() == pytest.approx(X.expectation())


def test_ess_sup_conditional():
    sp = cq.uniform_space(4)
    X = cq.rv(sp, [1.0, 7.0, 2.0, 5.0])
    G = cq.partition_from_atoms(sp, [[0, 1], [2, 3]])
    assert np.allclose(cq.ess_sup_conditional(X, G).values, [7, 7, 5, 5])


def test_filtration_validation():
    sp = cq.uniform_space(3)
    triv = cq.trivial_partition(sp)
    disc = cq.discrete_partition(sp)
    mid = cq.partition_from_atoms(sp, [[0, 1], [2]])
    f = cq.filtration([triv, mid, disc])
    assert f.n_stages == 3
    with pytest.raises(ValueError):
        cq.filtration([mid, disc])  # stage 0 not trivial
    with pytest.raises(ValueError):
        cq.filtration([triv, mid])  # last stage not discrete
    other = cq.partition_from_atoms(sp, [[0], [1, 2]])
    with pytest.raises(ValueError):
        cq.filtration([triv, mid, other, disc])  # not refining
