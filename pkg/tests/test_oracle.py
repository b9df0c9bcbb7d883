import numpy as np
import pytest

from oracles import naive_tight_hamilton
from tightcycles import constructions as cons
from tightcycles import oracle as orc
from tightcycles.errors import BudgetError
from tightcycles.hypercore import from_edges, verify_tight_cycle


@pytest.mark.parametrize("seed", range(25))
def test_dp_agrees_with_exhaustive(seed):
    for n in (5, 6, 7, 8):
        H = cons.random(n, 0.3 + 0.2 * (seed % 4), seed * 31 + n)
        assert orc.has_tight_hamilton(H) == orc.exhaustive_hamilton(H)


@pytest.mark.parametrize("seed", range(5))
def test_dp_agrees_with_permutation_naive(seed):
    H = cons.random(6, 0.6, seed)
    assert orc.has_tight_hamilton(H) == naive_tight_hamilton(H)


def test_tight_cycle_extraction_is_rotation():
    for n in (6, 10, 14, 20):
        H = cons.tight_cycle(n)
        cyc = orc.extract_tight_hamilton(H)
        assert cyc is not None and verify_tight_cycle(H, cyc.vertices)
        diffs = {
            (cyc.vertices[(i + 1) % n] - cyc.vertices[i]) % n for i in range(n)
        }
        assert diffs == {1} or diffs == {n - 1}


def test_isolated_vertex_is_not_hamiltonian():
    H = from_edges(6, cons.tight_cycle(5).edges())
    assert not orc.has_tight_hamilton(H)


def test_k5_and_k4_are_hamiltonian():
    assert orc.has_tight_hamilton(cons.complete(5))
    assert orc.exhaustive_hamilton(cons.complete(5))
    assert orc.has_tight_hamilton(cons.complete(4))


def test_empty_not_hamiltonian():
    assert not orc.has_tight_hamilton(cons.empty(6))
    assert not orc.exhaustive_hamilton(cons.empty(6))


def test_relabeling_invariance():
    rng = np.random.Generator(np.random.PCG64(4))
    for seed in range(6):
        H = cons.random(7, 0.5, seed + 60)
        perm = rng.permutation(7).tolist()
        relabeled = from_edges(
            7, [(perm[a], perm[b], perm[c]) for a, b, c in H.edges()]
        )
        assert orc.has_tight_hamilton(H) == orc.has_tight_hamilton(relabeled)


def test_budget_errors():
    with pytest.raises(BudgetError):
        orc.has_tight_hamilton(cons.empty(21))
    with pytest.raises(BudgetError):
        orc.exhaustive_hamilton(cons.empty(10))
    with pytest.raises(BudgetError):
        orc.count_paths_between(cons.complete(6), (0, 1), (2, 3), 7)
    with pytest.raises(BudgetError):
        orc.count_paths_between(cons.empty(15), (0, 1), (2, 3), 2)


def test_limits_validate():
    with pytest.raises(ValueError):
        orc.OracleLimits(max_n_dp=8, max_n_exhaustive=9)


def test_count_paths_k6_one_inner():
    assert orc.count_paths_between(cons.complete(6), (0, 1), (2, 3), 1) == 2


def test_count_paths_empty():
    assert orc.count_paths_between(cons.empty(8), (0, 1), (2, 3), 2) == 0


def test_count_paths_reversal_bijection():
    for seed in range(4):
        H = cons.random(9, 0.5, seed + 7)
        for inner in (1, 2, 3):
            a = orc.count_paths_between(H, (0, 1), (2, 3), inner)
            b = orc.count_paths_between(H, (3, 2), (1, 0), inner)
            assert a == b


def test_count_paths_matches_connect_on_dense():
    # where the exact count is positive at inner=5, the searcher agrees
    from tightcycles.hamilton import connect

    H = cons.random(12, 0.8, 3)
    cnt = orc.count_paths_between(H, (0, 1), (2, 3), 5)
    assert cnt > 0
    path = connect(H, (0, 1), (2, 3), range(12), max_inner=5, lengths=[5], seed=1)
    assert path is not None and len(path) == 9


def test_count_paths_rejects_overlapping_endpoints():
    with pytest.raises(ValueError):
        orc.count_paths_between(cons.complete(6), (0, 1), (1, 2), 1)
