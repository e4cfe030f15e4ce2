import math

import numpy as np
import pytest

from homsample import clustering as cl
from homsample.netcore import Network


def three_chain(s=0.5):
    A = np.array([[1.0, s, 0], [s, 1, s], [0, s, 1]])
    return Network(A)


def test_dissimilarity_matrix():
    net = three_chain(0.5)
    D = cl.dissimilarity_matrix(net)
    assert D[0, 1] == 0.5
    assert D[1, 2] == 0.5
    assert math.isinf(D[0, 2])
    assert np.all(np.diag(D) == 0)


def test_dissimilarity_uses_max_symmetrization():
    A = np.array([[0.0, 0.8], [0.2, 0.0]])
    D = cl.dissimilarity_matrix(Network(A))
    assert D[0, 1] == pytest.approx(0.0)
    assert D[1, 0] == pytest.approx(0.0)


def test_shortest_path_closure():
    D = np.array([[0.0, 1.0, np.inf], [1.0, 0.0, 2.0], [np.inf, 2.0, 0.0]])
    W = cl.shortest_path_closure(D)
    assert W[0, 2] == 3.0
    D2 = np.array([[0.0, np.inf], [np.inf, 0.0]])
    W2 = cl.shortest_path_closure(D2)
    assert math.isinf(W2[0, 1])


def test_tied_merge_coalesces():
    dend = cl.single_linkage(three_chain(0.5))
    assert len(dend.events) == 1
    ev = dend.events[0]
    assert ev.height == pytest.approx(0.5)
    assert ev.children == [0, 1, 2]
    off = ~np.eye(3, dtype=bool)
    assert np.all(dend.merge_heights[off] == pytest.approx(0.5))


def test_distinct_heights_nest():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 0.9
    A[1, 2] = A[2, 1] = 0.6
    dend = cl.single_linkage(Network(A))
    assert len(dend.events) == 2
    assert dend.events[0].height == pytest.approx(0.0)
    assert dend.events[0].children == [0, 1]
    assert dend.events[1].height == pytest.approx(0.3)
    assert dend.events[1].children == [3, 2]
    assert dend.merge_heights[0, 2] == pytest.approx(0.3)


def test_disconnected_final_event():
    A = np.zeros((4, 4))
    A[0, 1] = A[1, 0] = 1.0
    A[2, 3] = A[3, 2] = 1.0
    dend = cl.single_linkage(Network(A))
    assert len(dend.events) == 3
    assert dend.events[0].children == [0, 1]
    assert dend.events[1].children == [2, 3]
    last = dend.events[2]
    assert math.isinf(last.height)
    assert last.children == [4, 5]
    assert math.isinf(dend.merge_heights[0, 2])


def test_linkage_rows_fold_multiway():
    dend = cl.single_linkage(three_chain(0.5))
    rows = cl.linkage_rows(dend)
    assert rows == [(0.5, 0, 1), (0.5, 3, 2)]


def test_partition_at_height():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 0.9
    A[1, 2] = A[2, 1] = 0.6
    dend = cl.single_linkage(Network(A))
    assert cl.partition_at_height(dend, -1) == [[0], [1], [2]]
    assert cl.partition_at_height(dend, 0.0) == [[0, 1], [2]]
    assert cl.partition_at_height(dend, 0.0, strict=True) == [[0], [1], [2]]
    assert cl.partition_at_height(dend, 1.0) == [[0, 1, 2]]


def test_threshold_duality():
    rng = np.random.default_rng(2)
    A = rng.choice([0.0, 0.3, 0.6, 0.9], size=(6, 6), p=[0.4, 0.2, 0.2, 0.2])
    A = np.maximum(A, A.T)
    net = Network(A)
    mx = net.max_weight()
    dend = cl.single_linkage(net)
    for t in (0.0, 0.29, 0.3, 0.45, 0.6, 0.9):
        sim = cl.similarity_partition(net, t)
        cut = cl.partition_at_height(dend, mx - t, strict=True)
        assert sim == cut


def test_capacity_chain():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 0.9
    A[1, 2] = A[2, 1] = 0.6
    T = cl.capacity_matrix(Network(A))
    assert T[0, 1] == pytest.approx(0.9)
    assert T[0, 2] == pytest.approx(0.6)
    assert np.all(np.diag(T) == 0)


def test_capacity_uses_max_symmetrization():
    A = np.array([[0.0, 0.8], [0.1, 0.0]])
    T = cl.capacity_matrix(Network(A))
    assert T[0, 1] == pytest.approx(0.8)
    assert T[1, 0] == pytest.approx(0.8)


def test_capacity_ultrametric_on_distinct_triples():
    rng = np.random.default_rng(5)
    A = rng.uniform(size=(6, 6)) * (rng.random((6, 6)) < 0.6)
    T = cl.capacity_matrix(Network(A))
    n = 6
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if len({x, y, z}) < 3:
                    continue
                assert T[x, y] >= min(T[x, z], T[z, y]) - 1e-12


def test_capacity_max_loops_cover_all_triples():
    rng = np.random.default_rng(6)
    A = rng.uniform(size=(5, 5)) * (rng.random((5, 5)) < 0.7)
    net = Network(A)
    T = cl.capacity_matrix(net)
    np.fill_diagonal(T, net.max_weight())
    for x in range(5):
        for y in range(5):
            for z in range(5):
                assert T[x, y] >= min(T[x, z], T[z, y]) - 1e-12


def test_treegram_births_and_merges():
    A = np.array([[1.0, 0.5], [0.5, 0.2]])
    births, M = cl.treegram(Network(A))
    assert births == pytest.approx([0.0, 0.8])
    assert M[0, 1] == pytest.approx(0.8)
    assert M[0, 0] == pytest.approx(0.0)
    assert M[1, 1] == pytest.approx(0.8)


def test_treegram_merge_matrix_ultrametric():
    rng = np.random.default_rng(8)
    A = rng.uniform(size=(5, 5)) * (rng.random((5, 5)) < 0.8)
    births, M = cl.treegram(Network(A))
    for x in range(5):
        for y in range(5):
            for z in range(5):
                if len({x, y, z}) < 3:
                    continue
                assert M[x, y] <= max(M[x, z], M[z, y]) + 1e-12


def test_newick_multiway():
    dend = cl.single_linkage(three_chain(0.5))
    assert cl.to_newick(dend) == "(0:0.5,1:0.5,2:0.5);"


def test_newick_nested():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 0.9
    A[1, 2] = A[2, 1] = 0.6
    dend = cl.single_linkage(Network(A))
    assert cl.to_newick(dend) == "((0:0,1:0):0.3,2:0.3);"


def test_save_linkage_csv(tmp_path):
    A = np.zeros((4, 4))
    A[0, 1] = A[1, 0] = 1.0
    A[2, 3] = A[3, 2] = 1.0
    dend = cl.single_linkage(Network(A))
    p = tmp_path / "dend.csv"
    cl.save_linkage_csv(dend, p)
    lines = p.read_text().strip().split("\n")
    assert lines[0] == "height,left,right"
    assert lines[1] == "0.0,0,1"
    assert lines[2] == "0.0,2,3"
    assert lines[3] == "inf,4,5"
