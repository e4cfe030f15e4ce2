import math

import numpy as np
import pytest

from homsample import netcore
from homsample.netcore import (
    ConfigError,
    Motif,
    Network,
    arm_edge_motif,
    complete_motif,
    cycle_motif,
    motif_from_name,
    path_motif,
    star_motif,
    two_arm_motif,
    wedge_motif,
)


def test_network_validation():
    with pytest.raises(ValueError):
        Network(np.array([[1.0, -0.5], [0, 1]]))
    with pytest.raises(ValueError):
        Network(np.ones((2, 3)))
    with pytest.raises(ValueError):
        Network(np.ones((2, 2)), alpha=[0.0, 1.0])
    with pytest.raises(ValueError):
        Network(np.ones((2, 2)), alpha=[np.nan, 1.0])


def test_alpha_renormalized_with_warning():
    with pytest.warns(UserWarning):
        net = Network(np.ones((2, 2)), alpha=[2.0, 2.0])
    assert np.allclose(net.alpha, [0.5, 0.5])


def test_default_alpha_uniform():
    net = Network(np.eye(4))
    assert np.allclose(net.alpha, 0.25)


def test_sparse_threshold():
    n = netcore.DENSE_NODE_LIMIT + 1
    import scipy.sparse as sp

    W = sp.identity(n, format="csr")
    net = Network(W)
    assert not net.is_dense
    assert net.entry(0, 0) == 1.0
    assert net.max_weight() == 1.0
    small = Network(sp.identity(3, format="csr"))
    assert small.is_dense


def test_path_cycle_star_shapes():
    P = path_motif(4)
    assert P.k == 4
    assert P.edges() == [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]
    assert P.is_rooted_tree()
    assert P.is_simple()

    C = cycle_motif(3)
    assert C.n_edges() == 3
    assert not C.is_rooted_tree()
    assert C.is_simple()

    C1 = cycle_motif(1)
    assert C1.edges() == [(0, 0, 1.0)]
    assert not C1.is_simple()

    S = star_motif(5)
    assert S.k == 6
    assert S.is_rooted_tree()
    assert np.array_equal(S.parents(), [-1, 0, 0, 0, 0, 0])


def test_two_arm_and_companion_edge():
    F = two_arm_motif(2, 3)
    assert F.k == 6
    assert F.is_rooted_tree()
    par = F.parents()
    assert par[1] == 0 and par[2] == 1
    assert par[3] == 0 and par[4] == 3 and par[5] == 4

    H = arm_edge_motif(2, 3)
    assert H.edges() == [(2, 5, 1.0)]

    # one empty arm: the edge closes the path into a cycle
    H1 = arm_edge_motif(0, 3)
    assert H1.edges() == [(0, 3, 1.0)]
    H2 = arm_edge_motif(3, 0)
    assert H2.edges() == [(0, 3, 1.0)]

    # both arms empty: self-loop on the single node
    H0 = arm_edge_motif(0, 0)
    assert H0.k == 1 and H0.edges() == [(0, 0, 1.0)]

    # F_{k,0} is the directed path
    assert np.array_equal(two_arm_motif(3, 0).weights, path_motif(4).weights)


def test_complete_and_wedge():
    K = complete_motif(4)
    assert K.n_edges() == 6
    assert K.is_simple()
    W = wedge_motif()
    assert W.is_rooted_tree()
    assert W.k == 3


def test_motif_from_name():
    assert motif_from_name("P_5").k == 5
    assert motif_from_name("C_3").n_edges() == 3
    assert motif_from_name("S_20").k == 21
    assert motif_from_name("K_7").n_edges() == 21
    assert motif_from_name("F_3_4").k == 8
    assert motif_from_name("H_0_0").edges() == [(0, 0, 1.0)]
    assert motif_from_name("W_3").k == 3
    with pytest.raises(ConfigError):
        motif_from_name("Q_3")
    with pytest.raises(ConfigError):
        motif_from_name("P_x")


def test_rooted_tree_rejects_non_trees():
    # child before parent
    W = np.zeros((3, 3))
    W[2, 1] = 1.0
    W[0, 2] = 1.0
    assert not Motif(W).is_rooted_tree()
    # edge into the root
    W = np.zeros((2, 2))
    W[1, 0] = 1.0
    assert not Motif(W).is_rooted_tree()
    # single node with a loop
    assert not Motif(np.array([[1.0]])).is_rooted_tree()
    assert Motif(np.array([[0.0]])).is_rooted_tree()


def test_simple_rejects_bidirected_pairs_and_loops():
    W = np.zeros((2, 2))
    W[0, 1] = W[1, 0] = 1.0
    assert not Motif(W).is_simple()
    assert not Motif(np.array([[1.0]])).is_simple()
    assert Motif(np.array([[0.0, 1], [0, 0]])).is_simple()


def test_predicates_on_small_nets():
    A = np.array([[0.0, 1, 0], [1, 0, 1], [0, 1, 0]])
    net = Network(A)
    assert netcore.is_irreducible(net)
    assert netcore.is_bidirectional(net)
    assert not netcore.has_odd_cycle(net)
    assert netcore.max_degree(net) == 2
    assert netcore.diameter(net) == 2

    tri = Network(np.array([[0.0, 1, 1], [1, 0, 1], [1, 1, 0]]))
    assert netcore.has_odd_cycle(tri)

    loop = Network(np.array([[1.0, 1], [1, 0]]))
    assert netcore.has_odd_cycle(loop)
    # self-loop counts once in the degree
    assert netcore.max_degree(loop) == 2

    disc = Network(np.array([[1.0, 0], [0, 1]]))
    assert not netcore.is_irreducible(disc)
    assert netcore.diameter(disc) == math.inf

    directed = Network(np.array([[0.0, 1], [0, 0]]))
    assert not netcore.is_bidirectional(directed)
    assert netcore.skeleton(directed).sum() == 0
    # reachability is directed, so this one has infinite diameter
    assert netcore.diameter(directed) == math.inf


def test_hom_weight():
    A = np.array([[0.0, 2], [3, 0]])
    net = Network(A, alpha=[0.5, 0.5])
    P = path_motif(2)
    assert netcore.hom_weight(P, net, [0, 1]) == pytest.approx(2 * 0.25)
    assert netcore.hom_weight(P, net, [1, 0]) == pytest.approx(3 * 0.25)
    assert netcore.hom_weight(P, net, [0, 0]) == 0.0


def test_network_roundtrip(tmp_path):
    A = np.array([[0.0, 1.25, 0], [0, 0, 2.5], [0.75, 0, 0]])
    net = Network(A, alpha=[0.2, 0.3, 0.5])
    p = tmp_path / "net.tsv"
    netcore.save_network(net, p)
    back = netcore.load_network(p)
    assert np.array_equal(back.dense_weights(), A)
    assert np.allclose(back.alpha, net.alpha)


def test_network_load_without_alpha(tmp_path):
    p = tmp_path / "net.tsv"
    p.write_text("1\t2\t1.0\n2\t3\t1.0\n")
    net = netcore.load_network(p)
    assert net.n == 3
    assert np.allclose(net.alpha, 1 / 3)


def test_network_load_errors(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("0\t1\t1.0\n")
    with pytest.raises(ConfigError):
        netcore.load_network(p)
    p.write_text("1\t2\t3\t4\n")
    with pytest.raises(ConfigError):
        netcore.load_network(p)
    p.write_text("")
    with pytest.raises(ConfigError):
        netcore.load_network(p)


def test_motif_roundtrip(tmp_path):
    F = two_arm_motif(2, 2)
    p = tmp_path / "motif.txt"
    netcore.save_motif(F, p)
    back = netcore.load_motif(p)
    assert np.array_equal(back.weights, F.weights)


def test_motif_file_errors(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("1\t2\n")
    with pytest.raises(ConfigError):
        netcore.load_motif(p)
    p.write_text("k=2\n1\t3\n")
    with pytest.raises(ConfigError):
        netcore.load_motif(p)


def test_frequency_matrix_roundtrip(tmp_path):
    M = np.arange(9, dtype=float).reshape(3, 3)
    p = tmp_path / "freq.txt"
    netcore.save_frequency_matrix(M, p)
    back = netcore.load_frequency_matrix(p)
    assert np.array_equal(back, M)
    p.write_text("2\n1 2 3\n")
    with pytest.raises(ConfigError):
        netcore.load_frequency_matrix(p)


def test_resolve_motif(tmp_path):
    m = netcore.resolve_motif("P_3")
    assert m.k == 3
    p = tmp_path / "m.txt"
    netcore.save_motif(cycle_motif(4), p)
    assert netcore.resolve_motif(str(p)).n_edges() == 4
    with pytest.raises(ConfigError):
        netcore.resolve_motif("nonexistent_file.txt")
