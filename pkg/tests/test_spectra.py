"""Spectral radii, Dynkin recognition, graph exports."""

import math

import numpy as np
import pytest

from fusionrings import (
    FusionGraph,
    a_infinity_check,
    cyclic_group_ring,
    dynkin_classify,
    export_dot,
    fibonacci,
    matrix_homomorphism_check,
    module_graph,
    module_matrix,
    quotient_module,
    ring_dims,
    schur_norm_check,
    spectral_radius,
    standard_module,
    su2_level,
    su2_ring,
    symmetrize,
    free_unitary_ring,
)

GOLDEN = (1 + math.sqrt(5)) / 2


def path(n):
    m = np.zeros((n, n), dtype=np.int64)
    for i in range(n - 1):
        m[i, i + 1] = m[i + 1, i] = 1
    return m


def cycle(n):
    m = path(n)
    m[0, n - 1] = m[n - 1, 0] = 1
    return m


def tadpole(n):
    m = path(n)
    m[n - 1, n - 1] = 1
    return m


def star(legs):
    n = 1 + sum(legs)
    m = np.zeros((n, n), dtype=np.int64)
    idx = 1
    for leg in legs:
        prev = 0
        for _ in range(leg):
            m[prev, idx] = m[idx, prev] = 1
            prev = idx
            idx += 1
    return m


def extended_d(n):
    """n+1 vertices: a central path with two-leaf forks at both ends."""
    assert n >= 5
    inner = n - 3  # path of n-3 vertices between the forks
    m = np.zeros((n + 1, n + 1), dtype=np.int64)
    chain = list(range(2, 2 + inner))
    for a, b in zip(chain, chain[1:]):
        m[a, b] = m[b, a] = 1
    m[0, chain[0]] = m[chain[0], 0] = 1
    m[1, chain[0]] = m[chain[0], 1] = 1
    m[n - 1, chain[-1]] = m[chain[-1], n - 1] = 1
    m[n, chain[-1]] = m[chain[-1], n] = 1
    return m


def graph_of(matrix, boundary=()):
    n = matrix.shape[0]
    return FusionGraph(
        tuple(f"v{i}" for i in range(n)), matrix, directed=False, boundary=frozenset(boundary)
    )


# -- module matrices -------------------------------------------------------------------


def test_module_matrix_fibonacci_tadpole():
    std = standard_module(fibonacci())
    assert module_matrix(std, "phi").tolist() == [[0, 1], [1, 1]]
    assert module_matrix(std, "1").tolist() == [[1, 0], [0, 1]]


def test_module_matrix_quotient_swap():
    q = quotient_module(cyclic_group_ring(4), ["0", "2"])
    assert module_matrix(q, "1").tolist() == [[0, 1], [1, 0]]


def test_matrix_homomorphism_check():
    std = standard_module(fibonacci())
    assert matrix_homomorphism_check(std, "phi", "phi")
    assert matrix_homomorphism_check(std, "1", "phi")
    s3 = standard_module(__import__("fusionrings").permutation_group_ring(3))
    for a in ("102", "120"):
        for b in ("201", "012"):
            assert matrix_homomorphism_check(s3, a, b)


def test_matrix_homomorphism_fails_on_mutation():
    from fusionrings import BasedModuleTable, RingElement

    z4 = cyclic_group_ring(4)
    std = standard_module(z4)
    action = {(a, b): std.action_row(a, b) for a in z4.basis for b in std.basis}
    action[("1", "0")] = RingElement.basis("2")
    bad = BasedModuleTable(z4, std.basis, action)
    assert not matrix_homomorphism_check(bad, "1", "1")


# -- spectral radius -------------------------------------------------------------------


def test_spectral_radius_golden():
    assert spectral_radius(np.array([[0, 1], [1, 1]])) == pytest.approx(GOLDEN, abs=1e-9)


def test_spectral_radius_identity_and_zero():
    assert spectral_radius(np.eye(4, dtype=np.int64)) == pytest.approx(1.0, abs=1e-12)
    assert spectral_radius(np.zeros((3, 3), dtype=np.int64)) == pytest.approx(0.0, abs=1e-12)


def test_spectral_radius_four_cycle_is_two():
    assert spectral_radius(cycle(4)) == pytest.approx(2.0, abs=1e-9)


def test_spectral_radius_bipartite_path():
    # the value that naive Rayleigh iteration misses (it stalls at 4/3)
    assert spectral_radius(path(3)) == pytest.approx(math.sqrt(2), abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 5, 8, 13])
def test_spectral_radius_matches_eigvalsh_oracle(n):
    rng = np.random.default_rng(n)
    m = rng.integers(0, 3, size=(n, n))
    m = m + m.T  # symmetric nonnegative
    expected = float(np.max(np.abs(np.linalg.eigvalsh(m.astype(float)))))
    assert spectral_radius(m) == pytest.approx(expected, abs=1e-8)


def test_spectral_radius_nonsymmetric_is_operator_norm():
    m = np.array([[0, 2], [1, 0]])
    # singular value bound: sqrt of the top eigenvalue of M M^T
    expected = float(np.sqrt(np.max(np.linalg.eigvalsh((m @ m.T).astype(float)))))
    assert spectral_radius(m) == pytest.approx(expected, abs=1e-9)


# -- Dynkin recognition ------------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 13))
def test_paths_classify_as_A(n):
    verdict = dynkin_classify(graph_of(path(n)))
    assert verdict.kind == "A_n" and verdict.size == n
    assert verdict.norm_class == "lt2"


@pytest.mark.parametrize("n", range(2, 13))
def test_cycles_classify_extended_A(n):
    verdict = dynkin_classify(graph_of(cycle(n + 1)))
    assert verdict.kind == "extended_A" and verdict.size == n
    assert verdict.norm_class == "eq2"
    assert spectral_radius(cycle(n + 1)) == pytest.approx(2.0, abs=1e-8)


def test_double_edge_is_extended_A1():
    m = np.array([[0, 2], [2, 0]])
    verdict = dynkin_classify(graph_of(m))
    assert verdict.kind == "extended_A" and verdict.size == 1
    assert spectral_radius(m) == pytest.approx(2.0, abs=1e-8)


@pytest.mark.parametrize("n", range(1, 13))
def test_tadpoles_classify(n):
    verdict = dynkin_classify(graph_of(tadpole(n)))
    assert verdict.kind == "tadpole" and verdict.size == n
    assert verdict.norm_class == "lt2"
    assert spectral_radius(tadpole(n)) < 2.0


@pytest.mark.parametrize("n", range(4, 13))
def test_D_series(n):
    legs = [1, 1, n - 3]
    verdict = dynkin_classify(graph_of(star(legs)))
    assert verdict.kind == "D_n" and verdict.size == n
    assert verdict.norm_class == "lt2"


@pytest.mark.parametrize("legs,kind", [([1, 2, 2], "E6"), ([1, 2, 3], "E7"), ([1, 2, 4], "E8")])
def test_E_series(legs, kind):
    verdict = dynkin_classify(graph_of(star(legs)))
    assert verdict.kind == kind and verdict.norm_class == "lt2"


@pytest.mark.parametrize(
    "legs,kind",
    [([2, 2, 2], "extended_E6"), ([1, 3, 3], "extended_E7"), ([1, 2, 5], "extended_E8")],
)
def test_extended_E_series(legs, kind):
    verdict = dynkin_classify(graph_of(star(legs)))
    assert verdict.kind == kind and verdict.norm_class == "eq2"
    assert spectral_radius(star(legs)) == pytest.approx(2.0, abs=1e-8)


def test_extended_D4_star():
    verdict = dynkin_classify(graph_of(star([1, 1, 1, 1])))
    assert verdict.kind == "extended_D" and verdict.size == 4
    assert spectral_radius(star([1, 1, 1, 1])) == pytest.approx(2.0, abs=1e-8)


@pytest.mark.parametrize("n", range(5, 13))
def test_extended_D_series(n):
    m = extended_d(n)
    verdict = dynkin_classify(graph_of(m))
    assert verdict.kind == "extended_D" and verdict.size == n
    assert spectral_radius(m) == pytest.approx(2.0, abs=1e-8)


def test_norm_two_loop_degenerations():
    both_ends = path(3)
    both_ends[0, 0] = both_ends[2, 2] = 1
    verdict = dynkin_classify(graph_of(both_ends))
    assert verdict.kind == "loop_norm2" and verdict.norm_class == "eq2"
    assert spectral_radius(both_ends) == pytest.approx(2.0, abs=1e-8)

    double_loop = np.array([[2]])
    verdict = dynkin_classify(graph_of(double_loop))
    assert verdict.norm_class == "eq2"

    center_loop = path(3)
    center_loop[1, 1] = 1
    verdict = dynkin_classify(graph_of(center_loop))
    assert verdict.kind == "loop_norm2"
    assert spectral_radius(center_loop) == pytest.approx(2.0, abs=1e-8)


def test_supercritical_certificates():
    verdict = dynkin_classify(graph_of(star([1, 1, 1, 1, 1])))
    assert verdict.kind == "norm_exceeds_2" and verdict.norm_class == "gt2"
    assert verdict.certificate is not None
    m = star([1, 1, 1, 1, 1])
    v = np.array(verdict.certificate)
    support = v > 1e-12
    assert np.all((m @ v)[support] > 2 * v[support])

    verdict = dynkin_classify(graph_of(star([1, 2, 6])))
    assert verdict.kind == "norm_exceeds_2"


def test_classifier_rejects_bad_input():
    with pytest.raises(ValueError):
        dynkin_classify(graph_of(np.zeros((0, 0), dtype=np.int64)))
    disconnected = np.zeros((2, 2), dtype=np.int64)
    with pytest.raises(ValueError):
        dynkin_classify(graph_of(disconnected))
    directed = FusionGraph(("a", "b"), np.array([[0, 1], [0, 0]]), directed=True)
    with pytest.raises(ValueError):
        dynkin_classify(directed)


# -- A-infinity truncations ------------------------------------------------------------------


def test_a_infinity_on_truncated_half_line():
    window = standard_module(su2_ring()).truncate(10)
    graph = module_graph(window, "1")
    sym = symmetrize(graph)
    assert a_infinity_check(sym)
    verdict = dynkin_classify(sym)
    assert verdict.kind == "a_infinity"


def test_a_infinity_rejects_tadpole_and_cycle():
    assert not a_infinity_check(graph_of(tadpole(2)))
    assert not a_infinity_check(graph_of(cycle(5)))


def test_a_infinity_needs_marked_boundary():
    # a bare path with two unmarked ends is not a half-line truncation
    assert not a_infinity_check(graph_of(path(5)))
    assert a_infinity_check(graph_of(path(5), boundary=("v4",)))


# -- Schur bound ---------------------------------------------------------------------------


def test_schur_on_standard_modules():
    for ring in (fibonacci(), su2_level(3)):
        std = standard_module(ring)
        dims = ring_dims(ring)
        for label in ring.basis:
            check = schur_norm_check(std, dims, label)
            assert check.ok, check.line()


def test_schur_truncated_su2_ring():
    window = standard_module(su2_ring()).truncate(12)
    check = schur_norm_check(window, window.dims, "1")
    assert check.ok
    assert check.rows_checked == 12  # all but the boundary row
    assert check.radius <= 2.0 + 1e-6


def test_schur_truncated_word_ring():
    window = standard_module(free_unitary_ring()).truncate(4)
    for label in ("p+", "p-"):
        check = schur_norm_check(window, window.dims, label)
        assert check.ok
        assert check.radius <= 2.0 + 1e-6


# -- DOT export ---------------------------------------------------------------------------------


def test_export_dot_tadpole_directed():
    std = standard_module(fibonacci())
    graph = module_graph(std, "phi")
    text = export_dot(graph)
    assert text == (
        'digraph fusion {\n'
        '  "1";\n'
        '  "phi";\n'
        '  "1" -> "phi";\n'
        '  "phi" -> "1";\n'
        '  "phi" -> "phi";\n'
        '}\n'
    )


def test_export_dot_empty_graph():
    empty = FusionGraph((), np.zeros((0, 0), dtype=np.int64), directed=False)
    assert export_dot(empty) == "graph fusion {\n}\n"


def test_export_dot_undirected_with_weights():
    q = quotient_module(cyclic_group_ring(4), ["0", "2"])
    graph = module_graph(q, "1", dims=lambda b: 2.0)
    sym = symmetrize(graph)
    text = export_dot(sym)
    assert '"0" -- "1";' in text
    assert 'd=2' in text


def test_export_dot_deterministic():
    std = standard_module(su2_level(4))
    one = export_dot(module_graph(std, "2"))
    two = export_dot(module_graph(std, "2"))
    assert one == two
    assert "\r" not in one and one.endswith("}\n")


def test_classifier_norm_class_matches_eigensolver_on_random_graphs():
    # seeded fuzz: the structural verdict agrees with the dense eigensolver
    rng = np.random.default_rng(20240809)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        m = rng.integers(0, 3, size=(n, n))
        m = np.minimum(m + m.T, 2).astype(np.int64)
        graph = FusionGraph(tuple(f"v{i}" for i in range(n)), m, directed=False)
        if not graph.is_connected():
            continue
        verdict = dynkin_classify(graph)
        rho = float(np.max(np.abs(np.linalg.eigvalsh(m.astype(float)))))
        if verdict.norm_class == "lt2":
            assert rho < 2.0 + 1e-9
        elif verdict.norm_class == "eq2":
            assert abs(rho - 2.0) <= 1e-8
        else:
            assert rho > 2.0 - 1e-9


def test_symmetrize_rules():
    m = np.array([[0, 2], [1, 0]])
    graph = FusionGraph(("a", "b"), m, directed=True)
    summed = symmetrize(graph, "sum")
    assert summed.matrix.tolist() == [[0, 3], [3, 0]]
    support = symmetrize(graph, "support")
    assert support.matrix.tolist() == [[0, 1], [1, 0]]
    with pytest.raises(ValueError):
        symmetrize(graph, "other")


def test_matrix_homomorphism_all_pairs_on_verified_modules():
    modules = [
        standard_module(fibonacci()),
        standard_module(su2_level(3)),
        quotient_module(cyclic_group_ring(4), ["0", "2"]),
    ]
    for module in modules:
        for a in module.ring.basis:
            for b in module.ring.basis:
                assert matrix_homomorphism_check(module, a, b), (module.name, a, b)
