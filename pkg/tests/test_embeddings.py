import numpy as np
import pytest

from neolexica.embeddings import (
    AlignmentTransform,
    EmbeddingSpace,
    cosine,
    neighborhood,
    procrustes_align,
    project,
    project_space,
    read_embeddings_binary,
    read_embeddings_text,
    read_transform,
    write_embeddings_binary,
    write_embeddings_text,
    write_transform,
)


def random_orthogonal(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def make_space(words, matrix, provenance="sgns-historical"):
    return EmbeddingSpace(words, np.asarray(matrix, dtype=np.float64), provenance)


# -- cosine -------------------------------------------------------------------

def test_cosine_self_is_one():
    assert cosine(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == 1.0
    v = np.array([0.3, -1.2, 4.0])
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)


def test_cosine_orthogonal_unit_vectors():
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0


def test_cosine_hand_example():
    assert cosine(np.array([1.0, 2.0]), np.array([2.0, 1.0])) == pytest.approx(0.8, abs=1e-12)


def test_cosine_symmetry_exact(rng):
    for _ in range(200):
        u = rng.standard_normal(8)
        v = rng.standard_normal(8)
        assert cosine(u, v) == cosine(v, u)


def test_cosine_zero_vector_error():
    with pytest.raises(ValueError):
        cosine(np.zeros(3), np.ones(3))


def test_cosine_clamped(rng):
    for _ in range(100):
        u = rng.standard_normal(5)
        assert -1.0 <= cosine(u, -3.0 * u) <= 1.0


# -- neighborhood -------------------------------------------------------------

def _toy_space():
    # hand-set cosines against the query (1, 0): 0.9-ish, 0.5, 0.1
    def vec(c):
        return [c, np.sqrt(1 - c * c)]

    return make_space(["high", "mid", "low"], [vec(0.9), vec(0.5), vec(0.1)])


def test_neighborhood_hand_computed():
    space = _toy_space()
    q = np.array([1.0, 0.0])
    got = neighborhood(space, q, "query", 0.4)
    assert got.members == ("high", "mid")
    assert len(got) == 2
    assert "high" in got and "low" not in got


def test_neighborhood_tau_near_one_empty(rng):
    space = make_space([f"w{i}" for i in range(50)], rng.standard_normal((50, 8)))
    got = neighborhood(space, rng.standard_normal(8), "query", 0.999999)
    assert got.members == ()


def test_neighborhood_excludes_query_word():
    space = _toy_space()
    got = neighborhood(space, space.vector("high"), "high", 0.4)
    assert "high" not in got.members


def test_neighborhood_nested_thresholds(rng):
    space = make_space([f"w{i}" for i in range(80)], rng.standard_normal((80, 6)))
    q = rng.standard_normal(6)
    inner = set(neighborhood(space, q, "q", 0.6).members)
    outer = set(neighborhood(space, q, "q", 0.4).members)
    assert inner <= outer


def test_neighborhood_closed_vs_open():
    space = _toy_space()
    q = np.array([1.0, 0.0])
    c = cosine(space.vector("mid"), q)
    closed = neighborhood(space, q, "q", c, closed=True)
    opened = neighborhood(space, q, "q", c, closed=False)
    assert "mid" in closed.members and "mid" not in opened.members


def test_neighborhood_exclude_extra_words():
    space = _toy_space()
    got = neighborhood(space, np.array([1.0, 0.0]), "q", 0.4, exclude=["mid"])
    assert got.members == ("high",)


def test_neighborhood_tau_validation():
    with pytest.raises(ValueError):
        neighborhood(_toy_space(), np.array([1.0, 0.0]), "q", 1.0)


def test_neighborhood_brute_force_scan(rng):
    space = make_space([f"w{i}" for i in range(60)], rng.standard_normal((60, 7)))
    for _ in range(20):
        q = rng.standard_normal(7)
        tau = float(rng.uniform(-0.5, 0.8))
        got = set(neighborhood(space, q, "w0", tau).members)
        expected = {
            w for w in space.words if w != "w0" and cosine(space.vector(w), q) >= tau
        }
        assert got == expected


# -- procrustes and projection -------------------------------------------------

def test_procrustes_identity():
    rng = np.random.default_rng(0)
    space = make_space([f"w{i}" for i in range(30)], rng.standard_normal((30, 10)))
    t = procrustes_align(space, space)
    assert np.abs(t.matrix - np.eye(10)).max() < 1e-10
    assert t.residual < 1e-9
    assert t.anchor_count == 30


def test_procrustes_planted_rotation(rng):
    A = rng.standard_normal((100, 50))
    Q = random_orthogonal(rng, 50)
    units = A / np.linalg.norm(A, axis=1, keepdims=True)
    words = [f"w{i}" for i in range(100)]
    src = make_space(words, A, "sgns-modern")
    tgt = make_space(words, units @ Q, "sgns-historical")
    t = procrustes_align(src, tgt)
    assert np.abs(t.matrix - Q).max() < 1e-5
    assert t.residual <= 1e-6
    assert np.abs(t.matrix.T @ t.matrix - np.eye(50)).max() <= 1e-6


def test_procrustes_noisy_beats_identity(rng):
    A = rng.standard_normal((80, 20))
    Q = random_orthogonal(rng, 20)
    units = A / np.linalg.norm(A, axis=1, keepdims=True)
    noisy = units @ Q + rng.normal(0.0, 0.01, (80, 20))
    words = [f"w{i}" for i in range(80)]
    src = make_space(words, A, "sgns-modern")
    tgt = make_space(words, noisy, "sgns-historical")
    t = procrustes_align(src, tgt)
    tgt_units = tgt.unit_matrix()
    identity_residual = float(np.linalg.norm(src.unit_matrix() - tgt_units))
    assert 0.0 < t.residual <= identity_residual


def test_procrustes_optimality_spot_check(rng):
    A = rng.standard_normal((40, 12))
    B = rng.standard_normal((40, 12))
    words = [f"w{i}" for i in range(40)]
    src, tgt = make_space(words, A, "sgns-modern"), make_space(words, B)
    t = procrustes_align(src, tgt)
    Au, Bu = src.unit_matrix(), tgt.unit_matrix()
    for _ in range(100):
        m = random_orthogonal(rng, 12)
        assert t.residual <= np.linalg.norm(Au @ m - Bu) + 1e-12


def test_procrustes_errors():
    a = make_space(["x1"], [[1.0, 0.0]], "sgns-modern")
    b = make_space(["y1"], [[1.0, 0.0]])
    with pytest.raises(ValueError, match="shared"):
        procrustes_align(a, b)
    c = make_space(["x1"], [[1.0, 0.0, 0.0]])
    with pytest.raises(ValueError, match="dimension"):
        procrustes_align(a, c)


def test_procrustes_few_anchors_warns(rng):
    words = ["w0", "w1"]
    a = make_space(words, rng.standard_normal((2, 5)), "sgns-modern")
    b = make_space(words, rng.standard_normal((2, 5)))
    with pytest.warns(UserWarning, match="anchors"):
        procrustes_align(a, b)


def test_project_identity_no_op(rng):
    space = make_space(["aa"], rng.standard_normal((1, 6)), "sgns-modern")
    t = AlignmentTransform(np.eye(6), 10, 0.0)
    assert np.array_equal(project(space, t, "aa"), space.vector("aa"))


def test_project_recovers_target(rng):
    A = rng.standard_normal((60, 16))
    Q = random_orthogonal(rng, 16)
    units = A / np.linalg.norm(A, axis=1, keepdims=True)
    words = [f"w{i}" for i in range(60)]
    src = make_space(words, A, "sgns-modern")
    tgt = make_space(words, units @ Q)
    t = procrustes_align(src, tgt)
    for w in words[:5]:
        projected = project(src, t, w)
        projected /= np.linalg.norm(projected)
        assert np.abs(projected - tgt.vector(w)).max() < 1e-5


def test_project_preserves_norm(rng):
    space = make_space(["aa"], rng.standard_normal((1, 12)), "sgns-modern")
    t = AlignmentTransform(random_orthogonal(rng, 12), 5, 0.1)
    v = space.vector("aa")
    assert abs(np.linalg.norm(project(space, t, "aa")) - np.linalg.norm(v)) < 1e-9


def test_project_missing_word():
    space = make_space(["aa"], [[1.0, 0.0]], "sgns-modern")
    t = AlignmentTransform(np.eye(2), 1, 0.0)
    with pytest.raises(KeyError):
        project(space, t, "missing")


def test_project_space_provenance(rng):
    space = make_space(["aa", "bb"], rng.standard_normal((2, 4)), "sgns-modern")
    t = AlignmentTransform(random_orthogonal(rng, 4), 2, 0.0)
    out = project_space(space, t)
    assert out.provenance == "sgns-modern-projected"
    assert np.allclose(out.vector("aa"), project(space, t, "aa"))


def test_transform_orthogonality_enforced():
    with pytest.raises(ValueError, match="orthogonal"):
        AlignmentTransform(np.array([[1.0, 0.5], [0.0, 1.0]]), 2, 0.0)


# -- files ---------------------------------------------------------------------

def test_emb_binary_bit_exact_roundtrip(tmp_path, rng):
    words = ["plain", "bæ", "héllo", "日本語"]
    space = EmbeddingSpace(
        words, rng.standard_normal((4, 7)).astype(np.float32), "sgns-historical"
    )
    p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
    write_embeddings_binary(space, p1)
    loaded = read_embeddings_binary(p1, "sgns-historical")
    write_embeddings_binary(loaded, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert loaded.words == space.words


def test_emb_text_binary_identical_in_memory(tmp_path, rng):
    words = [f"w{i}" for i in range(10)]
    space = EmbeddingSpace(
        words, rng.standard_normal((10, 5)).astype(np.float32), "sgns-modern"
    )
    tp, bp = tmp_path / "e.txt", tmp_path / "e.bin"
    write_embeddings_text(space, tp)
    write_embeddings_binary(space, bp)
    st = read_embeddings_text(tp, "sgns-modern")
    sb = read_embeddings_binary(bp, "sgns-modern")
    assert st.words == sb.words
    assert np.array_equal(st.matrix, sb.matrix)


def test_emb_text_header_check(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("not a header line\n")
    with pytest.raises(ValueError):
        read_embeddings_text(p, "sgns-modern")


def test_transform_file_roundtrip(rng):
    import tempfile

    t = AlignmentTransform(random_orthogonal(rng, 9), 42, 0.123456789)
    with tempfile.TemporaryDirectory() as d:
        path = f"{d}/t.txt"
        write_transform(t, path)
        back = read_transform(path)
    assert np.array_equal(back.matrix, t.matrix)
    assert back.anchor_count == 42
    assert back.residual == t.residual


def test_space_validation():
    with pytest.raises(ValueError, match="provenance"):
        EmbeddingSpace(["aa"], np.ones((1, 2)), "mystery")
    with pytest.raises(ValueError, match="NaN"):
        EmbeddingSpace(["aa"], np.array([[np.nan, 1.0]]), "sgns-modern")
    with pytest.raises(ValueError, match="duplicate"):
        EmbeddingSpace(["aa", "aa"], np.ones((2, 2)), "sgns-modern")
