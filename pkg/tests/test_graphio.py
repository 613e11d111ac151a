import numpy as np
import pytest
import scipy.sparse as sp

from llrgraph.graphio import read_graph, read_labels, write_graph, write_labels


def _random_symmetric(rng, n, density=0.3):
    mask = rng.random((n, n)) < density
    vals = rng.standard_normal((n, n)) * np.exp(rng.standard_normal((n, n)))
    upper = np.triu(np.where(mask, vals, 0.0), 1)
    return sp.csr_matrix(upper + upper.T)


def test_graph_roundtrip_bit_exact(tmp_path):
    rng = np.random.Generator(np.random.PCG64(0))
    for trial in range(10):
        W = _random_symmetric(rng, int(rng.integers(2, 25)))
        path = tmp_path / f"g{trial}.txt"
        write_graph(path, W)
        back = read_graph(path)
        assert back.shape == W.shape
        assert np.array_equal(back.toarray(), W.toarray()), f"trial {trial}"
        # writing the read-back graph reproduces the file byte for byte
        path2 = tmp_path / f"g{trial}b.txt"
        write_graph(path2, back)
        assert path.read_bytes() == path2.read_bytes()


def test_graph_file_shape(tmp_path):
    W = sp.csr_matrix(np.array([[0.0, 1.5, 0.0], [1.5, 0.0, 0.25], [0.0, 0.25, 0.0]]))
    path = tmp_path / "g.txt"
    write_graph(path, W)
    lines = path.read_text().splitlines()
    assert lines[0] == "llr-graph v1 n=3 sym=1"
    assert lines[1] == "0 1 1.5"
    assert lines[2] == "1 2 0.25"
    assert len(lines) == 3


def test_write_graph_rejects_non_square(tmp_path):
    with pytest.raises(ValueError, match="square"):
        write_graph(tmp_path / "bad.txt", sp.csr_matrix((2, 3)))


def test_read_graph_header_errors(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("")
    with pytest.raises(ValueError, match="empty graph file"):
        read_graph(path)
    path.write_text("llr-graph v2 n=3 sym=1\n")
    with pytest.raises(ValueError, match="bad graph header"):
        read_graph(path)
    path.write_text("3 nodes\n0 1 1.0\n")
    with pytest.raises(ValueError, match="bad graph header"):
        read_graph(path)


def test_read_graph_body_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("llr-graph v1 n=3 sym=1\n0 1 1.0\n0 1\n")
    with pytest.raises(ValueError, match=r"g\.txt:3: expected"):
        read_graph(path)
    path.write_text("llr-graph v1 n=3 sym=1\n1 0 1.0\n")
    with pytest.raises(ValueError, match=r"g\.txt:2: indices"):
        read_graph(path)
    path.write_text("llr-graph v1 n=3 sym=1\n0 3 1.0\n")
    with pytest.raises(ValueError, match="indices must satisfy"):
        read_graph(path)
    path.write_text("llr-graph v1 n=3 sym=1\n1 1 1.0\n")
    with pytest.raises(ValueError, match="indices must satisfy"):
        read_graph(path)


def test_read_graph_skips_blank_lines(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("llr-graph v1 n=2 sym=1\n\n0 1 2.0\n\n")
    W = read_graph(path)
    assert W[0, 1] == 2.0 and W[1, 0] == 2.0


def test_read_graph_mirrors_to_symmetric(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("llr-graph v1 n=4 sym=1\n0 2 0.125\n1 3 7.0\n")
    W = read_graph(path).toarray()
    assert np.array_equal(W, W.T)
    assert W[2, 0] == 0.125 and W[3, 1] == 7.0


def test_graph_weights_survive_full_precision(tmp_path):
    # pi to full double precision must roundtrip exactly via repr
    W = sp.csr_matrix(np.array([[0.0, np.pi], [np.pi, 0.0]]))
    path = tmp_path / "g.txt"
    write_graph(path, W)
    assert read_graph(path)[0, 1] == np.pi


def test_labels_roundtrip(tmp_path):
    labels = np.array([0, 2, 2, 1, 0], dtype=np.int64)
    path = tmp_path / "labels.txt"
    write_labels(path, labels)
    assert path.read_text() == "0\n2\n2\n1\n0\n"
    assert np.array_equal(read_labels(path), labels)
