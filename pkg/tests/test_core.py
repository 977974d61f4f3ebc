import struct

import numpy as np
import pytest

from scalegraph import (
    ConfigError,
    EdgeList,
    FormatError,
    Partition,
    empty_edge_list,
    read_edge_list,
    write_edge_list,
)


class TestPartition:
    def test_block_ownership(self):
        part = Partition(ranks=4, vertices_per_rank=5)
        assert part.total_vertices == 20
        assert part.owner_of(0) == 0
        assert part.owner_of(4) == 0
        assert part.owner_of(5) == 1
        assert part.owner_of(19) == 3
        assert part.local_index(7) == 2
        assert part.rank_base(3) == 15

    def test_vertex_out_of_range(self):
        part = Partition(ranks=2, vertices_per_rank=3)
        with pytest.raises(ConfigError):
            part.owner_of(6)
        with pytest.raises(ConfigError):
            part.owner_of(-1)
        with pytest.raises(ConfigError):
            part.rank_base(2)

    @pytest.mark.parametrize("ranks,n", [(0, 5), (3, 0), (-1, 1)])
    def test_bad_shape(self, ranks, n):
        with pytest.raises(ConfigError):
            Partition(ranks=ranks, vertices_per_rank=n)


class TestEdgeList:
    def test_basic(self):
        g = EdgeList(np.array([[0, 1], [2, 0]]), 3)
        assert g.edge_count == 2
        assert len(g) == 2
        assert g.edges.dtype == np.uint64
        assert not g.edges.flags.writeable

    def test_endpoint_beyond_vertex_count(self):
        with pytest.raises(ConfigError):
            EdgeList(np.array([[0, 3]]), 3)

    def test_bad_shape(self):
        with pytest.raises(ConfigError):
            EdgeList(np.arange(6).reshape(2, 3), 10)

    def test_empty(self):
        g = empty_edge_list(5)
        assert g.edge_count == 0
        assert g.vertex_count == 5


class TestTextFormat:
    def test_round_trip(self, tmp_path):
        g = EdgeList(np.array([[0, 1], [1, 2], [2, 0]]), 3)
        dest = tmp_path / "g.txt"
        written = write_edge_list(g, dest, fmt="text")
        assert written == dest.stat().st_size
        back = read_edge_list(dest, fmt="text")
        assert (back.edges == g.edges).all()
        assert back.vertex_count == 3

    def test_comments_and_blanks(self, tmp_path):
        src = tmp_path / "g.txt"
        src.write_text("# header\n\n0 1\n 2 3  # trailing\n\n")
        g = read_edge_list(src)
        assert g.edges.tolist() == [[0, 1], [2, 3]]
        assert g.vertex_count == 4

    def test_dedupe_on_write(self, tmp_path):
        g = EdgeList(np.array([[1, 0], [0, 1], [1, 0]]), 2)
        dest = tmp_path / "g.txt"
        write_edge_list(g, dest, fmt="text", dedupe=True)
        assert dest.read_text() == "0 1\n1 0\n"

    @pytest.mark.parametrize(
        "line,fragment",
        [
            ("0 1 2", "expected 'u v'"),
            ("0", "expected 'u v'"),
            ("a b", "non-numeric"),
            ("0 -1", "negative"),
        ],
    )
    def test_malformed_line_reports_position(self, tmp_path, line, fragment):
        src = tmp_path / "bad.txt"
        src.write_text(f"0 1\n{line}\n")
        with pytest.raises(FormatError, match=fragment) as info:
            read_edge_list(src, fmt="text")
        assert ":2:" in str(info.value)

    def test_empty_file(self, tmp_path):
        src = tmp_path / "empty.txt"
        src.write_text("# nothing\n")
        g = read_edge_list(src, fmt="text")
        assert g.edge_count == 0
        assert g.vertex_count == 0


class TestBinaryFormat:
    def test_exact_layout(self, tmp_path):
        # 16-byte header then little-endian u64 pairs, nothing else
        g = EdgeList(np.array([[1, 2], [3, 4]]), 7)
        dest = tmp_path / "g.bin"
        write_edge_list(g, dest, fmt="binary")
        blob = dest.read_bytes()
        expected = struct.pack("<4sIQ", b"GGEL", 1, 7) + struct.pack(
            "<4Q", 1, 2, 3, 4
        )
        assert blob == expected

    def test_round_trip(self, tmp_path):
        g = EdgeList(np.array([[0, 5], [5, 0], [2, 2]]), 9)
        dest = tmp_path / "g.bin"
        write_edge_list(g, dest, fmt="binary")
        back = read_edge_list(dest, fmt="binary")
        assert (back.edges == g.edges).all()
        assert back.vertex_count == 9

    def test_bad_magic(self, tmp_path):
        dest = tmp_path / "g.bin"
        dest.write_bytes(b"NOPE" + bytes(12))
        with pytest.raises(FormatError, match="magic"):
            read_edge_list(dest, fmt="binary")

    def test_truncated_header(self, tmp_path):
        dest = tmp_path / "g.bin"
        dest.write_bytes(b"GGEL\x01")
        with pytest.raises(FormatError, match="truncated header"):
            read_edge_list(dest, fmt="binary")

    def test_bad_version(self, tmp_path):
        dest = tmp_path / "g.bin"
        dest.write_bytes(struct.pack("<4sIQ", b"GGEL", 9, 0))
        with pytest.raises(FormatError, match="version"):
            read_edge_list(dest, fmt="binary")

    def test_ragged_payload(self, tmp_path):
        dest = tmp_path / "g.bin"
        dest.write_bytes(struct.pack("<4sIQ", b"GGEL", 1, 4) + bytes(20))
        with pytest.raises(FormatError, match="pairs"):
            read_edge_list(dest, fmt="binary")


class TestAutoSniffing:
    def test_detects_binary(self, tmp_path):
        g = EdgeList(np.array([[0, 1]]), 2)
        dest = tmp_path / "g.dat"
        write_edge_list(g, dest, fmt="binary")
        back = read_edge_list(dest)
        assert (back.edges == g.edges).all()

    def test_falls_back_to_text(self, tmp_path):
        dest = tmp_path / "g.dat"
        dest.write_text("3 4\n")
        back = read_edge_list(dest)
        assert back.edges.tolist() == [[3, 4]]

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            read_edge_list(tmp_path / "absent.dat")

    def test_unknown_format_name(self, tmp_path):
        g = EdgeList(np.array([[0, 1]]), 2)
        with pytest.raises(ConfigError):
            write_edge_list(g, tmp_path / "g", fmt="csv")
