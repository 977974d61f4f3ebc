import numpy as np
import pytest

from scalegraph import ConfigError, FactionConfig, FormatError

from conftest import FIXTURES


class TestBuild:
    def test_default_membership_from_containment(self):
        fc = FactionConfig.build(4, [[1, 2], [1, 3], [0, 1]])
        assert fc.membership[0] == (2,)
        assert fc.membership[1] == (0, 1, 2)
        assert fc.membership[2] == (0,)
        assert fc.membership[3] == (1,)

    def test_override_decouples_assignment_from_containment(self):
        fc = FactionConfig.build(4, [[1, 2], [1, 3], [0, 1]], {0: [0, 2]})
        assert fc.membership[0] == (0, 2)
        # rank 0 is assigned faction 0 despite not appearing in it
        assert 0 not in fc.factions[0]

    def test_empty_faction(self):
        with pytest.raises(ConfigError, match="empty"):
            FactionConfig.build(2, [[0], []])

    def test_duplicate_rank_in_faction(self):
        with pytest.raises(ConfigError, match="twice"):
            FactionConfig.build(3, [[1, 1]])

    def test_rank_out_of_range(self):
        with pytest.raises(ConfigError, match="outside"):
            FactionConfig.build(2, [[0, 2]])

    def test_unknown_faction_in_override(self):
        with pytest.raises(ConfigError, match="unknown faction"):
            FactionConfig.build(2, [[0, 1]], {0: [1]})

    def test_rank_without_faction(self):
        with pytest.raises(ConfigError, match="no faction"):
            FactionConfig.build(3, [[0, 1]])

    def test_no_factions(self):
        with pytest.raises(ConfigError):
            FactionConfig.build(2, [])


class TestLayouts:
    def test_all_ranks(self):
        fc = FactionConfig.all_ranks(3)
        assert fc.factions == ((0, 1, 2),)
        assert all(fc.membership[r] == (0,) for r in range(3))

    def test_blocks_even(self):
        fc = FactionConfig.blocks(6, 2)
        assert fc.factions == ((0, 1), (2, 3), (4, 5))

    def test_blocks_ragged_tail(self):
        fc = FactionConfig.blocks(5, 2)
        assert fc.factions == ((0, 1), (2, 3), (4,))
        assert fc.membership[4] == (2,)

    def test_blocks_bad_size(self):
        with pytest.raises(ConfigError):
            FactionConfig.blocks(4, 0)


class TestPrefix:
    def test_prefix_concatenates_assigned_factions(self):
        fc = FactionConfig.build(4, [[1, 2], [1, 3], [0, 1]], {0: [0, 2]})
        assert fc.prefix_targets(0).tolist() == [1, 2, 0, 1]
        assert fc.prefix_targets(1).tolist() == [1, 2, 1, 3, 0, 1]
        assert fc.prefix_len(1) == 6

    def test_prefix_dtype(self):
        fc = FactionConfig.all_ranks(2)
        assert fc.prefix_targets(0).dtype == np.int64

    def test_faction_union(self):
        fc = FactionConfig.build(4, [[1, 2], [1, 3], [0, 1]], {0: [0, 2]})
        assert fc.faction_union(0) == {0, 1, 2}
        assert fc.faction_union(1) == {0, 1, 2, 3}
        assert fc.faction_union(3) == {1, 3}


class TestFromFile:
    def test_fixture_layout(self):
        fc = FactionConfig.from_file(FIXTURES / "demo4.factions", 4)
        assert fc.factions == ((1, 2), (1, 3), (0, 1))
        assert fc.membership[0] == (0, 2)
        assert fc.prefix_targets(0).tolist() == [1, 2, 0, 1]

    def test_member_line_parsing(self, tmp_path):
        path = tmp_path / "f.factions"
        path.write_text("0 1\n1 2\nmember 2 : 0\n")
        fc = FactionConfig.from_file(path, 3)
        assert fc.membership[2] == (0,)

    def test_bad_token_reports_line(self, tmp_path):
        path = tmp_path / "f.factions"
        path.write_text("0 1\nnope nope\n")
        with pytest.raises(FormatError, match=":2:"):
            FactionConfig.from_file(path, 2)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "f.factions"
        path.write_text("# only comments\n")
        with pytest.raises(FormatError, match="no factions"):
            FactionConfig.from_file(path, 2)


class TestFromSpec:
    def test_all(self):
        assert FactionConfig.from_spec("all", 3).factions == ((0, 1, 2),)

    def test_blocks(self):
        assert FactionConfig.from_spec("blocks:2", 4).factions == ((0, 1), (2, 3))

    @pytest.mark.parametrize("spec", ["", "rings:2", "blocks:x", "blocks:"])
    def test_bad_shorthand(self, spec):
        with pytest.raises(ConfigError):
            FactionConfig.from_spec(spec, 4)
