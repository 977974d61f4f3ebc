"""Faction configuration: per-rank target groups for phase-1 attachment.

A faction is an ordered group of ranks used as attachment targets. Each
rank is assigned to one or more factions; the concatenation of its
assigned factions' members seeds the first entries of its association
list. Assignment is independent of appearing in a faction's member list:
a rank can be assigned a faction that does not contain it.

File format: one line of space-separated rank ids per faction, in faction
order. "#" comments and blank lines are ignored. Optional lines of the
form "member <rank>: <faction index> <faction index> ..." override that
rank's assignment; ranks without an override are assigned every faction
whose member list contains them, in faction order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ConfigError, FormatError


@dataclass(frozen=True)
class FactionConfig:
    """Validated faction layout for a fixed number of ranks."""

    nranks: int
    factions: tuple[tuple[int, ...], ...]
    membership: tuple[tuple[int, ...], ...]  # per rank: assigned faction indices

    @staticmethod
    def build(
        nranks: int,
        factions: list[list[int]] | tuple[tuple[int, ...], ...],
        membership: dict[int, list[int]] | None = None,
    ) -> "FactionConfig":
        """Validate and freeze a configuration.

        membership maps rank to assigned faction indices; unlisted ranks
        default to the factions containing them.
        """
        if nranks < 1:
            raise ConfigError(f"rank count must be >= 1, got {nranks}")
        if not factions:
            raise ConfigError("at least one faction is required")
        frozen = []
        for i, members in enumerate(factions):
            if not members:
                raise ConfigError(f"faction {i} is empty")
            seen = set()
            for rank in members:
                if not 0 <= rank < nranks:
                    raise ConfigError(
                        f"faction {i} lists rank {rank}, outside [0, {nranks})"
                    )
                if rank in seen:
                    raise ConfigError(f"faction {i} lists rank {rank} twice")
                seen.add(rank)
            frozen.append(tuple(int(r) for r in members))

        assigned: list[tuple[int, ...]] = []
        overrides = dict(membership or {})
        for rank in overrides:
            if not 0 <= rank < nranks:
                raise ConfigError(f"membership names rank {rank}, outside [0, {nranks})")
        for rank in range(nranks):
            if rank in overrides:
                idxs = [int(i) for i in overrides[rank]]
                for i in idxs:
                    if not 0 <= i < len(frozen):
                        raise ConfigError(
                            f"rank {rank} assigned unknown faction {i}"
                        )
            else:
                idxs = [i for i, members in enumerate(frozen) if rank in members]
            if not idxs:
                raise ConfigError(f"rank {rank} belongs to no faction")
            assigned.append(tuple(idxs))
        return FactionConfig(nranks, tuple(frozen), tuple(assigned))

    @staticmethod
    def all_ranks(nranks: int) -> "FactionConfig":
        """Single faction containing every rank."""
        return FactionConfig.build(nranks, [list(range(nranks))])

    @staticmethod
    def blocks(nranks: int, block: int) -> "FactionConfig":
        """Consecutive blocks of `block` ranks; the last block may be short."""
        if block < 1:
            raise ConfigError(f"block size must be >= 1, got {block}")
        groups = [
            list(range(lo, min(lo + block, nranks)))
            for lo in range(0, nranks, block)
        ]
        return FactionConfig.build(nranks, groups)

    @staticmethod
    def from_file(path: str | Path, nranks: int) -> "FactionConfig":
        path = Path(path)
        factions: list[list[int]] = []
        overrides: dict[int, list[int]] = {}
        with open(path, "r", encoding="ascii") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    if line.startswith("member"):
                        head, _, tail = line[len("member"):].partition(":")
                        if not tail and ":" not in line:
                            raise ValueError("missing ':'")
                        overrides[int(head)] = [int(t) for t in tail.split()]
                    else:
                        factions.append([int(t) for t in line.split()])
                except ValueError as exc:
                    raise FormatError(f"{path}:{lineno}: {exc}") from exc
        if not factions:
            raise FormatError(f"{path}: no factions defined")
        return FactionConfig.build(nranks, factions, overrides)

    @staticmethod
    def from_spec(spec: str, nranks: int) -> "FactionConfig":
        """Parse the CLI shorthand: "all" or "blocks:<m>"."""
        if spec == "all":
            return FactionConfig.all_ranks(nranks)
        if spec.startswith("blocks:"):
            try:
                block = int(spec.split(":", 1)[1])
            except ValueError as exc:
                raise ConfigError(f"bad faction shorthand {spec!r}") from exc
            return FactionConfig.blocks(nranks, block)
        raise ConfigError(f"bad faction shorthand {spec!r}, expected 'all' or 'blocks:<m>'")

    def prefix_targets(self, rank: int) -> np.ndarray:
        """Concatenated members of the rank's assigned factions, in order."""
        flat: list[int] = []
        for i in self.membership[rank]:
            flat.extend(self.factions[i])
        return np.asarray(flat, dtype=np.int64)

    def prefix_len(self, rank: int) -> int:
        return sum(len(self.factions[i]) for i in self.membership[rank])

    def faction_union(self, rank: int) -> frozenset[int]:
        """Every rank appearing in any of the rank's assigned factions."""
        union: set[int] = set()
        for i in self.membership[rank]:
            union.update(self.factions[i])
        return frozenset(union)
