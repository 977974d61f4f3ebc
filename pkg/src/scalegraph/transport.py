"""Simulated message-passing ranks with barriered exchange phases.

A rank program is a callable taking a RankContext. Programs that talk to
other ranks are written as generators: each `inbox = yield` marks a phase
boundary, and everything sent with ctx.send() during the previous compute
step is delivered at that boundary. Plain (non-generator) callables run as
a single compute phase with no communication.

Delivery rules: a message sent in phase i is visible in phase i + 1 and
never earlier; all messages from rank a to rank b within one phase arrive
as one batch in send order; the full inbox is sorted by sender rank. The
schedule is deterministic for any worker count, so a program whose output
depends only on its rank id, its context RNG, and received messages yields
identical results for every worker count.
"""

from __future__ import annotations

import inspect
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, TextIO

import numpy as np

from .core import ConfigError, DEFAULT_SEED

KIND_COUNTS = "count-announcement"
KIND_ENDPOINTS = "endpoint-list"


class TransportError(RuntimeError):
    """Base class for rank-run failures."""


class ProtocolError(TransportError):
    """A message violated the exchange contract."""


class RankError(TransportError):
    """A rank program raised; the original exception is chained."""

    def __init__(self, rank: int, cause: BaseException):
        super().__init__(f"rank {rank} failed: {cause!r}")
        self.rank = rank


@dataclass(frozen=True)
class Message:
    src: int
    dst: int
    kind: str
    payload: np.ndarray  # 1-D uint64


class RankContext:
    """Per-rank view of a run: identity, an independent RNG, and send()."""

    def __init__(self, rank: int, nranks: int, rng: np.random.Generator):
        self.rank = rank
        self.nranks = nranks
        self.rng = rng
        self._outbox: list[Message] = []

    def send(self, dst: int, kind: str, payload: Any) -> None:
        """Queue a message for delivery at the next phase boundary."""
        data = np.ascontiguousarray(payload, dtype=np.uint64)
        if data.ndim != 1:
            raise ProtocolError(f"payload must be a flat u64 sequence, got shape {data.shape}")
        self._outbox.append(Message(self.rank, int(dst), kind, data))


def run_ranks(
    nranks: int,
    program: Callable[[RankContext], Any],
    *,
    workers: int = 1,
    master_seed: int = DEFAULT_SEED,
    debug: TextIO | None = None,
) -> list[Any]:
    """Run the program on every rank to completion; returns per-rank results.

    Each rank's RNG stream is seeded from (master_seed, rank), so results
    do not depend on the worker count or scheduling order. `debug` receives
    per-phase message volumes as "phase,from,to,bytes" CSV.
    """
    if nranks < 1:
        raise ConfigError(f"rank count must be >= 1, got {nranks}")
    if workers < 1:
        raise ConfigError(f"worker count must be >= 1, got {workers}")

    ctxs = [
        RankContext(r, nranks, np.random.default_rng((master_seed, r)))
        for r in range(nranks)
    ]
    results: list[Any] = [None] * nranks
    gens: dict[int, Any] = {}
    failures: dict[int, BaseException] = {}

    def start(rank: int) -> None:
        try:
            out = program(ctxs[rank])
        except Exception as exc:
            failures[rank] = exc
            return
        if inspect.isgenerator(out):
            gens[rank] = out
        else:
            results[rank] = out

    def advance(rank: int, inbox: list[Message], first: bool) -> bool:
        # returns True when the rank finished this phase
        try:
            if first:
                next(gens[rank])
            else:
                gens[rank].send(inbox)
            return False
        except StopIteration as stop:
            results[rank] = stop.value
            return True
        except Exception as exc:
            failures[rank] = exc
            return True

    if debug is not None:
        debug.write("phase,from,to,bytes\n")

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 and nranks > 1 else None
    try:
        if pool is not None:
            list(pool.map(start, range(nranks)))
        else:
            for r in range(nranks):
                start(r)
        _raise_first_failure(failures)

        inboxes: list[list[Message]] = [[] for _ in range(nranks)]
        first = True
        phase = 0
        active = sorted(gens)
        while active:
            if pool is not None:
                done_flags = list(
                    pool.map(lambda r: advance(r, inboxes[r], first), active)
                )
            else:
                done_flags = [advance(r, inboxes[r], first) for r in active]
            _raise_first_failure(failures)
            finished = {r for r, done in zip(active, done_flags) if done}
            active = [r for r in active if r not in finished]
            live = set(active)

            inboxes = [[] for _ in range(nranks)]
            volumes: dict[tuple[int, int], int] = {}
            for r in range(nranks):  # ascending sender order sorts inboxes by src
                for msg in ctxs[r]._outbox:
                    if not 0 <= msg.dst < nranks:
                        raise ProtocolError(
                            f"rank {r} sent {msg.kind} to out-of-range rank {msg.dst}"
                        )
                    if msg.dst not in live:
                        raise ProtocolError(
                            f"rank {r} sent {msg.kind} to finished rank {msg.dst}"
                        )
                    inboxes[msg.dst].append(msg)
                    key = (r, msg.dst)
                    volumes[key] = volumes.get(key, 0) + msg.payload.nbytes
                ctxs[r]._outbox = []
            if debug is not None:
                for (src, dst), nbytes in sorted(volumes.items()):
                    debug.write(f"{phase},{src},{dst},{nbytes}\n")
            first = False
            phase += 1
    finally:
        if pool is not None:
            pool.shutdown(wait=True)
    return results


def _raise_first_failure(failures: dict[int, BaseException]) -> None:
    if failures:
        rank = min(failures)
        raise RankError(rank, failures[rank]) from failures[rank]
