"""Semi-volatile key-value store where unaccessed entries fade away.

Time is logical: the caller advances epochs explicitly, so every run
is deterministic. Capacity pressure evicts strict-LRU; epoch advances
eagerly remove entries that have gone unaccessed longer than the fade
lifetime. Space reclaimed by fading is free by construction — nothing
is erased, the charge simply stops being refreshed.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, TextIO

from .errors import TraceError, WastekitError


@dataclass(frozen=True)
class LandfillConfig:
    capacity_bytes: int
    fade_lifetime_epochs: int
    refresh_on_read: bool = True

    def __post_init__(self):
        if self.capacity_bytes <= 0:
            raise WastekitError("capacity_bytes must be > 0")
        if self.fade_lifetime_epochs < 1:
            raise WastekitError("fade_lifetime_epochs must be >= 1")


@dataclass
class LandfillEntry:
    key: bytes
    value: bytes
    last_access_epoch: int

    @property
    def size_bytes(self) -> int:
        return len(self.value)


class PutOutcome(Enum):
    STORED = "stored"
    REJECTED_TOO_LARGE = "rejected_too_large"


@dataclass(frozen=True)
class FadeStats:
    entries_faded: int
    bytes_reclaimed: int


@dataclass(frozen=True)
class LandfillStats:
    live_entries: int
    live_bytes: int
    capacity_bytes: int
    current_epoch: int
    lifetime_evictions: int
    lifetime_fades: int

    def to_json_obj(self) -> dict:
        return {
            "live_entries": self.live_entries,
            "live_bytes": self.live_bytes,
            "capacity_bytes": self.capacity_bytes,
            "current_epoch": self.current_epoch,
            "lifetime_evictions": self.lifetime_evictions,
            "lifetime_fades": self.lifetime_fades,
        }


class DigitalLandfill:
    """LRU store with fading entries.

    Both eviction and fading need "oldest first" ordering, served by a
    single min-heap of (last_access_epoch, key) records with lazy
    deletion: refreshing an entry just pushes a newer record, and heap
    records that disagree with the live table are discarded when they
    surface. Amortized O(log n) per operation regardless of trace
    shape.
    """

    def __init__(self, config: LandfillConfig, log: Optional[TextIO] = None):
        self.config = config
        self._entries: dict[bytes, LandfillEntry] = {}
        self._heap: list[tuple[int, bytes]] = []
        self._live_bytes = 0
        self._epoch = 0
        self._evictions = 0
        self._fades = 0
        self._log = log

    # -- helpers -------------------------------------------------------

    def _touch(self, entry: LandfillEntry) -> None:
        entry.last_access_epoch = self._epoch
        heapq.heappush(self._heap, (self._epoch, entry.key))

    def _pop_oldest(self) -> LandfillEntry:
        """Pop the live entry with the smallest (epoch, key), discarding
        stale heap records along the way."""
        while True:
            epoch, key = heapq.heappop(self._heap)
            entry = self._entries.get(key)
            if entry is not None and entry.last_access_epoch == epoch:
                del self._entries[key]
                self._live_bytes -= entry.size_bytes
                return entry

    def _log_line(self, line: str) -> None:
        if self._log is not None:
            self._log.write(line + "\n")

    # -- operations ----------------------------------------------------

    def put(self, key: bytes, value: bytes) -> PutOutcome:
        if len(value) > self.config.capacity_bytes:
            return PutOutcome.REJECTED_TOO_LARGE
        self._log_line(f"PUT {key.decode('utf-8', 'backslashreplace')} {len(value)}")
        existing = self._entries.pop(key, None)
        if existing is not None:
            # Overwrite: not an eviction, the key stays live.
            self._live_bytes -= existing.size_bytes
        while self._live_bytes + len(value) > self.config.capacity_bytes:
            self._pop_oldest()
            self._evictions += 1
        entry = LandfillEntry(key=key, value=value, last_access_epoch=self._epoch)
        self._entries[key] = entry
        self._live_bytes += len(value)
        heapq.heappush(self._heap, (self._epoch, key))
        return PutOutcome.STORED

    def get(self, key: bytes) -> Optional[bytes]:
        """Return the value, or None once the entry has faded or was
        never stored. Fading is applied eagerly at epoch advances, so
        presence in the table means the entry is live."""
        self._log_line(f"GET {key.decode('utf-8', 'backslashreplace')}")
        entry = self._entries.get(key)
        if entry is None:
            return None
        if self.config.refresh_on_read and entry.last_access_epoch != self._epoch:
            self._touch(entry)
        return entry.value

    def advance_epoch(self, n: int) -> FadeStats:
        if n < 1:
            raise WastekitError("advance_epoch requires n >= 1")
        self._log_line(f"ADV {n}")
        self._epoch += n
        threshold = self._epoch - self.config.fade_lifetime_epochs
        faded = 0
        reclaimed = 0
        # Entries fade when current_epoch - last_access > lifetime,
        # i.e. last_access < threshold (strict).
        while self._heap:
            epoch, key = self._heap[0]
            entry = self._entries.get(key)
            if entry is None or entry.last_access_epoch != epoch:
                heapq.heappop(self._heap)
                continue
            if epoch >= threshold:
                break
            heapq.heappop(self._heap)
            del self._entries[key]
            self._live_bytes -= entry.size_bytes
            faded += 1
            reclaimed += entry.size_bytes
        self._fades += faded
        return FadeStats(entries_faded=faded, bytes_reclaimed=reclaimed)

    def stats(self) -> LandfillStats:
        return LandfillStats(
            live_entries=len(self._entries),
            live_bytes=self._live_bytes,
            capacity_bytes=self.config.capacity_bytes,
            current_epoch=self._epoch,
            lifetime_evictions=self._evictions,
            lifetime_fades=self._fades,
        )

    def live_keys(self) -> list[bytes]:
        return sorted(self._entries)


# -- trace replay ------------------------------------------------------
#
# Trace grammar, one operation per line (the op log uses the same):
#   PUT <key> <size>
#   GET <key>
#   ADV <n>
# Keys are whitespace-free tokens; blank lines and #-comments ignored.
# PUT carries a size, not content: replay materializes a zero-filled
# value of that length, which is indistinguishable from real content
# as far as accounting goes.

TraceOp = tuple  # ("PUT", key, size) | ("GET", key) | ("ADV", n)


def parse_trace(lines: Iterable[str]) -> list[TraceOp]:
    ops: list[TraceOp] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        verb = parts[0].upper()
        try:
            if verb == "PUT":
                if len(parts) != 3:
                    raise ValueError("expected: PUT <key> <size>")
                size = int(parts[2])
                if size < 0:
                    raise ValueError("size must be >= 0")
                ops.append(("PUT", parts[1].encode("utf-8"), size))
            elif verb == "GET":
                if len(parts) != 2:
                    raise ValueError("expected: GET <key>")
                ops.append(("GET", parts[1].encode("utf-8")))
            elif verb == "ADV":
                if len(parts) != 2:
                    raise ValueError("expected: ADV <n>")
                n = int(parts[1])
                if n < 1:
                    raise ValueError("n must be >= 1")
                ops.append(("ADV", n))
            else:
                raise ValueError(f"unknown operation {parts[0]!r}")
        except ValueError as exc:
            raise TraceError(f"trace line {lineno}: {exc}") from exc
    return ops


def load_trace(path: str) -> list[TraceOp]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_trace(fh)
    except OSError as exc:
        raise WastekitError(f"cannot read trace file {path}: {exc}") from exc


def replay(store: DigitalLandfill, ops: Iterable[TraceOp]) -> Iterator[dict]:
    """Apply ops in order, yielding one event per op: the op echoed
    back, its outcome, and the store's stats afterwards."""
    for index, op in enumerate(ops):
        if op[0] == "PUT":
            _, key, size = op
            outcome = store.put(key, b"\x00" * size)
            event = {"op": "PUT", "key": key.decode("utf-8"), "size": size, "outcome": outcome.value}
        elif op[0] == "GET":
            _, key = op
            value = store.get(key)
            event = {"op": "GET", "key": key.decode("utf-8"), "result": "faded" if value is None else "hit"}
        else:
            _, n = op
            fade = store.advance_epoch(n)
            event = {"op": "ADV", "n": n, "entries_faded": fade.entries_faded, "bytes_reclaimed": fade.bytes_reclaimed}
        event["index"] = index
        event["stats"] = store.stats().to_json_obj()
        yield event
