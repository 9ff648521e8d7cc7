"""SNAP edge-list ingestion: parsing, id remapping, caching, stream orders.

Input is whitespace-separated integer lines, ``#`` comments, and either
2 columns (u v) or 3 (u v timestamp); mixed widths are rejected.  Vertex
ids are remapped to dense integers in first-appearance order of the token
stream (u0, v0, u1, v1, ...) so streaming behaviour matches the raw file's
arrival pattern; original labels are kept in a side table.

Self-loop and duplicate filters run before remapping, duplicates keeping
the first occurrence.  Both are off by default: the temporal datasets this
feeds are multigraphs and density counts duplicate edges unless asked not
to.

Parsed results can be cached in a small binary format (magic ``DGEL1``,
little-endian u32 n, u64 m, then m packed records of u32 u, u32 v, u64
timestamp with 0 meaning absent) keyed by a hash of the source bytes plus
the filter options.  The cache stores remapped ids only; original labels
are not retained there.

``pull_source`` provides the single-pass contract for the streaming
module: a replayable batch iterator that never holds the full edge list in
memory (one transient pre-scan builds the id table for text inputs; cache
files need no pre-scan at all).
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .graph import DirectedEdgeList

__all__ = [
    "MAGIC",
    "IngestError",
    "IngestStats",
    "StreamOrder",
    "parse_snap",
    "write_cache",
    "read_cache",
    "cache_key",
    "load_or_parse",
    "LoadResult",
    "pull_source",
    "order_stream",
    "is_cache_file",
]

MAGIC = b"DGEL1"
_REC = np.dtype([("u", "<u4"), ("v", "<u4"), ("ts", "<u8")])
_HEADER = struct.Struct("<IQ")


class IngestError(ValueError):
    """Bad input file or bad ingest options; maps to CLI exit code 2."""

    def __init__(self, message: str, lines=None):
        super().__init__(message)
        self.lines = list(lines) if lines else []


@dataclass(frozen=True)
class IngestStats:
    n_vertices: int
    m_edges: int
    self_loops_seen: int
    duplicates_seen: int
    has_timestamps: bool
    self_loops_dropped: bool
    deduped: bool


def _scan_lines(path: Path):
    """Line-by-line fallback parser; reports every offending line number.

    Only runs when the fast path fails, so clarity beats speed here.
    """
    us: list[int] = []
    vs: list[int] = []
    ts: list[int] = []
    bad: list[int] = []
    width = 0
    with open(path, "rt", encoding="utf-8", errors="replace") as fh:
        for line_no, raw in enumerate(fh, 1):
            s = raw.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) not in (2, 3):
                bad.append(line_no)
                continue
            try:
                nums = [int(p) for p in parts]
            except ValueError:
                bad.append(line_no)
                continue
            if any(x < 0 for x in nums):
                bad.append(line_no)
                continue
            if width == 0:
                width = len(nums)
            elif len(nums) != width:
                bad.append(line_no)
                continue
            us.append(nums[0])
            vs.append(nums[1])
            if width == 3:
                ts.append(nums[2])
    if bad:
        shown = ", ".join(str(x) for x in bad[:10])
        more = "" if len(bad) <= 10 else f" (+{len(bad) - 10} more)"
        raise IngestError(f"malformed lines in {path.name}: {shown}{more}", bad)
    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    t = np.asarray(ts, dtype=np.int64) if width == 3 else None
    return u, v, t


def _read_columns(path: Path):
    """(u, v, ts|None) as int64 arrays with original ids."""
    try:
        df = pd.read_csv(
            path, sep=r"\s+", comment="#", header=None, engine="c",
            dtype=np.int64,
        )
    except pd.errors.EmptyDataError:
        return np.empty(0, np.int64), np.empty(0, np.int64), None
    except (pd.errors.ParserError, ValueError, OverflowError):
        # ragged or non-integer rows: rescan to name the lines
        return _scan_lines(path)
    if df.shape[1] not in (2, 3):
        raise IngestError(
            f"{path.name}: expected 2 or 3 columns, found {df.shape[1]}"
        )
    u = df[0].to_numpy()
    v = df[1].to_numpy()
    ts = df[2].to_numpy() if df.shape[1] == 3 else None
    if (u < 0).any() or (v < 0).any() or (ts is not None and (ts < 0).any()):
        return _scan_lines(path)  # negative ids: fallback names the lines
    return u, v, ts


def _normalize(u, v, ts, *, dedupe: bool, drop_self_loops: bool):
    self_loops = int(np.count_nonzero(u == v))
    if drop_self_loops and self_loops:
        keep = u != v
        u, v = u[keep], v[keep]
        ts = ts[keep] if ts is not None else None
    if u.size:
        dup = pd.DataFrame({"u": u, "v": v}).duplicated().to_numpy()
    else:
        dup = np.zeros(0, dtype=np.bool_)
    duplicates = int(np.count_nonzero(dup))
    if dedupe and duplicates:
        keep = ~dup
        u, v = u[keep], v[keep]
        ts = ts[keep] if ts is not None else None
    # remap in first-appearance order of the interleaved u, v token stream
    codes, uniques = pd.factorize(np.stack([u, v], axis=1).ravel())
    n = int(len(uniques))
    if n > np.iinfo(np.int32).max:
        raise IngestError("more than 2^31 distinct vertex ids")
    edges = DirectedEdgeList(
        codes[0::2].astype(np.int32),
        codes[1::2].astype(np.int32),
        n,
        timestamps=ts,
        orig_ids=np.asarray(uniques, dtype=np.int64) if n else None,
    )
    stats = IngestStats(
        n_vertices=n,
        m_edges=edges.m,
        self_loops_seen=self_loops,
        duplicates_seen=duplicates,
        has_timestamps=ts is not None,
        self_loops_dropped=drop_self_loops,
        deduped=dedupe,
    )
    return edges, stats


def parse_snap(path, *, dedupe: bool = False, drop_self_loops: bool = False):
    """Parse a SNAP text file -> (DirectedEdgeList, IngestStats)."""
    path = Path(path)
    if not path.exists():
        raise IngestError(f"no such file: {path}")
    u, v, ts = _read_columns(path)
    return _normalize(u, v, ts, dedupe=dedupe, drop_self_loops=drop_self_loops)


def write_cache(edges: DirectedEdgeList, path) -> None:
    """Serialize remapped edges; original id labels are not stored."""
    path = Path(path)
    rec = np.zeros(edges.m, dtype=_REC)
    rec["u"] = edges.src
    rec["v"] = edges.dst
    if edges.timestamps is not None:
        rec["ts"] = edges.timestamps
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(edges.n_vertices, edges.m))
        fh.write(rec.tobytes())


def read_cache(path) -> DirectedEdgeList:
    path = Path(path)
    raw = path.read_bytes()
    edges, _ = _decode_cache(raw, path.name)
    return edges


def _decode_cache(raw: bytes, name: str):
    head = len(MAGIC) + _HEADER.size
    if len(raw) < head or raw[: len(MAGIC)] != MAGIC:
        raise IngestError(f"{name}: not a DGEL1 cache file")
    n, m = _HEADER.unpack_from(raw, len(MAGIC))
    if len(raw) != head + m * _REC.itemsize:
        raise IngestError(f"{name}: truncated cache (expected {m} records)")
    rec = np.frombuffer(raw, dtype=_REC, count=m, offset=head)
    ts = rec["ts"].astype(np.int64)
    edges = DirectedEdgeList(
        rec["u"].astype(np.int32),
        rec["v"].astype(np.int32),
        int(n),
        timestamps=ts if bool((ts != 0).any()) else None,
    )
    return edges, (int(n), int(m))


def is_cache_file(path) -> bool:
    try:
        with open(path, "rb") as fh:
            return fh.read(len(MAGIC)) == MAGIC
    except OSError:
        return False


def cache_key(path, *, dedupe: bool, drop_self_loops: bool) -> str:
    """16 hex chars over the source bytes and the filter options."""
    h = hashlib.sha256()
    h.update(f"dedupe={int(dedupe)};loops={int(drop_self_loops)};".encode())
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class LoadResult:
    edges: DirectedEdgeList
    stats: IngestStats | None  # None when served from cache
    cache_path: Path | None
    from_cache: bool


def load_or_parse(
    path,
    *,
    dedupe: bool = False,
    drop_self_loops: bool = False,
    use_cache: bool = True,
    cache_dir=None,
) -> LoadResult:
    """Parse, or reuse/create the content-keyed binary cache.

    A .dgel input is read directly.  For text input the cache file lives
    next to the source (or in cache_dir) as <stem>.<key16>.dgel; cache
    write failures are non-fatal.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"no such file: {path}")
    if is_cache_file(path):
        return LoadResult(read_cache(path), None, path, True)
    key = cache_key(path, dedupe=dedupe, drop_self_loops=drop_self_loops)
    where = Path(cache_dir) if cache_dir is not None else path.parent
    cpath = where / f"{path.stem}.{key}.dgel"
    if use_cache and cpath.exists():
        return LoadResult(read_cache(cpath), None, cpath, True)
    edges, stats = parse_snap(path, dedupe=dedupe, drop_self_loops=drop_self_loops)
    if use_cache:
        try:
            where.mkdir(parents=True, exist_ok=True)
            write_cache(edges, cpath)
        except OSError:
            cpath = None
    else:
        cpath = None
    return LoadResult(edges, stats, cpath, False)


def pull_source(path, *, batch_size: int = 65536, drop_self_loops: bool = False):
    """(n_vertices, source) with source() a replayable batch iterator.

    Each replay re-reads the file and yields remapped (src, dst) int32
    batches; no replay ever holds the edge list.  Text inputs pay one
    transient pre-scan to build the id table; .dgel inputs stream straight
    from the record array.  Dedupe is not offered here: recognizing a
    duplicate needs the set of all edges seen, which is exactly the memory
    this path exists to avoid.
    """
    path = Path(path)
    if batch_size <= 0:
        raise IngestError("batch_size must be positive")
    if not path.exists():
        raise IngestError(f"no such file: {path}")

    if is_cache_file(path):
        raw = path.read_bytes()
        edges, (n, _) = _decode_cache(raw, path.name)

        def cache_iter():
            for src, dst in edges.iter_batches(batch_size):
                if drop_self_loops:
                    keep = src != dst
                    src, dst = src[keep], dst[keep]
                yield src, dst

        return n, cache_iter

    u, v, ts = _read_columns(path)  # transient pre-scan for the id table
    del ts
    if drop_self_loops:
        keep = u != v
        u, v = u[keep], v[keep]
    _, uniques = pd.factorize(np.stack([u, v], axis=1).ravel())
    index = pd.Index(uniques)
    n = int(len(uniques))
    del u, v

    def text_iter():
        try:
            reader = pd.read_csv(
                path, sep=r"\s+", comment="#", header=None, engine="c",
                dtype=np.int64, chunksize=batch_size,
            )
        except pd.errors.EmptyDataError:
            return
        for chunk in reader:
            cu = chunk[0].to_numpy()
            cv = chunk[1].to_numpy()
            if drop_self_loops:
                keep = cu != cv
                cu, cv = cu[keep], cv[keep]
            yield (
                index.get_indexer(cu).astype(np.int32),
                index.get_indexer(cv).astype(np.int32),
            )

    return n, text_iter


@dataclass(frozen=True)
class StreamOrder:
    """file (as ingested) | shuffle with a seed | stable timestamp sort."""

    mode: str
    seed: int | None = None

    @classmethod
    def parse(cls, spec: str) -> "StreamOrder":
        if spec == "file":
            return cls("file")
        if spec == "time":
            return cls("time")
        if spec.startswith("shuffle:"):
            try:
                return cls("shuffle", int(spec.split(":", 1)[1]))
            except ValueError:
                pass
        raise IngestError(
            f"bad order {spec!r}: expected file, shuffle:SEED, or time"
        )


def order_stream(el: DirectedEdgeList, order: StreamOrder) -> DirectedEdgeList:
    """Return the edges in the requested order; multiset always preserved."""
    if order.mode == "file":
        return el
    if order.mode == "shuffle":
        perm = np.random.default_rng(order.seed).permutation(el.m)
    elif order.mode == "time":
        if el.timestamps is None:
            raise IngestError("time order requires a 3-column (timestamped) input")
        perm = np.argsort(el.timestamps, kind="stable")
    else:
        raise IngestError(f"unknown order mode {order.mode!r}")
    return DirectedEdgeList(
        el.src[perm],
        el.dst[perm],
        el.n_vertices,
        timestamps=el.timestamps[perm] if el.timestamps is not None else None,
        orig_ids=el.orig_ids,
    )
