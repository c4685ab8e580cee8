"""On-disk store for exact γ_{k,n} series.

One file per (k, n) with 0 <= n < k.  Layout::

    thetapow-series
    version 1
    key <k> <n> <N> sha256:<hex digest of the body>
    <coefficient 0>
    ...
    <coefficient N>

A file is only ever replaced whole (write to a temporary, then rename), so a
reader sees either the old or the new series.  Writers take an advisory lock
on a sidecar ``.lock`` file.  A bad checksum, wrong version or short body
means the entry is ignored and recomputed.
"""
from __future__ import annotations

import contextlib
import hashlib
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .coeffs import CoeffKey, IntSeries, gamma_series_dp

try:
    import fcntl
except ImportError:  # non-POSIX: fall back to unlocked writes
    fcntl = None

log = logging.getLogger(__name__)

MAGIC = "thetapow-series"
VERSION = 1

__all__ = ["CacheEntry", "SeriesCache", "MAGIC", "VERSION"]


@dataclass(frozen=True)
class CacheEntry:
    k: int
    n: int
    coeffs: tuple[int, ...]
    version: int = VERSION

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def body(self) -> str:
        return "".join(f"{c}\n" for c in self.coeffs)

    @property
    def checksum(self) -> str:
        return hashlib.sha256(self.body().encode()).hexdigest()

    def dumps(self) -> str:
        return f"{MAGIC}\nversion {self.version}\nkey {self.k} {self.n} {self.order} sha256:{self.checksum}\n" + self.body()

    @classmethod
    def loads(cls, text: str) -> "CacheEntry":
        lines = text.split("\n")
        if len(lines) < 4 or lines[0] != MAGIC:
            raise ValueError("not a series cache file")
        if lines[1] != f"version {VERSION}":
            raise ValueError(f"cache version mismatch: {lines[1]!r}")
        parts = lines[2].split()
        if len(parts) != 5 or parts[0] != "key" or not parts[4].startswith("sha256:"):
            raise ValueError("malformed key line")
        k, n, N = (int(p) for p in parts[1:4])
        body = "\n".join(lines[3:])
        if hashlib.sha256(body.encode()).hexdigest() != parts[4][len("sha256:"):]:
            raise ValueError("checksum mismatch")
        coeffs = tuple(int(c) for c in lines[3:] if c)
        if len(coeffs) != N + 1:
            raise ValueError("body length does not match the header")
        return cls(k, n, coeffs)


class SeriesCache:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)

    def path(self, k: int, n: int) -> Path:
        return self.root / f"gamma_{k}_{n}.txt"

    @contextlib.contextmanager
    def _lock(self, k: int, n: int):
        self.root.mkdir(parents=True, exist_ok=True)
        if fcntl is None:
            yield
            return
        with open(self.path(k, n).with_suffix(".lock"), "a") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def load(self, k: int, n: int) -> CacheEntry | None:
        p = self.path(k, n)
        try:
            entry = CacheEntry.loads(p.read_text())
        except FileNotFoundError:
            return None
        except (ValueError, OSError) as exc:
            log.warning("discarding cache file %s: %s", p, exc)
            return None
        if (entry.k, entry.n) != (k, n):
            log.warning("discarding cache file %s: key mismatch", p)
            return None
        return entry

    def store(self, entry: CacheEntry) -> None:
        p = self.path(entry.k, entry.n)
        with self._lock(entry.k, entry.n):
            old = self.load(entry.k, entry.n)
            if old is not None and old.order >= entry.order:
                return
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=p.name, suffix=".tmp")
            try:
                with os.fdopen(fd, "w") as fh:
                    fh.write(entry.dumps())
                os.replace(tmp, p)
            except BaseException:
                with contextlib.suppress(FileNotFoundError):
                    os.unlink(tmp)
                raise

    def series(self, key: CoeffKey, N: int) -> tuple[IntSeries, bool]:
        """The series of γ_{k,n} to order N and whether it came from disk."""
        i, e = key.reduce()
        entry = self.load(key.k, i)
        hit = entry is not None and entry.order >= N - e
        if hit:
            base = IntSeries(entry.coeffs[: max(N - e, 0) + 1], max(N - e, 0))
        else:
            base = gamma_series_dp(CoeffKey(key.k, i), max(N - e, 0))
            self.store(CacheEntry(key.k, i, tuple(base.coeffs)))
        if e == 0:
            return base.truncate(N), hit
        return IntSeries(((0,) * e + tuple(base.coeffs))[: N + 1], N), hit
