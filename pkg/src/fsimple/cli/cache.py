"""Content-addressed on-disk cache for Groebner bases and resolutions."""

import hashlib
import json
import logging
import os
import tempfile

log = logging.getLogger(__name__)

ENV_VAR = "FSIMPLE_CACHE_DIR"


def content_key(ctx, gens, operation):
    payload = {
        "p": ctx.p,
        "vars": list(ctx.vars),
        "order": str(ctx.order),
        "gens": [g.to_str() for g in gens],
        "op": operation,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class Cache:
    """JSON files named by content hash; disabled when ``directory`` is None."""

    def __init__(self, directory=None):
        self.directory = directory
        self.hits = 0
        self.misses = 0

    @classmethod
    def from_flags(cls, cache_dir=None, no_cache=False):
        if no_cache:
            return cls(None)
        return cls(cache_dir or os.environ.get(ENV_VAR) or None)

    @property
    def enabled(self):
        return self.directory is not None

    def _path(self, key):
        return os.path.join(self.directory, f"{key}.json")

    def lookup(self, key):
        if not self.enabled:
            return None
        path = self._path(key)
        if not os.path.exists(path):
            self.misses += 1
            return None
        try:
            with open(path, encoding="utf-8") as fh:
                entry = json.load(fh)
            if entry.get("key") != key:
                raise ValueError("key mismatch")
            self.hits += 1
            return entry["value"]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            log.warning("ignoring corrupt cache entry %s (%s); recomputing", path, exc)
            self.misses += 1
            return None

    def store(self, key, value):
        if not self.enabled:
            return
        os.makedirs(self.directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump({"key": key, "value": value}, fh, sort_keys=True)
            os.replace(tmp, self._path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def status(self):
        if not self.enabled:
            return "disabled"
        if self.hits and not self.misses:
            return "hit"
        if self.hits:
            return "partial"
        return "miss"


def cached_gb(cache, ideal):
    """Fill ``ideal``'s Groebner basis from the cache, or compute and store it."""
    from ..polyring import Ideal

    key = content_key(ideal.ctx, ideal.gens, "gb")
    hit = cache.lookup(key)
    if hit is not None:
        ctx = ideal.ctx
        try:
            return Ideal(ctx, ideal.gens, gb=[ctx.poly(s) for s in hit])
        except Exception as exc:  # unparsable entry counts as corrupt
            log.warning("ignoring corrupt cache entry for %s (%s); recomputing", key, exc)
    gb = ideal.gb
    cache.store(key, [g.to_str() for g in gb])
    return ideal


def cached_resolution(cache, ideal):
    """Free resolution of R/I, cached as matrices of polynomial strings."""
    from ..modgb import ModuleMatrix, Resolution, free_resolution

    ctx = ideal.ctx
    key = content_key(ctx, ideal.gens, "resolution")
    hit = cache.lookup(key)
    if hit is not None:
        try:
            maps = []
            for m in hit["maps"]:
                rows, cols, entries = m["rows"], m["cols"], m["entries"]
                maps.append(ModuleMatrix(ctx, [[ctx.poly(s) for s in r] for r in entries], rows, cols))
            w = tuple(hit["weights"]) if hit["weights"] is not None else None
            return Resolution(maps, hit["ranks"], hit["degrees"], w, hit["minimal"], ctx)
        except Exception as exc:
            log.warning("ignoring corrupt cache entry for %s (%s); recomputing", key, exc)
    res = free_resolution(ideal)
    cache.store(key, {
        "maps": [{"rows": d.nrows, "cols": d.ncols, "entries": d.to_strs()} for d in res.maps],
        "ranks": res.ranks,
        "degrees": res.degrees,
        "weights": list(res.weights) if res.weights is not None else None,
        "minimal": res.minimal,
    })
    return res
