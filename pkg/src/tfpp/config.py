"""Bernoulli site configurations with a monotone coupling across p.

Every site carries a uniform value in [0, 1) computed by a counter-based
hash of (master_seed, x, y); a site is blue (weight 0) when its uniform is
strictly below p, yellow (weight 1) otherwise.  Strict comparison makes the
degenerate parameters exact: p=0 yields an all-yellow sample and p=1 an
all-blue one.  Recoloring at a different threshold reuses the same uniforms,
so blue sets are nested along p.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .lattice import Site, SiteWindow

P_CRITICAL = 0.5

# splitmix64 constants
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


class CapacityError(MemoryError):
    """Raised when a requested window would exceed the site budget."""


MAX_WINDOW_SITES = 1 << 28


def _mix64(h: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        h = h.astype(np.uint64, copy=True)
        h ^= h >> np.uint64(30)
        h *= _M1
        h ^= h >> np.uint64(27)
        h *= _M2
        h ^= h >> np.uint64(31)
    return h


def uniform_grid(window: SiteWindow, master_seed: int) -> np.ndarray:
    """Per-site uniforms in [0, 1) for the window, independent of evaluation
    order: u(v) = mix(mix(mix(seed) ^ x) ^ y) scaled to 53 bits."""
    xs = np.arange(window.x0, window.x1 + 1, dtype=np.int64).view(np.uint64)
    ys = np.arange(window.y0, window.y1 + 1, dtype=np.int64).view(np.uint64)
    with np.errstate(over="ignore"):
        s = _mix64(np.asarray([np.uint64(np.int64(master_seed).view(np.uint64))]))[0]
        hx = _mix64(xs ^ (s + _GAMMA))
        h = _mix64(hx[None, :] ^ ((ys * _M1)[:, None] + _GAMMA))
    return (h >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def derive_seed(master_seed: int, *parts) -> int:
    """Deterministic child seed from a master seed and a tuple of tags
    (ints or strings).  Used to key independent trials and probes."""
    acc = np.uint64(np.int64(master_seed).view(np.uint64))
    with np.errstate(over="ignore"):
        for part in parts:
            if isinstance(part, str):
                data = part.encode()
                for b in data:
                    acc = _mix64(np.asarray([acc ^ np.uint64(b)]))[0] + _GAMMA
            else:
                acc = _mix64(np.asarray([acc ^ np.uint64(np.int64(int(part)).view(np.uint64))]))[0] + _GAMMA
    return int(acc & np.uint64(0x7FFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo estimate: mean, standard error, sample count."""

    mean: float
    stderr: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("MCEstimate requires n >= 1")

    @staticmethod
    def from_samples(values) -> "MCEstimate":
        arr = np.asarray(values, dtype=np.float64)
        n = arr.size
        if n < 1:
            raise ValueError("MCEstimate requires at least one sample")
        mean = float(arr.mean())
        sd = float(arr.std(ddof=1)) if n > 1 else 0.0
        return MCEstimate(mean, sd / math.sqrt(n), n)


@dataclass(frozen=True)
class Configuration:
    """Immutable colored sample on a site window.

    colors[iy, ix] is True for blue (t=0) sites.  Configurations built by
    `sample` derive colors from counter-based uniforms; `from_colors` wraps
    an explicit bitmap (fixtures), in which case recoloring is unavailable.
    """

    window: SiteWindow
    p: float
    master_seed: int
    colors: np.ndarray = field(repr=False)
    explicit: bool = False

    def __post_init__(self):
        if self.colors.shape != (self.window.ny, self.window.nx):
            raise ValueError("color bitmap does not match window shape")
        self.colors.setflags(write=False)

    def is_blue(self, v: Site) -> bool:
        iy, ix = self.window.index(v)
        return bool(self.colors[iy, ix])

    def weight(self, v: Site) -> int:
        return 0 if self.is_blue(v) else 1

    def uniforms(self) -> np.ndarray:
        if self.explicit:
            raise ValueError("explicit configuration has no uniforms")
        return uniform_grid(self.window, self.master_seed)

    @property
    def blue_fraction(self) -> float:
        return float(self.colors.mean())


def sample(window: SiteWindow, p: float, master_seed: int) -> Configuration:
    """Draw the Bernoulli configuration for (window, p, master_seed)."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p={p} outside [0, 1]")
    if window.size > MAX_WINDOW_SITES:
        raise CapacityError(
            f"window of {window.size} sites exceeds the {MAX_WINDOW_SITES}-site budget"
        )
    colors = uniform_grid(window, master_seed) < p
    return Configuration(window, p, master_seed, colors)


def recolor(c: Configuration, p_new: float) -> Configuration:
    """Same uniforms, new threshold; monotone in p (blue sets are nested)."""
    if c.explicit:
        raise ValueError("cannot recolor an explicit configuration")
    if not (0.0 <= p_new <= 1.0):
        raise ValueError(f"p={p_new} outside [0, 1]")
    if p_new == c.p:
        return c
    colors = uniform_grid(c.window, c.master_seed) < p_new
    return Configuration(c.window, p_new, c.master_seed, colors)


def from_colors(window: SiteWindow, blue: np.ndarray | list, p: float = float("nan"),
                master_seed: int = 0) -> Configuration:
    """Wrap an explicit blue-site bitmap (row iy = y - y0, column ix = x - x0)."""
    arr = np.array(blue, dtype=bool)
    return Configuration(window, p, master_seed, arr, explicit=True)


_MAGIC = b"TFPPCFG1"


def dump_config(c: Configuration, path) -> None:
    """Binary dump: magic, window bounds (4 x int64 LE), p (float64 LE),
    master seed (uint64 LE), then the row-major bitmap via packbits."""
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<qqqq", c.window.x0, c.window.x1, c.window.y0, c.window.y1))
        f.write(struct.pack("<d", c.p))
        f.write(struct.pack("<Q", c.master_seed & 0xFFFFFFFFFFFFFFFF))
        f.write(struct.pack("<B", 1 if c.explicit else 0))
        f.write(np.packbits(c.colors, axis=None).tobytes())


def load_config(path) -> Configuration:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != _MAGIC:
            raise ValueError("not a configuration dump")
        x0, x1, y0, y1 = struct.unpack("<qqqq", f.read(32))
        (p,) = struct.unpack("<d", f.read(8))
        (seed,) = struct.unpack("<Q", f.read(8))
        (explicit,) = struct.unpack("<B", f.read(1))
        window = SiteWindow(x0, x1, y0, y1)
        raw = np.frombuffer(f.read(), dtype=np.uint8)
        bits = np.unpackbits(raw, count=window.size).astype(bool)
        colors = bits.reshape(window.ny, window.nx)
    return Configuration(window, p, int(seed), colors, explicit=bool(explicit))
