"""Target distributions: discretized PDFs, samples, bars-and-stripes, images.

Basis index layout follows :mod:`bornforge.statevector` (qubit 0 = MSB).  With
auxiliary precision bits the index is ``x * 2**m + y``: the integer register
is the high part and the fractional register the low part.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAX_QUBITS = 24


# --- analytic densities -----------------------------------------------------

def lognormal_pdf(x, mu: float, sigma: float):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("log-normal density is undefined for x <= 0")
    return np.exp(-((np.log(x) - mu) ** 2) / (2 * sigma**2)) / (x * np.sqrt(2 * np.pi * sigma**2))


def bimodal_pdf(x, mu1: float, sigma1: float, mu2: float, sigma2: float):
    x = np.asarray(x, dtype=float)
    return (np.exp(-((x - mu1) ** 2) / (2 * sigma1**2)) / np.sqrt(8 * np.pi * sigma1**2)
            + np.exp(-((x - mu2) ** 2) / (2 * sigma2**2)) / np.sqrt(8 * np.pi * sigma2**2))


def triangular_pdf(x, l: float, m: float, u: float):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    if m > l:
        rise = (x >= l) & (x <= m)
        out[rise] = 2 * (x[rise] - l) / ((u - l) * (m - l))
    if u > m:
        fall = (x >= m) & (x <= u)
        out[fall] = 2 * (u - x[fall]) / ((u - l) * (u - m))
    return out


def constant_pdf(x):
    return np.ones_like(np.asarray(x, dtype=float))


_FAMILIES = {
    "lognormal": (lognormal_pdf, ("mu", "sigma")),
    "bimodal": (bimodal_pdf, ("mu1", "sigma1", "mu2", "sigma2")),
    "triangular": (triangular_pdf, ("l", "m", "u")),
    "constant": (constant_pdf, ()),
}


@dataclass(frozen=True)
class PdfSpec:
    """A density ``family`` with ``params`` truncated to ``[a, b)``.

    ``aux_bits`` extra qubits subdivide every unit cell into 2**aux_bits points.
    """

    family: str
    params: dict = field(default_factory=dict)
    a: float = 0.0
    b: float = 8.0
    aux_bits: int = 0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {sorted(_FAMILIES)}")
        names = _FAMILIES[self.family][1]
        missing = set(names) - set(self.params)
        if missing:
            raise ValueError(f"{self.family} needs parameters {sorted(missing)}")
        for s in ("sigma", "sigma1", "sigma2"):
            if s in self.params and self.params[s] <= 0:
                raise ValueError(f"{s} must be positive")
        if self.family == "triangular" and not self.params["l"] <= self.params["m"] <= self.params["u"]:
            raise ValueError("triangular needs l <= m <= u")
        if self.b <= self.a or self.aux_bits < 0:
            raise ValueError("need b > a and aux_bits >= 0")

    @property
    def n_qubits(self) -> int:
        """Integer-register width: ceil(log2(b - a))."""
        return max(1, math.ceil(math.log2(self.b - self.a)))

    def density(self, x):
        fn, names = _FAMILIES[self.family]
        return fn(x, *(self.params[k] for k in names))

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "a": self.a, "b": self.b,
                "aux_bits": self.aux_bits}

    @classmethod
    def from_dict(cls, d: dict) -> PdfSpec:
        return cls(d["family"], dict(d.get("params", {})), float(d.get("a", 0.0)), float(d["b"]),
                   int(d.get("aux_bits", 0)))


def discretize_pdf(spec: PdfSpec, n: int | None = None) -> np.ndarray:
    """Evaluate the density on x + y/2**m + a and normalize (2**(n+m) points).

    Points at or beyond ``b`` (when b - a is not a power of two) are zero-padded.
    """
    n = spec.n_qubits if n is None else n
    if 2**n < spec.b - spec.a:
        raise ValueError(f"{n} qubits cannot cover an interval of width {spec.b - spec.a}")
    m = spec.aux_bits
    grid = (np.arange(2**n)[:, None] + np.arange(2**m)[None, :] / 2**m + spec.a).reshape(-1)
    inside = grid < spec.b
    vals = np.zeros(grid.size)
    vals[inside] = spec.density(grid[inside])
    if not np.all(np.isfinite(vals)) or np.any(vals < 0):
        raise ValueError("density is not finite and nonnegative on the grid")
    total = vals.sum()
    if total <= 0:
        raise ValueError("density vanishes on the whole grid")
    return vals / total


# Benchmark settings for 10 qubits; 3-qubit variants are our own choice.
BENCHMARKS = {
    ("lognormal", 10): PdfSpec("lognormal", {"mu": 5.5, "sigma": 0.9}, a=1, b=1025),
    ("bimodal", 10): PdfSpec("bimodal", {"mu1": 2 / 7 * 1024, "sigma1": 128.0,
                                         "mu2": 5 / 7 * 1024, "sigma2": 128.0}, a=0, b=1024),
    ("triangular", 10): PdfSpec("triangular", {"l": 0.0, "m": 256.0, "u": 1023.0}, a=0, b=1024),
    ("lognormal", 3): PdfSpec("lognormal", {"mu": 1.0, "sigma": 0.5}, a=1, b=9),
    ("bimodal", 3): PdfSpec("bimodal", {"mu1": 2 / 7 * 8, "sigma1": 1.0, "mu2": 5 / 7 * 8, "sigma2": 1.0},
                            a=0, b=8),
    ("triangular", 3): PdfSpec("triangular", {"l": 0.0, "m": 2.0, "u": 7.0}, a=0, b=8),
}


def benchmark_distribution(family: str, n: int) -> np.ndarray:
    return discretize_pdf(BENCHMARKS[family, n])


# --- samples ----------------------------------------------------------------

def empirical_distribution(samples, n: int, m: int = 0, interval=(0.0, None)) -> np.ndarray:
    """Histogram on the grid x + s + a with bins of half-width 2**-(m+1).

    Each sample goes to its nearest grid point (ties round up).
    """
    samples = np.asarray(samples, dtype=float).reshape(-1)
    if samples.size == 0:
        raise ValueError("no samples")
    a = float(interval[0])
    pos = np.floor((samples - a) * 2**m + 0.5).astype(np.int64)
    size = 2 ** (n + m)
    if np.any(pos < 0) or np.any(pos >= size):
        bad = samples[(pos < 0) | (pos >= size)][0]
        raise ValueError(f"sample {bad} lies outside the grid [{a}, {a + 2**n})")
    return np.bincount(pos, minlength=size) / samples.size


# --- bars and stripes -------------------------------------------------------

def bas_patterns(rows: int, cols: int) -> list[np.ndarray]:
    """All valid bars-and-stripes bitmaps (constant rows or constant columns)."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    if rows * cols > MAX_QUBITS:
        raise ValueError(f"{rows}x{cols} exceeds the {MAX_QUBITS}-qubit simulator cap")
    seen = {}
    for bits in itertools.product((0, 1), repeat=rows):
        img = np.repeat(np.array(bits)[:, None], cols, axis=1)
        seen[img.tobytes()] = img
    for bits in itertools.product((0, 1), repeat=cols):
        img = np.repeat(np.array(bits)[None, :], rows, axis=0)
        seen[img.tobytes()] = img
    return list(seen.values())


def bitmap_index(img) -> int:
    """Row-major pixels, pixel 0 = qubit 0 = most significant bit."""
    return int("".join(str(int(b)) for b in np.asarray(img).reshape(-1)), 2)


def bas_distribution(rows: int, cols: int) -> np.ndarray:
    pats = bas_patterns(rows, cols)
    p = np.zeros(2 ** (rows * cols))
    for img in pats:
        p[bitmap_index(img)] = 1.0 / len(pats)
    return p


# --- images -----------------------------------------------------------------

def _is_pow2(k: int) -> bool:
    return k > 0 and k & (k - 1) == 0


def image_to_distribution(pixels) -> np.ndarray:
    pixels = np.asarray(pixels, dtype=float)
    if pixels.ndim != 2 or not all(_is_pow2(s) for s in pixels.shape):
        raise ValueError(f"image sides must be powers of two, got {pixels.shape}")
    if np.any(pixels < 0):
        raise ValueError("pixel values must be nonnegative")
    total = pixels.sum()
    if total <= 0:
        raise ValueError("image is all zero")
    return (pixels / total).reshape(-1)


def distribution_to_image(q, shape) -> np.ndarray:
    """Reshape row-major and rescale so the brightest pixel is 255."""
    img = np.asarray(q, dtype=float).reshape(shape)
    peak = img.max()
    return img * (255.0 / peak) if peak > 0 else img


def downsample(pixels, factor: int) -> np.ndarray:
    """Block-mean downsampling by an integer factor."""
    pixels = np.asarray(pixels, dtype=float)
    h, w = pixels.shape
    if h % factor or w % factor:
        raise ValueError("factor must divide both image sides")
    return pixels.reshape(h // factor, factor, w // factor, factor).mean(axis=(1, 3))


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit binary PGM (P5)."""
    data = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval > 255:
        raise ValueError(f"{path}: only 8-bit PGM is supported")
    pos += 1  # single whitespace byte after maxval
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    return raster.reshape(height, width).astype(float)


def write_pgm(path, pixels):
    img = np.clip(np.rint(np.asarray(pixels, dtype=float)), 0, 255).astype(np.uint8)
    h, w = img.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (w, h) + img.tobytes())


# --- permutations -------------------------------------------------------------

def remap_sorted(p) -> tuple[np.ndarray, np.ndarray]:
    """Sort ascending (stable).  Returns (p_sorted, order) with p_sorted = p[order]."""
    p = np.asarray(p, dtype=float)
    order = np.argsort(p, kind="stable")
    return p[order], order


def unremap(q, order) -> np.ndarray:
    """Inverse of :func:`remap_sorted`: put q[k] back at position order[k]."""
    q = np.asarray(q)
    out = np.empty_like(q)
    out[np.asarray(order)] = q
    return out


def sort_lcu_coefficients(alpha) -> tuple[np.ndarray, np.ndarray]:
    """Normalized |alpha| in ascending order, plus the relabeling order.

    Entry j of the result belongs to the original term ``order[j]``, so the
    unitaries are relabeled V_j -> V_order[j].
    """
    mag = np.abs(np.asarray(alpha, dtype=float))
    total = mag.sum()
    if total == 0:
        raise ValueError("all LCU coefficients are zero")
    order = np.argsort(mag, kind="stable")
    return mag[order] / total, order


def write_distribution_csv(path, p):
    """Two columns: basis index and probability."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,probability\n")
        for k, v in enumerate(np.asarray(p, dtype=float)):
            fh.write(f"{k},{float(v)!r}\n")
