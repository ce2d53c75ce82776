"""Escape-time rendering of f_p, the boundary of the basin of infinity, and
box counting.

For p != 0 every Fatou component eventually lands in the basin of infinity
B_p, and an orbit that is not already in B_p must pass through the trap
door (the component around the pole), which lies inside the critical circle
``|z| = |p|**(1/(2Q))``.  The number of steps an orbit needs to enter B_p,
its *entry time*, is therefore constant on Fatou components and readable
from the orbit.  Julia points at raster scale are the pixels whose 3x3
neighbourhood mixes entry times; the basin B_p is the border-connected
region of entry time 0.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np
from scipy import ndimage

from .bowen import DimensionEstimate
from .errors import ConfigError, DegenerateFitError
from .mapcore import McMullenMap, ipow
from .periodic import default_workers

ESCAPE_RADIUS = 4.0
MAX_ITER = 500
POLE_RADIUS = 1e-15
ZERO_RADIUS = 0.5  # p = 0 only: |z| < 1/2 converges to the superattracting 0

FIGURE_WINDOW = (-1.25, 1.25, -1.25, 1.25)

_EIGHT = np.ones((3, 3), dtype=bool)


class Status(IntEnum):
    ESCAPED = 0
    BOUNDED = 1
    BOUNDED_TO_ZERO = 2


@dataclass(frozen=True)
class Window:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ConfigError("window needs x_min < x_max and y_min < y_max")
        if self.width < 16 or self.height < 16:
            raise ConfigError("window must be at least 16x16 pixels")

    @classmethod
    def figure(cls, width: int = 800, height: int | None = None) -> Window:
        return cls(*FIGURE_WINDOW, width, height or width)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.width

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.height

    def row_centers(self, rows: slice) -> np.ndarray:
        """Pixel centres for a block of rows; row 0 is the top (y_max)."""
        x = self.x_min + (np.arange(self.width) + 0.5) * self.dx
        y = self.y_max - (np.arange(self.height)[rows] + 0.5) * self.dy
        return x[None, :] + 1j * y[:, None]

    def centers(self) -> np.ndarray:
        return self.row_centers(slice(None))

    def pixel_of(self, z: complex) -> tuple[int, int]:
        """(row, col) of the pixel containing z."""
        col = math.floor((z.real - self.x_min) / self.dx)
        row = math.floor((self.y_max - z.imag) / self.dy)
        return row, col


@dataclass(frozen=True)
class PointStatus:
    status: Status
    iterations: int
    entry_time: int  # steps until the orbit is in the basin of infinity, -1 if never


def _check_params(escape_radius: float, max_iter: int):
    if escape_radius < 2:
        raise ConfigError("escape_radius must be >= 2")
    if max_iter < 50:
        raise ConfigError("max_iter must be >= 50")


def _trap_radius(fmap: McMullenMap) -> float:
    return abs(fmap.p) ** (1.0 / (2 * fmap.Q)) if fmap.p != 0 else 0.0


def _escape_block(fmap: McMullenMap, z0: np.ndarray, max_iter: int, escape_radius: float):
    """Escape iteration, status and entry time for an array of start points.

    Iteration 0 is the starting point itself: a point already outside the
    escape radius has escape iteration 0.  A point within ``POLE_RADIUS`` of
    the pole escapes on the next step.
    """
    shape = z0.shape
    z = z0.ravel().astype(complex)
    size = z.size
    iters = np.full(size, -1, dtype=np.int32)
    status = np.full(size, Status.BOUNDED, dtype=np.uint8)
    last_trap = np.full(size, -1, dtype=np.int32)
    r_trap = _trap_radius(fmap)
    p = fmap.p
    active = np.arange(size)
    zc = z
    for k in range(max_iter + 1):
        a = np.abs(zc)
        out = a > escape_radius
        if p == 0:
            zero = a < ZERO_RADIUS
            status[active[zero]] = Status.BOUNDED_TO_ZERO
            iters[active[zero]] = k
        else:
            zero = np.zeros_like(out)
            trap = a < r_trap
            last_trap[active[trap]] = k
            pole = a < POLE_RADIUS
            if np.any(pole):
                iters[active[pole]] = k + 1
                status[active[pole]] = Status.ESCAPED
                zero = pole
        iters[active[out]] = k
        status[active[out]] = Status.ESCAPED
        keep = ~(out | zero)
        active = active[keep]
        zc = zc[keep]
        if active.size == 0 or k == max_iter:
            break
        zq = ipow(zc, fmap.Q)
        zc = zq if p == 0 else zq + p / zq
    entry = np.where(status == Status.ESCAPED, last_trap + 1, -1).astype(np.int32)
    return iters.reshape(shape), status.reshape(shape), entry.reshape(shape)


def classify_point(fmap: McMullenMap, z0: complex, max_iter: int = MAX_ITER,
                   escape_radius: float = ESCAPE_RADIUS) -> PointStatus:
    """Escape-time status of a single starting point."""
    _check_params(escape_radius, max_iter)
    it, st, entry = _escape_block(fmap, np.array([z0], dtype=complex), max_iter, escape_radius)
    return PointStatus(Status(int(st[0])), int(it[0]), int(entry[0]))


@dataclass
class RasterClassification:
    """Per-pixel escape data over a window.

    ``iterations`` is the escape iteration (-1 if none), ``entry_time`` the
    number of steps to reach the basin of infinity (-1 if the pixel does not
    escape), ``component_id`` labels 4-connected regions of equal entry time
    (0 for non-escaping pixels; the basin of infinity always gets id 1).
    ``julia_mask`` marks the Julia set at raster scale: non-escaping
    pixels plus pixels whose 3x3 neighbourhood contains another class.
    ``boundary_mask`` marks pixels outside the basin of infinity that are
    8-adjacent to it.
    """

    fmap: McMullenMap
    window: Window
    max_iter: int
    escape_radius: float
    status: np.ndarray
    iterations: np.ndarray
    entry_time: np.ndarray
    component_id: np.ndarray
    infinity_mask: np.ndarray
    julia_mask: np.ndarray
    boundary_mask: np.ndarray

    @property
    def bounded_mask(self) -> np.ndarray:
        return self.status != Status.ESCAPED

    def infinity_touches_borders(self) -> dict[str, bool]:
        m = self.infinity_mask
        return {"top": bool(m[0].any()), "bottom": bool(m[-1].any()),
                "left": bool(m[:, 0].any()), "right": bool(m[:, -1].any())}

    def boundary_components(self) -> int:
        """Number of 8-connected components of the boundary mask."""
        return int(ndimage.label(self.boundary_mask, structure=_EIGHT)[1])

    def boundary_encloses(self, z: complex = 0j) -> bool:
        """Whether the boundary mask separates the pixel of ``z`` from the window border."""
        row, col = self.window.pixel_of(z)
        free = ~self.boundary_mask
        if not free[row, col]:
            return False
        lab, _ = ndimage.label(free)
        target = lab[row, col]
        edge = np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]])
        return bool(target not in edge)

    def image(self) -> np.ndarray:
        """8-bit grey levels: Julia/bounded dark, basin of infinity light,
        other escaping components mid-tone."""
        img = np.full(self.status.shape, 128, dtype=np.uint8)
        img[self.infinity_mask] = 255
        img[self.status == Status.BOUNDED_TO_ZERO] = 0
        img[self.julia_mask] = 0
        return img

    def write_ppm(self, path) -> None:
        write_ppm(path, self.image())

    def write_boundary_rle(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(boundary_rle(self.boundary_mask))


def classify_grid(fmap: McMullenMap, window: Window, max_iter: int = MAX_ITER,
                  escape_radius: float = ESCAPE_RADIUS, workers: int | None = None,
                  block_rows: int = 64):
    """Escape iteration, status and entry time for every pixel centre.

    Rows are processed in independent blocks on a thread pool.
    """
    _check_params(escape_radius, max_iter)
    workers = workers or default_workers()
    H, W = window.height, window.width
    iters = np.empty((H, W), dtype=np.int32)
    status = np.empty((H, W), dtype=np.uint8)
    entry = np.empty((H, W), dtype=np.int32)

    def run(r0):
        sl = slice(r0, min(r0 + block_rows, H))
        iters[sl], status[sl], entry[sl] = _escape_block(
            fmap, window.row_centers(sl), max_iter, escape_radius)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, range(0, H, block_rows)))
    return iters, status, entry


def _label_components(entry: np.ndarray, escaped: np.ndarray):
    comp = np.zeros(entry.shape, dtype=np.int32)
    base = np.zeros(entry.shape, dtype=bool)
    base[0, :] = base[-1, :] = base[:, 0] = base[:, -1] = True
    zero_lab, _ = ndimage.label(escaped & (entry == 0))
    border_ids = np.unique(zero_lab[base & (zero_lab > 0)])
    infinity = np.isin(zero_lab, border_ids) & (zero_lab > 0)
    comp[infinity] = 1
    next_id = 2
    rest = escaped & ~infinity
    for e in np.unique(entry[rest]):
        lab, k = ndimage.label(rest & (entry == e))
        comp[lab > 0] = lab[lab > 0] + next_id - 1
        next_id += k
    return comp, infinity


def render(fmap: McMullenMap, window: Window | None = None, max_iter: int = MAX_ITER,
           escape_radius: float = ESCAPE_RADIUS, path=None, workers: int | None = None
           ) -> RasterClassification:
    """Classify every pixel, find the basin of infinity by flood fill from the
    window border, extract its boundary, and optionally write a P6 pixmap."""
    window = window or Window.figure()
    iters, status, entry = classify_grid(fmap, window, max_iter, escape_radius, workers)
    escaped = status == Status.ESCAPED
    comp, infinity = _label_components(entry, escaped)

    # a class per pixel: entry time for escaping pixels, sentinels otherwise
    cls = np.where(escaped, entry, np.where(status == Status.BOUNDED_TO_ZERO, -2, -1))
    hi = ndimage.maximum_filter(cls, size=3, mode="nearest")
    lo = ndimage.minimum_filter(cls, size=3, mode="nearest")
    julia = (status == Status.BOUNDED) | (hi != lo)
    boundary = ndimage.binary_dilation(infinity, structure=_EIGHT) & ~infinity

    result = RasterClassification(fmap, window, max_iter, escape_radius, status, iters,
                                  entry, comp, infinity, julia, boundary)
    if path is not None:
        result.write_ppm(path)
    return result


def write_ppm(path, gray: np.ndarray) -> None:
    """Binary P6 pixmap from an 8-bit grey image."""
    gray = np.asarray(gray, dtype=np.uint8)
    h, w = gray.shape
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P6":
        raise ValueError("not a P6 pixmap")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4], dtype=np.uint8).reshape(h, w, 3)


def boundary_rle(mask: np.ndarray) -> str:
    """Run-length text: one line per row, ``row start:length start:length ...``."""
    lines = []
    for r, row in enumerate(np.asarray(mask, dtype=bool)):
        padded = np.concatenate([[False], row, [False]])
        d = np.flatnonzero(np.diff(padded.astype(np.int8)))
        runs = " ".join(f"{a}:{b - a}" for a, b in zip(d[::2], d[1::2]))
        lines.append(f"{r} {runs}".rstrip())
    return "\n".join(lines) + "\n"


def parse_rle(text: str, width: int) -> np.ndarray:
    rows = []
    for line in text.splitlines():
        fields = line.split()
        row = np.zeros(width, dtype=bool)
        for run in fields[1:]:
            a, b = run.split(":")
            row[int(a):int(a) + int(b)] = True
        rows.append(row)
    return np.array(rows)


def default_scales(mask_shape: tuple[int, int]) -> list[int]:
    """Box sizes 4, 8, ... up to 1/16 of the short side."""
    short = min(mask_shape)
    sizes = []
    s = 4
    while s <= short // 16:
        sizes.append(s)
        s *= 2
    return sizes


def box_count(mask: np.ndarray, window: Window | None = None,
              scales: Sequence[int] | None = None) -> DimensionEstimate:
    """Box-counting dimension of a pixel set.

    Boxes of ``s x s`` pixels tile the mask from its top-left corner; the
    estimate is the least-squares slope of ``log N(s)`` against ``log(1/s)``.
    ``window`` only converts box sizes to plane units in the details.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ConfigError("mask is empty")
    scales = sorted(int(s) for s in (scales or default_scales(mask.shape)))
    if len(scales) < 4 or scales[-1] < 4 * scales[0] or scales[0] < 1:
        raise ConfigError("need at least 4 box sizes spanning at least 2 octaves")
    counts = []
    H, W = mask.shape
    for s in scales:
        hp, wp = -(-H // s) * s, -(-W // s) * s
        padded = np.zeros((hp, wp), dtype=bool)
        padded[:H, :W] = mask
        blocks = padded.reshape(hp // s, s, wp // s, s).any(axis=(1, 3))
        counts.append(int(blocks.sum()))
    counts_arr = np.array(counts, dtype=float)
    if np.any(np.diff(counts_arr) >= 0):
        raise DegenerateFitError(f"box counts {counts} do not decrease with box size")
    x = -np.log(np.array(scales, dtype=float))
    y = np.log(counts_arr)
    (slope, icpt), cov = np.polyfit(x, y, 1, cov=True) if len(x) > 2 else (np.polyfit(x, y, 1), None)
    resid = float(np.sqrt(np.mean((slope * x + icpt - y) ** 2)))
    err = float(np.sqrt(cov[0, 0])) if cov is not None else 0.0
    details = {"scales": scales, "counts": counts}
    if window is not None:
        details["box_size"] = [s * window.dx for s in scales]
    return DimensionEstimate(float(slope), 0, float(slope - 2 * err), float(slope + 2 * err),
                             resid, "box_count", details)
