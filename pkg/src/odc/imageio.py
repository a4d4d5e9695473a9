"""Band images in and out: PNG/PGM slices, raw volumes with a sidecar, previews and quantization."""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .core import denormalize, normalize

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@dataclass
class MultispectralImage:
    """A (height, width, bands) integer grid with values in ``[0, l_max]``."""

    pixels: np.ndarray
    l_max: int = 255

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[..., None]
        if px.ndim != 3:
            raise ValueError(f"pixels must be (height, width, bands), got shape {px.shape}")
        if px.size and (px.min() < 0 or px.max() > self.l_max):
            raise ValueError(f"pixel values must lie in [0, {self.l_max}]")
        self.pixels = px.astype(np.int64)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def bands(self) -> int:
        return self.pixels.shape[2]

    def vectors(self) -> np.ndarray:
        return self.pixels.reshape(-1, self.bands)

    def normalized(self) -> np.ndarray:
        return normalize(self.vectors(), self.l_max)


@dataclass
class LabelImage:
    labels: np.ndarray
    palette_size: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.ndim != 2:
            raise ValueError("labels must be a 2-D grid")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.palette_size):
            raise ValueError("label outside the palette")

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]


# ---------------------------------------------------------------- single bands

def read_pgm(data: bytes) -> tuple[np.ndarray, int]:
    """Parse a binary (P5) PGM; returns the grid and its maxval."""
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM (P5) file")
    width, height, maxval = (int(f) for f in fields[1:])
    pos += 1
    dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
    count = width * height
    raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    return raw.reshape(height, width).astype(np.int64), maxval


def write_pgm(grid: np.ndarray, maxval: int = 255) -> bytes:
    grid = np.asarray(grid)
    h, w = grid.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
    return header + grid.astype(dtype).tobytes()


def read_band(path) -> tuple[np.ndarray, int]:
    """Read an 8-bit grayscale PNG or a P5 PGM, chosen by magic bytes."""
    data = Path(path).read_bytes()
    if data.startswith(PNG_MAGIC):
        with Image.open(io.BytesIO(data)) as im:
            if im.mode not in ("L", "I;16", "I;16B", "I"):
                raise ValueError(f"{path}: expected a grayscale PNG, got mode {im.mode}")
            arr = np.array(im).astype(np.int64)
        return arr, 255 if im.mode == "L" else 65535
    if data.startswith(b"P5"):
        return read_pgm(data)
    raise ValueError(f"{path}: unrecognized band format")


def write_band(path, grid: np.ndarray, l_max: int = 255) -> None:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        path.write_bytes(write_pgm(grid, l_max))
        return
    if l_max > 255:
        raise ValueError("PNG output supports 8-bit bands only; use .pgm")
    Image.fromarray(np.asarray(grid).astype(np.uint8), mode="L").save(path, format="PNG")


def load_bands(paths) -> MultispectralImage:
    """Stack one grayscale file per band into a multispectral image."""
    paths = list(paths)
    if not paths:
        raise ValueError("no band files given")
    grids = []
    l_max = None
    for p in paths:
        grid, maxval = read_band(p)
        if grids and grid.shape != grids[0].shape:
            raise ValueError(f"{p}: band size {grid.shape} differs from {grids[0].shape}")
        grids.append(grid)
        l_max = maxval if l_max is None else max(l_max, maxval)
    return MultispectralImage(np.stack(grids, axis=-1), l_max)


def save_image(path, img: MultispectralImage) -> None:
    """Save a 1- or 3-band 8-bit image as PNG, or a single band as PGM."""
    path = Path(path)
    if img.bands == 1:
        write_band(path, img.pixels[..., 0], img.l_max)
    elif img.bands == 3 and img.l_max <= 255 and path.suffix.lower() == ".png":
        Image.fromarray(img.pixels.astype(np.uint8), mode="RGB").save(path, format="PNG")
    else:
        raise ValueError(f"cannot save a {img.bands}-band image with l_max={img.l_max} to {path.name}")


def save_bands(paths, img: MultispectralImage) -> None:
    paths = list(paths)
    if len(paths) != img.bands:
        raise ValueError(f"need {img.bands} output paths, got {len(paths)}")
    for b, p in enumerate(paths):
        write_band(p, img.pixels[..., b], img.l_max)


# ---------------------------------------------------------------- raw volumes

@dataclass
class RawVolumeHeader:
    data: Path
    width: int
    height: int
    slices: int
    bits: int = 8
    byte_order: str = "little"
    l_max: int = 255


def read_sidecar(path) -> RawVolumeHeader:
    """Parse ``key = value`` lines describing a headerless raw volume."""
    path = Path(path)
    kv = {}
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: malformed line {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        kv[key] = value
    try:
        bits = int(kv.get("bits", 8))
        hdr = RawVolumeHeader(
            data=(path.parent / kv["data"]),
            width=int(kv["width"]),
            height=int(kv["height"]),
            slices=int(kv["slices"]),
            bits=bits,
            byte_order=kv.get("byte_order", "little"),
            l_max=int(kv.get("l_max", (1 << bits) - 1)),
        )
    except KeyError as e:
        raise ValueError(f"{path}: missing key {e.args[0]}") from None
    if hdr.bits not in (8, 16) or hdr.byte_order not in ("little", "big"):
        raise ValueError(f"{path}: unsupported bits/byte_order")
    return hdr


def load_volume(sidecar) -> tuple[np.ndarray, int]:
    """Raw volume as a (slices, height, width) integer array plus its gamut ceiling."""
    hdr = read_sidecar(sidecar)
    if hdr.bits == 8:
        dtype = np.dtype(np.uint8)
    else:
        dtype = np.dtype("<u2" if hdr.byte_order == "little" else ">u2")
    raw = np.fromfile(hdr.data, dtype=dtype)
    expected = hdr.slices * hdr.height * hdr.width
    if raw.size != expected:
        raise ValueError(f"{hdr.data}: holds {raw.size} samples, header says {expected}")
    vol = raw.reshape(hdr.slices, hdr.height, hdr.width).astype(np.int64)
    if vol.max() > hdr.l_max:
        raise ValueError(f"{hdr.data}: values exceed l_max={hdr.l_max}")
    return vol, hdr.l_max


def write_volume(sidecar, volume: np.ndarray, l_max: int = 255, bits: int = 8) -> None:
    sidecar = Path(sidecar)
    data = sidecar.with_suffix(".raw")
    s, h, w = volume.shape
    dtype = np.uint8 if bits == 8 else np.dtype("<u2")
    np.asarray(volume).astype(dtype).tofile(data)
    sidecar.write_text(
        f"data = {data.name}\nwidth = {w}\nheight = {h}\nslices = {s}\n"
        f"bits = {bits}\nbyte_order = little\nl_max = {l_max}\n"
    )


def load_multispectral_volume(sidecars) -> list[MultispectralImage]:
    """One multispectral image per slice, bands taken from the given volumes in order."""
    vols = []
    l_max = None
    for sc in sidecars:
        vol, lm = load_volume(sc)
        if vols and vol.shape != vols[0].shape:
            raise ValueError(f"{sc}: volume shape {vol.shape} differs from {vols[0].shape}")
        if l_max is not None and lm != l_max:
            raise ValueError(f"{sc}: l_max {lm} differs from {l_max}")
        vols.append(vol)
        l_max = lm
    if not vols:
        raise ValueError("no volumes given")
    stacked = np.stack(vols, axis=-1)
    return [MultispectralImage(stacked[i], l_max) for i in range(stacked.shape[0])]


# ---------------------------------------------------------------- derived images

def compose_rgb(img: MultispectralImage, band_order=(0, 1, 2)) -> MultispectralImage:
    order = tuple(int(i) for i in band_order)
    if len(order) != 3:
        raise ValueError("band_order needs exactly three indices")
    for i in order:
        if not 0 <= i < img.bands:
            raise IndexError(f"band {i} out of range for a {img.bands}-band image")
    return MultispectralImage(img.pixels[..., list(order)], img.l_max)


def _bit(value: int, idx: int) -> int:
    return (value >> idx) & 1


def label_palette(size: int = 256) -> np.ndarray:
    """Fixed label colours: the bits of each label are spread over the high bits of R, G and B.

    Label 0 is black; the map is injective over 0..255.
    """
    pal = np.zeros((size, 3), dtype=np.int64)
    for label in range(size):
        r = g = b = 0
        c = label
        for j in range(8):
            r |= _bit(c, 0) << (7 - j)
            g |= _bit(c, 1) << (7 - j)
            b |= _bit(c, 2) << (7 - j)
            c >>= 3
        pal[label] = (r, g, b)
    return pal


PALETTE = label_palette()


def render_labels(labels: LabelImage) -> MultispectralImage:
    if labels.palette_size > len(PALETTE):
        raise ValueError(f"palette holds {len(PALETTE)} colours, {labels.palette_size} requested")
    return MultispectralImage(PALETTE[labels.labels], 255)


def recover_labels(rendered: MultispectralImage) -> np.ndarray:
    code = rendered.pixels @ np.array([1 << 16, 1 << 8, 1])
    lookup = {int(v): i for i, v in enumerate(PALETTE @ np.array([1 << 16, 1 << 8, 1]))}
    try:
        return np.vectorize(lookup.__getitem__, otypes=[np.int64])(code)
    except KeyError:
        raise ValueError("image contains colours outside the label palette") from None


def quantize(img: MultispectralImage, model) -> tuple[MultispectralImage, LabelImage]:
    """Replace each pixel by the denormalized prototype of the class it falls in.

    ``model`` is any trained classifier exposing ``centroids`` and ``classify_many``.
    """
    centroids = np.asarray(model.centroids)
    if centroids.shape[1] != img.bands:
        raise ValueError(f"model has dimension {centroids.shape[1]}, image has {img.bands} bands")
    labels = np.asarray(model.classify_many(img.normalized()), dtype=np.int64)
    palette = denormalize(centroids, img.l_max)
    out = palette[labels].reshape(img.pixels.shape)
    return (
        MultispectralImage(out, img.l_max),
        LabelImage(labels.reshape(img.height, img.width), len(centroids)),
    )
