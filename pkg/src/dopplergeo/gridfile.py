# gridfile.py
# -------------------------------------------------------------
# Portable text format for terrain grids ("key = value" header, then
# whitespace-separated heights) so test fixtures are human-readable, plus
# synthetic tile generators (flat, plateau, ridge, random).

from __future__ import annotations

import os

import numpy as np

from .terrain import VOID_ELEVATION, TerrainGrid

REQUIRED_KEYS = ("lat0", "lon0", "dlat", "dlon", "n_lat", "n_lon")


class ParseError(ValueError):
    """Malformed portable grid text; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def write_portable_grid(grid: TerrainGrid) -> str:
    """Serialize a grid losslessly (repr-exact floats, voids preserved).

    A scalar geoid undulation is written inline; an undulation grid must be
    saved separately and referenced via the geoid_grid key by the caller.
    """
    lines = ["# portable terrain grid"]
    lines.append(f"lat0 = {grid.lat0!r}")
    lines.append(f"lon0 = {grid.lon0!r}")
    lines.append(f"dlat = {grid.dlat!r}")
    lines.append(f"dlon = {grid.dlon!r}")
    lines.append(f"n_lat = {grid.n_lat}")
    lines.append(f"n_lon = {grid.n_lon}")
    if np.isscalar(grid.N):
        lines.append(f"geoid_n = {float(grid.N)!r}")
    else:
        raise ValueError("gridded undulation needs a companion file; "
                         "write it separately and reference it with geoid_grid")
    for row in grid.H.tolist():
        lines.append(" ".join(map(repr, row)))
    return "\n".join(lines) + "\n"


def read_portable_grid(text: str, n_grid: np.ndarray | None = None) -> TerrainGrid:
    """Parse portable grid text. n_grid overrides the undulation when the
    header references a companion file (see load_portable_grid)."""
    header: dict[str, str] = {}
    heights: list[list[float]] = []
    data_started = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line and not data_started:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
            continue
        data_started = True
        try:
            heights.append(np.array(line.split(), dtype=float))
        except ValueError as exc:
            raise ParseError(f"bad height value: {exc}", lineno) from exc

    for key in REQUIRED_KEYS:
        if key not in header:
            raise ParseError(f"missing header key '{key}'")
    try:
        lat0 = float(header["lat0"])
        lon0 = float(header["lon0"])
        dlat = float(header["dlat"])
        dlon = float(header["dlon"])
        n_lat = int(header["n_lat"])
        n_lon = int(header["n_lon"])
    except ValueError as exc:
        raise ParseError(f"bad header value: {exc}") from exc

    values = np.concatenate(heights) if heights else np.zeros(0)
    if len(values) != n_lat * n_lon:
        raise ParseError(f"expected {n_lat * n_lon} heights, found {len(values)}")
    h = values.reshape(n_lat, n_lon)

    if n_grid is not None:
        n_val: float | np.ndarray = np.asarray(n_grid, dtype=float)
    elif "geoid_grid" in header:
        raise ParseError("geoid_grid reference requires load_portable_grid")
    elif "geoid_n" in header:
        try:
            n_val = float(header["geoid_n"])
        except ValueError as exc:
            raise ParseError(f"bad geoid_n: {exc}") from exc
    else:
        n_val = 0.0
    return TerrainGrid(lat0=lat0, lon0=lon0, dlat=dlat, dlon=dlon, H=h, N=n_val)


def load_portable_grid(path: str) -> TerrainGrid:
    """Read a portable grid file, resolving a geoid_grid companion reference
    (a second portable grid whose heights are undulation values)."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    ref = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line.startswith("geoid_grid"):
            ref = line.partition("=")[2].strip()
            break
    if ref is None:
        return read_portable_grid(text)
    companion = os.path.join(os.path.dirname(os.path.abspath(path)), ref)
    with open(companion, "r", encoding="utf-8") as f:
        n_grid = read_portable_grid(f.read()).H
    return read_portable_grid(text, n_grid=n_grid)


def make_flat_grid(lat0: float, lon0: float, dlat: float, dlon: float,
                   n_lat: int, n_lon: int, height: float = 0.0,
                   geoid_n: float = 0.0) -> TerrainGrid:
    """Constant-height grid (the H = 0 case coincides with the ellipsoid
    when the undulation is zero)."""
    return TerrainGrid(lat0=lat0, lon0=lon0, dlat=dlat, dlon=dlon,
                       H=np.full((n_lat, n_lon), float(height)), N=geoid_n)


def make_plateau_grid(lat0: float, lon0: float, dlat: float, dlon: float,
                      n_lat: int, n_lon: int, height: float = 500.0,
                      geoid_n: float = 0.0) -> TerrainGrid:
    return make_flat_grid(lat0, lon0, dlat, dlon, n_lat, n_lon, height, geoid_n)


def make_ridge_grid(lat0: float, lon0: float, dlat: float, dlon: float,
                    n_lat: int, n_lon: int, crest: float = 800.0,
                    geoid_n: float = 0.0) -> TerrainGrid:
    """North-south ridge: heights rise linearly to a crest along the central
    longitude column and fall back to zero at the east/west edges."""
    j = np.arange(n_lon, dtype=float)
    mid = (n_lon - 1) / 2.0
    profile = crest * (1.0 - np.abs(j - mid) / max(mid, 1.0))
    h = np.tile(np.clip(profile, 0.0, None), (n_lat, 1))
    return TerrainGrid(lat0=lat0, lon0=lon0, dlat=dlat, dlon=dlon, H=h, N=geoid_n)


def make_random_tile(rng: np.random.Generator, level: int,
                     void_fraction: float = 0.02) -> TerrainGrid:
    """Random integer-height tile at a level's nominal spacing, with voids,
    origin on a whole arcsecond. Intended for serializer round-trip tests."""
    from .dted import LEVEL_LAT_INTERVAL

    spacing = LEVEL_LAT_INTERVAL[level] / 36000.0
    n_lat = int(rng.integers(4, 40))
    n_lon = int(rng.integers(4, 40))
    lat0 = float(rng.integers(-80 * 3600, 80 * 3600)) / 3600.0
    lon0 = float(rng.integers(-179 * 3600, 179 * 3600)) / 3600.0
    h = rng.integers(-500, 4000, size=(n_lat, n_lon)).astype(float)
    voids = rng.random((n_lat, n_lon)) < void_fraction
    h[voids] = VOID_ELEVATION
    return TerrainGrid(lat0=lat0, lon0=lon0, dlat=spacing, dlon=spacing, H=h)
