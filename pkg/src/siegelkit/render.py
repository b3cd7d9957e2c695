"""Raster and figure output: zero-dependency PPM plus matplotlib reports."""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


PALETTE = [(230, 90, 60), (60, 120, 230), (60, 180, 90), (200, 160, 40),
           (150, 80, 200), (90, 90, 90)]


def write_ppm(rgb: np.ndarray, path: str):
    """Binary P6 image from an (H, W, 3) uint8 array."""
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(rgb.astype(np.uint8).tobytes())


def rasterize_point_sets(sets, size: int = 800, margin: float = 0.08,
                         bounds=None) -> np.ndarray:
    """White canvas with each complex point set drawn in its own color."""
    pts_all = np.concatenate([np.asarray(s).ravel() for s in sets if len(s)])
    if bounds is None:
        x0, x1 = pts_all.real.min(), pts_all.real.max()
        y0, y1 = pts_all.imag.min(), pts_all.imag.max()
        span = max(x1 - x0, y1 - y0, 1e-9)
        pad = margin * span
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        x0, x1 = cx - span / 2 - pad, cx + span / 2 + pad
        y0, y1 = cy - span / 2 - pad, cy + span / 2 + pad
    else:
        x0, x1, y0, y1 = bounds
    img = np.full((size, size, 3), 255, dtype=np.uint8)
    for color, pts in zip(PALETTE, sets):
        pts = np.asarray(pts).ravel()
        if not len(pts):
            continue
        ix = ((pts.real - x0) / (x1 - x0) * (size - 1)).astype(int)
        iy = ((pts.imag - y0) / (y1 - y0) * (size - 1)).astype(int)
        ok = (ix >= 0) & (ix < size) & (iy >= 0) & (iy < size)
        img[size - 1 - iy[ok], ix[ok]] = color
    return img


def save_point_sets_ppm(sets, path: str, size: int = 800, bounds=None):
    write_ppm(rasterize_point_sets(sets, size=size, bounds=bounds), path)


def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=(7.0, 7.0))
    ax.set_title(title)
    ax.set_aspect("equal")
    return fig, ax


def figure_boundary(oracle, orbit, path: str):
    fig, ax = _new_axes("Siegel boundary: series estimate vs critical orbit")
    ax.plot(orbit.real[::7], orbit.imag[::7], ",", color="0.65",
            label="critical orbit")
    b = oracle.boundary
    ax.plot(b.real, b.imag, "-", lw=0.9, color="crimson",
            label="series boundary")
    c = oracle.inner_circle
    ax.plot(c.real, c.imag, "--", lw=0.7, color="navy",
            label="0.995 rho circle")
    ax.plot([0], [0], "k+")
    ax.legend(loc="upper right", fontsize=8)
    fig.savefig(path, dpi=160)
    plt.close(fig)


def figure_grid(grid, path: str):
    fig, ax = plt.subplots(1, 2, figsize=(11, 5))
    re, im = grid.axes()
    ext = [re[0], re[-1], im[0], im[-1]]
    im0 = ax[0].imshow(np.real(grid.values), origin="lower", extent=ext,
                       aspect="auto", cmap="twilight")
    ax[0].set_title("Re phi")
    fig.colorbar(im0, ax=ax[0], shrink=0.8)
    im1 = ax[1].imshow(np.imag(grid.values), origin="lower", extent=ext,
                       aspect="auto", cmap="viridis")
    ax[1].set_title("Im phi")
    fig.colorbar(im1, ax=ax[1], shrink=0.8)
    fig.suptitle("Fatou coordinate, alpha=%.6f (residual q99 %.1e)"
                 % (grid.alpha, grid.residual_quantile99))
    fig.savefig(path, dpi=160)
    plt.close(fig)


def figure_curves(curve_images, oracle, path: str, labels=None):
    fig, ax = _new_axes("tower curves in the dynamical plane")
    if oracle is not None:
        b = oracle.boundary
        ax.plot(b.real, b.imag, "-", color="0.7", lw=2.5, label="boundary oracle")
    for i, zc in enumerate(curve_images):
        lab = labels[i] if labels else "level %d" % i
        ax.plot(zc.real, zc.imag, "-", lw=0.9, label=lab)
    ax.plot([0], [0], "k+")
    ax.legend(loc="upper right", fontsize=8)
    fig.savefig(path, dpi=160)
    plt.close(fig)


def figure_sector(sr, path: str):
    fig, ax = _new_axes("sector pullback (coordinate plane), k_f=%d" % sr.k_f)
    ax.plot(np.real(sr.left_phi), np.imag(sr.left_phi), ".-", ms=2, lw=0.6,
            label="left edge")
    ax.plot(np.real(sr.right_phi), np.imag(sr.right_phi), ".-", ms=2, lw=0.6,
            label="right edge")
    ax.plot(np.real(sr.crossbar_phi), np.imag(sr.crossbar_phi), ".-", ms=2,
            lw=0.6, label="crossbar")
    ax.set_aspect("auto")
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=160)
    plt.close(fig)


def figure_arc(arc, oracle, path: str):
    fig, ax = _new_axes("canonical arc approximation")
    if oracle is not None:
        b = oracle.boundary
        ax.plot(b.real, b.imag, "-", color="0.75", lw=1.5, label="boundary")
    for lvl in arc.levels:
        poly = lvl.k_polygon
        ax.plot(poly.real, poly.imag, "-", lw=0.8, label="K_%d" % lvl.i)
    ax.plot(arc.arc_z.real, arc.arc_z.imag, "-", color="black", lw=1.4,
            label="arc estimate")
    ax.plot([-4 / 27], [0], "r*", ms=10)
    ax.plot([0], [0], "k+")
    ax.legend(loc="upper right", fontsize=8)
    fig.savefig(path, dpi=160)
    plt.close(fig)
