"""Minimal standalone SVG rendering of a confidence band (d = 1)."""

from __future__ import annotations

import numpy as np

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 64, 16, 22, 42


def _path(xs, ys) -> str:
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))


def _ticks(lo, hi, count=5):
    return np.linspace(lo, hi, count)


def write_band_svg(path, ts, lower, upper, center, reference=None, title=""):
    """Band polygon plus center curve, optionally overlaid with a reference curve."""
    ts = np.asarray(ts, dtype=float)
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    center = np.asarray(center, dtype=float).ravel()
    ys = [lower, upper, center]
    if reference is not None:
        reference = np.asarray(reference, dtype=float).ravel()
        ys.append(reference)
    ymin = min(float(np.min(v)) for v in ys)
    ymax = max(float(np.max(v)) for v in ys)
    pad = 0.05 * (ymax - ymin or 1.0)
    ymin, ymax = ymin - pad, ymax + pad
    x0, x1 = float(ts[0]), float(ts[-1])

    def sx(x):
        return _ML + (x - x0) / (x1 - x0) * (_W - _ML - _MR)

    def sy(y):
        return _H - _MB - (y - ymin) / (ymax - ymin) * (_H - _MT - _MB)

    poly = _path(list(map(sx, ts)) + list(map(sx, ts[::-1])),
                 list(map(sy, upper)) + list(map(sy, lower[::-1])))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<polygon points="{poly}" fill="#1b3a6b" fill-opacity="0.35" stroke="none"/>',
        f'<polyline points="{_path(map(sx, ts), map(sy, center))}" fill="none" '
        f'stroke="#1b3a6b" stroke-width="1.5"/>',
    ]
    if reference is not None:
        parts.append(
            f'<polyline points="{_path(map(sx, ts), map(sy, reference))}" fill="none" '
            f'stroke="#c0392b" stroke-width="1.2" stroke-dasharray="5,3"/>')
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" height="{_H - _MT - _MB}" '
        f'fill="none" stroke="#333" stroke-width="1"/>')
    for xv in _ticks(x0, x1):
        parts.append(f'<line x1="{sx(xv):.2f}" y1="{_H - _MB}" x2="{sx(xv):.2f}" '
                     f'y2="{_H - _MB + 5}" stroke="#333"/>')
        parts.append(f'<text x="{sx(xv):.2f}" y="{_H - _MB + 18}" font-size="11" '
                     f'text-anchor="middle" font-family="sans-serif">{xv:.2g}</text>')
    for yv in _ticks(ymin, ymax):
        parts.append(f'<line x1="{_ML - 5}" y1="{sy(yv):.2f}" x2="{_ML}" '
                     f'y2="{sy(yv):.2f}" stroke="#333"/>')
        parts.append(f'<text x="{_ML - 8}" y="{sy(yv):.2f}" font-size="11" '
                     f'text-anchor="end" dominant-baseline="middle" '
                     f'font-family="sans-serif">{yv:.3g}</text>')
    if title:
        parts.append(f'<text x="{_W / 2}" y="{_MT - 7}" font-size="13" '
                     f'text-anchor="middle" font-family="sans-serif">{title}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
