"""SVG rendering of two-feature models in the unit square."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
UNLABELED_COLOR = "#444444"


class UnsupportedDimensionError(ValueError):
    pass


def _color(label: int) -> str:
    return UNLABELED_COLOR if label == 0 else PALETTE[(label - 1) % len(PALETTE)]


def render_svg(model, points=None, point_labels=None, size: int = 480, title: str = "") -> str:
    """Draw every hyperbox of a 2-feature model, plus optional unit-scaled points.

    Degenerate boxes (zero width or height) are drawn with a hairline so
    they stay visible.
    """
    if model.n_features != 2:
        raise UnsupportedDimensionError(
            f"unsupported dimensionality: snapshots need exactly 2 features, model has {model.n_features}"
        )
    pad = 24
    s = size - 2 * pad

    def px(x):
        return pad + float(x) * s

    def py(y):
        return pad + (1.0 - float(y)) * s

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="{pad}" y="{pad}" width="{s}" height="{s}" fill="white" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{pad}" y="{pad - 8}" font-size="12">{escape(title)}</text>')
    for v, w, lab, n in zip(model.V, model.W, model.labels, model.cardinality):
        c = _color(int(lab))
        x0, x1, y0, y1 = px(v[0]), px(w[0]), py(w[1]), py(v[1])
        out.append(
            f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{max(x1 - x0, 0.5):.2f}" '
            f'height="{max(y1 - y0, 0.5):.2f}" fill="{c}" fill-opacity="0.15" stroke="{c}">'
            f"<title>class {int(lab)}, n={int(n)}</title></rect>"
        )
    if points is not None:
        points = np.asarray(points, dtype=float)
        labels = np.zeros(len(points), dtype=int) if point_labels is None else np.asarray(point_labels)
        for (x, y), lab in zip(points, labels):
            out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" fill="{_color(int(lab))}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
