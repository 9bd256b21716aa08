"""CSV and SVG serialization with reproducibility metadata headers.

CSV is the source of truth; every file opens with comment lines recording the
full parameter set, grid size, seed, and package version, so a rerun can be
reconstructed from any output file alone. Numbers use 17 significant digits,
which round-trips doubles exactly. SVG charts are self-contained convenience
views of the same data.
"""

import math
from xml.sax.saxutils import escape

import numpy as np

from ._version import __version__
from .core import Field, ModelParams, NumericsConfig, make_grid


def fmt(x) -> str:
    """Serialize one value: floats at 17 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def metadata_lines(
    params: ModelParams | None = None,
    cfg: NumericsConfig | None = None,
    grid_size: int | None = None,
    extra: dict | None = None,
) -> list:
    pairs = [("version", __version__)]
    if params is not None:
        for name in ("mu", "sigma", "bigF", "tau", "v", "LambdaTotal", "PhiTotal", "rho"):
            pairs.append((name, fmt(getattr(params, name))))
    if grid_size is not None:
        pairs.append(("n_nodes", str(grid_size)))
    if cfg is not None:
        for name in ("dt", "fp_tol", "fp_max_iter", "stat_tol", "max_steps", "seed",
                     "perturb_amplitude"):
            pairs.append((name, fmt(getattr(cfg, name))))
    for key, value in (extra or {}).items():
        pairs.append((key, value if isinstance(value, str) else fmt(value)))
    return [f"# {k} = {v}" for k, v in pairs]


def write_field_csv(field: Field, path, params=None, cfg=None, extra=None) -> None:
    lines = metadata_lines(params, cfg, field.grid.n_nodes, extra)
    lines.append("theta,value")
    for t, v in zip(field.grid.theta, field.values):
        lines.append(f"{fmt(t)},{fmt(v)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_field_csv(path):
    """Read a field file back: (theta, values, metadata dict)."""
    meta: dict = {}
    theta = []
    values = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    meta[key.strip()] = val.strip()
                continue
            if line.startswith("theta"):
                continue
            a, _, b = line.partition(",")
            theta.append(float(a))
            values.append(float(b))
    return np.array(theta), np.array(values), meta


def field_from_csv(path, rho: float) -> Field:
    """Rebuild a Field from a file, checking the grid is uniform and periodic."""
    theta, values, meta = read_field_csv(path)
    n = len(theta)
    if "rho" in meta:
        rho = float(meta["rho"])
    grid = make_grid(n, rho)
    if not np.allclose(theta, grid.theta, rtol=0.0, atol=1e-9):
        raise ValueError(f"{path}: node angles are not a uniform grid starting at -pi")
    return Field(values, grid)


def write_modes_csv(rows, path, params=None, cfg=None, extra=None) -> None:
    """Eigenvalue table rows (k, tau, sigma, Zk, Gamma_k)."""
    lines = metadata_lines(params, cfg, None, extra)
    lines.append("k,tau,sigma,Zk,Gamma_k")
    for k, tau, sigma, zk, gk in rows:
        lines.append(f"{int(k)},{fmt(tau)},{fmt(sigma)},{fmt(zk)},{fmt(gk)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_csv(rows, path, params=None, cfg=None, extra=None) -> None:
    """SweepRow records, one line per parameter value."""
    lines = metadata_lines(params, cfg, None, extra)
    lines.append("param_name,param_value,spike_count,converged,steps")
    for r in rows:
        spike = "" if r.spike_count is None else str(r.spike_count)
        lines.append(
            f"{r.varied_param},{fmt(r.value)},{spike},{fmt(r.converged)},{r.steps}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
)


def _nice_ticks(lo: float, hi: float, target: int = 5):
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    span = hi - lo
    raw = span / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def _tick_label(t: float) -> str:
    return f"{t:.6g}"


def render_line_svg(series, path, title="", xlabel="", ylabel="",
                    width=720, height=480) -> None:
    """Line chart of (label, xs, ys) series as a self-contained SVG file."""
    left, right, top, bottom = 72, 24, 44, 56
    pw = width - left - right
    ph = height - top - bottom
    xs_all = np.concatenate([np.asarray(xs, float) for _, xs, _ in series]) if series else np.array([0.0])
    ys_all = np.concatenate([np.asarray(ys, float) for _, _, ys in series]) if series else np.array([0.0])
    finite_x = xs_all[np.isfinite(xs_all)]
    finite_y = ys_all[np.isfinite(ys_all)]
    x0, x1 = (finite_x.min(), finite_x.max()) if finite_x.size else (0.0, 1.0)
    y0, y1 = (finite_y.min(), finite_y.max()) if finite_y.size else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    ypad = 0.05 * (y1 - y0)
    y0 -= ypad
    y1 += ypad

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="15">'
            f"{escape(title)}</text>"
        )
    for t in _nice_ticks(x0, x1):
        x = px(t)
        parts.append(
            f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + ph}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">'
            f"{_tick_label(t)}</text>"
        )
    for t in _nice_ticks(y0, y1):
        y = py(t)
        parts.append(
            f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">'
            f"{_tick_label(t)}</text>"
        )
    parts.append(
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#333333"/>'
    )
    if xlabel:
        parts.append(
            f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle">'
            f"{escape(xlabel)}</text>"
        )
    if ylabel:
        parts.append(
            f'<text x="18" y="{top + ph / 2}" text-anchor="middle" '
            f'transform="rotate(-90 18 {top + ph / 2})">{escape(ylabel)}</text>'
        )
    for idx, (label, xs, ys) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = []
        for x, y in zip(np.asarray(xs, float), np.asarray(ys, float)):
            if math.isfinite(x) and math.isfinite(y):
                pts.append(f"{px(x):.2f},{py(y):.2f}")
        if pts:
            parts.append(
                f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" '
                'stroke-width="1.6"/>'
            )
        parts.append(
            f'<text x="{left + pw - 8}" y="{top + 16 + 15 * idx}" text-anchor="end" '
            f'fill="{color}">{escape(str(label))}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def _diverging_color(z: float, zmax: float) -> str:
    if not math.isfinite(z):
        return "#bbbbbb"
    t = max(-1.0, min(1.0, z / zmax)) if zmax > 0 else 0.0
    if t >= 0:
        r, g, b = 255, round(255 * (1 - t)), round(255 * (1 - t))
    else:
        r, g, b = round(255 * (1 + t)), round(255 * (1 + t)), 255
    return f"rgb({r},{g},{b})"


def render_heatmap_svg(xs, ys, z, path, title="", xlabel="", ylabel="",
                       width=720, height=520) -> None:
    """Heatmap of z[j][i] over (xs[i], ys[j]); diverging palette centered at 0."""
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    z = np.asarray(z, float)
    left, right, top, bottom = 72, 24, 44, 76
    pw = width - left - right
    ph = height - top - bottom
    finite = z[np.isfinite(z)]
    zmax = float(np.max(np.abs(finite))) if finite.size else 1.0
    cw = pw / len(xs)
    ch = ph / len(ys)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="15">'
            f"{escape(title)}</text>"
        )
    for j in range(len(ys)):
        for i in range(len(xs)):
            color = _diverging_color(float(z[j][i]), zmax)
            x = left + i * cw
            y = top + ph - (j + 1) * ch  # y axis increases upward
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw + 0.5:.2f}" '
                f'height="{ch + 0.5:.2f}" fill="{color}"/>'
            )
    parts.append(
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#333333"/>'
    )
    parts.append(
        f'<text x="{left}" y="{top + ph + 18}" text-anchor="middle">'
        f"{_tick_label(float(xs[0]))}</text>"
    )
    parts.append(
        f'<text x="{left + pw}" y="{top + ph + 18}" text-anchor="middle">'
        f"{_tick_label(float(xs[-1]))}</text>"
    )
    parts.append(
        f'<text x="{left - 8}" y="{top + ph}" text-anchor="end">'
        f"{_tick_label(float(ys[0]))}</text>"
    )
    parts.append(
        f'<text x="{left - 8}" y="{top + 10}" text-anchor="end">'
        f"{_tick_label(float(ys[-1]))}</text>"
    )
    if xlabel:
        parts.append(
            f'<text x="{left + pw / 2}" y="{top + ph + 40}" text-anchor="middle">'
            f"{escape(xlabel)}</text>"
        )
    if ylabel:
        parts.append(
            f'<text x="18" y="{top + ph / 2}" text-anchor="middle" '
            f'transform="rotate(-90 18 {top + ph / 2})">{escape(ylabel)}</text>'
        )
    parts.append(
        f'<text x="{left}" y="{height - 10}">blue = {_tick_label(-zmax)}'
        f", white = 0, red = {_tick_label(zmax)}</text>"
    )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
