"""
Trace Figures
Two-panel figures of a trace: the slit on the left, driving functions against
time on the right. Multi-slit traces carry no tips and get the driving panel
alone. SVG is written directly, PNG through Pillow.
"""

import logging
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image, ImageDraw

import qd_config as config
from src.evolution.trace_result import TraceResult

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


@dataclass
class Panel:
    """Screen box of one panel with a linear data-to-pixel transform"""

    left: float
    top: float
    width: float
    height: float
    x_range: Tuple[float, float]
    y_range: Tuple[float, float]

    def to_screen(self, x: float, y: float) -> Point:
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        sx = self.left + (x - x0) / (x1 - x0) * self.width
        sy = self.top + self.height - (y - y0) / (y1 - y0) * self.height
        return sx, sy

    def polyline(self, xs: Sequence[float], ys: Sequence[float]) -> List[Point]:
        return [self.to_screen(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]


def _padded(lo: float, hi: float) -> Tuple[float, float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return -1.0, 1.0
    if hi - lo < 1e-12:
        return lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _finite(values: np.ndarray) -> np.ndarray:
    return values[np.isfinite(values)]


def layout(result: TraceResult, size: Tuple[int, int],
           vertices: Optional[Sequence[complex]] = None):
    """Panels, slit polylines and driving polylines in screen coordinates.

    The slit panel is None for multi-slit traces.
    """
    width, height = size
    margin = config.OUTPUT['margin']
    has_slit = result.kind != 'multi'
    panel_w = (width - 3 * margin) / 2.0 if has_slit else width - 2.0 * margin
    panel_h = height - 2 * margin

    t = result.t
    n_xi = len(result.samples[0].xis) if result.samples else 0
    columns = [result.xi_column(i) for i in range(n_xi)]
    all_xi = _finite(np.concatenate(columns)) if columns else np.array([])
    t_range = _padded(float(t.min()), float(t.max())) if t.size else (0.0, 1.0)
    xi_range = _padded(float(all_xi.min()), float(all_xi.max())) if all_xi.size else (-1.0, 1.0)
    drive_left = 2 * margin + panel_w if has_slit else margin
    drive_panel = Panel(drive_left, margin, panel_w, panel_h, t_range, xi_range)
    drives = [drive_panel.polyline(t, column) for column in columns]
    if not has_slit:
        return None, drive_panel, [], [], drives, []

    tips = result.tips
    points = np.concatenate([tips[np.isfinite(tips)],
                             np.asarray(vertices if vertices is not None else [], dtype=complex)])
    if result.kind == 'radial':
        xr, yr = (-1.05, 1.05), (-1.05, 1.05)
    elif points.size:
        xr = _padded(points.real.min(), points.real.max())
        yr = _padded(0.0, points.imag.max())
    else:
        xr, yr = (-1.0, 1.0), (0.0, 1.0)
    slit_panel = Panel(margin, margin, panel_w, panel_h, xr, yr)
    slit = slit_panel.polyline(tips.real, tips.imag)
    reference = slit_panel.polyline([v.real for v in vertices], [v.imag for v in vertices]) \
        if vertices is not None else []
    if result.kind == 'radial':
        circle = [slit_panel.to_screen(math.cos(a), math.sin(a))
                  for a in np.linspace(0.0, 2 * math.pi, 181)]
        axis = [circle]
    else:
        axis = [[slit_panel.to_screen(xr[0], 0.0), slit_panel.to_screen(xr[1], 0.0)]]
    return slit_panel, drive_panel, slit, reference, drives, axis


def _framed(*panels: Optional[Panel]) -> List[Panel]:
    return [panel for panel in panels if panel is not None]


def render_svg(result: TraceResult, vertices: Optional[Sequence[complex]] = None,
               size: Tuple[int, int] = config.OUTPUT['svg_size']) -> str:
    slit_panel, drive_panel, slit, reference, drives, axis = layout(result, size, vertices)
    svg = ET.Element('svg')
    svg.set('xmlns', 'http://www.w3.org/2000/svg')
    svg.set('width', str(size[0]))
    svg.set('height', str(size[1]))
    svg.set('viewBox', f"0 0 {size[0]} {size[1]}")

    def add_polyline(points: List[Point], color: str, stroke: float, dashed: bool = False):
        if len(points) < 2:
            return
        line = ET.SubElement(svg, 'polyline')
        line.set('points', ' '.join(f"{x:.2f},{y:.2f}" for x, y in points))
        line.set('fill', 'none')
        line.set('stroke', color)
        line.set('stroke-width', str(stroke))
        if dashed:
            line.set('stroke-dasharray', '4 3')

    for panel in _framed(slit_panel, drive_panel):
        frame = ET.SubElement(svg, 'rect')
        for key, value in (('x', panel.left), ('y', panel.top), ('width', panel.width),
                           ('height', panel.height)):
            frame.set(key, f"{value:.2f}")
        frame.set('fill', 'none')
        frame.set('stroke', config.OUTPUT['axis_color'])

    for line in axis:
        add_polyline(line, config.OUTPUT['axis_color'], 1)
    add_polyline(reference, config.OUTPUT['axis_color'], 1, dashed=True)
    add_polyline(slit, config.OUTPUT['slit_color'], 2)
    colors = config.OUTPUT['driving_colors']
    for i, drive in enumerate(drives):
        add_polyline(drive, colors[i % len(colors)], 1.5)

    label = ET.SubElement(svg, 'text')
    label.set('x', f"{drive_panel.left:.2f}")
    label.set('y', f"{drive_panel.top - 8:.2f}")
    label.set('font-size', '12')
    label.text = f"driving function ({result.stop_reason})"
    return ET.tostring(svg, encoding='unicode')


def write_svg(result: TraceResult, filename: str,
              vertices: Optional[Sequence[complex]] = None):
    with open(filename, 'w', encoding='utf-8') as handle:
        handle.write(render_svg(result, vertices))
    logger.info("wrote %s", filename)


def render_png(result: TraceResult, vertices: Optional[Sequence[complex]] = None,
               size: Tuple[int, int] = config.OUTPUT['png_size']) -> Image.Image:
    slit_panel, drive_panel, slit, reference, drives, axis = layout(result, size, vertices)
    image = Image.new('RGB', size, 'white')
    draw = ImageDraw.Draw(image)
    for panel in _framed(slit_panel, drive_panel):
        draw.rectangle([panel.left, panel.top, panel.left + panel.width, panel.top + panel.height],
                       outline=config.OUTPUT['axis_color'])
    for line in axis + [reference]:
        if len(line) >= 2:
            draw.line(line, fill=config.OUTPUT['axis_color'], width=1)
    if len(slit) >= 2:
        draw.line(slit, fill=config.OUTPUT['slit_color'], width=2)
    colors = config.OUTPUT['driving_colors']
    for i, drive in enumerate(drives):
        if len(drive) >= 2:
            draw.line(drive, fill=colors[i % len(colors)], width=2)
    return image


def write_png(result: TraceResult, filename: str,
              vertices: Optional[Sequence[complex]] = None):
    render_png(result, vertices).save(filename, format='PNG')
    logger.info("wrote %s", filename)
