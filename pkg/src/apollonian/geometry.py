"""Euclidean realisation of tangential disk triples and SVG rendering of the gasket.

Canonical placement: with three disks, d1 is centred at the origin, d2 sits on the
positive x-axis and d3 is placed so that the triple is positively oriented.  With a
half-plane member, its boundary is the x-axis (region y < 0), the lower-indexed
disk touches the axis at the origin and the other one is placed to keep the
orientation positive.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Sequence

from .curvature import CurvatureVector, inscribed_curvature, kappa_of
from .words import LETTERS, Word, apply, generator

RESIDUAL_TOL = 1e-9


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Disk:
    """An open disk, or the open half-plane {x : normal . x < offset}."""

    kind: str
    center: tuple[float, float] | None = None
    radius: float | None = None
    normal: tuple[float, float] | None = None
    offset: float | None = None

    def __post_init__(self):
        if self.kind == "disk":
            if self.radius is None or not self.radius > 0 or self.center is None:
                raise GeometryError("a disk needs a center and a positive radius")
        elif self.kind == "half-plane":
            if self.normal is None or self.offset is None:
                raise GeometryError("a half-plane needs a normal and an offset")
            if abs(math.hypot(*self.normal) - 1) > 1e-12:
                raise GeometryError("half-plane normal must be a unit vector")
        else:
            raise GeometryError(f"unknown kind {self.kind!r}")

    @classmethod
    def circle(cls, x: float, y: float, r: float) -> "Disk":
        return cls("disk", center=(float(x), float(y)), radius=float(r))

    @classmethod
    def half_plane(cls, normal: tuple[float, float], offset: float) -> "Disk":
        return cls("half-plane", normal=(float(normal[0]), float(normal[1])), offset=float(offset))

    @property
    def is_disk(self) -> bool:
        return self.kind == "disk"

    @property
    def curvature(self) -> float:
        return 1.0 / self.radius if self.is_disk else 0.0


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def tangency_residual(d: Disk, e: Disk) -> float:
    """Signed gap between two members; zero for external tangency."""
    if d.is_disk and e.is_disk:
        return math.dist(d.center, e.center) - (d.radius + e.radius)
    if d.is_disk:
        d, e = e, d
    if not e.is_disk:
        raise GeometryError("two half-planes cannot be externally tangent")
    n, o = d.normal, d.offset
    return (n[0] * e.center[0] + n[1] * e.center[1] - o) - e.radius


def tangency_point(d: Disk, e: Disk) -> tuple[float, float]:
    if d.is_disk and e.is_disk:
        u = _sub(e.center, d.center)
        L = math.hypot(*u)
        return (d.center[0] + d.radius * u[0] / L, d.center[1] + d.radius * u[1] / L)
    if d.is_disk:
        d, e = e, d
    n = d.normal
    return (e.center[0] - e.radius * n[0], e.center[1] - e.radius * n[1])


def _signed_area(p, q, r) -> float:
    return 0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))


@dataclass(frozen=True)
class DiskTriple:
    d1: Disk
    d2: Disk
    d3: Disk

    def __post_init__(self):
        if sum(not d.is_disk for d in self.members) > 1:
            raise GeometryError("at most one member may be a half-plane")

    @property
    def members(self) -> tuple[Disk, Disk, Disk]:
        return (self.d1, self.d2, self.d3)

    @property
    def scale(self) -> float:
        return max(d.radius for d in self.members if d.is_disk)

    @property
    def curvatures(self) -> tuple[float, float, float]:
        return tuple(d.curvature for d in self.members)

    def quadruple(self) -> CurvatureVector:
        a, b, c = self.curvatures
        return CurvatureVector(a, b, c, kappa_of(a, b, c))

    def replace(self, j: int, disk: Disk) -> "DiskTriple":
        m = list(self.members)
        m[j - 1] = disk
        return DiskTriple(*m)

    def tangency_residuals(self) -> dict[tuple[int, int], float]:
        m = self.members
        return {(i + 1, j + 1): tangency_residual(m[i], m[j]) for i, j in ((0, 1), (0, 2), (1, 2))}

    def validate(self, tol: float = RESIDUAL_TOL) -> None:
        for pair, res in self.tangency_residuals().items():
            if abs(res) > tol * self.scale:
                raise GeometryError(f"members {pair} are not externally tangent (residual {res:.3e})")
        q1, q2, q3 = tangency_points(self, check=False)
        if _signed_area(q1, q2, q3) <= 0:
            raise GeometryError("triple is not positively oriented")

    @classmethod
    def canonical(cls, curvatures: Sequence[float]) -> "DiskTriple":
        return canonical_triple(curvatures)

    @classmethod
    def from_json(cls, text: str) -> "DiskTriple":
        spec = json.loads(text)
        if spec.get("placement", "canonical") != "canonical":
            raise GeometryError(f"unsupported placement {spec['placement']!r}")
        return canonical_triple(spec["curvatures"])


def canonical_triple(curvatures: Sequence[float]) -> DiskTriple:
    a, b, c = (float(x) for x in curvatures)
    if min(a, b, c) < 0:
        raise GeometryError("curvatures must be nonnegative")
    if kappa_of(a, b, c) <= 0:
        raise GeometryError("at most one curvature may be zero")
    ks = (a, b, c)
    zeros = [i for i, k in enumerate(ks) if k == 0]
    if not zeros:
        r1, r2, r3 = 1 / a, 1 / b, 1 / c
        x2 = r1 + r2
        # d3 at distance r1 + r3 from the origin and r2 + r3 from (x2, 0)
        x3 = ((r1 + r3) ** 2 - (r2 + r3) ** 2 + x2**2) / (2 * x2)
        y3 = math.sqrt(max((r1 + r3) ** 2 - x3**2, 0.0))
        disks = [Disk.circle(0, 0, r1), Disk.circle(x2, 0, r2), Disk.circle(x3, y3, r3)]
        t = DiskTriple(*disks)
        if _signed_area(*tangency_points(t, check=False)) < 0:
            t = DiskTriple(*(Disk.circle(d.center[0], -d.center[1], d.radius) for d in disks))
        return t
    h = zeros[0]
    i, j = [x for x in range(3) if x != h]
    ri, rj = 1 / ks[i], 1 / ks[j]
    disks = [None, None, None]
    disks[h] = Disk.half_plane((0.0, 1.0), 0.0)
    disks[i] = Disk.circle(0, ri, ri)
    disks[j] = Disk.circle(2 * math.sqrt(ri * rj), rj, rj)
    t = DiskTriple(*disks)
    if _signed_area(*tangency_points(t, check=False)) < 0:
        disks[j] = Disk.circle(-2 * math.sqrt(ri * rj), rj, rj)
        t = DiskTriple(*disks)
    return t


def tangency_points(t: DiskTriple, check: bool = True) -> tuple[tuple[float, float], ...]:
    """(q1, q2, q3) where q_j is the common boundary point of the two members other than j."""
    if check:
        for pair, res in t.tangency_residuals().items():
            if abs(res) > RESIDUAL_TOL * t.scale:
                raise GeometryError(f"members {pair} are not externally tangent (residual {res:.3e})")
    m = t.members
    return (tangency_point(m[1], m[2]), tangency_point(m[0], m[2]), tangency_point(m[0], m[1]))


def _offset_locus(d: Disk, r: float):
    """Centers of radius-r disks externally tangent to d."""
    if d.is_disk:
        return ("circle", d.center, d.radius + r)
    return ("line", d.normal, d.offset + r)


def _intersect(l1, l2) -> list[tuple[float, float]]:
    if l1[0] == "line" and l2[0] == "line":
        return []
    if l1[0] == "line":
        l1, l2 = l2, l1
    if l2[0] == "circle":
        (c1, r1), (c2, r2) = l1[1:], l2[1:]
        dx, dy = c2[0] - c1[0], c2[1] - c1[1]
        D = math.hypot(dx, dy)
        a = (r1 * r1 - r2 * r2 + D * D) / (2 * D)
        h = math.sqrt(max(r1 * r1 - a * a, 0.0))
        mx, my = c1[0] + a * dx / D, c1[1] + a * dy / D
        return [(mx - h * dy / D, my + h * dx / D), (mx + h * dy / D, my - h * dx / D)]
    c, r = l1[1:]
    n, o = l2[1:]
    # points p with |p - c| = r and n . p = o
    s = o - (n[0] * c[0] + n[1] * c[1])
    h = math.sqrt(max(r * r - s * s, 0.0))
    fx, fy = c[0] + s * n[0], c[1] + s * n[1]
    return [(fx - h * n[1], fy + h * n[0]), (fx + h * n[1], fy - h * n[0])]


def inscribed_disk(t: DiskTriple, radius: float | None = None) -> Disk:
    """The disk inside the ideal triangle tangent to all three members.

    Its radius comes from the curvature formula; the centre is the candidate among all
    pairwise offset-locus intersections with the smallest worst tangency residual.
    """
    if radius is None:
        g = t.quadruple()
        radius = 1.0 / float(inscribed_curvature(g))
    m = t.members
    best, best_res = None, math.inf
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for p in _intersect(_offset_locus(m[i], radius), _offset_locus(m[j], radius)):
            cand = Disk.circle(p[0], p[1], radius)
            res = max(abs(tangency_residual(cand, d)) for d in m)
            if res < best_res:
                best, best_res = cand, res
    if best is None or best_res > RESIDUAL_TOL * t.scale:
        raise GeometryError(f"no inscribed disk found (best residual {best_res:.3e})")
    return best


def circumscribed_disk(t: DiskTriple) -> Disk:
    """The disk whose boundary passes through q1, q2, q3 (a half-plane if they are collinear)."""
    q1, q2, q3 = tangency_points(t)
    ax, ay = q1
    bx, by = q2
    cx, cy = q3
    den = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(den) < 1e-15 * t.scale**2:
        nx, ny = -(by - ay), bx - ax
        L = math.hypot(nx, ny)
        return Disk.half_plane((nx / L, ny / L), (nx * ax + ny * ay) / L)
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / den
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / den
    return Disk.circle(ux, uy, math.dist((ux, uy), q1))


def orthogonality_residuals(t: DiskTriple, cir: Disk) -> list[float]:
    """|c - c_j|^2 - r^2 - r_j^2 per disk member; for a half-plane, distance of c to its line."""
    out = []
    for d in t.members:
        if d.is_disk:
            out.append(math.dist(cir.center, d.center) ** 2 - cir.radius**2 - d.radius**2)
        else:
            out.append(d.normal[0] * cir.center[0] + d.normal[1] * cir.center[1] - d.offset)
    return out


def child_triple(t: DiskTriple, j: int) -> DiskTriple:
    """Replace member j by the inscribed disk."""
    if j not in LETTERS:
        raise ValueError(f"invalid letter {j!r}")
    return t.replace(j, inscribed_disk(t))


def descendant(t: DiskTriple, w: Word) -> DiskTriple:
    for ch in w:
        t = child_triple(t, int(ch))
    return t


@dataclass(frozen=True)
class InscribedCircle:
    word: Word
    curvature: float
    disk: Disk


def enumerate_inscribed(t: DiskTriple, cutoff: float, g: CurvatureVector | None = None) -> list[InscribedCircle]:
    """Inscribed disks of all D_w with curvature <= cutoff, sorted by word.

    The cutoff is applied to the algebraic curvature g M_w (1,1,1,2)^T, exact for
    integral g, so that circles sitting exactly at the cutoff are kept.
    """
    if g is None:
        g = t.quadruple()
    out = []
    stack = [("", t, g)]
    while stack:
        w, tri, q = stack.pop()
        k = inscribed_curvature(q)
        if k > cutoff:
            continue
        disk = inscribed_disk(tri, 1.0 / float(k))
        out.append(InscribedCircle(w, float(k), disk))
        for j in LETTERS:
            stack.append((w + str(j), tri.replace(j, disk), apply(q, generator(j))))
    out.sort(key=lambda c: (len(c.word), c.word))
    return out


@dataclass
class RenderSpec:
    cutoff: float
    stroke: str = "#000000"
    fill: str = "none"
    seed_fill: str = "#d0d0d0"
    stroke_width: float = 0.002
    viewport: tuple[float, float, float, float] | None = None  # (xmin, ymin, width, height)
    width_px: int = 800
    output: str | None = None
    description: str | None = None


def _clip_rect_to_half_plane(vp, d: Disk) -> list[tuple[float, float]]:
    x0, y0, w, h = vp
    poly = [(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)]
    n, o = d.normal, d.offset

    def f(p):
        return n[0] * p[0] + n[1] * p[1] - o

    out = []
    for i, p in enumerate(poly):
        q = poly[(i + 1) % len(poly)]
        fp, fq = f(p), f(q)
        if fp < 0:
            out.append(p)
        if (fp < 0) != (fq < 0):
            s = fp / (fp - fq)
            out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
    return out


def _num(x: float) -> str:
    return f"{x:.10g}"


def render_svg(t: DiskTriple, spec: RenderSpec) -> str:
    """SVG 1.1 document: the three seeds plus every inscribed disk up to the cutoff.

    Output is a pure function of (t, spec); if ``spec.output`` is set the document
    is also written there.
    """
    t.validate()
    g = t.quadruple()
    if not spec.cutoff > max(t.curvatures):
        raise GeometryError("cutoff must exceed every seed curvature")
    circles = enumerate_inscribed(t, spec.cutoff)
    vp = spec.viewport
    if vp is None:
        cir = circumscribed_disk(t)
        if cir.is_disk:
            m = 0.05 * cir.radius
            vp = (cir.center[0] - cir.radius - m, cir.center[1] - cir.radius - m, 2 * (cir.radius + m), 2 * (cir.radius + m))
        else:
            vp = (-t.scale, -t.scale, 2 * t.scale, 2 * t.scale)
    x0, y0, w, h = vp
    height_px = max(1, round(spec.width_px * h / w))
    sw = _num(spec.stroke_width * w)
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width_px}" height="{height_px}" '
        f'viewBox="{_num(x0)} {_num(-(y0 + h))} {_num(w)} {_num(h)}">',
        f"<title>Apollonian gasket for curvatures {g}</title>",
    ]
    if spec.description:
        lines.append("<desc>" + _escape(spec.description) + "</desc>")
    # the y axis is flipped so that the picture uses mathematical orientation
    lines.append('<g transform="scale(1,-1)">')
    lines.append(f'<g id="seeds" fill="{spec.seed_fill}" stroke="{spec.stroke}" stroke-width="{sw}">')
    for idx, d in enumerate(t.members, start=1):
        if d.is_disk:
            lines.append(f'<circle id="seed{idx}" cx="{_num(d.center[0])}" cy="{_num(d.center[1])}" r="{_num(d.radius)}"/>')
        else:
            pts = " ".join(f"{_num(p[0])},{_num(p[1])}" for p in _clip_rect_to_half_plane(vp, d))
            lines.append(f'<polygon id="seed{idx}" points="{pts}"/>')
    lines.append("</g>")
    lines.append(f'<g id="inscribed" fill="{spec.fill}" stroke="{spec.stroke}" stroke-width="{sw}">')
    for c in circles:
        cx, cy = c.disk.center
        lines.append(
            f'<circle id="w{c.word or "0"}" cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(c.disk.radius)}"/>'
        )
    lines.append("</g>")
    lines.append("</g>")
    lines.append("</svg>")
    doc = "\n".join(lines) + "\n"
    if spec.output:
        try:
            with open(spec.output, "w", encoding="utf-8") as fh:
                fh.write(doc)
        except OSError as exc:
            raise OSError(f"cannot write SVG to {os.fspath(spec.output)!r}: {exc}") from exc
    return doc


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")

