"""Real ovals, c-contours and the canonical (a, b) cycle basis.

Over the real lambda-axis the real branch points cut the line into intervals
with a constant number of real mu-roots.  A *run* is one rank (position in
the ascending list of real roots) over one interval; real ovals are chains
of runs glued at the real branch points (turning points, where two adjacent
ranks merge) and through lambda = infinity (where each asymptotic line
continues to itself).

Surface cycles are closed chains of path segments in the lambda-plane, each
with the mu-value it starts on.  Turning points are replaced by a full small
circle around the branch point, which carries one rank to its partner and
is homotopic to the real turn; passages through infinity become half-circles
of radius ``FAR_RADIUS`` in the upper half-plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .curve import (
    ContinuationError,
    SpectralParams,
    Track,
    branch_points,
    nodes,
    p_value,
    real_roots,
    track_segment,
)
from .numerics.paths import ArcSegment, LineSegment, circle

FAR_RADIUS = 8.0
# asymptotic ranks of the five lines at lam -> -inf and lam -> +inf
_LEFT_ORDER = ("Gamma23", "Gamma13", "Gamma0", "Sigma23", "Sigma24")
_RIGHT_ORDER = ("Sigma23", "Sigma24", "Gamma0", "Gamma23", "Gamma13")
# corner node (index into curve.nodes) circled by c1..c4
_C_CORNERS = (4, 6, 7, 5)
# c_j o b_k with the orientation conventions of the basis (rows c, columns b)
C_DOT_B = ((-1, 0, 0, -1), (0, -1, 0, 1), (0, 0, -1, -1), (0, 0, 0, 1))
# a_j as integer combinations of c_1..c_4
A_FROM_C = ((-1, 0, 0, -1), (0, -1, 0, 1), (0, 0, -1, -1), (0, 0, 0, 1))


class TopologyError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# real ovals


@dataclass(frozen=True)
class RealOval:
    label: str
    runs: tuple[tuple[int, int], ...]
    bounded: bool

    def __contains__(self, run):
        return run in self.runs


@dataclass(frozen=True)
class RealLayout:
    """Real branch points, the intervals between them and their root counts."""

    breaks: tuple[float, ...]
    counts: tuple[int, ...]

    def interval(self, i):
        lo = self.breaks[i - 1] if i > 0 else -math.inf
        hi = self.breaks[i] if i < len(self.breaks) else math.inf
        return lo, hi

    def sample_point(self, i):
        lo, hi = self.interval(i)
        if math.isinf(lo):
            return hi - 1.0
        if math.isinf(hi):
            return lo + 1.0
        return 0.5 * (lo + hi)


def real_layout(params: SpectralParams) -> RealLayout:
    breaks = tuple(float(b.lam.real) for b in branch_points(params) if b.is_real)
    lay = RealLayout(breaks, ())
    counts = tuple(len(real_roots(lay.sample_point(i), params)) for i in range(len(breaks) + 1))
    return RealLayout(breaks, counts)


def _turn_ranks(layout: RealLayout, k: int, params: SpectralParams):
    """At real branch point ``k``: (interval with more roots, merging ranks)."""
    left, right = k, k + 1
    big = left if layout.counts[left] > layout.counts[right] else right
    if abs(layout.counts[left] - layout.counts[right]) != 2:
        raise TopologyError("real root count does not jump by two at a real branch point")
    bp = [b for b in branch_points(params) if b.is_real][k]
    lam, mu_star = float(bp.lam.real), float(bp.mu.real)
    delta = 1e-4 * (1 + abs(lam))
    lo, hi = layout.interval(big)
    probe = lam - delta if big == left else lam + delta
    probe = min(max(probe, lo if not math.isinf(lo) else probe), hi if not math.isinf(hi) else probe)
    roots = real_roots(probe, params)
    order = sorted(range(len(roots)), key=lambda r: abs(roots[r] - mu_star))[:2]
    order.sort()
    if order[1] - order[0] != 1:
        raise TopologyError("merging roots at a real branch point are not adjacent")
    return big, tuple(order)


@dataclass
class _RunGraph:
    layout: RealLayout
    # for each run end (interval, rank, side) the run end it is glued to
    glue: dict = field(default_factory=dict)
    # turning points: (interval, side) -> real branch point index
    turns: dict = field(default_factory=dict)


def _run_graph(params: SpectralParams) -> _RunGraph:
    lay = real_layout(params)
    g = _RunGraph(lay)
    for k in range(len(lay.breaks)):
        big, (r0, r1) = _turn_ranks(lay, k, params)
        small = k + 1 if big == k else k
        side_big = "R" if big == k else "L"
        side_small = "L" if big == k else "R"
        g.glue[(big, r0, side_big)] = (big, r1, side_big)
        g.glue[(big, r1, side_big)] = (big, r0, side_big)
        g.turns[(big, side_big)] = k
        rest = [r for r in range(lay.counts[big]) if r not in (r0, r1)]
        for s, r in enumerate(rest):
            g.glue[(big, r, side_big)] = (small, s, side_small)
            g.glue[(small, s, side_small)] = (big, r, side_big)
    last = len(lay.breaks)
    if lay.counts[0] != 5 or lay.counts[last] != 5:
        raise TopologyError("expected five real sheets near lambda = infinity")
    for r, name in enumerate(_LEFT_ORDER):
        s = _RIGHT_ORDER.index(name)
        g.glue[(0, r, "L")] = (last, s, "R")
        g.glue[(last, s, "R")] = (0, r, "L")
    return g


def _walk(g: _RunGraph, start):
    """Traverse the oval through run ``start`` rightwards first.

    Yields (interval, rank, direction) with direction +1 (increasing lambda)
    or -1, and the kind of junction crossed at the end of each run.
    """
    steps = []
    run, direction = start, +1
    seen = set()
    while True:
        key = (run, direction)
        if key in seen:
            raise TopologyError("oval traversal did not close")
        seen.add(key)
        i, r = run
        exit_side = "R" if direction > 0 else "L"
        nxt = g.glue[(i, r, exit_side)]
        if (i, exit_side) in g.turns and nxt[0] == i:
            kind = ("turn", g.turns[(i, exit_side)])
            new_dir = -direction
        elif exit_side == "R" and i == len(g.layout.breaks) and nxt[0] == 0:
            kind = ("infinity", +1)
            new_dir = direction
        elif exit_side == "L" and i == 0 and nxt[0] == len(g.layout.breaks):
            kind = ("infinity", -1)
            new_dir = direction
        else:
            kind = ("pass", None)
            new_dir = direction
        steps.append((i, r, direction, kind))
        run, direction = (nxt[0], nxt[1]), new_dir
        if run == start and direction == +1:
            return steps


def trace_real_ovals(params: SpectralParams) -> list[RealOval]:
    """The real components, labeled Omega0 and b1..b4.

    b_j (j = 1..3) is the oval through the Gamma0 piece between kappa_j and
    kappa_{j+1}; Omega0 contains the branch through P0; b4 is the other one.
    """
    if params.epsilon <= 0:
        raise TopologyError("not in M-curve regime: eps must be positive")
    g = _run_graph(params)
    lay = g.layout
    runs = [(i, r) for i in range(len(lay.counts)) for r in range(lay.counts[i])]
    comps = []
    assigned = set()
    for run in runs:
        if run in assigned:
            continue
        steps = _walk(g, run)
        members = tuple(dict.fromkeys((s[0], s[1]) for s in steps))
        assigned.update(members)
        comps.append(members)
    if len(comps) != 5:
        raise TopologyError(f"not in M-curve regime: {len(comps)} real components, expected 5")

    def comp_of(run):
        return next(c for c in comps if run in c)

    def gamma0_run(lam):
        i = bisect_breaks(lay.breaks, lam)
        roots = real_roots(lam, params)
        r = min(range(len(roots)), key=lambda j: abs(roots[j]))
        return (i, r)

    k = params.kappa
    labels = {}
    for j in range(3):
        c = comp_of(gamma0_run(0.5 * (k[j] + k[j + 1])))
        if c in labels:
            raise TopologyError("two Gamma0 edges lie on the same oval")
        labels[c] = f"b{j + 1}"
    last = len(lay.breaks)
    omega = comp_of((last, _RIGHT_ORDER.index("Gamma0")))
    if omega in labels:
        raise TopologyError("the P0 branch lies on a finite oval")
    labels[omega] = "Omega0"
    rest = [c for c in comps if c not in labels]
    labels[rest[0]] = "b4"
    out = [RealOval(labels[c], c, labels[c] != "Omega0") for c in comps]
    out.sort(key=lambda o: (o.label != "Omega0", o.label))
    return out


def bisect_breaks(breaks, lam):
    import bisect

    return bisect.bisect_right(list(breaks), lam)


def oval_points(params: SpectralParams, oval: RealOval, per_run: int = 5):
    """Real (lam, mu) samples on an oval, for on-curve checks and reports."""
    lay = real_layout(params)
    pts = []
    for i, r in oval.runs:
        lo, hi = lay.interval(i)
        lo = max(lo, -FAR_RADIUS)
        hi = min(hi, FAR_RADIUS)
        for m in range(1, per_run + 1):
            lam = lo + (hi - lo) * m / (per_run + 1)
            roots = real_roots(lam, params)
            pts.append((lam, _polish_real(lam, roots[r], params)))
    return pts


def _polish_real(lam, mu, params):
    from .curve import newton_mu

    return float(newton_mu(lam, mu, params.with_precision("standard")).real)


# ---------------------------------------------------------------------------
# surface cycles


@dataclass
class SurfaceCycle:
    """A closed chain of segments; ``segments[i].sheet_anchor`` is the start mu."""

    label: str
    segments: list
    params: SpectralParams
    _tracks: dict = field(default_factory=dict, repr=False, compare=False)

    def tracks(self, precision: str | None = None) -> list[Track]:
        mode = precision or self.params.precision
        if mode not in self._tracks:
            p = self.params.with_precision(mode)
            out = []
            mu = self.segments[0].sheet_anchor
            for n, seg in enumerate(self.segments):
                try:
                    tr = track_segment(seg, mu, p)
                except ContinuationError as exc:
                    raise ContinuationError(f"cycle {self.label}, segment {n}: {exc}") from exc
                out.append(tr)
                mu = tr.end.mu
            self._tracks[mode] = out
        return self._tracks[mode]

    def closure_defect(self, precision: str | None = None) -> float:
        tr = self.tracks(precision)
        end, start = tr[-1].end, tr[0].start
        return abs(complex(end.lam) - complex(start.lam)) + abs(complex(end.mu) - complex(start.mu))

    def reversed(self) -> "SurfaceCycle":
        tr = self.tracks()
        segs = [seg.reversed().with_anchor(complex(t.end.mu))
                for seg, t in zip(reversed(self.segments), reversed(tr))]
        return SurfaceCycle(self.label, segs, self.params)

    def point_at(self, s: float):
        """(lam, mu) at global parameter ``s`` in [0, 1), uniform per segment."""
        n = len(self.segments)
        k = min(int(s * n), n - 1)
        t = s * n - k
        tr = self.tracks()[k]
        return complex(self.segments[k].point(t)), complex(tr.mu_at(t))

    def dump(self) -> str:
        lines = [f"cycle {self.label} segments={len(self.segments)}"]
        for seg in self.segments:
            a = complex(seg.sheet_anchor)
            if isinstance(seg, LineSegment):
                geo = f"line {_c(seg.z0)} -> {_c(seg.z1)}"
            else:
                geo = (f"arc center={_c(seg.center)} r={seg.radius!r} "
                       f"theta={seg.theta0!r}->{seg.theta1!r}")
            lines.append(f"  {geo} anchor_mu={_c(a)}")
        return "\n".join(lines)


def _c(z) -> str:
    z = complex(z)
    return f"({z.real!r},{z.imag!r})"


@dataclass(frozen=True)
class CycleSum:
    """An integer combination of surface cycles."""

    label: str
    terms: tuple[tuple[int, SurfaceCycle], ...]


@dataclass
class CycleBasis:
    params: SpectralParams
    a: list
    b: list
    c: list
    omega0: SurfaceCycle
    ovals: list
    c_dot_b: tuple
    flips: dict
    intersection: np.ndarray = field(default=None)

    def by_label(self, label):
        for cyc in self.a + self.b + self.c + [self.omega0]:
            if cyc.label == label:
                return cyc
        raise KeyError(label)

    def dump(self) -> str:
        parts = [cyc.dump() for cyc in self.c + self.b + [self.omega0]]
        for a in self.a:
            parts.append(f"cycle {a.label} = " + " ".join(
                f"{'+' if k > 0 else '-'}{abs(k)}*{c.label}" for k, c in a.terms if k))
        return "\n".join(parts) + "\n"


def _attach(segments, anchor):
    return [segments[0].with_anchor(anchor)] + list(segments[1:])


def _chain(label, pieces, start_mu, params) -> SurfaceCycle:
    """Build a cycle from bare segments, filling in anchors by continuation."""
    p = params.with_precision("standard")
    segs = []
    mu = start_mu
    for n, seg in enumerate(pieces):
        seg = seg.with_anchor(complex(mu))
        try:
            tr = track_segment(seg, mu, p)
        except ContinuationError as exc:
            raise ContinuationError(f"cycle {label}, segment {n}: {exc}") from exc
        segs.append(seg)
        mu = tr.end.mu
    cyc = SurfaceCycle(label, segs, params)
    return cyc


def _bp_radius(params, lam_center, exclude=()):
    others = [complex(b.lam) for b in branch_points(params)]
    d = [abs(z - lam_center) for z in others if all(abs(z - e) > 1e-12 for e in exclude)]
    return min(d)


def c_loop(j: int, params: SpectralParams) -> SurfaceCycle:
    """Contour c_j around the complex branch-point pair opened at a corner node."""
    node = _C_CORNERS[j - 1]
    pair = [b for b in branch_points(params) if b.node == node]
    if len(pair) != 2 or any(b.is_real for b in pair):
        raise TopologyError(f"c{j}: corner node {node} does not carry a complex branch-point pair")
    center = float(pair[0].lam.real)
    half = abs(float(pair[0].lam.imag))
    d_near = _bp_radius(params, center, exclude=[complex(b.lam) for b in pair])
    rho = math.sqrt(half * d_near)
    rho = min(max(rho, 1.5 * half), 0.7 * d_near)
    if rho <= 1.2 * half:
        raise TopologyError(f"c{j}: no room for a contour between branch points")
    start = center - rho
    nd = nodes(params)[node]
    roots = real_roots(start, params)
    near = sorted(roots, key=lambda m: abs(m - nd.mu))[:2]
    if len(near) < 2:
        raise TopologyError(f"c{j}: start sheets are not real")
    return _chain(f"c{j}", circle(center, rho, math.pi, 4), max(near), params)


def _dyadic(x: float, bits: int = 40) -> float:
    return math.ldexp(round(math.ldexp(x, bits)), -bits)


def _turn_delta(params, lam):
    return 0.25 * _bp_radius(params, lam, exclude=[lam])


def oval_cycle(oval: RealOval, params: SpectralParams, label: str | None = None) -> SurfaceCycle:
    g = _run_graph(params)
    lay = g.layout
    reals = [b for b in branch_points(params) if b.is_real]
    steps = _walk(g, oval.runs[0])
    # dyadic centers and radii make lam +- delta exact in every precision, so
    # the straight runs meet the turn circles without a rounding gap
    centers = [_dyadic(float(b.lam.real)) for b in reals]
    deltas = [_dyadic(_turn_delta(params, complex(b.lam))) for b in reals]
    pieces = []

    def turns_at(i, r, side):
        return (i, side) in g.turns and g.glue[(i, r, side)][0] == i

    def run_bounds(i, r, direction):
        lo, hi = lay.interval(i)
        a = -FAR_RADIUS if math.isinf(lo) else lo
        b = FAR_RADIUS if math.isinf(hi) else hi
        if turns_at(i, r, "L"):
            k = g.turns[(i, "L")]
            a = centers[k] + deltas[k]
        if turns_at(i, r, "R"):
            k = g.turns[(i, "R")]
            b = centers[k] - deltas[k]
        return (a, b) if direction > 0 else (b, a)

    for i, r, direction, kind in steps:
        a, b = run_bounds(i, r, direction)
        pieces.append(LineSegment(complex(a), complex(b)))
        if kind[0] == "turn":
            k = kind[1]
            ang = math.pi if direction > 0 else 0.0
            pieces.extend(circle(centers[k], deltas[k], ang, 2))
        elif kind[0] == "infinity":
            if kind[1] > 0:
                pieces.append(ArcSegment(0.0, FAR_RADIUS, 0.0, math.pi))
            else:
                pieces.append(ArcSegment(0.0, FAR_RADIUS, math.pi, 0.0))
    i0, r0 = oval.runs[0]
    a0, _ = run_bounds(i0, r0, +1)
    # the walk starts rightwards on run 0; merge collinear pass-through pieces
    pieces = _merge_lines(pieces)
    start_mu = real_roots(a0, params)[r0]
    cyc = _chain(label or oval.label, pieces, start_mu, params)
    return cyc


def _merge_lines(pieces):
    out = []
    for p in pieces:
        if (out and isinstance(p, LineSegment) and isinstance(out[-1], LineSegment)
                and abs(complex(out[-1].z1) - complex(p.z0)) < 1e-15
                and (complex(out[-1].z1) - complex(out[-1].z0)).real
                * (complex(p.z1) - complex(p.z0)).real > 0):
            out[-1] = LineSegment(out[-1].z0, p.z1)
        else:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# intersections


def _polyline(cyc: SurfaceCycle, arc_samples: int = 48):
    """Vertices of the projected cycle with (segment index, t) per vertex."""
    pts, tags = [], []
    for k, seg in enumerate(cyc.segments):
        n = 1 if isinstance(seg, LineSegment) else arc_samples
        for m in range(n):
            pts.append(complex(seg.point(m / n)))
            tags.append((k, m / n, 1.0 / n))
    pts.append(pts[0])
    tags.append(tags[0])
    return pts, tags


def _orient(a, b, c):
    v = ((b - a).conjugate() * (c - a)).imag
    return 1 if v >= 0 else -1


def intersection_number(x, y) -> int:
    """Signed intersection x o y, positive when y crosses x from right to left.

    Crossings of the lambda-projections are counted only when both cycles
    sit on the same sheet there.
    """
    if isinstance(x, CycleSum):
        return sum(k * intersection_number(c, y) for k, c in x.terms)
    if isinstance(y, CycleSum):
        return sum(k * intersection_number(x, c) for k, c in y.terms)
    if x is y:
        return 0
    px, tx = _polyline(x)
    py, ty = _polyline(y)
    trx, try_ = x.tracks("standard"), y.tracks("standard")
    total = 0
    for i in range(len(px) - 1):
        a, b = px[i], px[i + 1]
        box_x = (min(a.real, b.real), max(a.real, b.real), min(a.imag, b.imag), max(a.imag, b.imag))
        for j in range(len(py) - 1):
            c, d = py[j], py[j + 1]
            if (max(c.real, d.real) < box_x[0] or min(c.real, d.real) > box_x[1]
                    or max(c.imag, d.imag) < box_x[2] or min(c.imag, d.imag) > box_x[3]):
                continue
            if _orient(c, d, a) == _orient(c, d, b) or _orient(a, b, c) == _orient(a, b, d):
                continue
            u, v = b - a, d - c
            cross = (u.conjugate() * v).imag
            if abs(cross) < 1e-14 * abs(u) * abs(v):
                mx = complex(trx[tx[i][0]].mu_at(tx[i][1]))
                my = complex(try_[ty[j][0]].mu_at(ty[j][1]))
                if abs(mx - my) < 1e-6:
                    raise TopologyError(
                        f"tangential crossing of {x.label} and {y.label} on one sheet")
                continue
            fx = ((c - a).conjugate() * v).imag / cross
            fy = ((c - a).conjugate() * u).imag / cross
            kx, t0x, dtx = tx[i]
            ky, t0y, dty = ty[j]
            mu_x = complex(trx[kx].mu_at(t0x + fx * dtx))
            mu_y = complex(try_[ky].mu_at(t0y + fy * dty))
            lam = a + fx * u
            roots = _roots(lam, x.params)
            sep = float(np.sort(np.abs(roots - mu_x))[1])
            if abs(mu_x - mu_y) < 0.3 * sep:
                total += 1 if cross > 0 else -1
    return total


def _roots(lam, params):
    from .curve import _float_branches

    return _float_branches(lam, params)


def intersection_numbers(basis: CycleBasis) -> np.ndarray:
    """8x8 integer table over (a1..a4, b1..b4)."""
    cyc = basis.a + basis.b
    n = len(cyc)
    out = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            v = intersection_number(cyc[i], cyc[j])
            out[i, j] = v
            out[j, i] = -v
    return out


# ---------------------------------------------------------------------------
# the basis


def deformation_defect(params: SpectralParams) -> float:
    """Smallest ratio (distance of branch points from different nodes) /
    (distance of those nodes); the regime is admissible while it exceeds 0.1."""
    bps = branch_points(params)
    nd = nodes(params)
    worst = math.inf
    for i, p in enumerate(bps):
        for q in bps[i + 1:]:
            if p.node == q.node:
                continue
            sep = abs(nd[p.node].lam - nd[q.node].lam)
            if sep == 0:
                continue
            worst = min(worst, abs(complex(p.lam) - complex(q.lam)) / sep)
    counts = [sum(1 for b in bps if b.node == k) for k in range(len(nd))]
    if any(c != 2 for c in counts):
        return 0.0
    return worst


def deformation_threshold(kappa, lo: float = 1e-6, hi: float = 1.0, iters: int = 30) -> float:
    """Largest eps (bisection) with branch points still clustered at their nodes."""
    def ok(e):
        return deformation_defect(SpectralParams(kappa, e)) > 0.1

    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if not ok(lo):
            raise TopologyError("deformation threshold: even the smallest eps fails")
        if ok(hi):
            return hi
        for _ in range(iters):
            mid = math.sqrt(lo * hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
    return lo


def check_regime(params: SpectralParams):
    d = deformation_defect(params)
    if d <= 0.1:
        raise TopologyError(f"eps={params.epsilon} is past the deformation threshold "
                            f"(branch-point clustering ratio {d:.3g})")


def build_cycles(params: SpectralParams) -> CycleBasis:
    """The cycle basis: b = finite ovals, c-contours, and a from the c's.

    Orientations of the c's and of the ovals are fixed so that the computed
    c o b table equals ``C_DOT_B``; a mismatch in the zero pattern means the
    contours were not placed as intended and is an error.
    """
    return _build_cycles_cached(params)


@lru_cache(maxsize=16)
def _build_cycles_cached(params: SpectralParams) -> CycleBasis:
    check_regime(params)
    ovals = trace_real_ovals(params)
    by_label = {o.label: o for o in ovals}
    b = [oval_cycle(by_label[f"b{j}"], params) for j in range(1, 5)]
    omega0 = oval_cycle(by_label["Omega0"], params)
    c = [c_loop(j, params) for j in range(1, 5)]
    for cyc in c + b + [omega0]:
        if cyc.closure_defect("standard") > 1e-9:
            raise ContinuationError(f"cycle {cyc.label} does not close")
    raw = [[int(intersection_number(ci, bk)) for bk in b] for ci in c]
    target = np.array(C_DOT_B)
    if not np.array_equal(np.abs(raw), np.abs(target)):
        raise TopologyError(f"c o b table has the wrong pattern: {raw}")
    # flips s_c, s_b with s_c[i] * s_b[k] * raw = target
    s_c = [1, 1, 1, 1]
    s_b = [1, 1, 1, 1]
    s_b[3] = int(target[3][3] * raw[3][3])
    for i in range(3):
        s_c[i] = int(target[i][3] * raw[i][3] * s_b[3])
        s_b[i] = int(target[i][i] * raw[i][i] * s_c[i])
    signed = np.array([[s_c[i] * s_b[k] * raw[i][k] for k in range(4)] for i in range(4)])
    if not np.array_equal(signed, target):
        raise TopologyError(f"no orientation choice reproduces the c o b table: {raw}")
    c = [cyc if s > 0 else _relabel(cyc.reversed(), cyc.label) for cyc, s in zip(c, s_c)]
    b = [cyc if s > 0 else _relabel(cyc.reversed(), cyc.label) for cyc, s in zip(b, s_b)]
    a = [CycleSum(f"a{j + 1}", tuple((k, c[i]) for i, k in enumerate(A_FROM_C[j]) if k))
         for j in range(4)]
    flips = {f"c{i + 1}": s_c[i] for i in range(4)} | {f"b{i + 1}": s_b[i] for i in range(4)}
    basis = CycleBasis(params, a, b, c, omega0, ovals,
                       tuple(tuple(int(v) for v in row) for row in signed), flips)
    basis.intersection = np.block([
        [np.zeros((4, 4), dtype=int), np.array(A_FROM_C) @ signed],
        [-(np.array(A_FROM_C) @ signed).T, np.zeros((4, 4), dtype=int)],
    ])
    return basis


def _relabel(cyc: SurfaceCycle, label: str) -> SurfaceCycle:
    cyc.label = label
    return cyc


def conjugation_defect(cyc: SurfaceCycle, samples: int = 64) -> float:
    """max |point(1 - s) - conj(point(s))| over the cycle: zero when the
    complex conjugate of the cycle is the cycle run backwards."""
    worst = 0.0
    for m in range(1, samples):
        s = m / samples
        l1, m1 = cyc.point_at(s)
        l2, m2 = cyc.point_at(1 - s)
        worst = max(worst, abs(l2 - l1.conjugate()) + abs(m2 - m1.conjugate()))
    return worst


def on_curve_residual(params: SpectralParams, ovals=None) -> float:
    ovals = ovals or trace_real_ovals(params)
    worst = 0.0
    for o in ovals:
        for lam, mu in oval_points(params, o):
            worst = max(worst, abs(p_value(lam, mu, params.with_precision("standard"))))
    return worst
