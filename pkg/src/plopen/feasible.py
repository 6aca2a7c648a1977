"""Exact linear feasibility (Fourier–Motzkin) and convex-polytope predicates.

Feasibility of systems of rational equalities and inequalities (strict and
non-strict) is decided exactly: equalities are removed by substitution, the
remaining variables are eliminated Fourier–Motzkin style, and a witness point
is reconstructed backwards through the eliminations. Strict rows are handled
natively (combining a strict with any row stays strict), which is the reason
this engine is used instead of a simplex method: relative-interior membership
questions are one feasibility probe each.

Internally every row is scaled to coprime integers and eliminations use
integer cross-multiplication, so no rational normalization happens in the hot
loops; witnesses are reconstructed as exact rationals at the end and checked
by substitution.

Polytopes enter in vertex form (a tuple of points whose convex hull is the
polytope). The dimension of an intersection is computed by growing its affine
hull: starting from one witness point, functionals vanishing on the directions
found so far are probed in both strict senses; every feasible probe yields a
new independent direction, and exhaustion proves the dimension exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Optional, Sequence

from .linalg import Matrix, Vector, null_space, rank, vec_dot, vec_sub

REL_EQ = "="
REL_LE = "<="
REL_LT = "<"

_RELS = (REL_EQ, REL_LE, REL_LT)

# Integer row form: (coeffs tuple, rel, rhs) meaning sum(c_i x_i) REL rhs.
_IntRow = tuple[tuple[int, ...], str, int]


@dataclass(frozen=True)
class LinRow:
    coeffs: Vector
    rel: str
    rhs: Fraction

    def __post_init__(self) -> None:
        if self.rel not in _RELS:
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass(frozen=True)
class LinearSystem:
    """Rational rows over a fixed number of unknowns."""

    num_vars: int
    rows: tuple[LinRow, ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row.coeffs) != self.num_vars:
                raise ValueError(
                    f"row arity {len(row.coeffs)} != system arity {self.num_vars}"
                )

    def satisfies(self, point: Vector) -> bool:
        for row in self.rows:
            value = vec_dot(row.coeffs, point)
            if row.rel == REL_EQ and value != row.rhs:
                return False
            if row.rel == REL_LE and not value <= row.rhs:
                return False
            if row.rel == REL_LT and not value < row.rhs:
                return False
        return True


class _Infeasible(Exception):
    # internal control flow for constant-row contradictions
    pass


def _norm_int_row(coeffs: list[int], rel: str, rhs: int) -> Optional[_IntRow]:
    """Divide out the content; None for a trivially-true row; raise if false."""
    if not any(coeffs):
        ok = (rhs == 0) if rel == REL_EQ else (rhs >= 0 if rel == REL_LE else rhs > 0)
        if ok:
            return None
        raise _Infeasible()
    g = gcd(*coeffs, rhs)
    if g > 1:
        coeffs = [c // g for c in coeffs]
        rhs //= g
    return (tuple(coeffs), rel, rhs)


def _from_fractions(coeffs: Sequence[Fraction], rel: str, rhs: Fraction) -> Optional[_IntRow]:
    mult = lcm(rhs.denominator, *(c.denominator for c in coeffs)) if coeffs else rhs.denominator
    return _norm_int_row([int(c * mult) for c in coeffs], rel, int(rhs * mult))


def _dedup(rows: list[_IntRow]) -> list[_IntRow]:
    # Among inequality rows with identical coefficients keep the tightest bound.
    best: dict[tuple[int, ...], tuple[str, int]] = {}
    order: list[tuple[int, ...]] = []
    eqs: list[_IntRow] = []
    seen_eq = set()
    for coeffs, rel, rhs in rows:
        if rel == REL_EQ:
            key = (coeffs, rhs)
            if key not in seen_eq:
                seen_eq.add(key)
                eqs.append((coeffs, rel, rhs))
            continue
        if coeffs not in best:
            best[coeffs] = (rel, rhs)
            order.append(coeffs)
        else:
            old_rel, old_rhs = best[coeffs]
            if rhs < old_rhs or (rhs == old_rhs and rel == REL_LT):
                best[coeffs] = (rel, rhs)
    return eqs + [(c, *best[c]) for c in order]


def _eliminate_with_equality(row: _IntRow, eq: _IntRow, var: int) -> Optional[_IntRow]:
    coeffs, rel, rhs = row
    c = coeffs[var]
    if c == 0:
        return row
    ec = eq[0][var]
    scale_row = abs(ec)
    scale_eq = c if ec > 0 else -c
    merged = [scale_row * x - scale_eq * e for x, e in zip(coeffs, eq[0])]
    return _norm_int_row(merged, rel, scale_row * rhs - scale_eq * eq[2])


def _solve_feasible(num_vars: int, raw_rows: list[_IntRow]) -> Optional[tuple[Fraction, ...]]:
    rows = _dedup(raw_rows)

    # Phase 1: remove variables bound by equalities (prefer unit pivots).
    eq_stack: list[tuple[int, _IntRow]] = []
    while True:
        eq = None
        var = -1
        for r in rows:
            if r[1] != REL_EQ:
                continue
            unit = next((i for i, c in enumerate(r[0]) if c in (1, -1)), None)
            if unit is not None:
                eq, var = r, unit
                break
            if eq is None:
                eq, var = r, next(i for i, c in enumerate(r[0]) if c != 0)
        if eq is None:
            break
        eq_stack.append((var, eq))
        new_rows: list[_IntRow] = []
        for row in rows:
            if row is eq:
                continue
            sub = _eliminate_with_equality(row, eq, var)
            if sub is not None:
                new_rows.append(sub)
        rows = _dedup(new_rows)

    # Phase 2: Fourier–Motzkin, smallest lower*upper product first.
    fm_stack: list[tuple[int, list[_IntRow]]] = []
    while True:
        counts: dict[int, tuple[int, int]] = {}
        for coeffs, _, _ in rows:
            for i, c in enumerate(coeffs):
                if c > 0:
                    lo, hi = counts.get(i, (0, 0))
                    counts[i] = (lo, hi + 1)
                elif c < 0:
                    lo, hi = counts.get(i, (0, 0))
                    counts[i] = (lo + 1, hi)
        if not counts:
            break
        var = min(counts, key=lambda i: (counts[i][0] * counts[i][1], i))
        involved = [r for r in rows if r[0][var] != 0]
        others = [r for r in rows if r[0][var] == 0]
        fm_stack.append((var, involved))
        uppers = [r for r in involved if r[0][var] > 0]
        lowers = [r for r in involved if r[0][var] < 0]
        combos: list[_IntRow] = []
        for lc, lrel, lrhs in lowers:
            for uc, urel, urhs in uppers:
                scale_low = uc[var]
                scale_up = -lc[var]
                merged = [scale_low * lx + scale_up * ux for lx, ux in zip(lc, uc)]
                rel = REL_LT if REL_LT in (lrel, urel) else REL_LE
                norm = _norm_int_row(merged, rel, scale_low * lrhs + scale_up * urhs)
                if norm is not None:
                    combos.append(norm)
        rows = _dedup(others + combos)

    # Phase 3: any remaining row would be constant and was already checked.
    assignment: dict[int, Fraction] = {}

    # Phase 4: reconstruct Fourier–Motzkin variables, last eliminated first.
    for var, involved in reversed(fm_stack):
        lo: Optional[Fraction] = None
        lo_strict = False
        hi: Optional[Fraction] = None
        hi_strict = False
        for coeffs, rel, rhs in involved:
            rest = Fraction(rhs)
            for k, c in enumerate(coeffs):
                if k != var and c != 0:
                    rest -= c * assignment.get(k, Fraction(0))
            bound = rest / coeffs[var]
            if coeffs[var] > 0:
                if hi is None or bound < hi or (bound == hi and rel == REL_LT):
                    hi, hi_strict = bound, rel == REL_LT
            else:
                if lo is None or bound > lo or (bound == lo and rel == REL_LT):
                    lo, lo_strict = bound, rel == REL_LT
        if lo is None and hi is None:
            value = Fraction(0)
        elif lo is None:
            value = hi - 1 if hi_strict else hi
        elif hi is None:
            value = lo + 1 if lo_strict else lo
        else:
            # FM projection guarantees a nonempty interval here.
            assert lo < hi or (lo == hi and not lo_strict and not hi_strict)
            value = lo if (lo == hi) else (lo + hi) / 2
        assignment[var] = value

    # Phase 5: reconstruct equality-bound variables, last substituted first.
    for var, (coeffs, _, rhs) in reversed(eq_stack):
        rest = Fraction(rhs)
        for k, c in enumerate(coeffs):
            if k != var and c != 0:
                rest -= c * assignment.get(k, Fraction(0))
        assignment[var] = rest / coeffs[var]

    return tuple(assignment.get(i, Fraction(0)) for i in range(num_vars))


def _satisfies_int(rows: list[_IntRow], point: tuple[Fraction, ...]) -> bool:
    for coeffs, rel, rhs in rows:
        value = sum(c * x for c, x in zip(coeffs, point) if c)
        if rel == REL_EQ and value != rhs:
            return False
        if rel == REL_LE and not value <= rhs:
            return False
        if rel == REL_LT and not value < rhs:
            return False
    return True


def _feasible_int(num_vars: int, rows: list[_IntRow]) -> Optional[tuple[Fraction, ...]]:
    try:
        witness = _solve_feasible(num_vars, rows)
    except _Infeasible:
        return None
    if witness is not None:
        assert _satisfies_int(rows, witness), "witness failed exact substitution"
    return witness


def _probe_feasible(
    num_vars: int,
    base_rows: list[_IntRow],
    coeffs: Sequence[Fraction],
    rel: str,
    rhs: Fraction,
) -> Optional[tuple[Fraction, ...]]:
    """Feasibility of base rows plus one rational row (may be constant)."""
    try:
        row = _from_fractions(coeffs, rel, rhs)
    except _Infeasible:
        return None
    rows = list(base_rows)
    if row is not None:
        rows.append(row)
    return _feasible_int(num_vars, rows)


def lp_feasible(system: LinearSystem) -> Optional[Vector]:
    """Exact feasibility: a witness satisfying every row (strict included), or None."""
    try:
        raw = []
        for row in system.rows:
            norm = _from_fractions(row.coeffs, row.rel, row.rhs)
            if norm is not None:
                raw.append(norm)
    except _Infeasible:
        return None
    witness = _feasible_int(system.num_vars, raw)
    if witness is None:
        return None
    assert system.satisfies(witness)
    return witness


# ---------------------------------------------------------------------------
# Vertex-form polytope predicates
# ---------------------------------------------------------------------------

Hull = Sequence[Vector]


def _common_scale(*hulls: Hull) -> tuple[list[list[tuple[int, ...]]], int]:
    scale = 1
    for hull in hulls:
        for point in hull:
            for c in point:
                scale = lcm(scale, c.denominator)
    scaled = [[tuple(int(c * scale) for c in point) for point in hull] for hull in hulls]
    return scaled, scale


def _simplex_rows(count: int, offset: int, total: int, strict: bool) -> list[_IntRow]:
    """Integer rows: the variable block is a (strict) convex combination."""
    rows: list[_IntRow] = [
        (
            tuple(1 if offset <= i < offset + count else 0 for i in range(total)),
            REL_EQ,
            1,
        )
    ]
    rel = REL_LT if strict else REL_LE
    for j in range(count):
        coeffs = [0] * total
        coeffs[offset + j] = -1
        rows.append((tuple(coeffs), rel, 0))
    return rows


def _match_rows(
    left: list[tuple[int, ...]],
    right: list[tuple[int, ...]],
    left_offset: int,
    right_offset: int,
    total: int,
    rhs: Optional[tuple[int, ...]] = None,
) -> list[_IntRow]:
    n = len(left[0]) if left else len(right[0])
    rows: list[_IntRow] = []
    for c in range(n):
        coeffs = [0] * total
        for i, p in enumerate(left):
            coeffs[left_offset + i] += p[c]
        for j, q in enumerate(right):
            coeffs[right_offset + j] -= q[c]
        norm = _norm_int_row(coeffs, REL_EQ, rhs[c] if rhs else 0)
        if norm is not None:
            rows.append(norm)
    return rows


def hull_contains(verts: Hull, point: Vector) -> bool:
    """Exact membership of a point in conv(verts)."""
    (sv, sp), _ = _common_scale(verts, [point])
    total = len(verts)
    try:
        rows = _simplex_rows(total, 0, total, strict=False)
        rows += _match_rows(sv, [], 0, 0, total, rhs=sp[0])
    except _Infeasible:
        return False
    return _feasible_int(total, rows) is not None


def hull_dim(verts: Hull) -> Optional[int]:
    """Dimension of conv(verts); None for the empty hull."""
    if not verts:
        return None
    dirs = [vec_sub(v, verts[0]) for v in verts[1:]]
    if not dirs:
        return 0
    return rank(Matrix(tuple(dirs)))


def relative_interiors_intersect(p_verts: Hull, q_verts: Hull) -> bool:
    """Whether relint(conv P) meets relint(conv Q) (strict combination probe)."""
    (sp, sq), _ = _common_scale(p_verts, q_verts)
    kp, kq = len(sp), len(sq)
    total = kp + kq
    try:
        rows = _simplex_rows(kp, 0, total, strict=True)
        rows += _simplex_rows(kq, kp, total, strict=True)
        rows += _match_rows(sp, sq, 0, kp, total)
    except _Infeasible:
        return False
    return _feasible_int(total, rows) is not None


def hulls_intersect(p_verts: Hull, q_verts: Hull) -> bool:
    """Whether conv(P) meets conv(Q) at all."""
    (sp, sq), _ = _common_scale(p_verts, q_verts)
    kp, kq = len(sp), len(sq)
    total = kp + kq
    try:
        rows = _simplex_rows(kp, 0, total, strict=False)
        rows += _simplex_rows(kq, kp, total, strict=False)
        rows += _match_rows(sp, sq, 0, kp, total)
    except _Infeasible:
        return False
    return _feasible_int(total, rows) is not None


def _point_from_weights(verts: Hull, weights: Sequence[Fraction], n: int) -> Vector:
    return tuple(
        sum((w * v[c] for w, v in zip(weights, verts)), Fraction(0)) for c in range(n)
    )


def _affine_dim_loop(
    num_vars: int,
    base_rows: list[_IntRow],
    point_of: Callable[[Sequence[Fraction]], Vector],
    probe_coeffs: Callable[[Vector], tuple[list[Fraction], Fraction]],
    ambient_dim: int,
) -> tuple[Optional[int], list[Vector]]:
    """Exact dimension of {point_of(w) : w feasible}, with spanning points.

    probe_coeffs(functional) returns (coeffs, const) with
    functional . point_of(w) = coeffs . w + const for every variable vector w.
    """
    witness = _feasible_int(num_vars, list(base_rows))
    if witness is None:
        return None, []
    x0 = point_of(witness)
    points = [x0]
    dirs: list[Vector] = []
    while len(dirs) < ambient_dim:
        if dirs:
            functionals = null_space(Matrix(tuple(dirs)))
        else:
            functionals = [
                tuple(Fraction(1 if i == j else 0) for j in range(ambient_dim))
                for i in range(ambient_dim)
            ]
        grown = False
        for functional in functionals:
            coeffs, const = probe_coeffs(functional)
            target = vec_dot(functional, x0) - const
            for flip in (1, -1):
                probe = _probe_feasible(
                    num_vars, base_rows, [flip * c for c in coeffs], REL_LT, flip * target
                )
                if probe is not None:
                    x1 = point_of(probe)
                    dirs.append(vec_sub(x1, x0))
                    points.append(x1)
                    grown = True
                    break
            if grown:
                break
        if not grown:
            break
    return len(dirs), points


def intersection_dim(p_verts: Hull, q_verts: Hull) -> Optional[int]:
    """Exact dimension of conv(P) ∩ conv(Q); None when the intersection is empty."""
    if not p_verts or not q_verts:
        return None
    n = len(p_verts[0])
    (sp, sq), _ = _common_scale(p_verts, q_verts)
    kp, kq = len(sp), len(sq)
    total = kp + kq
    try:
        rows = _simplex_rows(kp, 0, total, strict=False)
        rows += _simplex_rows(kq, kp, total, strict=False)
        rows += _match_rows(sp, sq, 0, kp, total)
    except _Infeasible:
        return None

    def point_of(w: Sequence[Fraction]) -> Vector:
        return _point_from_weights(p_verts, w[:kp], n)

    def probe_coeffs(functional: Vector) -> tuple[list[Fraction], Fraction]:
        coeffs = [Fraction(0)] * total
        for i, p in enumerate(p_verts):
            coeffs[i] = vec_dot(functional, p)
        return coeffs, Fraction(0)

    dim, _ = _affine_dim_loop(total, rows, point_of, probe_coeffs, n)
    return dim


def constrained_hull_dim(
    verts: Hull,
    equation_matrix: Matrix,
    equation_rhs: Vector,
) -> tuple[Optional[int], list[Vector]]:
    """Dimension and spanning points of {x in conv(verts) : M x = rhs}."""
    if not verts:
        return None, []
    n = len(verts[0])
    k = len(verts)
    rows = _simplex_rows(k, 0, k, strict=False)
    try:
        for r in range(equation_matrix.rows):
            coeffs = [vec_dot(equation_matrix.row(r), v) for v in verts]
            row = _from_fractions(coeffs, REL_EQ, equation_rhs[r])
            if row is not None:
                rows.append(row)
    except _Infeasible:
        return None, []

    def point_of(w: Sequence[Fraction]) -> Vector:
        return _point_from_weights(verts, w, n)

    def probe_coeffs(functional: Vector) -> tuple[list[Fraction], Fraction]:
        return [vec_dot(functional, v) for v in verts], Fraction(0)

    return _affine_dim_loop(k, rows, point_of, probe_coeffs, n)


def relint_preimage_witness(
    source_verts: Hull,
    source_images: Hull,
    target_verts: Hull,
) -> Optional[Vector]:
    """A point of relint(conv source) whose image lies in conv(target), or None.

    The map is affine on conv(source) and determined by source_images (the
    image of each source vertex), so the image of a combination is the same
    combination of the images.
    """
    (simg, st), _ = _common_scale(source_images, target_verts)
    ks, kt = len(source_verts), len(target_verts)
    total = ks + kt
    try:
        rows = _simplex_rows(ks, 0, total, strict=True)
        rows += _simplex_rows(kt, ks, total, strict=False)
        rows += _match_rows(simg, st, 0, ks, total)
    except _Infeasible:
        return None
    witness = _feasible_int(total, rows)
    if witness is None:
        return None
    return _point_from_weights(source_verts, witness[:ks], len(source_verts[0]))


def hull_leaves_affine_span(
    p_verts: Hull,
    q_verts: Hull,
    span_points: Hull,
) -> bool:
    """Whether conv(P) ∩ conv(Q) has a point outside the affine hull of span_points.

    span_points must be non-empty. Used as a one-level properness test: for a
    simplex face F of P, conv(P) ∩ aff(F) = F, so the intersection equals the
    common face exactly when it stays inside aff(F).
    """
    n = len(span_points[0])
    base = span_points[0]
    dirs = [vec_sub(s, base) for s in span_points[1:]]
    if dirs:
        functionals = null_space(Matrix(tuple(dirs)))
    else:
        functionals = [
            tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
        ]
    (sp, sq), _ = _common_scale(p_verts, q_verts)
    kp, kq = len(sp), len(sq)
    total = kp + kq
    try:
        rows = _simplex_rows(kp, 0, total, strict=False)
        rows += _simplex_rows(kq, kp, total, strict=False)
        rows += _match_rows(sp, sq, 0, kp, total)
    except _Infeasible:
        return False
    for functional in functionals:
        coeffs = [Fraction(0)] * total
        for i, p in enumerate(p_verts):
            coeffs[i] = vec_dot(functional, p)
        target = vec_dot(functional, base)
        for flip in (1, -1):
            probe = _probe_feasible(
                total, rows, [flip * c for c in coeffs], REL_LT, flip * target
            )
            if probe is not None:
                return True
    return False


def segment_hits_hull(start: Vector, end: Vector, verts: Hull) -> bool:
    """Whether the closed segment [start, end] meets conv(verts)."""
    (sv, endpoints), _ = _common_scale(verts, [start, end])
    s_start, s_end = endpoints
    k = len(verts)
    total = k + 1  # combination weights plus the segment parameter t
    try:
        rows = _simplex_rows(k, 0, total, strict=False)
        t_up = [0] * total
        t_up[k] = 1
        rows.append((tuple(t_up), REL_LE, 1))
        t_down = [0] * total
        t_down[k] = -1
        rows.append((tuple(t_down), REL_LE, 0))
        n = len(start)
        for c in range(n):
            coeffs = [0] * total
            for i, v in enumerate(sv):
                coeffs[i] = v[c]
            coeffs[k] = s_start[c] - s_end[c]
            norm = _norm_int_row(coeffs, REL_EQ, s_start[c])
            if norm is not None:
                rows.append(norm)
    except _Infeasible:
        return False
    return _feasible_int(total, rows) is not None


def segment_avoids_sets(start: Vector, end: Vector, obstacles: Sequence[Hull]) -> bool:
    """True iff the closed segment [start, end] misses every obstacle hull."""
    return not any(segment_hits_hull(start, end, obs) for obs in obstacles)


def bounding_box(verts: Hull) -> tuple[Vector, Vector]:
    lows = tuple(min(v[c] for v in verts) for c in range(len(verts[0])))
    highs = tuple(max(v[c] for v in verts) for c in range(len(verts[0])))
    return lows, highs


def boxes_overlap(a: tuple[Vector, Vector], b: tuple[Vector, Vector]) -> bool:
    return all(al <= bh and bl <= ah for al, ah, bl, bh in zip(a[0], a[1], b[0], b[1]))
