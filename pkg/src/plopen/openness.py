"""The openness decision procedure and the branch set.

The exact conditions are decided from the determinant-sign profile, fiber
finiteness, and the branch set's dimension; coherent orientation ties them to
the classical piecewise-affine criterion. All four must agree on every valid
map — a disagreement is an implementation bug, never new mathematics, and the
CLI reserves a dedicated exit code for it.

Branch-set classification works face by face. An interior (n-1)-face lies in
the branch set iff its two incident determinant signs differ or one vanishes
(equal nonzero signs give local injectivity across the face by invariance of
domain). A face of dimension <= n-2 lies in it iff an incident cell is
singular or two star cells, shrunk toward the face, have images overlapping
in full dimension; affine pieces make the overlap scale-free, so testing one
shrink factor decides every scale. Singular cells additionally contribute
their own interiors.

The openness oracle is an independent probabilistic check of openness itself:
at face barycenters and seeded random interior points, it tests whether the
image cones of the star cover every sampled direction. A failed direction is
a certified witness of non-openness (one-sided: failures are proofs, passes
are evidence).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional

from . import feasible
from .complexes import Face
from .linalg import Matrix, Vector, inverse, null_space, vec_sub
from .plmap import MIXED, PLMap, SignProfile, finite_fibers, sign_profile

REASON_SIGN_MISMATCH = "SignMismatchAcrossFace"
REASON_SINGULAR = "SingularIncidentCell"
REASON_INJECTIVITY = "LocalInjectivityFailure"


@dataclass(frozen=True)
class BranchFace:
    face: Face
    dim: int
    reason: str
    cells: tuple[int, ...]  # the machine-checkable evidence pair / singular cells


@dataclass(frozen=True)
class BranchReport:
    branch_faces: tuple[BranchFace, ...]
    dim_branch_set: Optional[int]  # None encodes dimension -infinity (empty)

    def dim_at_most(self, bound: int) -> bool:
        return self.dim_branch_set is None or self.dim_branch_set <= bound


def coherently_oriented(f: PLMap) -> bool:
    """All piece determinant signs nonzero and equal."""
    signs = {p.det_sign for p in f.pieces}
    return 0 not in signs and len(signs) == 1


def _adjacent_across_facet(f: PLMap, a: int, b: int) -> bool:
    shared = set(f.domain.cells[a].vertex_ids) & set(f.domain.cells[b].vertex_ids)
    return len(shared) == f.ambient_dim


def _shrunk_image(f: PLMap, cell_index: int, center: Vector) -> tuple[Vector, ...]:
    piece = f.pieces[cell_index]
    half = Fraction(1, 2)
    return tuple(
        piece.apply(tuple(c + half * (v - c) for v, c in zip(p, center)))
        for p in f.domain.cell_points(cell_index)
    )


def branch_set(f: PLMap) -> BranchReport:
    """Faces whose relative interiors fail local homeomorphism, with reasons."""
    n = f.ambient_dim
    out: list[BranchFace] = []

    for ids in f.domain.interior_faces():
        info = f.domain.faces[ids]
        if info.dim == n - 1:
            a, b = info.cells
            sa, sb = f.pieces[a].det_sign, f.pieces[b].det_sign
            if sa == 0 or sb == 0:
                singular = tuple(c for c in (a, b) if f.pieces[c].det_sign == 0)
                out.append(BranchFace(ids, info.dim, REASON_SINGULAR, singular))
            elif sa != sb:
                out.append(BranchFace(ids, info.dim, REASON_SIGN_MISMATCH, (a, b)))
            continue
        if info.dim > n - 1:
            continue
        star = info.cells
        singular = tuple(c for c in star if f.pieces[c].det_sign == 0)
        if singular:
            out.append(BranchFace(ids, info.dim, REASON_SINGULAR, singular))
            continue
        center = f.domain.barycenter(ids)
        shrunk: dict[int, tuple[Vector, ...]] = {}
        boxes: dict[int, tuple[Vector, Vector]] = {}
        witness: Optional[tuple[int, int]] = None
        for i, a in enumerate(star):
            if witness:
                break
            for b in star[i + 1 :]:
                if _adjacent_across_facet(f, a, b):
                    if f.pieces[a].det_sign == f.pieces[b].det_sign:
                        # Equal signs across a shared facet: the two images lie
                        # strictly on opposite sides of the shared image
                        # hyperplane, so their overlap has dimension <= n-1.
                        continue
                    # Opposite signs: both images fold onto one side, so the
                    # shrunk images overlap in full dimension.
                    witness = (a, b)
                    break
                for c in (a, b):
                    if c not in shrunk:
                        shrunk[c] = _shrunk_image(f, c, center)
                        boxes[c] = feasible.bounding_box(shrunk[c])
                if not feasible.boxes_overlap(boxes[a], boxes[b]):
                    continue
                if feasible.relative_interiors_intersect(shrunk[a], shrunk[b]):
                    witness = (a, b)
                    break
        if witness:
            out.append(BranchFace(ids, info.dim, REASON_INJECTIVITY, witness))

    # A collapsed cell fails local homeomorphism on its whole interior.
    for ci, piece in enumerate(f.pieces):
        if piece.det_sign == 0:
            out.append(BranchFace(f.domain.cells[ci].vertex_ids, n, REASON_SINGULAR, (ci,)))

    out.sort(key=lambda bf: (len(bf.face), bf.face))
    dim_branch = max((bf.dim for bf in out), default=None)
    return BranchReport(tuple(out), dim_branch)


# ---------------------------------------------------------------------------
# Probabilistic openness oracle (condition (i))
# ---------------------------------------------------------------------------


class _SplitMix64:
    """Tiny deterministic generator; stable across runs and Python versions."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        return self.next_u64() % bound

    def int_range(self, low: int, high: int) -> int:
        return low + self.below(high - low + 1)


@dataclass(frozen=True)
class OracleFailure:
    point: Vector
    carrier: Face
    direction: Vector
    epsilon: Fraction
    target: Vector  # f(point) + epsilon * direction, certified uncovered


@dataclass(frozen=True)
class OracleResult:
    open_at_all_samples: bool
    failures: tuple[OracleFailure, ...]
    samples: int


def seeded_directions(n: int, count: int, seed: int) -> list[tuple[int, ...]]:
    rng = _SplitMix64(seed)
    dirs: list[tuple[int, ...]] = []
    while len(dirs) < count:
        candidate = tuple(rng.int_range(-8, 8) for _ in range(n))
        if any(candidate):
            dirs.append(candidate)
    return dirs


def shrunk_star_images(
    f: PLMap, x: Vector, carrier: Face
) -> list[tuple[int, tuple[Vector, ...], tuple[Vector, ...]]]:
    """(cell, shrunk cell points, their images) for the star of the carrier."""
    half = Fraction(1, 2)
    out = []
    for ci in f.domain.faces[carrier].cells:
        pts = tuple(
            tuple(c + half * (v - c) for v, c in zip(p, x))
            for p in f.domain.cell_points(ci)
        )
        out.append((ci, pts, tuple(f.pieces[ci].apply(p) for p in pts)))
    return out


def _face_normal_directions(f: PLMap, face: Face) -> list[tuple[int, ...]]:
    images = f.image_of_face(face)
    dirs = [vec_sub(q, images[0]) for q in images[1:]]
    normals: list[tuple[int, ...]] = []
    for normal in null_space(Matrix(tuple(dirs))):
        scale = lcm(*(c.denominator for c in normal))
        scaled = tuple(int(c * scale) for c in normal)
        normals.append(scaled)
        normals.append(tuple(-c for c in scaled))
    return normals


def openness_oracle(
    f: PLMap, num_points: int = 20, num_directions: int = 64, rng_seed: int = 0
) -> OracleResult:
    """Directional covering test of openness at sampled interior points.

    At a sample x, openness of the map at x is equivalent to the union of the
    shrunk star images covering a neighborhood of f(x); that union is
    star-shaped about f(x), so a direction d is covered iff some star image
    contains f(x) + t d for small positive t. The exact exit parameter of the
    ray in each image simplex decides this, and the recorded epsilon places a
    certified uncovered point strictly inside the first boundary crossing.
    """
    singular = [ci for ci, p in enumerate(f.pieces) if p.det_sign == 0]
    if singular:
        failures = tuple(
            OracleFailure(
                point=f.domain.barycenter(f.domain.cells[ci].vertex_ids),
                carrier=f.domain.cells[ci].vertex_ids,
                direction=(),
                epsilon=Fraction(0),
                target=(),
            )
            for ci in singular
        )
        return OracleResult(False, failures, 0)

    n = f.ambient_dim
    base_directions = seeded_directions(n, num_directions, rng_seed)
    rng = _SplitMix64(rng_seed ^ 0xD1B54A32D192ED03)

    samples: list[tuple[Vector, Face]] = [
        (f.domain.barycenter(ids), ids) for ids in f.domain.interior_faces()
    ]
    num_cells = len(f.domain.cells)
    for _ in range(num_points):
        ci = rng.below(num_cells)
        ids = f.domain.cells[ci].vertex_ids
        weights = [Fraction(rng.int_range(1, 64)) for _ in ids]
        total = sum(weights)
        pts = f.domain.cell_points(ci)
        x = tuple(
            sum((w * p[c] for w, p in zip(weights, pts)), Fraction(0)) / total
            for c in range(n)
        )
        samples.append((x, ids))

    failures: list[OracleFailure] = []
    for x, carrier in samples:
        star = shrunk_star_images(f, x, carrier)
        y0 = f.pieces[star[0][0]].apply(x)
        # Per star cell: the homogeneous barycentric inverse, the zero pattern
        # of the coordinates of f(x) (it lies in every star image simplex),
        # and integer-scaled inverse rows. A ray direction is covered by a
        # cell iff no facet with zero base coordinate has negative slope, and
        # per-row positive scaling changes no signs, so the covering decision
        # runs on plain integers.
        cell_data = []
        for _, _, images in star:
            rows = [tuple(Fraction(1) for _ in images)]
            rows += [tuple(q[c] for q in images) for c in range(n)]
            inv = inverse(Matrix(tuple(rows)))
            assert inv is not None  # nonsingular pieces keep image simplices nondegenerate
            base = inv.mul_vec((Fraction(1), *y0))
            zero_mask = tuple(b == 0 for b in base)
            int_rows = []
            for row in inv.entries:
                scale = lcm(*(c.denominator for c in row))
                int_rows.append(tuple(int(c * scale) for c in row[1:]))
            cell_data.append((int_rows, zero_mask, inv, base))

        directions = list(base_directions)
        if len(carrier) == n:  # interior (n-1)-face: add the exact fold normals
            directions += _face_normal_directions(f, carrier)

        for direction in directions:
            covered = False
            for int_rows, zero_mask, _, _ in cell_data:
                escapes = False
                for row, on_facet in zip(int_rows, zero_mask):
                    if on_facet and sum(r * d for r, d in zip(row, direction)) < 0:
                        escapes = True
                        break
                if not escapes:
                    covered = True
                    break
            if not covered:
                # Exact epsilon: half the first positive facet crossing of the
                # ray among all star image simplices (rare path, rational).
                crossings: list[Fraction] = []
                for _, _, inv, base in cell_data:
                    slope = inv.mul_vec((Fraction(0), *(Fraction(d) for d in direction)))
                    for b, s in zip(base, slope):
                        if s != 0:
                            crossing = -b / s
                            if crossing > 0:
                                crossings.append(crossing)
                epsilon = min(crossings) / 2 if crossings else Fraction(1)
                target = tuple(a + epsilon * d for a, d in zip(y0, direction))
                failures.append(
                    OracleFailure(
                        x, carrier, tuple(Fraction(d) for d in direction), epsilon, target
                    )
                )
    return OracleResult(not failures, tuple(failures), len(samples))


# ---------------------------------------------------------------------------
# Combined verdict
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleConfig:
    num_points: int = 20
    num_directions: int = 64
    rng_seed: int = 0


@dataclass(frozen=True)
class ConditionPair:
    finite_fibers: bool
    sign_not_mixed: bool

    @property
    def holds(self) -> bool:
        return self.finite_fibers and self.sign_not_mixed


@dataclass(frozen=True)
class ConditionBranch:
    finite_fibers: bool
    dim_branch_ok: bool

    @property
    def holds(self) -> bool:
        return self.finite_fibers and self.dim_branch_ok


@dataclass(frozen=True)
class OpennessVerdict:
    cond_ii: ConditionPair
    cond_iii: ConditionPair
    cond_iv: ConditionBranch
    coherent: bool
    oracle: Optional[OracleResult]
    profile: SignProfile = field(repr=False)
    branch: BranchReport = field(repr=False)

    @property
    def is_open(self) -> bool:
        return self.coherent

    @property
    def all_agree(self) -> bool:
        return (
            self.cond_ii.holds
            == self.cond_iii.holds
            == self.cond_iv.holds
            == self.coherent
        )


def check_conditions(f: PLMap, oracle_config: Optional[OracleConfig] = None) -> OpennessVerdict:
    """Evaluate the exact openness conditions, optionally with the oracle.

    The sign conditions over differentiability points and over the
    nonsingular locus coincide for piecewise-affine maps: the only extra
    differentiability points are faces whose incident pieces agree, and those
    carry an incident cell's determinant. Zeros occur exactly on singular
    cells, which fiber finiteness already excludes.
    """
    profile = sign_profile(f)
    finite = finite_fibers(f)
    branch = branch_set(f)
    not_mixed = profile.classification != MIXED
    verdict = OpennessVerdict(
        cond_ii=ConditionPair(finite, not_mixed),
        cond_iii=ConditionPair(finite, not_mixed),
        cond_iv=ConditionBranch(finite, branch.dim_at_most(f.ambient_dim - 2)),
        coherent=coherently_oriented(f),
        oracle=openness_oracle(
            f,
            oracle_config.num_points,
            oracle_config.num_directions,
            oracle_config.rng_seed,
        )
        if oracle_config is not None
        else None,
        profile=profile,
        branch=branch,
    )
    return verdict
