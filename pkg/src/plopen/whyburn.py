"""Certification of boundary-homeomorphism implies global-homeomorphism.

For a piecewise-affine map on a complex whose support is a combinatorial
closed ball, the certifier checks, in order: (1) no interior point maps onto
the boundary image, (2) the boundary restriction is injective, (3) the map is
open (coherent orientation), (4) exact global injectivity pairwise over all
cells, (5) the degree at an interior value is plus or minus one. Stage 4 is
the conclusion of the boundary-to-global statement checked exactly rather
than trusted, so every certified instance doubles as a test of it.

Stage 1 implements the witnessed inclusion: no interior face's relative
interior may meet any boundary-face image. The reverse inclusion (the image
boundary is covered by boundary-face images) follows once stage 3 holds,
because an open map sends the open support into the interior of the image;
instances violating only that inclusion are rejected at stage 2 or 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import feasible
from .complexes import Face, cells_connected
from .degree import DegreeCertificate, degree
from .openness import coherently_oriented
from .plmap import PLMap, sign_profile


class InvalidBallError(ValueError):
    def __init__(self, reasons: list[str]):
        self.reasons = tuple(reasons)
        super().__init__("; ".join(reasons))


@dataclass(frozen=True)
class BallMapInstance:
    """A map whose domain support is validated as a combinatorial closed ball."""

    map: PLMap
    boundary: tuple[Face, ...]


@dataclass(frozen=True)
class Certified:
    degree: int
    certificate: DegreeCertificate


@dataclass(frozen=True)
class Rejected:
    stage: int
    reason: str
    witness: object


def make_ball_instance(f: PLMap) -> BallMapInstance:
    """Validate the ball structure: one connected boundary (n-1)-cycle.

    For n >= 2 every boundary (n-2)-face must bound exactly two boundary
    faces, the boundary faces must be connected through them, and the
    boundary's Euler characteristic must match a sphere's (this rejects e.g.
    toroidal boundaries that the cycle conditions alone admit). An n = 1 ball
    is a connected interval: exactly two boundary vertices.
    """
    n = f.ambient_dim
    boundary = f.domain.boundary
    reasons: list[str] = []
    if not cells_connected(f.domain):
        reasons.append("support is not connected through interior facets")
    if not boundary:
        reasons.append("support has no boundary")
    if n == 1:
        if len(boundary) != 2:
            reasons.append(f"an interval has 2 boundary vertices, found {len(boundary)}")
    elif boundary:
        ridge_count: dict[Face, list[int]] = {}
        for bi, face in enumerate(boundary):
            for drop in range(len(face)):
                ridge = face[:drop] + face[drop + 1 :]
                ridge_count.setdefault(ridge, []).append(bi)
        bad = {r: inc for r, inc in ridge_count.items() if len(inc) != 2}
        if bad:
            sample = next(iter(sorted(bad)))
            reasons.append(
                f"boundary (n-2)-face {sample} bounds {len(bad[sample])} boundary faces, expected 2"
            )
        else:
            adjacency: dict[int, set[int]] = {i: set() for i in range(len(boundary))}
            for inc in ridge_count.values():
                a, b = inc
                adjacency[a].add(b)
                adjacency[b].add(a)
            seen = {0}
            frontier = [0]
            while frontier:
                for nxt in adjacency[frontier.pop()]:
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
            if len(seen) != len(boundary):
                reasons.append("boundary faces are not a single connected cycle")
        boundary_subfaces = set()
        for face in boundary:
            ids = face
            for mask in range(1, 1 << len(ids)):
                boundary_subfaces.add(tuple(ids[i] for i in range(len(ids)) if mask >> i & 1))
        euler = sum((-1) ** (len(sub) - 1) for sub in boundary_subfaces)
        expected = 1 + (-1) ** (n - 1)
        if euler != expected:
            reasons.append(
                f"boundary Euler characteristic {euler} differs from a sphere's {expected}"
            )
    if reasons:
        raise InvalidBallError(reasons)
    return BallMapInstance(map=f, boundary=boundary)


def boundary_preimage_ok(inst: BallMapInstance) -> tuple[bool, Optional[tuple]]:
    """No interior face's relative interior maps into a boundary-face image.

    A failure returns an exact interior witness point whose image lies in the
    boundary image. Relative interiors of interior faces partition the open
    support, so the sweep is exhaustive.
    """
    f = inst.map
    targets = []
    for face in inst.boundary:
        hull = f.image_of_face(face)
        targets.append((face, hull, feasible.bounding_box(hull)))
    for ids in f.domain.interior_faces():
        source_pts = f.domain.face_points(ids)
        source_imgs = f.image_of_face(ids)
        source_box = feasible.bounding_box(source_imgs)
        for _, hull, box in targets:
            if not feasible.boxes_overlap(source_box, box):
                continue
            witness = feasible.relint_preimage_witness(source_pts, source_imgs, hull)
            if witness is not None:
                return False, witness
    return True, None


def boundary_restriction_injective(
    inst: BallMapInstance,
) -> tuple[bool, Optional[tuple[Face, Face]]]:
    """Exact pairwise injectivity of the boundary restriction.

    Images of two boundary faces may overlap only in the image of their
    shared subface. Each boundary-face image must itself be a nondegenerate
    (n-1)-simplex (a collapsed face is already a collision within itself);
    given that, the overlap is proper iff it stays inside the affine hull of
    the shared subface's image.
    """
    f = inst.map
    n = f.ambient_dim
    boundary = inst.boundary
    hulls = {face: f.image_of_face(face) for face in boundary}
    boxes = {face: feasible.bounding_box(hulls[face]) for face in boundary}
    for face in boundary:
        if feasible.hull_dim(hulls[face]) != n - 1:
            return False, (face, face)
    for i, face_a in enumerate(boundary):
        for face_b in boundary[i + 1 :]:
            if not feasible.boxes_overlap(boxes[face_a], boxes[face_b]):
                continue
            shared = tuple(sorted(set(face_a) & set(face_b)))
            if not shared:
                if feasible.hulls_intersect(hulls[face_a], hulls[face_b]):
                    return False, (face_a, face_b)
            else:
                span = f.image_of_face(shared)
                if feasible.hull_leaves_affine_span(hulls[face_a], hulls[face_b], span):
                    return False, (face_a, face_b)
    return True, None


def _global_collision(f: PLMap) -> Optional[tuple[int, int]]:
    """Lexicographically smallest cell pair whose images overlap improperly.

    Runs after coherent orientation is established, so every cell image is a
    nondegenerate simplex. Pairs adjacent across an (n-1)-face with equal
    determinant signs are skipped: their images lie strictly on opposite
    sides of the shared image hyperplane, so the overlap equals the shared
    image face exactly. For the rest, conv(image) ∩ aff(shared image) equals
    the shared image face, so an improper overlap is exactly one that leaves
    that affine hull (or any overlap at all for disjoint cells).
    """
    n = f.ambient_dim
    count = len(f.domain.cells)
    for a in range(count):
        hull_a = f.cell_image_points(a)
        box_a = f.image_box(a)
        ids_a = set(f.domain.cells[a].vertex_ids)
        for b in range(a + 1, count):
            if not feasible.boxes_overlap(box_a, f.image_box(b)):
                continue
            shared = tuple(sorted(ids_a & set(f.domain.cells[b].vertex_ids)))
            if len(shared) == n and f.pieces[a].det_sign == f.pieces[b].det_sign:
                continue
            hull_b = f.cell_image_points(b)
            if not shared:
                if feasible.hulls_intersect(hull_a, hull_b):
                    return a, b
            else:
                span = f.image_of_face(shared)
                if feasible.hull_leaves_affine_span(hull_a, hull_b, span):
                    return a, b
    return None


def certify_ball_map(inst: BallMapInstance) -> Union[Certified, Rejected]:
    """Run the five-stage pipeline; reject at the earliest failing stage."""
    f = inst.map

    ok, witness = boundary_preimage_ok(inst)
    if not ok:
        return Rejected(1, "an interior point maps onto the boundary image", witness)

    ok, pair = boundary_restriction_injective(inst)
    if not ok:
        return Rejected(2, "boundary restriction is not injective", pair)

    if not coherently_oriented(f):
        profile = sign_profile(f)
        return Rejected(
            3,
            "map is not open: determinant signs are not coherently oriented",
            (profile.num_pos, profile.num_neg, profile.num_zero),
        )

    collision = _global_collision(f)
    if collision is not None:
        return Rejected(4, "global injectivity failure between cell images", collision)

    center = f.domain.barycenter(f.domain.cells[0].vertex_ids)
    value = f.pieces[0].apply(center)
    certificate = degree(f, value)
    if certificate.degree not in (1, -1):
        return Rejected(
            5,
            f"interior degree is {certificate.degree}, expected plus or minus 1",
            certificate,
        )
    return Certified(degree=certificate.degree, certificate=certificate)
