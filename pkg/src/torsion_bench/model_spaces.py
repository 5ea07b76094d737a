"""Catalog of one- and two-dimensional model fibers with closed-form spectra and Hodge data.

Fibers: finite point sets, intervals, circles with a scalar unitary holonomy,
and cylinders ``Y x [-l, l]`` over a boundaryless cross-section ``Y``.  All carry a
flat trivial bundle of rank ``bundle_rank`` with the constant metric.

On an interval end, absolute conditions mean Neumann for functions and
Dirichlet for the ``dx`` component of 1-forms; relative conditions swap them.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import heat_kernel_1d as hk
from .errors import DomainError, UnsupportedInput
from .metrized_complex import MetrizedComplex, direct_sum, empty_complex, shift_grading, tensor_gram

TWO_PI = 2.0 * math.pi


class FormBC(enum.Enum):
    ABSOLUTE = "a"
    RELATIVE = "r"


@dataclass(frozen=True)
class BCPair:
    """Form boundary conditions at the left (``-l``) and right (``+l``) ends."""

    left: FormBC
    right: FormBC

    def __str__(self) -> str:
        return f"{self.left.value}/{self.right.value}"

    @classmethod
    def parse(cls, text) -> "BCPair":
        if isinstance(text, BCPair):
            return text
        s = str(text).strip().lower().replace("/", "")
        if len(s) != 2 or any(ch not in "ar" for ch in s):
            raise DomainError(f"boundary condition must look like 'a/r', got {text!r}")
        return cls(FormBC(s[0]), FormBC(s[1]))

    @property
    def mixed(self) -> bool:
        return self.left != self.right

    def scalar(self, degree: int) -> hk.ScalarBCPair:
        """Scalar conditions seen by the ``degree``-form component along the interval."""
        def one(b: FormBC) -> hk.BC:
            neumann = (b is FormBC.ABSOLUTE) == (degree == 0)
            return hk.BC.NEUMANN if neumann else hk.BC.DIRICHLET

        return hk.ScalarBCPair(one(self.left), one(self.right))


AA = BCPair(FormBC.ABSOLUTE, FormBC.ABSOLUTE)
AR = BCPair(FormBC.ABSOLUTE, FormBC.RELATIVE)
RA = BCPair(FormBC.RELATIVE, FormBC.ABSOLUTE)
RR = BCPair(FormBC.RELATIVE, FormBC.RELATIVE)


def _check_rank(rank):
    if not (isinstance(rank, (int, np.integer)) and rank >= 1):
        raise DomainError(f"bundle rank must be a positive integer, got {rank!r}")


def _check_length(name, x):
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0):
        raise DomainError(f"{name} must be a positive real, got {x!r}")


@dataclass(frozen=True)
class PointSet:
    count: int = 1
    bundle_rank: int = 1

    def __post_init__(self):
        if not (isinstance(self.count, (int, np.integer)) and self.count >= 1):
            raise DomainError(f"point count must be a positive integer, got {self.count!r}")
        _check_rank(self.bundle_rank)

    dim = 0
    boundaryless = True


@dataclass(frozen=True)
class Circle:
    length: float = TWO_PI
    holonomy: float = 0.0
    bundle_rank: int = 1

    def __post_init__(self):
        _check_length("circle length", self.length)
        if not (0.0 <= self.holonomy < TWO_PI):
            raise DomainError(f"holonomy angle must lie in [0, 2pi), got {self.holonomy!r}")
        _check_rank(self.bundle_rank)

    dim = 1
    boundaryless = True

    @property
    def acyclic(self) -> bool:
        return self.holonomy != 0.0


@dataclass(frozen=True)
class Cylinder:
    """``Y x [-l, l]``; the bundle rank is that of the cross-section."""

    cross_section: PointSet | Circle
    half_length: float = 1.0
    bc: BCPair = AR

    def __post_init__(self):
        if not isinstance(self.cross_section, (PointSet, Circle)):
            raise DomainError("cylinder cross-section must be a point set or a circle")
        _check_length("half length", self.half_length)
        object.__setattr__(self, "bc", BCPair.parse(self.bc))

    @property
    def dim(self) -> int:
        return self.cross_section.dim + 1

    @property
    def bundle_rank(self) -> int:
        return self.cross_section.bundle_rank

    boundaryless = False


@dataclass(frozen=True)
class Interval:
    half_length: float = 1.0
    bc: BCPair = AR
    bundle_rank: int = 1

    def __post_init__(self):
        _check_length("half length", self.half_length)
        _check_rank(self.bundle_rank)
        object.__setattr__(self, "bc", BCPair.parse(self.bc))

    dim = 1
    boundaryless = False

    def as_cylinder(self) -> Cylinder:
        return Cylinder(PointSet(1, self.bundle_rank), self.half_length, self.bc)


ModelFiber = PointSet | Interval | Circle | Cylinder


def _cyl(fiber) -> Cylinder | None:
    if isinstance(fiber, Interval):
        return fiber.as_cylinder()
    return fiber if isinstance(fiber, Cylinder) else None


# ---------------------------------------------------------------------------
# topology


def betti(fiber: ModelFiber) -> tuple[int, ...]:
    if isinstance(fiber, PointSet):
        return (fiber.count * fiber.bundle_rank,)
    if isinstance(fiber, Circle):
        r = 0 if fiber.acyclic else fiber.bundle_rank
        return (r, r)
    cyl = _cyl(fiber)
    base = betti(cyl.cross_section)
    out = [0] * (len(base) + 1)
    if cyl.bc == AA:
        out[: len(base)] = base
    elif cyl.bc == RR:
        out[1:] = base
    return tuple(out)


def euler_chars(fiber: ModelFiber) -> tuple[int, int]:
    """``(chi, chi')`` with ``chi' = sum (-1)^p p b_p``; ranks are included."""
    b = betti(fiber)
    return (sum((-1) ** p * x for p, x in enumerate(b)), sum((-1) ** p * p * x for p, x in enumerate(b)))


def boundary_euler(fiber: ModelFiber) -> int:
    """Euler characteristic (times rank) of the full boundary ``Y x {-l, l}``."""
    cyl = _cyl(fiber)
    if cyl is None:
        return 0
    return 2 * euler_chars(cyl.cross_section)[0]


# ---------------------------------------------------------------------------
# spectra


def _families(fiber) -> list[hk.LatticeFamily]:
    """Per-degree single lattice family of a boundaryless fiber (rank included)."""
    if isinstance(fiber, PointSet):
        return [hk.point_family(fiber.count * fiber.bundle_rank)]
    fam = hk.circle_family(fiber.length, fiber.holonomy).scaled(fiber.bundle_rank)
    return [fam, fam]


def interval_families(half_length: float, bc: BCPair) -> tuple[hk.LatticeFamily, hk.LatticeFamily]:
    spec = hk.IntervalSpec(half_length)
    return hk.interval_family(spec, bc.scalar(0)), hk.interval_family(spec, bc.scalar(1))


def form_spectrum(fiber: ModelFiber) -> tuple[hk.SpectrumStream, ...]:
    """One ``SpectrumStream`` per form degree (eigenvalues of the form Laplacian)."""
    if isinstance(fiber, (PointSet, Circle)):
        return tuple(hk.SpectrumStream(q, ((f,),)) for q, f in enumerate(_families(fiber)))
    cyl = _cyl(fiber)
    ys = _families(cyl.cross_section)
    i0, i1 = interval_families(cyl.half_length, cyl.bc)
    streams = []
    for k in range(len(ys) + 1):
        terms = []
        if k < len(ys):
            terms.append(_product(ys[k], i0))
        if k >= 1:
            terms.append(_product(ys[k - 1], i1))
        streams.append(hk.SpectrumStream(k, tuple(terms)))
    return tuple(streams)


def _product(y: hk.LatticeFamily, i: hk.LatticeFamily) -> tuple[hk.LatticeFamily, ...]:
    # a point factor only contributes its multiplicity
    if y.weight == 0.0:
        return (i.scaled(y.const),)
    return (i, y)


# ---------------------------------------------------------------------------
# Hodge data


@dataclass(frozen=True)
class CohomologyData:
    """L2 Gram matrices of chosen harmonic representatives, one per degree."""

    grams: tuple[np.ndarray, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(g.shape[0] for g in self.grams)


def _eye(n: int, scale: float = 1.0) -> np.ndarray:
    return scale * np.eye(n)


def harmonic_metric(fiber: ModelFiber) -> CohomologyData:
    if isinstance(fiber, PointSet):
        return CohomologyData((_eye(fiber.count * fiber.bundle_rank),))
    if isinstance(fiber, Circle):
        n = 0 if fiber.acyclic else fiber.bundle_rank
        # constants and dx, both with squared norm L
        return CohomologyData((_eye(n, fiber.length), _eye(n, fiber.length)))
    cyl = _cyl(fiber)
    base = harmonic_metric(cyl.cross_section).grams
    width = 2.0 * cyl.half_length
    empty = [np.zeros((0, 0))] * (len(base) + 1)
    if cyl.bc == AA:
        empty[: len(base)] = [width * g for g in base]
    elif cyl.bc == RR:
        # du ^ phi has squared norm 2l |phi|^2
        empty[1:] = [width * g for g in base]
    return CohomologyData(tuple(empty))


# ---------------------------------------------------------------------------
# exact sequences of splittings


def _seq(dims_grams, maps, first_label: int = 0) -> MetrizedComplex:
    labels = tuple(range(first_label, first_label + len(dims_grams)))
    grams = tuple(np.atleast_2d(np.asarray(g, dtype=float)).reshape(n, n) for n, g in dims_grams)
    dims = [n for n, _ in dims_grams]
    diffs = tuple(np.asarray(m, dtype=float).reshape(dims[k + 1], dims[k]) for k, m in enumerate(maps))
    return MetrizedComplex(labels, grams, diffs)


def _kunneth(seq: MetrizedComplex, cross: PointSet | Circle) -> MetrizedComplex:
    """``seq (x) H(cross)``: the degree-``j`` cohomology of ``cross`` shifts labels by ``3j``."""
    parts = []
    for j, g in enumerate(harmonic_metric(cross).grams):
        if g.shape[0]:
            parts.append(shift_grading(tensor_gram(seq, g), 3 * j))
    return direct_sum(*parts) if parts else empty_complex()


@dataclass(frozen=True)
class SlotSequence:
    """A sequence together with the term indices that hold boundary cohomology."""

    complex: MetrizedComplex
    boundary_slots: tuple[int, ...]


def interval_end_sequence(length: float, boundary_scale: float = 1.0,
                          cross_section: PointSet | Circle = PointSet()) -> SlotSequence:
    """``H^k(Z1, dZ1) -> H^k(Z1) -> H^k(B) -> ...`` for ``Z1 = Y x [0, length]``.

    ``B`` is the boundary (two copies of the cross-section) and its Gram is the
    cross-section Gram times ``boundary_scale``: 1 for the boundary itself,
    ``2h`` for the collar ``Y x [-h, h]`` at each end.
    """
    _check_length("length", length)
    _check_length("boundary scale", boundary_scale)
    L, s = length, boundary_scale
    base = _seq(
        [(0, []), (1, [[L]]), (2, s * np.eye(2)), (1, [[L]]), (0, []), (0, [])],
        [np.zeros((1, 0)), [[1.0], [1.0]], [[-1.0 / L, 1.0 / L]], np.zeros((0, 1)), np.zeros((0, 0))],
    )
    full = _kunneth(base, cross_section)
    slots = tuple(i for i, g in enumerate(full.labels) if g % 3 == 2 and full.dims[i])
    return SlotSequence(full, slots)


def circle_arcs(l1: float, l2: float, collar: float = 0.0, holonomy: float = 0.0, rank: int = 1) -> MetrizedComplex:
    """``H^k(Z1, dZ1) -> H^k(Z) -> H^k(Z2) -> ...`` for a circle of length ``l1 + l2``.

    ``Z1`` and ``Z2`` are arcs of lengths ``l_i + 2 collar`` overlapping in two
    collars; ``collar = 0`` is the plain cut into two arcs.
    """
    _check_length("arc length", l1)
    _check_length("arc length", l2)
    if collar < 0 or 2.0 * collar >= min(l1, l2):
        raise DomainError(f"collar half-length must lie in [0, min(l1, l2)/2), got {collar!r}")
    _check_rank(rank)
    L = l1 + l2
    g1, g2 = l1 + 2.0 * collar, l2 + 2.0 * collar
    if holonomy == 0.0:
        # constants restrict isomorphically; a relative 1-form of integral g1 c
        # represents (g1 / L) c dx on the circle
        seq = _seq(
            [(0, []), (1, [[L]]), (1, [[g2]]), (1, [[g1]]), (1, [[L]]), (0, [])],
            [np.zeros((1, 0)), [[1.0]], [[0.0]], [[g1 / L]], np.zeros((0, 1))],
        )
    elif holonomy == math.pi:
        # a flat section on Z2 meets Z1 with opposite signs at the two ends
        seq = _seq(
            [(0, []), (0, []), (1, [[g2]]), (1, [[g1]]), (0, []), (0, [])],
            [np.zeros((0, 0)), np.zeros((1, 0)), [[-2.0 / g1]], np.zeros((0, 1)), np.zeros((0, 0))],
        )
    else:
        raise UnsupportedInput("arc splittings are implemented for holonomy 0 and pi")
    return tensor_gram(seq, np.eye(rank))


@dataclass(frozen=True)
class OverlapTriple:
    """The three sequences of a circle covered by two overlapping arcs."""

    h_dd: MetrizedComplex  # Z1 relative, Z1, overlap
    h: MetrizedComplex  # Z1 relative, Z, Z2
    h_d: MetrizedComplex  # Z, Z1 + Z2, overlap


def circle_overlap_triple(l1: float, l2: float, collar: float = 0.25, holonomy: float = 0.0,
                          rank: int = 1) -> OverlapTriple:
    if not collar > 0:
        raise DomainError("the overlap triple needs a positive collar")
    h = collar
    L = l1 + l2
    g1, g2 = l1 + 2.0 * h, l2 + 2.0 * h
    h_dd = interval_end_sequence(g1, 2.0 * h).complex
    h_mid = circle_arcs(l1, l2, collar, holonomy)
    if holonomy == 0.0:
        # restriction c -> (c, c); difference of restrictions; primitive of the jump
        h_d = _seq(
            [(1, [[L]]), (2, np.diag([g1, g2])), (2, 2.0 * h * np.eye(2)), (1, [[L]]), (0, []), (0, [])],
            [[[1.0], [1.0]], [[1.0, -1.0], [1.0, -1.0]], [[-1.0 / L, 1.0 / L]], np.zeros((0, 1)), np.zeros((0, 0))],
        )
    elif holonomy == math.pi:
        h_d = _seq(
            [(0, []), (2, np.diag([g1, g2])), (2, 2.0 * h * np.eye(2)), (0, []), (0, []), (0, [])],
            [np.zeros((2, 0)), [[1.0, -1.0], [1.0, 1.0]], np.zeros((0, 2)), np.zeros((0, 0)), np.zeros((0, 0))],
        )
    else:
        raise UnsupportedInput("overlap triples are implemented for holonomy 0 and pi")
    eye = np.eye(rank)
    return OverlapTriple(tensor_gram(h_dd, eye), tensor_gram(h_mid, eye), tensor_gram(h_d, eye))


def interval_split(l1: float, l2: float) -> MetrizedComplex:
    """Interval cut into two pieces with mixed conditions on each: all groups vanish."""
    _check_length("length", l1)
    _check_length("length", l2)
    return empty_complex()


INSTANCES = ("circle_arcs", "circle_overlap", "interval_end", "interval_split")


def mayer_vietoris(instance: str, **params):
    """Dispatch by instance name; see the individual builders for parameters."""
    if instance == "circle_arcs":
        return circle_arcs(**params)
    if instance == "circle_overlap":
        return circle_overlap_triple(**params)
    if instance == "interval_end":
        return interval_end_sequence(**params).complex
    if instance == "interval_split":
        return interval_split(**params)
    raise DomainError(f"unsupported splitting {instance!r}; known: {', '.join(INSTANCES)}")


# ---------------------------------------------------------------------------
# serialization


def fiber_to_dict(fiber: ModelFiber) -> dict:
    if isinstance(fiber, PointSet):
        return {"type": "point_set", "count": int(fiber.count), "bundle_rank": int(fiber.bundle_rank)}
    if isinstance(fiber, Circle):
        return {"type": "circle", "length": fiber.length, "holonomy": fiber.holonomy,
                "bundle_rank": int(fiber.bundle_rank)}
    if isinstance(fiber, Interval):
        return {"type": "interval", "half_length": fiber.half_length, "bc": str(fiber.bc),
                "bundle_rank": int(fiber.bundle_rank)}
    return {"type": "cylinder", "cross_section": fiber_to_dict(fiber.cross_section),
            "half_length": fiber.half_length, "bc": str(fiber.bc)}


def fiber_from_dict(data: dict) -> ModelFiber:
    try:
        kind = data["type"]
        if kind == "point_set":
            return PointSet(int(data.get("count", 1)), int(data.get("bundle_rank", 1)))
        if kind == "circle":
            return Circle(float(data.get("length", TWO_PI)), float(data.get("holonomy", 0.0)),
                          int(data.get("bundle_rank", 1)))
        if kind == "interval":
            return Interval(float(data.get("half_length", 1.0)), BCPair.parse(data.get("bc", "a/r")),
                            int(data.get("bundle_rank", 1)))
        if kind == "cylinder":
            return Cylinder(fiber_from_dict(data["cross_section"]), float(data.get("half_length", 1.0)),
                            BCPair.parse(data.get("bc", "a/r")))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed fiber descriptor {data!r}") from exc
    raise DomainError(f"unknown fiber type {data.get('type')!r}")
