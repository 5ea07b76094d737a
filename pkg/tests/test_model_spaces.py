import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from torsion_bench import DomainError, UnsupportedInput
from torsion_bench import metrized_complex as mc
from torsion_bench import model_spaces as ms


@pytest.mark.parametrize("fiber,expected", [
    (ms.PointSet(3, 2), (6,)),
    (ms.Circle(), (1, 1)),
    (ms.Circle(1.0, math.pi), (0, 0)),
    (ms.Circle(1.0, 0.0, 3), (3, 3)),
    (ms.Interval(1.0, "a/a"), (1, 0)),
    (ms.Interval(1.0, "r/r"), (0, 1)),
    (ms.Interval(1.0, "a/r"), (0, 0)),
    (ms.Cylinder(ms.Circle(), 1.0, "a/a"), (1, 1, 0)),
    (ms.Cylinder(ms.Circle(), 1.0, "r/r"), (0, 1, 1)),
    (ms.Cylinder(ms.PointSet(2), 1.0, "r/a"), (0, 0)),
])
def test_betti(fiber, expected):
    assert ms.betti(fiber) == expected


def test_euler_and_boundary():
    assert ms.euler_chars(ms.Interval(1.0, "r/r", 2)) == (-2, -2)
    assert ms.boundary_euler(ms.Cylinder(ms.PointSet(1, 3), 1.0, "a/a")) == 6
    assert ms.boundary_euler(ms.Circle()) == 0


def _interval_eigs(l, bc, cap):
    # Neumann, Dirichlet or mixed modes of -d^2/dx^2 on [-l, l]
    start, off = {"NN": (0, 0.0), "DD": (1, 0.0), "DN": (1, -0.5), "ND": (1, -0.5)}[bc]
    out, k = [], start
    while ((k + off) * math.pi / (2 * l)) ** 2 <= cap:
        out.append(((k + off) * math.pi / (2 * l)) ** 2)
        k += 1
    return out


def _circle_eigs(length, theta, cap):
    a = theta / (2 * math.pi)
    n = int(math.sqrt(cap) * length / (2 * math.pi)) + 2
    return [(2 * math.pi * (k + a) / length) ** 2 for k in range(-n, n + 1)
            if (2 * math.pi * (k + a) / length) ** 2 <= cap]


@pytest.mark.parametrize("bc", ["a/a", "a/r", "r/r"])
@pytest.mark.parametrize("theta", [0.0, math.pi])
def test_cylinder_spectrum_is_minkowski_sum(bc, theta):
    length, l, cap = 3.0, 0.8, 60.0
    fiber = ms.Cylinder(ms.Circle(length, theta), l, bc)
    pair = ms.BCPair.parse(bc)
    deg_bc = {0: "", 1: ""}
    for q in (0, 1):
        s = pair.scalar(q)
        deg_bc[q] = s.left.value[0].upper() + s.right.value[0].upper()
    y = _circle_eigs(length, theta, cap)
    i0, i1 = _interval_eigs(l, deg_bc[0], cap), _interval_eigs(l, deg_bc[1], cap)
    brute = {0: [a + b for a in y for b in i0], 1: [a + b for a in y for b in i1] + [a + b for a in y for b in i0],
             2: [a + b for a in y for b in i1]}
    for q, stream in enumerate(ms.form_spectrum(fiber)):
        got = Counter({round(lam, 8): m for lam, m in stream.eigenvalues_below(cap)})
        ref = Counter(round(x, 8) for x in brute[q] if x <= cap)
        assert got == ref, q


def test_form_bc_mapping():
    pair = ms.BCPair.parse("a/r")
    assert pair.mixed
    assert str(pair.scalar(0)) != str(pair.scalar(1))
    with pytest.raises(DomainError):
        ms.BCPair.parse("a/x")


fiber_st = st.one_of(
    st.builds(ms.PointSet, st.integers(1, 4), st.integers(1, 3)),
    st.builds(ms.Circle, st.floats(0.1, 10.0), st.sampled_from([0.0, math.pi, 1.0]), st.integers(1, 3)),
    st.builds(ms.Interval, st.floats(0.1, 5.0), st.sampled_from(["a/a", "a/r", "r/a", "r/r"]), st.integers(1, 2)),
)


@given(fiber_st)
def test_fiber_dict_roundtrip(fiber):
    assert ms.fiber_from_dict(ms.fiber_to_dict(fiber)) == fiber


def test_fiber_dict_errors():
    with pytest.raises(DomainError):
        ms.fiber_from_dict({"type": "sphere"})
    with pytest.raises(DomainError):
        ms.fiber_from_dict({"type": "cylinder"})


@pytest.mark.parametrize("cross", [ms.PointSet(1), ms.PointSet(1, 2), ms.Circle()])
@pytest.mark.parametrize("scale", [1.0, 0.5, 2.0])
def test_interval_end_sequence_is_exact(cross, scale):
    seq = ms.interval_end_sequence(1.5, scale, cross)
    assert mc.validate(seq.complex).exact
    assert seq.boundary_slots


@pytest.mark.parametrize("theta", [0.0, math.pi])
@pytest.mark.parametrize("collar", [0.0, 0.25])
def test_circle_arcs_exact(theta, collar):
    assert mc.validate(ms.circle_arcs(1.0, 2.0, collar, theta, 2)).exact


@pytest.mark.parametrize("theta", [0.0, math.pi])
@pytest.mark.parametrize("l1,l2", [(1.0, 1.0), (1.0, 2.0), (0.7, 3.0)])
@pytest.mark.parametrize("rank", [1, 2])
def test_overlap_triple_additivity(theta, l1, l2, rank):
    tr = ms.circle_overlap_triple(l1, l2, 0.25, theta, rank)
    assert mc.additivity_check(tr.h_dd, tr.h, tr.h_d) < 1e-12


def test_splitting_errors():
    with pytest.raises(DomainError):
        ms.circle_arcs(0.5, 1.0, collar=0.25)
    with pytest.raises(UnsupportedInput):
        ms.circle_arcs(1.0, 1.0, holonomy=1.0)
    with pytest.raises(DomainError):
        ms.circle_overlap_triple(1.0, 1.0, collar=0.0)
    with pytest.raises(DomainError):
        ms.mayer_vietoris("torus")
    assert len(ms.mayer_vietoris("interval_split", l1=1.0, l2=1.0)) == 0


def test_constructor_domains():
    for bad in (lambda: ms.Circle(-1.0), lambda: ms.Interval(0.0), lambda: ms.PointSet(0),
                lambda: ms.Circle(1.0, 7.0), lambda: ms.Interval(1.0, "a/r", 0)):
        with pytest.raises(DomainError):
            bad()
