"""Finite metrized cochain complexes and the torsion of exact ones.

A complex is a list of terms ``(label, Gram)`` with differentials between
consecutive terms.  Labels are the integer gradings that enter the torsion
weights; they need not start at 0 (the Mayer-Vietoris sequences use
``3p, 3p+1, 3p+2``).  Adjoints are taken with respect to the Grams, which is
done by whitening every term with its Cholesky factor.

Torsion convention::

    T = 1/2 * sum_k (-1)^{g_k} g_k log det(Laplacian_k)

so that ``0 -> R^r --sqrt(2)--> R^r -> 0`` in labels ``(0, 1)`` has ``T = -(r/2) log 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as la

from .errors import DegenerateInput, DomainError, PreconditionError

RANK_CUTOFF = 1e-10
DD_TOL = 1e-12
GRAM_COND_MAX = 1e12


@dataclass(frozen=True)
class MetrizedComplex:
    labels: tuple[int, ...]
    grams: tuple[np.ndarray, ...]
    diffs: tuple[np.ndarray, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        grams = tuple(np.atleast_2d(np.asarray(g, dtype=float)).reshape(len(g), len(g)) if len(g) else np.zeros((0, 0))
                      for g in self.grams)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "grams", grams)
        if len(labels) != len(grams):
            raise DomainError("one Gram matrix per term is required")
        if any(b <= a for a, b in zip(labels, labels[1:])):
            raise DomainError(f"grading labels must strictly increase, got {labels}")
        dims = self.dims
        if len(self.diffs) != max(len(labels) - 1, 0):
            raise DomainError("need exactly one differential between consecutive terms")
        diffs = []
        for i, d in enumerate(self.diffs):
            d = np.asarray(d, dtype=float).reshape(dims[i + 1], dims[i])
            diffs.append(d)
        object.__setattr__(self, "diffs", tuple(diffs))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(g.shape[0] for g in self.grams)

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def from_maps(cls, labels, dims, diffs, grams=None) -> "MetrizedComplex":
        if grams is None:
            grams = [np.eye(n) for n in dims]
        return cls(tuple(labels), tuple(np.asarray(g, dtype=float).reshape(n, n) for g, n in zip(grams, dims)),
                   tuple(diffs))


def empty_complex() -> MetrizedComplex:
    return MetrizedComplex((), (), ())


def two_term(matrix, labels=(0, 1), grams=None) -> MetrizedComplex:
    """``0 -> V --matrix--> W -> 0``."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    return MetrizedComplex.from_maps(labels, (a.shape[1], a.shape[0]), [a], grams)


def sqrt2_complex(rank: int, label: int = 0) -> MetrizedComplex:
    return two_term(math.sqrt(2.0) * np.eye(rank), (label, label + 1))


# ---------------------------------------------------------------------------
# whitening


def _chol(g: np.ndarray, idx: int) -> np.ndarray:
    if g.shape[0] == 0:
        return g
    if not np.allclose(g, g.T, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise DomainError(f"Gram of term {idx} is not symmetric")
    try:
        return la.cholesky(g, lower=False)
    except la.LinAlgError as exc:
        raise DomainError(f"Gram of term {idx} is not positive definite") from exc


def whitened(c: MetrizedComplex) -> list[np.ndarray]:
    """Differentials in orthonormal coordinates: ``R_{k+1} d_k R_k^{-1}`` with ``G = R^T R``."""
    rs = [_chol(g, i) for i, g in enumerate(c.grams)]
    out = []
    for i, d in enumerate(c.diffs):
        if d.size == 0:
            out.append(np.zeros(d.shape))
            continue
        left = rs[i + 1] @ d
        out.append(la.solve_triangular(rs[i], left.T, trans="T", lower=False).T)
    return out


def _scale(mats) -> float:
    return max((float(np.linalg.norm(m, 2)) for m in mats if m.size), default=0.0)


def _rank(a: np.ndarray, scale: float) -> int:
    # cutoff is relative to the whole complex, so noise-level maps count as zero
    if a.size == 0 or scale == 0.0:
        return 0
    return int(np.sum(la.svdvals(a) > RANK_CUTOFF * scale))


@dataclass
class Diagnostics:
    dd_residuals: list[float] = field(default_factory=list)
    gram_conditions: list[float] = field(default_factory=list)
    cohomology: list[int] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return all(h == 0 for h in self.cohomology)

    @property
    def max_dd_residual(self) -> float:
        return max(self.dd_residuals, default=0.0)


def validate(c: MetrizedComplex) -> Diagnostics:
    diag = Diagnostics()
    wd = whitened(c)
    scale = _scale(wd)
    for d0, d1 in zip(wd, wd[1:]):
        prod = d1 @ d0
        diag.dd_residuals.append(float(np.abs(prod).max()) / scale ** 2 if prod.size and scale else 0.0)
    for g in c.grams:
        diag.gram_conditions.append(float(np.linalg.cond(g)) if g.size else 1.0)
    ranks = [_rank(d, scale) for d in wd]
    for k, n in enumerate(c.dims):
        into = ranks[k - 1] if k > 0 else 0
        out = ranks[k] if k < len(ranks) else 0
        diag.cohomology.append(n - into - out)
    return diag


def _require_exact(c: MetrizedComplex):
    diag = validate(c)
    if diag.max_dd_residual > DD_TOL:
        raise PreconditionError(f"d o d != 0 (relative residual {diag.max_dd_residual:.3g})")
    bad = [c.labels[k] for k, h in enumerate(diag.cohomology) if h != 0]
    if bad:
        raise PreconditionError(f"complex is not exact at grading label(s) {bad}")


def laplacians(c: MetrizedComplex) -> list[np.ndarray]:
    wd = whitened(c)
    out = []
    for k, n in enumerate(c.dims):
        lap = np.zeros((n, n))
        if k > 0:
            lap += wd[k - 1] @ wd[k - 1].T
        if k < len(wd):
            lap += wd[k].T @ wd[k]
        out.append(lap)
    return out


def log_volumes(c: MetrizedComplex) -> list[float]:
    """``sum log sigma^2`` over the nonzero singular values of each whitened differential."""
    wd = whitened(c)
    scale = _scale(wd)
    out = []
    for k, d in enumerate(wd):
        if d.size == 0:
            out.append(0.0)
            continue
        sv = la.svdvals(d)
        sv = sv[sv > RANK_CUTOFF * scale]
        out.append(2.0 * float(np.sum(np.log(sv))))
    return out


def torsion_acyclic(c: MetrizedComplex) -> float:
    """``1/2 sum (-1)^g g log det(Laplacian_g)``.

    On an exact complex the Laplacian at term ``k`` has spectrum ``sigma^2`` of
    ``d_{k-1}`` and ``d_k`` together, so the log det is a sum of the two log volumes.
    """
    _require_exact(c)
    for k, g in enumerate(c.grams):
        if g.size and np.linalg.cond(g) > GRAM_COND_MAX:
            raise DegenerateInput(f"Gram at label {c.labels[k]} is numerically singular")
    vols = log_volumes(c)
    total = 0.0
    for k, g in enumerate(c.labels):
        ld = (vols[k - 1] if k > 0 else 0.0) + (vols[k] if k < len(vols) else 0.0)
        total += (-1) ** (g % 2) * g * ld
    return 0.5 * total


def shift_grading(c: MetrizedComplex, shift: int) -> MetrizedComplex:
    return MetrizedComplex(tuple(x + shift for x in c.labels), c.grams, c.diffs)


def truncate(c: MetrizedComplex, label: int) -> MetrizedComplex:
    """``0 -> E^0 -> ... -> E^k -> Im(f_k) -> 0`` with the metric restricted to the image."""
    if label not in c.labels:
        raise DomainError(f"label {label} is not a grading label of the complex {c.labels}")
    _require_exact(c)
    i = c.labels.index(label)
    if i == len(c) - 1:
        return c
    all_wd = whitened(c)
    wd = all_wd[i]
    r_next = _chol(c.grams[i + 1], i + 1)
    if wd.size == 0:
        u = np.zeros((wd.shape[0], 0))
    else:
        u, s, _ = la.svd(wd, full_matrices=False)
        u = u[:, : _rank(wd, _scale(all_wd))]
    # image basis B = R^{-1} U has identity Gram; coordinates of d_i x in it are U^T R d_i x
    new_d = u.T @ (r_next @ c.diffs[i]) if u.size else np.zeros((u.shape[1], c.dims[i]))
    labels = c.labels[: i + 2]
    grams = c.grams[: i + 1] + (np.eye(u.shape[1]),)
    diffs = c.diffs[:i] + (new_d,)
    return MetrizedComplex(labels, grams, diffs)


def _pad(c: MetrizedComplex, lo: int, hi: int) -> MetrizedComplex:
    """Extend a complex with contiguous labels by zero terms to cover ``lo..hi``."""
    if len(c) == 0:
        labels = tuple(range(lo, hi + 1))
        return MetrizedComplex(labels, tuple(np.zeros((0, 0)) for _ in labels),
                               tuple(np.zeros((0, 0)) for _ in labels[1:]))
    if c.labels != tuple(range(c.labels[0], c.labels[-1] + 1)):
        raise DomainError(f"padding needs contiguous labels, got {c.labels}")
    before = c.labels[0] - lo
    after = hi - c.labels[-1]
    dims = (0,) * before + c.dims + (0,) * after
    grams = tuple(np.zeros((0, 0)) for _ in range(before)) + c.grams + tuple(np.zeros((0, 0)) for _ in range(after))
    diffs = [np.zeros((dims[k + 1], dims[k])) for k in range(len(dims) - 1)]
    for k, d in enumerate(c.diffs):
        diffs[before + k] = d
    return MetrizedComplex(tuple(range(lo, hi + 1)), grams, tuple(diffs))


def direct_sum(*parts: MetrizedComplex) -> MetrizedComplex:
    """Blockwise sum; labels must match, or be contiguous ranges (then zero terms are padded in)."""
    parts = [p for p in parts if len(p)]
    if not parts:
        return empty_complex()
    if any(p.labels != parts[0].labels for p in parts):
        lo = min(p.labels[0] for p in parts)
        hi = max(p.labels[-1] for p in parts)
        parts = [_pad(p, lo, hi) for p in parts]
    grams = tuple(la.block_diag(*gs) for gs in zip(*(p.grams for p in parts)))
    diffs = tuple(la.block_diag(*ds) for ds in zip(*(p.diffs for p in parts)))
    return MetrizedComplex(parts[0].labels, grams, diffs)


def tensor_gram(c: MetrizedComplex, gram: np.ndarray) -> MetrizedComplex:
    """``c`` tensored with a fixed inner-product space of Gram ``gram`` (maps act as ``d (x) Id``)."""
    gram = np.atleast_2d(np.asarray(gram, dtype=float))
    eye = np.eye(gram.shape[0])
    return MetrizedComplex(c.labels, tuple(np.kron(g, gram) for g in c.grams),
                           tuple(np.kron(d, eye) for d in c.diffs))


def tensor_rank(c: MetrizedComplex, rank: int) -> MetrizedComplex:
    """``c`` tensored with a flat trivial bundle of the given rank."""
    return tensor_gram(c, np.eye(rank))


def additivity_check(h_dd: MetrizedComplex, h: MetrizedComplex, h_d: MetrizedComplex) -> float:
    """``|T(-H'') + T(H) - T(-H')|`` where ``-X`` raises every label by one."""
    for x in (h_dd, h, h_d):
        if not isinstance(x, MetrizedComplex):
            raise DomainError("additivity_check takes three MetrizedComplex values")
    lhs = torsion_acyclic(shift_grading(h_dd, 1)) + torsion_acyclic(h)
    rhs = torsion_acyclic(shift_grading(h_d, 1))
    return abs(lhs - rhs)


def compare_scaled_sequences(base: MetrizedComplex, scale_positions) -> float:
    """``T(scaled) - T(base)`` where each listed term's Gram becomes ``Gram / factor**2``."""
    grams = list(base.grams)
    for idx, factor in scale_positions:
        if not factor > 0:
            raise DomainError(f"scale factor must be positive, got {factor!r}")
        grams[idx] = grams[idx] / factor ** 2
    scaled = MetrizedComplex(base.labels, tuple(grams), base.diffs)
    return torsion_acyclic(scaled) - torsion_acyclic(base)


def random_exact_complex(rng: np.random.Generator, ranks, labels=None, metric: bool = True) -> MetrizedComplex:
    """Exact complex whose ``k``-th differential has rank ``ranks[k]``.

    Term ``k`` has dimension ``ranks[k-1] + ranks[k]``; bases and Grams are random.
    """
    ranks = list(ranks)
    n_terms = len(ranks) + 1
    dims = [(ranks[k - 1] if k > 0 else 0) + (ranks[k] if k < len(ranks) else 0) for k in range(n_terms)]
    if labels is None:
        labels = range(n_terms)
    basis = [_random_invertible(rng, n) for n in dims]
    diffs = []
    for k, r in enumerate(ranks):
        # in adapted coordinates term k = (image part, coimage part); d maps coimage onto next image part
        core = np.zeros((dims[k + 1], dims[k]))
        into = ranks[k - 1] if k > 0 else 0
        core[:r, into:into + r] = np.diag(rng.uniform(0.5, 2.0, size=r))
        diffs.append(basis[k + 1] @ core @ np.linalg.inv(basis[k]))
    grams = [_random_spd(rng, n) if metric else np.eye(n) for n in dims]
    return MetrizedComplex.from_maps(labels, dims, diffs, grams)


def _random_invertible(rng, n):
    if n == 0:
        return np.zeros((0, 0))
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return q @ np.diag(rng.uniform(0.5, 2.0, size=n)) @ np.linalg.qr(rng.standard_normal((n, n)))[0]


def _random_spd(rng, n):
    if n == 0:
        return np.zeros((0, 0))
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


# ---------------------------------------------------------------------------
# plain-text matrix files


def dumps(c: MetrizedComplex) -> str:
    lines = ["dims " + " ".join(str(n) for n in c.dims), "labels " + " ".join(str(x) for x in c.labels)]
    # a block with no columns takes no lines
    for m in c.grams + c.diffs:
        if m.shape[1]:
            lines += [" ".join(repr(float(v)) for v in row) for row in m]
    return "\n".join(lines) + "\n"


def loads(text: str) -> MetrizedComplex:
    """Parse the matrix-file format (see README).

    A Gram block may be replaced by the single word ``identity``.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if len(rows) < 2 or rows[0][1][0] != "dims" or rows[1][1][0] != "labels":
        raise DomainError("matrix file must start with a 'dims' line and a 'labels' line")
    try:
        dims = [int(x) for x in rows[0][1][1:]]
        labels = [int(x) for x in rows[1][1][1:]]
    except ValueError as exc:
        raise DomainError(f"line {rows[0][0]}: bad integer") from exc
    if len(dims) != len(labels):
        raise DomainError(f"line {rows[1][0]}: {len(labels)} labels for {len(dims)} terms")
    pos = 2

    def block(nr, nc):
        nonlocal pos
        out = np.zeros((nr, nc))
        if nc == 0:
            return out
        for i in range(nr):
            if pos >= len(rows):
                raise DomainError("matrix file ended early")
            lineno, toks = rows[pos]
            if len(toks) != nc:
                raise DomainError(f"line {lineno}: expected {nc} entries, got {len(toks)}")
            try:
                out[i] = [float(x) for x in toks]
            except ValueError as exc:
                raise DomainError(f"line {lineno}: bad number") from exc
            pos += 1
        return out

    grams = []
    for n in dims:
        if n and pos < len(rows) and rows[pos][1] == ["identity"]:
            grams.append(np.eye(n))
            pos += 1
        else:
            grams.append(block(n, n))
    diffs = [block(dims[k + 1], dims[k]) for k in range(len(dims) - 1)]
    if pos != len(rows):
        raise DomainError(f"line {rows[pos][0]}: trailing content")
    return MetrizedComplex.from_maps(labels, dims, diffs, grams)


def load(path) -> MetrizedComplex:
    return loads(Path(path).read_text())
