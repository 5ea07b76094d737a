"""Long exact cohomology sequences of short exact sequences of finite cochain complexes.

Cohomology is represented by harmonic cochains, orthonormal for the given Grams,
so every cohomology term of the resulting sequence carries the identity Gram.
The sequence of ``0 -> A -> B -> C -> 0`` is graded ``H^q(A), H^q(B), H^q(C)``
at labels ``3q, 3q+1, 3q+2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import DegenerateInput, DomainError, PreconditionError
from .metrized_complex import RANK_CUTOFF, MetrizedComplex, _chol, _scale, whitened

SES_TOL = 1e-9


@dataclass(frozen=True)
class ChainMap:
    """Degreewise matrices ``f_k: source^k -> target^k``."""

    blocks: tuple[np.ndarray, ...]


def _check_chain_map(f: ChainMap, src: MetrizedComplex, dst: MetrizedComplex, name: str):
    if len(f.blocks) != len(src) or len(src) != len(dst):
        raise DomainError(f"{name}: complexes and map must have the same length")
    for k, blk in enumerate(f.blocks):
        if blk.shape != (dst.dims[k], src.dims[k]):
            raise DomainError(f"{name}: block {k} has shape {blk.shape}, expected {(dst.dims[k], src.dims[k])}")
    for k in range(len(src) - 1):
        res = dst.diffs[k] @ f.blocks[k] - f.blocks[k + 1] @ src.diffs[k]
        if res.size and np.abs(res).max() > SES_TOL:
            raise PreconditionError(f"{name} does not commute with d in degree {k}")


def harmonic_frame(c: MetrizedComplex, k: int):
    """``(U, R)``: orthonormal harmonic basis ``U`` in whitened coordinates, Cholesky factor ``R``."""
    wd = whitened(c)
    n = c.dims[k]
    rows = []
    if k < len(wd):
        rows.append(wd[k])
    if k > 0:
        rows.append(wd[k - 1].T)
    m = np.vstack(rows) if rows else np.zeros((0, n))
    if m.shape[0] == 0 or n == 0:
        return np.eye(n), _chol(c.grams[k], k)
    _, s, vt = la.svd(m)
    rank = int(np.sum(s > RANK_CUTOFF * _scale(wd)))
    return vt[rank:].T, _chol(c.grams[k], k)


def _induced(f_blk, src_frame, dst_frame):
    us, rs = src_frame
    ud, rd = dst_frame
    if us.shape[1] == 0 or ud.shape[1] == 0:
        return np.zeros((ud.shape[1], us.shape[1]))
    orig = la.solve_triangular(rs, us)  # harmonic reps in source coordinates
    return ud.T @ (rd @ (f_blk @ orig))


def long_exact_sequence(a: MetrizedComplex, b: MetrizedComplex, c: MetrizedComplex,
                        i: ChainMap, p: ChainMap) -> MetrizedComplex:
    _check_chain_map(i, a, b, "i")
    _check_chain_map(p, b, c, "p")
    for k in range(len(a)):
        comp = p.blocks[k] @ i.blocks[k]
        if comp.size and np.abs(comp).max() > SES_TOL:
            raise PreconditionError(f"p o i != 0 in degree {k}")
        if (np.linalg.matrix_rank(i.blocks[k]) != a.dims[k]
                or np.linalg.matrix_rank(p.blocks[k]) != c.dims[k]
                or a.dims[k] + c.dims[k] != b.dims[k]):
            raise PreconditionError(f"sequence is not short exact in degree {k}")

    n = len(a)
    frames = {(name, k): harmonic_frame(x, k) for name, x in (("a", a), ("b", b), ("c", c)) for k in range(n)}
    grams, diffs, labels = [], [], []
    for k in range(n):
        for j, name in enumerate("abc"):
            labels.append(3 * k + j)
            grams.append(np.eye(frames[name, k][0].shape[1]))
        diffs.append(_induced(i.blocks[k], frames["a", k], frames["b", k]))
        diffs.append(_induced(p.blocks[k], frames["b", k], frames["c", k]))
        if k + 1 < n:
            diffs.append(_connecting(a, b, c, i, p, k, frames))
    return MetrizedComplex(tuple(labels), tuple(grams), tuple(diffs))


def _connecting(a, b, c, i, p, k, frames):
    uc, rc = frames["c", k]
    ua, ra = frames["a", k + 1]
    if uc.shape[1] == 0 or ua.shape[1] == 0:
        return np.zeros((ua.shape[1], uc.shape[1]))
    reps = la.solve_triangular(rc, uc)
    lift = np.linalg.lstsq(p.blocks[k], reps, rcond=None)[0]
    z = b.diffs[k] @ lift
    pre = np.linalg.lstsq(i.blocks[k + 1], z, rcond=None)[0]
    return ua.T @ (ra @ pre)


# ---------------------------------------------------------------------------
# random braid triples


def random_complex(rng, dims, spread: float = 1.0) -> MetrizedComplex:
    """Random cochain complex (generally with cohomology) and a random metric."""
    from .metrized_complex import _random_spd

    dims = list(dims)
    diffs = []
    prev = None
    for k in range(len(dims) - 1):
        # d_k must vanish on the image of d_{k-1}
        if prev is None:
            basis = np.eye(dims[k])
        else:
            basis = la.null_space(prev.T) if prev.size else np.eye(dims[k])
            basis = basis if basis.size else np.zeros((dims[k], 0))
        r = min(basis.shape[1], dims[k + 1], int(rng.integers(0, max(basis.shape[1], 1) + 1)))
        d = np.zeros((dims[k + 1], dims[k]))
        if r:
            left = rng.standard_normal((dims[k + 1], r))
            # rows in (im d_{k-1})^perp, so d_k d_{k-1} = 0
            right = rng.standard_normal((r, basis.shape[1])) @ basis.T
            d = spread * left @ right
        diffs.append(d)
        prev = d
    grams = [_random_spd(rng, n) for n in dims]
    return MetrizedComplex.from_maps(range(len(dims)), dims, diffs, grams)


def _twisting(rng, base: MetrizedComplex, sub: MetrizedComplex):
    """Random ``c_k: base^k -> sub^{k+1}`` with ``c_{k+1} d_base + d_sub c_k = 0``."""
    n = len(base)
    shapes = [(sub.dims[k + 1], base.dims[k]) for k in range(n - 1)]
    sizes = [a * b for a, b in shapes]
    offs = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    total = int(offs[-1])
    if total == 0:
        return [np.zeros(s) for s in shapes]
    rows = []
    for k in range(n - 2):
        # vec(c_{k+1} D) + vec(S c_k) in column-major vec convention
        d_base = base.diffs[k]
        d_sub = sub.diffs[k + 1]
        m = np.zeros((shapes[k + 1][0] * base.dims[k], total))
        m[:, offs[k + 1]:offs[k + 2]] = np.kron(d_base.T, np.eye(shapes[k + 1][0]))
        m[:, offs[k]:offs[k + 1]] = np.kron(np.eye(base.dims[k]), d_sub)
        rows.append(m)
    ns = la.null_space(np.vstack(rows)) if rows else np.eye(total)
    vec = ns @ rng.standard_normal(ns.shape[1]) if ns.size else np.zeros(total)
    return [vec[offs[k]:offs[k + 1]].reshape(shapes[k], order="F") for k in range(n - 1)]


def _extension(base: MetrizedComplex, sub: MetrizedComplex, tw, gram_rng) -> MetrizedComplex:
    """Complex ``base (+) sub`` with ``d = [[d_base, 0], [c, d_sub]]`` and a random metric."""
    from .metrized_complex import _random_spd

    diffs = []
    for k in range(len(base) - 1):
        top = np.hstack([base.diffs[k], np.zeros((base.dims[k + 1], sub.dims[k]))])
        bot = np.hstack([tw[k], sub.diffs[k]])
        diffs.append(np.vstack([top, bot]))
    dims = [x + y for x, y in zip(base.dims, sub.dims)]
    grams = [_random_spd(gram_rng, n) for n in dims]
    return MetrizedComplex.from_maps(base.labels, dims, diffs, grams)


@dataclass(frozen=True)
class BraidTriple:
    h_dd: MetrizedComplex  # sequence of (R1, K1, K12)
    h: MetrizedComplex  # sequence of (R1, K, K2)
    h_d: MetrizedComplex  # sequence of (K, K1 + K2, K12)


def _smallest_gap(c: MetrizedComplex) -> float:
    wd = whitened(c)
    cut = RANK_CUTOFF * _scale(wd)
    vals = [x for d in wd if d.size for x in la.svdvals(d) if x > cut]
    return min(vals, default=np.inf)


def random_braid_triple(rng: np.random.Generator, length: int = 3, max_dim: int = 3,
                        min_singular: float = 1e-2, max_tries: int = 100) -> BraidTriple:
    """Three long exact sequences from one pullback square of random complexes.

    Draws whose sequences have a nonzero singular value below ``min_singular`` are
    redrawn; the torsion error grows like ``eps / sigma_min**2``.
    """
    for _ in range(max_tries):
        triple = _draw_braid(rng, length, max_dim)
        if min(_smallest_gap(x) for x in (triple.h_dd, triple.h, triple.h_d)) >= min_singular:
            return triple
    raise DegenerateInput(f"no draw met the conditioning floor {min_singular:g} in {max_tries} tries")


def _draw_braid(rng, length, max_dim) -> BraidTriple:
    dims = lambda: [int(x) for x in rng.integers(1, max_dim + 1, size=length)]  # noqa: E731
    k12 = random_complex(rng, dims())
    r1 = random_complex(rng, dims())
    r2 = random_complex(rng, dims())
    c1 = _twisting(rng, k12, r1)
    c2 = _twisting(rng, k12, r2)
    k1 = _extension(k12, r1, c1, rng)
    k2 = _extension(k12, r2, c2, rng)

    n12, nr1, nr2 = k12.dims, r1.dims, r2.dims
    # K = K12 (+) R1 (+) R2 embedded in K1 (+) K2 as (x, r1, x, r2)
    emb, to_k1, to_k2 = [], [], []
    for k in range(length):
        a, b, c = n12[k], nr1[k], nr2[k]
        e1 = np.hstack([np.eye(a + b), np.zeros((a + b, c))])
        e2 = np.zeros((a + c, a + b + c))
        e2[:a, :a] = np.eye(a)
        e2[a:, a + b:] = np.eye(c)
        to_k1.append(e1)
        to_k2.append(e2)
        emb.append(np.vstack([e1, e2]))
    kd = []
    for k in range(length - 1):
        a, b, c = n12[k], nr1[k], nr2[k]
        a1, b1, c1_ = n12[k + 1], nr1[k + 1], nr2[k + 1]
        d = np.zeros((a1 + b1 + c1_, a + b + c))
        d[:a1, :a] = k12.diffs[k]
        d[a1:a1 + b1, :a] = c1[k]
        d[a1:a1 + b1, a:a + b] = r1.diffs[k]
        d[a1 + b1:, :a] = c2[k]
        d[a1 + b1:, a + b:] = r2.diffs[k]
        kd.append(d)
    ksum_grams = [la.block_diag(g1, g2) for g1, g2 in zip(k1.grams, k2.grams)]
    kgrams = [e.T @ g @ e for e, g in zip(emb, ksum_grams)]
    kk = MetrizedComplex.from_maps(range(length), [a + b + c for a, b, c in zip(n12, nr1, nr2)], kd, kgrams)
    ksum = MetrizedComplex(k1.labels, tuple(ksum_grams),
                           tuple(la.block_diag(x, y) for x, y in zip(k1.diffs, k2.diffs)))

    def incl_sub(k, big_top):
        return np.vstack([np.zeros((big_top, nr1[k])), np.eye(nr1[k])])

    def quot(k, extra):
        return np.hstack([np.eye(n12[k]), np.zeros((n12[k], extra))])

    h_dd = long_exact_sequence(
        r1, k1, k12,
        ChainMap(tuple(incl_sub(k, n12[k]) for k in range(length))),
        ChainMap(tuple(quot(k, nr1[k]) for k in range(length))),
    )
    r1_in_k = tuple(np.vstack([np.zeros((n12[k], nr1[k])), np.eye(nr1[k]), np.zeros((nr2[k], nr1[k]))])
                    for k in range(length))
    h = long_exact_sequence(r1, kk, k2, ChainMap(r1_in_k), ChainMap(tuple(to_k2)))
    diff_map = tuple(np.hstack([quot(k, nr1[k]), -quot(k, nr2[k])]) for k in range(length))
    h_d = long_exact_sequence(kk, ksum, k12, ChainMap(tuple(emb)), ChainMap(diff_map))
    return BraidTriple(h_dd, h, h_d)
