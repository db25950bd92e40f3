"""Isotropic Smolyak sparse grids on [-1,1]^N with nested Clenshaw-Curtis
abscissas.

Levels use m(1) = 1 and m(i) = 2^{i-1} + 1, restricted by
g(i) = sum(i_n - 1) <= w. Nodes are identified across levels by the exact
dyadic fraction j/(m-1) of their angle, never by floating comparison, so
nesting and deduplication are bit-reproducible. Interpolation uses
closed-form barycentric weights (alternating signs, halved at endpoints);
quadrature weights integrate the Chebyshev expansion of the interpolant
against the uniform probability measure (density 1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import numpy as np

CENTER = Fraction(1, 2)


def m_of_level(i: int) -> int:
    """Number of abscissas at level i: 0, 1, 3, 5, 9, 17, ..."""
    if i < 0:
        raise ValueError(f"level must be nonnegative, got {i}")
    if i == 0:
        return 0
    if i == 1:
        return 1
    return 2 ** (i - 1) + 1


def node_fraction(j: int, m: int) -> Fraction:
    """Exact angle fraction of the j-th abscissa (0-based) of the m-point rule."""
    if m == 1:
        return CENTER
    return Fraction(j, m - 1)


def node_value(frac: Fraction) -> float:
    """Abscissa -cos(pi * frac), symmetrized so that value(1-f) == -value(f)
    exactly and the center/endpoints are exact floats."""
    if frac == CENTER:
        return 0.0
    if frac == 0:
        return -1.0
    if frac == 1:
        return 1.0
    if frac < CENTER:
        return -math.cos(math.pi * float(frac))
    return math.cos(math.pi * float(1 - frac))


def cc_nodes(m: int) -> np.ndarray:
    """Clenshaw-Curtis abscissas: extrema of the degree-(m-1) Chebyshev
    polynomial, ascending; the single-node rule sits at 0."""
    if m <= 0:
        raise ValueError(f"need at least one node, got m={m}")
    return np.array([node_value(node_fraction(j, m)) for j in range(m)])


def cc_weights(m: int) -> np.ndarray:
    """Quadrature weights of the m-point rule for the uniform probability
    measure on [-1,1]; they sum to 1. Computed by integrating the Chebyshev
    cosine expansion of the interpolant; symmetric by construction."""
    if m <= 0:
        raise ValueError(f"need at least one node, got m={m}")
    if m == 1:
        return np.array([1.0])
    n = m - 1
    w = np.zeros(m)
    for j in range(n // 2 + 1):
        e_j = 0.5 if j in (0, n) else 1.0
        acc = 0.0
        for k in range(0, n + 1, 2):
            d_k = 0.5 if k in (0, n) else 1.0
            acc += d_k * (2.0 / (1.0 - k * k)) * math.cos(k * j * math.pi / n)
        w[j] = e_j * (2.0 / n) * acc
    for j in range(n // 2 + 1):
        w[n - j] = w[j]
    return w / 2.0


def barycentric_weights(m: int) -> np.ndarray:
    """Closed-form barycentric weights for the Chebyshev extrema:
    alternating +-1 with the endpoints halved."""
    if m == 1:
        return np.array([1.0])
    lam = np.array([(-1.0) ** j for j in range(m)])
    lam[0] *= 0.5
    lam[-1] *= 0.5
    return lam


def barycentric_basis(xs: np.ndarray, lam: np.ndarray, x: float) -> np.ndarray:
    """Cardinal basis values l_k(x) for nodes xs with weights lam."""
    if xs.size == 1:
        return np.array([1.0])
    diff = x - xs
    hit = np.nonzero(diff == 0.0)[0]
    basis = np.zeros(xs.size)
    if hit.size:
        basis[hit[0]] = 1.0
        return basis
    terms = lam / diff
    return terms / terms.sum()


def index_set(n_dims: int, level: int) -> list[tuple[int, ...]]:
    """All multi-indices i in N_+^N with sum(i_n - 1) <= level, lex order."""
    if n_dims < 1:
        raise ValueError("need at least one dimension")
    if level < 0:
        raise ValueError("level must be nonnegative")
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], budget: int):
        if len(prefix) == n_dims:
            out.append(prefix)
            return
        for i in range(1, budget + 2):
            rec(prefix + (i,), budget - (i - 1))

    rec((), level)
    return sorted(out)


def combination_coefficient(idx: tuple[int, ...], level: int) -> int:
    """Telescoping coefficient: sum over binary offsets e of (-1)^|e| for
    offsets keeping g(i+e) <= level."""
    n = len(idx)
    base = sum(v - 1 for v in idx)
    coeff = 0
    for e in product((0, 1), repeat=n):
        if base + sum(e) <= level:
            coeff += (-1) ** sum(e)
    return coeff


@dataclass
class _TensorRule:
    """One active multi-index of the combination: per-axis nodes and the map
    from tensor positions to global node indices."""

    index: tuple[int, ...]
    coeff: int
    axis_xs: list[np.ndarray]
    axis_lam: list[np.ndarray]
    global_index: np.ndarray  # shape = tuple(m(i_n))


class SparseGrid:
    """Deduplicated Smolyak grid with combination coefficients and weights."""

    def __init__(self, n_dims: int, level: int):
        if n_dims < 1:
            raise ValueError("need at least one dimension")
        if level < 0:
            raise ValueError("level must be nonnegative")
        self.n_dims = n_dims
        self.level = level
        self.indices = index_set(n_dims, level)
        self.coefficients = [combination_coefficient(i, level) for i in self.indices]

        keys: set[tuple[Fraction, ...]] = set()
        active: list[tuple[tuple[int, ...], int]] = []
        for idx, coeff in zip(self.indices, self.coefficients):
            if coeff == 0:
                continue
            active.append((idx, coeff))
            axis_fracs = [
                [node_fraction(j, m_of_level(i)) for j in range(m_of_level(i))]
                for i in idx
            ]
            keys.update(product(*axis_fracs))
        self.node_keys: list[tuple[Fraction, ...]] = sorted(keys)
        self._key_pos = {k: p for p, k in enumerate(self.node_keys)}
        self.nodes = np.array(
            [[node_value(f) for f in key] for key in self.node_keys]
        ).reshape(len(self.node_keys), n_dims)

        self._rules: list[_TensorRule] = []
        self.weights = np.zeros(len(self.node_keys))
        for idx, coeff in active:
            ms = [m_of_level(i) for i in idx]
            axis_fracs = [[node_fraction(j, m) for j in range(m)] for m in ms]
            gidx = np.empty(ms, dtype=np.int64)
            for pos in product(*(range(m) for m in ms)):
                key = tuple(axis_fracs[n][pos[n]] for n in range(n_dims))
                gidx[pos] = self._key_pos[key]
            rule = _TensorRule(
                index=idx,
                coeff=coeff,
                axis_xs=[cc_nodes(m) for m in ms],
                axis_lam=[barycentric_weights(m) for m in ms],
                global_index=gidx,
            )
            self._rules.append(rule)
            tensor_w = cc_weights(ms[0])
            for m in ms[1:]:
                tensor_w = np.multiply.outer(tensor_w, cc_weights(m))
            np.add.at(self.weights, gidx.ravel(), coeff * tensor_w.ravel())

    @property
    def n_nodes(self) -> int:
        return len(self.node_keys)

    def interpolate(self, node_values: np.ndarray, query) -> float:
        """Evaluate the sparse interpolant at one query point."""
        vals = np.asarray(node_values, dtype=float)
        if vals.shape != (self.n_nodes,):
            raise ValueError(
                f"expected {self.n_nodes} node values, got shape {vals.shape}"
            )
        q = np.atleast_1d(np.asarray(query, dtype=float))
        if q.shape != (self.n_dims,):
            raise ValueError(f"query must have {self.n_dims} coordinates")
        total = 0.0
        for rule in self._rules:
            block = vals[rule.global_index]
            for n in range(self.n_dims):
                basis = barycentric_basis(rule.axis_xs[n], rule.axis_lam[n], q[n])
                block = np.tensordot(block, basis, axes=([0], [0]))
            total += rule.coeff * float(block)
        return total

    def integrate(self, node_values: np.ndarray) -> float:
        """Quadrature against the uniform probability measure on [-1,1]^N."""
        vals = np.asarray(node_values, dtype=float)
        if vals.shape != (self.n_nodes,):
            raise ValueError(
                f"expected {self.n_nodes} node values, got shape {vals.shape}"
            )
        return float(self.weights @ vals)


def build_sparse_grid(n_dims: int, level: int) -> SparseGrid:
    return SparseGrid(n_dims, level)


@dataclass
class ConvergenceRow:
    level: int
    n_nodes: int
    expectation: float
    error: float


def convergence_table(
    evaluator: Callable[[np.ndarray], float],
    n_dims: int,
    w_max: int,
    reference_w: int,
    cache: dict[tuple[Fraction, ...], float] | None = None,
) -> list[ConvergenceRow]:
    """Per-level quadrature of a pointwise evaluator with nested reuse.

    The evaluator is called once per distinct node across all levels
    (including the reference level), keyed by the exact node identity.
    """
    if reference_w <= w_max:
        raise ValueError("reference level must exceed w_max")
    if cache is None:
        cache = {}

    def values_for(grid: SparseGrid) -> np.ndarray:
        out = np.empty(grid.n_nodes)
        for pos, key in enumerate(grid.node_keys):
            if key not in cache:
                cache[key] = float(evaluator(grid.nodes[pos]))
            out[pos] = cache[key]
        return out

    ref_grid = build_sparse_grid(n_dims, reference_w)
    reference = ref_grid.integrate(values_for(ref_grid))
    rows = []
    for w in range(w_max + 1):
        grid = build_sparse_grid(n_dims, w)
        e_w = grid.integrate(values_for(grid))
        rows.append(
            ConvergenceRow(
                level=w,
                n_nodes=grid.n_nodes,
                expectation=e_w,
                error=abs(e_w - reference),
            )
        )
    return rows
