"""Linear cellular automata as data.

A rule is a finite ordered memory set M in the group together with one
dimV x dimV block per memory element; the local map sends a pattern y on M
to sum_m block[m] y(m), and the automaton evaluates cellwise as
out(g) = sum_m block[m] x(g m).  Rules are kept normalized: the identity
element always belongs to the memory (with a zero block if need be), every
other zero block is pruned, and memory follows the canonical element
order.  Two automata are equal iff their normalized rules are equal, which
makes identity testing exact.

Patterns live on finite windows; configurations come in three decidable
families: finitely supported (any group), periodic (integers only) and
constant.  Window maps assemble the induced linear map V^A -> V^B with
B = interior(A, M) as an explicit GF(p) matrix in the canonical cell order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from . import linalg
from .groups import BallSequence, Group, IntegerGroup, interior


class CAError(ValueError):
    """Invalid rule data or incompatible operands."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LocalRule:
    """Normalized memory list plus matching blocks."""

    memory: tuple
    blocks: tuple

    def __eq__(self, other):
        return (
            isinstance(other, LocalRule)
            and self.memory == other.memory
            and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))
        )

    def __repr__(self):
        return f"LocalRule(memory={self.memory!r})"


def normalize_rule(group: Group, p: int, dim_v: int, memory, blocks) -> LocalRule:
    """Canonical form of a rule: identity present, zero blocks pruned,
    memory in canonical order.  The represented global map is unchanged."""
    mem = [group.check(m) for m in memory]
    if len(set(mem)) != len(mem):
        raise CAError("memory elements must be pairwise distinct")
    mats = [linalg.as_matrix(b, p) for b in blocks]
    if len(mats) != len(mem):
        raise CAError("block count must match memory size")
    for b in mats:
        if b.shape != (dim_v, dim_v):
            raise CAError(f"block shape {b.shape} does not match dimV={dim_v}")
    e = group.identity()
    table = {m: b for m, b in zip(mem, mats)}
    kept = {m: b for m, b in table.items() if m == e or np.any(b)}
    if e not in kept:
        kept[e] = np.zeros((dim_v, dim_v), dtype=np.int64)
    ordered = group.sort_elements(kept)
    return LocalRule(ordered, tuple(_freeze(kept[m].copy()) for m in ordered))


class LinearCA:
    """A linear cellular automaton over a group, GF(p) and alphabet V."""

    def __init__(self, group: Group, p: int, dim_v: int, memory, blocks):
        linalg.require_prime(p)
        if dim_v < 0:
            raise CAError("dimV must be nonnegative")
        self.group = group
        self.p = p
        self.dim_v = dim_v
        self.rule = normalize_rule(group, p, dim_v, memory, blocks)

    @property
    def memory(self) -> tuple:
        return self.rule.memory

    @property
    def blocks(self) -> tuple:
        return self.rule.blocks

    @property
    def support_memory(self) -> tuple:
        """The cells the rule actually reads: memory elements with nonzero
        blocks (the identity alone for the zero rule).  Evaluation windows
        use this, so a padded zero block never shrinks an output domain."""
        live = tuple(
            m for m, b in zip(self.memory, self.blocks) if np.any(b)
        )
        return live or (self.group.identity(),)

    def block(self, m) -> np.ndarray:
        return self.blocks[self.memory.index(m)]

    def zero_vector(self) -> np.ndarray:
        return np.zeros(self.dim_v, dtype=np.int64)

    def balls(self) -> BallSequence:
        return BallSequence.for_memory(self.group, self.memory)

    def __eq__(self, other):
        return (
            isinstance(other, LinearCA)
            and self.group == other.group
            and self.p == other.p
            and self.dim_v == other.dim_v
            and self.rule == other.rule
        )

    def __repr__(self):
        return (
            f"LinearCA(group={self.group.kind}, p={self.p}, dimV={self.dim_v}, "
            f"memory={self.memory!r})"
        )

    # -- evaluation ---------------------------------------------------

    def apply_pattern(self, pattern: "Pattern") -> "Pattern":
        """Evaluate on a finite window; the output lives on the interior of
        the domain with respect to the support memory, where every needed
        neighbor is present.  The empty pattern, and windows with empty
        interior, are legal."""
        domain = set(pattern.cells)
        live = self.support_memory
        out_cells = {}
        for g in interior(self.group, domain, live):
            acc = self.zero_vector()
            for m, b in zip(self.memory, self.blocks):
                if np.any(b):
                    acc = acc + b @ pattern.cells[self.group.multiply(g, m)]
            out_cells[g] = acc % self.p
        return Pattern(out_cells)

    def apply_config(self, config: "Configuration") -> "Configuration":
        if isinstance(config, FiniteSupportConfig):
            candidates = {
                self.group.multiply(s, self.group.inverse(m))
                for s in config.cells
                for m in self.support_memory
            }
            cells = {}
            for g in candidates:
                acc = self.zero_vector()
                for m, b in zip(self.memory, self.blocks):
                    v = config.cells.get(self.group.multiply(g, m))
                    if v is not None:
                        acc = acc + b @ v
                cells[g] = acc % self.p
            return finite_support(self.p, self.dim_v, cells)
        if isinstance(config, PeriodicConfig):
            if not isinstance(self.group, IntegerGroup):
                raise CAError("periodic configurations require the integer group")
            q = config.period
            vals = []
            for i in range(q):
                acc = self.zero_vector()
                for m, b in zip(self.memory, self.blocks):
                    acc = acc + b @ config.values[(i + m) % q]
                vals.append(acc % self.p)
            return PeriodicConfig(tuple(_freeze(v) for v in vals))
        if isinstance(config, ConstantConfig):
            acc = self.zero_vector()
            for b in self.blocks:
                acc = acc + b @ config.value
            return constant(self.p, self.dim_v, acc)
        raise CAError(f"unsupported configuration kind: {type(config).__name__}")

    # -- window maps ----------------------------------------------------

    def window_map(self, n: int, balls: Optional[BallSequence] = None) -> "WindowMap":
        """The matrix of the induced map V^{A_n} -> V^{B_n} in canonical
        cell order; B_n empty gives the map onto the zero-row space."""
        balls = balls or self.balls()
        source = balls.window(n)
        target = interior(self.group, source, self.memory)
        d = self.dim_v
        index = {a: i for i, a in enumerate(source)}
        mat = np.zeros((d * len(target), d * len(source)), dtype=np.int64)
        for bi, g in enumerate(target):
            for m, b in zip(self.memory, self.blocks):
                ai = index[self.group.multiply(g, m)]
                mat[bi * d : (bi + 1) * d, ai * d : (ai + 1) * d] += b
        return WindowMap(source, target, _freeze(mat % self.p))


@dataclass(frozen=True, eq=False)
class WindowMap:
    """Window evaluation as an explicit matrix: rows index the target cells
    (the interior), columns the source cells, dimV coordinates per cell."""

    source: tuple
    target: tuple
    matrix: np.ndarray


# -- patterns ------------------------------------------------------------


@dataclass(eq=False)
class Pattern:
    """A finite partial configuration: cell -> vector."""

    cells: dict

    def restrict(self, elements: Iterable) -> "Pattern":
        return Pattern({g: self.cells[g] for g in elements})

    def __eq__(self, other):
        return (
            isinstance(other, Pattern)
            and set(self.cells) == set(other.cells)
            and all(np.array_equal(v, other.cells[g]) for g, v in self.cells.items())
        )

    def __repr__(self):
        return f"Pattern(domain={sorted(self.cells, key=repr)!r})"


def pattern_to_vec(pattern: Pattern, order: Sequence, dim_v: int, p: int) -> np.ndarray:
    out = np.zeros(dim_v * len(order), dtype=np.int64)
    for i, g in enumerate(order):
        out[i * dim_v : (i + 1) * dim_v] = pattern.cells[g]
    return out % p


def vec_to_pattern(vec: np.ndarray, order: Sequence, dim_v: int) -> Pattern:
    cells = {}
    for i, g in enumerate(order):
        cells[g] = _freeze(np.array(vec[i * dim_v : (i + 1) * dim_v], dtype=np.int64))
    return Pattern(cells)


# -- configurations -------------------------------------------------------


@dataclass(eq=False)
class FiniteSupportConfig:
    """Zero outside a finite support; zero vectors are never stored."""

    cells: dict

    def value_at(self, g, dim_v: int) -> np.ndarray:
        v = self.cells.get(g)
        return np.zeros(dim_v, dtype=np.int64) if v is None else v

    def __eq__(self, other):
        return (
            isinstance(other, FiniteSupportConfig)
            and set(self.cells) == set(other.cells)
            and all(np.array_equal(v, other.cells[g]) for g, v in self.cells.items())
        )


@dataclass(eq=False)
class PeriodicConfig:
    """One period of values on the integers; value_at(n) = values[n mod q]."""

    values: tuple

    @property
    def period(self) -> int:
        return len(self.values)

    def value_at(self, g, dim_v: int) -> np.ndarray:
        return self.values[g % self.period]

    def __eq__(self, other):
        return (
            isinstance(other, PeriodicConfig)
            and self.period == other.period
            and all(np.array_equal(a, b) for a, b in zip(self.values, other.values))
        )


@dataclass(eq=False)
class ConstantConfig:
    value: np.ndarray

    def value_at(self, g, dim_v: int) -> np.ndarray:
        return self.value

    def __eq__(self, other):
        return isinstance(other, ConstantConfig) and np.array_equal(
            self.value, other.value
        )


Configuration = Union[FiniteSupportConfig, PeriodicConfig, ConstantConfig]


def finite_support(p: int, dim_v: int, cells: dict) -> FiniteSupportConfig:
    out = {}
    for g, v in cells.items():
        w = linalg.as_vector(v, p)
        if w.shape[0] != dim_v:
            raise CAError(f"value length {w.shape[0]} does not match dimV={dim_v}")
        if np.any(w):
            out[g] = _freeze(w)
    return FiniteSupportConfig(out)


def periodic(p: int, dim_v: int, values: Sequence) -> PeriodicConfig:
    if len(values) < 1:
        raise CAError("period must be >= 1")
    vals = []
    for v in values:
        w = linalg.as_vector(v, p)
        if w.shape[0] != dim_v:
            raise CAError(f"value length {w.shape[0]} does not match dimV={dim_v}")
        vals.append(_freeze(w))
    return PeriodicConfig(tuple(vals))


def constant(p: int, dim_v: int, value) -> ConstantConfig:
    w = linalg.as_vector(value, p)
    if w.shape[0] != dim_v:
        raise CAError(f"value length {w.shape[0]} does not match dimV={dim_v}")
    return ConstantConfig(_freeze(w))


def zero_config(dim_v: int = 0) -> FiniteSupportConfig:
    return FiniteSupportConfig({})


def shift_config(group: Group, g, config: Configuration) -> Configuration:
    """The left shift action: (g x)(h) = x(g^{-1} h)."""
    if isinstance(config, FiniteSupportConfig):
        return FiniteSupportConfig(
            {group.multiply(g, h): v for h, v in config.cells.items()}
        )
    if isinstance(config, PeriodicConfig):
        if not isinstance(group, IntegerGroup):
            raise CAError("periodic configurations require the integer group")
        q = config.period
        return PeriodicConfig(tuple(config.values[(i - g) % q] for i in range(q)))
    if isinstance(config, ConstantConfig):
        return config
    raise CAError(f"unsupported configuration kind: {type(config).__name__}")


def config_equal(group: Group, dim_v: int, a: Configuration, b: Configuration) -> bool:
    """Equality as global configurations, decided on canonical data."""
    if type(a) is type(b):
        if isinstance(a, PeriodicConfig):
            q = math.lcm(a.period, b.period)
            return all(
                np.array_equal(a.value_at(i, dim_v), b.value_at(i, dim_v))
                for i in range(q)
            )
        return a == b
    # Mixed kinds: a finite group is covered by direct comparison; on
    # infinite groups the families only overlap in degenerate cases.
    if group.is_finite():
        return all(
            np.array_equal(a.value_at(g, dim_v), b.value_at(g, dim_v))
            for g in group.elements()
        )
    kinds = {type(a): a, type(b): b}
    fs = kinds.get(FiniteSupportConfig)
    const = kinds.get(ConstantConfig)
    per = kinds.get(PeriodicConfig)
    if fs is not None and const is not None:
        return not np.any(const.value) and not fs.cells
    if fs is not None and per is not None:
        return not fs.cells and not any(np.any(v) for v in per.values)
    return all(np.array_equal(const.value, v) for v in per.values)


# -- rule-level operations -------------------------------------------------


def compose(outer: LinearCA, inner: LinearCA) -> LinearCA:
    """The automaton computing outer(inner(x)); blocks at u collect every
    product m_outer * m_inner = u."""
    if outer.group != inner.group or outer.p != inner.p or outer.dim_v != inner.dim_v:
        raise CAError("composition requires matching group, field and dimV")
    g = outer.group
    acc: dict = {}
    for m2, b2 in zip(outer.memory, outer.blocks):
        for m1, b1 in zip(inner.memory, inner.blocks):
            u = g.multiply(m2, m1)
            prod = linalg.matmul(b2, b1, outer.p)
            if u in acc:
                acc[u] = (acc[u] + prod) % outer.p
            else:
                acc[u] = prod
    return LinearCA(g, outer.p, outer.dim_v, tuple(acc), tuple(acc.values()))


def identity_ca(group: Group, p: int, dim_v: int) -> LinearCA:
    return LinearCA(group, p, dim_v, (group.identity(),), (np.eye(dim_v, dtype=np.int64),))


def equals_identity(ca: LinearCA) -> bool:
    """Exact identity test on the normalized rule."""
    if ca.memory != (ca.group.identity(),):
        return False
    return np.array_equal(ca.blocks[0], np.eye(ca.dim_v, dtype=np.int64))


def equivariance_check(
    automaton: Union[LinearCA, Callable[[Configuration], Configuration]],
    group: Group,
    dim_v: int,
    samples: Iterable[tuple],
) -> bool:
    """Check tau(g x) = g tau(x) on the given (g, configuration) samples.
    Accepts any configuration map, so a non-equivariant double fails."""
    apply = automaton.apply_config if isinstance(automaton, LinearCA) else automaton
    for g, x in samples:
        lhs = apply(shift_config(group, g, x))
        rhs = shift_config(group, g, apply(x))
        if not config_equal(group, dim_v, lhs, rhs):
            return False
    return True
