"""Projective sequences of affine window fibers, plateau detection, limit
extraction, inverse-rule synthesis and witness searches.

For a linear CA the window maps tau_n : V^{A_n} -> V^{B_n} turn global
questions into finite exact ones.  Given a target configuration y, the
fibers X_n = tau_n^{-1}(y|B_n) form a projective sequence of affine
subspaces under restriction.  Each ambient space is finite dimensional, so
the image chains f_{nm}(X_m) are non-increasing and must stabilize; once a
plateau is detected the stabilized (universal) levels admit surjective
one-step bonding maps, which the extraction loop exploits: it walks a
canonical point up level by level, certifying every lift by its one-step
restriction equation.  Plateau detection at a finite cutoff is heuristic
evidence, never proof, so failures at the cutoff are reported as Unknown
while every positive answer is verified independently.

Inverse synthesis does not wait for kernel chains to stabilize: it solves
the exact linear system "candidate_rule o automaton = identity" over the
unknown inverse blocks, growing the candidate memory through word balls.
A solved inverse is self-certifying (both compositions are checked by
exact rule arithmetic), and if the automaton is reversible at all, some
finite ball contains its inverse's memory, so the search is complete.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

import numpy as np

from . import linalg
from .ca import (
    Configuration,
    FiniteSupportConfig,
    LinearCA,
    Pattern,
    PeriodicConfig,
    WindowMap,
    compose,
    equals_identity,
    finite_support,
    pattern_to_vec,
    periodic,
    vec_to_pattern,
)
from .groups import BallSequence, IntegerGroup
from .linalg import (
    AffineSubspace,
    constrain_affine,
    image_of_affine,
    kernel_basis,
    matmul,
    solve_affine,
    solve_affine_multi,
)


class StabilizationCutoffError(RuntimeError):
    """No plateau, or no preimage, within the configured cutoff."""


# -- window systems and projective sequences --------------------------------


class WindowSystem:
    """Cached window maps and restriction matrices of one automaton."""

    def __init__(self, automaton: LinearCA, balls: Optional[BallSequence] = None):
        self.ca = automaton
        self.balls = balls or automaton.balls()
        self._windows: dict[int, WindowMap] = {}

    def window(self, n: int) -> WindowMap:
        if n not in self._windows:
            self._windows[n] = self.ca.window_map(n, self.balls)
        return self._windows[n]

    def ambient(self, n: int) -> int:
        return self.ca.dim_v * len(self.window(n).source)

    def restriction(self, n: int, m: int) -> np.ndarray:
        """Coordinate selection V^{A_m} -> V^{A_n} for nested windows."""
        d = self.ca.dim_v
        src = self.window(m).source
        dst = self.window(n).source
        pos = {g: j for j, g in enumerate(src)}
        mat = np.zeros((d * len(dst), d * len(src)), dtype=np.int64)
        eye = np.eye(d, dtype=np.int64)
        for i, g in enumerate(dst):
            j = pos[g]
            mat[i * d : (i + 1) * d, j * d : (j + 1) * d] = eye
        return mat

    def target_vec(self, config: Configuration, n: int) -> np.ndarray:
        """The target configuration restricted to B_n, vectorized."""
        d = self.ca.dim_v
        cells = self.window(n).target
        out = np.zeros(d * len(cells), dtype=np.int64)
        for i, g in enumerate(cells):
            out[i * d : (i + 1) * d] = config.value_at(g, d)
        return out % self.ca.p


class ProjectiveAffineSequence:
    """Levels X_n (affine subspaces) with restriction bonding maps f_{nm}."""

    def __init__(
        self,
        p: int,
        ambient_fn: Callable[[int], int],
        level_fn: Callable[[int], AffineSubspace],
        bond_fn: Callable[[int, int], np.ndarray],
    ):
        self.p = p
        self._ambient = ambient_fn
        self._level = level_fn
        self._bond = bond_fn
        self._levels: dict[int, AffineSubspace] = {}

    def ambient(self, n: int) -> int:
        return self._ambient(n)

    def level(self, n: int) -> AffineSubspace:
        if n not in self._levels:
            self._levels[n] = self._level(n)
        return self._levels[n]

    def bond(self, n: int, m: int) -> np.ndarray:
        if m < n:
            raise ValueError("bonding maps go from higher to lower levels")
        if m == n:
            return np.eye(self.ambient(n), dtype=np.int64)
        return self._bond(n, m)

    def verify_axioms(self, triples: Iterable[tuple[int, int, int]]) -> bool:
        """Identity at equal levels and composition along sampled n<=m<=k."""
        for n, m, k in triples:
            if not (n <= m <= k):
                raise ValueError("need n <= m <= k")
            if not np.array_equal(
                self.bond(n, n), np.eye(self.ambient(n), dtype=np.int64)
            ):
                return False
            lhs = self.bond(n, k)
            rhs = matmul(self.bond(n, m), self.bond(m, k), self.p)
            if not np.array_equal(lhs, rhs):
                return False
        return True


def preimage_sequence(
    ws: WindowSystem, target: Configuration
) -> ProjectiveAffineSequence:
    """Levels are the window fibers of the target under each window map."""

    def level(n: int) -> AffineSubspace:
        w = ws.window(n)
        return solve_affine(w.matrix, ws.target_vec(target, n), ws.ca.p)

    return ProjectiveAffineSequence(ws.ca.p, ws.ambient, level, ws.restriction)


def kernel_sequence(
    automaton: LinearCA, balls: Optional[BallSequence] = None
) -> ProjectiveAffineSequence:
    """Window kernels as affine levels (the diagnostic chain; by default it
    uses plain radius-n balls so level 0 is the smallest window)."""
    ws = WindowSystem(automaton, balls or BallSequence(automaton.group, 0))

    def level(n: int) -> AffineSubspace:
        w = ws.window(n)
        kern = kernel_basis(w.matrix, automaton.p)
        return AffineSubspace.from_point_subspace(
            np.zeros(kern.ambient, dtype=np.int64), kern
        )

    return ProjectiveAffineSequence(automaton.p, ws.ambient, level, ws.restriction)


# -- universal chains and extraction ----------------------------------------


@dataclass
class UniversalChain:
    """Images f_{n,m}(X_m) for m = n, n+1, ... until a plateau or cutoff.

    ``plateau`` is the first absolute index where ``plateau_k`` consecutive
    images compare equal; None means the cutoff was reached first."""

    start: int
    images: list
    plateau: Optional[int]
    plateau_k: int

    @property
    def stabilized(self) -> AffineSubspace:
        if self.plateau is None:
            raise StabilizationCutoffError(
                f"no plateau at level {self.start} within the computed images"
            )
        return self.images[self.plateau - self.start]

    def dims(self) -> list[int]:
        return [img.dim for img in self.images]

    def nonincreasing(self) -> bool:
        """Each image contains the next (set containment, checked exactly)."""
        for a, b in zip(self.images, self.images[1:]):
            if b.is_empty:
                continue
            if a.is_empty:
                return False
            if not a.contains(b.point):
                return False
            if not a.directions.contains_subspace(b.directions):
                return False
        return True


def universal_spaces(
    seq: ProjectiveAffineSequence, n: int, cutoff: int, plateau_k: int = 2
) -> UniversalChain:
    """Compute the image chain at level n up to the cutoff, stopping at the
    first run of ``plateau_k`` equal images."""
    if cutoff < n:
        raise ValueError("cutoff must be >= n")
    if plateau_k < 1:
        raise ValueError("plateau_k must be >= 1")
    images: list[AffineSubspace] = []
    plateau = None
    for m in range(n, cutoff + 1):
        x_m = seq.level(m)
        img = x_m if m == n else image_of_affine(seq.bond(n, m), x_m, seq.p)
        images.append(img)
        if len(images) >= plateau_k:
            run = images[-plateau_k:]
            if all(r == run[0] for r in run[1:]):
                plateau = m - plateau_k + 1
                break
    return UniversalChain(n, images, plateau, plateau_k)


def lift_element(
    seq: ProjectiveAffineSequence,
    n: int,
    x_n: np.ndarray,
    cutoff: int,
    plateau_k: int = 2,
    chains: Optional[dict] = None,
) -> np.ndarray:
    """Lift a universal element one level: returns x_{n+1} at level n+1 with
    bond(n, n+1) x_{n+1} = x_n, built by one affine solve at a witness level
    past both plateaus.  Raises StabilizationCutoffError when no plateau or
    no preimage is available within the cutoff."""
    chains = chains if chains is not None else {}
    for lev in (n, n + 1):
        if lev not in chains:
            chains[lev] = universal_spaces(seq, lev, cutoff, plateau_k)
        if chains[lev].plateau is None:
            raise StabilizationCutoffError(f"no plateau at level {lev} by cutoff {cutoff}")
    witness_level = max(chains[n].plateau, chains[n + 1].plateau, n + 1)
    fiber = constrain_affine(
        seq.level(witness_level), seq.bond(n, witness_level), x_n, seq.p
    )
    if fiber.is_empty:
        raise StabilizationCutoffError(
            f"element at level {n} has no preimage at witness level {witness_level}"
        )
    z = fiber.point
    x_next = matmul(seq.bond(n + 1, witness_level), z.reshape(-1, 1), seq.p).reshape(-1)
    check = matmul(seq.bond(n, n + 1), x_next.reshape(-1, 1), seq.p).reshape(-1)
    if not np.array_equal(check, x_n):
        raise AssertionError("lift violated its one-step restriction equation")
    return x_next


@dataclass
class ExtractionResult:
    """Outcome of a limit-prefix extraction.

    status 'ok' carries the level-N vector and the full compatible chain;
    'empty-level' certifies the first empty level (a hard negative for the
    originating question); 'cutoff' is inconclusive."""

    status: str
    prefix: Optional[np.ndarray] = None
    level_points: list = field(default_factory=list)
    chains: dict = field(default_factory=dict)
    lift_checks: list = field(default_factory=list)
    empty_level: Optional[int] = None
    detail: str = ""

    def chains_nonincreasing(self) -> bool:
        return all(chain.nonincreasing() for chain in self.chains.values())


def extract_limit_prefix(
    seq: ProjectiveAffineSequence, n_max: int, cutoff: int, plateau_k: int = 2
) -> ExtractionResult:
    """Extract a compatible chain x_0 <- x_1 <- ... <- x_{n_max} through the
    stabilized levels; successive restrictions agree by construction and are
    re-checked on every lift."""
    if cutoff < n_max:
        raise ValueError("cutoff must be at least the requested level")
    chains: dict[int, UniversalChain] = {}

    def first_empty_level() -> Optional[int]:
        for m in range(cutoff + 1):
            if seq.level(m).is_empty:
                return m
        return None

    for lev in range(n_max + 1):
        if seq.level(lev).is_empty:
            return ExtractionResult(
                "empty-level", empty_level=lev, chains=chains,
                detail=f"level {lev} is empty",
            )
        chains[lev] = universal_spaces(seq, lev, cutoff, plateau_k)
        if any(img.is_empty for img in chains[lev].images):
            return ExtractionResult(
                "empty-level", empty_level=first_empty_level(), chains=chains,
                detail="an image in the universal chain is empty",
            )
        if chains[lev].plateau is None:
            return ExtractionResult(
                "cutoff", chains=chains,
                detail=f"no plateau at level {lev} by cutoff {cutoff}",
            )
    x = np.array(chains[0].stabilized.point, dtype=np.int64)
    points = [x]
    lift_checks: list[bool] = []
    for n in range(n_max):
        try:
            x = lift_element(seq, n, x, cutoff, plateau_k, chains)
        except StabilizationCutoffError as exc:
            return ExtractionResult(
                "cutoff", level_points=points, chains=chains,
                lift_checks=lift_checks, detail=str(exc),
            )
        lift_checks.append(True)
        points.append(x)
    return ExtractionResult(
        "ok", prefix=points[-1], level_points=points, chains=chains,
        lift_checks=lift_checks,
    )


# -- inverse synthesis -------------------------------------------------------


@dataclass
class ReversibilityCertificate:
    """A synthesized inverse rule plus its two exact composition transcripts."""

    automaton: LinearCA
    inverse: LinearCA
    radius: int
    left_composition: LinearCA
    right_composition: LinearCA

    def verify(self) -> bool:
        left = compose(self.inverse, self.automaton)
        right = compose(self.automaton, self.inverse)
        return (
            equals_identity(left)
            and equals_identity(right)
            and left == self.left_composition
            and right == self.right_composition
        )


@dataclass
class KernelWitness:
    """A nonzero configuration mapped to zero: certifies non-injectivity."""

    automaton: LinearCA
    config: Configuration

    def verify(self) -> bool:
        from .ca import ConstantConfig, config_equal, zero_config

        ca = self.automaton
        if isinstance(self.config, PeriodicConfig):
            nonzero = any(np.any(v) for v in self.config.values)
        elif isinstance(self.config, ConstantConfig):
            nonzero = bool(np.any(self.config.value))
        else:
            nonzero = bool(self.config.cells)
        image = ca.apply_config(self.config)
        return nonzero and config_equal(ca.group, ca.dim_v, image, zero_config())


@dataclass
class EmptyFiberWitness:
    """A window pattern with empty fiber: certifies a global target (any
    configuration extending the pattern) lies outside the image."""

    automaton: LinearCA
    level: int
    window_cells: tuple
    pattern: Pattern

    def verify(self) -> bool:
        ws = WindowSystem(self.automaton)
        w = ws.window(self.level)
        if w.target != self.window_cells:
            return False
        vec = pattern_to_vec(self.pattern, w.target, self.automaton.dim_v, self.automaton.p)
        fiber = solve_affine(w.matrix, vec, self.automaton.p)
        # Independent consistency check: augmenting must raise the rank.
        r_plain = linalg.rank(w.matrix, self.automaton.p)
        r_aug = linalg.rank(np.hstack([w.matrix, vec.reshape(-1, 1)]), self.automaton.p)
        return fiber.is_empty and r_aug == r_plain + 1


@dataclass
class NotInvertible:
    witness: Union[KernelWitness, EmptyFiberWitness]


@dataclass
class SolverUnknown:
    reason: str


InvertResult = Union[ReversibilityCertificate, NotInvertible, SolverUnknown]


def _solve_left_inverse(ca: LinearCA, candidates: tuple) -> Optional[list]:
    """Blocks of a rule nu with memory ``candidates`` and nu o ca = identity,
    or None.  The defining equations, transposed, share one coefficient
    matrix across the dimV right-hand-side columns, so a single elimination
    answers all of them."""
    d = ca.dim_v
    p = ca.p
    g = ca.group
    if d == 0:
        return [np.zeros((0, 0), dtype=np.int64) for _ in candidates]
    prods: dict = {}
    for wi, w in enumerate(candidates):
        for m, bm in zip(ca.memory, ca.blocks):
            u = g.multiply(w, m)
            prods.setdefault(u, []).append((wi, bm))
    us = g.sort_elements(prods)
    uindex = {u: i for i, u in enumerate(us)}
    coeff = np.zeros((d * len(us), d * len(candidates)), dtype=np.int64)
    for u, pairs in prods.items():
        ui = uindex[u]
        for wi, bm in pairs:
            blockview = coeff[ui * d : (ui + 1) * d, wi * d : (wi + 1) * d]
            blockview += bm.T
    coeff %= p
    rhs = np.zeros((d * len(us), d), dtype=np.int64)
    e = g.identity()
    ei = uindex[e]
    rhs[ei * d : (ei + 1) * d] = np.eye(d, dtype=np.int64)
    _, points = solve_affine_multi(coeff, rhs, p)
    if any(pt is None for pt in points):
        return None
    stacked = np.stack(points, axis=1)
    return [
        stacked[wi * d : (wi + 1) * d, :].T % p for wi in range(len(candidates))
    ]


def _support_kernel_witness(ca: LinearCA, radius: int) -> Optional[FiniteSupportConfig]:
    """Nonzero kernel configuration supported in the radius ball, if any."""
    g = ca.group
    d = ca.dim_v
    cells = g.ball(radius)
    if d == 0 or not cells:
        return None
    rows_cells = g.sort_elements(
        {g.multiply(w, g.inverse(m)) for w in cells for m in ca.memory}
    )
    pos = {h: j for j, h in enumerate(cells)}
    mat = np.zeros((d * len(rows_cells), d * len(cells)), dtype=np.int64)
    for ri, cell in enumerate(rows_cells):
        for m, bm in zip(ca.memory, ca.blocks):
            j = pos.get(g.multiply(cell, m))
            if j is not None:
                mat[ri * d : (ri + 1) * d, j * d : (j + 1) * d] += bm
    kern = kernel_basis(mat % ca.p, ca.p)
    if kern.dim == 0:
        return None
    vec = kern.basis[0]
    config = finite_support(
        ca.p, d, {cell: vec[j * d : (j + 1) * d] for j, cell in enumerate(cells)}
    )
    if not config.cells:
        return None
    return config


def _constant_kernel_witness(ca: LinearCA):
    """Nonzero constant kernel configuration (valid on every group)."""
    if ca.dim_v == 0:
        return None
    total = np.zeros((ca.dim_v, ca.dim_v), dtype=np.int64)
    for b in ca.blocks:
        total = (total + b) % ca.p
    kern = kernel_basis(total, ca.p)
    if kern.dim == 0:
        return None
    from .ca import constant

    return constant(ca.p, ca.dim_v, kern.basis[0])


def _periodic_kernel_witness(ca: LinearCA, q: int) -> Optional[PeriodicConfig]:
    """Nonzero q-periodic kernel configuration on the integers, if any."""
    if not isinstance(ca.group, IntegerGroup) or ca.dim_v == 0:
        return None
    d = ca.dim_v
    mat = np.zeros((d * q, d * q), dtype=np.int64)
    for i in range(q):
        for m, bm in zip(ca.memory, ca.blocks):
            j = (i + m) % q
            mat[i * d : (i + 1) * d, j * d : (j + 1) * d] += bm
    kern = kernel_basis(mat % ca.p, ca.p)
    if kern.dim == 0:
        return None
    vec = kern.basis[0]
    return periodic(ca.p, d, [vec[i * d : (i + 1) * d] for i in range(q)])


def kernel_witness(
    ca: LinearCA, support_bound: int = 4, period_bound: int = 4
) -> Optional[Configuration]:
    """Search for a nonzero configuration in the kernel: finitely supported
    ones on growing balls first, then periodic ones on the integers.  Any
    returned witness is re-verified exactly; None is inconclusive."""
    for radius in range(support_bound + 1):
        w = _support_kernel_witness(ca, radius)
        if w is not None and KernelWitness(ca, w).verify():
            return w
    # On the integers the period-1 search subsumes constants; elsewhere the
    # constant family is the only group-agnostic periodic analogue.
    if not isinstance(ca.group, IntegerGroup):
        w = _constant_kernel_witness(ca)
        if w is not None and KernelWitness(ca, w).verify():
            return w
    for q in range(1, period_bound + 1):
        w = _periodic_kernel_witness(ca, q)
        if w is not None and KernelWitness(ca, w).verify():
            return w
    return None


def _window_fiber_counterexample(
    ca: LinearCA, n: int, ws: Optional[WindowSystem] = None
) -> Optional[EmptyFiberWitness]:
    """A pattern on B_n outside the image of the window map, if the window
    map is not surjective."""
    ws = ws or WindowSystem(ca)
    w = ws.window(n)
    out_dim = w.matrix.shape[0]
    if out_dim == 0:
        return None
    _, pivots, rk = linalg.rref(w.matrix.T, ca.p)
    if rk == out_dim:
        return None
    missing = next(j for j in range(out_dim) if j not in set(pivots))
    vec = np.zeros(out_dim, dtype=np.int64)
    vec[missing] = 1
    witness = EmptyFiberWitness(
        ca, n, w.target, vec_to_pattern(vec, w.target, ca.dim_v)
    )
    if not witness.verify():
        return None
    return witness


def surjectivity_counterexample(
    ca: LinearCA, max_radius: int = 6
) -> Optional[EmptyFiberWitness]:
    """Scan window maps for a rank deficiency; any pattern outside a window
    image certifies non-surjectivity of the global map.  None is
    inconclusive."""
    ws = WindowSystem(ca)
    prev = None
    for n in range(max_radius + 1):
        w = ws.window(n)
        if prev is not None and w.source == prev:
            break
        prev = w.source
        found = _window_fiber_counterexample(ca, n, ws)
        if found is not None:
            return found
    return None


def invert_ca(ca: LinearCA, max_radius: int = 8) -> InvertResult:
    """Decide reversibility by exact search.

    For each radius the solver poses the left-inverse system over blocks
    with memory in the radius ball; a solution is accepted only if both
    compositions equal the identity rule.  Between attempts it looks for
    kernel witnesses and window-fiber counterexamples, either of which
    certifies non-invertibility.  If the automaton is reversible, some
    finite radius succeeds; Unknown is only returned at the cutoff."""
    balls = BallSequence(ca.group, 0)
    ws = WindowSystem(ca)
    prev_ball = None
    left_inverse: Optional[LinearCA] = None
    for n in range(max_radius + 1):
        cand = balls.window(n)
        if cand == prev_ball:
            break  # finite group saturated: the search space is exhausted
        prev_ball = cand
        if left_inverse is None:
            blocks = _solve_left_inverse(ca, cand)
            if blocks is not None:
                nu = LinearCA(ca.group, ca.p, ca.dim_v, cand, blocks)
                left = compose(nu, ca)
                right = compose(ca, nu)
                if equals_identity(left) and equals_identity(right):
                    return ReversibilityCertificate(ca, nu, n, left, right)
                # A left inverse exists, so the map is injective but not
                # surjective; only a fiber witness can certify that.
                left_inverse = nu
        if left_inverse is None:
            w = _support_kernel_witness(ca, n)
            if w is not None and KernelWitness(ca, w).verify():
                return NotInvertible(KernelWitness(ca, w))
            if not isinstance(ca.group, IntegerGroup):
                wc = _constant_kernel_witness(ca)
                if wc is not None and KernelWitness(ca, wc).verify():
                    return NotInvertible(KernelWitness(ca, wc))
            wp = _periodic_kernel_witness(ca, n + 1)
            if wp is not None and KernelWitness(ca, wp).verify():
                return NotInvertible(KernelWitness(ca, wp))
        fiber = _window_fiber_counterexample(ca, n, ws)
        if fiber is not None:
            return NotInvertible(fiber)
    if left_inverse is not None:
        return SolverUnknown(
            "a left inverse exists but no surjectivity counterexample was found "
            f"within radius {max_radius}"
        )
    return SolverUnknown(f"no verdict within radius {max_radius}")


# -- preimage extraction ------------------------------------------------------


@dataclass
class PreimageResult:
    """Outcome of preimage extraction on a window.

    'ok' carries a pattern on A_N whose image matches the target on B_N
    exactly; 'not-in-image' carries a verified empty-fiber witness;
    'unknown' means the stabilization cutoff was hit."""

    status: str
    pattern: Optional[Pattern] = None
    window_cells: tuple = ()
    matched_cells: tuple = ()
    witness: Optional[EmptyFiberWitness] = None
    extraction: Optional[ExtractionResult] = None


def preimage_extract(
    ca: LinearCA,
    target: Configuration,
    window_index: int = 4,
    cutoff: int = 12,
    plateau_k: int = 2,
) -> PreimageResult:
    """Extract a window preimage of the target configuration through the
    projective sequence of window fibers."""
    ws = WindowSystem(ca)
    seq = preimage_sequence(ws, target)
    result = extract_limit_prefix(seq, window_index, cutoff, plateau_k)
    if result.status == "empty-level":
        m = result.empty_level
        w = ws.window(m)
        witness = EmptyFiberWitness(
            ca,
            m,
            w.target,
            vec_to_pattern(ws.target_vec(target, m), w.target, ca.dim_v),
        )
        if not witness.verify():
            raise AssertionError("empty level failed its independent verification")
        return PreimageResult("not-in-image", witness=witness, extraction=result)
    if result.status != "ok":
        return PreimageResult("unknown", extraction=result)
    w = ws.window(window_index)
    pattern = vec_to_pattern(result.prefix, w.source, ca.dim_v)
    image = matmul(w.matrix, result.prefix.reshape(-1, 1), ca.p).reshape(-1)
    if not np.array_equal(image, ws.target_vec(target, window_index)):
        raise AssertionError("extracted prefix does not match the target window")
    return PreimageResult(
        "ok",
        pattern=pattern,
        window_cells=w.source,
        matched_cells=w.target,
        extraction=result,
    )
