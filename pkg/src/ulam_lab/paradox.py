"""Quantitative obstructions to invariant measures on the free group.

The free group F2 splits into four first-letter pieces which two
translates reassemble into two full copies of the group.  For any
probability measure that forces total translate mass 2 against total
piece mass at most 1, so the "Tarski defect" below is at least 1 — no
measure on F2 is even approximately invariant.  On Z^2 the story
reverses: uniform boxes have defect 2/(2r+1), and a small LP finds the
best measure supported on a ball.  The two columns side by side are the
amenable/nonamenable dichotomy at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .groups import (
    FreeGroup,
    GroupHandle,
    IntegerLattice,
    ProbMeasure,
    Word,
)
from .simplex import LinProgResult, linprog_simplex

MAX_FREE_RADIUS = 5
MAX_LATTICE_RADIUS = 8


@dataclass(frozen=True)
class ParadoxicalDecomposition:
    """Disjoint pieces whose translates tile the group twice over.

    ``pieces_a[j]`` and ``pieces_b[k]`` are membership predicates on
    reduced words; ``translates_s[j] * pieces_a[j]`` must partition the
    group, and likewise for the b-side.  More than two pieces per side
    are allowed.
    """

    pieces_a: tuple[Callable[[Word], bool], ...]
    pieces_b: tuple[Callable[[Word], bool], ...]
    translates_s: tuple[Word, ...]
    translates_t: tuple[Word, ...]
    labels_a: tuple[str, ...] = ()
    labels_b: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.pieces_a) != len(self.translates_s):
            raise ValueError("need one translate per a-side piece")
        if len(self.pieces_b) != len(self.translates_t):
            raise ValueError("need one translate per b-side piece")
        if not self.labels_a:
            object.__setattr__(
                self, "labels_a", tuple(f"A{j + 1}" for j in range(len(self.pieces_a)))
            )
        if not self.labels_b:
            object.__setattr__(
                self, "labels_b", tuple(f"B{k + 1}" for k in range(len(self.pieces_b)))
            )

    def classify(self, w: Word) -> str | None:
        """Label of the first piece containing w, or None (e.g. for e)."""
        for label, piece in zip(self.labels_a + self.labels_b, self.pieces_a + self.pieces_b):
            if piece(w):
                return label
        return None

    def verify_on_ball(self, rank: int, r: int) -> dict[str, bool]:
        """Check disjointness and translate-covering on the ball B_r."""
        ball = FreeGroup(rank).ball(r)
        pieces = self.pieces_a + self.pieces_b
        hits = np.array([[p(w) for w in ball] for p in pieces])
        report = {"pieces_disjoint": bool((hits.sum(axis=0) <= 1).all())}
        for side, pieces_side, trans in (
            ("a", self.pieces_a, self.translates_s),
            ("b", self.pieces_b, self.translates_t),
        ):
            in_translate = np.array(
                [[p(s.inverse() * w) for w in ball] for p, s in zip(pieces_side, trans)]
            )
            counts = in_translate.sum(axis=0)
            report[f"translates_{side}_disjoint"] = bool((counts <= 1).all())
            report[f"translates_{side}_cover"] = bool((counts >= 1).all())
        return report


def _first_letter_predicate(gen: int, exp: int) -> Callable[[Word], bool]:
    def predicate(w: Word) -> bool:
        return w.first_letter() == (gen, exp)

    return predicate


def standard_f2_decomposition() -> ParadoxicalDecomposition:
    """The classical first-letter decomposition of F2.

    Pieces: words starting with a, a^-1, b, b^-1 (the identity belongs
    to none — only the translates must cover).  Since a * W(a^-1) is
    exactly the complement of W(a), each translate pair partitions the
    whole group.
    """
    e = Word()
    a = Word.generator(0)
    b = Word.generator(1)
    return ParadoxicalDecomposition(
        pieces_a=(_first_letter_predicate(0, 1), _first_letter_predicate(0, -1)),
        pieces_b=(_first_letter_predicate(1, 1), _first_letter_predicate(1, -1)),
        translates_s=(e, a),
        translates_t=(e, b),
    )


def _check_word_support(mu: ProbMeasure) -> None:
    for y in mu.support:
        if not isinstance(y, Word):
            raise ValueError(f"support element {y!r} is not a reduced word")


def mean_coefficient(mu: ProbMeasure, s: Word, predicate: Callable[[Word], bool]) -> float:
    """mu(sA) = sum_y mu(y) * [s^-1 y in A] for a piece predicate A."""
    _check_word_support(mu)
    s_inv = s.inverse()
    return float(sum(w for y, w in mu.items() if predicate(s_inv * y)))


def _difference_matrix(support, dec: ParadoxicalDecomposition) -> np.ndarray:
    """Row per piece: indicator(s^-1 y in piece) - indicator(y in piece)."""
    support = list(support)
    rows = []
    for piece, s in zip(
        dec.pieces_a + dec.pieces_b, dec.translates_s + dec.translates_t
    ):
        s_inv = s.inverse()
        translated = np.array([piece(s_inv * y) for y in support], dtype=float)
        plain = np.array([piece(y) for y in support], dtype=float)
        rows.append(translated - plain)
    return np.array(rows)


def tarski_defect(mu: ProbMeasure, dec: ParadoxicalDecomposition | None = None) -> float:
    """sum_j |mu(s_j A_j) - mu(A_j)| + sum_k |mu(t_k B_k) - mu(B_k)|.

    Always >= 1: the translate masses sum to exactly 2 (each translate
    family partitions the group) while the piece masses sum to at most 1
    (disjointness), so the absolute differences cannot all be small.
    """
    if dec is None:
        dec = standard_f2_decomposition()
    _check_word_support(mu)
    diffs = _difference_matrix(mu.support, dec) @ mu.weights
    return float(np.abs(diffs).sum())


def tarski_defect_sweep(
    support,
    n_measures: int,
    seed: int,
    dec: ParadoxicalDecomposition | None = None,
    chunk: int = 1000,
) -> np.ndarray:
    """Defects of seed-deterministic Dirichlet(1,..,1) measures on a support.

    Vectorized over measures so a 10^4-measure sweep over a radius-6
    ball stays fast; returns the full defect array for inspection.
    """
    if dec is None:
        dec = standard_f2_decomposition()
    support = list(support)
    diff = _difference_matrix(support, dec)  # (pieces, m)
    rng = np.random.default_rng(seed)
    out = np.empty(n_measures)
    done = 0
    alpha = np.ones(len(support))
    while done < n_measures:
        take = min(chunk, n_measures - done)
        w = rng.dirichlet(alpha, size=take)  # (take, m)
        out[done : done + take] = np.abs(w @ diff.T).sum(axis=1)
        done += take
    return out


# ---------------------------------------------------------------------------
# LP-minimized invariance defect on a ball


@dataclass(frozen=True)
class InvarianceDefectResult:
    """Optimal value and optimizer of min over mu of max_s ||s mu - mu||_1."""

    value: float
    measure: ProbMeasure
    radius: int
    group: str
    lp_iterations: int

    def to_json(self, group: GroupHandle) -> dict:
        return {
            "value": self.value,
            "radius": self.radius,
            "group": self.group,
            "lp_iterations": self.lp_iterations,
            "support_size": len(self.measure.support),
        }


def min_invariance_defect(group: GroupHandle, r: int) -> InvarianceDefectResult:
    """Best approximately invariant measure supported on the r-ball.

    Minimizes max over generators s of ||s mu - mu||_1 as a dense LP.
    Inverse generators are omitted from the max because left translation
    by s and s^-1 move the same total mass (substitute z -> sz in the
    sum).  Writing P_s = {w in ball : sw in ball} and E_s for the rest,
    ||s mu - mu||_1 = 2 * sum_{w in P_s} max(0, mu_w - mu_{sw})
                    + 2 * sum_{w in E_s} mu_w,
    which the LP linearizes with one auxiliary variable per (s, w) in
    P_s and an epigraph bound t.  Infeasibility is impossible (a point
    mass is feasible); a solver failure raises instead of guessing.
    """
    if isinstance(group, FreeGroup):
        if r > MAX_FREE_RADIUS:
            raise ValueError(f"free-group radius capped at {MAX_FREE_RADIUS}, got {r}")
    elif isinstance(group, IntegerLattice):
        if r > MAX_LATTICE_RADIUS:
            raise ValueError(f"lattice radius capped at {MAX_LATTICE_RADIUS}, got {r}")
    else:
        raise ValueError("min_invariance_defect supports free groups and lattices")
    if r < 0:
        raise ValueError("radius must be >= 0")

    ball = group.ball(r)
    index = {w: i for i, w in enumerate(ball)}
    m = len(ball)
    generators = group.generators()

    paired: list[list[tuple[int, int]]] = []  # per generator: (w index, sw index)
    escapes: list[list[int]] = []  # per generator: w indices with sw outside
    for s in generators:
        inside, outside = [], []
        for w in ball:
            sw = group.mul(s, w)
            j = index.get(sw)
            if j is None:
                outside.append(index[w])
            else:
                inside.append((index[w], j))
        paired.append(inside)
        escapes.append(outside)

    n_aux = sum(len(p) for p in paired)
    n_vars = m + 1 + n_aux  # [mu, t, aux]
    t_col = m
    c = np.zeros(n_vars)
    c[t_col] = 1.0

    n_rows = n_aux + len(generators)
    a_ub = np.zeros((n_rows, n_vars))
    b_ub = np.zeros(n_rows)
    row = 0
    aux = m + 1
    for g, s in enumerate(generators):
        sum_row = n_aux + g
        a_ub[sum_row, t_col] = -1.0
        for w_i in escapes[g]:
            a_ub[sum_row, w_i] += 2.0
        for w_i, sw_i in paired[g]:
            # aux >= mu_w - mu_{sw}
            a_ub[row, w_i] = 1.0
            a_ub[row, sw_i] -= 1.0
            a_ub[row, aux] = -1.0
            a_ub[sum_row, aux] = 2.0
            row += 1
            aux += 1

    a_eq = np.zeros((1, n_vars))
    a_eq[0, :m] = 1.0
    b_eq = np.array([1.0])

    result: LinProgResult = linprog_simplex(c, a_ub, b_ub, a_eq, b_eq)
    if not result.ok:
        raise RuntimeError(f"invariance-defect LP did not converge: {result.status}")
    weights = np.clip(result.x[:m], 0.0, None)
    weights = weights / weights.sum()
    return InvarianceDefectResult(
        value=float(result.value),
        measure=ProbMeasure(tuple(ball), weights),
        radius=r,
        group=group.describe(),
        lp_iterations=result.iterations,
    )
