"""Measure averaging and the finite search for translation witnesses.

The central move: averaging an almost-multiplicative map phi against a
probability measure mu,

    psi_mu(x) = sum_y mu(y) phi(xy) phi(y)*,

produces a map that is positive definite whenever mu is invariant (on a
finite group: the uniform measure) and stays close to phi when phi's
defect is small.  The block constructions at the bottom stack a finite
window F of the group into one operator so that hull membership of the
stacked target is exactly the translation-witness statement checked by
:func:`find_translation_witness`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup, GroupHandle, IntegerLattice, ProbMeasure, folner_box
from .operators import direct_sum
from .repmaps import MapDomainError, OperatorMap, gram_block


def average_map(phi: OperatorMap, mu: ProbMeasure, domain=None) -> OperatorMap:
    """Average phi against mu: psi(x) = sum_y mu(y) phi(xy) phi(y)*.

    The output domain defaults to phi's; for ball-supported maps pass the
    smaller window you actually need, since every product xy with x in
    the output domain and y in supp(mu) must lie inside phi's domain.
    The summation order is the fixed support order of mu, so results are
    bit-stable.  For unitary-valued phi the identity value is pinned to
    I exactly (termwise phi(y)phi(y)* = I).
    """
    group = phi.group
    if domain is None:
        domain = phi.domain
    domain = tuple(domain)
    for y in mu.support:
        if y not in phi:
            raise MapDomainError(f"support element {y!r} is outside phi's domain")
    y_idx = np.array([phi.index[y] for y in mu.support])
    v_star = phi.stack[y_idx].conj().transpose(0, 2, 1)
    values = {}
    for x in domain:
        xy_idx = []
        for y in mu.support:
            xy = group.mul(x, y)
            if xy not in phi:
                raise MapDomainError(
                    f"product of {x!r} and {y!r} leaves phi's domain; "
                    "enlarge the ball or shrink the output domain"
                )
            xy_idx.append(phi.index[xy])
        values[x] = np.einsum(
            "n,nij,njk->ik", mu.weights, phi.stack[np.array(xy_idx)], v_star
        )
    psi = OperatorMap(group, domain, values, info={"construction": "averaged"})
    e = group.identity
    if e in psi.index and phi.is_unitary():
        pinned = dict(zip(psi.domain, psi.stack))
        pinned[e] = np.eye(phi.dim, dtype=np.complex128)
        psi = OperatorMap(group, domain, pinned, info=psi.info)
    return psi


def amenable_correction(phi: OperatorMap) -> OperatorMap:
    """Uniform average over a finite group: the canonical pd correction.

    The uniform measure is the unique invariant mean of a finite group,
    so the averaged map is positive definite on every sample, and for
    unitary phi with defect eps it stays within eps of phi (each term
    phi(xy)phi(y)* is within eps of phi(x)).
    """
    if not isinstance(phi.group, FiniteGroup):
        raise ValueError("amenable_correction averages over a finite group")
    if set(phi.domain) != set(phi.group.elements()):
        raise MapDomainError("amenable_correction needs phi on the whole group")
    return average_map(phi, ProbMeasure.uniform(phi.group.elements()))


# ---------------------------------------------------------------------------
# vector families and the translation witness search


@dataclass(frozen=True)
class VectorFamily:
    """Finitely many vector-valued functions on a window F.

    ``vectors[i, k]`` is the value of the i-th function at ``F[k]``, a
    vector in C^d.
    """

    F: tuple
    vectors: np.ndarray  # shape (n, |F|, d)

    def __post_init__(self) -> None:
        v = np.asarray(self.vectors, dtype=np.complex128)
        if v.ndim != 3 or v.shape[1] != len(self.F):
            raise ValueError(f"vectors must have shape (n, |F|, d), got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[2]

    def stacked(self) -> np.ndarray:
        """Each function flattened to one vector in C^(|F| d)."""
        return self.vectors.reshape(self.n, -1)


def random_vector_family(F, n: int, dim: int, rng: np.random.Generator) -> VectorFamily:
    """n functions on F whose values are independent random unit vectors."""
    F = tuple(F)
    v = rng.standard_normal((n, len(F), dim)) + 1j * rng.standard_normal((n, len(F), dim))
    v /= np.linalg.norm(v, axis=2, keepdims=True)
    return VectorFamily(F, v)


@dataclass(frozen=True)
class WitnessSearchResult:
    """Outcome of scanning for a y with LHS(y) <= RHS(y).

    LHS(y) sums ||phi(xy)phi(y)* xi_i(x) - psi(x) xi_i(x)||^2 and RHS(y)
    sums ||phi(xy)phi(y)* xi_i(x) - zeta_i(x)||^2 over i and x in F.  The
    recorded lhs/rhs are the sums at the witness, or at the smallest-gap
    y when the scan fails.
    """

    witness_y: object | None
    lhs: float
    rhs: float
    scanned: tuple

    @property
    def found(self) -> bool:
        return self.witness_y is not None


def _translate_blocks(phi: OperatorMap, F, scan) -> np.ndarray:
    """Array a[s, k] = phi(F[k] * scan[s]) phi(scan[s])* of shape (S, |F|, d, d)."""
    group = phi.group
    y_idx = np.array([phi.index[y] for y in scan])
    v_star = phi.stack[y_idx].conj().transpose(0, 2, 1)  # (S, d, d)
    xy_idx = np.empty((len(scan), len(F)), dtype=int)
    for s, y in enumerate(scan):
        for k, x in enumerate(F):
            xy = group.mul(x, y)
            if xy not in phi:
                raise MapDomainError(f"product of {x!r} and {y!r} leaves phi's domain")
            xy_idx[s, k] = phi.index[xy]
    return np.einsum("skij,sjl->skil", phi.stack[xy_idx], v_star)


def find_translation_witness(
    phi: OperatorMap,
    psi: OperatorMap,
    xi_family: VectorFamily,
    zeta_family: VectorFamily,
    scan,
) -> WitnessSearchResult:
    """First y in scan order whose translate beats the target family.

    Equality counts as a witness, so the degenerate choice
    zeta_i(x) = psi(x) xi_i(x) always succeeds at the first scanned y.
    """
    if xi_family.F != zeta_family.F:
        raise ValueError("both families must share the window F")
    if xi_family.n != zeta_family.n or xi_family.dim != zeta_family.dim:
        raise ValueError("family shapes must match")
    if phi.dim != psi.dim or phi.dim != xi_family.dim:
        raise ValueError("map and family dimensions must match")
    scan = tuple(scan)
    if not scan:
        raise ValueError("scan must be nonempty")
    F = xi_family.F
    for y in scan:
        if y not in phi:
            raise MapDomainError(f"scan element {y!r} is outside phi's domain")
    blocks = _translate_blocks(phi, F, scan)  # (S, |F|, d, d)
    xi = xi_family.vectors  # (n, |F|, d)
    moved = np.einsum("skij,nkj->snki", blocks, xi)  # phi(xy)phi(y)* xi_i(x)
    psi_f = np.stack([psi(x) for x in F])  # (|F|, d, d)
    target = np.einsum("kij,nkj->nki", psi_f, xi)  # psi(x) xi_i(x)
    lhs = np.sum(np.abs(moved - target[None]) ** 2, axis=(1, 2, 3))
    rhs = np.sum(np.abs(moved - zeta_family.vectors[None]) ** 2, axis=(1, 2, 3))
    for s, y in enumerate(scan):
        if lhs[s] <= rhs[s]:
            return WitnessSearchResult(
                witness_y=y, lhs=float(lhs[s]), rhs=float(rhs[s]), scanned=scan
            )
    best = int(np.argmin(lhs - rhs))
    return WitnessSearchResult(
        witness_y=None, lhs=float(lhs[best]), rhs=float(rhs[best]), scanned=scan
    )


# ---------------------------------------------------------------------------
# block constructions on the stacked space  ⊕_{x in F} C^d


def snapshot_block(phi: OperatorMap, F):
    """Translate snapshots as block operators on the stacked space.

    Returns y -> block-diagonal operator with x-block phi(xy)phi(y)*, so
    applying it to a stacked family (xi(x))_{x in F} moves every window
    position by the same y.  For a genuine representation the blocks are
    phi(x), independent of y.
    """
    F = tuple(F)
    group = phi.group

    def block(y) -> np.ndarray:
        if y not in phi:
            raise MapDomainError(f"{y!r} is outside phi's domain")
        v_star = phi(y).conj().T
        parts = []
        for x in F:
            xy = group.mul(x, y)
            if xy not in phi:
                raise MapDomainError(f"product of {x!r} and {y!r} leaves phi's domain")
            parts.append(phi(xy) @ v_star)
        return direct_sum(parts)

    return block


def target_block(psi: OperatorMap, F) -> np.ndarray:
    """Block-diagonal operator with x-block psi(x) on the stacked space."""
    return direct_sum([psi(x) for x in F])


def embed_direct_sum(maps) -> OperatorMap:
    """Pointwise direct sum of maps with a shared group and domain.

    Averaging commutes with this embedding block by block, so corrected
    summands can be recovered exactly by compressing the corrected sum.
    """
    maps = list(maps)
    if not maps:
        raise ValueError("embed_direct_sum needs at least one map")
    first = maps[0]
    for m in maps[1:]:
        if m.group is not first.group and m.group.describe() != first.group.describe():
            raise MapDomainError("all maps must live on the same group")
        if m.domain != first.domain:
            raise MapDomainError("all maps must share the same domain")
    if len(maps) == 1:
        return first
    values = {x: direct_sum([m(x) for m in maps]) for x in first.domain}
    return OperatorMap(first.group, first.domain, values, info={"construction": "direct-sum"})


# ---------------------------------------------------------------------------
# Folner-box averaging on lattices


@dataclass(frozen=True)
class FolnerReport:
    """Averaged maps over growing boxes and their Cauchy increments.

    A finite box is only approximately invariant, so the final Gram
    block is only approximately Hermitian; the report carries the min
    eigenvalue of its Hermitian part together with the measured
    asymmetry rather than pretending the truncation away.
    """

    radii: tuple[int, ...]
    increments: tuple[float, ...]  # increments[k] = max_x ||psi_{r+1}(x) - psi_r(x)||
    window: tuple
    gram_sample: tuple
    gram_min_eig: float
    gram_asymmetry: float

    def to_json(self, group: GroupHandle) -> dict:
        return {
            "radii": list(self.radii),
            "increments": list(self.increments),
            "window": [group.element_to_json(x) for x in self.window],
            "gram_sample": [group.element_to_json(x) for x in self.gram_sample],
            "gram_min_eig": self.gram_min_eig,
            "gram_asymmetry": self.gram_asymmetry,
        }


def folner_convergence_experiment(
    phi: OperatorMap,
    radii,
    window,
    gram_sample=None,
) -> tuple[FolnerReport, OperatorMap]:
    """Average phi over boxes of growing radius and watch the increments.

    For each listed radius r the map is averaged against the uniform
    measures on the boxes of radius r and r+1, restricted to the fixed
    window, and the increment max_{x in window} ||psi_{r+1}(x) - psi_r(x)||
    is recorded.  Vanishing increments are the desk-scale shadow of
    convergence along a Folner sequence.  Returns the report and the
    final averaged map (at radius max(radii) + 1).
    """
    group = phi.group
    if not isinstance(group, IntegerLattice):
        raise ValueError("folner_convergence_experiment runs on integer lattices")
    radii = tuple(int(r) for r in radii)
    if not radii or any(r < 0 for r in radii):
        raise ValueError("radii must be nonnegative")
    window = tuple(window)
    averaged: dict[int, OperatorMap] = {}

    def psi_at(r: int) -> OperatorMap:
        if r not in averaged:
            averaged[r] = average_map(phi, folner_box(group.dim, r), domain=window)
        return averaged[r]

    increments = []
    for r in radii:
        a, b = psi_at(r), psi_at(r + 1)
        increments.append(
            max(float(np.linalg.norm(b(x) - a(x), 2)) for x in window)
        )
    final = psi_at(max(radii) + 1)
    if gram_sample is None:
        # greedily pick window elements whose pairwise quotients stay inside
        picked: list = []
        for x in window:
            trial = picked + [x]
            if all(
                group.mul(group.inv(a), b) in final for a in trial for b in trial
            ):
                picked = trial
            if len(picked) == 3:
                break
        gram_sample = picked
    gram_sample = tuple(gram_sample)
    g = gram_block(final, gram_sample).matrix
    asym = float(np.linalg.norm(g - g.conj().T, 2))
    min_eig = float(np.linalg.eigvalsh((g + g.conj().T) / 2.0)[0])
    report = FolnerReport(
        radii=radii,
        increments=tuple(increments),
        window=window,
        gram_sample=gram_sample,
        gram_min_eig=min_eig,
        gram_asymmetry=asym,
    )
    return report, final
