"""Nearest-point projection onto convex hulls and operator-hull membership.

Membership of a target in the convex hull of finitely many points of a
real Hilbert space is decided by actually computing the nearest hull
point (Wolfe's min-norm-point method), which yields convex weights, the
distance, and — when the target is outside — a separating witness: the
projection itself, which every hull point is strictly closer to than to
the target.  Operator hulls are handled by vectorizing d x d complex
matrices into R^(2 d^2), where the Frobenius inner product turns the
operator question into the point question; on bounded sets in finite
dimensions this decides membership for every operator topology worth
having, while the vector-family checks below keep faith with operators
acting on actual vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import ProbMeasure
from .operators import as_operator, operator_to_json
from .repmaps import OperatorMap

MEMBERSHIP_TOL = 1e-7

ITERATION_CAP = 10_000

# slack for the variational-inequality certificate, per unit scale^2
_CERT_SLACK = 1e-9

# termination slack for Wolfe's improving-vertex test, per unit scale^2
_TERM_SLACK = 1e-13

_DROP_WEIGHT = 1e-14


class ProjectionError(RuntimeError):
    """Projection failed to certify within the iteration cap."""


@dataclass(frozen=True)
class ProjectionResult:
    """Nearest point of a hull to a target, as convex weights."""

    member: bool
    distance: float
    weights: ProbMeasure  # over point indices
    projection: np.ndarray
    witness: np.ndarray | None  # present iff not member
    iterations: int
    method: str

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "distance": self.distance,
            "weights": {str(i): float(w) for i, w in self.weights.items()},
            "projection": self.projection.tolist(),
            "witness": None if self.witness is None else self.witness.tolist(),
            "iterations": self.iterations,
            "method": self.method,
        }


def _affine_minimizer(q: np.ndarray) -> np.ndarray:
    """Coefficients alpha (sum 1) minimizing ||sum alpha_i q_i||.

    Stationarity of the Lagrangian gives a bordered Gram system; lstsq
    keeps affinely dependent corrals from blowing up.
    """
    k = q.shape[0]
    m = np.zeros((k + 1, k + 1))
    m[:k, :k] = q @ q.T
    m[:k, k] = 1.0
    m[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(m, rhs)
        if not np.all(np.isfinite(sol)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(m, rhs, rcond=None)[0]
    return sol[:k]


def _certified(q: np.ndarray, x: np.ndarray, slack: float) -> bool:
    """Variational inequality: no q_j improves on x beyond slack."""
    return float(np.min(q @ x)) >= float(x @ x) - slack


def _min_norm_point_wolfe(q: np.ndarray, scale_sq: float) -> tuple[np.ndarray, int] | None:
    """Wolfe's major/minor cycle for the min-norm point of conv(rows of q)."""
    m = q.shape[0]
    norms_sq = np.einsum("ij,ij->i", q, q)
    corral = [int(np.argmin(norms_sq))]
    lam = np.array([1.0])
    term_slack = _TERM_SLACK * scale_sq
    iterations = 0
    while iterations < ITERATION_CAP:
        iterations += 1
        x = lam @ q[corral]
        j_star = int(np.argmin(q @ x))
        if float(q[j_star] @ x) >= float(x @ x) - term_slack:
            break
        if j_star in corral:
            break  # numeric stall; the certificate check decides below
        corral.append(j_star)
        lam = np.append(lam, 0.0)
        # minor cycles: pull the affine minimizer back into the simplex
        while iterations < ITERATION_CAP:
            iterations += 1
            alpha = _affine_minimizer(q[corral])
            if np.all(alpha > _DROP_WEIGHT):
                lam = alpha
                break
            neg = alpha <= _DROP_WEIGHT
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg, lam / (lam - alpha), np.inf)
            theta = float(np.min(ratios))
            theta = min(max(theta, 0.0), 1.0)
            lam = (1.0 - theta) * lam + theta * alpha
            lam[lam <= _DROP_WEIGHT] = 0.0
            keep = lam > 0.0
            if keep.all():
                # degenerate step made no removal; force out the worst entry
                drop = int(np.argmin(lam))
                keep[drop] = False
            corral = [c for c, k in zip(corral, keep) if k]
            lam = lam[keep]
            if not corral:
                return None
            lam = lam / lam.sum()
    full = np.zeros(m)
    full[corral] = lam
    return full, iterations


def _frank_wolfe(q: np.ndarray, scale_sq: float) -> tuple[np.ndarray, int]:
    """Conditional-gradient fallback with exact line search."""
    m = q.shape[0]
    norms_sq = np.einsum("ij,ij->i", q, q)
    lam = np.zeros(m)
    lam[int(np.argmin(norms_sq))] = 1.0
    x = lam @ q
    gap_slack = _TERM_SLACK * scale_sq
    for it in range(ITERATION_CAP):
        scores = q @ x
        j = int(np.argmin(scores))
        direction = q[j] - x
        gap = float(-direction @ x)
        if gap <= gap_slack:
            return lam, it + 1
        denom = float(direction @ direction)
        if denom <= 0.0:
            return lam, it + 1
        theta = min(max(gap / denom, 0.0), 1.0)
        lam *= 1.0 - theta
        lam[j] += theta
        x = lam @ q
    return lam, ITERATION_CAP


def project_onto_hull(points, target, tol: float = MEMBERSHIP_TOL) -> ProjectionResult:
    """Nearest point of conv(points) to the target, with certificates.

    Every return is checked: the weights are a probability vector
    reproducing the projection, and the variational inequality
    <p_i - proj, target - proj> <= slack holds for all i.  When the
    distance exceeds tol the projection doubles as the separating
    witness and its strict domination over the target is verified
    pointwise; any failure raises ProjectionError rather than returning
    a silent wrong answer.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError(f"points must be a nonempty (m, dim) array, got {points.shape}")
    target = np.asarray(target, dtype=float)
    if target.shape != (points.shape[1],):
        raise ValueError(
            f"target shape {target.shape} does not match ambient dim {points.shape[1]}"
        )
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    q = points - target
    scale_sq = 1.0 + float(np.max(np.einsum("ij,ij->i", q, q)))
    cert_slack = _CERT_SLACK * scale_sq

    def candidates():
        wolfe = _min_norm_point_wolfe(q, scale_sq)
        if wolfe is not None:
            yield ("wolfe", *wolfe)
        yield ("frank-wolfe", *_frank_wolfe(q, scale_sq))

    for method, lam, iterations in candidates():
        lam = np.where(lam < 0.0, 0.0, lam)
        total = lam.sum()
        if not np.isfinite(total) or total <= 0.0:
            continue
        lam = lam / total
        x = lam @ q
        if not _certified(q, x, cert_slack):
            continue
        projection = lam @ points
        distance = float(np.linalg.norm(projection - target))
        member = distance <= tol
        witness = None
        if not member:
            gap = np.einsum("ij,ij->i", q, q) - np.einsum(
                "ij,ij->i", points - projection, points - projection
            )
            # ||p - target||^2 - ||p - proj||^2 >= dist^2 up to certificate slack
            if np.min(gap) < distance**2 - 2.0 * cert_slack or np.min(gap) <= 0.0:
                raise ProjectionError(
                    "projection found but the separating witness fails strict "
                    f"domination (worst margin {float(np.min(gap)):.3e})"
                )
            witness = projection
        support = np.flatnonzero(lam > 0.0)
        weights = ProbMeasure(tuple(int(i) for i in support), lam[support])
        return ProjectionResult(
            member=member,
            distance=distance,
            weights=weights,
            projection=projection,
            witness=witness,
            iterations=iterations,
            method=method,
        )
    raise ProjectionError(
        f"no method certified the projection within {ITERATION_CAP} iterations"
    )


def median_witness_index(points, xi, eta, slack: float = 1e-12) -> int | None:
    """First point index at least as close to xi as to eta, if any.

    The index certifies that the hull is not strictly separated from xi
    by the median hyperplane of (xi, eta); ties resolve to the first
    index for determinism.
    """
    points = np.asarray(points, dtype=float)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    d_xi = np.linalg.norm(points - xi, axis=1)
    d_eta = np.linalg.norm(points - eta, axis=1)
    hits = np.flatnonzero(d_xi <= d_eta + slack)
    return int(hits[0]) if hits.size else None


# ---------------------------------------------------------------------------
# operator hulls


def vectorize_operator(a: np.ndarray) -> np.ndarray:
    """Flatten a complex matrix to R^(2 d^2), preserving Frobenius geometry."""
    a = np.asarray(a, dtype=np.complex128)
    return np.concatenate([a.real.ravel(), a.imag.ravel()])


def unvectorize_operator(v: np.ndarray, dim: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    half = dim * dim
    return v[:half].reshape(dim, dim) + 1j * v[half:].reshape(dim, dim)


@dataclass(frozen=True)
class HullCheckResult:
    """Membership verdict for an operator hull plus the family evidence.

    For members, ``witness_rate`` is the fraction of random
    vector-family trials in which some x satisfied
    sum_i ||phi(x) xi_i - T xi_i||^2 <= sum_i ||phi(x) xi_i - eta_i||^2.
    For non-members the constructed refuting family (xi_i the standard
    basis, eta_i the columns of the hull projection) defeats every x by
    at least ``refutation_margin``.
    """

    member: bool
    distance: float
    weights: ProbMeasure
    projection: np.ndarray
    labels: tuple
    trials: int
    witness_rate: float | None
    refuting_xi: np.ndarray | None
    refuting_eta: np.ndarray | None
    refutation_margin: float | None

    @property
    def verdicts_agree(self) -> bool:
        if self.member:
            return self.witness_rate == 1.0
        return self.refutation_margin is not None and self.refutation_margin > 0.0

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "distance": self.distance,
            "weights": {str(l): float(w) for l, w in zip_labels(self.labels, self.weights)},
            "projection": operator_to_json(self.projection),
            "trials": self.trials,
            "witness_rate": self.witness_rate,
            "refutation_margin": self.refutation_margin,
            "verdicts_agree": self.verdicts_agree,
        }


def zip_labels(labels, weights: ProbMeasure):
    for i, w in weights.items():
        yield labels[i], w


def _family_witness_gap(stack: np.ndarray, target: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Per-x value of RHS - LHS for the family inequality (>= 0 means witness)."""
    moved = np.einsum("xij,nj->xni", stack, xi)
    lhs = np.sum(np.abs(moved - np.einsum("ij,nj->ni", target, xi)[None]) ** 2, axis=(1, 2))
    rhs = np.sum(np.abs(moved - eta[None]) ** 2, axis=(1, 2))
    return rhs - lhs


def operator_hull_check(
    phi,
    target,
    *,
    seed: int,
    trials: int = 200,
    n_max: int = 3,
    tol: float = MEMBERSHIP_TOL,
) -> HullCheckResult:
    """Decide hull membership of a target operator and test it on vectors.

    ``phi`` is an OperatorMap or a sequence of equal-dimension square
    matrices.  Membership is computed in the Frobenius vectorization;
    the verdict is then exercised against operator action: members must
    produce a translation witness for every random family trial, and
    non-members come with a constructed family that every phi(x)
    strictly fails, margin at least distance^2 minus certificate slack.
    """
    if isinstance(phi, OperatorMap):
        labels = phi.domain
        stack = phi.stack
    else:
        mats = [as_operator(a) for a in phi]
        labels = tuple(range(len(mats)))
        stack = np.stack(mats)
    target = as_operator(target)
    d = target.shape[0]
    if stack.shape[1] != d:
        raise ValueError(f"dimension mismatch: points {stack.shape[1]}, target {d}")
    if trials < 1:
        raise ValueError("trials must be >= 1")

    points = np.stack([vectorize_operator(a) for a in stack])
    proj = project_onto_hull(points, vectorize_operator(target), tol=tol)
    projection_op = unvectorize_operator(proj.projection, d)

    rng = np.random.default_rng(seed)
    if proj.member:
        found = 0
        for _ in range(trials):
            n = int(rng.integers(1, n_max + 1))
            xi = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
            xi /= np.linalg.norm(xi, axis=1, keepdims=True)
            eta = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
            eta /= np.linalg.norm(eta, axis=1, keepdims=True)
            gaps = _family_witness_gap(stack, target, xi, eta)
            if float(np.max(gaps)) >= 0.0:
                found += 1
        return HullCheckResult(
            member=True,
            distance=proj.distance,
            weights=proj.weights,
            projection=projection_op,
            labels=labels,
            trials=trials,
            witness_rate=found / trials,
            refuting_xi=None,
            refuting_eta=None,
            refutation_margin=None,
        )

    # refuting family: xi_i = e_i, eta_i = columns of the projection; the
    # stacked geometry is then exactly the Frobenius geometry, so every x
    # fails by ||phi(x)-T||_F^2 - ||phi(x)-P||_F^2 >= distance^2 - slack
    xi = np.eye(d, dtype=np.complex128)
    eta = projection_op.T.copy()  # row n holds P e_n
    gaps = _family_witness_gap(stack, target, xi, eta)
    margin = float(-np.max(gaps))
    if margin <= 0.0:
        raise ProjectionError(
            "constructed refuting family failed to defeat every point "
            f"(worst gap {float(np.max(gaps)):.3e} >= 0)"
        )
    return HullCheckResult(
        member=False,
        distance=proj.distance,
        weights=proj.weights,
        projection=projection_op,
        labels=labels,
        trials=trials,
        witness_rate=None,
        refuting_xi=xi,
        refuting_eta=eta,
        refutation_margin=margin,
    )
