"""Lattice bases and approximate closest-vector solvers.

A lattice is represented by a square full-rank matrix whose columns are the
basis vectors.  The solvers form a quality ladder: naive coefficient rounding,
the Babai nearest-plane walk, both optionally preceded by LLL reduction, a
greedy coordinate descent refinement, and an exhaustive search usable as an
oracle in low dimension.

Rounding convention: ties at half-integers round away from zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from time import perf_counter

import numpy as np

LLL_DELTA_DEFAULT = 0.99
LLL_REFRESH_EVERY = 64
GREEDY_MAX_MOVES = 10_000
BRUTE_FORCE_MAX_DIM = 12
BRUTE_FORCE_RADIUS_DEFAULT = 4
RANK_TOL = 1e-10

# small slack on the exact-arithmetic definitions of the reduction conditions,
# everything here runs in float64
SIZE_REDUCTION_SLACK = 1e-9


class IterationCapError(RuntimeError):
    """A solver exceeded its iteration budget."""


class BoxBoundaryWarning(UserWarning):
    """Exhaustive search found its optimum on the search-box boundary."""


def round_half_away(x):
    """Nearest integer, halves away from zero: 1.5 -> 2, -1.5 -> -2."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


@dataclass(frozen=True)
class LatticeBasis:
    """Columns of `columns` generate the lattice; must be square, full rank."""

    columns: np.ndarray

    def __post_init__(self):
        b = np.array(self.columns, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError(f"basis must be square, got shape {b.shape}")
        sv = np.linalg.svd(b, compute_uv=False)
        if sv[-1] <= RANK_TOL * sv[0]:
            raise ValueError(
                f"basis is numerically rank deficient: "
                f"singular value ratio {sv[-1] / sv[0]:.3e}"
            )
        b.flags.writeable = False
        object.__setattr__(self, "columns", b)

    @property
    def dim(self) -> int:
        return self.columns.shape[0]


@dataclass(frozen=True)
class GramSchmidtData:
    """Gram-Schmidt profile of a basis.

    star_sq[i] is the squared length of the i-th orthogonalized vector,
    mu[i, j] (strictly lower triangular) the projection coefficient of basis
    vector i on orthogonalized vector j, and frame holds the orthonormalized
    directions as columns.
    """

    star_sq: np.ndarray
    mu: np.ndarray
    frame: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.star_sq, dtype=float)
        m = np.asarray(self.mu, dtype=float)
        f = np.asarray(self.frame, dtype=float)
        d = s.size
        if m.shape != (d, d) or f.shape != (d, d):
            raise ValueError("inconsistent Gram-Schmidt data shapes")
        if np.any(s <= 0):
            raise ValueError("orthogonalized vectors must have positive length")
        if np.abs(np.triu(m)).max() > 0:
            raise ValueError("mu must be strictly lower triangular")
        for a in (s, m, f):
            a.flags.writeable = False
        object.__setattr__(self, "star_sq", s)
        object.__setattr__(self, "mu", m)
        object.__setattr__(self, "frame", f)

    @property
    def dim(self) -> int:
        return self.star_sq.size

    def r_matrix(self) -> np.ndarray:
        """Upper-triangular factor: basis = frame @ R, R[i, i] = |b*_i|."""
        d = self.dim
        r = (self.mu + np.eye(d)).T * np.sqrt(self.star_sq)[:, None]
        return np.triu(r)


@dataclass(frozen=True)
class CvpInstance:
    """A closest-vector problem: minimize |basis @ k - target| over integer k."""

    basis: LatticeBasis
    target: np.ndarray

    def __post_init__(self):
        t = np.array(self.target, dtype=float)
        if t.shape != (self.basis.dim,):
            raise ValueError(
                f"target shape {t.shape} does not match basis dimension {self.basis.dim}"
            )
        t.flags.writeable = False
        object.__setattr__(self, "target", t)

    def point(self, coeffs: np.ndarray) -> np.ndarray:
        return self.basis.columns @ np.asarray(coeffs, dtype=float)

    def distance(self, coeffs: np.ndarray) -> float:
        return float(np.linalg.norm(self.point(coeffs) - self.target))


def gram_schmidt(basis: LatticeBasis) -> GramSchmidtData:
    """Gram-Schmidt profile via QR, diagonal of R made positive."""
    q, r = np.linalg.qr(basis.columns)
    flip = np.sign(np.diag(r))
    flip[flip == 0] = 1.0
    q = q * flip
    r = r * flip[:, None]
    diag = np.diag(r)
    mu = np.tril(r.T / diag, -1)
    data = GramSchmidtData(diag**2, mu, q)
    scale = max(np.abs(basis.columns).max(), 1.0)
    dev = np.abs(q @ data.r_matrix() - basis.columns).max()
    if dev > 1e-9 * scale:
        raise ArithmeticError(f"Gram-Schmidt reconstruction off by {dev:.3e}")
    return data


def _gs_profile(b: np.ndarray):
    """star_sq and mu of the columns of b, without constructing types."""
    q, r = np.linalg.qr(b)
    diag = np.diag(r).copy()
    sign = np.sign(diag)
    sign[sign == 0] = 1.0
    r = r * sign[:, None]
    diag = np.abs(diag)
    mu = np.tril(r.T / diag, -1)
    return diag**2, mu


def lll_reduce_with_transform(basis: LatticeBasis, delta: float = LLL_DELTA_DEFAULT):
    """LLL reduction returning (reduced basis, integer transform U).

    The returned transform satisfies reduced.columns == basis.columns @ U with
    U unimodular; it is accumulated in exact integer arithmetic.  Raises
    IterationCapError after 10 * dim**2 swaps.
    """
    if not (0.25 < delta <= 1.0):
        raise ValueError(f"delta must lie in (1/4, 1], got {delta}")
    d = basis.dim
    b = np.array(basis.columns, dtype=float)
    star, mu = _gs_profile(b)
    u = np.eye(d, dtype=object)  # Python ints, no overflow
    swap_cap = 10 * d * d
    swaps = 0
    k = 1
    while k < d:
        for j in range(k - 1, -1, -1):
            r = int(round_half_away(mu[k, j]))
            if r != 0:
                b[:, k] -= r * b[:, j]
                u[:, k] -= r * u[:, j]
                mu[k, :j] -= r * mu[j, :j]
                mu[k, j] -= r
        if delta * star[k - 1] <= star[k] + mu[k, k - 1] ** 2 * star[k - 1]:
            k += 1
            continue
        swaps += 1
        if swaps > swap_cap:
            raise IterationCapError(
                f"LLL exceeded {swap_cap} swaps at dimension {d} (delta={delta}); "
                "basis may be pathological"
            )
        b[:, [k - 1, k]] = b[:, [k, k - 1]]
        u[:, [k - 1, k]] = u[:, [k, k - 1]]
        if swaps % LLL_REFRESH_EVERY == 0:
            # periodic re-orthogonalization bounds floating-point drift
            star, mu = _gs_profile(b)
        else:
            nu = mu[k, k - 1]
            big = star[k] + nu * nu * star[k - 1]
            mu_new = nu * star[k - 1] / big
            star[k] = star[k - 1] * star[k] / big
            star[k - 1] = big
            mu[k, k - 1] = mu_new
            mu[[k - 1, k], : k - 1] = mu[[k, k - 1], : k - 1]
            for i in range(k + 1, d):
                t = mu[i, k]
                mu[i, k] = mu[i, k - 1] - nu * t
                mu[i, k - 1] = t + mu_new * mu[i, k]
        k = max(k - 1, 1)
    return LatticeBasis(b), u


def lll_reduce(basis: LatticeBasis, delta: float = LLL_DELTA_DEFAULT) -> LatticeBasis:
    reduced, _ = lll_reduce_with_transform(basis, delta)
    return reduced


def integer_determinant(matrix) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    m = [[int(x) for x in row] for row in np.asarray(matrix)]
    n = len(m)
    sign = 1
    prev = 1
    for col in range(n - 1):
        if m[col][col] == 0:
            pivot = next((r for r in range(col + 1, n) if m[r][col] != 0), None)
            if pivot is None:
                return 0
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        for i in range(col + 1, n):
            for j in range(col + 1, n):
                m[i][j] = (m[i][j] * m[col][col] - m[i][col] * m[col][j]) // prev
        prev = m[col][col]
    return sign * m[n - 1][n - 1]


def naive_round(instance: CvpInstance) -> np.ndarray:
    """Round the coefficients of the target in the given basis."""
    c = np.linalg.solve(instance.basis.columns, instance.target)
    return round_half_away(c).astype(np.int64)


def babai_nearest_plane(instance: CvpInstance, gs: GramSchmidtData) -> np.ndarray:
    """Babai's nearest-plane walk, one rounding per Gram-Schmidt level.

    The returned point is within (1/2) * sqrt(sum star_sq) of the target.
    """
    if gs.dim != instance.basis.dim:
        raise ValueError("Gram-Schmidt data does not match instance dimension")
    r = gs.r_matrix()
    y = gs.frame.T @ instance.target
    d = gs.dim
    c = np.zeros(d, dtype=np.int64)
    for i in range(d - 1, -1, -1):
        resid = y[i] - r[i, i + 1 :] @ c[i + 1 :]
        c[i] = int(round_half_away(resid / r[i, i]))
    return c


def greedy_descent(instance: CvpInstance, seed_coeffs: np.ndarray) -> np.ndarray:
    """Coordinate descent from a seed lattice point.

    Each move shifts one coefficient by the integer minimizing the distance
    along that basis direction, taking the best direction available; stops
    when no single-direction move improves, errs after GREEDY_MAX_MOVES.
    """
    b = instance.basis.columns
    c = np.array(seed_coeffs, dtype=np.int64).copy()
    norms_sq = np.sum(b * b, axis=0)
    resid = b @ c.astype(float) - instance.target
    for _ in range(GREEDY_MAX_MOVES):
        g = 2.0 * (b.T @ resid)
        step = round_half_away(-g / (2.0 * norms_sq))
        gain = step * g + norms_sq * step * step
        i = int(np.argmin(gain))
        # strict decrease required, guards against half-integer tie cycling
        if not gain[i] < -1e-12 * max(1.0, float(resid @ resid)):
            return c
        c[i] += int(step[i])
        resid += step[i] * b[:, i]
    raise IterationCapError(f"greedy descent did not converge in {GREEDY_MAX_MOVES} moves")


def brute_force_cvp(
    instance: CvpInstance, radius: int = BRUTE_FORCE_RADIUS_DEFAULT
) -> np.ndarray:
    """Exhaustive search in a coefficient box around the naive rounding point.

    Only intended as an oracle: refuses dimensions above BRUTE_FORCE_MAX_DIM.
    Warns with BoxBoundaryWarning when the optimum sits on the box boundary,
    in which case a larger radius may improve it.
    """
    d = instance.basis.dim
    if d > BRUTE_FORCE_MAX_DIM:
        raise ValueError(
            f"exhaustive search limited to dimension {BRUTE_FORCE_MAX_DIM}, got {d}; "
            "use babai/greedy for larger instances"
        )
    if radius < 1:
        raise ValueError("radius must be at least 1")
    center = naive_round(instance)
    b = instance.basis.columns
    width = 2 * radius + 1
    total = width**d
    best_dist = np.inf
    best_offset = None
    chunk = 1 << 17
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        offsets = np.stack(np.unravel_index(idx, (width,) * d), axis=1) - radius
        pts = (center + offsets) @ b.T
        dist = np.sum((pts - instance.target) ** 2, axis=1)
        j = int(np.argmin(dist))
        if dist[j] < best_dist:
            best_dist = float(dist[j])
            best_offset = offsets[j].copy()
    if np.any(np.abs(best_offset) == radius):
        warnings.warn(
            f"optimum on the boundary of the radius-{radius} box; "
            "re-run with a larger radius to confirm",
            BoxBoundaryWarning,
            stacklevel=2,
        )
    return (center + best_offset).astype(np.int64)


def covering_radius_bound(gs: GramSchmidtData) -> float:
    """Every target is within this distance of the lattice (Babai guarantee)."""
    return 0.5 * float(np.sqrt(np.sum(gs.star_sq)))


def plateau_estimate(gs: GramSchmidtData) -> float:
    """Expected distance to the lattice for a generic far target.

    Treats the residual in each Gram-Schmidt direction as uniform over a cell,
    giving sqrt(sum star_sq / 12) on average, times 2*pi when the caller works
    in the angle convention; here the bare pi/sqrt(3) * sqrt(sum star_sq) form
    is returned, matching targets measured in angle units.
    """
    return float(np.pi / np.sqrt(3.0) * np.sqrt(np.sum(gs.star_sq)))


@dataclass(frozen=True)
class LadderEntry:
    method: str
    coeffs: np.ndarray
    distance: float
    seconds: float


def method_ladder(instance: CvpInstance, radius: int | None = None, delta: float = LLL_DELTA_DEFAULT):
    """Run the solver ladder on one instance, cheapest to strongest.

    Covers naive rounding, Babai on the raw basis, Babai on the LLL basis,
    greedy refinement of the latter, and, when the dimension permits, the
    exhaustive oracle (run on the reduced basis so the search box is tight).
    """
    results = []
    t0 = perf_counter()

    def add(name, coeffs):
        results.append(
            LadderEntry(
                name,
                np.asarray(coeffs, dtype=np.int64),
                instance.distance(coeffs),
                perf_counter() - t0,
            )
        )

    add("naive", naive_round(instance))
    t0 = perf_counter()
    add("babai", babai_nearest_plane(instance, gram_schmidt(instance.basis)))
    t0 = perf_counter()
    reduced, transform = lll_reduce_with_transform(instance.basis, delta)
    red_gs = gram_schmidt(reduced)
    red_instance = CvpInstance(reduced, instance.target)
    u = transform.astype(np.int64)
    c = babai_nearest_plane(red_instance, red_gs)
    add("lll+babai", u @ c)
    t0 = perf_counter()
    add("lll+babai+greedy", u @ greedy_descent(red_instance, c))
    if instance.basis.dim <= BRUTE_FORCE_MAX_DIM:
        t0 = perf_counter()
        kwargs = {} if radius is None else {"radius": radius}
        add("brute-force", u @ brute_force_cvp(red_instance, **kwargs))
    return results
