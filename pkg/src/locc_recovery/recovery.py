"""Synthesis and verification of auxiliary pairs that recover lost entanglement.

Given ``psi ≺ phi`` (so ``psi -> phi`` deterministically under LOCC), a
recovery pair ``(chi, omega)`` of dimension ``k`` satisfies
``psi⊗chi ≺ phi⊗omega`` together with ``E(omega) > E(chi)``. Every pair built
here is obtained from some ``chi`` by moving weight from one of its entries
(the donor) to a smaller one (the receiver), and every result is re-checked
by :func:`verify_recovery` before it is returned.

Entry and prefix indices are 1-based throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterator, List, Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyRegion,
    NotApplicable,
    NotARecovery,
    NotARecoveryReason,
    NotConvertibleError,
    NotFeasibleAtZero,
    SearchExhausted,
)
from .genpairs import SplitMix64, sorted_simplex_block
from .majorization import (
    MajorizationReport,
    PairKind,
    classify_report,
    majorize,
    majorize_arrays,
    majorizes_rows,
)
from .spectra import (
    DEFAULT_EQ_TOL,
    SchmidtVector,
    TolLike,
    as_tol,
    entropy,
    make_schmidt,
    tensor_array,
    tensor_rows,
    tensor_spectrum,
)


@dataclass(frozen=True)
class Perturbation:
    """How ``omega`` was derived from ``chi``."""

    perturbed_index: int
    receiver_index: int
    epsilon: float
    epsilon_max: float


@dataclass(frozen=True)
class RecoveryPair:
    chi: SchmidtVector
    omega: SchmidtVector
    k: int
    perturbation: Optional[Perturbation] = None

    def __post_init__(self):
        if not (self.chi.dim == self.omega.dim == self.k):
            raise DimensionMismatch(
                f"chi has dimension {self.chi.dim}, omega {self.omega.dim}, k={self.k}"
            )


@dataclass(frozen=True)
class RecoveryCertificate:
    """Verified evidence that ``psi⊗chi -> phi⊗omega`` recovers entanglement.

    ``recovered`` and ``loss`` are in nats. ``efficient_bound`` is the
    smallest auxiliary dimension not ruled out by the end-point equalities of
    the parent pair.
    """

    psi: SchmidtVector
    phi: SchmidtVector
    pair: RecoveryPair
    report: MajorizationReport
    recovered: float
    loss: float
    genuine: bool
    efficient_bound: int

    @property
    def k(self) -> int:
        return self.pair.k

    @property
    def efficient(self) -> bool:
        return self.pair.k == self.efficient_bound


@dataclass(frozen=True)
class Found:
    certificate: RecoveryCertificate


@dataclass(frozen=True)
class ImpossibleAtDim:
    k: int
    reason: str


@dataclass(frozen=True)
class OpenProblem:
    reason: str


@dataclass(frozen=True)
class NotConvertible:
    reason: str = "source spectrum is not majorized by the target spectrum"


RecoveryOutcome = Union[Found, ImpossibleAtDim, OpenProblem, NotConvertible]

TRAILING_OPEN = (
    "the smallest Schmidt weights coincide (alpha_n == beta_n); whether any "
    "recovery exists in this case is an open problem"
)


@dataclass(frozen=True)
class RecoveryOptions:
    """Knobs shared by the constructions.

    ``epsilon_fraction`` scales the maximal feasible transfer; 1.0 returns the
    boundary point. ``min_epsilon`` is the smallest maximal transfer accepted
    as a witness, which keeps tolerance-level artefacts from passing.
    """

    tol: float = DEFAULT_EQ_TOL
    epsilon_fraction: float = 1.0
    bisect_tol: float = 1e-9
    max_iter: int = 200
    min_epsilon: float = 1e-7
    heuristic: bool = False
    fallback_random: bool = True
    samples: int = 60_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.epsilon_fraction <= 1.0:
            raise ValueError("epsilon_fraction must lie in (0, 1]")


def _opts(opts: Optional[RecoveryOptions], tol: TolLike = None) -> RecoveryOptions:
    if opts is None:
        opts = RecoveryOptions()
    if tol is not None:
        opts = replace(opts, tol=as_tol(tol))
    return opts


def _transfer(chi: np.ndarray, donor: int, receiver: int, eps: float) -> np.ndarray:
    out = chi.copy()
    out[donor - 1] -= eps
    out[receiver - 1] += eps
    return -np.sort(-out, kind="stable")


def _require_convertible(psi: SchmidtVector, phi: SchmidtVector, eps: float) -> MajorizationReport:
    report = majorize(psi, phi, eps)
    if not report.holds:
        raise NotConvertibleError(
            f"psi is not majorized by phi (first violation at m={report.first_violation})"
        )
    return report


def dimension_lower_bound(psi: SchmidtVector, phi: SchmidtVector, tol: TolLike = None) -> int:
    """Smallest auxiliary dimension that is not excluded outright.

    Equal largest weights rule out dimension 2, as do equal smallest weights;
    both together rule out dimension 3 as well.
    """
    report = _require_convertible(psi, phi, as_tol(tol))
    delta = set(report.equality_indices)
    return 2 + (1 in delta) + (psi.dim - 1 in delta)


def verify_recovery(
    psi: SchmidtVector,
    phi: SchmidtVector,
    chi: SchmidtVector,
    omega: SchmidtVector,
    tol: TolLike = None,
) -> RecoveryCertificate:
    """Check a candidate pair from the spectra alone and return its certificate.

    Raises:
        DimensionMismatch: ``chi``/``omega`` or ``psi``/``phi`` differ in length.
        NotConvertibleError: ``psi`` is not majorized by ``phi``.
        NotARecovery: the product majorization fails, or ``omega`` is not
            more entangled than ``chi`` by more than ``tol``.
    """
    eps = as_tol(tol)
    if chi.dim != omega.dim:
        raise DimensionMismatch(f"chi has dimension {chi.dim}, omega {omega.dim}")
    base = _require_convertible(psi, phi, eps)
    report = majorize(tensor_spectrum(psi, chi), tensor_spectrum(phi, omega), eps)
    if not report.holds:
        raise NotARecovery(
            NotARecoveryReason.MAJORIZATION_FAILED,
            f"product prefix sum {report.first_violation} is violated",
        )
    recovered = entropy(omega) - entropy(chi)
    if recovered <= eps:
        raise NotARecovery(
            NotARecoveryReason.NO_ENTROPY_GAIN, f"E(omega) - E(chi) = {recovered!r}"
        )
    delta = set(base.equality_indices)
    n = psi.dim
    return RecoveryCertificate(
        psi=psi,
        phi=phi,
        pair=RecoveryPair(chi, omega, chi.dim),
        report=report,
        recovered=recovered,
        loss=entropy(psi) - entropy(phi),
        genuine=chi.dim < n,
        efficient_bound=2 + (1 in delta) + (n - 1 in delta),
    )


def critical_points_2x2(psi: SchmidtVector, phi: SchmidtVector, tol: TolLike = None) -> List[float]:
    """Values of ``p`` in ``(1/2, 1)`` where two entries of a product with ``(p, 1-p)`` cross.

    Between consecutive points the sorted order of both ``psi⊗(p, 1-p)`` and
    ``phi⊗(p, 1-p)`` is fixed.
    """
    eps = as_tol(tol)
    weights = sorted({x for x in itertools.chain(psi.values, phi.values) if x > 0.0})
    pts = sorted(v / (u + v) for u, v in itertools.combinations(weights, 2))
    out: List[float] = []
    for p in pts:
        if 0.5 + eps < p < 1.0 - eps and (not out or p - out[-1] > eps):
            out.append(p)
    return out


def interval_upper_bound_a(
    psi: SchmidtVector, phi: SchmidtVector, delta: Sequence[int], tol: TolLike = None
) -> float:
    """Right end ``a`` of the window ``(1/2, a)`` used for isolated interior equalities.

    For each segment ``(k_{j-1}, k_j]`` cut out by ``delta`` (with ``k_0 = 0``
    and ``k_{l+1} = n``), both parents contribute ``x_first / (x_first +
    x_last)``. A ratio equal to 1/2 (a flat segment) is doubled to 1 and so
    never binds. An empty ``delta`` gives 1.

    Raises:
        NotApplicable: ``delta`` is not the equality set of an isolated-interior pair.
    """
    eps = as_tol(tol)
    delta = tuple(sorted(delta))
    if not delta:
        return 1.0
    cls = classify_report(majorize(psi, phi, eps), psi.dim)
    if cls.kind is not PairKind.ISOLATED_INTERIOR or cls.delta != delta:
        raise NotApplicable(f"pair class is {cls.kind.value} with delta={list(cls.delta)}")
    n = psi.dim
    edges = [0, *delta, n]
    a = 1.0
    for lo, hi in zip(edges, edges[1:]):
        for vec in (psi, phi):
            first, last = vec[lo], vec[hi - 1]
            ratio = first / (first + last)
            if abs(ratio - 0.5) <= eps:
                ratio *= 2.0
            a = min(a, ratio)
    return a


def epsilon_max(
    psi: SchmidtVector,
    phi: SchmidtVector,
    chi: SchmidtVector,
    perturbed_index: int = 1,
    receiver_index: int = 2,
    tol: TolLike = None,
    bisect_tol: float = 1e-9,
    max_iter: int = 200,
) -> float:
    """Largest transfer ``eps`` from ``chi[donor]`` to ``chi[receiver]`` keeping the product majorization.

    Moving weight toward a smaller entry makes ``omega`` more mixed, so the
    prefix sums of ``phi⊗omega`` can only shrink as ``eps`` grows; the
    feasible transfers form an interval ``[0, eps*]``, found by bisection.
    The transfer is capped at half the donor-receiver gap.

    Raises:
        NotFeasibleAtZero: the product majorization fails with ``omega = chi``.
    """
    eps = as_tol(tol)
    if not 1 <= perturbed_index < receiver_index <= chi.dim:
        raise ValueError("need 1 <= perturbed_index < receiver_index <= k")
    a, b, c = psi.array, phi.array, chi.array
    left = tensor_array(a, c)

    def feasible(e: float) -> bool:
        right = tensor_array(b, _transfer(c, perturbed_index, receiver_index, e))
        return majorize_arrays(left, right, eps).holds

    if not feasible(0.0):
        raise NotFeasibleAtZero("psi⊗chi is not majorized by phi⊗chi")
    cap = (c[perturbed_index - 1] - c[receiver_index - 1]) / 2.0
    if cap <= 0.0:
        return 0.0
    if feasible(cap):
        return float(cap)
    lo, hi = 0.0, float(cap)
    for _ in range(max_iter):
        if hi - lo <= bisect_tol:
            break
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _finish(
    psi: SchmidtVector,
    phi: SchmidtVector,
    chi_arr: np.ndarray,
    donor: int,
    receiver: int,
    opts: RecoveryOptions,
) -> Optional[Found]:
    """Maximize the transfer at ``chi`` and certify; None when no usable transfer exists."""
    chi = make_schmidt(chi_arr, opts.tol)
    try:
        e_star = epsilon_max(
            psi, phi, chi, donor, receiver, opts.tol, opts.bisect_tol, opts.max_iter
        )
    except NotFeasibleAtZero:
        return None
    if e_star <= opts.min_epsilon:
        return None
    e_used = opts.epsilon_fraction * e_star
    omega = make_schmidt(_transfer(chi.array, donor, receiver, e_used), opts.tol)
    try:
        cert = verify_recovery(psi, phi, chi, omega, opts.tol)
    except NotARecovery:
        return None
    pert = Perturbation(donor, receiver, e_used, e_star)
    return Found(replace(cert, pair=replace(cert.pair, perturbation=pert)))


def _only_benign_equalities(
    psi: np.ndarray, phi: np.ndarray, chi: np.ndarray, donor: int, receiver: int, eps: float
) -> bool:
    """True when every prefix equality at ``omega = chi`` survives a small transfer."""
    left = np.cumsum(tensor_array(psi, chi))[:-1]
    base = np.cumsum(tensor_array(phi, chi))[:-1]
    diff = base - left
    if np.any(diff < -eps):
        return False
    eq = np.abs(diff) <= eps
    if not eq.any():
        return True
    headroom = (chi[donor - 1] - chi[receiver - 1]) / 2.0
    probe = min(eps * 1e3, headroom) / 2.0
    if probe <= 0.0:
        return False
    moved = np.cumsum(tensor_array(phi, _transfer(chi, donor, receiver, probe)))[:-1]
    return bool(np.all(np.abs(moved - left)[eq] <= eps))


def recover_2x2(
    psi: SchmidtVector,
    phi: SchmidtVector,
    opts: Optional[RecoveryOptions] = None,
    p: Optional[float] = None,
) -> Found:
    """Two-dimensional recovery for strictly majorized pairs or isolated interior equalities.

    The window ``(1/2, a)`` is cut at the crossing points of
    :func:`critical_points_2x2`; midpoints of the pieces are tried left to
    right, then the quarter points. The first ``chi = (p, 1-p)`` whose
    product majorization has only benign equalities is kept and ``omega =
    (p - eps, 1 - p + eps)`` with ``eps`` a fraction of the maximal transfer.
    Passing ``p`` skips the scan.

    Raises:
        NotApplicable: the pair is not StrictAll or IsolatedInterior.
        SearchExhausted: no candidate worked (a tolerance or code problem).
    """
    opts = _opts(opts)
    eps = opts.tol
    report = _require_convertible(psi, phi, eps)
    cls = classify_report(report, psi.dim)
    if cls.kind not in (PairKind.STRICT_ALL, PairKind.ISOLATED_INTERIOR):
        raise NotApplicable(f"2x2 construction needs StrictAll or IsolatedInterior, got {cls.kind.value}")
    a = interval_upper_bound_a(psi, phi, cls.delta, eps)
    if p is not None:
        if not 0.5 < p < 1.0:
            raise ValueError("p must lie in (1/2, 1)")
        rounds = [[p]]
    else:
        cuts = [x for x in critical_points_2x2(psi, phi, eps) if x < a]
        edges = [0.5, *cuts, a]
        pieces = list(zip(edges, edges[1:]))
        rounds = [
            [0.5 * (lo + hi) for lo, hi in pieces],
            [x for lo, hi in pieces for x in (0.75 * lo + 0.25 * hi, 0.25 * lo + 0.75 * hi)],
        ]
    pa, pb = psi.array, phi.array
    tried = 0
    for candidates in rounds:
        for q in candidates:
            tried += 1
            chi = np.array([q, 1.0 - q])
            if not _only_benign_equalities(pa, pb, chi, 1, 2, eps):
                continue
            found = _finish(psi, phi, chi, 1, 2, opts)
            if found is not None:
                return found
    raise SearchExhausted(f"no 2x2 witness among {tried} candidates in (1/2, {a!r})")


def _clip(poly: List[tuple], cp: float, cq: float, c0: float) -> List[tuple]:
    """Keep the part of a convex polygon where ``cp*p + cq*q + c0 >= 0``."""
    out: List[tuple] = []
    for i, cur in enumerate(poly):
        nxt = poly[(i + 1) % len(poly)]
        fc = cp * cur[0] + cq * cur[1] + c0
        fn = cp * nxt[0] + cq * nxt[1] + c0
        if fc >= 0.0:
            out.append(cur)
        if (fc >= 0.0) != (fn >= 0.0):
            t = fc / (fc - fn)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    return out


def _area(poly: List[tuple]) -> float:
    s = 0.0
    for i, (x0, y0) in enumerate(poly):
        x1, y1 = poly[(i + 1) % len(poly)]
        s += x0 * y1 - x1 * y0
    return abs(s) / 2.0


def delta1_region(psi: SchmidtVector, phi: SchmidtVector, tol: TolLike = None) -> List[tuple]:
    """Vertices of the ``(p, q)`` region used when only the first prefix is an equality.

    The ordered simplex ``p >= q >= 1-p-q >= 0`` is cut by ``q*a1 < p*a2``
    and either ``p*an < (1-p-q)*a2`` (when ``a1 > a2 > an``) or
    ``p*bn < (1-p-q)*b1`` (when ``a2 == an``).
    """
    eps = as_tol(tol)
    a1, a2, an = psi[0], psi[1], psi[-1]
    b1, bn = phi[0], phi[-1]
    poly = [(1.0, 0.0), (0.5, 0.5), (1.0 / 3.0, 1.0 / 3.0)]
    poly = _clip(poly, a2, -a1, 0.0)
    if a2 - an > eps:
        poly = _clip(poly, -(a2 + an), -a2, a2)
    else:
        poly = _clip(poly, -(b1 + bn), -b1, b1)
    return poly


def recover_3x3_delta1(psi: SchmidtVector, phi: SchmidtVector, opts: Optional[RecoveryOptions] = None) -> Found:
    """Three-dimensional recovery when the only prefix equality is at ``m = 1``.

    Uses the centroid of :func:`delta1_region` for ``chi = (p, q, 1-p-q)``,
    then points pulled from the centroid toward each vertex, and moves weight
    from the second entry to the third.

    The region is empty whenever ``a2**2 <= a1 * an``; 3x3 witnesses still
    exist there, typically with ``q`` close to ``1-p-q``, so the search
    continues with the ``k = 3`` candidates of :func:`recover_kxk`.

    Raises:
        NotApplicable: the equality set is not exactly ``{1}`` or ``n < 3``.
        EmptyRegion: the region is degenerate and the fallback found nothing.
        SearchExhausted: no point produced a witness.
    """
    opts = _opts(opts)
    eps = opts.tol
    report = _require_convertible(psi, phi, eps)
    if psi.dim < 3 or report.equality_indices != (1,):
        raise NotApplicable(
            f"3x3 construction needs delta == {{1}} and n >= 3, got {list(report.equality_indices)}"
        )
    poly = delta1_region(psi, phi, eps)
    empty = len(poly) < 3 or _area(poly) <= eps
    points: List[np.ndarray] = []
    if not empty:
        verts = np.array(poly)
        centre = verts.mean(axis=0)
        points = [centre] + [centre + t * (v - centre) for t in (0.5, 0.25, 0.75) for v in verts]
    for p, q in points:
        chi = np.array([p, q, 1.0 - p - q])
        found = _finish(psi, phi, chi, 2, 3, opts)
        if found is not None:
            return found
    try:
        outcome = recover_kxk(psi, phi, 3, opts)
    except SearchExhausted as exc:
        if empty:
            raise EmptyRegion(f"the (p, q) region has no interior and {exc}") from exc
        raise SearchExhausted(f"no 3x3 witness in the region ({len(points)} points); {exc}") from exc
    assert isinstance(outcome, Found)
    return outcome


def _comb_family(psi: np.ndarray, delta: Sequence[int], k: int, max_checks: int = 20_000) -> Iterator[np.ndarray]:
    """Deterministic ``chi`` candidates built from log-spacings of ``psi``.

    Think of ``log chi_j`` as teeth of a comb sliding over the ``log psi``
    axis. Prefix sums of ``psi⊗chi`` touch those of ``phi⊗chi`` only when
    every tooth sits in a stretch whose prefix index is an equality (or 0 or
    n). A transfer from ``chi_{k-1}`` to ``chi_k`` is blocked only if, in such
    a position, the last two teeth lie in different stretches. Keeping the
    last gap below every strict stretch leaves only the boundaries inside a
    run of equalities. Each one needs an earlier tooth parked over a strict
    stretch. The first ``k-2`` teeth are placed to cover all such boundaries
    at once.
    """
    n = psi.size
    if k < 2 or np.any(psi <= 0.0):
        return
    la = np.log(psi)
    closed = set(delta) | {0, n}
    bounds = [c for c in range(1, n) if c in closed and c - 1 in closed]
    # strict stretch for prefix index c spans (log a_{c+1}, log a_c]
    gaps = [(la[c], la[c - 1]) for c in range(1, n) if c not in closed and la[c - 1] > la[c]]
    if not gaps:
        return
    min_gap = min(hi - lo for lo, hi in gaps)
    windows = {c: [(la[c - 1] - hi, la[c - 1] - lo) for lo, hi in gaps if hi <= la[c - 1]] for c in bounds}
    ends = sorted({e for ws in windows.values() for w in ws for e in w if e > 0.0})
    options = []
    for lo, hi in zip(ends, ends[1:]):
        mid = 0.5 * (lo + hi)
        covered = frozenset(c for c in bounds if any(a < mid < b for a, b in windows[c]))
        if covered:
            options.append((mid, covered))
    teeth = k - 2
    need = set(bounds)
    checks = 0
    sizes = range(0, 1) if not need else range(1, teeth + 1)
    for r in sizes:
        for combo in itertools.combinations(options, r):
            checks += 1
            if checks > max_checks:
                return
            if set().union(*(cov for _, cov in combo)) != need:
                continue
            spacings = sorted((d for d, _ in combo), reverse=True)
            for shrink in (4.0, 16.0):
                last = min_gap / shrink
                offs = list(spacings)
                while len(offs) < teeth:
                    offs.append(offs[-1] / 2.0 if offs else min_gap / 2.0)
                logs = np.array([d + last for d in offs] + [last, 0.0])
                chi = np.exp(logs - logs.max())
                yield chi / chi.sum()


def _random_family(psi: np.ndarray, k: int, rng: SplitMix64, batch: int) -> np.ndarray:
    """Half uniform-simplex points, half random log-spacings scaled to ``psi``."""
    half = batch // 2
    flat = sorted_simplex_block(rng, half, k)
    span = max(1e-3, 1.5 * float(np.log(psi[0] / psi[-1]))) if psi[-1] > 0 else 1.0
    steps = rng.uniform_block((batch - half, k - 1)) * span
    logs = -np.concatenate([np.zeros((batch - half, 1)), np.cumsum(steps, axis=1)], axis=1)
    comb = np.exp(logs)
    comb /= comb.sum(axis=1, keepdims=True)
    return np.concatenate([flat, comb], axis=0)


def _screen(psi: np.ndarray, phi: np.ndarray, chis: np.ndarray, opts: RecoveryOptions) -> np.ndarray:
    """Indices of rows that stay feasible after a small transfer from entry k-1 to k."""
    k = chis.shape[1]
    cap = 0.5 * (chis[:, k - 2] - chis[:, k - 1])
    step = np.maximum(opts.min_epsilon * 10.0, 1e-4 * cap)
    ok = step < cap
    moved = chis.copy()
    moved[:, k - 2] -= step
    moved[:, k - 1] += step
    moved = -np.sort(-moved, axis=1)
    feas = majorizes_rows(tensor_rows(psi, chis), tensor_rows(phi, moved), opts.tol)
    return np.flatnonzero(ok & feas)


def recover_kxk(
    psi: SchmidtVector, phi: SchmidtVector, k: int, opts: Optional[RecoveryOptions] = None
) -> RecoveryOutcome:
    """Search the ordered ``k``-simplex for ``chi`` admitting a transfer from entry ``k-1`` to ``k``.

    Deterministic comb candidates come first, then (with
    ``opts.fallback_random``) seeded random points in fixed-size batches.
    The first feasible candidate in that order wins. Lower bounds on ``k``
    yield :class:`ImpossibleAtDim`; equal smallest weights yield
    :class:`OpenProblem`.

    Raises:
        NotARecovery: ``psi == phi``, where nothing is lost.
        SearchExhausted: ``k < 2`` or no candidate produced a witness.
    """
    opts = _opts(opts)
    eps = opts.tol
    report = majorize(psi, phi, eps)
    if not report.holds:
        return NotConvertible()
    cls = classify_report(report, psi.dim)
    if cls.kind is PairKind.IDENTICAL:
        raise NotARecovery(NotARecoveryReason.NO_ENTROPY_GAIN, "psi equals phi; nothing was lost")
    if k < 2:
        raise SearchExhausted("a one-dimensional auxiliary state carries no entanglement")
    n = psi.dim
    delta = set(cls.delta)
    bound = 2 + (1 in delta) + (n - 1 in delta)
    if k < bound:
        return ImpossibleAtDim(k, _impossible_reason(1 in delta, n - 1 in delta, k))
    if n - 1 in delta:
        return OpenProblem(TRAILING_OPEN)
    pa = psi.array
    comb = list(_comb_family(pa, cls.delta, k))
    if comb:
        found = _first_witness(psi, phi, np.array(comb), opts)
        if found is not None:
            return found
    tested = len(comb)
    if opts.fallback_random:
        rng = SplitMix64(opts.seed)
        batch = 4096
        while tested < len(comb) + opts.samples:
            size = min(batch, len(comb) + opts.samples - tested)
            size = max(size, 2)
            found = _first_witness(psi, phi, _random_family(pa, k, rng, size), opts)
            tested += size
            if found is not None:
                return found
    raise SearchExhausted(
        f"no {k}x{k} witness after {tested} candidates "
        f"({len(comb)} deterministic) for delta={sorted(delta)}"
    )


def _first_witness(psi, phi, chis: np.ndarray, opts: RecoveryOptions) -> Optional[Found]:
    k = chis.shape[1]
    for idx in _screen(psi.array, phi.array, chis, opts):
        found = _finish(psi, phi, chis[idx], k - 1, k, opts)
        if found is not None:
            return found
    return None


def _impossible_reason(first: bool, last: bool, k: int) -> str:
    if first and last:
        return (
            f"largest and smallest Schmidt weights both coincide; no auxiliary pair "
            f"of dimension {k} <= 3 can gain entropy"
        )
    which = "largest" if first else "smallest"
    return f"{which} Schmidt weights coincide; no 2-dimensional auxiliary pair can gain entropy"


def recover_general(
    psi: SchmidtVector, phi: SchmidtVector, opts: Optional[RecoveryOptions] = None
) -> RecoveryOutcome:
    """Pick the smallest-dimension construction that applies to the pair.

    StrictAll and IsolatedInterior pairs use 2x2 states, the single leading
    equality uses 3x3 states, and other patterns with unequal smallest
    weights use ``k = eta + 2``, moving to larger ``k < n`` only if that
    search comes up empty. Equal smallest weights give
    :class:`OpenProblem` unless ``opts.heuristic`` asks for an unguaranteed
    random search over ``k`` from the lower bound up to ``n - 1``.

    Raises:
        NotARecovery: ``psi == phi``.
    """
    opts = _opts(opts)
    report = majorize(psi, phi, opts.tol)
    cls = classify_report(report, psi.dim)
    kind = cls.kind
    if kind is PairKind.INCOMPARABLE:
        return NotConvertible()
    if kind is PairKind.IDENTICAL:
        raise NotARecovery(NotARecoveryReason.NO_ENTROPY_GAIN, "psi equals phi; nothing was lost")
    if kind in (PairKind.STRICT_ALL, PairKind.ISOLATED_INTERIOR):
        return recover_2x2(psi, phi, opts)
    if kind is PairKind.GENERAL_BLOCKS:
        if cls.delta == (1,):
            return recover_3x3_delta1(psi, phi, opts)
        return _recover_blocks(psi, phi, cls.eta, opts)
    if not opts.heuristic:
        return OpenProblem(TRAILING_OPEN)
    return _heuristic_trailing(psi, phi, opts)


def _recover_blocks(psi: SchmidtVector, phi: SchmidtVector, eta: int, opts: RecoveryOptions) -> RecoveryOutcome:
    """Try ``k = eta + 2`` first, then larger genuine dimensions.

    When ``eta + 2 >= n`` (equalities at every index but ``n - 1``) the
    genuine dimensions from the lower bound up to ``n - 1`` are searched
    before settling for ``k = eta + 2``.
    """
    n = psi.dim
    first = eta + 2
    if first < n:
        ks = list(range(first, n))
    else:
        ks = list(range(dimension_lower_bound(psi, phi, opts.tol), n)) + [first]
    misses = []
    for k in ks:
        try:
            return recover_kxk(psi, phi, k, opts)
        except SearchExhausted as exc:
            misses.append(str(exc))
    raise SearchExhausted("; ".join(misses))


def _heuristic_trailing(psi: SchmidtVector, phi: SchmidtVector, opts: RecoveryOptions) -> RecoveryOutcome:
    from .oracle import GridSpec, random_search_kxk

    n = psi.dim
    start = dimension_lower_bound(psi, phi, opts.tol)
    for k in range(start, n):
        scan = random_search_kxk(
            psi, phi, k, GridSpec(seed=opts.seed, tol=opts.tol), samples=opts.samples
        )
        if scan.best is not None:
            cert = verify_recovery(psi, phi, scan.best.chi, scan.best.omega, opts.tol)
            return Found(cert)
    return OpenProblem(TRAILING_OPEN + f"; heuristic search up to k={n - 1} found nothing")

