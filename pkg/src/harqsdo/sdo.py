"""Sub-block schedule selection.

The greedy recursion places boundary i by zeroing the partial derivative of
a smoothed copy of the expected-symbols objective, in which the discrete ACK
curve is replaced by a moment-matched normal or log-normal CDF.  Candidate
first boundaries are swept exhaustively and every candidate schedule is
scored with the exact discrete objective, so the smooth model only ever
decides where the interior boundaries land.  An exhaustive search over all
boundary tuples provides the ground-truth baseline at desk scale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .codes import CodeParams, asymptotic_round_moments
from .channel import Schedule, ack_curve, expected_round_symbols, throughput

__all__ = [
    "CdfModel",
    "OptimizerReport",
    "StepUnderflowError",
    "SearchSpaceError",
    "std_normal_ccdf",
    "std_normal_ccdf_prime",
    "sdo_step",
    "sdo_step_continuous",
    "sdo_schedule",
    "smoothed_expected_symbols",
    "optimize",
    "exhaustive_search",
]

_SEARCH_GUARD = 10 ** 8
_CHUNK = 1 << 20

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class StepUnderflowError(ArithmeticError):
    """The model density underflowed to zero; the caller should clamp at n."""


class SearchSpaceError(ValueError):
    """Exhaustive enumeration refused; carries the candidate count."""

    def __init__(self, candidates: int):
        super().__init__(
            f"exhaustive search space has {candidates} candidates, "
            f"above the {_SEARCH_GUARD} guard"
        )
        self.candidates = candidates


def std_normal_ccdf(x: float) -> float:
    """Q(x): upper-tail probability of a standard Gaussian, via erfc."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def std_normal_ccdf_prime(x: float) -> float:
    """Q'(x) = -exp(-x**2 / 2) / sqrt(2 pi)."""
    return -_INV_SQRT_2PI * math.exp(-0.5 * x * x)


@dataclass(frozen=True)
class CdfModel:
    """Moment-matched continuous stand-in for the ACK curve.

    kind is "normal" or "lognormal"; mu/sigma2 are the matched mean and
    variance, mu_star/sigma2_star the induced log-normal parameters.
    """

    kind: str
    mu: float
    sigma2: float
    mu_star: float
    sigma2_star: float

    def __post_init__(self) -> None:
        if self.kind not in ("normal", "lognormal"):
            raise ValueError(f"kind must be 'normal' or 'lognormal', got {self.kind!r}")
        if self.sigma2 <= 0.0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @classmethod
    def from_moments(cls, kind: str, mean: float, variance: float) -> "CdfModel":
        if mean <= 0.0 or variance <= 0.0:
            raise ValueError("moment matching needs positive mean and variance")
        mu_star = math.log(mean * mean / math.sqrt(mean * mean + variance))
        sigma2_star = math.log1p(variance / (mean * mean))
        return cls(kind, mean, variance, mu_star, sigma2_star)

    @classmethod
    def for_params(cls, params: CodeParams, kind: str) -> "CdfModel":
        moments = asymptotic_round_moments(params.k, params.epsilon)
        return cls.from_moments(kind, moments.mean, moments.variance)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def sigma_star(self) -> float:
        return math.sqrt(self.sigma2_star)

    def cdf(self, x: float) -> float:
        if self.kind == "normal":
            return 1.0 - std_normal_ccdf((x - self.mu) / self.sigma)
        if x <= 0.0:
            return 0.0
        return 1.0 - std_normal_ccdf((math.log(x) - self.mu_star) / self.sigma_star)

    def pdf(self, x: float) -> float:
        if self.kind == "normal":
            z = (x - self.mu) / self.sigma
            return -std_normal_ccdf_prime(z) / self.sigma
        if x <= 0.0:
            return 0.0
        z = (math.log(x) - self.mu_star) / self.sigma_star
        return -std_normal_ccdf_prime(z) / (x * self.sigma_star)


@dataclass(frozen=True)
class OptimizerReport:
    """Chosen schedule with its exact objective and throughput."""

    schedule: Schedule
    objective: float
    throughput: float
    model_used: str
    n1_searched: tuple[int, int] | None


def sdo_step(model: CdfModel, n_prev2: float | None, n_prev1: float) -> float:
    """Next boundary: n_prev1 plus a ceiled increment, forced to be >= 1.

    The increment is always a positive integer, so integer boundaries stay
    integer.  n_prev2 is None when there is no predecessor; the model CDF
    then contributes 0, matching the -inf (normal) and 0 (log-normal)
    sentinels.  Raises StepUnderflowError when the density at n_prev1
    underflows.
    """
    ratio = _step_ratio(model, n_prev2, n_prev1)
    return n_prev1 + max(1, math.ceil(ratio))


def sdo_step_continuous(model: CdfModel, n_prev2: float | None, n_prev1: float) -> float:
    """The pre-ceiling, pre-clamp next boundary; used for stationarity checks."""
    return n_prev1 + _step_ratio(model, n_prev2, n_prev1)


def _step_ratio(model: CdfModel, n_prev2: float | None, n_prev1: float) -> float:
    if n_prev2 is not None and not n_prev2 < n_prev1:
        raise ValueError(f"need n_prev2 < n_prev1, got {n_prev2} >= {n_prev1}")
    f1 = model.cdf(n_prev1)
    f0 = 0.0 if n_prev2 is None else model.cdf(n_prev2)
    density = model.pdf(n_prev1)
    if density <= 0.0:
        raise StepUnderflowError(
            f"model density underflowed at {n_prev1}; clamp the schedule at n"
        )
    return (f1 - f0) / density


def _schedule_from_model(model: CdfModel, n: int, m: int, n1: int) -> Schedule:
    # Clamp every boundary to n - (sub-blocks still to place) so the schedule
    # can always finish strictly increasing at n_m = n.
    bounds = [min(n1, n - (m - 1))]
    prev2: float | None = None
    for slot in range(2, m):
        cap = n - (m - slot)
        try:
            nxt = sdo_step(model, prev2, bounds[-1])
        except StepUnderflowError:
            nxt = cap
        prev2 = bounds[-1]
        bounds.append(min(nxt, cap))
    bounds.append(n)
    return Schedule(tuple(bounds))


def sdo_schedule(params: CodeParams, m: int, model_kind: str, n1: int) -> Schedule:
    """Full m-boundary schedule grown from n1 by the greedy recursion."""
    if m < 2:
        raise ValueError(f"sdo_schedule needs m >= 2, got {m}")
    if not params.k <= n1 < params.n:
        raise ValueError(f"need k <= n1 < n, got n1={n1} for k={params.k}, n={params.n}")
    model = CdfModel.for_params(params, model_kind)
    return _schedule_from_model(model, params.n, m, n1)


def smoothed_expected_symbols(model: CdfModel, boundaries) -> float:
    """The objective with the ACK curve replaced by the model CDF.

    boundaries may be real-valued; the last entry plays the role of n.
    """
    b = list(boundaries)
    total = float(b[-1])
    for i in range(len(b) - 1):
        total += (b[i] - b[i + 1]) * model.cdf(b[i])
    return total


def _objective_on_curve(boundaries, n: int, curve: np.ndarray) -> float:
    # boundaries is the full schedule ending at n
    total = float(n)
    for i in range(len(boundaries) - 1):
        total += (boundaries[i] - boundaries[i + 1]) * curve[boundaries[i]]
    return total


def _report(params: CodeParams, schedule: Schedule, model_used: str,
            n1_searched: tuple[int, int] | None) -> OptimizerReport:
    return OptimizerReport(
        schedule=schedule,
        objective=expected_round_symbols(params, schedule),
        throughput=throughput(params, schedule),
        model_used=model_used,
        n1_searched=n1_searched,
    )


def _n1_range(params: CodeParams, m: int) -> tuple[int, int]:
    lo, hi = params.k, params.n - m + 1
    if lo > hi:
        raise ValueError(
            f"no feasible schedule: need k + m - 1 <= n, got k={params.k}, "
            f"m={m}, n={params.n}"
        )
    return lo, hi


def optimize(params: CodeParams, m: int, model_kind: str = "normal") -> OptimizerReport:
    """Best schedule over all feasible first boundaries, scored exactly.

    Ties in the exact objective break toward the smaller first boundary.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if m == 1:
        return _report(params, Schedule((params.n,)), model_kind, None)
    lo, hi = _n1_range(params, m)
    model = CdfModel.for_params(params, model_kind)
    curve = ack_curve(params)
    best_obj = math.inf
    best: Schedule | None = None
    for n1 in range(lo, hi + 1):
        candidate = _schedule_from_model(model, params.n, m, n1)
        obj = _objective_on_curve(candidate.boundaries, params.n, curve)
        if obj < best_obj:
            best_obj = obj
            best = candidate
    assert best is not None
    return _report(params, best, model_kind, (lo, hi))


def exhaustive_search(params: CodeParams, m: int) -> OptimizerReport:
    """Global minimizer of the exact objective over all boundary tuples.

    Enumerates every strictly increasing interior tuple with n_1 >= k and
    n_{m-1} < n; refuses above the candidate-count guard.  Ties break
    lexicographically toward smaller boundaries.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if m == 1:
        return _report(params, Schedule((params.n,)), "exhaustive", None)
    lo, hi = _n1_range(params, m)
    count = math.comb(params.n - params.k, m - 1)
    if count > _SEARCH_GUARD:
        raise SearchSpaceError(count)
    curve = ack_curve(params)
    n = params.n
    combos = itertools.combinations(range(params.k, n), m - 1)
    best_obj = math.inf
    best: tuple[int, ...] | None = None
    while True:
        chunk = np.array(list(itertools.islice(combos, _CHUNK)), dtype=np.int64)
        if chunk.size == 0:
            break
        nxt = np.concatenate([chunk[:, 1:], np.full((len(chunk), 1), n)], axis=1)
        objs = ((chunk - nxt) * curve[chunk]).sum(axis=1) + n
        idx = int(np.argmin(objs))
        if objs[idx] < best_obj:
            best_obj = float(objs[idx])
            best = tuple(int(x) for x in chunk[idx])
    assert best is not None
    return _report(params, Schedule(best + (n,)), "exhaustive", (lo, hi))
