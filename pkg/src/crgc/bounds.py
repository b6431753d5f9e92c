"""Cut-set capacity and storage/bandwidth tradeoff for concurrent repair.

A repair engine downloads ``beta`` packets from each of ``d`` helpers and
regenerates ``t`` failed nodes at once.  A data collector reading ``k``
nodes sees them grouped by repair generation; such a recovery scenario is
a composition ``u`` of ``k`` into parts in ``[1, t]`` and contributes

    sum_i min(u_i * alpha, (d - u_0 - ... - u_{i-1}) * beta)

to the cut.  The capacity is the minimum over all scenarios.  Everything
here is exact: inputs are coerced to :class:`fractions.Fraction`.

Closed forms versus the brute-force oracle
------------------------------------------
When ``t`` divides ``k`` the all-``t`` composition is always a minimiser
and the piecewise tradeoff ``alpha*(gamma)`` has the closed form built from
:func:`p_coef` and :func:`q_coef`.  When ``t`` does not divide ``k`` the
minimiser is ``g - 1`` parts equal to ``t`` plus the remainder part, but
the remainder's position depends on ``alpha / beta``; putting it first
(:func:`optimal_composition`) is only right in the storage-limited
region.  :func:`capacity_closed_form` therefore minimises over the ``g``
placements, and :func:`tradeoff_alpha` inverts that exactly instead of
using the divisible-case formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Composition = tuple[int, ...]


class InfeasibleError(ValueError):
    """No storage value reaches capacity ``B`` at the requested bandwidth."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}; pass an int, Fraction or 'a/b' string")
    return Fraction(x)


@dataclass(frozen=True)
class CodeParams:
    """File size ``B`` (packets) and the ``(n, k, d, t)`` repair geometry."""

    B: Fraction
    n: int
    k: int
    d: int
    t: int = 1

    def __post_init__(self):
        object.__setattr__(self, "B", as_fraction(self.B))
        n, k, d, t = self.n, self.k, self.d, self.t
        if self.B <= 0:
            raise ValueError(f"B must be positive, got {self.B}")
        if not 1 <= k < n:
            raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
        if not 1 <= t <= k:
            raise ValueError(f"need 1 <= t <= k, got t={t}, k={k}")
        if not k <= d <= n - t:
            raise ValueError(f"need k <= d <= n - t, got d={d} (k={k}, n={n}, t={t})")

    @property
    def g(self) -> int:
        return -(-self.k // self.t)

    @property
    def alpha(self) -> Fraction:
        """Per-node storage at the minimum-storage point, ``B / k``."""
        return self.B / self.k

    @property
    def beta(self) -> Fraction:
        """Per-helper download at the minimum-storage point."""
        return self.B * self.t / (self.k * (self.d - self.k + self.t))

    def replace(self, **changes) -> CodeParams:
        fields = dict(B=self.B, n=self.n, k=self.k, d=self.d, t=self.t)
        fields.update(changes)
        return CodeParams(**fields)


@dataclass(frozen=True)
class TradeoffPoint:
    alpha: Fraction
    gamma: Fraction
    regime: str

    def __post_init__(self):
        if self.alpha <= 0 or self.gamma <= 0:
            raise ValueError(f"alpha and gamma must be positive: {self}")

    def beta(self, d: int) -> Fraction:
        return self.gamma / d


@dataclass(frozen=True)
class CoopParams:
    params: CodeParams
    beta1: Fraction
    beta2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "beta1", as_fraction(self.beta1))
        object.__setattr__(self, "beta2", as_fraction(self.beta2))
        if self.beta1 < 0 or self.beta2 < 0:
            raise ValueError("beta1 and beta2 must be non-negative")


# -- compositions -------------------------------------------------------------

@lru_cache(maxsize=None)
def _compositions(k: int, t: int) -> tuple[Composition, ...]:
    if k == 0:
        return ((),)
    out = []
    for first in range(1, min(t, k) + 1):
        out.extend((first,) + rest for rest in _compositions(k - first, t))
    return tuple(out)


def enumerate_compositions(k: int, t: int) -> list[Composition]:
    """All ordered compositions of ``k`` with parts in ``[1, t]``, lexicographic."""
    if k < 1 or t < 1:
        raise ValueError(f"need k >= 1 and t >= 1, got k={k}, t={t}")
    return list(_compositions(k, t))


def optimal_composition(k: int, t: int) -> Composition:
    """The remainder-first composition ``[r, t, ..., t]`` (``[t, ..., t]`` if t | k)."""
    if not 1 <= t <= k:
        raise ValueError(f"need 1 <= t <= k, got t={t}, k={k}")
    q, r = divmod(k, t)
    return (t,) * q if r == 0 else (r,) + (t,) * q


def candidate_compositions(k: int, t: int) -> list[Composition]:
    """``g - 1`` parts of size ``t`` plus the remainder in every position."""
    q, r = divmod(k, t)
    if r == 0:
        return [(t,) * q]
    return [(t,) * j + (r,) + (t,) * (q - j) for j in range(q + 1)]


# -- capacity -----------------------------------------------------------------

def _check_positive(alpha, beta):
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    if alpha <= 0 or beta <= 0:
        raise ValueError(f"alpha and beta must be positive, got {alpha}, {beta}")
    return alpha, beta


def scenario_capacity(u: Composition, d: int, alpha, beta) -> Fraction:
    """Cut value of one recovery scenario ``u``."""
    total = Fraction(0)
    prefix = 0
    for part in u:
        total += min(part * alpha, (d - prefix) * beta)
        prefix += part
    return total


def capacity_argmin(params: CodeParams, alpha, beta) -> tuple[Fraction, list[Composition]]:
    """Brute-force capacity and every composition attaining it."""
    alpha, beta = _check_positive(alpha, beta)
    best = None
    argmin: list[Composition] = []
    for u in _compositions(params.k, params.t):
        c = scenario_capacity(u, params.d, alpha, beta)
        if best is None or c < best:
            best, argmin = c, [u]
        elif c == best:
            argmin.append(u)
    return best, argmin


def capacity_bruteforce(params: CodeParams, alpha, beta) -> Fraction:
    return capacity_argmin(params, alpha, beta)[0]


def closed_form_argmin(params: CodeParams, alpha, beta) -> tuple[Fraction, Composition]:
    alpha, beta = _check_positive(alpha, beta)
    return min(((scenario_capacity(u, params.d, alpha, beta), u)
                for u in candidate_compositions(params.k, params.t)),
               key=lambda cu: cu[0])


def capacity_closed_form(params: CodeParams, alpha, beta) -> Fraction:
    """Capacity from the at-most-``g`` candidate compositions."""
    return closed_form_argmin(params, alpha, beta)[0]


def single_repair_capacity(k: int, d: int, alpha, beta) -> Fraction:
    if d < 1:
        raise ValueError("d must be >= 1")
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    return sum((min((d - i) * beta, alpha) for i in range(min(d, k))), Fraction(0))


def cooperative_capacity(coop: CoopParams, alpha) -> Fraction:
    """Cut bound for two-phase cooperative repair (helpers, then exchange)."""
    alpha = as_fraction(alpha)
    p = coop.params
    best = None
    for u in _compositions(p.k, p.t):
        total = Fraction(0)
        prefix = 0
        for part in u:
            total += part * min(alpha, (p.d - prefix) * coop.beta1 + (p.t - part) * coop.beta2)
            prefix += part
        if best is None or total < best:
            best = total
    return best


# -- the tradeoff curve -------------------------------------------------------

def p_coef(params: CodeParams, i: int) -> Fraction:
    """Sum of the last ``i`` bandwidth terms, in units of ``gamma``."""
    d, g, t = params.d, params.g, params.t
    return Fraction((2 * d - (2 * g - i - 1) * t) * i, 2 * d)


def q_coef(params: CodeParams, i: int) -> Fraction:
    """``B / q(i)`` is the ``gamma`` at which regime ``i`` meets regime ``i - 1``."""
    k, d, g, t = params.k, params.d, params.g, params.t
    return Fraction(2 * k * (d - (g - i) * t) - i * (i - 1) * t * t, 2 * t * d)


def breakpoints(params: CodeParams) -> list[Fraction]:
    """``B / q(i)`` for ``i = 1..g``, descending (divisible case)."""
    return [params.B / q_coef(params, i) for i in range(1, params.g + 1)]


def _min_alpha_for(u: Composition, d: int, beta: Fraction, target: Fraction) -> Fraction | None:
    # smallest alpha with scenario_capacity(u, alpha) >= target, or None if the
    # bandwidth-limited plateau is below target
    pts = sorted({Fraction(d - sum(u[:i])) * beta / part for i, part in enumerate(u)})
    if scenario_capacity(u, d, pts[-1], beta) < target:
        return None
    lo, c_lo = Fraction(0), Fraction(0)
    for x in pts:
        c_x = scenario_capacity(u, d, x, beta)
        if c_x >= target:
            return lo + (target - c_lo) * (x - lo) / (c_x - c_lo)
        lo, c_lo = x, c_x
    raise AssertionError("unreachable")


def _min_alpha(params: CodeParams, gamma: Fraction, comps) -> Fraction | None:
    beta = gamma / params.d
    best = Fraction(0)
    for u in comps:
        a = _min_alpha_for(u, params.d, beta, params.B)
        if a is None:
            return None
        best = max(best, a)
    return best


def min_gamma(params: CodeParams) -> Fraction:
    """Smallest total bandwidth for which some storage value is feasible."""
    plateau = min(sum(params.d - sum(u[:i]) for i in range(len(u)))
                  for u in candidate_compositions(params.k, params.t))
    return params.B * params.d / plateau


def _regime_label(params: CodeParams, alpha: Fraction, gamma: Fraction) -> str:
    if alpha == params.B / params.k:
        return "MS"
    beta = gamma / params.d
    _, u = closed_form_argmin(params, alpha, beta)
    limited = 0
    prefix = 0
    for part in u:
        if (params.d - prefix) * beta < part * alpha:
            limited += 1
        prefix += part
    return f"i={max(limited, 1)}"


def tradeoff_alpha(params: CodeParams, gamma) -> TradeoffPoint:
    """Minimum storage ``alpha*`` reaching capacity ``B`` at total bandwidth ``gamma``."""
    gamma = as_fraction(gamma)
    B, k, t, g = params.B, params.k, params.t, params.g
    if k % t:
        threshold = min_gamma(params)
        if gamma < threshold:
            raise InfeasibleError(
                f"gamma={gamma} is below the minimum-bandwidth threshold {threshold}")
        alpha = _min_alpha(params, gamma, candidate_compositions(k, t))
        return TradeoffPoint(alpha, gamma, _regime_label(params, alpha, gamma))

    bps = breakpoints(params)
    if gamma < bps[-1]:
        raise InfeasibleError(
            f"gamma={gamma} is below the minimum-bandwidth threshold B/q(g)={bps[-1]}")
    if gamma >= bps[0]:
        return TradeoffPoint(B / k, gamma, "MS")
    for i in range(1, g):
        if bps[i] <= gamma < bps[i - 1]:
            alpha = (B - p_coef(params, i) * gamma) / (k - i * t)
            return TradeoffPoint(alpha, gamma, f"i={i}")
    raise AssertionError("unreachable")


def tradeoff_alpha_bruteforce(params: CodeParams, gamma) -> Fraction:
    """Oracle for :func:`tradeoff_alpha`: inverts capacity over every composition."""
    gamma = as_fraction(gamma)
    alpha = _min_alpha(params, gamma, _compositions(params.k, params.t))
    if alpha is None:
        raise InfeasibleError(f"gamma={gamma} infeasible")
    return alpha


def ms_point(params: CodeParams) -> TradeoffPoint:
    B, k, d, t = params.B, params.k, params.d, params.t
    return TradeoffPoint(B / k, B * t * d / (k * (d - k + t)), "MS")


def mb_point(params: CodeParams) -> TradeoffPoint:
    """Minimum-bandwidth point ``(2Bd, 2Btd) / (k(2d - k + t))``.

    This is the true end of the curve only when ``t`` divides ``k``; see
    :func:`min_bandwidth_point` for the general case.
    """
    B, k, d, t = params.B, params.k, params.d, params.t
    den = k * (2 * d - k + t)
    return TradeoffPoint(2 * B * d / den, 2 * B * t * d / den, "MB")


def min_bandwidth_point(params: CodeParams) -> TradeoffPoint:
    if params.k % params.t == 0:
        return mb_point(params)
    gamma = min_gamma(params)
    return TradeoffPoint(tradeoff_alpha(params, gamma).alpha, gamma, "MB")


def msr_point(B, k: int, d: int) -> TradeoffPoint:
    B = as_fraction(B)
    return TradeoffPoint(B / k, B * d / (k * (d - k + 1)), "MSR")


def mbr_point(B, k: int, d: int) -> TradeoffPoint:
    B = as_fraction(B)
    v = 2 * B * d / (k * (2 * d - k + 1))
    return TradeoffPoint(v, v, "MBR")


def tradeoff_curve(params: CodeParams, num_points: int) -> list[TradeoffPoint]:
    """``num_points`` points from the MS end to the MB end, evenly spaced in gamma."""
    if num_points < 2:
        raise ValueError(f"num_points must be >= 2, got {num_points}")
    ms = ms_point(params)
    mb = min_bandwidth_point(params)
    step = (ms.gamma - mb.gamma) / (num_points - 1)
    pts = [ms]
    for j in range(1, num_points - 1):
        pts.append(tradeoff_alpha(params, ms.gamma - j * step))
    pts.append(mb)
    return pts


# -- reference bounds ---------------------------------------------------------

def cooperative_D(params: CodeParams, i: int) -> Fraction:
    k, d, t = params.k, params.d, params.t
    return Fraction(k * (d + t * (i + 1) - k)) - Fraction(i * (i + 1) * t * t, 2)


def cooperative_tradeoff_point(params: CodeParams, i: int) -> TradeoffPoint:
    """Interior cooperative point ``i`` (``0 <= i < g``)."""
    B, k, d, t = params.B, params.k, params.d, params.t
    D = cooperative_D(params, i)
    return TradeoffPoint(B * (d - k + t * (i + 1)) / D, B * t * (d + t - 1) / D, f"coop i={i}")


def cooperative_points(params: CodeParams) -> tuple[TradeoffPoint, TradeoffPoint]:
    """(MSCR, MBCR) for two-phase cooperative repair of ``t`` nodes."""
    B, k, d, t = params.B, params.k, params.d, params.t
    mscr = TradeoffPoint(B / k, B * t * (d + t - 1) / (k * (d - k + t)), "MSCR")
    den = k * (2 * d + t - k)
    mbcr = TradeoffPoint(B * (2 * d + t - 1) / den, B * t * (2 * d + t - 1) / den, "MBCR")
    return mscr, mbcr


def mfr_bound(B, k: int, d_list) -> Fraction:
    """Total traffic when newcomer ``i`` repairs from ``d_list[i]`` helpers in turn."""
    B = as_fraction(B)
    total = Fraction(0)
    for d in d_list:
        if d < k:
            raise ValueError(f"every helper count must be >= k={k}, got {d}")
        total += B * d / (k * (d - k + 1))
    return total


def core_ms_bound(B, k: int, d: int, t: int) -> Fraction:
    B = as_fraction(B)
    if t >= k:
        return B
    return B * t * d / (k * (d + t - k))


def min_upgrade_bandwidth(B, k: int, d: int, r: int) -> tuple[Fraction, Fraction]:
    """``(total, per_helper)`` download to create ``r`` nodes from ``d`` helpers.

    ``per_helper`` is the uniform lower bound ``rB / (k(d - k + r))``;
    ``total`` is the fixed-``d`` amount ``Br(d - r + 1) / (k(d - k + 1))``.
    """
    B = as_fraction(B)
    if d < k:
        raise ValueError(f"need d >= k, got d={d}, k={k}")
    if not 1 <= r <= k:
        raise ValueError(f"need 1 <= r <= k, got r={r}")
    per_helper = r * B / (k * (d - k + r))
    total = B * r * (d - r + 1) / (k * (d - k + 1))
    return total, per_helper


def is_feasible_download(h, alpha: int, k: int, s: int) -> bool:
    """Cut condition for generating ``s`` nodes from helper downloads ``h``.

    For every ``q <= s`` new nodes read together with ``k - q`` helpers, the
    helpers left out must still supply ``q * alpha`` packets.
    """
    h = sorted(h, reverse=True)
    for q in range(1, min(s, k) + 1):
        if sum(h[k - q:]) < q * alpha:
            return False
    return True


def count_links(mechanism: str, d: int, t: int) -> int:
    if mechanism == "concurrent":
        return d
    if mechanism == "cooperative":
        return t * d + t * (t - 1) // 2
    if mechanism == "one-by-one":
        return t * d
    if mechanism == "mfr":
        return sum(d + i for i in range(t))
    raise ValueError(f"unknown mechanism {mechanism!r}")

