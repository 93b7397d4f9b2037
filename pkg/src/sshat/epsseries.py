"""Truncated power series in the expansion parameter and the order-by-order solve.

At a fixed maturity the defining equation for the effective spread constant
``s_hat`` reads, after clearing denominators,

    (tau*lbar) * s_hat^2 = (l0 s_hat - sigma2)(1 - exp(-s_hat tau)) + sigma2 s_hat tau.

Both sides become truncated power series in eps once ``tau*lbar`` is replaced
by its expansion ``sum_k L_k(tau) eps^k`` and ``s_hat`` by the unknown series
``sum_n k_n eps^n``.  The zeroth order forces ``k_0 = mu_hat``; each higher
coefficient enters its own order linearly, with a fixed eps-independent slope

    bracket = (l0 k_0 - sigma2) exp(-k_0 tau) tau + l0 (1 - exp(-k_0 tau))
              + sigma2 tau - 2 L_0 k_0,

so ``k_n`` is read off by evaluating the order-n residual with ``k_n = 0`` and
dividing by the bracket.  This generic extraction needs no hand-derived
right-hand sides (which are error-prone beyond first order); the first-order
closed form ``L_1 k_0^2`` is kept as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericalFailure, SingularBracketError
from .params import ModelParams
from .perturbation import EllExpansion, tau_lbar_terms

__all__ = [
    "EpsPowerSeries",
    "ShatExpansion",
    "series_add",
    "series_mul",
    "series_scale",
    "series_exp",
    "equation_residual_series",
    "solve_shat_series",
    "rhs1_printed",
]


@dataclass(frozen=True)
class EpsPowerSeries:
    """Coefficients a_0..a_N of a power series truncated at order N.

    All arithmetic is closed at the common truncation order; combining series
    of different orders is an error rather than a silent truncation.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a truncated power series needs at least the order-0 coefficient")

    @classmethod
    def constant(cls, value: float, order: int) -> "EpsPowerSeries":
        return cls((float(value),) + (0.0,) * order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> float:
        return self.coeffs[n]

    def with_coeff(self, n: int, value: float) -> "EpsPowerSeries":
        coeffs = list(self.coeffs)
        coeffs[n] = float(value)
        return EpsPowerSeries(tuple(coeffs))

    def __call__(self, eps: float) -> float:
        """Evaluate the truncated polynomial at a numerical eps."""
        total = 0.0
        power = 1.0
        for a in self.coeffs:
            total += a * power
            power *= eps
        return total


def _check_orders(a: EpsPowerSeries, b: EpsPowerSeries) -> int:
    if a.order != b.order:
        raise ValueError(f"truncation orders differ: {a.order} vs {b.order}")
    return a.order


def series_add(a: EpsPowerSeries, b: EpsPowerSeries) -> EpsPowerSeries:
    _check_orders(a, b)
    return EpsPowerSeries(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))


def series_scale(a: EpsPowerSeries, factor: float) -> EpsPowerSeries:
    return EpsPowerSeries(tuple(factor * x for x in a.coeffs))


def series_mul(a: EpsPowerSeries, b: EpsPowerSeries) -> EpsPowerSeries:
    """Cauchy product truncated at the common order."""
    order = _check_orders(a, b)
    return EpsPowerSeries(
        tuple(
            math.fsum(a.coeffs[i] * b.coeffs[n - i] for i in range(n + 1))
            for n in range(order + 1)
        )
    )


def series_exp(a: EpsPowerSeries) -> EpsPowerSeries:
    """Exponential of a truncated series.

    The constant part goes through the scalar exponential exactly; the rest
    is nilpotent at this truncation order, so exp(a) = exp(a_0) * sum_j
    (a - a_0)^j / j! terminates after ``order`` products.
    """
    try:
        head = math.exp(a.coeffs[0])
    except OverflowError as exc:
        raise NumericalFailure(f"series exponential overflowed at constant {a.coeffs[0]!r}") from exc
    rest = EpsPowerSeries((0.0,) + a.coeffs[1:])
    result = EpsPowerSeries.constant(1.0, a.order)
    term = EpsPowerSeries.constant(1.0, a.order)
    factorial = 1.0
    for j in range(1, a.order + 1):
        term = series_mul(term, rest)
        factorial *= j
        result = series_add(result, series_scale(term, 1.0 / factorial))
    return series_scale(result, head)


def equation_residual_series(
    k_series: EpsPowerSeries,
    expansion: EllExpansion,
    tau: float,
    l0: float,
    params: ModelParams,
) -> EpsPowerSeries:
    """Left minus right side of the cleared defining equation, as an eps-series.

    The integral term uses the scalar values L_k(tau); the expansion must
    carry at least as many orders as ``k_series``.
    """
    order = k_series.order
    if expansion.order < order:
        raise ValueError(
            f"expansion order {expansion.order} is below the series order {order}"
        )
    L = EpsPowerSeries(tuple(tau_lbar_terms(expansion, tau)[: order + 1]))
    shat_sq = series_mul(k_series, k_series)
    lhs = series_mul(L, shat_sq)

    one_minus_exp = series_scale(series_exp(series_scale(k_series, -tau)), -1.0)
    one_minus_exp = one_minus_exp.with_coeff(0, 1.0 + one_minus_exp[0])
    linear = series_scale(k_series, l0).with_coeff(0, l0 * k_series[0] - params.sigma2)
    rhs = series_add(
        series_mul(linear, one_minus_exp),
        series_scale(k_series, params.sigma2 * tau),
    )
    return series_add(lhs, series_scale(rhs, -1.0))


def solve_bracket(expansion: EllExpansion, tau: float, l0: float, params: ModelParams) -> float:
    """The eps-independent slope multiplying each k_n in its own order."""
    k0 = params.mu_hat
    L0 = expansion.L[0].evaluate(tau)
    emk = math.exp(-k0 * tau)
    return (
        (l0 * k0 - params.sigma2) * emk * tau
        + l0 * (1.0 - emk)
        + params.sigma2 * tau
        - 2.0 * L0 * k0
    )


@dataclass(frozen=True)
class ShatExpansion:
    """Solved coefficients k_0..k_N of the effective spread constant at one maturity.

    ``residuals`` holds the absolute order-n residuals of the defining
    equation evaluated at the returned solution, one per order.
    """

    tau: float
    k: tuple[float, ...]
    bracket: float
    residuals: tuple[float, ...]

    @property
    def order(self) -> int:
        return len(self.k) - 1

    def value(self, eps: float, order: int | None = None) -> float:
        """Partial sum k_0 + k_1 eps + ... up to ``order`` (default: all)."""
        upto = self.order if order is None else order
        if not 0 <= upto <= self.order:
            raise ValueError(f"order must be in [0, {self.order}], got {order}")
        total = 0.0
        power = 1.0
        for n in range(upto + 1):
            total += self.k[n] * power
            power *= eps
        return total

    def diagnostics_csv(self) -> str:
        lines = ["n,k_n,residual"]
        for n, (kn, res) in enumerate(zip(self.k, self.residuals)):
            lines.append(f"{n},{kn:.17g},{res:.17g}")
        return "\n".join(lines) + "\n"


def solve_shat_series(
    expansion: EllExpansion,
    tau: float,
    l0: float,
    params: ModelParams,
    order: int,
) -> ShatExpansion:
    """Solve the defining equation order by order up to ``order``.

    k_0 equals mu_hat (the zeroth order is satisfied identically by the
    closed form of L_0); each k_n for n >= 1 is the order-n residual at
    k_n = 0 divided by the bracket.  A bracket below ``delta_brk`` means the
    linearized equation is degenerate at this maturity and parameter set.
    """
    if tau <= 0:
        raise ValueError(f"maturity must be > 0, got {tau}")
    if not 0 <= order <= expansion.order:
        raise ValueError(f"order must be in [0, {expansion.order}], got {order}")
    k0 = params.mu_hat
    L0 = expansion.L[0].evaluate(tau)
    bracket = solve_bracket(expansion, tau, l0, params)
    delta_brk = 1e-12 * max(abs(l0), params.sigma2 * tau, abs(L0 * k0))
    if abs(bracket) <= delta_brk:
        raise SingularBracketError(
            f"bracket {bracket!r} is within {delta_brk!r} of zero at tau={tau!r}"
        )
    k = EpsPowerSeries.constant(k0, order)
    for n in range(1, order + 1):
        residual = equation_residual_series(k, expansion, tau, l0, params)
        k = k.with_coeff(n, residual[n] / bracket)
    final = equation_residual_series(k, expansion, tau, l0, params)
    return ShatExpansion(
        tau=tau,
        k=k.coeffs,
        bracket=bracket,
        residuals=tuple(abs(r) for r in final.coeffs),
    )


def rhs1_printed(expansion: EllExpansion, tau: float, l0: float, params: ModelParams) -> float:
    """First-order right-hand side in closed form: L_1(tau) * k_0^2.

    Kept as an independent cross-check of the generic order-by-order solve;
    ``k_1`` must equal this value divided by the bracket.
    """
    if expansion.order < 1:
        raise ValueError("expansion must carry at least order 1")
    L1 = expansion.L[1].evaluate(tau)
    k0 = params.mu_hat
    return L1 * k0 * k0
