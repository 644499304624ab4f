"""Loss and score functions and the two conversion maps between them.

A loss function u is strictly increasing and convex on [0, inf) with
u(0) = 0; the built-in families additionally satisfy u(1) = 1 except where
a scale is chosen deliberately (conversion from a score keeps the raw,
unnormalized pair, which induces the same risk measure).

A score function v is increasing with v(0-) <= 0 <= v(0+).  The score
derived from a loss pair (alpha, u1, u2) is

    v(x) = alpha * u1'_-(x)            for x > 0,
    v(x) = -(1 - alpha) * u2'_+(-x)    for x <= 0,

and conversely a score integrates back to a loss pair

    u1(x) = (1/alpha) * int_0^x v,     u2(x) = -(1/(1-alpha)) * int_{-x}^0 v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import AlphaOutOfRange, DegenerateScore, ScoreNotIntegrable

_ONE_SIDED_H = 1e-9  # offset used for generic one-sided limits of a score


def _vec(fn):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        return np.asarray(fn(x), dtype=float)
    return wrapped


@dataclass(frozen=True, eq=False)
class LossFunction:
    """Convex loss with one-sided derivative accessors.

    ``raw_left``/``raw_right`` are the plain one-sided derivatives of the
    convex function; ``left_deriv``/``right_deriv`` apply the indicator
    conventions used in the first-order condition: the left derivative is
    zeroed at x <= 0 and the right derivative at x < 0.
    """

    eval_fn: callable
    raw_left: callable
    raw_right: callable
    family_tag: str
    second_deriv_at_zero: float | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return _vec(self.eval_fn)(x)

    def left_deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        m = x > 0
        if np.any(m):
            out[m] = self.raw_left(x[m])
        return out

    def right_deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        m = x >= 0
        if np.any(m):
            out[m] = self.raw_right(x[m])
        return out


@dataclass(frozen=True, eq=False)
class ScoreFunction:
    """Increasing score with optional one-sided limit accessors."""

    eval_fn: callable
    family_tag: str
    left_limit_fn: callable | None = None
    right_limit_fn: callable | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return _vec(self.eval_fn)(x)

    def left_limit(self, x):
        if self.left_limit_fn is not None:
            return _vec(self.left_limit_fn)(x)
        return self(np.asarray(x, dtype=float) - _ONE_SIDED_H)

    def right_limit(self, x):
        if self.right_limit_fn is not None:
            return _vec(self.right_limit_fn)(x)
        return self(np.asarray(x, dtype=float) + _ONE_SIDED_H)


# ---------------------------------------------------------------------------
# Built-in loss families
# ---------------------------------------------------------------------------

def identity_loss() -> LossFunction:
    return LossFunction(
        eval_fn=lambda x: x,
        raw_left=lambda x: np.ones_like(x),
        raw_right=lambda x: np.ones_like(x),
        family_tag="identity",
        second_deriv_at_zero=0.0,
    )


def power_loss(beta: float, a: float = 1.0) -> LossFunction:
    """u(x) = a * x**beta with beta >= 1.  a = 1 gives u(1) = 1."""
    if beta < 1.0:
        raise ValueError("power loss needs beta >= 1 for convexity")
    if a <= 0.0:
        raise ValueError("power loss needs a positive scale")
    if beta == 1.0:
        d2 = 0.0
    elif beta == 2.0:
        d2 = 2.0 * a
    elif beta > 2.0:
        d2 = 0.0
    else:
        d2 = math.inf
    return LossFunction(
        eval_fn=lambda x: a * np.power(x, beta),
        raw_left=lambda x: a * beta * np.power(x, beta - 1.0),
        raw_right=lambda x: a * beta * np.power(x, beta - 1.0),
        family_tag="power",
        second_deriv_at_zero=d2,
        params={"a": a, "beta": beta},
    )


def quadratic_loss(a: float = 1.0) -> LossFunction:
    u = power_loss(2.0, a)
    return LossFunction(u.eval_fn, u.raw_left, u.raw_right, "quadratic",
                        u.second_deriv_at_zero, {"a": a})


def exp_integral_loss(gamma: float, scale: float = 1.0) -> LossFunction:
    """Loss with right derivative scale * exp(gamma * x).

    u(x) = scale * (exp(gamma*x) - 1) / gamma, so u(0) = 0.  With gamma = 1
    and scale = 1 the derivative is exp(x); the classical exponential loss
    exp(x) itself differs from this one only by the constant 1, which does
    not move any minimizer.
    """
    if gamma <= 0.0:
        raise ValueError("exp_integral loss needs gamma > 0")
    if scale <= 0.0:
        raise ValueError("exp_integral loss needs a positive scale")
    return LossFunction(
        eval_fn=lambda x: scale * np.expm1(gamma * x) / gamma,
        raw_left=lambda x: scale * np.exp(gamma * x),
        raw_right=lambda x: scale * np.exp(gamma * x),
        family_tag="exp_integral",
        second_deriv_at_zero=scale * gamma,
        params={"gamma": gamma, "scale": scale},
    )


def normalize_loss(u: LossFunction) -> LossFunction:
    """Rescale so that u(1) = 1 (membership reporting only)."""
    c = float(u(np.asarray(1.0)))
    if c <= 0.0:
        raise DegenerateScore("loss vanishes at 1; cannot normalize")
    return LossFunction(
        eval_fn=lambda x: u.eval_fn(x) / c,
        raw_left=lambda x: u.raw_left(x) / c,
        raw_right=lambda x: u.raw_right(x) / c,
        family_tag=u.family_tag,
        second_deriv_at_zero=None if u.second_deriv_at_zero is None
        else u.second_deriv_at_zero / c,
        params=dict(u.params),
    )


# ---------------------------------------------------------------------------
# Built-in score families
# ---------------------------------------------------------------------------

def var_score(alpha: float) -> ScoreFunction:
    """Step score alpha - 1{x <= 0}; its shortfall is the left alpha-quantile."""
    _check_alpha(alpha)
    def ev(x):
        return np.where(x > 0.0, alpha, alpha - 1.0)
    return ScoreFunction(
        eval_fn=ev,
        family_tag="var",
        left_limit_fn=lambda x: np.where(x > 0.0, alpha, alpha - 1.0),
        right_limit_fn=lambda x: np.where(x >= 0.0, alpha, alpha - 1.0),
        params={"alpha": alpha},
    )


def expectile_score(alpha: float) -> ScoreFunction:
    """Piecewise-linear score from quadratic losses: 2*alpha*x+ - 2*(1-alpha)*x-."""
    _check_alpha(alpha)
    def ev(x):
        return np.where(x > 0.0, 2.0 * alpha * x, 2.0 * (1.0 - alpha) * x)
    return ScoreFunction(ev, "expectile", ev, ev, {"alpha": alpha})


def entropic_score(gamma: float) -> ScoreFunction:
    """v(x) = exp(gamma*x) - 1 for gamma > 0, 1 - exp(gamma*x) for gamma < 0."""
    if gamma == 0.0:
        raise ValueError("entropic score needs gamma != 0; use gamma -> 0 limits "
                         "via the conditional mean directly")
    if gamma > 0.0:
        def ev(x):
            return np.expm1(gamma * x)
    else:
        def ev(x):
            return -np.expm1(gamma * x)
    return ScoreFunction(ev, "entropic", ev, ev, {"gamma": gamma})


def tabulated_score(xs, ys) -> ScoreFunction:
    """Piecewise-linear interpolant through (xs, ys); clamped outside the grid."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or xs.shape != ys.shape:
        raise ValueError("need matching 1-d grids with at least two points")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("grid must be strictly increasing")
    def ev(x):
        return np.interp(x, xs, ys)
    return ScoreFunction(ev, "tabulated", params={"xs": xs, "ys": ys})


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")


# ---------------------------------------------------------------------------
# Conversion maps
# ---------------------------------------------------------------------------

def score_from_losses(alpha: float, u1: LossFunction, u2: LossFunction) -> ScoreFunction:
    """Score induced by a loss pair via the one-sided derivatives."""
    _check_alpha(alpha)

    def ev(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0.0,
                        alpha * u1.left_deriv(np.maximum(x, 0.0)),
                        -(1.0 - alpha) * u2.right_deriv(np.maximum(-x, 0.0)))

    def left(x):
        # one-sided limits: the left limit of v uses u1'_- on the right branch
        # and the (right-continuous) u2'_+ on the left branch
        x = np.asarray(x, dtype=float)
        return np.where(x > 0.0,
                        alpha * u1.left_deriv(np.maximum(x, 0.0)),
                        -(1.0 - alpha) * u2.right_deriv(np.maximum(-x, 0.0)))

    def right(x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0.0,
                        alpha * u1.right_deriv(np.maximum(x, 0.0)),
                        -(1.0 - alpha) * u2.left_deriv(np.maximum(-x, 0.0)))

    return ScoreFunction(ev, "from_losses", left, right,
                         {"alpha": alpha, "u1": u1.family_tag, "u2": u2.family_tag})


def losses_from_score(alpha: float, v: ScoreFunction):
    """Raw (unnormalized) loss pair integrating the score.

    Closed forms are used for the named families; anything else goes through
    adaptive quadrature.  The returned pair generally has u(1) != 1; it
    induces exactly the same risk measure as v.
    """
    _check_alpha(alpha)

    if v.family_tag == "var":
        p = float(v(np.asarray(1.0)))
        q = -float(v(np.asarray(-1.0)))
        _check_slopes(p, q)
        return power_loss(1.0, p / alpha), power_loss(1.0, q / (1.0 - alpha))

    if v.family_tag == "expectile":
        c1 = float(v(np.asarray(1.0)))
        c2 = -float(v(np.asarray(-1.0)))
        _check_slopes(c1, c2)
        return (power_loss(2.0, c1 / (2.0 * alpha)),
                power_loss(2.0, c2 / (2.0 * (1.0 - alpha))))

    if v.family_tag == "entropic":
        g = v.params["gamma"]
        if g > 0.0:
            u1 = LossFunction(
                eval_fn=lambda x: (np.expm1(g * x) / g - x) / alpha,
                raw_left=lambda x: np.expm1(g * x) / alpha,
                raw_right=lambda x: np.expm1(g * x) / alpha,
                family_tag="tabulated",
                second_deriv_at_zero=g / alpha,
                params={"source": "entropic", "gamma": g, "alpha": alpha},
            )
            u2 = LossFunction(
                eval_fn=lambda x: (x - (-np.expm1(-g * x)) / g) / (1.0 - alpha),
                raw_left=lambda x: -np.expm1(-g * x) / (1.0 - alpha),
                raw_right=lambda x: -np.expm1(-g * x) / (1.0 - alpha),
                family_tag="tabulated",
                second_deriv_at_zero=g / (1.0 - alpha),
                params={"source": "entropic", "gamma": g, "alpha": alpha},
            )
            return u1, u2
        u1 = LossFunction(
            eval_fn=lambda x: (x - np.expm1(g * x) / g) / alpha,
            raw_left=lambda x: -np.expm1(g * x) / alpha,
            raw_right=lambda x: -np.expm1(g * x) / alpha,
            family_tag="tabulated",
            second_deriv_at_zero=-g / alpha,
            params={"source": "entropic", "gamma": g, "alpha": alpha},
        )
        u2 = LossFunction(
            eval_fn=lambda x: _neg_entropic_u2(g, x) / (1.0 - alpha),
            raw_left=lambda x: np.expm1(-g * x) / (1.0 - alpha),
            raw_right=lambda x: np.expm1(-g * x) / (1.0 - alpha),
            family_tag="tabulated",
            second_deriv_at_zero=-g / (1.0 - alpha),
            params={"source": "entropic", "gamma": g, "alpha": alpha},
        )
        return u1, u2

    return _losses_from_score_quadrature(alpha, v)


def _neg_entropic_u2(g: float, x):
    # int_{-x}^0 (1 - exp(g t)) dt = x - (1 - exp(-g x))/g ; flip the sign
    return -(x - (-np.expm1(-g * x)) / g)


def _check_slopes(pos: float, neg: float):
    if pos <= 0.0:
        raise DegenerateScore("score does not rise above 0 on (0, 1]")
    if neg <= 0.0:
        raise DegenerateScore("score does not fall below 0 on [-1, 0)")


def _losses_from_score_quadrature(alpha: float, v: ScoreFunction):
    scalar_v = lambda t: float(v(np.asarray(t)))

    def integral(a: float, b: float) -> float:
        val, _ = integrate.quad(scalar_v, a, b, limit=200, epsabs=1e-10)
        if not math.isfinite(val):
            raise ScoreNotIntegrable("quadrature of the score diverged")
        return val

    if integral(0.0, 1.0) <= 0.0:
        raise DegenerateScore("integral of the score over [0, 1] is not positive")
    if integral(-1.0, 0.0) >= 0.0:
        raise DegenerateScore("integral of the score over [-1, 0] is not negative")

    def u1_eval(x):
        x = np.asarray(x, dtype=float)
        flat = np.array([integral(0.0, xi) / alpha for xi in np.ravel(x)])
        return flat.reshape(x.shape)

    def u2_eval(x):
        x = np.asarray(x, dtype=float)
        flat = np.array([-integral(-xi, 0.0) / (1.0 - alpha) for xi in np.ravel(x)])
        return flat.reshape(x.shape)

    u1 = LossFunction(
        eval_fn=u1_eval,
        raw_left=lambda x: v.left_limit(x) / alpha,
        raw_right=lambda x: v.right_limit(x) / alpha,
        family_tag="tabulated",
        second_deriv_at_zero=None,
        params={"source": v.family_tag, "alpha": alpha},
    )
    u2 = LossFunction(
        eval_fn=u2_eval,
        raw_left=lambda x: -v.right_limit(-x) / (1.0 - alpha),
        raw_right=lambda x: -v.left_limit(-x) / (1.0 - alpha),
        family_tag="tabulated",
        second_deriv_at_zero=None,
        params={"source": v.family_tag, "alpha": alpha},
    )
    return u1, u2


# ---------------------------------------------------------------------------
# Membership reports
# ---------------------------------------------------------------------------

@dataclass
class MembershipReport:
    passed: bool
    violations: list


def validate_loss(u: LossFunction, grid) -> MembershipReport:
    """Falsification checks for loss membership on a sampled grid.

    Checks u(0) = 0, u(1) = 1, strict increase, midpoint convexity and the
    ordering/monotonicity of one-sided derivatives.  A pass only means no
    violation was found on the grid.
    """
    grid = np.sort(np.asarray(grid, dtype=float))
    violations = []
    vals = u(grid)
    if abs(float(u(np.asarray(0.0)))) > 1e-12:
        violations.append("u(0) != 0")
    if abs(float(u(np.asarray(1.0))) - 1.0) > 1e-9:
        violations.append("u(1) != 1")
    if np.any(np.diff(vals) <= 0.0):
        violations.append("not strictly increasing on grid")
    mid = 0.5 * (grid[:-1] + grid[1:])
    if np.any(u(mid) > 0.5 * (vals[:-1] + vals[1:]) + 1e-12):
        violations.append("midpoint convexity fails on grid")
    pos = grid[grid > 0.0]
    if pos.size:
        ld, rd = u.left_deriv(pos), u.right_deriv(pos)
        if np.any(ld < -1e-12) or np.any(ld > rd + 1e-9):
            violations.append("one-sided derivatives out of order")
        if np.any(np.diff(ld) < -1e-9) or np.any(np.diff(rd) < -1e-9):
            violations.append("one-sided derivatives not non-decreasing")
    return MembershipReport(not violations, violations)


def validate_score(v: ScoreFunction, grid) -> MembershipReport:
    """Falsification checks for score membership on a sampled grid."""
    grid = np.sort(np.asarray(grid, dtype=float))
    violations = []
    vals = v(grid)
    if np.any(np.diff(vals) < -1e-12):
        violations.append("not non-decreasing on grid")
    eps = 1e-8
    if float(v(np.asarray(-eps))) > 1e-12:
        violations.append("v(0-) > 0")
    if float(v(np.asarray(eps))) < -1e-12:
        violations.append("v(0+) < 0")
    return MembershipReport(not violations, violations)


# ---------------------------------------------------------------------------
# String tags (CLI surface)
# ---------------------------------------------------------------------------

def loss_from_tag(tag: str) -> LossFunction:
    """Parse "identity", "quadratic", "power:a,beta" or "entropic:gamma"."""
    name, _, arg = tag.partition(":")
    if name == "identity":
        return identity_loss()
    if name == "quadratic":
        return quadratic_loss()
    if name == "power":
        a_str, _, beta_str = arg.partition(",")
        return power_loss(float(beta_str), float(a_str))
    if name == "entropic":
        return exp_integral_loss(float(arg))
    raise ValueError(f"unknown loss tag {tag!r}")


def score_from_tag(tag: str) -> ScoreFunction:
    """Parse "var:alpha", "expectile:alpha" or "entropic:gamma"."""
    name, _, arg = tag.partition(":")
    if name == "var":
        return var_score(float(arg))
    if name == "expectile":
        return expectile_score(float(arg))
    if name == "entropic":
        return entropic_score(float(arg))
    raise ValueError(f"unknown score tag {tag!r}")
