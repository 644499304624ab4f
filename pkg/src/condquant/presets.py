"""Ready-made risk specs for the named measure families."""

from __future__ import annotations

from .losses import (
    entropic_score,
    identity_loss,
    losses_from_score,
    power_loss,
    quadratic_loss,
)
from .quantile import RiskSpec, risk_spec


def var_spec(alpha: float) -> RiskSpec:
    """Identity losses: the generalized quantile is the left alpha-quantile."""
    return risk_spec(alpha, identity_loss(), identity_loss())


def expectile_spec(alpha: float) -> RiskSpec:
    """Quadratic losses on both sides."""
    return risk_spec(alpha, quadratic_loss(), quadratic_loss())


def power_spec(alpha: float, beta: float) -> RiskSpec:
    return risk_spec(alpha, power_loss(beta), power_loss(beta))


def entropic_spec(gamma: float, alpha: float = 0.5) -> RiskSpec:
    """Quantile-form spec whose derived score is the entropic score.

    The loss pair is reconstructed from the score, so the induced measure is
    (1/gamma) log E[exp(gamma X) | G] regardless of the alpha split.
    """
    u1, u2 = losses_from_score(alpha, entropic_score(gamma))
    return risk_spec(alpha, u1, u2)
