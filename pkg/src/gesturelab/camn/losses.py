"""Training objectives for the gesture generator.

The reconstruction term is mean absolute error on the body channels plus
a small multiple of the hand error, since the hands carry far more
channels but less postural meaning per channel. The adversarial term is
the non-saturating generator loss -mean(log score). The total scales
reconstruction by the clip's mean semantic weight, so strongly annotated
clips pull harder.
"""

from __future__ import annotations

from .. import ndiff as nd
from ..errors import NumericError


def reconstruction_loss(truth_body, pred_body, truth_hands, pred_hands, hands_weight: float = 0.02):
    body = nd.l1_loss(pred_body, truth_body)
    hands = nd.l1_loss(pred_hands, truth_hands)
    return nd.add(body, nd.scale(hands, hands_weight))


def adversarial_loss(score):
    """Non-saturating generator objective: -mean(log D(fake))."""
    return nd.neg(nd.mean(nd.log(score)))


def discriminator_loss(real_score, fake_score):
    """Binary cross-entropy on real vs (detached) generated scores."""
    one_minus = nd.sub(nd.Tensor(1.0), fake_score)
    return nd.sub(nd.neg(nd.mean(nd.log(real_score))), nd.mean(nd.log(one_minus)))


def total_loss(l_rec, l_adv, weight_mean: float, rec_weight: float = 100.0, adv_weight: float = 20.0):
    """weight_mean * rec_weight * L_rec + adv_weight * L_adv."""
    if not 0.0 <= weight_mean <= 1.0:
        raise NumericError(f"mean semantic weight {weight_mean} outside [0, 1]")
    return nd.add(nd.scale(l_rec, weight_mean * rec_weight), nd.scale(l_adv, adv_weight))
