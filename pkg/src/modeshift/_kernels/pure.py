"""Pure-Python reference kernels for the simulator's hot numeric paths.

The compiled twin (_cykern) mirrors these expressions operation for
operation so both backends produce bit-identical floats; keep any change
here in lockstep with the .pyx file.
"""

from __future__ import annotations

from math import exp


def bpr_travel_time(freeflow_min: float, volume_vph: float, capacity_vph: float, alpha: float = 0.15) -> float:
    """BPR volume-delay: t0 * (1 + alpha * (v/c)^4)."""
    vc = volume_vph / capacity_vph
    if vc <= 0.0:
        return freeflow_min
    vc2 = vc * vc
    return freeflow_min * (1.0 + alpha * (vc2 * vc2))


def bpr_travel_times(
    freeflow_min: list[float],
    volume_vph: list[float],
    capacity_vph: list[float],
    alpha: float = 0.15,
) -> list[float]:
    out = [0.0] * len(freeflow_min)
    for i in range(len(freeflow_min)):
        out[i] = bpr_travel_time(freeflow_min[i], volume_vph[i], capacity_vph[i], alpha)
    return out


def logit_probabilities(utilities: list[float], scale: float) -> list[float]:
    """Multinomial logit choice probabilities, max-shifted for stability."""
    n = len(utilities)
    best = utilities[0]
    for i in range(1, n):
        if utilities[i] > best:
            best = utilities[i]
    weights = [0.0] * n
    total = 0.0
    for i in range(n):
        w = exp((utilities[i] - best) / scale)
        weights[i] = w
        total += w
    for i in range(n):
        weights[i] = weights[i] / total
    return weights


def logit_choice(utilities: list[float], scale: float, draw: float) -> int:
    """Sample an alternative index from the logit distribution.

    The CDF is walked in the caller's alternative order, so a fixed draw
    couples choices monotonically across utility perturbations.
    """
    probs = logit_probabilities(utilities, scale)
    cum = 0.0
    for i in range(len(probs)):
        cum += probs[i]
        if draw < cum:
            return i
    return len(probs) - 1
