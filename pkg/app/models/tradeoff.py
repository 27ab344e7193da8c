"""
Trade-off point - one solved lambda on a utility/invariance front.
"""
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class TradeoffPoint:
    lam: float
    r: int
    J_y: float
    J_s: float
    target_accuracy: Optional[float] = None
    adversary_accuracy: Optional[float] = None

    def __post_init__(self):
        for value in (self.target_accuracy, self.adversary_accuracy):
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"Accuracy must lie in [0, 1], got {value}")

    def with_accuracies(self, target: float, adversary: float) -> "TradeoffPoint":
        return TradeoffPoint(self.lam, self.r, self.J_y, self.J_s, target, adversary)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "r": self.r,
            "J_y": self.J_y,
            "J_s": self.J_s,
            "target_accuracy": self.target_accuracy,
            "adversary_accuracy": self.adversary_accuracy,
        }
