from app.models.dataset import Dataset, FeatureEncoding
from app.models.encoder import Encoder, SolverMode
from app.models.tradeoff import TradeoffPoint

__all__ = [
    "Dataset",
    "FeatureEncoding",
    "Encoder",
    "SolverMode",
    "TradeoffPoint",
]
