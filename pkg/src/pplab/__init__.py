"""Posted-price auctions against strategic buyers.

Seller algorithms are explicit state machines (:mod:`pplab.sellers`),
buyers are decision policies including the exact best response
(:mod:`pplab.buyers`), and :mod:`pplab.analysis` holds the closed-form
bounds and numeric checks they are compared against.
"""
from .game import (ConfigurationError, GameConfig, GameOutcome, IntractableError,
                   Transcript, discounted_surplus, play_game, score_game,
                   strategic_regret)
from .sellers import SellerSpec, make_seller
from .buyers import BuyerSpec, make_buyer, optimal_surplus

__version__ = "0.1.0"

__all__ = [
    "BuyerSpec", "ConfigurationError", "GameConfig", "GameOutcome", "IntractableError",
    "SellerSpec", "Transcript", "discounted_surplus", "make_buyer", "make_seller",
    "optimal_surplus", "play_game", "score_game", "strategic_regret",
]
