from . import backtest, evaluate, fit, pareto, score, simulate

__all__ = ["pareto", "fit", "score", "evaluate", "simulate", "backtest"]
