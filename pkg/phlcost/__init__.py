__all__ = [
    "analysis.py",
    "bound.py",
    "cli.py",
    "config.py",
    "dist.py",
    "errors.py",
    "execution.py",
    "grammar.py",
    "montecarlo.py",
    "semantics.py",
    "support.py",
    "syntax.py",
]
