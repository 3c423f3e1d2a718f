"""Small problem files shipped with the package."""
from importlib import resources

from .formats import parse_model

BUILTINS = ("chain2", "toy2agent")


def builtin_text(name: str) -> str:
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin {name!r}; available: {', '.join(BUILTINS)}")
    return resources.files("decem").joinpath(f"data/{name}.dpomdp").read_text(encoding="utf-8")


def load_builtin(name: str, gamma=None):
    return parse_model(builtin_text(name), source=f"builtin:{name}", gamma=gamma)
