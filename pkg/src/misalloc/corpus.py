"""The shipped 1-D problem corpus and 2-D test scenes.

Problems live as versioned JSON data files inside the package so the
test suite and the CLI exercise exactly the same definitions.
"""

from __future__ import annotations

from importlib import resources

from .problems import load_problem

__all__ = ["corpus_names", "corpus_path", "load_corpus_problem",
           "load_corpus", "scene_path", "scene_names"]


def _data_dir(kind):
    return resources.files("misalloc").joinpath("data", kind)


def corpus_names():
    return sorted(p.stem for p in _data_dir("problems").iterdir()
                  if p.name.endswith(".json"))


def corpus_path(name):
    path = _data_dir("problems").joinpath(f"{name}.json")
    if not path.is_file():
        raise FileNotFoundError(f"no corpus problem named {name!r}")
    return path


def load_corpus_problem(name):
    return load_problem(corpus_path(name))


def load_corpus():
    """All shipped problems, keyed by name."""
    return {name: load_corpus_problem(name) for name in corpus_names()}


def scene_names():
    return sorted(p.stem for p in _data_dir("scenes").iterdir()
                  if p.name.endswith(".json"))


def scene_path(name):
    path = _data_dir("scenes").joinpath(f"{name}.json")
    if not path.is_file():
        raise FileNotFoundError(f"no scene named {name!r}")
    return path
