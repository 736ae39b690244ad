"""Line-breaking constructions of alpha-stable trees."""

from ._core import (
    Tree,
    __version__,
    chain,
    enumerate_shape_law,
    grow,
    ml_moment,
    run_suite,
    shape_formula_law,
    suite_names,
)

__all__ = [
    "Tree",
    "__version__",
    "chain",
    "enumerate_shape_law",
    "grow",
    "ml_moment",
    "run_suite",
    "shape_formula_law",
    "suite_names",
]
