# gpa/__init__.py
from gpa.context import GAMMA_EDGES, GAMMA_GRAPH, GAMMA_LABELS, GraphContext, Shading, flip
from gpa.element import GpaElement, GradeError, ShadingError, jones_projection, jones_wenzl2
from gpa.generators import GeneratorSpec, braiding, build_a, build_b, build_r, build_s, dual_a, dual_b
from gpa.suite import octahedron, run_suite, verify_generator_family

__all__ = [
    "GAMMA_EDGES",
    "GAMMA_GRAPH",
    "GAMMA_LABELS",
    "GeneratorSpec",
    "GpaElement",
    "GradeError",
    "GraphContext",
    "Shading",
    "ShadingError",
    "braiding",
    "build_a",
    "build_b",
    "build_r",
    "build_s",
    "dual_a",
    "dual_b",
    "flip",
    "jones_projection",
    "jones_wenzl2",
    "octahedron",
    "run_suite",
    "verify_generator_family",
]
