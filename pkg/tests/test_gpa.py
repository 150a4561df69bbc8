import cmath
import math

import pytest
from pydantic import ValidationError

from gpa import (
    GeneratorSpec,
    GpaElement,
    GradeError,
    GraphContext,
    ShadingError,
    braiding,
    build_a,
    build_b,
    dual_a,
    dual_b,
    jones_projection,
    jones_wenzl2,
    run_suite,
    verify_generator_family,
)
from gpa.bricks import Brick, BrickDiagram, eval_brick, load_diagrams
from gpa.element import loop_key, parse_loop
from gpa.suite import OCTAHEDRON_REFERENCE, calibration_checks, octahedron

LAM = cmath.exp(0.7j)
TOL = 1e-9


def _failed(checks):
    return [(c.name, c.max_deviation) for c in checks if not c.passed]


def test_gamma_context(gamma):
    assert gamma.delta == pytest.approx(1 + math.sqrt(2))
    assert gamma.d(0) == pytest.approx(1.0)
    assert gamma.d(7) == pytest.approx(1 + math.sqrt(2))
    assert gamma.eigen_residual() < 1e-9
    assert gamma.base_vertices("+") == [0, 2, 4, 6]


def test_context_rejects_bad_graphs():
    with pytest.raises(ValueError):
        GraphContext([(0, 2)], even=[0, 2])
    with pytest.raises(ValueError):
        GraphContext([(0, 1), (0, 1)], even=[0])


def test_loop_keys():
    assert parse_loop("0767") == (0, 7, 6, 7)
    assert loop_key((0, 7, 6, 7)) == "0767"
    assert parse_loop("10.3.4") == (10, 3, 4)


def test_calibration(gamma):
    assert _failed(calibration_checks(gamma, TOL)) == []


def test_trace_and_projections(gamma):
    d = gamma.delta
    assert GpaElement.identity(gamma, 3, "-").trace() == pytest.approx(d**3)
    e1 = jones_projection(gamma, 1, 2)
    assert e1.trace() == pytest.approx(1.0)
    assert jones_wenzl2(gamma).trace() == pytest.approx(d * d - 1)


def test_rotation_round_trip(gamma):
    a = build_a(gamma, LAM)
    assert a.rotate(1).shading == "-"
    assert a.rotate(1).rotate(-1).distance(a) < TOL


@pytest.mark.parametrize("omega,eps", [(1, None), (-1, 1), (-1, -1)])
def test_generators_are_uncappable_self_adjoint_involutions(gamma, omega, eps):
    spec = GeneratorSpec.for_family(omega, LAM, eps)
    g = build_a(gamma, LAM) if omega == 1 else build_b(gamma, LAM, eps)
    f2 = jones_wenzl2(gamma)
    assert g.adjoint().distance(g) < TOL
    assert g.is_uncappable()
    assert (g @ g).distance(f2) < TOL
    assert g.rotate(2).distance(spec.omega * g) < TOL
    dual = dual_a(g) if omega == 1 else dual_b(g)
    assert dual.shading == "-"
    assert dual.adjoint().distance(dual) < TOL


def test_b_conjugation_flips_sign(gamma):
    assert build_b(gamma, LAM, 1).conj().distance(build_b(gamma, LAM.conjugate(), -1)) < TOL


@pytest.mark.parametrize("omega,eps", [(1, None), (-1, 1), (-1, -1)])
def test_braidings_invert(gamma, omega, eps):
    spec = GeneratorSpec.for_family(omega, LAM, eps)
    x, xinv = braiding(gamma, spec)
    one = GpaElement.identity(gamma, 2)
    assert (x @ xinv).distance(one) < TOL
    assert (xinv @ x).distance(one) < TOL


def test_generator_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec.for_family(2, LAM)
    with pytest.raises(ValueError):
        GeneratorSpec.for_family(-1, LAM, 0)
    with pytest.raises(ValueError):
        GeneratorSpec.for_family(1, 2.0)
    spec = GeneratorSpec.for_family(-1, LAM, -1)
    assert spec.sigma == -1j
    assert spec.a == pytest.approx(cmath.exp(-3j * math.pi / 8))


def test_build_rejects_other_graphs():
    ctx = GraphContext([(0, 1), (1, 2)], even=[0, 2])
    with pytest.raises(ValueError):
        build_a(ctx, LAM)


def test_grade_and_shading_errors(gamma):
    a = build_a(gamma, LAM)
    with pytest.raises(GradeError):
        a @ GpaElement.identity(gamma, 3)
    with pytest.raises(GradeError):
        a + a.rotate(1)
    with pytest.raises(GradeError):
        GpaElement.from_coefficients(gamma, 2, "+", {"07": 1})
    with pytest.raises(ShadingError):
        GpaElement.from_coefficients(gamma, 2, "+", {"7074": 1})
    with pytest.raises(ValueError):
        GpaElement.from_coefficients(gamma, 2, "+", {"0101": 1})
    with pytest.raises(ValueError):
        a.cap(5)


def test_brick_diagrams():
    diagrams = load_diagrams()
    assert {"single_closed", "sigma_braid_left", "sigma_braid_right", "octahedron"} <= set(diagrams)
    with pytest.raises(ValidationError):
        BrickDiagram(strands=3, bricks=[Brick(position=3, element="X")])


def test_brick_evaluation(gamma):
    x, xinv = braiding(gamma, GeneratorSpec.for_family(1, LAM))
    # a single closed brick is the trace of the element
    value = eval_brick(load_diagrams()["single_closed"], {"X": x})
    assert value == pytest.approx(x.trace())
    wrong = BrickDiagram(strands=3, bricks=[Brick(position=2, element="X", clicks=0)])
    with pytest.raises(ShadingError):
        eval_brick(wrong, {"X": x})
    with pytest.raises(KeyError):
        eval_brick(wrong, {"Y": x})


# -----------------------------
# Full sweeps
# -----------------------------
@pytest.mark.slow
@pytest.mark.parametrize("omega,eps", [(1, None), (-1, 1), (-1, -1)])
def test_single_sample_suite(gamma, omega, eps):
    assert _failed(run_suite(gamma, GeneratorSpec.for_family(omega, LAM, eps), TOL)) == []


@pytest.mark.slow
def test_octahedron_family(gamma):
    lams = [cmath.exp(1j * t) for t in (0.3, 1.4, 2.9)]
    report = verify_generator_family(gamma, -1, lams, TOL, calibrate=False)
    assert _failed(report.checks) == []
    plus, minus = report.octahedron["eps=+1"], report.octahedron["eps=-1"]
    assert plus[0] == pytest.approx(-minus[0], abs=1e-9)
    for eps, (re, im) in ((1, plus), (-1, minus)):
        ratio = complex(re, im) / (eps * OCTAHEDRON_REFERENCE)
        assert abs(ratio.imag) < 1e-6
        assert ratio.real > 1e-6
    assert report.octahedron_ratio > 0


def test_octahedron_uses_rotated_dual_bricks(gamma):
    b = build_b(gamma, LAM, 1)
    diagram = load_diagrams()["octahedron"]
    assert {br.element for br in diagram.bricks if br.position == 2} == {"Bdual"}
    value = octahedron(gamma, LAM, 1)
    assert value == pytest.approx(eval_brick(diagram, {"B": b, "Bdual": dual_b(b)}))
    ratio = value / OCTAHEDRON_REFERENCE
    assert abs(ratio.imag) < 1e-6
    assert ratio.real > 0
