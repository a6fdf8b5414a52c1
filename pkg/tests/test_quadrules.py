"""Tests for the adaptive quadrature building blocks."""

import math

import numpy as np

from sslab.quadrules import gl_nodes, quad_gl, quad_segment, trapezoid_periodic


def test_gl_nodes_cached_and_correct_count():
    x, w = gl_nodes(32)
    assert len(x) == len(w) == 32
    # weights integrate constants exactly
    assert abs(np.sum(w) - 2.0) < 1e-14
    assert gl_nodes(32)[0] is x


def test_quad_gl_smooth_exponential():
    val = quad_gl(np.exp, 0.0, 1.0)
    assert abs(val - (math.e - 1.0)) < 1e-13


def test_quad_gl_resolves_log_endpoint():
    # integral of ln(u) on (0, 1] is -1; dyadic refinement must dig in
    val = quad_gl(np.log, 0.0, 1.0)
    assert abs(val - (-1.0)) < 1e-9


def test_quad_segment_complex_path():
    val = quad_segment(lambda z: z, 0.0, 1.0 + 1.0j)
    assert abs(val - 1.0j) < 1e-13


def test_quad_segment_sqrt_start():
    val = quad_segment(lambda z: 1.0 / np.sqrt(z), 0.0, 1.0, sqrt_at_start=True)
    assert abs(val - 2.0) < 1e-12


def test_quad_segment_sqrt_end():
    val = quad_segment(lambda z: 1.0 / np.sqrt(1.0 - z), 0.0, 1.0, sqrt_at_end=True)
    assert abs(val - 2.0) < 1e-12


def test_quad_segment_sqrt_both_ends():
    val = quad_segment(lambda z: 1.0 / np.sqrt(z * (1.0 - z)), 0.0, 1.0,
                       sqrt_at_start=True, sqrt_at_end=True)
    assert abs(val - math.pi) < 1e-11


def test_trapezoid_periodic_fourier_modes():
    phi = 2.0 * math.pi * np.arange(64) / 64
    assert abs(trapezoid_periodic(np.exp(1j * phi), 2.0 * math.pi)) < 1e-13
    assert abs(trapezoid_periodic(np.ones(64), 2.0 * math.pi) - 2.0 * math.pi) < 1e-13
