"""Gizatullin surfaces S_{P,Q}: exact verification suites, certificates and automorphism words."""

import json
from fractions import Fraction

from ._giz import InvalidInput, NumericFailure, Surface, suite_names
from . import _giz

__all__ = ["InvalidInput", "NumericFailure", "Surface", "suite_names", "verify", "identity", "theta",
           "move", "flow", "certificate"]


def _scalar(c):
    if isinstance(c, complex):
        return f"{c.real!r}{c.imag:+}i"
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def _point(p):
    return p if isinstance(p, str) else ",".join(_scalar(c) for c in p)


def verify(P="x - 1", Q="u - 1", suites=("all",), range=2, seed=0):
    """report-v1 as a dict."""
    return json.loads(_giz.verify_json(P, Q, list(suites), range, seed))


def identity(P, Q, name, **params):
    return json.loads(_giz.identity_json(P, Q, name, params))


def theta(P, Q, lam=None, seed=0):
    return json.loads(_giz.theta_json(P, Q, None if lam is None else _scalar(lam), seed))


def move(P, Q, start, end, mode="algebraic"):
    """Plans and executes a word taking start to end."""
    return json.loads(_giz.move_json(P, Q, _point(start), _point(end), mode))


def flow(P, Q, field, time, point):
    return json.loads(_giz.flow_json(P, Q, field, _scalar(time), _point(point)))


def certificate(P, Q, range=1):
    """cert-v1 as a dict."""
    return json.loads(_giz.cert_json(P, Q, range))
