"""Closed-form time-dependent Hamiltonians on the embedded sphere.

Hamiltonians are polynomials in the ambient coordinates (x1, x2, x3) with
time-dependent coefficients; values, gradients and Hessians are exact, so
flow integration and quantization never rely on interpolated symbols.
"""

from __future__ import annotations

import math

import numpy as np


class Monomial:
    """c(t) * x1^p1 * x2^p2 * x3^p3 with a smooth time coefficient."""

    def __init__(self, powers, coefficient=1.0, time_fn=None):
        self.powers = tuple(int(p) for p in powers)
        if len(self.powers) != 3 or min(self.powers) < 0:
            raise ValueError("powers must be three non-negative integers")
        self.coefficient = float(coefficient)
        self.time_fn = time_fn

    def _c(self, t):
        if self.time_fn is None:
            return self.coefficient
        return self.coefficient * self.time_fn(t)

    def _mono(self, x, powers):
        out = np.ones(x.shape[:-1])
        for axis, p in enumerate(powers):
            if p:
                out = out * x[..., axis] ** p
        return out

    def value(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        return self._c(t) * self._mono(x, self.powers)

    def grad(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        g = np.zeros(x.shape)
        for axis, p in enumerate(self.powers):
            if p:
                lowered = list(self.powers)
                lowered[axis] -= 1
                g[..., axis] = p * self._mono(x, lowered)
        return self._c(t) * g

    def hess(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        h = np.zeros(x.shape[:-1] + (3, 3))
        for i, p in enumerate(self.powers):
            if not p:
                continue
            for j, q in enumerate(self.powers):
                lowered = list(self.powers)
                lowered[i] -= 1
                if i == j:
                    if p - 1:
                        lowered[i] -= 1
                        h[..., i, i] = p * (p - 1) * self._mono(x, lowered)
                elif q:
                    lowered[j] -= 1
                    h[..., i, j] = p * q * self._mono(x, lowered)
        return self._c(t) * h


class Polynomial:
    """Sum of monomials; the generic closed-form Hamiltonian."""

    def __init__(self, terms):
        self.terms = list(terms)

    def value(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for term in self.terms:
            out += term.value(x, t)
        return out

    def grad(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for term in self.terms:
            out += term.grad(x, t)
        return out

    def hess(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (3, 3))
        for term in self.terms:
            out += term.hess(x, t)
        return out

    def separable_terms(self):
        """(time_fn, static Polynomial) pairs, for operator precomputation.

        Terms sharing a time dependence are grouped so that quantum
        generators can be assembled as fixed matrices with scalar
        time-dependent coefficients.
        """
        groups = {}
        for term in self.terms:
            key = id(term.time_fn) if term.time_fn is not None else None
            groups.setdefault(key, []).append(term)
        out = []
        for _, terms in groups.items():
            static = Polynomial(
                [Monomial(trm.powers, trm.coefficient) for trm in terms]
            )
            out.append((terms[0].time_fn, static))
        return out


def constant(c):
    return Polynomial([Monomial((0, 0, 0), c)])


def height(scale=1.0):
    return Polynomial([Monomial((0, 0, 1), scale)])


def coordinate(axis, scale=1.0):
    powers = [0, 0, 0]
    powers[axis] = 1
    return Polynomial([Monomial(tuple(powers), scale)])


def height_squared(scale=1.0):
    return Polynomial([Monomial((0, 0, 2), scale)])


def tilted_height(c, scale=1.0):
    return Polynomial([Monomial((0, 0, 0), c), Monomial((0, 0, 1), scale)])


def sin_pi_t(t):
    return math.sin(math.pi * t)


def identity_t(t):
    return t


def time_mixed():
    """sin(pi t) x1 + t x3^2, the generic smooth time-dependent preset."""
    return Polynomial(
        [
            Monomial((1, 0, 0), 1.0, time_fn=sin_pi_t),
            Monomial((0, 0, 2), 1.0, time_fn=identity_t),
        ]
    )


PRESETS = {
    "constant": lambda c=1.0: constant(c),
    "height": lambda scale=1.0: height(scale),
    "x1": lambda scale=1.0: coordinate(0, scale),
    "x2": lambda scale=1.0: coordinate(1, scale),
    "tilted-height": lambda c=0.5, scale=1.0: tilted_height(c, scale),
    "height-squared": lambda scale=1.0: height_squared(scale),
    "time-mixed": lambda: time_mixed(),
}


class Reparametrized:
    """Generator of the same path traversed with a new time schedule.

    For a schedule s with s(0) = 0, the path t -> flow_{s(t)} is generated
    by s'(t) H_{s(t)}.
    """

    def __init__(self, h, schedule, schedule_rate):
        self.h = h
        self.schedule = schedule
        self.schedule_rate = schedule_rate

    def value(self, x, t=0.0):
        return self.schedule_rate(t) * self.h.value(x, self.schedule(t))

    def grad(self, x, t=0.0):
        return self.schedule_rate(t) * self.h.grad(x, self.schedule(t))

    def hess(self, x, t=0.0):
        return self.schedule_rate(t) * self.h.hess(x, self.schedule(t))


def preset(name, **params):
    try:
        factory = PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}"
        ) from None
    return factory(**params)
