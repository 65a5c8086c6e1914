"""Built-in initial profiles.

Every builder returns ``(v0, u0, theta0)``, three vectorised callables of
the mass coordinate that tend to the far-field state ``(1, 0, 1)``.
"""

import math

import numpy as np

ODD_BUMP_SCALE = math.sqrt(2.0 * math.e)  # makes max |x exp(-x^2)| equal 1


def bump(x, center=0.0, width=1.0):
    return np.exp(-(((np.asarray(x) - center) / width) ** 2))


def odd_bump(x, center=0.0, width=1.0):
    """Antisymmetric companion of :func:`bump` with unit peak."""
    s = (np.asarray(x) - center) / width
    return ODD_BUMP_SCALE * s * np.exp(-s * s)


def _const(c):
    return lambda x: np.full(np.shape(x), float(c))


def equilibrium():
    return _const(1.0), _const(0.0), _const(1.0)


def gaussian_bump(field="theta", amplitude=0.5, width=1.0, center=0.0):
    f = lambda x: amplitude * bump(x, center, width)
    if field == "v":
        return (lambda x: 1.0 + f(x)), _const(0.0), _const(1.0)
    if field == "u":
        return _const(1.0), f, _const(1.0)
    if field == "theta":
        return _const(1.0), _const(0.0), (lambda x: 1.0 + f(x))
    raise ValueError(f"field must be one of v, u, theta; got {field!r}")


def cold_spot(theta_min=0.1, width=1.0, center=0.0):
    """Temperature dip down to ``theta_min`` at ``center``; ``v = 1``, ``u = 0``."""
    depth = 1.0 - theta_min
    return _const(1.0), _const(0.0), (lambda x: 1.0 - depth * bump(x, center, width))


def large_data_composite(v_amplitude=0.8, theta_amplitude=0.5, u_amplitude=0.5, width=1.0, center=0.0):
    """Expanded, cold, sheared blob: ``v = 1 + a b``, ``theta = 1 - c b``, ``u = d b'``."""
    return (
        lambda x: 1.0 + v_amplitude * bump(x, center, width),
        lambda x: u_amplitude * odd_bump(x, center, width),
        lambda x: 1.0 - theta_amplitude * bump(x, center, width),
    )


BUILTINS = {
    "equilibrium": (equilibrium, ()),
    "gaussian-bump": (gaussian_bump, ("field", "amplitude", "width", "center")),
    "cold-spot": (cold_spot, ("theta_min", "width", "center")),
    "large-data-composite": (large_data_composite,
                             ("v_amplitude", "theta_amplitude", "u_amplitude", "width", "center")),
}


def build(name, **kwargs):
    try:
        fn, _ = BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(BUILTINS)}") from None
    return fn(**kwargs)
