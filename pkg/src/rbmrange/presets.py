"""The reference experiment: an ellipse with a circular hole, restoring
drift towards the origin, and its closed-form stationary density.

The domain is the 3 x 2 ellipse (semi-axes 1.5 and 1) minus the disk of
radius 1/2 centred at (4/5, 0).  With drift mu(x) = -x the stationary
density is exp(-|x|^2)/c on the domain, where c is the masked integral
of exp(-|x|^2); its frozen value ships as package data along with
oracle-measured super-level-set probabilities, and can be regenerated
with the CLI's oracle subcommand.
"""

import json
from importlib import resources

import numpy as np

from .domains import DifferenceDomain, Disk, Ellipse
from .dynamics import linear_drift
from .oracle import AnalyticDensity, normalization_constant, region_measure

REFERENCE_LEVELS = (0.44, 0.41, 0.34, 0.27, 0.03)
_FIXTURE = "reference_oracle.json"


def reference_domain():
    return DifferenceDomain(Ellipse((0.0, 0.0), (1.5, 1.0)),
                            Disk((0.8, 0.0), 0.5))


def reference_drift():
    return linear_drift(center=(0.0, 0.0), rate=1.0)


def quadratic_potential(P):
    P = np.atleast_2d(np.asarray(P, dtype=float))
    return P[:, 0] ** 2 + P[:, 1] ** 2


def quadratic_potential_grad(P):
    return 2.0 * np.atleast_2d(np.asarray(P, dtype=float))


def load_oracle_fixture():
    """The frozen oracle fixture shipped with the package."""
    text = resources.files("rbmrange").joinpath(f"data/{_FIXTURE}").read_text()
    return json.loads(text)


def reference_density(c=None):
    """AnalyticDensity of the reference experiment.

    Uses the frozen normalization constant unless one is supplied.
    """
    if c is None:
        c = load_oracle_fixture()["c"]
    return AnalyticDensity(reference_domain(), quadratic_potential,
                           quadratic_potential_grad, c)


def generate_oracle_fixture(resolution=2000, levels=REFERENCE_LEVELS,
                            measure_resolution=1000):
    """Recompute the frozen fixture from scratch (Richardson-verified)."""
    domain = reference_domain()
    c = normalization_constant(domain, quadratic_potential, resolution)
    density = AnalyticDensity(domain, quadratic_potential,
                              quadratic_potential_grad, c)
    contents = {}
    for lam in levels:
        contents[repr(float(lam))] = region_measure(
            density, float(lam), measure_resolution)
    return {
        "c": c,
        "lambda_contents": contents,
        "generation": {
            "resolution": int(resolution),
            "measure_resolution": int(measure_resolution),
            "domain": domain.spec,
            "potential": "x^2 + y^2",
        },
    }
