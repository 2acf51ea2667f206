"""Embedded named scenario configurations, one per catalog example.

Each entry is a plain JSON-able dict in the same schema accepted from
files, so the named scenarios double as schema documentation. Degree
tuples run over the scenario's invariant generators with the path
parameter in the last slot.
"""

import math

SQRT2 = math.sqrt(2.0)

BUILTIN_SCENARIOS = {
    "circle_pitchfork": {
        "group": "circle",
        "coefficients": {
            "f": [{"deg": [0, 1], "c": 1.0}, {"deg": [1, 0], "c": -1.0}],
            "g": [{"deg": [0, 0], "c": 1.0}],
        },
        "lambda_interval": [-1.0, 1.0],
    },
    "torus2_diagonal": {
        "group": "torus2",
        "coefficients": {
            "f1": [{"deg": [0, 0, 1], "c": 1.0}, {"deg": [1, 0, 0], "c": -0.5},
                   {"deg": [0, 1, 0], "c": -0.5}],
            "f2": [{"deg": [0, 0, 1], "c": 1.0}, {"deg": [1, 0, 0], "c": -0.5},
                   {"deg": [0, 1, 0], "c": -0.5}],
            "g1": [{"deg": [0, 0, 0], "c": 1.0}],
            "g2": [{"deg": [0, 0, 0], "c": SQRT2}],
        },
        "lambda_interval": [-1.0, 1.0],
    },
    "o2_c_rigid": {
        "group": "o2",
        "model": "c",
        "coefficients": {
            "f": [{"deg": [0, 1], "c": 1.0}, {"deg": [1, 0], "c": -1.0}],
        },
        "lambda_interval": [-1.0, 1.0],
    },
    "o2_c2": {
        "group": "o2",
        "model": "c2",
        "coefficients": {
            "f": [{"deg": [0, 0, 0, 0, 1], "c": 1.0},
                  {"deg": [1, 0, 0, 0, 0], "c": -1.0},
                  {"deg": [0, 1, 0, 0, 0], "c": -1.0}],
            "g": [{"deg": [1, 0, 0, 0, 0], "c": 1.0},
                  {"deg": [0, 1, 0, 0, 0], "c": -1.0}],
            "h": [{"deg": [0, 0, 0, 0, 0], "c": 0.2}],
            "k": [],
        },
        "lambda_interval": [-1.0, 1.0],
    },
    "r_x_circle_demo": {
        "group": "r_x_circle",
        "coefficients": {
            "f": [{"deg": [0, 1], "c": 1.0}, {"deg": [1, 0], "c": -1.0}],
            "g": [{"deg": [0, 0], "c": 1.0}],
            "h": [{"deg": [0, 0], "c": 0.3}, {"deg": [1, 0], "c": 0.5}],
        },
        "lambda_interval": [-1.0, 1.0],
    },
    "so3_bundle_demo": {
        "group": "so3",
        "coefficients": {
            "f": [{"deg": [0, 1], "c": 1.0}, {"deg": [1, 0], "c": -1.0}],
            "q": [{"deg": [0, 0], "c": 1.0}],
            "h1": [{"deg": [0, 0], "c": 0.4}, {"deg": [1, 0], "c": 0.1}],
            "h2": [{"deg": [0, 0], "c": -0.3}],
        },
        "lambda_interval": [-1.0, 1.0],
    },
}
