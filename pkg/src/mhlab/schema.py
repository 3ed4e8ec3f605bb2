"""JSON schemas for experiment configs and reports."""

SCHEMA_VERSION = "1.0"

_POS = {"type": "number", "exclusiveMinimum": 0}
_VEC_OR_RANDOM = {
    "oneOf": [
        {"type": "array", "items": _POS, "minItems": 1},
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["random"],
            "properties": {
                "random": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "seed": {"type": "integer", "minimum": 0},
                        "spread": {"type": "number", "minimum": 0},
                        "low": _POS,
                        "high": _POS,
                    },
                }
            },
        },
    ]
}
_ORLICZ = {
    "oneOf": [
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["type", "p"],
            "properties": {"type": {"const": "power"}, "p": _POS},
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["type", "p"],
            "properties": {
                "type": {"const": "mixed"},
                "p": {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2},
            },
        },
    ]
}
PHI_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "p"],
            "properties": {"kind": {"const": "power"}, "p": _POS},
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "orlicz"],
            "properties": {"kind": {"const": "orlicz"}, "orlicz": _ORLICZ},
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "w"],
            "properties": {"kind": {"const": "weighted"}, "w": _VEC_OR_RANDOM, "orlicz": _ORLICZ},
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "p"],
            "properties": {"kind": {"const": "variable"}, "p": _VEC_OR_RANDOM},
        },
    ]
}

_KINDS = {"type": "array", "items": {"enum": ["s", "P", "Q", "S", "M"]}, "uniqueItems": True}
_Q_LIST = {"type": "array", "items": {"oneOf": [{"type": "number", "minimum": 1}, {"const": "inf"}]}}
_EXPERIMENT = {
    "oneOf": [
        {"enum": ["norms", "decompose", "validate", "equivalence", "inequalities", "convergence", "sublinear"]},
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["name"],
            "properties": {
                "name": {"enum": ["norms", "decompose", "validate", "equivalence", "inequalities",
                                  "convergence", "sublinear"]},
                "kinds": _KINDS,
                "q": _Q_LIST,
                "operator": {"enum": ["M", "S", "s"]},
                "source": {"enum": ["WHs", "WHS", "WHM", "WP", "WQ"]},
                "depth": {"type": "integer", "minimum": 1, "maximum": 20},
                "p": _POS,
                "truncations": {"type": "array", "items": _POS},
                "space_depth": {"type": "integer", "minimum": 1, "maximum": 14},
            },
        },
    ]
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mhlab experiment config",
    "type": "object",
    "additionalProperties": False,
    "required": ["phi", "experiments"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "trials": {"type": "integer", "minimum": 1, "maximum": 100000},
        "filtration": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["family"],
                    "properties": {
                        "family": {"enum": ["dyadic", "random", "skewed"]},
                        "depths": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 14},
                                   "minItems": 1},
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["family", "probs", "levels"],
                    "properties": {
                        "family": {"const": "explicit"},
                        "probs": {"type": "array", "items": _POS, "minItems": 1},
                        "levels": {"type": "array"},
                    },
                },
            ]
        },
        "martingales": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        },
        "sparsity": {"type": "number", "minimum": 0, "maximum": 1},
        "scale": _POS,
        "phi": PHI_SCHEMA,
        "experiments": {"type": "array", "items": _EXPERIMENT},
        "gates": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "aq_q": {"type": "number", "minimum": 1},
                "k_max": _POS,
                "r_max": {"type": "number", "minimum": 1},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "reconstruction": _POS,
                "convergence": {"type": "array", "items": _POS, "minItems": 1},
            },
        },
        "t_grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"min": _POS, "max": _POS, "num": {"type": "integer", "minimum": 2, "maximum": 4096}},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}, "csv": {"type": "boolean"}},
        },
    },
}

_FLOAT = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mhlab report",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "tool", "version", "seed", "seed_source", "config", "experiments",
                 "assertions", "passed"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "tool": {"const": "mhlab"},
        "version": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "seed_source": {"enum": ["cli", "env", "config", "default"]},
        "config": {"type": "object"},
        "experiments": {"type": "object"},
        "assertions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["experiment", "name", "passed"],
                "properties": {
                    "experiment": {"type": "string"},
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "value": _FLOAT,
                    "bound": _FLOAT,
                },
            },
        },
        "passed": {"type": "boolean"},
    },
}
