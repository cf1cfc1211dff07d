"""Shipped fields, irrational generators and example polynomial families."""
from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional

import yaml

from .reals import PRESET_GENERATORS
from .ring import NumberFieldSpec, make_field

BUILTIN_FIELDS: Dict[str, dict] = {
    "rational": {"min_poly": [0, 1], "description": "Q"},
    "gaussian": {"min_poly": [1, 0, 1], "description": "Q(i), theta^2 = -1"},
    "sqrt2": {"min_poly": [-2, 0, 1], "description": "Q(sqrt 2), theta^2 = 2"},
    "cubic": {"min_poly": [-1, -1, 0, 1], "description": "x^3 - x - 1"},
}

# Families: coefficient literals (lowest degree first); a coefficient is a
# rational string or a coordinate list over the power basis.
BUILTIN_FAMILIES: Dict[str, dict] = {
    "squares": {
        "field": "rational",
        "polys": [["0", "0", "1"]],
        "description": "{x^2}",
    },
    "shifted_square": {
        "field": "rational",
        "polys": [["1", "0", "1"]],
        "description": "{x^2 + 1} (no root mod 3)",
    },
    "square_and_linear": {
        "field": "rational",
        "polys": [["0", "0", "1"], ["-1", "1"]],
        "description": "{x^2, x - 1} (no common root mod 2)",
    },
    "triple_r1_s2": {
        "field": "rational",
        "polys": [["0", "0", "1"], ["0", "0", "2"], ["0", "0", "3"]],
        "description": "{rp, sp, (r+s)p} with r=1, s=2, p=x^2",
    },
    "triple_gaussian": {
        "field": "gaussian",
        "polys": [[[0, 0], [0, 0], [1, 0]], [[0, 0], [0, 0], [0, 1]], [[0, 0], [0, 0], [1, 1]]],
        "description": "{rp, sp, (r+s)p} over Z[i] with r=1, s=i, p=x^2",
    },
    "independent_pair": {
        "field": "rational",
        "polys": [["0", "1"], ["0", "0", "1"]],
        "description": "{x, x^2}, independent together with constants",
    },
    "independent_gaussian": {
        "field": "gaussian",
        "polys": [[[0, 0], [1, 0]], [[0, 0], [0, 0], [1, 0]]],
        "description": "{x, x^2} over Z[i]",
    },
    "binomial_pair": {
        "field": "rational",
        "polys": [["0", "1"], ["0", "-1/2", "1/2"]],
        "description": "{x, x(x-1)/2}, integer-valued with a denominator",
    },
}


class PresetRegistry:
    """Built-ins plus optional user YAML files from a directory.

    Each user file may hold ``fields:`` and ``families:`` mappings in the same
    shape as the built-ins; user entries override built-ins of the same name.
    """

    def __init__(self, preset_dir: Optional[str] = None):
        self.fields = {k: dict(v) for k, v in BUILTIN_FIELDS.items()}
        self.families = {k: dict(v) for k, v in BUILTIN_FAMILIES.items()}
        self.sources: Dict[str, str] = {}
        if preset_dir:
            root = Path(preset_dir)
            if root.is_dir():
                for path in sorted(root.glob("*.y*ml")):
                    data = yaml.safe_load(path.read_text()) or {}
                    if not isinstance(data, dict):
                        raise ValueError(f"{path}: preset file must be a mapping")
                    for name, spec in (data.get("fields") or {}).items():
                        self.fields[name] = dict(spec)
                        self.sources[f"field:{name}"] = str(path)
                    for name, spec in (data.get("families") or {}).items():
                        self.families[name] = dict(spec)
                        self.sources[f"family:{name}"] = str(path)
        self._cache: Dict[str, NumberFieldSpec] = {}

    def field(self, name: str) -> NumberFieldSpec:
        if name not in self.fields:
            raise KeyError(f"unknown field preset {name!r}")
        if name not in self._cache:
            spec = self.fields[name]
            self._cache[name] = make_field(spec["min_poly"], assert_irreducible=bool(spec.get("assert_irreducible")),
                                           name=name)
        return self._cache[name]

    def family(self, name: str) -> dict:
        if name not in self.families:
            raise KeyError(f"unknown family preset {name!r}")
        return self.families[name]

    def listing(self) -> str:
        lines: List[str] = ["fields:"]
        for name, spec in self.fields.items():
            desc = spec.get("description", "")
            lines.append(f"  {name}: min_poly={spec['min_poly']} {desc}".rstrip())
        lines.append("generators:")
        for name, g in PRESET_GENERATORS.items():
            lines.append(f"  {name}: {g.a} + {g.b}*sqrt({g.D})")
        lines.append("  sqrtN: any non-square N")
        lines.append("families:")
        for name, spec in self.families.items():
            lines.append(f"  {name} [{spec.get('field', 'rational')}]: {spec.get('description', spec.get('polys'))}")
        return "\n".join(lines) + "\n"


def list_presets(preset_dir: Optional[str] = None) -> str:
    return PresetRegistry(preset_dir).listing()
