"""Problem files: parsing, validation and canonical serialization.

A problem is a JSON object::

    {"d": 2, "r": 1,
     "generators": [{"exponent": [1, 1]}],
     "cutoff": 8, "p": [6], "budget": 10000, "window": 6}

Monomial generators carry ``exponent`` and an optional ``fiber`` (list of
r-vectors of rational literals such as ``"1/2"``; default: all of C^r).
Polynomial generators (probe mode) carry ``terms``: a list of
``{"exponent": [...], "coefficient": [...]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exact import fraction_str, to_fraction
from .lattice import MonomialSubmodule
from .probe import HomogeneousGeneratorSet

TOP_FIELDS = {"d", "r", "generators", "cutoff", "p", "budget", "window"}
MONOMIAL_FIELDS = {"exponent", "fiber"}
POLY_FIELDS = {"terms"}
TERM_FIELDS = {"exponent", "coefficient"}

DEFAULTS = {"cutoff": 8, "p": [6.0], "budget": 10000, "window": None}


class ProblemError(ValueError):
    """Invalid problem document; ``field`` names the offending location."""

    def __init__(self, field_name: str, reason: str):
        super().__init__(f"{field_name}: {reason}")
        self.field = field_name
        self.reason = reason


def _int(value, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProblemError(where, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ProblemError(where, f"must be >= {minimum}")
    return value


def _rational(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise ProblemError(where, f"floats are not exact; write {value!r} as a string like \"1/2\"")
    try:
        return to_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ProblemError(where, f"bad rational literal {value!r}") from None


def _unknown(obj: dict, allowed: set, where: str):
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ProblemError(where, f"unknown field(s) {extra}")


@dataclass
class ProblemSpec:
    d: int
    r: int
    kind: str  # "monomial" | "polynomial"
    generators: list = field(default_factory=list)
    cutoff: int = 8
    p: list[float] = field(default_factory=lambda: [6.0])
    budget: int = 10000
    window: int | None = None

    def submodule(self) -> MonomialSubmodule:
        if self.kind != "monomial":
            raise ProblemError("generators", "exact commands need monomial generators")
        return MonomialSubmodule(self.d, self.r, tuple((tuple(e), tuple(map(tuple, f))) for e, f in self.generators))

    def generator_set(self) -> HomogeneousGeneratorSet:
        if self.kind == "monomial":
            return HomogeneousGeneratorSet.from_monomial(self.submodule())
        gens = tuple(tuple((tuple(e), tuple(c)) for e, c in g) for g in self.generators)
        return HomogeneousGeneratorSet(self.d, self.r, gens)

    def canonical(self) -> dict[str, Any]:
        if self.kind == "monomial":
            gens = [
                {"exponent": list(e), "fiber": [[fraction_str(x) for x in v] for v in f]}
                for e, f in self.generators
            ]
        else:
            gens = [
                {"terms": [{"exponent": list(e), "coefficient": [fraction_str(x) for x in c]} for e, c in g]}
                for g in self.generators
            ]
        out = {
            "d": self.d,
            "r": self.r,
            "generators": gens,
            "cutoff": self.cutoff,
            "p": [float(x) for x in self.p],
            "budget": self.budget,
        }
        if self.window is not None:
            out["window"] = self.window
        return out


def serialize(spec: ProblemSpec) -> str:
    return json.dumps(spec.canonical(), sort_keys=True, separators=(",", ":"))


def _exponent(value, d: int, where: str) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise ProblemError(where, "expected a list of integers")
    exps = tuple(_int(x, f"{where}[{i}]", 0) for i, x in enumerate(value))
    if len(exps) != d:
        raise ProblemError(where, f"exponent length {len(exps)} != d={d}")
    return exps


def _vector(value, r: int, where: str) -> tuple[Fraction, ...]:
    if not isinstance(value, list):
        if r == 1:
            value = [value]
        else:
            raise ProblemError(where, "expected a list of rationals")
    vec = tuple(_rational(x, f"{where}[{i}]") for i, x in enumerate(value))
    if len(vec) != r:
        raise ProblemError(where, f"vector length {len(vec)} != r={r}")
    return vec


def problem_from_dict(doc: Any) -> ProblemSpec:
    if not isinstance(doc, dict):
        raise ProblemError("<root>", "expected a JSON object")
    _unknown(doc, TOP_FIELDS, "<root>")
    for req in ("d", "r", "generators"):
        if req not in doc:
            raise ProblemError(req, "missing required field")
    d = _int(doc["d"], "d", 1)
    r = _int(doc["r"], "r", 1)
    raw = doc["generators"]
    if not isinstance(raw, list):
        raise ProblemError("generators", "expected a list")
    kinds = set()
    gens = []
    for gi, g in enumerate(raw):
        where = f"generators[{gi}]"
        if not isinstance(g, dict):
            raise ProblemError(where, "expected an object")
        if "terms" in g:
            _unknown(g, POLY_FIELDS, where)
            kinds.add("polynomial")
            terms = []
            if not isinstance(g["terms"], list) or not g["terms"]:
                raise ProblemError(f"{where}.terms", "expected a non-empty list")
            for ti, t in enumerate(g["terms"]):
                tw = f"{where}.terms[{ti}]"
                if not isinstance(t, dict):
                    raise ProblemError(tw, "expected an object")
                _unknown(t, TERM_FIELDS, tw)
                if "exponent" not in t or "coefficient" not in t:
                    raise ProblemError(tw, "needs exponent and coefficient")
                terms.append((_exponent(t["exponent"], d, f"{tw}.exponent"), _vector(t["coefficient"], r, f"{tw}.coefficient")))
            gens.append(terms)
        else:
            _unknown(g, MONOMIAL_FIELDS, where)
            kinds.add("monomial")
            if "exponent" not in g:
                raise ProblemError(where, "missing exponent")
            exps = _exponent(g["exponent"], d, f"{where}.exponent")
            if "fiber" in g:
                if not isinstance(g["fiber"], list) or not g["fiber"]:
                    raise ProblemError(f"{where}.fiber", "expected a non-empty list of vectors")
                fib = [_vector(v, r, f"{where}.fiber[{vi}]") for vi, v in enumerate(g["fiber"])]
            else:
                fib = [tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r)]
            gens.append((exps, fib))
    if len(kinds) > 1:
        raise ProblemError("generators", "cannot mix monomial and polynomial generators")
    kind = kinds.pop() if kinds else "monomial"
    cutoff = _int(doc.get("cutoff", DEFAULTS["cutoff"]), "cutoff", 1)
    p_raw = doc.get("p", DEFAULTS["p"])
    if not isinstance(p_raw, list):
        p_raw = [p_raw]
    ps = []
    for i, x in enumerate(p_raw):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or x < 1:
            raise ProblemError(f"p[{i}]", "expected a real number >= 1")
        ps.append(float(x))
    budget = _int(doc.get("budget", DEFAULTS["budget"]), "budget", 0)
    window = doc.get("window")
    if window is not None:
        window = _int(window, "window", 1)
    spec = ProblemSpec(d, r, kind, gens, cutoff, ps, budget, window)
    # constructing the module runs the remaining invariants (independent fibers, homogeneity)
    try:
        spec.submodule() if kind == "monomial" else spec.generator_set()
    except ProblemError:
        raise
    except ValueError as exc:
        raise ProblemError("generators", str(exc)) from None
    return spec


def parse_problem(text: str | bytes) -> ProblemSpec:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError("<document>", f"invalid JSON: {exc}") from None
    return problem_from_dict(doc)
