"""Field-by-field exact comparison of a report against stored fixtures."""
import json
from importlib import resources
from pathlib import Path

from .cartan import RootSystem, parse_type
from .scalars import ZERO
from .uqg import UqError, parse_expression, parse_scalar


class FixtureError(ValueError):
    pass


def fixture_dir():
    return Path(str(resources.files("qdolbeault") / "fixtures"))


def load_fixture(name_or_path, directory=None):
    p = Path(name_or_path)
    if not p.suffix:
        p = Path(directory or fixture_dir()) / f"{name_or_path}.json"
    if not p.exists():
        raise FixtureError(f"missing fixture {p}")
    with open(p) as fh:
        return json.load(fh)


def fixtures_for(flag_name, directory=None):
    d = Path(directory or fixture_dir())
    out = []
    for p in sorted(d.glob("*.json")):
        with open(p) as fh:
            fx = json.load(fh)
        if fx.get("flag") == flag_name:
            out.append(fx)
    return out


def _lookup(report, path):
    node = report.get("stages", report)
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


def _scalar(s, L):
    return parse_scalar(str(s), L)


def _rules_map(rules, L):
    out = {}
    for r in rules:
        lhs = tuple(r["lhs"])
        out[lhs] = {tuple(t["word"]): _scalar(t["coeff"], L) for t in r["rhs"]}
        out[lhs] = {w: x for w, x in out[lhs].items() if x != ZERO}
    return out


def diff_golden(report, fixture):
    """Return (passed, diffs) where diffs name each differing entry."""
    got = _lookup(report, fixture["field"])
    if got is None:
        return False, [f"{fixture['field']}: missing from report"]
    L = report.get("config", {}).get("L", 1)
    kind = fixture["kind"]
    diffs = []
    name = fixture["name"]
    if kind == "matrix":
        Lm = fixture.get("L", got.get("L", L)) if isinstance(got, dict) else L
        mat = got["entries"] if isinstance(got, dict) else got
        exp = fixture["value"]
        if len(mat) != len(exp) or any(len(a) != len(b) for a, b in zip(mat, exp)):
            return False, [f"{name}: shape differs"]
        for i, (ra, rb) in enumerate(zip(mat, exp)):
            for j, (a, b) in enumerate(zip(ra, rb)):
                if _scalar(a, Lm) != _scalar(b, Lm):
                    diffs.append(f"{name}: entry ({i + 1},{j + 1}) expected {b}, got {a}")
    elif kind == "rules":
        g = _rules_map(got, L)
        e = _rules_map(fixture["value"], L)
        for lhs in sorted(set(g) | set(e)):
            lab = "x" + "x".join(map(str, lhs))
            if lhs not in g:
                diffs.append(f"{name}: rule for {lab} missing from report")
                continue
            if lhs not in e:
                diffs.append(f"{name}: unexpected rule for {lab}")
                continue
            for w in sorted(set(g[lhs]) | set(e[lhs])):
                a, b = g[lhs].get(w, ZERO), e[lhs].get(w, ZERO)
                if a != b:
                    diffs.append(f"{name}: rule for {lab}, coefficient of word {list(w)}: "
                                 f"expected {b.to_q_string(L)}, got {a.to_q_string(L)}")
    elif kind == "expressions":
        typ, rank = parse_type(report["config"]["type"])
        rs = RootSystem(typ, rank)
        if len(got) != len(fixture["value"]):
            return False, [f"{name}: expected {len(fixture['value'])} expressions, got {len(got)}"]
        for k, (a, b) in enumerate(zip(got, fixture["value"])):
            try:
                ea, eb = parse_expression(a, rs), parse_expression(b, rs)
            except UqError as exc:
                diffs.append(f"{name}: expression {k + 1} unparsable ({exc})")
                continue
            if ea != eb:
                diffs.append(f"{name}: expression {k + 1} expected {b}, got {a}")
    else:
        raise FixtureError(f"unknown fixture kind {kind!r}")
    return not diffs, diffs
