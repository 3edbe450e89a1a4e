"""Drive the analyses for an input document and render the results.

The report is plain JSON-compatible data (rationals as ``"num/den"``
strings), so the machine output re-parses into an equal :class:`AnalysisReport`.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field, fields

from ._rational import format_rational
from .connection import (
    abelian_relation,
    check_general_position,
    connection_data,
    planar_web,
    zero_sum_section,
    Web,
)
from .dim3 import (
    NormalizedQuv,
    QuvTriple,
    blaschke_classical,
    normalize_triple,
    pairwise_surface_invariant,
    quv_web,
    reconstruct,
    taylor_ratio,
    wp_triple,
    PAIRS,
)
from .errors import (
    DegeneratePosition,
    DegenerateTriple,
    DegenerateWeb,
    GeneralPositionError,
    NotFlatError,
    OrderExceedsReliable,
    OrderTooLowForExactness,
    SingularFrame,
)
from .forms import VectorField, is_zero
from .parser import parse_polynomial

__all__ = ["AnalysisReport", "run", "run_reconstruct", "jet_data", "form_data", "render_text"]


def jet_data(j, names):
    return {
        "order": j.order,
        "exact": j.exact,
        "text": j.to_str(names),
        "terms": [[list(e), format_rational(c)] for e, c in j.items()],
    }


def form_data(form, names):
    return {
        "degree": form.degree,
        "order": form.order,
        "coefficients": [
            {"slot": [names[i] for i in idx], "jet": jet_data(c, names)} for idx, c in sorted(form.coeffs.items())
        ],
    }


def flatness_data(verdict, names):
    if verdict:
        return {"flat": True, "through_order": verdict.order, "exact": verdict.exact, "witness": None}
    w = verdict.witness
    return {
        "flat": False,
        "through_order": verdict.order,
        "exact": False,
        "witness": {
            "slot": [names[i] for i in w.index],
            "exponents": list(w.exponents),
            "coefficient": format_rational(w.coefficient),
        },
    }


@dataclass
class AnalysisReport:
    command: str
    kind: str
    dimension: int
    order: int
    variables: list
    general_position: dict
    omega: dict = None
    curvature: dict = None
    flatness: dict = None
    abelian_function: dict = None
    derived: dict = None
    pairwise: dict = None
    normalized_triple: dict = None
    taylor_ratio: dict = None
    blaschke: dict = None
    reconstruction: dict = None
    notes: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown report fields {sorted(unknown)}")
        return cls(**data)


def _generator_web(doc, order):
    names = doc.variables
    gens = []
    for comps in doc.payload:
        gens.append(VectorField(parse_polynomial(e, names, order) for e in comps))
    return Web(tuple(gens))


def _triple(doc, order):
    if doc.kind == "wp":
        return wp_triple(doc.payload, order)
    names = doc.variables
    p = doc.payload
    return QuvTriple(*(parse_polynomial(p[k], names, order) for k in ("Q", "u", "v")))


def build_web(doc, order):
    """The web described by ``doc`` (plus the triple for quv/wp documents)."""
    if doc.kind == "generators":
        return _generator_web(doc, order), None
    if doc.kind == "basic2d":
        u = parse_polynomial(doc.payload["u"], doc.variables, order)
        return planar_web(u), u
    t = _triple(doc, order)
    if not t.is_nondegenerate():
        raise DegenerateTriple("no three of df^dx, dg^dy, dh^dz, du^dv are independent at the origin")
    return quv_web(t).web, t


def _position(web):
    verdict = check_general_position(web)
    data = {"ok": verdict.ok, "subset": list(verdict.subset) if verdict.subset else None}
    if not verdict:
        raise GeneralPositionError(f"generators {verdict.subset} are dependent at the origin", verdict.subset)
    return data


def _ratio_data(r):
    return {"value": format_rational(r.value) if r.defined else None, "reason": r.reason or None}


def _triple_data(t, names):
    return {k: jet_data(getattr(t, k), names) for k in ("Q", "u", "v")}


def run(doc, order=None, command="analyze"):
    """Analyze a document; raises the module errors (mapped to exit codes by the CLI)."""
    order = doc.effective_order(order)
    if order < 2:
        raise OrderExceedsReliable(f"order {order} is below the minimum of 2")
    names = list(doc.variables)
    web, extra = build_web(doc, order)
    report = AnalysisReport(command, doc.kind, doc.dimension, order, names, _position(web))
    try:
        section = zero_sum_section(web)
    except (SingularFrame, DegeneratePosition) as exc:
        raise GeneralPositionError(str(exc)) from exc
    data = connection_data(section)
    report.omega = form_data(data.omega, names)
    report.curvature = form_data(data.curvature, names)
    verdict = data.flatness()
    report.flatness = flatness_data(verdict, names)
    if verdict:
        rel = abelian_relation(section)
        report.abelian_function = jet_data(rel.f, names)
    if doc.kind == "basic2d":
        classical = blaschke_classical(extra)
        k = min(classical.order, data.curvature.order)
        ok, _ = is_zero(data.curvature.truncate(k) - classical.truncate(k))
        report.blaschke = {
            "classical": form_data(classical, names),
            "sign": 1,
            "matches_curvature": ok,
            "through_order": k,
        }
    if doc.kind in ("quv", "wp"):
        t = extra
        f, g, h = t.derived()
        report.derived = {"f": jet_data(f, names), "g": jet_data(g, names), "h": jet_data(h, names)}
    if doc.dimension == 3:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", OrderTooLowForExactness)
            pr = pairwise_surface_invariant(web)
        report.pairwise = {
            "pairs": {f"D{a}{b}": {"vanishing": pr.vanishing[(a, b)]} for a, b in PAIRS},
            "d": pr.d,
            "vanishing": [f"D{a}{b}" for a, b in pr.vanishing_pairs],
            "through_order": pr.order,
            "exact": pr.exact,
        }
        if caught:
            report.notes.append(f"pair verdicts hold through order {pr.order} only")
    if doc.kind in ("quv", "wp"):
        t = extra
        if isinstance(t, NormalizedQuv):
            normal = t
        else:
            try:
                normal = normalize_triple(t)
            except (DegenerateTriple, DegenerateWeb, NotFlatError) as exc:
                normal = None
                report.notes.append(f"normal form unavailable: {exc}")
        if normal is not None:
            report.normalized_triple = _triple_data(normal, names)
            if normal.order >= 3:
                report.taylor_ratio = _ratio_data(taylor_ratio(normal))
            else:
                report.notes.append("normal form known below order 3; raise --order for the ratio")
    return report


def run_reconstruct(doc, order=None):
    """Recover ``(Q, u, v)`` from a flat 3-dimensional web."""
    order = doc.effective_order(order)
    if order < 2:
        raise OrderExceedsReliable(f"order {order} is below the minimum of 2")
    if doc.dimension != 3:
        raise GeneralPositionError("reconstruction needs a 4-web in dimension 3")
    names = list(doc.variables)
    web, _ = build_web(doc, order)
    report = AnalysisReport("reconstruct", doc.kind, 3, order, names, _position(web))
    data = connection_data(zero_sum_section(web))
    verdict = data.flatness()
    report.flatness = flatness_data(verdict, names)
    if not verdict:
        raise NotFlatError("web is not flat; no triple exists", verdict.witness)
    rec = reconstruct(web, normalize=True)
    t = rec.triple
    checks = []
    for i, b in enumerate((rec.f, rec.g, rec.h)):
        checks.append((t.Q.diff(i) - t.u * t.v.diff(i) - b).is_zero())
    report.reconstruction = {
        "triple": _triple_data(t, names),
        "chart": [jet_data(c, names) for c in rec.chart],
        "basic_functions": {"f": jet_data(rec.f, names), "g": jet_data(rec.g, names), "h": jet_data(rec.h, names)},
        "dQ_identity": all(checks),
        "normal_form": isinstance(t, NormalizedQuv),
    }
    if t.order >= 3 and isinstance(t, NormalizedQuv):
        report.taylor_ratio = _ratio_data(taylor_ratio(t))
    return report


def _plain(text):
    return text[:-2] if text.endswith("/1") else text


def _form_lines(label, form):
    if form is None:
        return []
    lines = [f"{label} (degree {form['degree']}, reliable through order {form['order']}):"]
    if not form["coefficients"]:
        lines.append("    0")
    for c in form["coefficients"]:
        slot = "^".join("d" + s for s in c["slot"]) or "1"
        lines.append(f"    [{slot}]  {c['jet']['text']}")
    return lines


def render_text(report):
    r = report
    lines = [f"webrank {r.command}: kind={r.kind} dimension={r.dimension} order={r.order}"]
    lines.append("general position: ok" if r.general_position["ok"] else "general position: FAILED")
    lines += _form_lines("omega", r.omega)
    lines += _form_lines("curvature", r.curvature)
    if r.flatness:
        fl = r.flatness
        if fl["flat"]:
            tag = " (exact)" if fl["exact"] else ""
            lines.append(f"flat through order {fl['through_order']}{tag}")
        else:
            w = fl["witness"]
            slot = "^".join("d" + s for s in w["slot"])
            lines.append(
                f"NOT flat: coefficient {_plain(w['coefficient'])} of monomial {tuple(w['exponents'])} in [{slot}]"
            )
    if r.abelian_function:
        lines.append(f"abelian relation factor f = {r.abelian_function['text']}")
    if r.blaschke:
        b = r.blaschke
        lines += _form_lines("classical Blaschke curvature", b["classical"])
        lines.append(f"curvature == classical through order {b['through_order']}: {b['matches_curvature']}")
    if r.derived:
        for k in ("f", "g", "h"):
            lines.append(f"{k} = {r.derived[k]['text']}")
    if r.pairwise:
        p = r.pairwise
        tag = "exact" if p["exact"] else f"through order {p['through_order']}"
        lines.append(f"d = {p['d']} ({tag}); vanishing: {', '.join(p['vanishing']) or 'none'}")
    if r.normalized_triple:
        for k in ("Q", "u", "v"):
            lines.append(f"normal form {k} = {r.normalized_triple[k]['text']} + O({r.normalized_triple[k]['order'] + 1})")
    if r.reconstruction:
        rec = r.reconstruction
        for k in ("Q", "u", "v"):
            lines.append(f"reconstructed {k} = {rec['triple'][k]['text']} + O({rec['triple'][k]['order'] + 1})")
        lines.append(f"dQ = f dX + g dY + h dZ + u dv holds: {rec['dQ_identity']}")
    if r.taylor_ratio:
        tr = r.taylor_ratio
        lines.append(f"taylor ratio = {_plain(tr['value'])}" if tr["value"] is not None else f"taylor ratio undefined ({tr['reason']})")
    for note in r.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines)
