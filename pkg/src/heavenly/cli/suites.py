"""Verification suites run against concrete instances.

Each suite returns a SuiteResult; failures carry an exact witness (a
polynomial in sparse text form, a point, or a component label).  Known
misprints found along the way are reported as discrepancies, not failures,
as long as the corrected statement holds.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from functools import cached_property

from ..arith import MPoly, Q, RatFn
from ..core import (
    ChartMismatch,
    DegenerateDiagonalization,
    DegenerateSolution,
    EquationConstants,
    SingularPoint,
    biorthogonality_matrix,
    build_coframe,
    build_lax,
    build_metric,
    build_tetrad,
    diagonalize,
    modified_metric_matrix,
    normalization_value,
    residual_phi,
    SolutionJet,
    signature_at_point,
)
from ..curvature import (
    ASD_SIGN,
    NotASD,
    asd_check,
    closed_form_curvature_modified,
    compare_closed_form,
    curvature_pipeline,
    frame_components,
    max_pole_order,
    simplified_metric_and_curvature,
)
from ..forms import VField, vf_commutator
from ..solutions import (
    FREE,
    CubicSolution,
    assemble_cubic,
    check_guards,
    dependent_coefficients,
    dependent_coefficients_modified,
    instantiate_cubic,
    instantiate_cubic_modified,
    random_solution,
)
from ..symmetry import (
    characteristic,
    coupled_N,
    invariance_residual,
    killing_check,
    killing_vectors,
    linearized_residual,
    make_generic_symmetry,
    make_modified_symmetries,
)
from .config import SUITES, RunConfig

# prerequisites of each suite; a suite is skipped when a selected
# prerequisite did not pass
DEPENDS = {
    "residual": (),
    "lax": (),
    "tetrad": ("residual",),
    "coframe": ("residual",),
    "metric": ("tetrad", "coframe"),
    "diagonal": ("metric",),
    "signature": ("metric",),
    "curvature": ("metric",),
    "closed-form": ("curvature",),
    "symmetry": ("residual",),
    "killing": ("metric", "symmetry"),
    "numeric-oracle": ("metric",),
}

NUMERIC_POINTS = 5
NUMERIC_TOL = 1e-6


@dataclass
class SuiteResult:
    name: str
    instance: str
    verdict: str  # pass | fail | skipped
    witness: str | None = None
    notes: list = field(default_factory=list)
    discrepancies: list = field(default_factory=list)
    seconds: float = 0.0
    data: dict = field(default_factory=dict)  # suite-specific extras (histogram, csv rows, asd sign)

    def as_json(self) -> dict:
        out = {"name": self.name, "instance": self.instance, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass(eq=False)
class Instance:
    label: str
    consts: EquationConstants
    u: MPoly
    sign: int
    solution: CubicSolution | None = None  # None for an explicit polynomial
    notes: list = field(default_factory=list)  # informational
    discrepancies: list = field(default_factory=list)  # misprints met while instantiating

    @cached_property
    def jet(self) -> SolutionJet:
        return SolutionJet(self.consts, self.u)

    @cached_property
    def metric(self):
        return build_metric(self.consts, self.jet, self.sign)

    @cached_property
    def bundle(self):
        return curvature_pipeline(self.metric)

    @property
    def is_modified(self) -> bool:
        return self.consts.is_modified


def _chart_sign(jet: SolutionJet, wanted: int) -> tuple[int, str | None]:
    d = jet.delta
    if d.is_constant() and not d.is_zero():
        actual = 1 if d.constant_value() > 0 else -1
        if actual != wanted:
            return actual, f"Delta is the constant {d.constant_value()}; using chart s={actual}"
    return wanted, None


def _perturbed(cfg: RunConfig) -> CubicSolution:
    consts = cfg.consts
    c = {i: cfg.free_params.get(i, Q(0)) for i in FREE}
    check_guards(consts, c)
    coeffs = dict(c)
    if consts.is_modified:
        coeffs.update(dependent_coefficients_modified(c))
    else:
        coeffs.update(dependent_coefficients(consts, c))
    for i, v in cfg.perturb.items():
        coeffs[i] = coeffs.get(i, Q(0)) + v
    return CubicSolution(consts, coeffs, assemble_cubic(coeffs), [])


def build_instances(cfg: RunConfig) -> list[Instance]:
    out = []
    if cfg.explicit_u is not None:
        u = MPoly.parse(cfg.explicit_u)
        out.append(Instance("explicit-u", cfg.consts, u, cfg.chart_sign))
    elif cfg.free_params:
        if cfg.perturb:
            sol = _perturbed(cfg)
        elif cfg.consts.is_modified:
            sol = instantiate_cubic_modified(cfg.free_params)
        else:
            sol = instantiate_cubic(cfg.consts, cfg.free_params)
        notes = [f"c{i} perturbed by {v}" for i, v in sorted(cfg.perturb.items())]
        out.append(Instance("configured", cfg.consts, sol.u, cfg.chart_sign, sol, notes, list(sol.notes)))
    if cfg.use_draws:
        for seed in cfg.seeds:
            sol = random_solution(seed, cfg.branch)
            out.append(Instance(f"{cfg.branch}-seed{seed}", sol.consts, sol.u, cfg.chart_sign, sol, [], list(sol.notes)))
    for inst in out:
        sign, note = _chart_sign(inst.jet, inst.sign)
        inst.sign = sign
        if note:
            inst.notes.append(note)
    return out


def _rng(cfg: RunConfig, inst: Instance, purpose: str) -> random.Random:
    return random.Random(f"{purpose}:{inst.label}:{','.join(map(str, cfg.seeds))}")


# ---------------------------------------------------------------------------
# individual suites; each returns (verdict, witness, notes, discrepancies, data)


def suite_residual(inst, cfg):
    phi = residual_phi(inst.consts, inst.u)
    if phi.is_zero():
        return "pass", None, [], [], {}
    return "fail", phi.to_str(), ["Phi is not identically zero"], [], {}


def _random_cubic(rng: random.Random) -> MPoly:
    terms = {}
    for e in itertools.product(range(4), repeat=4):
        if sum(e) <= 3 and rng.random() < 0.4:
            terms[e] = Q(rng.randint(-9, 9), rng.randint(1, 3))
    return MPoly.from_dict(terms, 4)


def lax_identity_witness(consts: EquationConstants, u: MPoly) -> str | None:
    """None if [L0, M0] = d4(Phi) d2 - d2(Phi) d4 with empty lambda slots."""
    L0, M0 = build_lax(consts, SolutionJet(consts, u))
    s0, s1, s2 = vf_commutator(L0, M0)
    phi = residual_phi(consts, u)
    expected = VField((0, phi.diff(3), 0, -phi.diff(1)))
    if not s0.equals(expected):
        return f"lambda^0 slot differs for u = {u.to_str()}"
    if not s1.is_zero():
        return f"lambda^1 slot nonzero for u = {u.to_str()}: {s1}"
    if not s2.is_zero():
        return f"lambda^2 slot nonzero for u = {u.to_str()}: {s2}"
    return None


def suite_lax(inst, cfg):
    rng = _rng(cfg, inst, "lax")
    polys = [inst.u] + [_random_cubic(rng) for _ in range(10)]
    for u in polys:
        w = lax_identity_witness(inst.consts, u)
        if w:
            return "fail", w, [], [], {}
    return "pass", None, [f"{len(polys)} polynomials checked"], [], {}


def suite_tetrad(inst, cfg):
    try:
        inst.jet.require_nondegenerate()
    except DegenerateSolution as exc:
        return "fail", "Delta = 0", [str(exc)], [], {}
    nu = normalization_value(inst.consts, inst.jet, inst.sign)
    if (nu - 1).is_zero():
        return "pass", None, [f"chart s={inst.sign}"], [], {}
    return "fail", f"24 nu(W, Z, W~, Z~) = {nu}", [], [], {}


def suite_coframe(inst, cfg):
    try:
        inst.jet.require_nondegenerate()
    except DegenerateSolution as exc:
        return "fail", "Delta = 0", [str(exc)], [], {}
    tet = build_tetrad(inst.consts, inst.jet, inst.sign)
    cof = build_coframe(inst.consts, inst.jet, inst.sign)
    m = biorthogonality_matrix(cof, tet)
    for i in range(4):
        for j in range(4):
            if not (m[i][j] - (1 if i == j else 0)).is_zero():
                return "fail", f"omega^{i + 1}(e_{j + 1}) = {m[i][j]}", [], [], {}
    return "pass", None, [], [], {}


def suite_metric(inst, cfg):
    try:
        g = inst.metric
    except AssertionError as exc:
        return "fail", str(exc), [], [], {}
    d = RatFn.coerce(inst.jet.delta)
    det = g.det()
    if not (det - d * d).is_zero():
        return "fail", f"det g - Delta^2 = {det - d * d}", [], [], {}
    return "pass", None, ["coframe and expanded metric agree", "det g = Delta^2"], [], {}


def suite_diagonal(inst, cfg):
    try:
        data = diagonalize(inst.consts, inst.jet, inst.sign, inst.metric)
    except DegenerateDiagonalization as exc:
        return "skipped", None, [f"diagonal form undefined: {exc}"], [], {}
    disc = []
    checks = {
        "diagonal form equals the metric": data.diag_equals_metric,
        "u12 identity": data.u12_identity,
        "simplified form (with Delta^2 in the dz4 term) equals the metric": data.corrected_simple_equals_metric,
    }
    if inst.is_modified:
        fm = modified_metric_matrix(inst.jet, data, inst.sign)
        checks["a=c=0, b=1 form equals the simplified form"] = all(
            (fm[i][j] - data.simple_matrix[i][j]).is_zero() for i in range(4) for j in range(4)
        )
    if not data.simple_equals_metric:
        disc.append(
            "simplified diagonal form: the (dz4)^2 coefficient is -Delta^2/(4 u12), "
            "not -1/(4 u12) as printed; the printed form does not reproduce the metric"
        )
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        return "fail", "; ".join(failed), [], disc, {}
    return "pass", None, list(checks), disc, {}


def _random_point(rng: random.Random) -> tuple:
    return tuple(Q(rng.randint(-10, 10), rng.randint(1, 4)) for _ in range(4))


def sample_signature(inst: Instance, points) -> tuple[dict, list, list]:
    """Histogram, CSV rows and failures over the given rational points."""
    hist: dict = {}
    rows = []
    bad = []
    for p in points:
        try:
            inert = signature_at_point(inst.metric, p)
        except (SingularPoint, ChartMismatch):
            continue
        key = f"({inert.n_plus},{inert.n_minus})"
        hist[key] = hist.get(key, 0) + 1
        d = inst.jet.delta.evaluate(list(p))
        rows.append([str(x) for x in p] + [str(d), inert.n_plus, inert.n_minus])
        if inert.pair != (2, 2):
            bad.append((p, inert.pair))
    return hist, rows, bad


def chart_points(inst: Instance, rng: random.Random, count: int) -> list:
    pts = []
    for _ in range(200 * max(count, 1)):
        if len(pts) == count:
            break
        p = _random_point(rng)
        d = inst.jet.delta.evaluate(list(p))
        if d != 0 and (d > 0) == (inst.sign > 0):
            pts.append(p)
    return pts


def suite_signature(inst, cfg):
    pts = list(cfg.sample_points) + chart_points(inst, _rng(cfg, inst, "signature"), cfg.sample_count)
    hist, rows, bad = sample_signature(inst, pts)
    notes = [f"{sum(hist.values())} points on chart s={inst.sign}"]
    data = {"histogram": hist, "rows": rows}
    if not hist:
        return "skipped", None, notes + ["no admissible sample points"], [], data
    if bad:
        p, pair = bad[0]
        return "fail", f"signature {pair} at {tuple(str(x) for x in p)}", notes, [], data
    return "pass", None, notes, [], data


def suite_curvature(inst, cfg):
    b = inst.bundle
    if not b.ricci_is_zero():
        for i in range(4):
            for j in range(i, 4):
                if not b.ricci[i][j].is_zero():
                    return "fail", f"R_{i + 1}{j + 1} = {b.ricci[i][j]}", [], [], {}
    if not b.bianchi_holds():
        return "fail", "first Bianchi identity violated", [], [], {}
    R = b.raised_frame()
    for ab in ((0, 1), (2, 3)):
        if not R[ab].is_zero():
            return "fail", f"R^{ab[0] + 1}{ab[1] + 1} = {R[ab]}", [], [], {}
    try:
        asd = asd_check(b, inst.metric)
    except NotASD as exc:
        return "fail", str(exc), [], [], {}
    if asd.verdict == "flat":
        return "pass", None, ["Ricci-flat", "curvature vanishes; ASD sign undetermined (flat)"], [], {"asd_sign": None}
    if asd.sign != ASD_SIGN:
        return "fail", f"duality sign {asd.sign}, expected {ASD_SIGN}", [], [], {"asd_sign": asd.sign}
    return "pass", None, ["Ricci-flat", f"*R = {asd.sign:+d} R for every frame 2-form"], [], {"asd_sign": asd.sign}


def _closed_form_checks(cmp, g, closed_D, R23, sign, label) -> tuple[list, list]:
    failed, disc = [], []
    if not cmp.zero_pattern:
        failed.append(f"{label}: R^12, R^34 not zero")
    if not cmp.relations_hold:
        failed.append(f"{label}: relations between the nonzero forms fail")
    if not cmp.exact_match:
        if cmp.sign_factor in (1, -1):
            disc.append(
                f"{label}: pipeline curvature equals {cmp.sign_factor} times the printed closed form on chart s={sign}"
            )
        else:
            failed.append(f"{label}: {cmp.summary()}")
    pm = max_pole_order([g.components[i][j] for i in range(4) for j in range(4)], closed_D)
    pc = max_pole_order(frame_components(R23, g).values(), closed_D)
    if (pm, pc) != (1, 3):
        failed.append(f"{label}: pole orders metric {pm}, curvature {pc} (expected 1, 3)")
    return failed, disc


def suite_closed_form(inst, cfg):
    sol = inst.solution
    if sol is None:
        return "skipped", None, ["no closed form for an explicit polynomial"], [], {}
    nonzero = {i for i in FREE if sol.coeffs[i] != 0}
    failed, disc, notes = [], [], []
    R = inst.bundle.raised_frame()
    if inst.is_modified:
        closed = closed_form_curvature_modified(sol, inst.sign)
        cmp = compare_closed_form(closed, inst.bundle, sol[5], sol[17])
        f, d = _closed_form_checks(cmp, inst.metric, inst.jet.delta, R[(1, 2)], inst.sign, "modified closed form")
        failed += f
        disc += d
        notes.append(cmp.summary())
    if nonzero <= {5, 17, 19, 29}:
        fam = simplified_metric_and_curvature(inst.consts, sol[5], sol[17], sol[19], sol[29], inst.sign)
        if not fam.metric_matches:
            failed.append("four-parameter family: displayed simplified metric differs from the metric")
        cmp = compare_closed_form(fam.closed, inst.bundle, sol[5], sol[17])
        f, d = _closed_form_checks(cmp, inst.metric, fam.x, R[(1, 2)], inst.sign, "four-parameter closed form")
        failed += f
        disc += d
        notes.append("four-parameter family: " + cmp.summary())
    if not notes:
        return "skipped", None, ["instance is outside both closed-form families"], [], {}
    if failed:
        return "fail", "; ".join(failed), notes, disc, {}
    return "pass", None, notes, disc, {}


def _rpoly(rng: random.Random, nvars: int, deg: int) -> MPoly:
    terms = {
        e: Q(rng.randint(-5, 5), rng.randint(1, 3))
        for e in itertools.product(range(deg + 1), repeat=nvars)
        if sum(e) <= deg
    }
    return MPoly.from_dict(terms, nvars)


def suite_symmetry(inst, cfg):
    rng = _rng(cfg, inst, "symmetry")
    consts, u = inst.consts, inst.u
    failed, disc, notes = [], [], []

    def bad(X):
        return not linearized_residual(consts, u, characteristic(X, u), check=False).is_zero()

    if inst.is_modified:
        for _ in range(3):
            fn = dict(g=_rpoly(rng, 1, 3), l=_rpoly(rng, 1, 3), m=_rpoly(rng, 1, 3), n=_rpoly(rng, 1, 3), f=_rpoly(rng, 2, 3), h=_rpoly(rng, 2, 3))
            failed += [f"{X.name} (corrected)" for X in make_modified_symmetries(**fn, corrected=True) if bad(X)]
            printed_bad = [X.name for X in make_modified_symmetries(**fn) if bad(X)]
            if printed_bad == ["X6"]:
                disc.append("X6 as printed is a symmetry only for constant n; the term n'(z3) z4 d4 is missing")
            elif printed_bad:
                failed += [f"{n} (printed)" for n in printed_bad]
        notes.append("X1..X8 with random cubic function inputs")
        if inst.solution is not None:
            kd = killing_vectors(inst.solution)
            disc += kd.discrepancies
            if not (kd.invariant["K1"] and kd.invariant["K2"]):
                failed.append("K1/K2 do not leave the cubic invariant")
            n0, m0 = Q(rng.randint(-9, 9)), Q(rng.randint(-9, 9))
            if not invariance_residual(inst.solution, **kd.generator_inputs(n0, m0)).is_zero():
                failed.append(f"invariance condition fails for {n0} K1 + {m0} K2")
            notes.append("n0 K1 + m0 K2 leaves the cubic invariant")
    elif consts.a * consts.b * consts.c != 0:
        for _ in range(3):
            m = _rpoly(rng, 1, 2)
            base = dict(F=_rpoly(rng, 1, 2), H=_rpoly(rng, 1, 2), m=m, d=Q(rng.randint(-3, 3)), f=_rpoly(rng, 2, 2), g=_rpoly(rng, 2, 2))
            gens = make_generic_symmetry(consts, N=coupled_N(m, _rpoly(rng, 1, 2)), **base)
            failed += [name for name, X in gens.items() if bad(X)]
            free_N = make_generic_symmetry(consts, N=_rpoly(rng, 2, 2), **base)["Xinf"]
            if bad(free_N):
                disc.append("X_inf is a symmetry only when N,23 = m'(z3), i.e. N = z2 m(z3) + B(z3)")
        notes.append("X1, X2, X3, X_inf with random quadratic function inputs")
    else:
        return "skipped", None, ["point symmetries are listed for a*b*c != 0 and for a=c=0, b=1 only"], [], {}
    if failed:
        return "fail", "; ".join(dict.fromkeys(failed)), notes, disc, {}
    return "pass", None, notes, list(dict.fromkeys(disc)), {}


def suite_killing(inst, cfg):
    if not inst.is_modified or inst.solution is None:
        return "skipped", None, ["K1, K2 are defined for cubic solutions with a=c=0, b=1"], [], {}
    kd = killing_vectors(inst.solution)
    out = []
    for name, k in (("k1", kd.k1), ("k2", kd.k2)):
        if not killing_check(inst.metric, k, inst.jet):
            return "fail", f"L_{name} g != 0 for {name} = {k}", [], [], {}
        out.append(f"{name} = {k} is Killing")
    return "pass", None, out, [], {}


def suite_numeric_oracle(inst, cfg):
    from .oracle import numeric_ricci_oracle, well_conditioned_points

    rng = _rng(cfg, inst, "numeric")
    pts = well_conditioned_points(inst.u, inst.consts, rng, NUMERIC_POINTS, sign=inst.sign)
    if not pts:
        return "skipped", None, ["no well-conditioned points on this chart"], [], {}
    worst = 0.0
    for p in pts:
        ricci, scale = numeric_ricci_oracle(inst.u, inst.consts, p, with_scale=True)
        err = float(abs(ricci).max())
        rel = err / scale if scale > 1e-12 else err
        worst = max(worst, rel)
        if rel >= NUMERIC_TOL:
            return "fail", f"|Ricci| = {err:.3g} (scale {scale:.3g}) at {p}", [], [], {}
    return "pass", None, [f"{len(pts)} points, worst relative residual {worst:.2e}"], [], {}


RUNNERS = {
    "residual": suite_residual,
    "lax": suite_lax,
    "tetrad": suite_tetrad,
    "coframe": suite_coframe,
    "metric": suite_metric,
    "diagonal": suite_diagonal,
    "signature": suite_signature,
    "curvature": suite_curvature,
    "closed-form": suite_closed_form,
    "symmetry": suite_symmetry,
    "killing": suite_killing,
    "numeric-oracle": suite_numeric_oracle,
}


def _ancestors(name: str) -> set:
    out = set()
    stack = list(DEPENDS[name])
    while stack:
        d = stack.pop()
        if d not in out:
            out.add(d)
            stack.extend(DEPENDS[d])
    return out


def run_instance(inst: Instance, cfg: RunConfig) -> list[SuiteResult]:
    results: dict[str, SuiteResult] = {}
    for name in SUITES:  # already in dependency order
        if name not in cfg.suites:
            continue
        blocked = [d for d in _ancestors(name) if d in results and results[d].verdict != "pass"]
        if blocked:
            results[name] = SuiteResult(name, inst.label, "skipped", notes=[f"prerequisite {blocked[0]} did not pass"])
            continue
        t0 = time.perf_counter()
        try:
            verdict, witness, notes, disc, data = RUNNERS[name](inst, cfg)
        except Exception as exc:  # a crash is a failure with the error as witness
            verdict, witness, notes, disc, data = "fail", f"{type(exc).__name__}: {exc}", [], [], {}
        results[name] = SuiteResult(name, inst.label, verdict, witness, notes, disc, time.perf_counter() - t0, data)
    return list(results.values())
