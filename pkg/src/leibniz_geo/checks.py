"""Named verification suites over a loaded model document.

Each check id maps to a runner that evaluates the corresponding identity on
every applicable (metric, connection) combination declared in the document
and returns one record per residual.  Identities whose hypotheses fail on an
instance are reported as "not-applicable" rather than skipped silently, so a
report always accounts for every declared object deterministically.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebroid import Residual
from .connection import (
    curvature,
    difference_tensor,
    modified_bracket_coeffs,
    nonmetricity,
    projected_torsion,
    second_cov_and_ricci,
    torsion,
)
from .errors import MissingProjector
from .hessian import (
    _default_probes,
    conjugate_curvature_transfer_residual,
    constant_curvature_check,
    fundamental_theorem_residual,
    hessian,
    hessian_structure_check,
    hessian_symmetry_equivalences,
)
from .scalar import ScalarField
from .statgeo import (
    ConjugatePair,
    StatisticalStructure,
    admissibility_locality_residual,
    alpha_connection,
    alpha_curvature_residual,
    alpha_flat_symmetry_residual,
    conjugate_connection,
    conjugate_torsion_transfer_residual,
    mean_connection,
    quasi_statistical_check,
    relative_torsion,
    statistical_solve,
)
from .tensor import ETensor, zeros_array

ALPHA_VALUES = (
    Fraction(-1),
    Fraction(-1, 2),
    Fraction(0),
    Fraction(1, 2),
    Fraction(1),
    Fraction(2),
)


@dataclass(frozen=True)
class CheckResult:
    check: str
    status: str
    residual_nonzero_components: int = 0
    residual_max_degree: int = 0
    note: str = ""

    def to_record(self):
        record = {
            "check": self.check,
            "status": self.status,
            "residual_nonzero_components": self.residual_nonzero_components,
            "residual_max_degree": self.residual_max_degree,
        }
        if self.note:
            record["note"] = self.note
        return record


def _from_residual(name, residual, note=""):
    status = "pass" if residual.is_zero else "fail"
    return CheckResult(
        name,
        status,
        residual.tensor.nonzero_count() if hasattr(residual, "tensor") else residual.nonzero_count(),
        residual.tensor.max_degree() if hasattr(residual, "tensor") else residual.max_degree(),
        note,
    )


def _na(name, note):
    return CheckResult(name, "not-applicable", note=note)


def _connections(doc):
    return sorted(doc.connections.items())


def _metric_connections(doc):
    for metric_name, g in sorted(doc.metrics.items()):
        for conn_name, conn in _connections(doc):
            yield f"{metric_name}:{conn_name}", g, conn


def _pair(doc, g, conn):
    return ConjugatePair(doc.algebroid, g, conn, conjugate_connection(doc.algebroid, g, conn))


def _probe_sections(A, count, seed):
    """Deterministic low-degree polynomial sections for section-level checks."""
    rng = random.Random(seed)
    sections = []
    for _ in range(count):
        entries = []
        for _ in range(A.rank):
            entry = A.field(rng.randint(-2, 2))
            if A.dim and rng.random() < 0.5:
                entry = entry + A.field(rng.randint(-1, 1)) * A.x(rng.randint(1, A.dim))
            entries.append(entry)
        sections.append(A.vector(entries))
    return sections


# -- bracket/connection layer -------------------------------------------------


def check_eb12(doc):
    """Torsion and curvature antisymmetry for admissible connections."""
    A = doc.algebroid
    results = []
    for name, conn in _connections(doc):
        if not A.admissibility_residual(conn).is_zero:
            results.append(_na(f"eb12[{name}]", "connection not admissible"))
            continue
        T = torsion(A, conn)
        results.append(_from_residual(f"eb12[{name}]:torsion", Residual("t", T + T.swap_slots(2, 3))))
        if A.projector is not None:
            R = curvature(A, conn)
            results.append(
                _from_residual(f"eb12[{name}]:curvature", Residual("r", R + R.swap_slots(2, 3)))
            )
        else:
            results.append(_na(f"eb12[{name}]:curvature", "no locality projector"))
    return results


def check_eb14(doc):
    """Ricci identity on probe sections; holds for every connection."""
    A = doc.algebroid
    if A.projector is None:
        return [_na("eb14", "no locality projector")]
    probes = _probe_sections(A, 9, seed=11)
    results = []
    for name, conn in _connections(doc):
        for index in range(3):
            u, v, w = probes[3 * index : 3 * index + 3]
            _, residual = second_cov_and_ricci(A, conn, u, v, w)
            results.append(_from_residual(f"eb14[{name}]:probe-{index}", residual))
    return results


# -- conjugation layer --------------------------------------------------------


def check_ssp1(doc):
    """Strongly conjugate admissible pairs have opposite torsions."""
    A = doc.algebroid
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        strong = relative_torsion(A, pair.nabla, pair.nabla_star).is_zero
        admissible = (
            A.admissibility_residual(pair.nabla).is_zero
            and A.admissibility_residual(pair.nabla_star).is_zero
        )
        if not (strong and admissible):
            results.append(_na(f"SSp1[{label}]", "pair not strongly conjugate and admissible"))
            continue
        T = torsion(A, pair.nabla)
        T_star = torsion(A, pair.nabla_star)
        results.append(_from_residual(f"SSp1[{label}]", Residual("t", T + T_star)))
    return results


def check_ssp2(doc):
    """An admissible connection with an admissible strong conjugate is torsion-free."""
    A = doc.algebroid
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        strong = relative_torsion(A, pair.nabla, pair.nabla_star).is_zero
        admissible = (
            A.admissibility_residual(pair.nabla).is_zero
            and A.admissibility_residual(pair.nabla_star).is_zero
        )
        if not (strong and admissible):
            results.append(_na(f"SSp2[{label}]", "pair not strongly conjugate and admissible"))
            continue
        results.append(_from_residual(f"SSp2[{label}]", Residual("t", torsion(A, pair.nabla))))
    return results


def check_ssp3(doc):
    """Q(nabla, g) = -Q(nabla*, g) = g(Delta(nabla*, nabla)(u, v), w)."""
    A = doc.algebroid
    r = A.rank
    results = []
    for label, g, conn in _metric_connections(doc):
        conn_star = conjugate_connection(A, g, conn)
        Q = nonmetricity(A, conn, g)
        Q_star = nonmetricity(A, conn_star, g)
        results.append(_from_residual(f"SSp3[{label}]:opposite", Residual("q", Q + Q_star)))
        delta = difference_tensor(A, conn_star, conn)
        res = zeros_array((r, r, r), A.coords)
        for a, b, c in itertools.product(range(r), repeat=3):
            acc = Q.comps[a, b, c]
            for e in range(r):
                acc = acc - delta.comps[e, a, b] * g.matrix[e, c]
            res[a, b, c] = acc
        results.append(
            _from_residual(
                f"SSp3[{label}]:difference", Residual("q", ETensor(0, 3, r, A.coords, res))
            )
        )
    return results


def check_ssp4(doc):
    """An admissible strong conjugate forces the Levi-Civita self-pair."""
    A = doc.algebroid
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        strong = relative_torsion(A, pair.nabla, pair.nabla_star).is_zero
        admissible = (
            A.admissibility_residual(pair.nabla).is_zero
            and A.admissibility_residual(pair.nabla_star).is_zero
        )
        if not (strong and admissible):
            results.append(_na(f"SSp4[{label}]", "pair not strongly conjugate and admissible"))
            continue
        delta = difference_tensor(A, pair.nabla, pair.nabla_star)
        results.append(_from_residual(f"SSp4[{label}]:self-conjugate", Residual("d", delta)))
        results.append(
            _from_residual(
                f"SSp4[{label}]:metric-compatible",
                Residual("q", nonmetricity(A, pair.nabla, g)),
            )
        )
    return results


def check_ssp5(doc):
    """Statistical-solve postconditions for the document's (C, B) data."""
    A = doc.algebroid
    results = []
    for metric_name, g in sorted(doc.metrics.items()):
        r = A.rank
        C = doc.tensors.get("C", ETensor.zeros(0, 3, r, A.coords))
        B = doc.tensors.get("B", ETensor.zeros(1, 2, r, A.coords))
        label = f"{metric_name}"
        try:
            structure = StatisticalStructure(g, C, B)
            pair = statistical_solve(A, structure)
        except Exception as exc:  # noqa: BLE001 - reported, not raised
            results.append(_na(f"SSp5[{label}]", f"solve not applicable: {exc}"))
            continue
        Q = nonmetricity(A, pair.nabla, g)
        results.append(_from_residual(f"SSp5[{label}]:skewness", Residual("q", Q + C)))
        results.append(
            _from_residual(f"SSp5[{label}]:torsion-free", Residual("t", torsion(A, pair.nabla)))
        )
        results.append(
            _from_residual(
                f"SSp5[{label}]:conjugate-torsion",
                Residual("t", torsion(A, pair.nabla_star) - B),
            )
        )
    return results


def check_ssp6(doc):
    """Quasi-statistical structures fix the conjugate's torsion."""
    A = doc.algebroid
    results = []
    for label, g, conn in _metric_connections(doc):
        if not quasi_statistical_check(A, g, conn).is_zero:
            results.append(_na(f"SSp6[{label}]", "doublet is not quasi-statistical"))
            continue
        results.append(
            _from_residual(f"SSp6[{label}]", conjugate_torsion_transfer_residual(A, g, conn))
        )
    return results


def check_ssp7(doc):
    """Relative torsion antisymmetry for admissible conjugate pairs."""
    A = doc.algebroid
    r = A.rank
    results = []
    for label, g, conn in _metric_connections(doc):
        conn_star = conjugate_connection(A, g, conn)
        if not (
            A.admissibility_residual(conn).is_zero
            and A.admissibility_residual(conn_star).is_zero
        ):
            results.append(_na(f"SSp7[{label}]", "pair not jointly admissible"))
            continue
        rel = relative_torsion(A, conn, conn_star)
        rel_star = relative_torsion(A, conn_star, conn)
        res = zeros_array((r, r, r), A.coords)
        for a, b, c in itertools.product(range(r), repeat=3):
            res[a, b, c] = rel.comps[a, b, c] + rel_star.comps[a, c, b]
        results.append(
            _from_residual(f"SSp7[{label}]", Residual("rt", ETensor(1, 2, r, A.coords, res)))
        )
    return results


def check_ssp8(doc):
    """T(nabla, nabla*) + T(nabla*, nabla) = T(nabla) + T(nabla*)."""
    A = doc.algebroid
    results = []
    for label, g, conn in _metric_connections(doc):
        conn_star = conjugate_connection(A, g, conn)
        rel = relative_torsion(A, conn, conn_star)
        rel_star = relative_torsion(A, conn_star, conn)
        total = torsion(A, conn) + torsion(A, conn_star)
        results.append(
            _from_residual(f"SSp8[{label}]", Residual("rt", rel + rel_star - total))
        )
    return results


def check_ssp9(doc):
    """The mean connection is metric-compatible with half the total torsion."""
    A = doc.algebroid
    half = ScalarField.constant(Fraction(1, 2), A.coords)
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        mean = mean_connection(pair)
        results.append(
            _from_residual(
                f"SSp9[{label}]:metric-compatible", Residual("q", nonmetricity(A, mean, g))
            )
        )
        T_mean = torsion(A, mean)
        T_half = (torsion(A, pair.nabla) + torsion(A, pair.nabla_star)).scale(half)
        results.append(
            _from_residual(f"SSp9[{label}]:torsion-mean", Residual("t", T_mean - T_half))
        )
    return results


def check_ssp10(doc):
    """Conjugation, torsion, and nonmetricity of the alpha family."""
    A = doc.algebroid
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        Q = nonmetricity(A, pair.nabla, g)
        for alpha in ALPHA_VALUES:
            conn_alpha = alpha_connection(pair, alpha)
            expect = alpha_connection(pair, -alpha)
            conj = conjugate_connection(A, g, conn_alpha)
            results.append(
                _from_residual(
                    f"SSp10[{label}]:involution(alpha={alpha})",
                    Residual("d", difference_tensor(A, conj, expect)),
                )
            )
            s = ScalarField.constant((1 + alpha) / 2, A.coords)
            t = ScalarField.constant((1 - alpha) / 2, A.coords)
            T_expect = torsion(A, pair.nabla_star).scale(s) + torsion(A, pair.nabla).scale(t)
            results.append(
                _from_residual(
                    f"SSp10[{label}]:torsion(alpha={alpha})",
                    Residual("t", torsion(A, conn_alpha) - T_expect),
                )
            )
            factor = ScalarField.constant(Fraction(alpha), A.coords)
            results.append(
                _from_residual(
                    f"SSp10[{label}]:nonmetricity(alpha={alpha})",
                    Residual("q", nonmetricity(A, conn_alpha, g) + Q.scale(factor)),
                )
            )
    return results


def check_ssp11(doc):
    """Curvature decomposition of the alpha family."""
    A = doc.algebroid
    if A.projector is None:
        return [_na("SSp11", "no locality projector")]
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        for alpha in ALPHA_VALUES:
            results.append(
                _from_residual(
                    f"SSp11[{label}]:alpha={alpha}", alpha_curvature_residual(A, pair, alpha)
                )
            )
    return results


def check_sse8(doc):
    """Joint admissibility forces antisymmetry of the locality difference."""
    A = doc.algebroid
    results = []
    for label, g, conn in _metric_connections(doc):
        conn_star = conjugate_connection(A, g, conn)
        if not (
            A.admissibility_residual(conn).is_zero
            and A.admissibility_residual(conn_star).is_zero
        ):
            results.append(_na(f"SSe8[{label}]", "pair not jointly admissible"))
            continue
        results.append(
            _from_residual(f"SSe8[{label}]", admissibility_locality_residual(A, conn, conn_star))
        )
    return results


def check_sse25(doc):
    """Endpoint identities of the alpha family."""
    A = doc.algebroid
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        endpoints = (
            ("alpha=1-is-conjugate", alpha_connection(pair, 1), pair.nabla_star),
            ("alpha=-1-is-nabla", alpha_connection(pair, -1), pair.nabla),
            ("alpha=0-is-mean", alpha_connection(pair, 0), mean_connection(pair)),
        )
        for tag, got, expect in endpoints:
            results.append(
                _from_residual(
                    f"SSe25[{label}]:{tag}", Residual("d", difference_tensor(A, got, expect))
                )
            )
    return results


def check_ss29(doc):
    """Flat conjugate pairs have an alpha-symmetric curvature family."""
    A = doc.algebroid
    if A.projector is None:
        return [_na("SS29", "no locality projector")]
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        if not (curvature(A, pair.nabla).is_zero and curvature(A, pair.nabla_star).is_zero):
            results.append(_na(f"SS29[{label}]", "pair is not flat"))
            continue
        for alpha in ALPHA_VALUES:
            results.append(
                _from_residual(
                    f"SS29[{label}]:alpha={alpha}",
                    alpha_flat_symmetry_residual(A, pair, alpha),
                )
            )
    return results


# -- hessian layer ------------------------------------------------------------


def check_lp1(doc):
    """Three-way Hessian symmetry equivalence report."""
    A = doc.algebroid
    if A.projector is None:
        return [_na("lp1", "no locality projector")]
    results = []
    for name, conn in _connections(doc):
        report = hessian_symmetry_equivalences(A, conn)
        for key, value in report.entries.items():
            label = f"lp1[{name}]:{key}"
            if isinstance(value, Residual):
                results.append(_from_residual(label, value))
            elif isinstance(value, str):
                results.append(CheckResult(label, "pass", note=value))
            else:
                results.append(CheckResult(label, "pass" if value else "fail"))
    return results


def check_lp2(doc):
    """Hessian structures are Codazzi; includes the lc3 statistical shadow."""
    A = doc.algebroid
    if A.projector is None:
        return [_na("lp2", "no locality projector")]
    if not doc.functions:
        return [_na("lp2", "no potential function declared")]
    results = []
    for fname, f in sorted(doc.functions.items()):
        for label, g, conn in _metric_connections(doc):
            report = hessian_structure_check(A, conn, g, f)
            structural = ("flat", "projected-torsion-free", "metric-equals-hessian")
            is_structure = all(
                report.entries[key].is_zero
                if isinstance(report.entries[key], Residual)
                else report.entries[key]
                for key in structural
            )
            if not is_structure:
                results.append(_na(f"lp2[{label}:{fname}]", "not a Hessian structure"))
                continue
            results.append(_from_residual(f"lp2[{label}:{fname}]:codazzi", report.entries["codazzi"]))
            if "statistical-invariants" in report.entries:
                results.append(
                    CheckResult(
                        f"lc3[{label}:{fname}]",
                        "pass" if report.entries["statistical-invariants"] else "fail",
                    )
                )
    return results


def check_lp3(doc):
    """Fundamental theorem residual with holonomy preconditions."""
    A = doc.algebroid
    if A.projector is None:
        return [_na("lp3", "no locality projector")]
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        outcome = fundamental_theorem_residual(A, pair)
        if not outcome.applicable:
            note = "anholonomic frame"
            if outcome.obstruction is not None:
                summary = outcome.obstruction.summary()
                note += (
                    f"; obstruction nonzero components = "
                    f"{summary['residual_nonzero_components']}"
                )
            results.append(_na(f"lp3[{label}]", note))
            continue
        results.append(_from_residual(f"lp3[{label}]", outcome))
    return results


def check_lc1(doc):
    """Projected torsion with image in ker rho still gives symmetric Hessians."""
    A = doc.algebroid
    if A.projector is None:
        return [_na("lc1", "no locality projector")]
    results = []
    for name, conn in _connections(doc):
        T_hat = projected_torsion(A, conn)
        in_kernel = True
        for b, c in itertools.product(range(A.rank), repeat=2):
            section = A.vector([T_hat.comps[a, b, c] for a in range(A.rank)])
            for i in range(A.dim):
                acc = sum(
                    (section.comps[a] * A.anchor[a, i] for a in range(A.rank)), A.zero()
                )
                if not acc.is_zero:
                    in_kernel = False
        if not in_kernel:
            results.append(_na(f"lc1[{name}]", "projected torsion image escapes ker rho"))
            continue
        for index, f in enumerate(_default_probes(A)):
            H = hessian(A, conn, f)
            results.append(
                _from_residual(
                    f"lc1[{name}]:probe-{index}", Residual("h", H - H.swap_slots(1, 2))
                )
            )
    return results


def check_lc2(doc):
    """Torsion transfer makes the conjugate's Hessian symmetric too."""
    A = doc.algebroid
    if A.projector is None:
        return [_na("lc2", "no locality projector")]
    results = []
    for label, g, conn in _metric_connections(doc):
        conn_star = conjugate_connection(A, g, conn)
        if not projected_torsion(A, conn).is_zero:
            results.append(_na(f"lc2[{label}]", "connection not projected-torsion-free"))
            continue
        T_diff = torsion(A, conn) - torsion(A, conn_star)
        mb = modified_bracket_coeffs(A, conn)
        mb_star = modified_bracket_coeffs(A, conn_star)
        bracket_diff = ETensor(1, 2, A.rank, A.coords, mb - mb_star)
        if not (T_diff - bracket_diff).is_zero:
            results.append(_na(f"lc2[{label}]", "torsion-transfer hypothesis fails"))
            continue
        for index, f in enumerate(_default_probes(A)):
            H = hessian(A, conn_star, f)
            results.append(
                _from_residual(
                    f"lc2[{label}]:probe-{index}", Residual("h", H - H.swap_slots(1, 2))
                )
            )
    return results


def check_lc4(doc):
    """Constant curvature transfers to the conjugate under lp3 hypotheses."""
    A = doc.algebroid
    if A.projector is None:
        return [_na("lc4", "no locality projector")]
    results = []
    for label, g, conn in _metric_connections(doc):
        pair = _pair(doc, g, conn)
        outcome = fundamental_theorem_residual(A, pair)
        if not outcome.applicable:
            results.append(_na(f"lc4[{label}]", "anholonomic frame"))
            continue
        if not A.admissibility_residual(conn).is_zero:
            results.append(_na(f"lc4[{label}]", "connection not admissible"))
            continue
        constant, kappa = constant_curvature_check(A, conn, g)
        if not constant:
            results.append(_na(f"lc4[{label}]", "connection has no constant curvature"))
            continue
        results.append(
            _from_residual(
                f"lc4[{label}]:kappa={kappa}",
                conjugate_curvature_transfer_residual(A, pair, kappa),
            )
        )
    return results


REGISTRY = {
    "eb12": check_eb12,
    "eb14": check_eb14,
    "SSe8": check_sse8,
    "SSe25": check_sse25,
    "SSp1": check_ssp1,
    "SSp2": check_ssp2,
    "SSp3": check_ssp3,
    "SSp4": check_ssp4,
    "SSp5": check_ssp5,
    "SSp6": check_ssp6,
    "SSp7": check_ssp7,
    "SSp8": check_ssp8,
    "SSp9": check_ssp9,
    "SSp10": check_ssp10,
    "SSp11": check_ssp11,
    "SS29": check_ss29,
    "lp1": check_lp1,
    "lp2": check_lp2,
    "lp3": check_lp3,
    "lc1": check_lc1,
    "lc2": check_lc2,
    "lc3": check_lp2,
    "lc4": check_lc4,
}


def run_check(check_id, doc):
    if check_id not in REGISTRY:
        raise KeyError(check_id)
    return REGISTRY[check_id](doc)


def run_all(doc):
    results = []
    seen = set()
    for check_id in sorted(REGISTRY, key=str.lower):
        runner = REGISTRY[check_id]
        if runner in seen:
            continue
        seen.add(runner)
        results.extend(runner(doc))
    return results
