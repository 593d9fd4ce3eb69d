"""
Command implementations. Every cmd_* returns (Report, exit_code) and leaves
printing to main.py; progress lines go to stderr.
"""
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from analysis.classical import (
    analyze_classical,
    analyze_operational,
    check_thm3,
    decompose,
    is_totally_nonclassical,
)
from analysis.topological import (
    analyze_topological,
    check_prop2,
    coverage_structure,
    t_classical_system,
    topological_witness,
)
from cli.documents import (
    LatticeDocument,
    SpsDocument,
    lattice_document,
    read_document,
    sps_document,
    to_lattice,
    to_sps,
    write_document,
)
from cli.reports import Report, digest_bytes, digest_params
from core.errors import InvalidOrtho, SpsLabError
from core.fixtures import named_fixtures
from core.lattice import OrthoMap, enumerate_orthos, mo_lattice, pentagon, require_ortho, verify_ortho
from core.sps import FiniteSps, TestPair, verify_axioms
from model.builder import SphereModelConfig, build_model, counterexample_eps0, epsilon_sweep
from model.sphere import NORTH, TestSpec, point_at_angle, simulate

Result = Tuple[Report, int]

EXIT_OK = 0
EXIT_DOMAIN = 2


def say(message: str, quiet: bool = False) -> None:
    if not quiet:
        print(message, file=sys.stderr)


def _props(s: FiniteSps, props: Iterable[int]) -> List[str]:
    return [s.property_name(a) for a in sorted(props)]


def _axiom_section(verdict) -> List[Dict[str, Any]]:
    rows = []
    for c in verdict.checks:
        row: Dict[str, Any] = {"axiom": c.axiom, "passed": c.passed}
        if not c.passed:
            row["witness"] = list(c.witness) if c.witness else None
            row["detail"] = c.detail
        rows.append(row)
    return rows


def _ortho_checks(names: Sequence[str], verdict) -> List[Dict[str, Any]]:
    rows = []
    for c in verdict.checks:
        row: Dict[str, Any] = {"axiom": c.axiom, "passed": c.passed}
        if not c.passed and c.witness:
            row["witness"] = [names[i] if 0 <= i < len(names) else i for i in c.witness]
        rows.append(row)
    return rows


def _ortho_pairs(names: Sequence[str], m: OrthoMap) -> List[List[str]]:
    return [[names[a], names[m(a)]] for a in range(len(m.image)) if a <= m(a)]


# ------------------------- check -------------------------
def cmd_check(path: str, quiet: bool = False) -> Result:
    say(f"Checking {path}...", quiet)
    doc, raw = read_document(path)
    report = Report(command="check", input_digest=digest_bytes(raw))

    if isinstance(doc, LatticeDocument):
        l, ortho = to_lattice(doc)
        report.sections["lattice"] = {"elements": l.size, "bottom": l.names[l.bottom], "top": l.names[l.top]}
        if ortho is None:
            return report, EXIT_OK
        verdict = verify_ortho(l, ortho)
        report.sections["ortho"] = _ortho_checks(l.names, verdict)
        return report, EXIT_OK if verdict.passed else EXIT_DOMAIN

    if isinstance(doc, SphereModelConfig):
        s, tests = build_model(doc)
        doc = SpsDocument.model_validate(sps_document(s, tests=tests))

    s, ortho, _ = to_sps(doc)
    say("Verifying axioms...", quiet)
    verdict = verify_axioms(s)
    report.sections["axioms"] = _axiom_section(verdict)
    report.sections["summary"] = {"states": len(s.states), "properties": s.size, "passed": verdict.passed}
    if not verdict.passed:
        first = verdict.failures()[0]
        report.witnesses[first.axiom] = list(first.witness) if first.witness else None
        return report, EXIT_DOMAIN

    if ortho is not None:
        o_verdict = verify_ortho(s.lattice, ortho)
        report.sections["ortho"] = _ortho_checks(s.lattice.names, o_verdict)
        if not o_verdict.passed:
            return report, EXIT_DOMAIN
    return report, EXIT_OK


# ------------------------- analyze -------------------------
def _classical_section(s: FiniteSps, m: OrthoMap) -> Dict[str, Any]:
    analysis = analyze_classical(s, m)
    return {
        "classical": _props(s, analysis.classical_set),
        "classical_state": {s.states[p]: s.property_name(w) for p, w in enumerate(analysis.classical_state_of)},
        "omega": _props(s, analysis.omega),
        "totally_nonclassical": is_totally_nonclassical(s, m),
    }


def _operational_section(s: FiniteSps, tests: Sequence[TestPair]) -> Dict[str, Any]:
    analysis = analyze_operational(s, tests)
    return {
        "tests": len(tests),
        "operationally_classical": _props(s, analysis.cop_set),
        "operational_state": {s.states[p]: s.property_name(w) for p, w in enumerate(analysis.omega_op_of)},
    }


def _topological_section(s: FiniteSps) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    analysis = analyze_topological(s)
    witnesses = {}
    for a in range(s.size):
        if a not in analysis.top_set:
            witnesses[s.property_name(a)] = s.property_name(topological_witness(s, a))
    sub = t_classical_system(s)
    section = {
        "topological": _props(s, analysis.top_set),
        "all_topological": len(analysis.top_set) == s.size,
        "topological_state": {s.states[p]: s.property_name(t) for p, t in enumerate(analysis.tau_of)},
        "t_states": _props(s, analysis.t_states),
        "t_classical": analysis.t_classical,
        "t_classical_system": {"states": list(sub.states), "properties": sub.size},
    }
    return section, witnesses


def cmd_analyze(path: str, classical: bool = False, topological: bool = False, ortho_search: bool = False,
                thm3: bool = False, prop2: bool = False, coverage: bool = False,
                size_cap: Optional[int] = None, quiet: bool = False) -> Result:
    say(f"Analyzing {path}...", quiet)
    doc, raw = read_document(path)
    report = Report(command="analyze", input_digest=digest_bytes(raw))
    exit_code = EXIT_OK

    if isinstance(doc, LatticeDocument):
        l, _ = to_lattice(doc)
        if ortho_search:
            found = enumerate_orthos(l, cap=size_cap)
            report.sections["ortho_search"] = {
                "count": len(found),
                "orthos": [_ortho_pairs(l.names, m) for m in found],
                "verdict": "orthocomplementations found" if found else "no orthocomplementation exists",
            }
            exit_code = EXIT_OK if found else EXIT_DOMAIN
        return report, exit_code

    if isinstance(doc, SphereModelConfig):
        s, tests = build_model(doc)
        doc = SpsDocument.model_validate(sps_document(s, tests=tests))

    s, ortho, tests = to_sps(doc)
    verdict = verify_axioms(s)
    if not verdict.passed:
        report.sections["axioms"] = _axiom_section(verdict)
        return report, EXIT_DOMAIN

    if ortho is not None:
        require_ortho(s.lattice, ortho)

    if ortho_search:
        say("Enumerating orthocomplementations...", quiet)
        found = enumerate_orthos(s.lattice, cap=size_cap)
        report.sections["ortho_search"] = {
            "count": len(found),
            "orthos": [_ortho_pairs(s.lattice.names, m) for m in found],
            "verdict": "orthocomplementations found" if found else "no orthocomplementation exists",
        }
        if not found:
            exit_code = EXIT_DOMAIN
        elif ortho is None:
            ortho = found[0]

    if (classical or thm3) and ortho is None:
        raise InvalidOrtho("Classical analysis needs an orthocomplementation: add one to the document "
                           "or pass --ortho-search.")

    if classical:
        say("Computing classical properties...", quiet)
        report.sections["classical"] = _classical_section(s, ortho)
        report.sections["operational"] = _operational_section(s, tests)

    if topological:
        say("Computing topological properties...", quiet)
        section, witnesses = _topological_section(s)
        report.sections["topological"] = section
        if witnesses:
            report.witnesses["not_topological"] = witnesses

    if thm3:
        r = check_thm3(s, ortho)
        report.sections["thm3"] = {
            "classical": _props(s, r.classical),
            "topological": _props(s, r.topological),
            "centre": _props(s, r.centre),
            "atomistic": r.atomistic,
            "classical_equals_topological": r.classical_equals_topological,
            "classical_in_centre": r.classical_in_centre,
            "centre_matches": r.centre_matches,
            "holds": r.holds,
        }
        if r.witness is not None:
            report.witnesses["thm3"] = s.property_name(r.witness)
        if not r.holds:
            exit_code = EXIT_DOMAIN

    if prop2:
        r = check_prop2(s, tests)
        report.sections["prop2"] = {
            "unconditional_holds": r.unconditional_holds,
            "condition_holds": r.condition_holds,
            "join_identity_holds": r.join_identity_holds,
            "union_identity_holds": r.union_identity_holds,
        }
        if r.condition_witness is not None:
            report.witnesses["prop2_condition"] = s.property_name(r.condition_witness)
        if r.unconditional_witness or r.identity_witness:
            report.witnesses["prop2"] = r.unconditional_witness or r.identity_witness
        if not r.holds:
            exit_code = EXIT_DOMAIN

    if coverage:
        r = coverage_structure(s, tests)
        report.sections["coverage"] = {
            "topological": {"kind": r.topological.kind, "members": _masks(s, r.topological.members)},
            "operational": {"kind": r.operational.kind, "members": _masks(s, r.operational.members)},
            "same_structure": r.same_structure,
        }
    return report, exit_code


def _masks(s: FiniteSps, masks: Iterable[int]) -> List[str]:
    return [s.property_name(s.index_of[m]) for m in masks]


# ------------------------- decompose -------------------------
def cmd_decompose(path: str, out_dir: Optional[str] = None, quiet: bool = False) -> Result:
    say(f"Decomposing {path}...", quiet)
    doc, raw = read_document(path)
    report = Report(command="decompose", input_digest=digest_bytes(raw))
    if not isinstance(doc, SpsDocument):
        raise InvalidOrtho("decompose needs an SPS document with an orthocomplementation.")
    s, ortho, _ = to_sps(doc)
    verdict = verify_axioms(s)
    if not verdict.passed:
        report.sections["axioms"] = _axiom_section(verdict)
        return report, EXIT_DOMAIN
    if ortho is None:
        raise InvalidOrtho("The document has no orthocomplementation.")

    result = decompose(s, ortho)
    target = Path(out_dir) if out_dir else Path(path).parent
    target.mkdir(parents=True, exist_ok=True)
    stem = Path(path).stem
    summands = []
    for k, summand in enumerate(result.summands):
        name = f"{stem}.summand{k}.json"
        write_document(target / name, sps_document(summand.sps, summand.ortho))
        summands.append({
            "omega": s.property_name(summand.omega),
            "states": len(summand.sps.states),
            "properties": summand.sps.size,
            "totally_nonclassical": is_totally_nonclassical(summand.sps, summand.ortho),
            "file": name,
        })
    say(f"Wrote {len(summands)} summand document(s) to {target}", quiet)
    report.sections["decomposition"] = {"count": len(summands), "summands": summands}
    report.witnesses["isomorphism"] = {
        "state_map": list(result.witness.state_map),
        "property_map": list(result.witness.property_map),
    }
    return report, EXIT_OK


# ------------------------- model -------------------------
def _config_digest(config: SphereModelConfig, raw: Optional[bytes]) -> str:
    return digest_bytes(raw) if raw is not None else digest_params(config.model_dump())


def cmd_model_build(config: SphereModelConfig, raw: Optional[bytes] = None, output: Optional[str] = None,
                    quiet: bool = False) -> Result:
    say(f"Building the sphere model (epsilon={config.epsilon})...", quiet)
    s, tests = build_model(config)
    document = sps_document(s, tests=tests)
    if output:
        write_document(output, document)
        say(f"Wrote {output}", quiet)
    report = Report(command="model build", input_digest=_config_digest(config, raw))
    report.sections["model"] = {"states": len(s.states), "properties": s.size, "tests": len(tests)}
    report.sections["document"] = document
    return report, EXIT_OK


SIMULATION_COLUMNS = ["epsilon", "d", "direction_index", "theta", "trials", "up_count", "analytic_probability"]


def cmd_model_simulate(thetas: Sequence[float], epsilon: float, d: float, n: int, seed: int,
                       workers: int = 1, quiet: bool = False) -> Result:
    spec = TestSpec(NORTH, epsilon, d)
    streams = np.random.SeedSequence(seed).spawn(len(thetas))
    rows = []
    for theta, stream in zip(thetas, streams):
        say(f"Simulating theta={theta} over {n} trials...", quiet)
        result = simulate(point_at_angle(theta), spec, n, stream, workers=workers, progress=not quiet)
        rows.append({
            "epsilon": epsilon,
            "d": d,
            "direction_index": 0,
            "theta": theta,
            "trials": result.trials,
            "up_count": result.up_count,
            "analytic_probability": result.probability,
        })
    params = {"thetas": list(thetas), "epsilon": epsilon, "d": d, "n": n}
    report = Report(command="model simulate", input_digest=digest_params(params), seed=seed)
    report.sections["rows"] = rows
    return report, EXIT_OK


SWEEP_COLUMNS = ["epsilon", "closed_sets", "topological", "defect", "t_classical"]


def cmd_model_sweep(config: SphereModelConfig, eps_list: Sequence[float], d_resolution: int,
                    raw: Optional[bytes] = None, quiet: bool = False) -> Result:
    say(f"Sweeping {len(eps_list)} epsilon value(s)...", quiet)
    rows = epsilon_sweep(config.sample_points(), config.direction_points(), eps_list, d_resolution,
                         progress=not quiet, d_grid=config.d_grid)
    params = {"config": config.model_dump(), "eps": list(eps_list), "d_resolution": d_resolution}
    report = Report(command="model sweep",
                    input_digest=digest_bytes(raw) if raw is not None else digest_params(params))
    report.sections["rows"] = [asdict(row) for row in rows]
    report.sections["endpoints"] = {
        "defect_first": rows[0].defect,
        "defect_last": rows[-1].defect,
        "defect_decreases": rows[0].defect > rows[-1].defect,
    }
    return report, EXIT_OK


def cmd_model_counterexample(config: SphereModelConfig, raw: Optional[bytes] = None,
                             size_cap: Optional[int] = None, quiet: bool = False) -> Result:
    say("Searching for an operationally classical, non-topological property...", quiet)
    r = counterexample_eps0(config.sample_points(), cap=size_cap)
    s = r.sps
    report = Report(command="model counterexample", input_digest=_config_digest(config, raw))
    report.sections["model"] = {"states": len(s.states), "properties": r.lattice_size,
                                "skipped_directions": list(r.skipped)}
    if r.ortho_exists is None:
        report.sections["ortho"] = {"verdict": f"lattice has {r.lattice_size} elements, above the cap of {r.cap}"}
    else:
        report.sections["ortho"] = {"verdict": "orthocomplementation exists" if r.ortho_exists
                                    else "no orthocomplementation exists"}
    if not r.found:
        report.sections["counterexample"] = {"found": False, "verdict": "insufficient sample"}
        return report, EXIT_DOMAIN
    report.sections["counterexample"] = {
        "found": True,
        "direction": r.direction,
        "union_size": r.union_size,
        "join_size": r.join_size,
    }
    report.witnesses["a_u"] = s.property_name(r.a_u)
    report.witnesses["b_u"] = s.property_name(r.b_u)
    report.witnesses["join"] = s.property_name(r.join)
    return report, EXIT_OK


# ------------------------- fixture -------------------------
LATTICE_FIXTURES = {
    "pentagon": lambda: (pentagon(), None),
    "mo2-lattice": lambda: mo_lattice(2),
}


def fixture_names() -> List[str]:
    return sorted(set(named_fixtures()) | set(LATTICE_FIXTURES))


def cmd_fixture(name: str, output: Optional[str] = None, quiet: bool = False) -> Result:
    if name in LATTICE_FIXTURES:
        l, ortho = LATTICE_FIXTURES[name]()
        document = lattice_document(l, ortho)
    else:
        fixtures = named_fixtures()
        if name not in fixtures:
            raise SpsLabError(f"Unknown fixture {name!r}; choose one of {', '.join(fixture_names())}.")
        s, ortho = fixtures[name]
        document = sps_document(s, ortho)
    if output:
        write_document(output, document)
        say(f"Wrote {output}", quiet)
    report = Report(command="fixture", input_digest=digest_params({"name": name}))
    report.sections["document"] = document
    return report, EXIT_OK
