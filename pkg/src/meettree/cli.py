import logging
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import click

from .amalg import amalgamate_total, brute_force_amalgam_k1, check_amalgam, nonap_witness, problem_from_sides
from .config import SearchConfig
from .errors import BudgetExceeded, Finding, InputError, MeetTreeError, PreconditionError
from .io import (
    aut_pair_to_json,
    automorphism_from_json,
    automorphism_to_json,
    certificate_to_json,
    exhaustion_to_json,
    irreconcilable_to_json,
    orbit_report,
    parse_rational,
    pec_result_to_json,
    read_json,
    report_json,
    search_result_to_json,
    solution_to_json,
)
from .laws import run_battery
from .nopair import evaluate_certificate, nopair_demo, nopair_exhaust
from .pautomorph import PartialAutomorphism, initial_points, orbit_decomposition
from .pec import check_pec, determinism_certificate, pec_close, replay_certificate
from .tree import canonical_form, enumerate_trees
from .tree_types import RunReport

logger = logging.getLogger("meettree")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_FINDING = 3


class Session:
    """Options shared by every verb."""

    def __init__(self, seed: Optional[int], timings: bool) -> None:
        self.config = SearchConfig.from_env(**({"seed": seed} if seed is not None else {}))
        self.timings = timings
        self.verbose = 0
        self.inputs: Dict[str, str] = {}
        self.started = time.perf_counter()

    def load(self, name: str, path: str) -> Any:
        obj, digest = read_json(path)
        self.inputs[name] = digest
        return obj

    def automorphism(self, name: str, path: str) -> PartialAutomorphism:
        return automorphism_from_json(self.load(name, path), f"{path}:$")

    def emit(self, command: str, verdicts: Dict[str, Any], budget_used: Optional[Dict[str, int]] = None) -> None:
        elapsed = round(time.perf_counter() - self.started, 3) if self.timings else None
        report = RunReport(command, dict(self.inputs), verdicts, self.config.seed, elapsed, budget_used or {})
        click.echo(report_json(report))


def _progress(verbose: int) -> Optional[Callable[[str, int], None]]:
    if not verbose:
        return None
    return lambda msg, pct: logger.info("[%3d%%] %s", pct, msg)


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else (logging.INFO if verbose == 1 else logging.DEBUG)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("meettree")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False


@click.group()
@click.option("--verbose", "-v", count=True, help="Log to stderr; repeat for debug detail")
@click.option("--timings", is_flag=True, default=False, help="Record elapsed time in the report")
@click.option("--seed", type=int, default=None, help="Seed for randomized corpora (default from config)")
@click.pass_context
def cli(ctx: click.Context, verbose: int, timings: bool, seed: Optional[int]) -> None:
    """Finite meet-trees, their partial automorphisms, and amalgamation experiments."""
    _configure_logging(verbose)
    ctx.obj = Session(seed, timings)
    ctx.obj.verbose = verbose


@cli.command("enumerate")
@click.option("--max-size", default=5, show_default=True, help="Largest tree size")
@click.pass_obj
def enumerate_cmd(session: Session, max_size: int) -> None:
    trees = enumerate_trees(max_size, session.config)
    counts: Dict[str, int] = {}
    for tree in trees:
        counts[str(len(tree))] = counts.get(str(len(tree)), 0) + 1
    session.emit("enumerate", {"counts": counts, "codes": [canonical_form(t) for t in trees]})


@cli.command("classify")
@click.option("--in", "tree_path", type=click.Path(), default=None, help="Tree JSON (when --map has no tree)")
@click.option("--map", "map_path", type=click.Path(), required=True, help="Automorphism JSON")
@click.pass_obj
def classify_cmd(session: Session, tree_path: Optional[str], map_path: str) -> None:
    obj = session.load("map", map_path)
    if isinstance(obj, dict) and "tree" not in obj:
        if tree_path is None:
            raise InputError("map file has no tree; pass --in", map_path)
        obj = {"tree": session.load("tree", tree_path), "map": obj.get("map", [])}
    p = automorphism_from_json(obj, f"{map_path}:$")
    orbits = [orbit_report(p.tree, o) for o in orbit_decomposition(p)]
    session.emit("classify", {"orbits": orbits, "initial_points": sorted(initial_points(p))})


@cli.command("amalgamate")
@click.option("--base", "base_path", type=click.Path(), required=True)
@click.option("--left", "left_path", type=click.Path(), required=True)
@click.option("--right", "right_path", type=click.Path(), required=True)
@click.option("--max-size", type=int, default=None, help="Bound for the search when maps are not total")
@click.option("--arity", type=int, default=None, help="Only accept amalgams of at most this arity")
@click.pass_obj
def amalgamate_cmd(
    session: Session, base_path: str, left_path: str, right_path: str, max_size: Optional[int], arity: Optional[int]
) -> None:
    problem = problem_from_sides(
        session.automorphism("base", base_path),
        session.automorphism("left", left_path),
        session.automorphism("right", right_path),
    )
    total = all(p.domain == frozenset(p.tree.labels) for p in (problem.base, problem.left, problem.right))
    if total and arity is None:
        solution = amalgamate_total(problem)
        verdicts = {
            "verdict": "amalgam found",
            "solution": solution_to_json(solution),
            "violations": check_amalgam(problem, solution),
        }
        session.emit("amalgamate", verdicts)
        return
    bound = max_size or session.config.max_enumeration_size
    result = brute_force_amalgam_k1(
        problem, bound, arity, session.config, session.timings, _progress(session.verbose)
    )
    session.emit("amalgamate", search_result_to_json(result), {"nodes": result.report.nodes})


@cli.command("pec-check")
@click.option("--in", "in_path", type=click.Path(), required=True, help="Automorphism JSON")
@click.option("--depth", default=2, show_default=True, help="Forward steps to look ahead")
@click.pass_obj
def pec_check_cmd(session: Session, in_path: str, depth: int) -> None:
    p = session.automorphism("in", in_path)
    result = check_pec(p, depth, session.config)
    session.emit("pec-check", pec_result_to_json(result), {"frontier": result.frontier_size})


@cli.command("pec-close")
@click.option("--in", "in_path", type=click.Path(), required=True, help="Automorphism JSON")
@click.option("--depth", default=2, show_default=True, help="Depth the closure must pass")
@click.pass_obj
def pec_close_cmd(session: Session, in_path: str, depth: int) -> None:
    p = session.automorphism("in", in_path)
    closed = pec_close(p, depth, session.config, _progress(session.verbose))
    check = check_pec(closed, depth, session.config)
    session.emit("pec-close", {"closed": automorphism_to_json(closed), "check": pec_result_to_json(check)})


@cli.command("certify-determined")
@click.option("--in", "in_path", type=click.Path(), required=True, help="Automorphism JSON")
@click.option("--steps", default=3, show_default=True, help="Immediate extensions to certify")
@click.pass_obj
def certify_cmd(session: Session, in_path: str, steps: int) -> None:
    p = session.automorphism("in", in_path)
    cert = determinism_certificate(p, steps)
    session.emit("certify-determined", {"certificate": certificate_to_json(cert), "replayed": replay_certificate(cert)})


@cli.command("nopair-demo")
@click.option("--a", "a_text", default="0", show_default=True, help="Anchor point (rational)")
@click.option("--b", "b_text", default="-1", show_default=True, help="Its common image, below a")
@click.pass_obj
def nopair_demo_cmd(session: Session, a_text: str, b_text: str) -> None:
    a, b = parse_rational(a_text, "--a"), parse_rational(b_text, "--b")
    if not b < a:
        raise PreconditionError("the seed pair needs b < a")
    _, minimal, result = nopair_demo(a, b)
    table = {
        "first": evaluate_certificate(result.first, result.certificate),
        "second": evaluate_certificate(result.second, result.certificate),
    }
    session.emit(
        "nopair-demo",
        {
            "seed": [str(a), str(b)],
            "minimal_pair": aut_pair_to_json(minimal),
            "pairs": irreconcilable_to_json(result, table),
        },
    )


@cli.command("nopair-exhaust")
@click.option("--max-size", default=9, show_default=True, help="Largest merged linear order")
@click.pass_obj
def nopair_exhaust_cmd(session: Session, max_size: int) -> None:
    _, _, result = nopair_demo(Fraction(0), Fraction(-1))
    report = nopair_exhaust(result.first, result.second, max_size)
    verdict = "no common extension" if report.solutions == 0 else "common extension found"
    session.emit(
        "nopair-exhaust",
        {"verdict": verdict, "pairs": irreconcilable_to_json(result), "report": exhaustion_to_json(report)},
        {"nodes": report.nodes},
    )


@cli.command("check-laws")
@click.option("--max-size", default=5, show_default=True, help="Largest tree size in the battery")
@click.pass_obj
def check_laws_cmd(session: Session, max_size: int) -> None:
    results = run_battery(max_size, session.config, _progress(session.verbose))
    laws = {r.name: {"checked": r.checked, "failures": len(r.failures), "examples": list(r.failures[:3])} for r in results}
    session.emit("check-laws", {"all_held": all(r.held for r in results), "laws": laws})


@cli.command("nonap")
@click.option("--arity", "k", default=2, show_default=True, help="Arity bound k >= 2")
@click.option("--max-size", default=8, show_default=True, help="Largest candidate amalgam")
@click.option("--bounded/--unbounded", default=True, help="Enforce the arity bound on candidates")
@click.pass_obj
def nonap_cmd(session: Session, k: int, max_size: int, bounded: bool) -> None:
    problem, result = nonap_witness(k, max_size, bounded, session.config, session.timings)
    verdicts = search_result_to_json(result)
    verdicts["instance"] = {"provenance": list(problem.provenance), "arity": k, "bounded": bounded}
    session.emit("nonap", verdicts, {"nodes": result.report.nodes})


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cli.main(args=argv, prog_name="meettree", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_BUDGET
    except (InputError, PreconditionError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except Finding as exc:
        click.echo(f"finding: {exc}", err=True)
        return EXIT_FINDING
    except MeetTreeError as exc:  # pragma: no cover
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
