import logging
import os
import time
from contextlib import contextmanager
from typing import Dict, List, Optional

from src.algebras import bar_resolution, check_algebra, check_bar, free_algebra
from src.basecat import check_monoid
from src.collection import check_collection
from src.data_loader import load_definition
from src.envelope import check_env_module, check_graded_monoid, env_of_free, graded_isomorphism, one_hole_words
from src.logger import log_run
from src.operads import check_operad
from src.reports import CommandReport
from src.simplicial import FinSimplicialSet, check_bisimplicial, check_simplicial, diag_coend_check
from src.trees import enumerate_trees, format_tree, pairs_level, parse_profile, stabilizer_freeness
from src.utils import InputError, append_jsonl, get_log_dir

logger = logging.getLogger(__name__)


def parse_generators(text: str, colors) -> Dict:
    """'x,y' for one-colored operads, 'r:x,m:y' otherwise."""
    colors = list(colors)
    generators: Dict = {c: [] for c in colors}
    for token in (t.strip() for t in text.split(",")):
        if not token:
            continue
        if ":" in token:
            color, name = token.split(":", 1)
            color = int(color) if color.isdigit() else color
        elif len(colors) == 1:
            color, name = colors[0], token
        else:
            raise InputError(f"Generator {token!r} needs a color prefix; colors are {colors}")
        if color not in generators:
            raise InputError(f"Unknown color {color!r} for generator {name!r}")
        generators[color].append(name)
    return generators


class CommandPipeline:
    """
    Runs one command in named stages. Stage timings are only reported when
    asked for, so default reports are byte-stable.
    """

    def __init__(self, timing: bool = False, progress: bool = False):
        self.timing = timing
        self.progress = progress
        self.timings: Dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.time()
        logger.info(f"[stage] {name}")
        yield
        self.timings[name] = time.time() - t0

    def _finish(self, report: CommandReport, inputs: dict) -> CommandReport:
        self.timings["total"] = sum(self.timings.values())
        if self.timing:
            report.timing = {k: round(v, 4) for k, v in self.timings.items()}
        log_run(report.command, inputs, f"{report.verdict} {[c.summary() for c in report.checks]}")
        append_jsonl(
            os.path.join(get_log_dir(), "runs.jsonl"),
            {"command": report.command, "inputs": inputs, "verdict": report.verdict, "elapsed": self.timings["total"]},
        )
        return report

    # -------------------------
    # check
    # -------------------------
    def check(self, path: str, arity_bound: Optional[int] = None) -> CommandReport:
        report = CommandReport(command=f"check {path}")
        with self.stage("load"):
            loaded = load_definition(path)
        kind, value = loaded.definition.kind, loaded.value
        report.details["kind"] = kind
        report.details["name"] = getattr(value, "name", kind)
        with self.stage("validate"):
            if kind == "operad":
                bound = arity_bound if arity_bound is not None else value.arity_bound
                report.add_check(check_operad(value, bound, progress=self.progress))
                report.tables["levels"] = value.size_table(bound)
            elif kind == "algebra":
                report.add_check(check_algebra(value, arity_bound, progress=self.progress))
                report.tables["carriers"] = value.size_table()
            elif kind == "collection":
                report.add_check(check_collection(value, arity_bound if arity_bound is not None else value.max_arity()))
                report.tables["levels"] = value.size_table()
            elif kind == "monoid":
                report.add_check(check_monoid(value))
                report.details["order"] = len(value.carrier)
            elif kind == "simplicial":
                explicit = value.to_explicit()
                report.add_check(check_simplicial(explicit))
                report.tables["simplices"] = _simplex_table(value, explicit.sizes())
            else:
                report.add_check(check_bisimplicial(value))
                report.tables["levels"] = [
                    {"n": n, "m": m, "size": len(level)} for (n, m), level in sorted(value.levels.items())
                ]
        return self._finish(report, {"path": path, "arity_bound": arity_bound})

    # -------------------------
    # trees
    # -------------------------
    def trees(self, profile: str, pairs: bool = False, listing: bool = False) -> CommandReport:
        report = CommandReport(command=f"trees {'--pairs-profile' if pairs else '--profile'} {profile}")
        with self.stage("enumerate"):
            s = parse_profile(profile)
            if pairs:
                level = pairs_level(s)
            else:
                if any(not isinstance(c, int) for c in s.inputs + (s.output,)):
                    raise InputError(f"Tree profiles use natural-number colors only; use the pairs profile for {profile!r}")
                level = enumerate_trees(s.inputs, s.output)
        report.details["profile"] = str(s)
        report.details["count"] = len(level)
        if listing:
            report.details["trees"] = [format_tree(t) for t in level]
        if not pairs and s.inputs and len(set(s.inputs)) < len(s.inputs):
            with self.stage("freeness"):
                freeness = stabilizer_freeness(s.inputs, s.output)
            report.add_check(freeness.report)
            report.details["orbits"] = freeness.orbits
        return self._finish(report, {"profile": profile, "pairs": pairs})

    # -------------------------
    # free / env
    # -------------------------
    def free(self, operad_path: str, generators: str, max_degree: int) -> CommandReport:
        report = CommandReport(command=f"free --operad {operad_path} --generators {generators} --max-degree {max_degree}")
        with self.stage("load"):
            o = _load_kind(operad_path, "operad")
        with self.stage("construct"):
            a = free_algebra(o, parse_generators(generators, o.colors), max_degree)
        with self.stage("validate"):
            report.add_check(check_algebra(a, progress=self.progress))
        report.tables["degrees"] = a.size_table()
        return self._finish(report, {"operad": operad_path, "generators": generators, "max_degree": max_degree})

    def env(self, operad_path: str, generators: str, max_degree: int) -> CommandReport:
        report = CommandReport(command=f"env --operad {operad_path} --generators {generators} --max-degree {max_degree}")
        with self.stage("load"):
            o = _load_kind(operad_path, "operad")
        if len(o.colors) != 1:
            raise InputError(f"The envelope command takes a one-colored operad, {o.name} has {len(o.colors)} colors")
        xs = parse_generators(generators, o.colors)
        (names,) = xs.values()
        with self.stage("construct"):
            env = env_of_free(o, names, max_degree)
            free = free_algebra(o, xs, max_degree)
        with self.stage("validate"):
            report.add_check(check_graded_monoid(env))
            report.add_check(check_env_module(env, free))
            if (o.provenance or {}).get("name", o.name) == "ass":
                iso = graded_isomorphism(env, one_hole_words(names, max_degree))
                report.add_check(iso.report)
        report.tables["degrees"] = [{"degree": n, "size": size} for n, size in enumerate(env.sizes())]
        return self._finish(report, {"operad": operad_path, "generators": generators, "max_degree": max_degree})

    # -------------------------
    # diag-check / bar
    # -------------------------
    def diag_check(self, path: str, max_dim: int) -> CommandReport:
        report = CommandReport(command=f"diag-check --bisimplicial {path} --max-dim {max_dim}")
        with self.stage("load"):
            x = _load_kind(path, "bisimplicial")
        with self.stage("coends"):
            result = diag_coend_check(x, max_dim, progress=self.progress)
        report.add_check(result.report)
        report.tables["nondegenerate"] = [
            {"dim": p, **{side: counts[p] for side, counts in result.counts.items()}} for p in range(max_dim + 1)
        ]
        return self._finish(report, {"path": path, "max_dim": max_dim})

    def bar(self, path: str, depth: int, max_degree: int) -> CommandReport:
        report = CommandReport(command=f"bar {path} --depth {depth} --max-degree {max_degree}")
        with self.stage("load"):
            a = _load_kind(path, "algebra")
        with self.stage("construct"):
            bar = bar_resolution(a, depth, max_degree)
        with self.stage("validate"):
            report.add_check(check_bar(bar))
        report.tables["levels"] = [
            {"level": n, "size": sum(len(bar.levels[n].carriers[c]) for c in a.operad.colors)} for n in range(depth + 1)
        ]
        return self._finish(report, {"path": path, "depth": depth, "max_degree": max_degree})


def _load_kind(path: str, kind: str):
    loaded = load_definition(path)
    if loaded.definition.kind != kind:
        raise InputError(f"{path} defines a {loaded.definition.kind}, expected a {kind}")
    return loaded.value


def _simplex_table(x: FinSimplicialSet, sizes) -> List[Dict[str, int]]:
    counts = x.counts()
    return [{"dim": n, "nondegenerate": counts[n], "all": sizes[n]} for n in range(len(counts))]
