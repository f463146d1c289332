"""Command-line front end: decide, verify, optimize, phi.

Reports go to stdout as one JSON object per line (or tables with --format text);
logging and progress bars go to stderr. Exit codes: 0 completed, 1 internal
error, 2 input error, 3 cap exceeded. A NO decision is a completed run.
"""
import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field

from tabulate import tabulate
from tqdm import tqdm

from src.errors import CapExceededError, DimensionMismatchError, InputError, IsopolyError, check_cap
from src.graphs import load_graph, random_graph
from src.optimize import METHODS, psi_n_max, psi_nn_max
from src.polytope_lab import compare_invariants, graph_complete, invariant_frame, phi_vertices, psi_vertices
from src.project_config import config, get_cap, load_config, setup_logging
from src.reductions import (DECISION_METHODS, decide_subgraph, decide_subgraph_oracle,
                            decide_subgraph_psi, decide_subgraph_psinn, minimal_lift_weight,
                            verify_face, verify_lift)
from src.tensor_core import format_rational, load_tensor, random_integer_tensor, seeded_generator

logger = logging.getLogger(__name__)

THEOREMS = ('1', '2', '3', 'C')


@dataclass
class RunConfig:
    """Everything one invocation depends on; equal configs print identical reports."""

    command: str
    output_format: str = 'json'
    threads: int = 1
    g_path: str = None
    h_path: str = None
    g_format: str = None
    h_format: str = None
    tensor_path: str = None
    method: str = None
    polytope: str = None
    pad: bool = False
    theorem: str = None
    n: int = None
    seed: int = 0
    trials: int = 25
    entry_bound: int = 9
    search_w: bool = False
    adjacency: bool = False
    compare: bool = False
    export: str = None
    caps: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args):
        values = {k: v for k, v in vars(args).items() if k in cls.__dataclass_fields__}
        return cls(caps=load_config()['caps'], **values)


def build_parser():
    defaults = config['defaults']
    parser = argparse.ArgumentParser(prog='isopoly',
                                     description="Exact optimization over graph isomorphism polytopes")
    parser.add_argument('--format', dest='output_format', choices=('json', 'text'), default=defaults['format'])
    parser.add_argument('--threads', type=int, default=defaults['threads'])
    parser.add_argument('--log-level', default=defaults['log_level'])
    sub = parser.add_subparsers(dest='command', required=True)

    decide = sub.add_parser('decide', help="does G contain a relabeled copy of H?")
    decide.add_argument('--g', dest='g_path', required=True)
    decide.add_argument('--h', dest='h_path', required=True)
    decide.add_argument('--g-format', choices=('graph6', 'edgelist'))
    decide.add_argument('--h-format', choices=('graph6', 'edgelist'))
    decide.add_argument('--method', choices=DECISION_METHODS + ('all',), default='all')
    decide.add_argument('--pad', action='store_true', help="pad a smaller H with isolated vertices")

    verify = sub.add_parser('verify', help="check a face, decision or lift identity by enumeration")
    verify.add_argument('--theorem', choices=THEOREMS, required=True)
    verify.add_argument('--n', type=int, required=True)
    verify.add_argument('--trials', type=int, default=defaults['trials'])
    verify.add_argument('--seed', type=int, default=defaults['seed'])
    verify.add_argument('--entry-bound', type=int, default=defaults['entry_bound'])
    verify.add_argument('--method', choices=METHODS, default='exhaustive')
    verify.add_argument('--search-w', action='store_true', help="also report the smallest working lift weight")

    optimize = sub.add_parser('optimize', help="maximize a tensor objective over psi or psinn")
    optimize.add_argument('--tensor', dest='tensor_path', required=True)
    optimize.add_argument('--polytope', choices=('psi', 'psinn'), required=True)
    optimize.add_argument('--method', choices=METHODS, default='exhaustive')

    phi = sub.add_parser('phi', help="vertex clouds, adjacency and invariants of phi_n")
    phi.add_argument('--n', type=int, required=True)
    phi.add_argument('--adjacency', action='store_true')
    phi.add_argument('--compare', action='store_true')
    phi.add_argument('--export', choices=('psi', 'phi'))
    return parser


# --- rendering ------------------------------------------------------------------------------

def _cell(value):
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return value


def render(report, output_format):
    if output_format == 'json':
        return json.dumps(report)
    if 'invariants' in report:
        table = invariant_frame({k: _cell(v) for k, v in row.items()} for row in report['invariants'])
        head = tabulate([(k, _cell(v)) for k, v in report.items() if k != 'invariants'], tablefmt='plain')
        return head + '\n' + table.to_markdown()
    return tabulate([(k, _cell(v)) for k, v in report.items()], tablefmt='plain')


def emit(report, run):
    print(render(report, run.output_format), flush=True)


def _progress(iterable, total, desc):
    return tqdm(iterable, total=total, desc=desc, disable=not sys.stderr.isatty())


# --- commands -------------------------------------------------------------------------------

def cmd_decide(run):
    G = load_graph(run.g_path, run.g_format)
    H = load_graph(run.h_path, run.h_format)
    methods = DECISION_METHODS if run.method == 'all' else (run.method,)
    answers = []
    for method in methods:
        decision = decide_subgraph(G, H, method=method, pad=run.pad, threads=run.threads)
        answers.append(decision.is_yes)
        emit(decision.to_json(), run)
    if run.method == 'all':
        emit({'agreement': len(set(answers)) == 1, 'is_yes': answers[0]}, run)


def _verify_face(run):
    report = verify_face(run.n)
    emit(dict({'theorem': '1'}, **report.to_json()), run)


def _verify_decisions(run):
    """Random graph pairs through the ψn route, the oracle and, for C, the ψn,n route."""
    with_psinn = run.theorem == 'C'
    check_cap('verify', run.n, get_cap('psi_nn' if with_psinn else 'psi_n_exhaustive'))
    rng = seeded_generator(run.seed)
    yes = no = disagreements = violations = 0
    for _ in _progress(range(run.trials), run.trials, f"theorem {run.theorem}"):
        G = random_graph(run.n, rng)
        H = random_graph(run.n, rng)
        decisions = [decide_subgraph_psi(G, H), decide_subgraph_oracle(G, H)]
        if with_psinn:
            decisions.append(decide_subgraph_psinn(G, H, method=run.method, threads=run.threads))
        answers = {d.is_yes for d in decisions}
        if len(answers) > 1:
            disagreements += 1
            logger.warning(f"Decision routes disagree on G={sorted(G.edges)} H={sorted(H.edges)}")
        violations += sum(1 for d in decisions if d.value is not None and d.value > d.threshold)
        if decisions[0].is_yes:
            yes += 1
        else:
            no += 1
    logger.info(f"Theorem {run.theorem} at n={run.n}: {yes} yes, {no} no, {disagreements} disagreements")
    emit({'theorem': run.theorem, 'n': run.n, 'trials': run.trials, 'seed': run.seed,
          'yes': yes, 'no': no, 'disagreements': disagreements, 'inequality_violations': violations,
          'holds': disagreements == 0 and violations == 0}, run)


def _verify_lift(run):
    check_cap('verify', run.n, get_cap('psi_nn'))
    rng = seeded_generator(run.seed)
    equal = {'general': 0, 'nonnegative': 0}
    violations = []
    records = []
    for trial in _progress(range(run.trials), run.trials, "theorem 3"):
        general = random_integer_tensor(run.n, run.entry_bound, rng)
        nonnegative = random_integer_tensor(run.n, run.entry_bound, rng, nonnegative=True)
        for mode, W in (('general', general), ('nonnegative', nonnegative)):
            check = verify_lift(W, mode, method=run.method, threads=run.threads)
            if check.holds:
                equal[mode] += 1
            else:
                violations.append(dict({'trial': trial}, **check.to_json()))
            if run.search_w:
                smallest = minimal_lift_weight(W)
                records.append({'trial': trial, 'mode': mode, 'w': format_rational(check.spec.w),
                                'minimal_w': None if smallest is None else format_rational(smallest)})
    logger.info(f"Theorem 3 at n={run.n}: {equal['general']}/{run.trials} general, "
                f"{equal['nonnegative']}/{run.trials} nonnegative")
    report = {'theorem': '3', 'n': run.n, 'trials': run.trials, 'seed': run.seed,
              'entry_bound': run.entry_bound, 'general_equal': equal['general'],
              'nonnegative_equal': equal['nonnegative'], 'violations': violations,
              'holds': not violations}
    if run.search_w:
        report['lift_weights'] = records
    emit(report, run)


def cmd_verify(run):
    if run.trials < 0:
        raise InputError(f"--trials must be >= 0, got {run.trials}")
    if run.n < 1:
        raise InputError(f"--n must be >= 1, got {run.n}")
    if run.theorem == '1':
        _verify_face(run)
    elif run.theorem == '3':
        _verify_lift(run)
    else:
        _verify_decisions(run)


def cmd_optimize(run):
    W = load_tensor(run.tensor_path)
    solve = psi_n_max if run.polytope == 'psi' else psi_nn_max
    result = solve(W, method=run.method, threads=run.threads)
    emit(dict({'polytope': run.polytope}, **result.to_json()), run)


def cmd_phi(run):
    if not (run.adjacency or run.compare or run.export):
        raise InputError("phi needs at least one of --adjacency, --compare, --export")
    if run.adjacency or run.compare:
        check_cap('phi', run.n, get_cap('lab_adjacency_n'))
    if run.export:
        cloud = psi_vertices(run.n) if run.export == 'psi' else phi_vertices(run.n)
        emit(dict({'polytope': run.export, 'n': run.n}, **cloud.to_json()), run)
    if run.adjacency:
        report = graph_complete(phi_vertices(run.n), threads=run.threads)
        emit(dict({'polytope': 'phi', 'n': run.n}, **report.to_json()), run)
    if run.compare:
        emit(compare_invariants(run.n, threads=run.threads).to_json(), run)


COMMANDS = {'decide': cmd_decide, 'verify': cmd_verify, 'optimize': cmd_optimize, 'phi': cmd_phi}


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    exit_codes = config['exit_codes']
    try:
        run = RunConfig.from_args(args)
        if run.threads < 1:
            raise InputError(f"--threads must be >= 1, got {run.threads}")
        logger.info(f"Running {run.command}: {asdict(run)}")
        COMMANDS[run.command](run)
        return exit_codes['ok']
    except (InputError, DimensionMismatchError) as e:
        return _fail(e, e.kind, exit_codes['input_error'])
    except CapExceededError as e:
        return _fail(e, e.kind, exit_codes['cap_exceeded'])
    except Exception as e:
        logger.exception("Unexpected failure")
        kind = e.kind if isinstance(e, IsopolyError) else 'internal_error'
        return _fail(e, kind, exit_codes['internal_error'])


def _fail(error, kind, status):
    logger.error(f"{kind}: {error}")
    print(json.dumps({'error': kind, 'message': str(error)}), file=sys.stderr)
    return status
