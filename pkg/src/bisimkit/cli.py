"""Command-line surface: minimize, compare, audit-tree, gen, bench.

Exit codes: 0 success, 1 semantic failure (kernel mismatch, audit
failure), 2 configuration or parse errors.
"""

from __future__ import annotations

import csv
import sys
import click

from .coalgebra import Coalgebra
from .engine import RefineResult, refine_hopcroft, refine_naive
from .formats import (
    FORMATS,
    FormatError,
    dump_coalgebra,
    load_coalgebra,
    partition_to_json,
    tree_from_json,
    tree_to_json,
)
from .gen import FAMILIES, GenSpec, generate
from .oracle import BRUTEFORCE_STATE_LIMIT, bisim_bruteforce, partitions_equal
from .wtree import audit_tree

WEIGHTS = ("card", "pred", "reach")


@click.group()
def main():
    """Minimize finite state systems modulo bisimilarity."""


def _load(path: str, fmt: str) -> Coalgebra:
    try:
        return load_coalgebra(path, fmt)
    except FormatError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    except OSError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


def _stats_obj(result: RefineResult) -> dict:
    s = result.stats
    return {
        "iterations": s.iterations,
        "splits": s.splits,
        "dirty_markings": s.dirty_markings,
        "markdirty_touches": s.markdirty_touches,
        "signatures_computed": s.signatures_computed,
        "wall_ms": round(s.wall_time * 1000.0, 3),
    }


@main.command()
@click.argument("input_path", metavar="INPUT")
@click.option("--format", "fmt", default="auto", show_default=True,
              type=click.Choice(("auto",) + FORMATS))
@click.option("--algo", default="hopcroft", show_default=True,
              type=click.Choice(("naive", "hopcroft")))
@click.option("--weight", default=None, type=click.Choice(WEIGHTS),
              help="Block weight for the hopcroft algorithm [default: card].")
@click.option("--out", default="-", show_default=True,
              help="Partition JSON destination ('-' for stdout).")
@click.option("--audit", is_flag=True,
              help="Emit the refinement tree and verify its weight bounds.")
@click.option("--tree-out", default=None,
              help="Refinement tree destination [default: OUT.tree.json].")
@click.option("--stats", "want_stats", is_flag=True, help="Emit run counters.")
@click.option("--stats-out", default=None,
              help="Counters destination [default: stderr].")
def minimize(input_path, fmt, algo, weight, out, audit, tree_out, want_stats, stats_out):
    """Minimize INPUT and write the partition as JSON."""
    if algo == "naive" and weight is not None:
        raise click.UsageError("--weight only applies to --algo hopcroft")
    if algo == "naive" and audit:
        raise click.UsageError("--audit needs the tree built by --algo hopcroft")
    coalg = _load(input_path, fmt)
    if algo == "naive":
        result = refine_naive(coalg)
    else:
        result = refine_hopcroft(coalg, weight or "card")
    _write_text(out, partition_to_json(result.partition))

    if want_stats:
        import json as _json

        text = _json.dumps(_stats_obj(result)) + "\n"
        if stats_out:
            _write_text(stats_out, text)
        else:
            sys.stderr.write(text)

    if audit:
        tree = result.tree
        dest = tree_out or (out + ".tree.json" if out != "-" else "refinement-tree.json")
        _write_text(dest, tree_to_json(tree))
        wt, ws, heavy = tree_from_json(tree_to_json(tree))
        report = audit_tree(wt, ws, heavy)
        if not report.all_ok():
            click.echo("error: refinement tree failed its audit", err=True)
            sys.exit(1)
        click.echo(
            f"audit ok: light sum {report.light_sum} <= bound {report.bound_float:.4f}",
            err=True,
        )


@main.command()
@click.argument("input_path", metavar="INPUT")
@click.option("--format", "fmt", default="auto", show_default=True,
              type=click.Choice(("auto",) + FORMATS))
@click.option("--oracle-limit", default=1000, show_default=True,
              help="Skip the brute-force cross-check above this state count.")
def compare(input_path, fmt, oracle_limit):
    """Run every algorithm on INPUT and check all results agree."""
    coalg = _load(input_path, fmt)
    runs = [("naive", refine_naive(coalg).partition)]
    for w in WEIGHTS:
        runs.append((f"hopcroft/{w}", refine_hopcroft(coalg, w).partition))
    if coalg.n_states <= min(oracle_limit, BRUTEFORCE_STATE_LIMIT):
        runs.append(("bruteforce", bisim_bruteforce(coalg)))
    base_name, base = runs[0]
    ok = True
    click.echo(f"{base_name}: {base.n_blocks} blocks")
    for name, part in runs[1:]:
        same = partitions_equal(base, part)
        ok = ok and same
        click.echo(f"{name}: {part.n_blocks} blocks, {'match' if same else 'MISMATCH'}")
    sys.exit(0 if ok else 1)


@main.command("audit-tree")
@click.argument("tree_path", metavar="TREEFILE")
def audit_tree_cmd(tree_path):
    """Check the weight bounds of a refinement tree file."""
    try:
        with open(tree_path, "r", encoding="utf-8") as f:
            tree, weights, heavy = tree_from_json(f.read())
    except (FormatError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    report = audit_tree(tree, weights, heavy)
    if not report.valid:
        click.echo("weight law: VIOLATED")
        sys.exit(1)
    click.echo(f"weight law: ok ({'tight' if report.tight else 'not tight'})")
    click.echo(f"edge-exclusion sums: {'ok' if report.lemma1_ok else 'FAILED'}")
    rel = "=" if report.light_sum == report.lpath_sum else ">"
    click.echo(
        f"light-children sum {report.light_sum} {rel} "
        f"weighted light-path sum {report.lpath_sum}: "
        f"{'ok' if report.lemma2_ok else 'FAILED'}"
    )
    click.echo(f"tightening properties: {'ok' if report.lemma3_ok else 'FAILED'}")
    click.echo(f"light-path length bound: {'ok' if report.lemma4_ok else 'FAILED'}")
    click.echo(
        f"weight bound: {report.light_sum} <= {report.bound_float:.4f} "
        f"(exact check {'ok' if report.bound_exact_ok else 'FAILED'})"
    )
    sys.exit(0 if report.all_ok() else 1)


@main.command("gen")
@click.option("--family", required=True, type=click.Choice(FAMILIES))
@click.option("--states", "n_states", required=True, type=int)
@click.option("--alphabet", default=2, show_default=True, type=int)
@click.option("--branching", default=2, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", default="-", show_default=True)
def gen_cmd(family, n_states, alphabet, branching, seed, out):
    """Emit a seeded random instance as coalgebra JSON."""
    try:
        spec = GenSpec(family, n_states, alphabet, branching, seed)
        coalg = generate(spec)
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    _write_text(out, dump_coalgebra(coalg))


BENCH_COLUMNS = (
    "family,n,seed,algo,weight,iterations,splits,dirty_markings,"
    "markdirty_touches,signatures_computed,wall_ms"
)


@main.command()
@click.option("--families", default="dfa,nfa,lts,mc,mdp", show_default=True)
@click.option("--sizes", default="10,20,50", show_default=True)
@click.option("--instances", default=5, show_default=True,
              help="Seeded instances per (family, size) cell.")
@click.option("--seed-base", default=0, show_default=True, type=int)
@click.option("--algos", default="naive,hopcroft", show_default=True)
@click.option("--weights", default="card,pred,reach", show_default=True)
@click.option("--out", required=True, help="CSV destination.")
def bench(families, sizes, instances, seed_base, algos, weights, out):
    """Run seeded sweeps and write one CSV row of counters per run."""
    try:
        fams = [f.strip() for f in families.split(",") if f.strip()]
        ns = [int(s) for s in sizes.split(",") if s.strip()]
        algo_list = [a.strip() for a in algos.split(",") if a.strip()]
        weight_list = [w.strip() for w in weights.split(",") if w.strip()]
        for f in fams:
            if f not in FAMILIES:
                raise ValueError(f"unknown family {f!r}")
        for a in algo_list:
            if a not in ("naive", "hopcroft"):
                raise ValueError(f"unknown algorithm {a!r}")
        for w in weight_list:
            if w not in WEIGHTS:
                raise ValueError(f"unknown weight {w!r}")
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)

    with open(out, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(BENCH_COLUMNS.split(","))
        for family in fams:
            for n in ns:
                for i in range(instances):
                    seed = seed_base + i
                    coalg = generate(GenSpec(family, n, seed=seed))
                    for algo in algo_list:
                        if algo == "naive":
                            cells = [("naive", "-", refine_naive(coalg))]
                        else:
                            cells = [
                                ("hopcroft", w, refine_hopcroft(coalg, w))
                                for w in weight_list
                            ]
                        for name, w, result in cells:
                            so = _stats_obj(result)
                            writer.writerow(
                                [family, n, seed, name, w]
                                + [so[k] for k in (
                                    "iterations", "splits", "dirty_markings",
                                    "markdirty_touches", "signatures_computed",
                                    "wall_ms",
                                )]
                            )
    click.echo(f"wrote {out}", err=True)


if __name__ == "__main__":
    main()
