"""``alloc``: command-line client for the allocation service.

Every subcommand parses its input files locally, sends one JSON request
to the service, and renders the JSON response. By default the service
runs in-process (no network involved); pass ``--server URL`` to talk to
a deployed instance instead.

Exit codes: 0 on success, 1 when ``--strict`` is set and a reproduction
or invariance check misses its tolerance, 2 on any input error.
"""

from __future__ import annotations

import csv
import io as stdio
import json
import sys
from typing import Iterable, Sequence

import click

from . import io as csvio
from .errors import InputError, LeagueAllocError
from .rules import RuleKind, RuleSpec

RULE_CHOICES = [kind.value for kind in RuleKind]


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=60.0)
    import warnings

    with warnings.catch_warnings():
        # some starlette builds warn about their own httpx pin on import
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    with _client(ctx.obj["server"]) as client:
        response = client.post(path, json=payload)
    if response.status_code == 200:
        return response.json()
    try:
        body = response.json()
    except ValueError:
        body = {"detail": response.text}
    if isinstance(body.get("detail"), list):  # request-model validation
        messages = "; ".join(
            str(item.get("msg", item)) for item in body["detail"]
        )
        click.echo(f"error: {messages}", err=True)
    else:
        name = body.get("error", f"HTTP {response.status_code}")
        click.echo(f"error: {name}: {body.get('detail', '')}", err=True)
    sys.exit(2)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except LeagueAllocError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _matrix_payload(path: str) -> dict:
    matrix = _guard(csvio.read_matrix, path)
    return {
        "labels": list(matrix.labels),
        "entries": [[float(v) for v in row] for row in matrix.entries],
    }


def _partial_matrix_payload(path: str) -> dict:
    partial = _guard(csvio.read_partial_matrix, path)
    entries = [
        [
            None if partial.missing[i, j] else float(partial.entries[i, j])
            for j in range(partial.n)
        ]
        for i in range(partial.n)
    ]
    return {"labels": list(partial.labels), "entries": entries}


def _aggregates_payload(path: str) -> dict:
    agg = _guard(csvio.read_aggregates, path)
    return {"labels": list(agg.labels), "audiences": [float(v) for v in agg.per_club]}


def _data_payload(matrix: str | None, aggregates: str | None) -> dict:
    if (matrix is None) == (aggregates is None):
        click.echo("error: provide exactly one of --matrix or --aggregates", err=True)
        sys.exit(2)
    if matrix is not None:
        return {"matrix": _matrix_payload(matrix)}
    return {"aggregates": _aggregates_payload(aggregates)}


def _rule_payload(kind: str, lam: float | None) -> dict:
    spec = _guard(RuleSpec, kind, lam)
    return {"kind": spec.kind.value, "lambda": spec.lam}


def _rule_token_payload(token: str) -> dict:
    spec = _guard(RuleSpec.parse, token)
    return {"kind": spec.kind.value, "lambda": spec.lam}


def _num(value: float) -> str:
    return format(float(value), ".6g")


def _print_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    rows = [[str(cell) for cell in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def line(cells: Sequence[str]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()
    click.echo(line(list(headers)))
    click.echo(line(["-" * w for w in widths]))
    for row in rows:
        click.echo(line(row))


def _print_csv(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    buffer = stdio.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(headers)
    for row in rows:
        writer.writerow(row)
    click.echo(buffer.getvalue().rstrip("\n"))


def _emit(fmt: str, body: dict, headers: Sequence[str], rows: list[Sequence[object]]) -> None:
    if fmt == "json":
        click.echo(json.dumps(body, indent=2, ensure_ascii=False))
    elif fmt == "csv":
        _print_csv(headers, rows)
    else:
        _print_table(headers, rows)


def _warn(body: dict) -> None:
    for message in body.get("warnings") or []:
        click.echo(f"warning: {message}", err=True)


def _allocation_rows(body: dict) -> list[Sequence[object]]:
    return [
        (club, _num(value))
        for club, value in zip(body["clubs"], body["values"])
    ]


def _emit_allocation(fmt: str, body: dict) -> None:
    _warn(body)
    if fmt == "json":
        click.echo(json.dumps(body, indent=2, ensure_ascii=False))
        return
    rows = _allocation_rows(body) + [("(total)", _num(body["endowment"]))]
    if fmt == "csv":
        _print_csv(["club", "value"], _allocation_rows(body))
        return
    rule = body.get("rule")
    if rule:
        lam = "" if rule.get("lambda") is None else f":{rule['lambda']:g}"
        click.echo(f"rule: {rule['kind']}{lam}  unit: {body['unit']}")
    else:
        click.echo(f"unit: {body['unit']}")
    _print_table(["club", "value"], rows)


def _pick_format(ctx: click.Context, local: str | None) -> str:
    return local or ctx.obj.get("format") or "table"


@click.group()
@click.version_option(package_name="leaguealloc", prog_name="alloc")
@click.option("--server", default=None, metavar="URL", help="Talk to a running service instead of in-process.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "json"]), default=None, help="Default output format for all subcommands.")
@click.option("--strict", is_flag=True, default=False, help="Exit 1 when a checked tolerance is missed.")
@click.option("--seed", type=int, default=None, help="Default seed for randomised suites.")
@click.pass_context
def main(ctx: click.Context, server: str | None, fmt: str | None, strict: bool, seed: int | None) -> None:
    """Divide pooled broadcasting revenue and inspect the division."""
    ctx.obj = {"server": server, "format": fmt, "strict": strict, "seed": seed}


_format_option = click.option(
    "--format", "fmt", type=click.Choice(["table", "csv", "json"]), default=None,
    help="Output format (overrides the global --format).",
)


@main.command()
@click.option("--rule", "rule_kind", required=True, type=click.Choice(RULE_CHOICES))
@click.option("--lambda", "lam", type=float, default=None, help="Parameter for compromise, split and escd rules.")
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--aggregates", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--endowment", type=float, default=None, help="Money to distribute; omit for audience units.")
@_format_option
@click.pass_context
def allocate(ctx, rule_kind, lam, matrix, aggregates, endowment, fmt):
    """Run one allocation rule on a season."""
    payload = _data_payload(matrix, aggregates)
    payload["rule"] = _rule_payload(rule_kind, lam)
    payload["endowment"] = endowment
    body = _post(ctx, "/allocate", payload)
    _emit_allocation(_pick_format(ctx, fmt), body)


@main.command()
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--reference-club", default=None, help="Club label whose fan effect is pinned to 0 (default: first club).")
@click.option("--check-invariance", is_flag=True, default=False,
              help="Refit against every reference club and compare with concede-and-divide.")
@_format_option
@click.pass_context
def decompose(ctx, matrix, reference_club, check_invariance, fmt):
    """Fit the fan model and allocate from the fitted effects."""
    matrix_payload = _matrix_payload(matrix)
    payload = {
        "matrix": matrix_payload,
        "reference_club": reference_club if reference_club is not None else 0,
        "check_invariance": check_invariance,
    }
    body = _post(ctx, "/decompose", payload)
    fmt = _pick_format(ctx, fmt)
    if fmt == "json":
        click.echo(json.dumps(body, indent=2, ensure_ascii=False))
    else:
        rows = [
            (club, _num(fan), _num(value))
            for club, fan, value in zip(
                body["clubs"], body["club_fans"], body["allocation"]["values"]
            )
        ]
        if fmt == "csv":
            _print_csv(["club", "fan_effect", "payout"], rows)
        else:
            click.echo(
                f"reference club: {body['reference_club']}  "
                f"generic effect per game: {_num(body['generic'])}"
            )
            _print_table(["club", "fan_effect", "payout"], rows)
            invariance = body.get("invariance")
            if invariance:
                click.echo(
                    f"invariance: {invariance['references_checked']} references, "
                    f"max gap to concede-divide {invariance['max_gap_to_concede_divide']:.2e} "
                    f"({'ok' if invariance['within'] else 'EXCEEDED'})"
                )
    invariance = body.get("invariance")
    if ctx.obj["strict"] and invariance and not invariance["within"]:
        sys.exit(1)


@main.command()
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--op", required=True, type=click.Choice(["shapley", "egalitarian", "eg-shapley", "core-check"]))
@click.option("--method", type=click.Choice(["subset", "permutation"]), default="subset")
@click.option("--beta", type=float, default=None, help="Weight on Shapley for eg-shapley.")
@click.option("--allocation", "allocation_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="club,value CSV to test with core-check.")
@_format_option
@click.pass_context
def game(ctx, matrix, op, method, beta, allocation_path, fmt):
    """Coalition-based values and core membership."""
    matrix_payload = _matrix_payload(matrix)
    payload = {"matrix": matrix_payload, "op": op, "method": method, "beta": beta}
    if allocation_path is not None:
        allocation = _guard(csvio.read_allocation, allocation_path)
        by_label = dict(zip(allocation.labels, allocation.values))
        labels = matrix_payload["labels"]
        if sorted(by_label) != sorted(labels):
            click.echo("error: allocation clubs do not match the matrix clubs", err=True)
            sys.exit(2)
        payload["allocation_values"] = [by_label[label] for label in labels]
    body = _post(ctx, "/game", payload)
    fmt = _pick_format(ctx, fmt)
    if body.get("core") is not None:
        core = body["core"]
        if fmt == "json":
            click.echo(json.dumps(body, indent=2, ensure_ascii=False))
        elif fmt == "csv":
            _print_csv(
                ["in_core", "reason", "coalition", "shortfall"],
                [(
                    core["in_core"],
                    core.get("reason") or "",
                    ";".join(core.get("coalition") or []),
                    "" if core.get("shortfall") is None else _num(core["shortfall"]),
                )],
            )
        else:
            if core["in_core"]:
                click.echo("in core: yes")
            else:
                click.echo("in core: no")
                if core.get("reason") == "efficiency":
                    click.echo(f"  values do not sum to the grand worth (gap {_num(core['shortfall'])})")
                else:
                    members = ", ".join(core.get("coalition") or [])
                    click.echo(f"  blocking coalition: {{{members}}} is owed {_num(core['shortfall'])} more")
        return
    _emit_allocation(fmt, body["allocation"])


@main.command()
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--aggregates", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--family", type=click.Choice(["compromise"]), default="compromise",
              help="Rule family for the weight vote.")
@click.option("--range", "weight_range", nargs=2, type=float, default=None, metavar="LOW HIGH")
@click.option("--tournament", "tournament_rules", default=None, metavar="RULE[,RULE...]",
              help="Comma-separated rules (kind or kind:lambda) for a head-to-head vote.")
@click.option("--single-crossing", "single_crossing", is_flag=True, default=False,
              help="Check the gain/loss pattern between two weights instead of voting.")
@_format_option
@click.pass_context
def vote(ctx, matrix, aggregates, family, weight_range, tournament_rules, single_crossing, fmt):
    """Let the clubs vote on the rule."""
    payload = _data_payload(matrix, aggregates)
    if tournament_rules is not None:
        payload["mode"] = "tournament"
        payload["rules"] = [
            _rule_token_payload(token) for token in tournament_rules.split(",") if token.strip()
        ]
    else:
        if weight_range is None:
            click.echo("error: --range LOW HIGH is required unless --tournament is used", err=True)
            sys.exit(2)
        payload["mode"] = "single-crossing" if single_crossing else "family"
        payload["low"], payload["high"] = weight_range
    body = _post(ctx, "/vote", payload)
    fmt = _pick_format(ctx, fmt)
    if fmt == "json":
        click.echo(json.dumps(body, indent=2, ensure_ascii=False))
        return
    if body["mode"] == "single-crossing":
        sc = body["single_crossing"]
        rows = list(zip(sc["order"], sc["signs"]))
        if fmt == "csv":
            _print_csv(["club", "sign"], rows)
        else:
            click.echo(
                f"single-crossing: {'yes' if sc['ok'] else 'NO'}"
                + (f", first gainer at position {sc['position']}" if sc["position"] is not None else "")
            )
            _print_table(["club (by season total)", "sign"], rows)
        return
    if body["mode"] == "tournament":
        winners = [
            rule["kind"] + ("" if rule.get("lambda") is None else f":{rule['lambda']:g}")
            for rule in body.get("winner_rules") or []
        ]
        if fmt == "csv":
            _print_csv(["kind", "winners"], [(body["kind"], ";".join(winners))])
        else:
            click.echo(f"outcome: {body['kind']}")
            if winners:
                click.echo("winners: " + ", ".join(winners))
            if body.get("cycle"):
                chain = " beats ".join(
                    rule["kind"] + ("" if rule.get("lambda") is None else f":{rule['lambda']:g}")
                    for rule in body["cycle"]
                )
                click.echo(f"cycle: {chain} beats the first")
        return
    pivotal = body["pivotal"]
    weights = [format(w, "g") for w in body.get("winner_weights") or []]
    if fmt == "csv":
        _print_csv(
            ["kind", "winners", "below_mean", "at_mean", "above_mean"],
            [(body["kind"], ";".join(weights), pivotal["below_mean"], pivotal["at_mean"], pivotal["above_mean"])],
        )
    else:
        click.echo(f"outcome: {body['kind']}")
        if body["kind"] == "all-winners":
            click.echo(f"every weight in [{weights[0]}, {weights[1]}] wins")
        else:
            click.echo(f"winning weight: {weights[0]}")
        click.echo(
            f"clubs below/at/above the mean season total: "
            f"{pivotal['below_mean']}/{pivotal['at_mean']}/{pivotal['above_mean']}"
        )


@main.command()
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--aggregates", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--left", required=True, metavar="RULE", help="Rule token, e.g. uniform or compromise:0.3")
@click.option("--right", required=True, metavar="RULE")
@_format_option
@click.pass_context
def lorenz(ctx, matrix, aggregates, left, right, fmt):
    """Compare two rules by inequality of their payouts."""
    payload = _data_payload(matrix, aggregates)
    payload["left"] = _rule_token_payload(left)
    payload["right"] = _rule_token_payload(right)
    body = _post(ctx, "/lorenz", payload)
    fmt = _pick_format(ctx, fmt)
    if fmt == "json":
        click.echo(json.dumps(body, indent=2, ensure_ascii=False))
    elif fmt == "csv":
        _print_csv(["verdict", "crossing"], [(body["verdict"], body.get("crossing") or "")])
    else:
        click.echo(f"verdict: {body['verdict']}")
        if body.get("crossing") is not None:
            click.echo(f"prefix sums cross at length {body['crossing']}")
        rows = [
            (club, _num(lv), _num(rv))
            for club, lv, rv in zip(body["left"]["clubs"], body["left"]["values"], body["right"]["values"])
        ]
        _print_table(["club", "left", "right"], rows)


@main.command()
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Partial matrix CSV; leave unplayed games empty.")
@click.option("--endowment", type=float, required=True)
@click.option("--operator", type=click.Choice(["zero", "leg"]), required=True)
@click.option("--rule", "rule_kind", required=True, type=click.Choice(RULE_CHOICES))
@click.option("--lambda", "lam", type=float, default=None)
@_format_option
@click.pass_context
def cancelled(ctx, matrix, endowment, operator, rule_kind, lam, fmt):
    """Share money for a season that was cut short."""
    payload = {
        "matrix": _partial_matrix_payload(matrix),
        "endowment": endowment,
        "operator": operator,
        "rule": _rule_payload(rule_kind, lam),
    }
    body = _post(ctx, "/cancelled", payload)
    _emit_allocation(_pick_format(ctx, fmt), body)


@main.command()
@click.option("--rule", "rule_kind", required=True, type=click.Choice(RULE_CHOICES))
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--partner", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Second matrix for the additivity check (defaults to the matrix itself).")
@click.option("--permutation", default=None, metavar="I,J,...",
              help="Relabelling for the anonymity check, e.g. 2,0,1.")
@click.option("--club", default=None, help="Club label for the essential-team check.")
@click.option("--suite", type=click.Choice(["random"]), default=None,
              help="Run the randomised counterexample hunt instead of checking one matrix.")
@click.option("--count", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=None, help="Seed for --suite (falls back to the global --seed).")
@_format_option
@click.pass_context
def axioms(ctx, rule_kind, lam, matrix, partner, permutation, club, suite, count, seed, fmt):
    """Check fairness properties of a rule on data."""
    payload: dict = {"rule": _rule_payload(rule_kind, lam)}
    if suite is not None:
        payload["suite"] = {
            "count": count,
            "seed": seed if seed is not None else (ctx.obj.get("seed") or 0),
        }
    else:
        if matrix is None:
            click.echo("error: provide --matrix, or --suite random", err=True)
            sys.exit(2)
        payload["matrix"] = _matrix_payload(matrix)
        if partner is not None:
            payload["partner"] = _matrix_payload(partner)
        if permutation is not None:
            try:
                payload["permutation"] = [int(p) for p in permutation.split(",")]
            except ValueError:
                click.echo(f"error: bad permutation {permutation!r}", err=True)
                sys.exit(2)
        if club is not None:
            payload["club"] = club
    body = _post(ctx, "/axioms", payload)
    fmt = _pick_format(ctx, fmt)
    if fmt == "json":
        click.echo(json.dumps(body, indent=2, ensure_ascii=False))
        return
    rows = []
    for report in body["reports"]:
        where = "" if report.get("violation_index") is None else f"instance {report['violation_index']}"
        witness = "" if report.get("witness") is None else json.dumps(report["witness"], ensure_ascii=False)
        rows.append((report["axiom"], report["verdict"], where, witness or report.get("detail", "")))
    if fmt == "csv":
        _print_csv(["axiom", "verdict", "where", "evidence"], rows)
    else:
        _print_table(["axiom", "verdict", "where", "evidence"], rows)
        click.echo("all hold" if body["all_hold"] else "violations found")


@main.command()
@click.option("--table", type=click.IntRange(1, 2), required=True)
@click.option("--fixture", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Season-table CSV to check instead of the bundled one.")
@click.option("--strict", "strict_local", is_flag=True, default=False,
              help="Exit 1 if any cell misses its tolerance.")
@_format_option
@click.pass_context
def reproduce(ctx, table, fixture, strict_local, fmt):
    """Recompute a published season table and diff it cell by cell."""
    payload: dict = {"table": table}
    if fixture is not None:
        payload["fixture_csv"] = _guard(
            lambda p: open(p, encoding="utf-8").read(), fixture
        )
    body = _post(ctx, "/reproduce", payload)
    fmt = _pick_format(ctx, fmt)
    if fmt == "json":
        click.echo(json.dumps(body, indent=2, ensure_ascii=False))
    else:
        headers = list(body["rows"][0].keys()) if body["rows"] else []
        rows = [[row.get(h, "") for h in headers] for row in body["rows"]]
        if fmt == "csv":
            _print_csv(headers, rows)
        else:
            _print_table(headers, rows)
            click.echo("")
            _print_table(
                ["column", "tolerance", "max |delta|", "worst club", "within"],
                [
                    (c["column"], c["tolerance"], f"{c['max_abs_delta']:.6f}", c["worst_club"], "yes" if c["within"] else "NO")
                    for c in body["checks"]
                ],
            )
            for note in body["notes"]:
                click.echo(f"note: {note}")
            click.echo(
                "all published cells reproduced within tolerance"
                if body["within_tolerance"]
                else "TOLERANCE MISSED"
            )
    if (strict_local or ctx.obj["strict"]) and not body["within_tolerance"]:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service with uvicorn."""
    import uvicorn

    uvicorn.run("leaguealloc.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
