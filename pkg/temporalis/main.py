from __future__ import annotations

import json
import sys
from typing import Any, Dict, Optional

import click

from . import __version__
from .config import load_settings
from .errors import exit_code_for
from .logging_utils import setup_logging
from .service import ReasonerService
from .stablecheck import MODES


def _render_text(result: Dict[str, Any]) -> str:
    data = result["data"]
    command = result["command"]
    if command == "check":
        lines = [f"stable model: {'yes' if data['exists'] else 'no'} (mode {data['mode']})"]
        lines.extend(data["model"])
    elif command == "entail":
        lines = [f"{data['query_mode']} {data['query']}: {'entailed' if data['entailed'] else 'not entailed'}"]
    elif command == "normalize":
        lines = [data["program"].rstrip("\n")]
    elif command == "ground":
        lines = list(data["rules"])
    elif command == "eval":
        lines = [f"{data['fact']}: {'true' if data['holds'] else 'false'}"]
    else:
        lines = [f"{data['count']} stable model(s) over [{data['box'][0]},{data['box'][1]}]"]
        for index, model in enumerate(data["models"]):
            lines.append(f"model {index}:")
            lines.extend(f"  {fact}" for fact in model)
    return "\n".join(lines)


def emit(result: Dict[str, Any], json_output: bool) -> None:
    """Print a command result and exit with its code; failures go to stderr as JSON."""
    if not result["ok"]:
        click.echo(json.dumps({"error": result["error"], "metadata": result["metadata"]}), err=True)
        sys.exit(exit_code_for(result["error"]["code"]))
    for warning in result["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    if json_output:
        click.echo(json.dumps(result["data"], indent=2, sort_keys=True))
    else:
        click.echo(_render_text(result))


def run_command(service: ReasonerService, command: str, json_output: bool, **kwargs: Any) -> None:
    emit(getattr(service, command)(**kwargs), json_output)


program_option = click.option("--program", "program_path", required=True, type=click.Path(), help="Program file (.dmtl).")
data_option = click.option("--data", "dataset_path", type=click.Path(), default=None, help="Dataset file (.dfacts).")
mode_option = click.option("--mode", type=click.Choice(MODES), default="auto", show_default=True)
json_option = click.option("--json", "json_output", is_flag=True, help="Print the result payload as JSON.")
max_states_option = click.option("--max-states", type=int, default=None, help="Explored automaton states before giving up.")
max_candidates_option = click.option("--max-candidates", type=int, default=None, help="Enumerated windows or oracle candidates before giving up.")


@click.group()
@click.version_option(__version__, prog_name="temporalis")
@click.pass_context
def cli(ctx: click.Context) -> None:
    """Stable model reasoning for DatalogMTL with negation over the integers."""
    settings = load_settings()
    logger = setup_logging(settings.log_level)
    ctx.obj = ReasonerService(settings=settings, logger=logger)


@cli.command()
@program_option
@data_option
@mode_option
@click.option("--horizon", default=None, help="Reconstruct the model over lo:hi.")
@max_states_option
@max_candidates_option
@click.option("--witness", is_flag=True, help="Include the lasso witness in the JSON payload.")
@json_option
@click.pass_obj
def check(service: ReasonerService, json_output: bool, **kwargs: Any) -> None:
    """Decide whether a stable model exists."""
    run_command(service, "check", json_output, **kwargs)


@cli.command()
@program_option
@data_option
@mode_option
@click.option("--fact", required=True, help='Ground fact such as "R(a)@[1,2]".')
@click.option("--cautious/--brave", default=True, show_default=True)
@max_states_option
@max_candidates_option
@json_option
@click.pass_obj
def entail(service: ReasonerService, json_output: bool, **kwargs: Any) -> None:
    """Decide brave or cautious entailment of a fact."""
    run_command(service, "entail", json_output, **kwargs)


@cli.command()
@program_option
@click.option("--report", "report_path", type=click.Path(), default=None, help="Write the normalization report here.")
@json_option
@click.pass_obj
def normalize(service: ReasonerService, json_output: bool, **kwargs: Any) -> None:
    """Rewrite a program into normal form."""
    run_command(service, "normalize", json_output, **kwargs)


@cli.command()
@program_option
@data_option
@json_option
@click.pass_obj
def ground(service: ReasonerService, json_output: bool, **kwargs: Any) -> None:
    """List the ground instances of a program."""
    run_command(service, "ground", json_output, **kwargs)


@cli.command(name="eval")
@click.option("--data", "interpretation_path", required=True, type=click.Path(), help="Interpretation file (.dfacts).")
@click.option("--fact", required=True, help='Fact such as "R@[1,2]".')
@json_option
@click.pass_obj
def eval_command(service: ReasonerService, json_output: bool, **kwargs: Any) -> None:
    """Check a fact against an interpretation."""
    run_command(service, "eval", json_output, **kwargs)


@cli.command()
@program_option
@data_option
@click.option("--horizon", default=None, help="Search box lo:hi.")
@max_candidates_option
@json_option
@click.pass_obj
def oracle(service: ReasonerService, json_output: bool, **kwargs: Any) -> None:
    """Enumerate tail-constant stable models by exhaustive search."""
    run_command(service, "oracle", json_output, **kwargs)


def main(argv: Optional[list] = None) -> None:
    cli.main(args=argv, prog_name="temporalis")


if __name__ == "__main__":
    main()
