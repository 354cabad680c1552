"""Command line driver.

Exit codes: 0 success, 1 input error, 2 non-convergence (overlaps
remain), 3 internal numerical failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .engine import EngineConfig, eprism, prism, vprism
from .errors import GraphInputError, NumericalError
from .fileio import read_graph, write_layout, write_trace_csv
from .layout_init import InitialLayoutConfig, initial_layout
from .model import expand_graph, seed_label_positions
from .render import render_svg

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NONCONVERGED = 2
EXIT_NUMERICAL = 3


def _process_one(path, fmt, cfg, seed, init_layout_flag, svg_path, out_path, trace_path):
    graph, positions = read_graph(path, fmt)
    if positions is None or init_layout_flag:
        positions = initial_layout(graph, InitialLayoutConfig(random_seed=seed))

    if cfg.mode == "prism":
        layout, trace = prism(graph, positions, cfg)
        expanded = expand_graph(graph)
        layout_expanded = seed_label_positions(expanded, layout)
        layout_out = layout
    elif cfg.mode == "vprism":
        expanded = expand_graph(graph)
        layout_expanded, trace = vprism(graph, positions, cfg)
        layout_out = layout_expanded[: expanded.n_original]
    else:
        expanded = expand_graph(graph)
        layout_expanded, trace = eprism(graph, positions, cfg)
        layout_out = layout_expanded[: expanded.n_original]

    if out_path:
        write_layout(graph, layout_out, out_path, expanded=expanded, x_expanded=layout_expanded)
    if svg_path:
        render_svg(expanded, layout_expanded, path=svg_path)
    if trace_path:
        write_trace_csv(trace, trace_path)

    status = "converged" if trace.converged else "overlaps remain"
    click.echo(
        f"{path}: mode={cfg.mode} nodes={graph.n_nodes} "
        f"labels={len(expanded.label_origin)} iterations={len(trace.records)} {status}"
    )
    return EXIT_OK if trace.converged else EXIT_NONCONVERGED


@click.command(name="labelprism")
@click.argument("input_path", required=False, type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["auto", "json", "dot"]), default="auto",
              show_default=True, help="Input format; 'auto' uses the file extension.")
@click.option("--mode", type=click.Choice(["prism", "vprism", "eprism"]), default="eprism",
              show_default=True, help="Overlap-removal driver.")
@click.option("--rho", type=float, default=4.0, show_default=True,
              help="Midpoint penalty parameter (eprism).")
@click.option("--smax", type=float, default=1.5, show_default=True,
              help="Per-pass damping cap on overlap factors.")
@click.option("--epsilon", type=float, default=0.005, show_default=True,
              help="Relative-movement convergence threshold.")
@click.option("--max-iters", type=int, default=1000, show_default=True,
              help="Iteration cap per loop.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the initial layout.")
@click.option("--init-layout", is_flag=True,
              help="Compute a fresh initial layout even if the file has positions.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Write an SVG rendering.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write the result JSON.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False),
              help="Write the per-iteration trace CSV.")
@click.option("--batch", "batch_dir", type=click.Path(file_okay=False),
              help="Process every .json/.dot/.gv file in a directory; writes "
                   "<stem>.layout.json and <stem>.layout.svg next to each input.")
def cli(input_path, fmt, mode, rho, smax, epsilon, max_iters, seed,
        init_layout, svg_path, out_path, trace_path, batch_dir) -> int:
    """Remove node and edge label overlaps from a graph layout."""
    try:
        cfg = EngineConfig(s_max=smax, rho=rho, epsilon=epsilon,
                           max_outer_iters=max_iters, mode=mode)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None

    if batch_dir:
        if input_path or svg_path or out_path or trace_path:
            raise click.UsageError("--batch cannot be combined with an input file or "
                                   "--svg/--out/--trace")
        folder = Path(batch_dir)
        files = sorted(
            p for p in folder.iterdir()
            if p.suffix.lower() in (".json", ".dot", ".gv")
            and not p.name.endswith(".layout.json")
        )
        if not files:
            raise click.UsageError(f"no graph files found in {folder}")
        worst = EXIT_OK
        for p in files:
            code = _process_one(
                p, "auto", cfg, seed, init_layout,
                p.with_suffix(".layout.svg"), p.with_suffix(".layout.json"), None,
            )
            worst = max(worst, code)
        return worst

    if not input_path:
        raise click.UsageError("missing input file (or use --batch DIR)")
    return _process_one(input_path, fmt, cfg, seed, init_layout,
                        svg_path, out_path, trace_path)


def run(argv=None) -> int:
    """Invoke the CLI, mapping exceptions to documented exit codes."""
    try:
        code = cli.main(args=argv, standalone_mode=False, prog_name="labelprism")
        return int(code) if isinstance(code, int) else EXIT_OK
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_INPUT
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT
    except GraphInputError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run())
