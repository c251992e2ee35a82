"""CLI interface for yamabe-nodal.

Settings come from a config file (--config or $YAMABE_CRIT_CONFIG) and
YAMABE_CRIT_* environment variables; flags override both.

Quick start:
    yamabe-nodal criterion --n 3..8 --m 2..12     # μ_p, μ̂_p and a_{n,m}
    yamabe-nodal mn-table --n-max 30              # thresholds m_n
    yamabe-nodal energy --n 3 --m 9               # β-sweep of J_n(t_β w_β)
    yamabe-nodal lemma31 --n 4                    # ball concentration study
    yamabe-nodal figure1 --out results/figure1    # f_{n₀} curves as SVG + CSV
    yamabe-nodal check-claims                     # every claim, pass/fail

Exit codes: 0 ok, 1 claim failure, 2 usage, 3 numerical failure, 4 I/O.
"""

import logging
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from yamabe_nodal import __version__
from yamabe_nodal.claims import run_claims
from yamabe_nodal.config import (
    OutputFormat,
    QuadratureSettings,
    RunConfig,
    Settings,
    find_config_path,
    load_config,
)
from yamabe_nodal.criterion import (
    evaluate_criterion,
    f_n0,
    f_n0_positivity,
    minimal_m_table,
    reference_minimal_m,
)
from yamabe_nodal.energy import (
    default_beta_grid,
    default_delta,
    energy_sweep,
    lemma31_convergence,
)
from yamabe_nodal.errors import ConfigError, YamabeError
from yamabe_nodal.quadrature import QuadratureKind
from yamabe_nodal.reporting import (
    render_svg_plot,
    sample_curves,
    write_svg,
    write_table,
)
from yamabe_nodal.sphere_geometry import SphereConstants
from yamabe_nodal.symmetry_group import ansatz_orbit

EXIT_CLAIM_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

app = typer.Typer(
    name="yamabe-nodal",
    help="Equivariant energy bounds for nodal solutions of the Yamabe equation on Sⁿ",
    no_args_is_help=True,
)

console = Console()
logger = logging.getLogger("yamabe_nodal")


def _setup_logging(verbose: bool, level: str) -> None:
    package_logger = logging.getLogger("yamabe_nodal")
    package_logger.handlers.clear()
    package_logger.addHandler(RichHandler(console=Console(stderr=True), show_time=False,
                                          show_path=False))
    package_logger.setLevel(logging.DEBUG if verbose else level.upper())
    package_logger.propagate = False


def parse_int_list(text: str, name: str) -> list[int]:
    """'3..8' → [3, ..., 8]; '3,5,7' → [3, 5, 7]; '4' → [4]."""
    values: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = (int(p) for p in part.split("..", 1))
                if hi < lo:
                    raise ValueError(f"empty range {part}")
                values.extend(range(lo, hi + 1))
            elif part:
                values.append(int(part))
    except ValueError as exc:
        raise typer.BadParameter(f"invalid {name} '{text}': {exc}") from exc
    if not values:
        raise typer.BadParameter(f"{name} must not be empty")
    return values


def parse_float_list(text: str, name: str) -> list[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise typer.BadParameter(f"invalid {name} '{text}': {exc}") from exc
    if not values:
        raise typer.BadParameter(f"{name} must not be empty")
    return values


def _settings(ctx: typer.Context) -> Settings:
    settings: Settings = ctx.obj["settings"]
    return settings


def _quadrature(
    settings: Settings,
    resolution: int | None,
    mc_samples: int | None,
    seed: int | None,
) -> QuadratureSettings:
    quad = settings.quadrature.model_copy()
    if resolution is not None:
        quad.resolution = resolution
    if mc_samples is not None:
        quad.mc_samples = mc_samples
        quad.rule = QuadratureKind.MONTE_CARLO
    if seed is not None:
        quad.seed = seed
    return quad


def _run_config(ctx: typer.Context, command: str, quad: QuadratureSettings,
                fmt: OutputFormat, **fields: list[int] | list[float]) -> RunConfig:
    config_file = ctx.obj.get("config_path")
    return RunConfig(command=command, quadrature=quad, format=fmt,
                     config_file=str(config_file) if config_file else None, **fields)


def _table_format(settings: Settings, fmt: OutputFormat | None) -> OutputFormat:
    chosen = fmt or settings.output.format
    if chosen == OutputFormat.SVG:
        console.print("[red]Tables are written as csv or json[/red]")
        raise typer.Exit(EXIT_USAGE)
    return chosen


def _output_path(settings: Settings, out: Path | None, stem: str) -> Path:
    return out if out is not None else settings.output.output_dir / stem


def _write(path: Path, rows: list[dict[str, object]], run: RunConfig, fmt: OutputFormat,
           summary: dict[str, object] | None = None) -> None:
    try:
        target = write_table(path, rows, run, fmt, summary)
    except OSError as exc:
        console.print(f"[red]Cannot write {path}: {exc}[/red]")
        raise typer.Exit(EXIT_IO) from exc
    console.print(f"[dim]Wrote {target}[/dim]")


def _numerical_failure(exc: YamabeError) -> typer.Exit:
    console.print(f"[red]Numerical failure: {exc}[/red]")
    return typer.Exit(EXIT_NUMERICAL)


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Config file (YAML or key=value lines)"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
) -> None:
    """Verify the symmetry criterion and the energy bound c^φ < 2m·c_n."""
    config_path = find_config_path(config)
    try:
        settings = load_config(config_path)
    except ConfigError as exc:
        console.print(f"[red]Configuration error: {exc}[/red]")
        raise typer.Exit(EXIT_USAGE) from exc
    _setup_logging(verbose, settings.log_level)
    ctx.obj = {"settings": settings, "config_path": config_path}


@app.command()
def version() -> None:
    """Show version information."""
    console.print(f"yamabe-nodal version {__version__}")


@app.command()
def criterion(
    ctx: typer.Context,
    n: Optional[str] = typer.Option(None, "--n",
                                    help="Dimensions, e.g. 3..8 or 3,5 (default from config)"),
    m: str = typer.Option("2..12", "--m", help="Orbit parameters, e.g. 2..12"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output path without suffix"),
    fmt: Optional[OutputFormat] = typer.Option(None, "--format", "-f",
                                               help="csv or json (default from config)"),
) -> None:
    """Tabulate μ_p, μ̂_p and a_{n,m} at p = (1, 0, 0).

    Example:
        yamabe-nodal criterion --n 5 --m 5..6
    """
    settings = _settings(ctx)
    table_fmt = _table_format(settings, fmt)
    n_values = parse_int_list(n, "--n") if n is not None else list(settings.sweep.n_values)
    m_values = parse_int_list(m, "--m")
    if min(n_values) < 3 or min(m_values) < 1:
        console.print("[red]Need n ≥ 3 and m ≥ 1[/red]")
        raise typer.Exit(EXIT_USAGE)

    try:
        results = [evaluate_criterion(nn, mm) for nn in n_values for mm in m_values]
    except YamabeError as exc:
        raise _numerical_failure(exc) from exc

    table = Table(title="Symmetry criterion")
    table.add_column("n", justify="right", style="cyan")
    table.add_column("m", justify="right", style="cyan")
    table.add_column("μ_p", justify="right")
    table.add_column("μ̂_p", justify="right")
    table.add_column("a_{n,m}", justify="right")
    table.add_column("positive")
    for r in results:
        color = "green" if r.positive else "red"
        table.add_row(str(r.n), str(r.m), f"{r.mu:.6f}", f"{r.mu_hat:.6f}", f"{r.a_nm:.6f}",
                      f"[{color}]{str(r.positive).lower()}[/{color}]")
    console.print(table)

    run = _run_config(ctx, "criterion", settings.quadrature, table_fmt, n=n_values, m=m_values)
    _write(_output_path(settings, out, "criterion"), [r.model_dump() for r in results], run,
           table_fmt)


@app.command("mn-table")
def mn_table(
    ctx: typer.Context,
    n_max: int = typer.Option(30, "--n-max", help="Largest dimension"),
    m_max: Optional[int] = typer.Option(None, "--m-max", help="Largest m scanned"),
    out: Optional[Path] = typer.Option(None, "--out", "-o"),
    fmt: Optional[OutputFormat] = typer.Option(None, "--format", "-f",
                                               help="csv or json (default from config)"),
) -> None:
    """Compute the thresholds m_n for n = 3..n_max."""
    settings = _settings(ctx)
    table_fmt = _table_format(settings, fmt)
    if n_max < 3:
        console.print("[red]--n-max must be at least 3[/red]")
        raise typer.Exit(EXIT_USAGE)
    m_limit = m_max or settings.sweep.m_max
    rows = minimal_m_table(range(3, n_max + 1), m_max=m_limit)

    table = Table(title="Minimal m with μ_p − μ̂_p > 0")
    table.add_column("n", justify="right", style="cyan")
    table.add_column("m_n", justify="right")
    table.add_column("a at m_n", justify="right")
    table.add_column("a at m_n − 1", justify="right")
    table.add_column("matches")
    for r in rows:
        table.add_row(str(r.n), str(r.minimal_m), f"{r.a_at_minimal or 0.0:.6f}",
                      f"{r.a_below_minimal or 0.0:.6f}",
                      "[green]yes[/green]" if r.matches else "[red]no[/red]")
    console.print(table)
    console.print("m_n: " + ", ".join(str(r.minimal_m) for r in rows))

    run = _run_config(ctx, "mn-table", settings.quadrature, table_fmt,
                      n=list(range(3, n_max + 1)), m=[m_limit])
    _write(_output_path(settings, out, "mn_table"), [r.model_dump() for r in rows], run,
           table_fmt)


@app.command()
def energy(
    ctx: typer.Context,
    n: int = typer.Option(3, "--n", help="Dimension"),
    m: int = typer.Option(9, "--m", help="Orbit parameter"),
    beta_grid: Optional[str] = typer.Option(None, "--beta-grid", help="Comma-separated β values"),
    resolution: Optional[int] = typer.Option(None, "--resolution", help="Nodes per radial panel"),
    mc_samples: Optional[int] = typer.Option(None, "--mc-samples", help="Use Monte Carlo"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    cross_check: bool = typer.Option(False, "--cross-check", help="Also compute direct H¹ norms"),
    out: Optional[Path] = typer.Option(None, "--out", "-o"),
    fmt: Optional[OutputFormat] = typer.Option(None, "--format", "-f",
                                               help="csv or json (default from config)"),
) -> None:
    """Sweep β and report J_n(t_β w_β) against 2m·c_n.

    Example:
        yamabe-nodal energy --n 4 --m 7 --beta-grid 1.02,1.01,1.005
    """
    settings = _settings(ctx)
    table_fmt = _table_format(settings, fmt)
    if n < 3 or m < 1:
        console.print("[red]Need n ≥ 3 and m ≥ 1[/red]")
        raise typer.Exit(EXIT_USAGE)
    sweep_cfg = settings.sweep
    betas = (parse_float_list(beta_grid, "--beta-grid") if beta_grid
             else default_beta_grid(sweep_cfg.beta_count, sweep_cfg.beta_min_gap,
                                    sweep_cfg.beta_max_gap))
    if min(betas) <= 1.0:
        console.print("[red]Every β must exceed 1[/red]")
        raise typer.Exit(EXIT_USAGE)
    quad = _quadrature(settings, resolution, mc_samples, seed)

    try:
        result = energy_sweep(n, m, quad.to_rule(), betas, cross_check=cross_check)
    except YamabeError as exc:
        raise _numerical_failure(exc) from exc

    const = SphereConstants.for_dimension(n)
    table = Table(title=f"Energy sweep n={n}, m={m}")
    table.add_column("β", justify="right", style="cyan")
    table.add_column("Y_n(w_β)", justify="right")
    table.add_column("J_n(t_β w_β)", justify="right")
    table.add_column("∫|t_β w_β|^{2*}", justify="right")
    table.add_column("certified")
    rows = []
    for r in result.reports:
        # on the Nehari manifold J = (a_n/n)∫|u|^{2*}
        nehari_mass = n * r.energy / const.a_n
        row = r.model_dump()
        row["nehari_mass"] = nehari_mass
        row["mass_bound"] = 2 * m * const.omega_n
        rows.append(row)
        color = "green" if r.certified else "red"
        table.add_row(f"{r.beta:.6g}", f"{r.quotient:.8f}", f"{r.energy:.8f}",
                      f"{nehari_mass:.8f}", f"[{color}]{str(r.certified).lower()}[/{color}]")
    console.print(table)

    margin = 2 * m * const.c_n - result.best_energy
    summary: dict[str, object] = {
        "certified": result.certified,
        "best_beta": result.best_beta,
        "best_energy": result.best_energy,
        "bound": 2 * m * const.c_n,
        "margin": margin,
        "best_nehari_mass": n * result.best_energy / const.a_n,
        "mass_bound": 2 * m * const.omega_n,
        "leading_slope": result.leading_slope,
        "expected_slope": result.expected_slope,
    }
    console.print(
        f"certified: {str(result.certified).lower()}  best β = {result.best_beta:.6g}  "
        f"margin = {margin:.6g}  ∫|tw|^(2*) = {summary['best_nehari_mass']:.8g} "
        f"vs 2mω_n = {summary['mass_bound']:.8g}")

    run = _run_config(ctx, "energy", quad, table_fmt, n=[n], m=[m], beta_grid=list(betas))
    _write(_output_path(settings, out, f"energy_n{n}_m{m}"), rows, run, table_fmt, summary)


@app.command()
def lemma31(
    ctx: typer.Context,
    n: int = typer.Option(3, "--n", help="Dimension"),
    beta_grid: str = typer.Option("1.01,1.001,1.0001", "--beta-grid"),
    delta: Optional[float] = typer.Option(None, "--delta", help="Ball radius"),
    resolution: Optional[int] = typer.Option(None, "--resolution"),
    out: Optional[Path] = typer.Option(None, "--out", "-o"),
    fmt: Optional[OutputFormat] = typer.Option(None, "--format", "-f",
                                               help="csv or json (default from config)"),
) -> None:
    """Concentration of u_β^{2*−1} in a ball: ratio to the leading term as β ↓ 1."""
    settings = _settings(ctx)
    table_fmt = _table_format(settings, fmt)
    if n < 3:
        console.print("[red]Need n ≥ 3[/red]")
        raise typer.Exit(EXIT_USAGE)
    betas = sorted(parse_float_list(beta_grid, "--beta-grid"), reverse=True)
    quad = _quadrature(settings, resolution, None, None)
    quad.rule = QuadratureKind.ZONAL
    try:
        radius = delta or default_delta(ansatz_orbit(n, reference_minimal_m(n)))
        report = lemma31_convergence(n, betas, radius, quad.to_rule())
    except YamabeError as exc:
        raise _numerical_failure(exc) from exc

    table = Table(title=f"Ball integrals n={n}, δ={radius:.4f}")
    table.add_column("β", justify="right", style="cyan")
    table.add_column("ratio", justify="right")
    table.add_column("complement/(β−1)^{(n+2)/4}", justify="right")
    for row in report.rows:
        table.add_row(f"{row.beta:.6g}", f"{row.ratio:.6f}", f"{row.complement_scaled:.6g}")
    console.print(table)

    run = _run_config(ctx, "lemma31", quad, table_fmt, n=[n], beta_grid=betas)
    _write(_output_path(settings, out, f"lemma31_n{n}"),
           [r.model_dump() for r in report.rows], run, table_fmt)


@app.command()
def figure1(
    ctx: typer.Context,
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output path without suffix"),
    samples: int = typer.Option(500, "--samples"),
) -> None:
    """Plot f_{n₀}(x) = (2x)^{1/n₀} − √2 sin(πx) for n₀ = 3, 4, 5 on [0, 0.25]."""
    settings = _settings(ctx)
    if samples < 2:
        console.print("[red]--samples must be at least 2[/red]")
        raise typer.Exit(EXIT_USAGE)
    series = sample_curves(
        [(f"f{n0}", lambda x, n0=n0: f_n0(n0, x)) for n0 in (3, 4, 5)], 0.25, samples)
    run = _run_config(ctx, "figure1", settings.quadrature, OutputFormat.SVG)
    svg = render_svg_plot(
        series, run, "f_n0 for n0 = 3, 4, 5",
        x_ticks=[0.05 * k for k in range(6)],
        guides=[(1 / 7, "1/7"), (1 / 6, "1/6"), (1 / 5, "1/5")],
    )
    xs = series[0][1]
    rows: list[dict[str, object]] = [
        {"x": x, "f3": series[0][2][i], "f4": series[1][2][i], "f5": series[2][2][i]}
        for i, x in enumerate(xs)
    ]
    path = _output_path(settings, out, "figure1")
    try:
        target = write_svg(path, svg)
    except OSError as exc:
        console.print(f"[red]Cannot write {path}: {exc}[/red]")
        raise typer.Exit(EXIT_IO) from exc
    console.print(f"[dim]Wrote {target}[/dim]")
    _write(path, rows, run, OutputFormat.CSV)
    for n0, m in ((5, 5), (4, 6), (3, 7)):
        report = f_n0_positivity(n0, 1.0 / m)
        console.print(f"f{n0} > 0 on (0, 1/{m}]: {str(report.positive).lower()} "
                      f"(min {report.min_value:.6g})")


@app.command("check-claims")
def check_claims(
    ctx: typer.Context,
    resolution: Optional[int] = typer.Option(None, "--resolution"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the report as JSON"),
) -> None:
    """Recompute every claim and compare with the expected values."""
    settings = _settings(ctx)
    quad = _quadrature(settings, resolution, None, seed)
    if quad.rule == QuadratureKind.MONTE_CARLO:
        quad.rule = QuadratureKind.PRODUCT_GRID
    results = run_claims(quad.to_rule())

    table = Table(title="Claims")
    table.add_column("Claim", style="cyan")
    table.add_column("Expected")
    table.add_column("Computed")
    table.add_column("Tol.", justify="right")
    table.add_column("Result")
    for r in results:
        verdict = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(r.name, r.expected, r.computed, f"{r.tolerance:g}", verdict)
    console.print(table)

    if out is not None:
        run = _run_config(ctx, "check-claims", quad, OutputFormat.JSON)
        _write(out, [r.model_dump() for r in results], run, OutputFormat.JSON,
               {"passed": all(r.passed for r in results)})

    failed = [r.name for r in results if not r.passed]
    if failed:
        console.print(f"[red]Failed claims: {', '.join(failed)}[/red]")
        raise typer.Exit(EXIT_CLAIM_FAILURE)
    console.print("[green]All claims pass[/green]")

