import argparse
import sys
from pathlib import Path

import numpy as np

from cgreg import CGSolution, fault_normal_velocity, solve_cg_1d, solve_cg_2d
from correct import CompositeSolution, run_new_method
from errors import ConfigError, MeshError, SolverError
from harness import (
    ExperimentConfig,
    build_mesh,
    run_convergence,
    run_efficiency,
    run_profile_1d,
    run_spectrum,
    sample_centerline,
)
from mixed import MixedSolution, cell_conservation, fault_facet_diagnostics, solve_mixed
from results_store import DATA_DIR, save_json, write_vtk

COMMANDS = ("solve-mixed", "solve-new", "converge", "spectrum", "centerline", "profile-1d", "efficiency")


# ── Reports ────────────────────────────────────────────────────────────────

def _mixed_report(sol: MixedSolution) -> dict:
    diagnostics = fault_facet_diagnostics(sol)
    return {
        "method": "mixed",
        "dof": sol.dof,
        "t_f": sol.t_f,
        "mesh": sol.mesh.summary(),
        "solve": sol.report.to_dict(),
        "fault": {
            "l2_defect": diagnostics.l2_defect,
            "l2_jump": diagnostics.l2_jump,
            "total_flux": diagnostics.total_flux,
        },
        "max_conservation_residual": float(np.abs(cell_conservation(sol)).max()),
    }


def _cg_report(sol: CGSolution) -> dict:
    u_n = fault_normal_velocity(sol).u_n
    return {
        "method": "cg",
        "dof": sol.dof,
        "t_f": sol.t_f,
        "eps": sol.eps,
        "mesh": sol.mesh.summary(),
        "solve": sol.report.to_dict(),
        "fault_u_n": {"min": float(u_n.min()), "max": float(u_n.max()), "mean": float(u_n.mean())},
    }


def solution_report(sol) -> dict:
    """JSON-ready summary of a mixed, CG or corrected solution."""
    if isinstance(sol, MixedSolution):
        return _mixed_report(sol)
    if isinstance(sol, CGSolution):
        return _cg_report(sol)
    if isinstance(sol, CompositeSolution):
        return {
            "method": "cg+correction",
            "dof": sol.dof,
            "timings": sol.timings,
            "global": _cg_report(sol.global_solution),
            "subdomain": _mixed_report(sol.sub_solution),
        }
    raise TypeError(f"Unsupported solution type {type(sol).__name__}")


def write_solution_files(out: Path, sol, extra: dict | None = None) -> list[Path]:
    """p.vtk, u.vtk and report.json for one solution."""
    mesh = sol.mesh
    if isinstance(sol, MixedSolution):
        centroids = mesh.cell_centroids
        p_files = {"cell_data": {"p": sol.pressure.values}}
        u_files = {"cell_data": {"u": sol.velocity.evaluate(centroids, cells=np.arange(mesh.n_cells))}}
    elif isinstance(sol, CGSolution):
        p_files = {"point_data": {"p": sol.pressure.values}}
        u_files = {"point_data": {"u": sol.velocity.values}}
    else:
        g = sol.global_solution
        p_files = {"cell_data": {"p": sol.pressure.cell_values()}, "point_data": {"p_global": g.pressure.values}}
        u_files = {"cell_data": {"u": sol.velocity.cell_values()}, "point_data": {"u_global": g.velocity.values}}

    paths = [
        write_vtk(out / "p.vtk", mesh, title="pressure", **p_files),
        write_vtk(out / "u.vtk", mesh, title="velocity", **u_files),
        save_json(out / "report.json", {**solution_report(sol), **(extra or {})}),
    ]
    return paths


# ── Commands ───────────────────────────────────────────────────────────────

def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    data = ExperimentConfig.from_json(args.config).to_dict() if args.config else ExperimentConfig().to_dict()
    if args.tf is not None:
        data["t_f"] = args.tf
    if args.eps_mult is not None:
        data["eps_multipliers"] = [args.eps_mult]
    data["out_dir"] = str(args.out or data["out_dir"] or DATA_DIR / "results" / args.command)
    return ExperimentConfig.from_dict(data)


def solve_configured(config: ExperimentConfig, h: float, method: str):
    mesh = build_mesh(config, h)
    bc = config.boundary_conditions()
    if method == "mixed":
        return solve_mixed(mesh, config.t_f, bc, tol=config.tol, restart=config.restart)
    eps = config.eps_multipliers[0] * mesh.h_f
    if config.dim == 1:
        return solve_cg_1d(mesh, config.t_f, eps, config.p_in, config.p_out, tol=config.tol, restart=config.restart)
    if method == "cg":
        return solve_cg_2d(mesh, config.t_f, eps, bc, tol=config.tol, restart=config.restart)
    return run_new_method(mesh, config.t_f, eps, bc, tol=config.tol, restart=config.restart)


def _run(args: argparse.Namespace) -> list[Path]:
    config = _load_config(args)
    out = config.output_dir()
    h = args.h if args.h is not None else config.ladder[0]

    if args.command == "solve-mixed":
        sol = solve_configured(config, h, "mixed")
        return write_solution_files(out, sol, {"h": h, "config": config.to_dict()})
    if args.command == "solve-new":
        sol = solve_configured(config, h, "cg+correction")
        return write_solution_files(out, sol, {"h": h, "config": config.to_dict()})
    if args.command == "converge":
        return run_convergence(config).paths
    if args.command == "spectrum":
        return [run_spectrum(config).path]
    if args.command == "centerline":
        sol = solve_configured(config, h, config.method)
        line = sample_centerline(sol, config.centerline_y, config.centerline_points, out / "centerline.csv")
        return [line.path]
    if args.command == "profile-1d":
        return [profile.path for profile in run_profile_1d(config).values()]
    if args.command == "efficiency":
        run_efficiency(config)
        return [out / "efficiency.csv"]
    raise ConfigError(f"Unknown command {args.command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="faultflow", description="Darcy flow with an immersed fault")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        p = sub.add_parser(command)
        p.add_argument("--config", type=Path, help="Experiment configuration (JSON)")
        p.add_argument("--out", type=Path, help="Output directory")
        p.add_argument("--tf", type=float, help="Fault transmissibility")
        p.add_argument("--eps-mult", type=float, help="eps as a multiple of h_f")
        p.add_argument("--h", type=float, help="Mesh size for single solves")
    return parser


def cli(argv: list[str] | None = None) -> int:
    """Run one subcommand; 0 on success, 1 on solver failure, 2 on bad configuration."""
    args = build_parser().parse_args(argv)
    try:
        paths = _run(args)
    except (ConfigError, MeshError, FileNotFoundError) as exc:
        print(f"Error: {exc}")
        return 2
    except SolverError as exc:
        print(f"Solver error: {exc}")
        return 1
    for path in paths:
        print(f"Wrote {path}")
    return 0


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
