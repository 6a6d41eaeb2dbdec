"""Configuration, command dispatch, and persistence.

All figure-level results are reproduced through four subcommands::

    cpchain coeffs     --preset fig2-gold [--set geometry.z0_k0=0.01]
    cpchain map        --preset fig2-gold --out results/
    cpchain dynamics   --preset fig3-siv  --out results/
    cpchain subradiant --preset fig2-gold --set geometry.n=6

Configuration lives in an INI-style file (sections of key=value pairs),
optionally starting from a named preset, with repeatable ``--set
section.key=value`` overrides.  SI-natural unit conversion happens only
here; the computational core is dimensionless.  Every output file embeds
a hash of the exact configuration that produced it, and reruns with the
same configuration are bit-identical.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .coeffs import (EmitterParams, Geometry, coupling_set,
                     nonretarded_closed_forms)
from .dicke import subradiant_basis
from .dynamics import EvolutionSpec, superradiant_boost
from .errors import ConfigError, CpchainError, QuadratureError
from .forces import force_map, subradiant_force_spread
from .media import Medium
from .quadrature import QuadratureSpec

PRESETS = {
    # two-emitter force/decay maps near gold
    "fig2-gold": {
        "medium": {"plasma_frequency": "1.36e16", "loss_rate": "1.04e14"},
        "emitter": {"lambda0": "700e-9", "lifetime": "1e-9"},
        "geometry": {"n": "2", "z0_k0": "0.01", "x0_k0": "1e-4"},
        "map": {
            "x0_k0_grid": "logspace:1e-4,10,25",
            "z0_k0_grid": "logspace:5e-3,0.5,15",
        },
        "subradiant": {"x0_k0_grid": "logspace:1e-2,1.0,13"},
    },
    # chain of SiV-like emitters in the strongly enhanced near field.
    # t_end covers the full collective transient (peak near 0.05/Gamma0);
    # longer windows demand smaller steps, since the cascade amplifies
    # integrator truncation error while it transfers excitation downward.
    "fig3-siv": {
        "medium": {"plasma_frequency": "1.36e16", "loss_rate": "1.04e14"},
        "emitter": {"lambda0": "737e-9", "lifetime": "1.7e-9"},
        "geometry": {"n": "10", "x0": "1e-9", "z0": "10e-9"},
        "evolution": {"t_end": "0.5", "dt": "2e-4", "n_outputs": "201"},
    },
}



@dataclasses.dataclass
class RunConfig:
    """Validated run configuration with resolved physical objects."""

    medium: Medium
    emitter: EmitterParams
    geometry: Geometry
    quad: QuadratureSpec
    evolution: EvolutionSpec | None
    sections: dict
    out_dir: Path

    def config_hash(self) -> str:
        blob = json.dumps(self.sections, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _parse_grid(text: str) -> np.ndarray:
    """Grid syntax: "logspace:a,b,n", "linspace:a,b,n", or "v1,v2,...". """
    text = text.strip()
    if text.startswith(("logspace:", "linspace:")):
        kind, rest = text.split(":", 1)
        parts = rest.split(",")
        if len(parts) != 3:
            raise ConfigError(f"grid '{text}' needs start,stop,count")
        a, b, num = float(parts[0]), float(parts[1]), int(parts[2])
        if kind == "logspace":
            return np.geomspace(a, b, num)
        return np.linspace(a, b, num)
    vals = [float(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise ConfigError("empty grid")
    return np.asarray(vals)


def _require(section: dict, name: str, context: str) -> str:
    if name not in section:
        raise ConfigError(f"missing required field '{context}.{name}'")
    return section[name]


def load_config(preset: str | None, config_path: str | None,
                overrides: list[str], out_dir: str) -> RunConfig:
    sections: dict[str, dict] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"unknown preset '{preset}' (have: {', '.join(PRESETS)})")
        for sec, kv in PRESETS[preset].items():
            sections[sec] = dict(kv)
    if config_path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(config_path)
        if not read:
            raise ConfigError(f"cannot read config file '{config_path}'")
        for sec in parser.sections():
            sections.setdefault(sec, {}).update(dict(parser[sec]))
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(
                f"override '{item}' must look like section.key=value")
        key, value = item.split("=", 1)
        sec, name = key.split(".", 1)
        sections.setdefault(sec, {})[name] = value
    if not sections:
        raise ConfigError("no configuration given (use --preset or --config)")

    med = sections.get("medium", {})
    medium = Medium(
        plasma_frequency=float(_require(med, "plasma_frequency", "medium")),
        loss_rate=float(_require(med, "loss_rate", "medium")),
        permeability=float(med.get("permeability", "1.0")),
    )

    emi = sections.get("emitter", {})
    has_lambda = "lambda0" in emi
    has_omega = "omega0" in emi
    if has_lambda == has_omega:
        raise ConfigError("emitter needs exactly one of lambda0, omega0")
    has_life = "lifetime" in emi
    has_gamma = "gamma0" in emi
    if has_life == has_gamma:
        raise ConfigError("emitter needs exactly one of lifetime, gamma0")
    gamma0 = (float(emi["gamma0"]) if has_gamma
              else 1.0 / float(emi["lifetime"]))
    if has_lambda:
        emitter = EmitterParams.from_wavelength(float(emi["lambda0"]),
                                                gamma0=gamma0)
    else:
        emitter = EmitterParams(float(emi["omega0"]), gamma0)

    geo = sections.get("geometry", {})
    n = int(_require(geo, "n", "geometry"))
    if "z0" in geo and "z0_k0" in geo:
        raise ConfigError("give geometry.z0 or geometry.z0_k0, not both")
    if "z0" in geo:
        z0 = float(geo["z0"])
    elif "z0_k0" in geo:
        z0 = float(geo["z0_k0"]) / emitter.k0
    else:
        raise ConfigError("missing required field 'geometry.z0' "
                          "(or geometry.z0_k0)")
    if "x0" in geo:
        x0 = float(geo["x0"])
    elif "x0_k0" in geo:
        x0 = float(geo["x0_k0"]) / emitter.k0
    else:
        raise ConfigError("missing required field 'geometry.x0' "
                          "(or geometry.x0_k0)")
    try:
        geometry = Geometry(n, x0, z0, emitter.k0)
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from exc

    qd = sections.get("quadrature", {})
    quad = QuadratureSpec(
        rel_tol=float(qd.get("rel_tol", "1e-9")),
        abs_tol=float(qd.get("abs_tol", "1e-14")),
        max_panels=int(qd.get("max_panels", "50000")),
        tail_mult=float(qd.get("tail_mult", "60.0")),
    )

    evolution = None
    if "evolution" in sections:
        ev = sections["evolution"]
        evolution = EvolutionSpec(
            t_end=float(_require(ev, "t_end", "evolution")),
            dt=float(ev["dt"]) if "dt" in ev else None,
            n_outputs=int(ev.get("n_outputs", "201")),
            initial_state=ev.get("initial_state", "all_excited"),
        )

    return RunConfig(medium=medium, emitter=emitter, geometry=geometry,
                     quad=quad, evolution=evolution, sections=sections,
                     out_dir=Path(out_dir))


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.9g}"


def _write_csv(path: Path, header: list[str], rows, cfg_hash: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"# config_hash: {cfg_hash}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_sidecar(path: Path, config: RunConfig):
    side = {"config_hash": config.config_hash(), "sections": config.sections}
    with open(path, "w") as fh:
        json.dump(side, fh, indent=1, sort_keys=True)
        fh.write("\n")


def cmd_coeffs(config: RunConfig) -> int:
    cs = coupling_set(config.geometry, config.medium, config.emitter,
                      config.quad,
                      include_free_dd_shift=config.geometry.x0 > 0)
    report = cs.to_json_dict()
    report["config_hash"] = config.config_hash()
    try:
        nf = nonretarded_closed_forms(config.geometry, config.medium,
                                      config.emitter, config.quad)
        report["nonretarded_closed_forms"] = dataclasses.asdict(nf)
    except CpchainError as exc:
        report["nonretarded_closed_forms"] = f"unavailable: {exc}"
    text = json.dumps(report, indent=1, sort_keys=True)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    out = config.out_dir / "couplings.json"
    out.write_text(text + "\n")
    print(text)
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_map(config: RunConfig) -> int:
    sec = config.sections.get("map", {})
    x_grid = _parse_grid(_require(sec, "x0_k0_grid", "map"))
    z_grid = _parse_grid(_require(sec, "z0_k0_grid", "map"))
    threads = int(sec.get("threads", "1"))
    fmap = force_map(x_grid, z_grid, config.medium, config.emitter,
                     config.quad, threads=threads)
    out = config.out_dir / "force_map.csv"
    _write_csv(out, list(fmap.CSV_COLUMNS), fmap.rows(),
               config.config_hash())
    _write_sidecar(config.out_dir / "force_map.config.json", config)
    if fmap.failures:
        manifest = config.out_dir / "force_map.failures.json"
        with open(manifest, "w") as fh:
            json.dump([{"i": i, "j": j, "error": msg}
                       for i, j, msg in fmap.failures], fh, indent=1)
        print(f"{len(fmap.failures)} grid point(s) failed; see {manifest}",
              file=sys.stderr)
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_dynamics(config: RunConfig) -> int:
    if config.evolution is None:
        raise ConfigError("dynamics needs an [evolution] section "
                          "(missing field 'evolution.t_end')")
    series = superradiant_boost(config.geometry.n, config.geometry,
                                config.medium, config.emitter,
                                config.evolution, config.quad)
    unit = config.emitter.force_unit
    rows = [
        (t_s, t_g, f_nat, f_nat * unit, b_nat * unit, exc, tre)
        for t_s, t_g, f_nat, b_nat, exc, tre in zip(
            series.t_seconds, series.t, series.force, series.boost,
            series.excitation, series.trace_err)
    ]
    out = config.out_dir / "dynamics.csv"
    _write_csv(out, ["t_s", "t_gamma0", "F_total_natural", "F_total_N",
                     "boost_N", "excitation", "trace_err"], rows,
               config.config_hash())
    _write_sidecar(config.out_dir / "dynamics.config.json", config)
    peak, t_peak = series.peak_boost()
    print(f"peak |boost| = {peak * unit:.3e} N at t = "
          f"{t_peak / config.emitter.gamma0:.3e} s", file=sys.stderr)
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_subradiant(config: RunConfig) -> int:
    n = config.geometry.n
    if n % 2:
        raise ConfigError("subradiant command needs even geometry.n")
    sec = config.sections.get("subradiant", {})
    x_grid = _parse_grid(_require(sec, "x0_k0_grid", "subradiant"))
    d_g = len(subradiant_basis(n))
    header = (["x0_k0"] + [f"F_state_{i + 1}" for i in range(d_g)]
              + ["F_g", "F_e"])
    rows = []
    for x in x_grid:
        geo = Geometry.from_dimensionless(n, float(x), config.geometry.z0_k0,
                                          config.emitter.k0)
        forces = subradiant_force_spread(n, geo, config.medium,
                                         config.emitter, config.quad)
        cs = coupling_set(geo, config.medium, config.emitter, config.quad,
                          include_free_dd_shift=geo.x0 > 0)
        f_g = -float(cs.domega_minus_dz.sum())
        f_e = -float((-cs.domega_minus_dz + cs.domega_res_dz).sum())
        rows.append([x, *forces, f_g, f_e])
    out = config.out_dir / "subradiant.csv"
    _write_csv(out, header, rows, config.config_hash())
    _write_sidecar(config.out_dir / "subradiant.config.json", config)
    print(f"wrote {out}", file=sys.stderr)
    return 0


_COMMANDS = {
    "coeffs": cmd_coeffs,
    "map": cmd_map,
    "dynamics": cmd_dynamics,
    "subradiant": cmd_subradiant,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpchain",
        description="Collective Casimir-Polder forces for emitter chains "
                    "near a planar half-space")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", default=None, help="INI config file")
        p.add_argument("--preset", default=None,
                       choices=sorted(PRESETS), help="named preset")
        p.add_argument("--out", default="cpchain-out",
                       help="output directory")
        p.add_argument("--set", action="append", default=[],
                       metavar="SECTION.KEY=VALUE", dest="overrides",
                       help="override a config value (repeatable)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for sweeps")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.preset, args.config, args.overrides,
                             args.out)
        if args.threads is not None:
            config.sections.setdefault("map", {})["threads"] = \
                str(args.threads)
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, CpchainError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
