"""Config-driven experiment runner.

    mhlab run --config cfg.json [--out DIR] [--seed U64]
    mhlab describe --config cfg.json
    mhlab schema [--report]

Exit codes: 0 all assertions pass, 1 some assertion failed (the report is
still written), 2 malformed config, unmet precondition or unwritable output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .atomic import DECOMPOSITION_KINDS, decompose, decomposition_norm, reconstruct, validate_atom
from .filtration import Filtration, FiltrationError, Martingale
from .musielak import default_t_grid
from .operators import SPACES, all_space_norms
from .schema import CONFIG_SCHEMA, REPORT_SCHEMA, SCHEMA_VERSION
from .verify import (
    SPACE_OF_KIND,
    Ensemble,
    convergence_experiments,
    measure_gates,
    phi_factory,
    verify_atomic_equivalence,
    verify_martingale_inequalities,
    verify_sublinear_boundedness,
)

__all__ = ["ConfigError", "load_config", "resolve_seed", "run_experiment", "describe", "main",
           "to_json_bytes"]

SEED_ENV = "MHL_SEED"
ALL_KINDS = ["s", "P", "Q", "S", "M"]

INEQUALITY_PLAN = [
    ("mi1", "WHS <= C WHs", "S+, p_plus<2"),
    ("mi2", "WHM <= C WHs", "A_inf, S, p_plus<2"),
    ("mi3", "WHM <= WP and WHS <= WQ (asserted, constant 1)", "none"),
    ("mi4", "WHS, WHs <= C WP; WHM <= C WQ", "A_inf, S"),
    ("mi5", "WHs <= C WQ", "S-"),
    ("mi6", "WQ ~ WP (two-sided)", "A_inf, S, p_plus<2"),
    ("coincidence", "all five norms pairwise equivalent", "R <= r_max, A_inf"),
    ("bl1-bl4", "weighted L_p, p in {1, 2}, w = phi(., 1)", "A_inf/S/S-/S+ of w"),
    ("orthogonality", "E[S^2] = E[s^2] = E[f_N^2] (asserted, 1e-9)", "none"),
]


class ConfigError(ValueError):
    """Malformed config or unmet precondition (exit code 2)."""


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema error at {where}: {exc.message}") from exc


def resolve_seed(cfg: dict, cli_seed=None, env=None) -> tuple[int, str]:
    """Seed precedence: ``--seed`` > ``MHL_SEED`` > config > 0."""
    env = os.environ if env is None else env
    if cli_seed is not None:
        return _u64(cli_seed, "--seed"), "cli"
    if env.get(SEED_ENV) not in (None, ""):
        return _u64(env[SEED_ENV], SEED_ENV), "env"
    if "seed" in cfg:
        return int(cfg["seed"]), "config"
    return 0, "default"


def _u64(text, what) -> int:
    s = str(text).strip()
    if not s.isdigit() or int(s) >= 2**64:
        raise ConfigError(f"{what} must be a decimal u64, got {text!r}")
    return int(s)


def _experiments(cfg):
    for item in cfg.get("experiments", []):
        yield (item, {}) if isinstance(item, str) else (item["name"], item)


def _t_grid(cfg):
    g = cfg.get("t_grid", {})
    return default_t_grid(g.get("min", 1e-4), g.get("max", 1e4), g.get("num", 64))


def _q_list(opts):
    return [np.inf if q == "inf" else float(q) for q in opts.get("q", ["inf", 4])]


def _ensemble(cfg, seed) -> Ensemble:
    fcfg = cfg.get("filtration", {"family": "dyadic"})
    common = dict(seed=seed, trials=cfg.get("trials", 20), sparsity=cfg.get("sparsity", 0.2),
                  scale=cfg.get("scale", 1.0))
    if fcfg["family"] == "explicit":
        try:
            base = Filtration(fcfg["probs"], fcfg["levels"])
        except (FiltrationError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad explicit filtration: {exc}") from exc
        return Ensemble(family="explicit", depths=(base.depth,), base=base, **common)
    return Ensemble(family=fcfg["family"], depths=tuple(fcfg.get("depths", [3, 4, 5])), **common)


def _named_martingales(cfg, ens: Ensemble) -> dict:
    named = cfg.get("martingales")
    if not named:
        return {}
    depths = set(ens.depths)
    if len(depths) != 1:
        raise ConfigError("named martingales need a filtration with a single depth")
    filt = ens.filtration(depths.pop())
    out = {}
    for name, vals in sorted(named.items()):
        try:
            out[name] = Martingale.from_values(filt, vals)
        except (FiltrationError, ValueError) as exc:
            raise ConfigError(f"martingale {name!r}: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# JSON output
# ---------------------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def to_json_bytes(doc) -> bytes:
    """Canonical report bytes: sorted keys, two-space indent, no NaN literals."""
    return (json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n").encode()


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


class _Run:
    def __init__(self, cfg, seed):
        self.cfg = cfg
        self.seed = seed
        self.ens = _ensemble(cfg, seed)
        self.make_phi = phi_factory(cfg["phi"])
        self.t_grid = _t_grid(cfg)
        self.gcfg = {"aq_q": 2.0, "k_max": math.inf, "r_max": 16.0, **cfg.get("gates", {})}
        tol = cfg.get("tolerances", {})
        self.recon_tol = tol.get("reconstruction", 1e-9)
        self.conv_tol = tol.get("convergence", [1e-2, 1e-4, 1e-6])
        self.assertions = []
        self._gates = None

    def check(self, experiment, name, passed, value=None, bound=None):
        a = {"experiment": experiment, "name": name, "passed": bool(passed)}
        if value is not None:
            a["value"] = value
        if bound is not None:
            a["bound"] = bound
        self.assertions.append(a)

    @property
    def gates(self):
        if self._gates is None:
            self._gates = measure_gates(self.cfg["phi"], self.ens, self.gcfg["aq_q"], self.t_grid,
                                        self.gcfg["k_max"], self.gcfg["r_max"])
        return self._gates

    def _subjects(self):
        named = _named_martingales(self.cfg, self.ens)
        if named:
            return [(name, f) for name, f in named.items()]
        return [(f"trial{tr.index}", tr.f) for tr in self.ens]

    def _kind_gate(self, kind):
        if kind in ("S", "M") and not self.gates["pass"]["R"]:
            return f"failed gate: R <= {self.gcfg['r_max']}"
        return None

    def _decompose(self, kind, phi, f):
        kw = {}
        if kind in ("S", "M"):
            kw = {"t_grid": self.t_grid, "max_regularity": self.gcfg["r_max"],
                  "max_s_constant": self.gcfg["k_max"]}
        return decompose(kind, phi, f, **kw)

    # -- individual experiments ------------------------------------------------
    def norms(self, opts):
        rows = {}
        for name, f in self._subjects():
            rows[name] = all_space_norms(self.make_phi(f.filtration), f)
        return {"norms": rows}

    def decompose(self, opts):
        out = {}
        for kind in opts.get("kinds", ALL_KINDS):
            skip = self._kind_gate(kind)
            if skip:
                out[kind] = {"skipped": skip}
                continue
            rows = {}
            worst = 0.0
            for name, f in self._subjects():
                ph = self.make_phi(f.filtration)
                d = self._decompose(kind, ph, f)
                err = float(np.max(np.abs(reconstruct(d).values - f.values)))
                worst = max(worst, err)
                rows[name] = {
                    "k_range": None if d.k_range is None else list(d.k_range),
                    "atoms": len(d.entries),
                    "nonzero_atoms": len(d.nonzero()),
                    "mu": [e.mu for e in d.entries],
                    "reconstruction_error": err,
                    "decomposition_norm": decomposition_norm(ph, d),
                    "space_norm": all_space_norms(ph, f)[SPACE_OF_KIND[kind]],
                }
            out[kind] = {"c_tilde": DECOMPOSITION_KINDS[kind][1], "trials": rows, "max_reconstruction_error": worst}
            self.check("decompose", f"reconstruction[{kind}]", worst <= self.recon_tol, worst, self.recon_tol)
        return out

    def validate(self, opts):
        out = {}
        qs = _q_list(opts)
        for kind in opts.get("kinds", ALL_KINDS):
            skip = self._kind_gate(kind)
            if skip:
                out[kind] = {"skipped": skip}
                continue
            checked = failures = 0
            witnesses = []
            for name, f in self._subjects():
                ph = self.make_phi(f.filtration)
                for e in self._decompose(kind, ph, f).entries:
                    for q in qs:
                        checked += 1
                        res = validate_atom(ph, e.atom, q=q, t_grid=self.t_grid)
                        if not res.passed:
                            failures += 1
                            if len(witnesses) < 5:
                                witnesses.append({"subject": name, "k": e.k, "q": q, "condition": res.condition})
            out[kind] = {"atoms_checked": checked, "failures": failures, "witnesses": witnesses, "q": qs}
            self.check("validate", f"atoms[{kind}]", failures == 0, failures, 0)
        return out

    def equivalence(self, opts):
        out = {}
        for kind in opts.get("kinds", ALL_KINDS):
            skip = self._kind_gate(kind)
            if skip:
                out[kind] = {"skipped": skip}
                continue
            rep = verify_atomic_equivalence(self.cfg["phi"], kind, self.ens, _q_list(opts), self.t_grid)
            out[kind] = rep.to_dict()
            self.check("equivalence", rep.tag, rep.passed, rep.c_high, rep.asserted_bound)
        return out

    def inequalities(self, opts):
        reps = verify_martingale_inequalities(self.cfg["phi"], self.ens, self.gcfg["aq_q"], self.t_grid,
                                              self.gcfg["k_max"], self.gcfg["r_max"])
        for r in reps:
            if not r.skipped:
                self.check("inequalities", r.tag, r.passed, r.c_high, r.asserted_bound)
        return {"gates": self.gates, "items": [r.to_dict() for r in reps]}

    def convergence(self, opts):
        ccfg = {k: opts[k] for k in ("depth", "p", "truncations", "space_depth") if k in opts}
        ccfg.update(seed=self.seed, trials=self.ens.trials, tolerances=list(self.conv_tol))
        rep = convergence_experiments(self.cfg["phi"], ccfg)
        for name, ok in rep["assertions"].items():
            self.check("convergence", name, ok)
        return rep

    def sublinear(self, opts):
        rep = verify_sublinear_boundedness(opts.get("operator", "M"), self.cfg["phi"],
                                           opts.get("source", "WP"), self.ens, self.t_grid)
        self.check("sublinear", rep.tag, rep.passed, rep.c_high)
        return rep.to_dict()

    def trials_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)  # RFC-4180: CRLF line ends, minimal quoting
        w.writerow(["subject", "depth"] + list(SPACES))
        for name, f in self._subjects():
            norms = all_space_norms(self.make_phi(f.filtration), f)
            w.writerow([name, f.filtration.depth] + [repr(float(norms[s])) for s in SPACES])
        return buf.getvalue()


def run_experiment(cfg: dict, seed: int, seed_source: str = "config") -> tuple[dict, str | None]:
    """Execute every experiment in ``cfg``; returns ``(report, csv_text)``."""
    validate_config(cfg)
    try:
        run = _Run(cfg, seed)
        results = {}
        for name, opts in _experiments(cfg):
            key = name
            i = 2
            while key in results:
                key = f"{name}#{i}"
                i += 1
            results[key] = getattr(run, name)(opts)
        text = run.trials_csv() if cfg.get("output", {}).get("csv") else None
    except ConfigError:
        raise
    except (FiltrationError, ValueError) as exc:
        raise ConfigError(f"precondition failed: {exc}") from exc
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "mhlab",
        "version": __version__,
        "seed": seed,
        "seed_source": seed_source,
        "config": cfg,
        "experiments": results,
        "assertions": run.assertions,
        "passed": all(a["passed"] for a in run.assertions),
    }
    report = _clean(report)
    jsonschema.validate(report, REPORT_SCHEMA)
    return report, text


# ---------------------------------------------------------------------------
# describe
# ---------------------------------------------------------------------------


def describe(cfg: dict, seed: int | None = None, seed_source: str = "config") -> str:
    validate_config(cfg)
    exps = list(_experiments(cfg))
    if not exps:
        return "nothing to run: the experiment list is empty\n"
    fam = cfg.get("filtration", {"family": "dyadic"})
    lines = [
        f"plan: {len(exps)} experiment(s), seed {seed if seed is not None else cfg.get('seed', 0)} ({seed_source})",
        f"filtration: {fam['family']}"
        + ("" if fam["family"] == "explicit" else f", depths {fam.get('depths', [3, 4, 5])}")
        + f", {cfg.get('trials', 20)} trials",
        f"phi: {json.dumps(cfg['phi'], sort_keys=True)}",
    ]
    g = {"aq_q": 2.0, "k_max": math.inf, "r_max": 16.0, **cfg.get("gates", {})}
    for name, opts in exps:
        lines.append(f"- {name}")
        kinds = opts.get("kinds", ALL_KINDS)
        if name in ("decompose", "validate", "equivalence"):
            lines.append(f"    kinds: {', '.join(kinds)}")
            lines.append("    k-range: kmin = floor(log2(smallest positive stopping-process value)) - 1, "
                         "kmax = ceil(log2(largest terminal value)); levels 2^k")
            for k in kinds:
                op, ct = DECOMPOSITION_KINDS[k]
                gate = f"; gates: R <= {g['r_max']}, S- measured" if k in ("S", "M") else ""
                lines.append(f"    {k}: stopping process {op}, mu^k = {ct:g} * 2^k * ||1_B||{gate}")
            if name == "validate":
                lines.append(f"    q: {opts.get('q', ['inf', 4])}")
            if name == "equivalence":
                lines.append("    asserted: forward constant 1 for s/P/Q, (C K R)^(1/p-) for S/M; reverse reported")
        elif name == "inequalities":
            lines.append(f"    gates measured: A_q (q={g['aq_q']:g}), S, S-, S+ (K <= {g['k_max']}), "
                         f"regularity R <= {g['r_max']}, p_plus < 2")
            for tag, claim, gates in INEQUALITY_PLAN:
                lines.append(f"    {tag:<13} {claim}  [gates: {gates}]")
        elif name == "convergence":
            lines.append("    counterexample truncation tails, modular/quasi-norm co-convergence, "
                         "bounded and dominated convergence, normalization")
            lines.append(f"    tolerances: {cfg.get('tolerances', {}).get('convergence', [1e-2, 1e-4, 1e-6])}")
        elif name == "sublinear":
            lines.append(f"    operator {opts.get('operator', 'M')} from {opts.get('source', 'WP')}: "
                         "sublinearity check, atom-support constant, ratio WL[Tf]/source norm")
        elif name == "norms":
            lines.append(f"    spaces: {', '.join(SPACES)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _parser():
    p = argparse.ArgumentParser(prog="mhlab", description="weak martingale Musielak-Orlicz Hardy space lab")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the experiments of a config")
    r.add_argument("--config", required=True)
    r.add_argument("--out", default=None, help="output directory (default: config output.dir or .)")
    r.add_argument("--seed", default=None, help="decimal u64; overrides MHL_SEED and the config")
    d = sub.add_parser("describe", help="print the plan without running")
    d.add_argument("--config", required=True)
    s = sub.add_parser("schema", help="print the config JSON schema")
    s.add_argument("--report", action="store_true", help="print the report schema instead")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "schema":
        sys.stdout.write(json.dumps(REPORT_SCHEMA if args.report else CONFIG_SCHEMA, indent=2, sort_keys=True) + "\n")
        return 0
    try:
        cfg = load_config(args.config)
        seed, source = resolve_seed(cfg, getattr(args, "seed", None))
        if args.command == "describe":
            sys.stdout.write(describe(cfg, seed, source))
            return 0
        if not list(_experiments(cfg)):
            sys.stdout.write(describe(cfg))
        report, text = run_experiment(cfg, seed, source)
        out = Path(args.out or cfg.get("output", {}).get("dir", "."))
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "report.json").write_bytes(to_json_bytes(report))
            if text is not None:
                with open(out / "trials.csv", "w", newline="") as fh:
                    fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write output to {out}: {exc}") from exc
    except ConfigError as exc:
        print(f"mhlab: error: {exc}", file=sys.stderr)
        return 2
    failed = [a for a in report["assertions"] if not a["passed"]]
    for a in failed:
        print(f"FAIL {a['experiment']}: {a['name']}", file=sys.stderr)
    print(f"{len(report['assertions']) - len(failed)}/{len(report['assertions'])} assertions passed; "
          f"report at {out / 'report.json'}")
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
