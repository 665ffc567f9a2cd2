"""Command-line front end: verify, simulate, and scan.

``verify`` runs the exhaustive correctness censuses and emits a JSON
report (exit 0 iff everything passes).  ``simulate`` runs protocol Monte
Carlo batches per relay behavior and emits CSV or JSON rows.  ``scan``
sweeps one parameter and emits one row per grid point.

All output is a pure function of (config, seed): CSV files start with
'#'-prefixed comment lines carrying both, rows are written by a single
writer after a deterministic merge, and no timestamps appear anywhere.

Exit codes: 0 success, 1 check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import resources

import jsonschema
import numpy as np

from . import oracle
from .amd import AmdParams
from .channel import AdditiveLatticeOffset, HonestRelay, RandomGarble, SubstituteLattice
from .extract import DiscreteDistribution, ExtractorParams, leakage_budget, r_max
from .fields import ExtField
from .lattice import NestedLatticePair
from .protocol import ProtocolParams, TwoHopProtocol, rate_accounting

__all__ = ["main", "load_config", "DEFAULT_CONFIG"]

DEFAULT_CONFIG: dict = {
    "seed": 1,
    "workers": 1,
    "protocol": {},
    "simulate": {
        "trials": 1000,
        "behaviors": [
            {"kind": "honest"},
            {"kind": "substitute", "pattern": [1]},
            {"kind": "additive", "pattern": [1]},
            {"kind": "garble"},
        ],
    },
    "verify": {},
    "scan": {"kind": "d", "values": list(range(1, 17)), "N": 25, "r": 25, "q": 2, "Re": 1.0},
}

ALL_CHECKS = [
    "amd-attack-bound",
    "coords-isomorphism",
    "sum-representation",
    "full-rank-fraction",
    "hash-collision",
    "seed-uniformity",
    "leftover-entropy",
    "pinsker",
]


class ConfigError(ValueError):
    pass


def _schema() -> dict:
    text = resources.files("relaysec").joinpath("config_schema.json").read_text()
    return json.loads(text)


def load_config(path: str | None) -> dict:
    """Merge the config file over the defaults and schema-validate."""
    merged = json.loads(json.dumps(DEFAULT_CONFIG))
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        for key, value in user.items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key].update(value)
            else:
                merged[key] = value
    try:
        jsonschema.validate(merged, _schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config rejected: {exc.message}") from exc
    return merged


def _build_params(cfg: dict) -> ProtocolParams:
    try:
        return ProtocolParams(**cfg.get("protocol", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"protocol config rejected: {exc}") from exc


def _build_behavior(entry: dict):
    kind = entry["kind"]
    pattern = tuple(entry.get("pattern", [1]))
    if kind == "honest":
        return HonestRelay(), "honest"
    if kind == "substitute":
        return SubstituteLattice(pattern), f"substitute{list(pattern)}"
    if kind == "additive":
        return AdditiveLatticeOffset(pattern), f"additive{list(pattern)}"
    if kind == "garble":
        return RandomGarble(), "garble"
    raise ConfigError(f"unknown behavior kind {kind!r}")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _rows_to_csv(rows: list[dict], header: list[str], meta: dict) -> str:
    buf = io.StringIO()
    for key in sorted(meta):
        buf.write(f"# {key}={json.dumps(meta[key], sort_keys=True)}\r\n")
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _rows_to_json(rows: list[dict], meta: dict) -> str:
    return json.dumps({"meta": meta, "rows": rows}, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _run_checks(cfg: dict, seed: int) -> list[dict]:
    vcfg = cfg.get("verify", {})
    checks = vcfg.get("checks", ALL_CHECKS)
    pair_cap = vcfg.get("max_pair_enum", oracle.MAX_PAIR_ENUM)
    attack_cap = vcfg.get("max_attack_enum", oracle.MAX_ATTACK_ENUM)
    results = []

    def record(name, passed, details):
        results.append({"name": name, "passed": bool(passed), "details": details})

    if "amd-attack-bound" in checks:
        for q, r, d in [(5, 1, 1), (5, 2, 2)]:
            census = oracle.exact_amd_win_census(
                AmdParams(field=ExtField(q, r), d=d), cap=attack_cap
            )
            record(
                "amd-attack-bound",
                census.holds,
                {"q": q, "r": r, "d": d,
                 "max_success": census.max_success, "bound": census.bound},
            )
    if "coords-isomorphism" in checks:
        for q in (2, 3, 5):
            for n in (1, 2, 3):
                ok, witness = oracle.isomorphism_census(
                    NestedLatticePair(N=n, q=q), cap=pair_cap
                )
                record("coords-isomorphism", ok,
                       {"q": q, "N": n, "counterexample": witness})
    if "sum-representation" in checks:
        for q, dims in [(5, (1, 2)), (2, (1, 2, 3))]:
            for n in dims:
                ok, witness = oracle.representation_census(
                    NestedLatticePair(N=n, q=q), cap=pair_cap
                )
                record("sum-representation", ok,
                       {"q": q, "N": n, "counterexample": witness})
    if "full-rank-fraction" in checks:
        for q in (2, 3):
            for n in range(1, 5):
                for r in range(1, n + 1):
                    count, total, holds = oracle.full_rank_census(q, r, n)
                    record("full-rank-fraction", holds,
                           {"q": q, "rows": r, "cols": n,
                            "fraction": f"{count}/{total}"})
    if "hash-collision" in checks:
        for q in (2, 3):
            for n in (1, 2, 3):
                for r in (1, 2):
                    if r > n:
                        continue
                    prob, holds = oracle.universal_hash_census(q, n, r)
                    record("hash-collision", holds,
                           {"q": q, "N": n, "r": r, "max_collision": prob})
    if "seed-uniformity" in checks:
        from .extract import seed_uniformity_raw
        from .fields import matrix_row_rank, sample_matrix

        inject = vcfg.get("inject_g")
        if inject is not None:
            mq = int(vcfg.get("inject_q", 2))
            matrices = [(np.array(inject, dtype=np.int64), mq, "injected")]
        else:
            matrices = []
            rng = np.random.default_rng(seed)
            for q, n in [(2, 2), (3, 2), (5, 3)]:
                r = max(1, min(r_max(n, q, 0.1), n)) if q > 2 else 1
                while True:
                    m = sample_matrix(rng, r, n, q)
                    if matrix_row_rank(m, q) == r:
                        break
                matrices.append((m, q, f"sampled q={q} N={n}"))
        for m, mq, label in matrices:
            _, uniform = seed_uniformity_raw(m, mq)
            record("seed-uniformity", uniform,
                   {"matrix": m.tolist(), "label": label, "q": mq})
    if "leftover-entropy" in checks:
        cases = [
            (2, 2, 1, DiscreteDistribution.uniform(4)),
            (3, 2, 1, DiscreteDistribution.uniform(9)),
        ]
        for q, n, r, dist in cases:
            avg, bound, holds = oracle.leftover_census(q, n, r, dist)
            record("leftover-entropy", holds,
                   {"q": q, "N": n, "r": r, "average": avg, "bound": bound})
        budget = leakage_budget(ExtractorParams(N=2, q=11, epsilon=0.2, smoothing=6.0), 1)
        pair = NestedLatticePair(N=2, q=11)
        total = 0.0
        n_mat = 0
        from itertools import product as iproduct

        for entries in iproduct(range(11), repeat=2):
            m = np.array(entries, dtype=np.int64).reshape(1, 2)
            total += oracle.exact_seed_leakage(pair, m, cap=pair_cap)
            n_mat += 1
        avg = total / n_mat
        record("leftover-entropy", avg <= budget.budget_bits + 1e-9,
               {"q": 11, "N": 2, "r": 1, "smoothing": 6.0,
                "averaged_leakage": avg, "budget": budget.budget_bits})
    if "pinsker" in checks:
        rng = np.random.default_rng(seed)
        worst = 0.0
        ok = True
        for _ in range(1000):
            raw = rng.random((3, 4))
            joint = oracle.JointDistribution(raw / raw.sum())
            lhs, rhs = oracle.pinsker_check(joint)
            ok = ok and lhs >= rhs - 1e-12
            worst = max(worst, rhs - lhs)
        record("pinsker", ok, {"joints": 1000, "worst_gap": worst})
    return results


def cmd_verify(cfg: dict, seed: int, out: str | None) -> int:
    _build_params(cfg)  # an inconsistent protocol section fails before any run
    results = _run_checks(cfg, seed)
    all_passed = all(r["passed"] for r in results)
    report = {"seed": seed, "all_passed": all_passed, "checks": results}
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", out)
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

SIM_COLUMNS = [
    "behavior", "trials", "decodeErrRate", "falseRejectRate",
    "adversaryWinRate", "winBound", "n", "RT", "PT", "seed",
]


def cmd_simulate(cfg: dict, seed: int, workers: int, out: str | None, fmt: str) -> int:
    params = _build_params(cfg)
    proto = TwoHopProtocol(params)
    sim_cfg = cfg.get("simulate", {})
    trials = sim_cfg.get("trials", 1000)
    rows = []
    for entry in sim_cfg.get("behaviors", [{"kind": "honest"}]):
        behavior, label = _build_behavior(entry)
        report = proto.monte_carlo(behavior, trials, workers=workers, seed=seed)
        rows.append({
            "behavior": label,
            "trials": report.trials,
            "decodeErrRate": repr(report.decode_error_rate),
            "falseRejectRate": repr(report.false_reject_rate),
            "adversaryWinRate": repr(report.adversary_win_rate),
            "winBound": repr(report.win_bound),
            "n": report.n,
            "RT": repr(report.RT),
            "PT": repr(report.PT),
            "seed": seed,
        })
    meta = {"config": cfg, "seed": seed}
    text = _rows_to_csv(rows, SIM_COLUMNS, meta) if fmt == "csv" else _rows_to_json(rows, meta)
    _emit(text, out)
    return 0


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------


def cmd_scan(cfg: dict, seed: int, out: str | None, fmt: str) -> int:
    scan = cfg.get("scan", {})
    kind = scan.get("kind")
    rows: list[dict] = []
    if kind == "d":
        n, r, q, re = scan.get("N", 25), scan.get("r", 25), scan.get("q", 2), scan.get("Re", 1.0)
        for d in scan.get("values", list(range(1, 17))):
            uses, rt = rate_accounting(n, r, q, d, re)
            rows.append({"status": "ok", "param": "d", "value": d,
                         "n": uses, "RT": repr(rt), "halfRe": repr(re / 2)})
        header = ["status", "param", "value", "n", "RT", "halfRe"]
    elif kind == "r":
        d, q = scan.get("d", 2), scan.get("q", 5)
        for r in scan.get("values", [1, 2, 3]):
            bound = (d + 1) / q**r
            rows.append({"status": "ok", "param": "r", "value": r,
                         "winBound": repr(bound)})
        header = ["status", "param", "value", "winBound"]
    elif kind == "leakage":
        q = scan.get("q", 11)
        r = scan.get("r", 1)
        candidates = scan.get("candidates", 64)
        cap = scan.get("max_pair_enum", oracle.MAX_PAIR_ENUM)
        rng = np.random.default_rng(seed)
        from .extract import search_good_extractor

        for n in scan.get("values", [1, 2]):
            try:
                result = search_good_extractor(
                    q, n, r, candidates, rng,
                    lambda m, _n=n: oracle.exact_seed_leakage(
                        NestedLatticePair(N=_n, q=q), m, cap=cap
                    ),
                )
                rows.append({"status": "ok", "param": "N", "value": n,
                             "bestLeakage": repr(result.best_leakage)})
            except oracle.SizeGuardError:
                rows.append({"status": "skipped", "param": "N", "value": n,
                             "bestLeakage": ""})
        header = ["status", "param", "value", "bestLeakage"]
    else:
        raise ConfigError(f"unknown scan kind {kind!r}")
    meta = {"config": cfg, "seed": seed}
    text = _rows_to_csv(rows, header, meta) if fmt == "csv" else _rows_to_json(rows, meta)
    _emit(text, out)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="relaysec",
        description="Untrusted-relay coding scheme: verification and simulation",
    )
    parser.add_argument("command", choices=["verify", "simulate", "scan"])
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="global seed override")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.get("seed", 1)
        workers = args.workers if args.workers is not None else cfg.get("workers", 1)
        if args.command == "verify":
            return cmd_verify(cfg, seed, args.out)
        if args.command == "simulate":
            return cmd_simulate(cfg, seed, workers, args.out, args.format)
        return cmd_scan(cfg, seed, args.out, args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except oracle.SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
