"""Command-line front end.

Every subcommand reads one JSON configuration document (from --config PATH
or standard input), computes through the library, and writes CSV or JSON to
standard output (or --output PATH).  Output is deterministic: identical
configuration bytes produce identical output bytes.  Errors go to standard
error; exit code 2 flags a malformed configuration, 3 an instance the
library rejects, 0 success.

Numbers in the configuration may be JSON numbers or strings like "1/3";
strings and decimal literals are read exactly in rational mode.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Optional

from .asymptotics import rate_expansion
from .conversion import min_interconversion_infidelity, optimal_majorizing
from .distributions import (
    FLOAT,
    RATIONAL,
    Distribution,
    ThermalSystem,
    gibbs_state,
    rel_entropy,
)
from .iid import ConversionInstance, optimal_infidelity, optimal_rate, tensor_power
from .majorization import EmbeddingSpec, embed
from .rayleigh import (
    rayleigh_normal_cdf,
    rayleigh_normal_inverse,
    RayleighNormalParams,
    threshold_infidelity,
)
from .thermo import (
    SECOND_ORDER_ESTIMATE,
    EngineSetup,
    carnot_work,
    engine_nu,
    engine_performance,
    work_report,
)

__all__ = ["main"]


class ConfigError(ValueError):
    """Configuration is malformed (exit code 2)."""


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return "%.12g" % x
    return str(x)


def _round12(x: float) -> float:
    return float("%.12g" % x)


def _as_fraction(value, field: str) -> Fraction:
    try:
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"field {field!r}: cannot read {value!r} as a number") from exc


def _as_float(value, field: str) -> float:
    try:
        if isinstance(value, str):
            return float(Fraction(value))
        return float(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"field {field!r}: cannot read {value!r} as a number") from exc


def _as_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field {field!r} must be an integer, got {value!r}")
    return value


def _require(config: dict, field: str):
    if field not in config:
        raise ConfigError(f"missing required field {field!r}")
    return config[field]


def _parse_system(config: dict) -> tuple[ThermalSystem, EmbeddingSpec, str]:
    raw = config.get("system")
    if raw is None:
        raise ConfigError("missing required field 'system'")
    if not isinstance(raw, dict):
        raise ConfigError("'system' must be an object")
    arithmetic = raw.get("arithmetic", "float")
    if arithmetic not in (RATIONAL, FLOAT):
        raise ConfigError("'arithmetic' must be 'rational' or 'float'")
    energies = raw.get("energies")
    if not isinstance(energies, list) or not energies:
        raise ConfigError("'system.energies' must be a non-empty list")
    kb = _as_float(raw.get("kB", 1), "system.kB")
    has_beta = "beta" in raw
    has_temp = "temperature" in raw
    if has_beta == has_temp:
        raise ConfigError("give exactly one of 'system.beta' and 'system.temperature'")
    if has_beta:
        beta = _as_fraction(raw["beta"], "system.beta")
    else:
        temp = _as_fraction(raw["temperature"], "system.temperature")
        if temp <= 0:
            raise ConfigError("'system.temperature' must be positive")
        beta = 1 / (_as_fraction(kb, "system.kB") * temp)
    precision = raw.get("embeddingPrecision", 10**6)
    precision = _as_int(precision, "system.embeddingPrecision")
    if precision < 1:
        raise ConfigError("'system.embeddingPrecision' must be >= 1")
    try:
        system = ThermalSystem(
            energies=tuple(_as_fraction(e, "system.energies") for e in energies),
            beta=beta,
            kB=kb,
        )
        spec = EmbeddingSpec.from_system(system, max_denominator=precision)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return system, spec, arithmetic


def _parse_distribution(config: dict, field: str, arithmetic: str) -> Distribution:
    raw = _require(config, field)
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"'{field}' must be a non-empty list")
    try:
        if arithmetic == RATIONAL:
            entries = [_as_fraction(v, field) for v in raw]
            total = sum(entries)
            if total != 0:
                entries = [v / total for v in entries]
            return Distribution(entries, mode=RATIONAL)
        values = [_as_float(v, field) for v in raw]
        total = math.fsum(values)
        if total > 0:
            values = [v / total for v in values]
        return Distribution(values, mode=FLOAT)
    except ValueError as exc:
        raise ConfigError(f"'{field}': {exc}") from exc


def _int_list(config: dict, field: str, default=None) -> list[int]:
    raw = config.get(field, default)
    if raw is None:
        raise ConfigError(f"missing required field {field!r}")
    if isinstance(raw, int) and not isinstance(raw, bool):
        return [raw]
    if isinstance(raw, list) and raw and all(
        isinstance(v, int) and not isinstance(v, bool) for v in raw
    ):
        return list(raw)
    raise ConfigError(f"'{field}' must be an integer or a list of integers")


def _float_list(config: dict, field: str, default=None) -> list[float]:
    raw = config.get(field, default)
    if raw is None:
        raise ConfigError(f"missing required field {field!r}")
    if not isinstance(raw, list):
        raw = [raw]
    if not raw:
        raise ConfigError(f"'{field}' must not be empty")
    return [_as_float(v, field) for v in raw]


def _thread_count() -> int:
    raw = os.environ.get("THERMOCONV_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError("THERMOCONV_THREADS must be an integer") from None
    return max(1, count)


def _csv(header: list[str], rows: list[list[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _rate_rows(
    system: ThermalSystem,
    spec: EmbeddingSpec,
    p: Distribution,
    q: Distribution,
    n_values: list[int],
    epsilons: list[float],
    linear_scan: bool,
    round_rate: bool,
) -> str:
    gamma = gibbs_state(system, mode=FLOAT)
    p_float = p.to_float()
    q_float = q.to_float()

    def one(task):
        n, eps = task
        rate = optimal_rate(p, q, system, spec, n, eps, linear_scan=linear_scan)
        expansion = rate_expansion(p_float, q_float, gamma, eps)
        r2 = expansion.evaluate(n)
        r2_rounded = Fraction(round(n * r2), n)
        return [
            str(n),
            str(int(rate * n)),
            _fmt(rate),
            _fmt(_round12(float(r2_rounded)) if round_rate else _round12(r2)),
            _fmt(_round12(float(r2_rounded))),
            _fmt(_round12(expansion.first_order)),
            _fmt(_round12(eps)),
            expansion.regime.value,
            _fmt(_round12(expansion.nu)),
        ]

    tasks = [(n, eps) for n in n_values for eps in epsilons]
    threads = _thread_count()
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, tasks))
    else:
        rows = [one(task) for task in tasks]
    header = [
        "n",
        "m_exact",
        "R_exact",
        "R2",
        "R2_rounded",
        "R1",
        "epsilon",
        "regime",
        "nu",
    ]
    return _csv(header, rows)


def cmd_rate(config: dict, args) -> str:
    system, spec, arithmetic = _parse_system(config)
    if args.arithmetic:
        arithmetic = args.arithmetic
    p = _parse_distribution(config, "p", arithmetic)
    q = _parse_distribution(config, "q", arithmetic)
    n_values = _int_list(config, "n")
    epsilons = _float_list(config, "epsilon")
    return _rate_rows(
        system, spec, p, q, n_values, epsilons, args.linear_scan, args.round_rate
    )


def cmd_figure(config: dict, args) -> str:
    """Interconversion-rate data for the canonical two-level example:
    p=[0.7,0.3] -> q=[0.8,0.2], energies [0,1], temperature 3."""
    base = {
        "system": {"energies": [0, 1], "temperature": 3, "kB": 1},
        "p": [0.7, 0.3],
        "q": [0.8, 0.2],
    }
    system, spec, arithmetic = _parse_system(base)
    if args.arithmetic:
        arithmetic = args.arithmetic
    p = _parse_distribution(base, "p", arithmetic)
    q = _parse_distribution(base, "q", arithmetic)
    n_values = _int_list(config, "n_values", default=list(range(20, 201, 20)))
    epsilons = _float_list(config, "epsilons", default=[0.05, 1e-5])
    return _rate_rows(
        system, spec, p, q, n_values, epsilons, args.linear_scan, args.round_rate
    )


def cmd_infidelity(config: dict, args) -> str:
    system, spec, arithmetic = _parse_system(config)
    if args.arithmetic:
        arithmetic = args.arithmetic
    p = _parse_distribution(config, "p", arithmetic)
    q = _parse_distribution(config, "q", arithmetic)
    n = _as_int(config.get("n", 1), "n")
    m = _as_int(config.get("m", 1), "m")
    pad = config.get("pad_with_gibbs", True)
    if not isinstance(pad, bool):
        raise ConfigError("'pad_with_gibbs' must be a boolean")
    if pad:
        inst = ConversionInstance(p=p, q=q, system=system, spec=spec, n=n, m=m)
        value = optimal_infidelity(inst)
    else:
        if n != m:
            raise ConfigError("'pad_with_gibbs': false requires n == m")
        if n == 1:
            value = min_interconversion_infidelity(p, q, spec)
        else:
            mode = RATIONAL if arithmetic == RATIONAL else FLOAT
            ph = tensor_power(embed(p if mode == RATIONAL else p.to_float(), spec), n)
            qh = tensor_power(embed(q if mode == RATIONAL else q.to_float(), spec), m)
            witness = optimal_majorizing(ph, qh)
            if witness.exact_fidelity is not None:
                value = float(1 - witness.exact_fidelity)
            else:
                value = 1.0 - witness.fidelity_value
    return _fmt(_round12(float(value))) + "\n"


def cmd_curve(config: dict, args) -> str:
    system, spec, arithmetic = _parse_system(config)
    if args.arithmetic:
        arithmetic = args.arithmetic
    p = _parse_distribution(config, "p", arithmetic)
    embedded = embed(p if arithmetic == RATIONAL else p.to_float(), spec)
    if "points" in config:
        ks = _int_list(config, "points")
    else:
        ks = [0] + [int(e) for e in embedded.block_ends]
    rows = [[str(k), _fmt(_round12(float(embedded.prefix_mass(k))))] for k in ks]
    return _csv(["k", "lorenz"], rows)


def cmd_rayleigh(config: dict, args) -> str:
    nu = _as_float(_require(config, "nu"), "nu")
    invert = config.get("invert", False)
    if not isinstance(invert, bool):
        raise ConfigError("'invert' must be a boolean")
    if invert:
        eps = _as_float(_require(config, "epsilon"), "epsilon")
        value = rayleigh_normal_inverse(eps, nu)
    else:
        mu = _as_float(_require(config, "mu"), "mu")
        value = rayleigh_normal_cdf(RayleighNormalParams(mu=mu, nu=nu))
    return _fmt(_round12(value)) + "\n"


def cmd_work(config: dict, args) -> str:
    system, spec, arithmetic = _parse_system(config)
    if args.arithmetic:
        arithmetic = args.arithmetic
    p = _parse_distribution(config, "p", arithmetic)
    n = _as_int(_require(config, "n"), "n")
    epsilon = _as_float(_require(config, "epsilon"), "epsilon")
    report = work_report(n, epsilon, p, system)
    payload = {
        "kind": SECOND_ORDER_ESTIMATE,
        "n": n,
        "epsilon": _round12(epsilon),
        "w": _round12(report.w),
        "delta_w": _round12(report.delta_w),
        "wd": _round12(report.wd),
        "wf": _round12(report.wf),
    }
    return json.dumps(payload, sort_keys=True) + "\n"


def cmd_engine(config: dict, args) -> str:
    system, spec, arithmetic = _parse_system(config)
    setup = EngineSetup(
        system=system,
        th=_as_float(_require(config, "Th"), "Th"),
        tc=_as_float(_require(config, "Tc"), "Tc"),
        tc_prime=_as_float(_require(config, "TcPrime"), "TcPrime"),
        n=_as_int(_require(config, "n"), "n"),
    )
    epsilon = _as_float(_require(config, "epsilon"), "epsilon")
    perf = engine_performance(setup, setup.n, epsilon)
    nu = engine_nu(setup)
    payload = {
        "kind": SECOND_ORDER_ESTIMATE,
        "n": setup.n,
        "epsilon": _round12(epsilon),
        "w": _round12(perf.w),
        "q_out": _round12(perf.q_out),
        "eta": _round12(perf.eta),
        "eta_carnot_integrated": _round12(perf.eta_carnot_integrated),
        "eta_second_order": _round12(perf.eta_second_order),
        "nu": _round12(nu),
        "epsilon_zero": _round12(threshold_infidelity(nu)),
        "carnot_work_per_copy": _round12(carnot_work(setup)),
    }
    return json.dumps(payload, sort_keys=True) + "\n"


_COMMANDS: dict[str, Callable[[dict, Any], str]] = {
    "rate": cmd_rate,
    "infidelity": cmd_infidelity,
    "curve": cmd_curve,
    "rayleigh": cmd_rayleigh,
    "work": cmd_work,
    "engine": cmd_engine,
    "figure": cmd_figure,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermoconv",
        description="Exact and second-order interconversion rates under "
        "thermal operations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in _COMMANDS.items():
        cmd = sub.add_parser(name, help=handler.__doc__)
        cmd.add_argument("--config", help="path to the JSON configuration")
        cmd.add_argument("--output", help="write output here instead of stdout")
        cmd.add_argument(
            "--round-rate",
            action="store_true",
            help="report the second-order rate rounded to a multiple of 1/n",
        )
        cmd.add_argument(
            "--linear-scan",
            action="store_true",
            help="scan output copy counts linearly instead of binary search",
        )
        cmd.add_argument(
            "--arithmetic",
            choices=[RATIONAL, FLOAT],
            help="override the configuration's arithmetic mode",
        )
    return parser


def _load_config(args) -> dict:
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    else:
        text = sys.stdin.read()
    try:
        config = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("configuration must be a JSON object")
    return config


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        output = _COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as handle:
            handle.write(output)
    else:
        sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
