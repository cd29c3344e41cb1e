"""Command-line front end.

    purimetry <scenario> [--key value]... [--config path] [--out path] [--svg path] [--log-y]

Exit codes: 0 success, 2 configuration error, 3 resource budget exceeded,
4 numeric invariant violated.
"""

from __future__ import annotations

import sys

from .joint import ResourceBudgetError, TruncationError
from .output import emit_svg, format_csv, write_atomic
from .scenarios import (
    SCENARIOS,
    ConfigError,
    NumericInvariantError,
    plot_columns,
    plot_table,
    read_config_file,
    resolve_config,
    run_scenario,
)

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_NUMERIC = 0, 2, 3, 4

_RESERVED = ("config", "out", "svg")


def usage() -> str:
    lines = [__doc__.strip().splitlines()[2].strip(), "", "scenarios:"]
    for spec in SCENARIOS.values():
        lines.append(f"  {spec.name:<18} {spec.summary}")
        for key, k in spec.keys.items():
            lines.append(f"      --{key.replace('_', '-'):<14} {k.help} (default {k.default:g})"
                         if isinstance(k.default, float) else
                         f"      --{key.replace('_', '-'):<14} {k.help} (default {k.default})")
    return "\n".join(lines) + "\n"


def parse_args(argv: list[str]):
    """Split argv into scenario, key flags and the reserved options.

    Every ``--key`` takes exactly one value except the switch ``--log-y``.
    """
    scenario, rest = argv[0], argv[1:]
    flags, reserved, log_y = {}, {}, False
    i = 0
    while i < len(rest):
        token = rest[i]
        if not token.startswith("--"):
            raise ConfigError(f"unexpected argument {token!r}")
        name = token[2:]
        if "=" in name:
            name, value = name.split("=", 1)
            i += 1
        elif name.replace("-", "_") == "log_y":
            log_y = True
            i += 1
            continue
        else:
            if i + 1 >= len(rest):
                raise ConfigError(f"--{name} needs a value")
            value = rest[i + 1]
            i += 2
        key = name.replace("-", "_")
        if key in _RESERVED:
            reserved[key] = value
        else:
            flags[key] = value
    return scenario, flags, reserved, log_y


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(usage())
        return EXIT_OK if argv else EXIT_CONFIG
    try:
        scenario, flags, reserved, log_y = parse_args(argv)
        file_values = read_config_file(reserved["config"]) if "config" in reserved else {}
        config = resolve_config(scenario, flags, file_values, reserved.get("out"), reserved.get("svg"), log_y)
        table = run_scenario(config)
        text = format_csv(table)
        if config.out:
            write_atomic(config.out, text)
        else:
            sys.stdout.write(text)
        if config.svg:
            x, ys = plot_columns(config)
            svg = emit_svg(plot_table(config, table), x, ys, log_y=config.log_y, title=config.scenario)
            write_atomic(config.svg, svg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceBudgetError, MemoryError) as exc:
        print(f"error: resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (NumericInvariantError, TruncationError, ArithmeticError) as exc:
        print(f"error: numeric invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
