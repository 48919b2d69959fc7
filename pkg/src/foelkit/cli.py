"""``foel`` command line: chain files in, JSON or CSV reports out.

Exit codes: 0 success or strict ordering, 2 input or solver error,
3 ordering holds only with equalities, 4 ordering violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .basis import enumerate_hw_basis
from .cache import SectorCache
from .chain import (
    BilinearBiquadratic,
    HalfInteger,
    Heisenberg,
    SpinChainSpec,
    max_total_spin,
)
from .errors import FoelError, NotAdmissible
from .results import Status
from .spectra import (
    biquadratic_sweep,
    eigenvalues_below_detail,
    energy_table,
    extension_mono_check,
    foel_check,
    sector_entry,
    spectral_gap,
)

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_NONSTRICT = 3
EXIT_VIOLATED = 4

_SPIN_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*2)?\s*$")


class ChainFileError(ValueError):
    """A chain file that does not describe a valid chain; ``where`` names the field."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


def _parse_spin(value, where: str) -> HalfInteger:
    if isinstance(value, bool) or isinstance(value, float):
        raise ChainFileError(where, f"spin {value!r} must be an exact string such as \"1/2\" or \"1\"")
    if isinstance(value, int):
        return HalfInteger(2 * value)
    if not isinstance(value, str):
        raise ChainFileError(where, f"spin {value!r} must be a string")
    m = _SPIN_RE.match(value)
    if not m:
        raise ChainFileError(where, f"cannot read {value!r} as a half-integer")
    n = int(m.group(1))
    return HalfInteger(n if "/" in value else 2 * n)


def parse_chain(data) -> SpinChainSpec:
    """Build a chain from the decoded JSON of a chain file."""
    if not isinstance(data, dict):
        raise ChainFileError("<root>", "expected a JSON object")
    if "spins" not in data:
        raise ChainFileError("spins", "missing")
    spins_raw = data["spins"]
    if not isinstance(spins_raw, list) or not spins_raw:
        raise ChainFileError("spins", "must be a non-empty list")
    spins = [_parse_spin(v, f"spins[{i}]") for i, v in enumerate(spins_raw)]
    for i, s in enumerate(spins):
        if s.doubled < 1:
            raise ChainFileError(f"spins[{i}]", "spin must be at least 1/2")
    couplings = data.get("couplings", [1.0] * (len(spins) - 1))
    if not isinstance(couplings, list):
        raise ChainFileError("couplings", "must be a list")
    if len(couplings) != len(spins) - 1:
        raise ChainFileError(
            "couplings", f"expected {len(spins) - 1} entries for {len(spins)} sites, got {len(couplings)}"
        )
    for i, j in enumerate(couplings):
        if isinstance(j, bool) or not isinstance(j, (int, float)) or not j > 0:
            raise ChainFileError(f"couplings[{i}]", f"{j!r} is not a positive number")
    model_raw = data.get("model", {"type": "heisenberg"})
    if not isinstance(model_raw, dict) or "type" not in model_raw:
        raise ChainFileError("model", "expected an object with a \"type\" field")
    kind = model_raw["type"]
    if kind == "heisenberg":
        model = Heisenberg()
    elif kind == "bilinear-biquadratic":
        t = model_raw.get("t")
        if isinstance(t, bool) or not isinstance(t, (int, float)):
            raise ChainFileError("model.t", "a numeric t is required")
        model = BilinearBiquadratic(float(t))
        if any(s.doubled != 2 for s in spins):
            raise ChainFileError("model", "bilinear-biquadratic needs spin 1 on every site")
    else:
        raise ChainFileError("model.type", f"unknown model {kind!r}")
    return SpinChainSpec(tuple(spins), tuple(float(j) for j in couplings), model)


def load_chain(path: str) -> SpinChainSpec:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChainFileError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return parse_chain(data)


# --------------------------------------------------------------------------


def _status_code(status: Status) -> int:
    return {
        Status.HOLDS_STRICT: EXIT_OK,
        Status.HOLDS_NONSTRICT: EXIT_NONSTRICT,
        Status.VIOLATED: EXIT_VIOLATED,
        Status.PRECONDITION_FAILED: EXIT_ERROR,
    }[status]


def _cache(args):
    return SectorCache() if getattr(args, "cache", "off") == "on" else None


def _spin_arg(text: str) -> HalfInteger:
    return _parse_spin(text, "--sector")


def cmd_spectrum(args, chain):
    cache = _cache(args)
    if args.sector == "all":
        entries = energy_table(chain, args.method, cache=cache).entries
    else:
        entries = [sector_entry(chain, _spin_arg(args.sector), args.method, cache=cache)]
    return {"table": [e.to_json() for e in entries]}, EXIT_OK


def cmd_foel(args, chain):
    report = foel_check(chain, args.method, cache=_cache(args))
    return report.to_json(chain), _status_code(report.status)


def cmd_gap(args, chain):
    return {"gap": spectral_gap(chain, args.method, cache=_cache(args))}, EXIT_OK


def cmd_below(args, chain):
    res = eigenvalues_below_detail(chain, args.energy, args.method, cache=_cache(args))
    levels = [{"S_doubled": S.doubled, "energy": e} for S, e in res.levels]
    return {"e_max": args.energy, "sectors": res.sectors, "levels": levels}, EXIT_OK


def _worst(statuses) -> Status:
    order = [Status.HOLDS_STRICT, Status.HOLDS_NONSTRICT, Status.PRECONDITION_FAILED, Status.VIOLATED]
    return max(statuses, key=order.index, default=Status.HOLDS_STRICT)


def cmd_mono(args, chain):
    if args.extension:
        ext = load_chain(args.extension)
    else:
        spin = _parse_spin(args.append, "--append")
        ext = SpinChainSpec(chain.spins + (spin,), chain.couplings + (args.coupling,), chain.model)
    verdicts = extension_mono_check(chain, ext, args.method)
    status = _worst(v.status for v in verdicts)
    payload = {
        "extension": ext.to_json(),
        "status": status.value,
        "verdicts": [v.to_json() for v in verdicts],
    }
    return payload, _status_code(status)


def cmd_basis(args, chain):
    S = _spin_arg(args.sector) if args.sector else max_total_spin(chain)
    lines = [d.dump() for d in enumerate_hw_basis(chain, S)]
    return {"S_doubled": S.doubled, "count": len(lines), "diagrams": lines}, EXIT_OK


def cmd_sweep_t(args, chain=None):
    ts = np.linspace(args.t_min, args.t_max, args.steps)
    rows = []
    for t, rep in biquadratic_sweep(args.L, ts, args.method):
        rows.append({"t": t, "status": rep.status.value, "table": rep.table.to_json()})
    worst = _worst(Status(r["status"]) for r in rows)
    return {"L": args.L, "sweep": rows, "status": worst.value}, EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "foel": cmd_foel,
    "gap": cmd_gap,
    "below": cmd_below,
    "mono": cmd_mono,
    "basis": cmd_basis,
    "sweep-t": cmd_sweep_t,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="foel", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, chain=True):
        if chain:
            sp.add_argument("--chain", required=True, help="chain spec JSON file")
        sp.add_argument("--method", default="auto", choices=["auto", "dense", "sector", "power"])
        sp.add_argument("--out", default="json", choices=["json", "csv"])
        sp.add_argument("--cache", default="off", choices=["on", "off"])

    s = sub.add_parser("spectrum", help="lowest energy per total spin")
    common(s)
    s.add_argument("--sector", default="all", help='"all" or a spin such as 3/2')

    common(sub.add_parser("foel", help="check the ordering of sector minima"))
    common(sub.add_parser("gap", help="energy of the first spin-lowered sector"))

    s = sub.add_parser("below", help="all highest-weight energies below a threshold")
    common(s)
    s.add_argument("--energy", type=float, required=True)

    s = sub.add_parser("mono", help="compare the chain with a longer one")
    common(s)
    s.add_argument("--extension", help="chain file of the longer chain")
    s.add_argument("--append", default="1/2", help="spin appended when no extension file is given")
    s.add_argument("--coupling", type=float, default=1.0)

    s = sub.add_parser("basis", help="dump the arc basis of one sector")
    common(s)
    s.add_argument("--sector", help="total spin (default: the maximum)")

    s = sub.add_parser("sweep-t", help="ordering verdicts of spin-1 chains with a biquadratic term")
    common(s, chain=False)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--t-min", type=float, default=0.0)
    s.add_argument("--t-max", type=float, default=0.6)
    s.add_argument("--steps", type=int, default=61)
    return p


def _csv(command: str, payload: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command in ("spectrum", "foel"):
        w.writerow(["S_doubled", "dimension", "energy", "method"])
        for r in payload["table"]:
            w.writerow([r["S_doubled"], r["dim"], repr(r["energy"]), r["method"]])
    elif command == "below":
        w.writerow(["S_doubled", "energy"])
        for r in payload["levels"]:
            w.writerow([r["S_doubled"], repr(r["energy"])])
    elif command == "sweep-t":
        w.writerow(["t", "status"])
        for r in payload["sweep"]:
            w.writerow([repr(r["t"]), r["status"]])
    elif command == "gap":
        w.writerow(["gap"])
        w.writerow([repr(payload["gap"])])
    elif command == "basis":
        w.writerow(["diagram"])
        for line in payload["diagrams"]:
            w.writerow([line])
    else:
        w.writerow(["label", "status", "e_small", "e_large"])
        for v in payload["verdicts"]:
            w.writerow([v["label"], v["status"], v["e_small"], v["e_large"]])
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        chain = load_chain(args.chain) if getattr(args, "chain", None) else None
        payload, code = COMMANDS[args.command](args, chain)
    except (FoelError, ChainFileError, OSError, ValueError) as exc:
        kind = "not admissible" if isinstance(exc, NotAdmissible) else type(exc).__name__
        err = {"error": kind, "message": str(exc), "command": args.command}
        print(json.dumps(err), file=sys.stderr)
        return EXIT_ERROR
    elapsed = time.perf_counter() - start
    if args.out == "csv":
        sys.stdout.write(_csv(args.command, payload))
    else:
        report = {
            "command": args.command,
            "fingerprint": chain.fingerprint() if chain is not None else None,
            "version": __version__,
            "timings": {"total_s": elapsed},
            "result": payload,
        }
        print(json.dumps(report, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
