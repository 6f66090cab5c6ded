"""hamgen CLI: export molecular qubit Hamiltonians, check bundled fixtures."""
from __future__ import annotations

import argparse
import sys

from .export import bundled_fixture_check, export_by_name, write_fixture
from .molecules import MOLECULES


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hamgen", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    exp = subs.add_parser("export", help="export one molecule to the Hamiltonian file format")
    exp.add_argument("--molecule", required=True, choices=sorted(MOLECULES))
    exp.add_argument("--out", required=True)
    exp.add_argument("--energies", help="expected_energies.json to update", default=None)

    chk = subs.add_parser("check", help="validate bundled fixtures against stored energies")
    chk.add_argument("--dir", required=True)

    args = parser.parse_args(argv)
    if args.command == "export":
        result = export_by_name(args.molecule)
        write_fixture(result, args.out, args.energies)
        print(f"{args.molecule}: {result.n_terms} terms, "
              f"HF {result.hf_energy!r}, FCI {result.fci_energy!r} -> {args.out}")
        return 0
    if args.command == "check":
        report = bundled_fixture_check(args.dir)
        for name, energy, delta in report.checked:
            print(f"{name}: ground energy {energy!r} (delta {delta:.2e}) ok")
        for name, reason in report.failures:
            print(f"FAIL {name}: {reason}")
        return 0 if report.ok else 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
