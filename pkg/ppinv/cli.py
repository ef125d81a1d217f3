import argparse
import logging
import sys

from . import __version__
from .certificate import VerificationException, dumps
from .family import ParameterException, get_families
from .gf_core import FieldException
from .poly_eval import NotAPermutationException, lagrange_interpolate, value_table
from .selftest import run_selftest

logger = logging.getLogger(__name__)


class UsageException(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageException("{}: {}".format(self.prog, message))


def print_obj(obj):
    print(dumps(obj))


COMMON = (
    ("--debug", {"default": False, "action": "store_true"}),
    ("--timings", {"default": False, "action": "store_true"}),
    ("--jobs", {"type": int, "default": None}),
)

_groups = {}


def _command_parser(names):
    current = subparsers
    for name in names[:-1]:
        if name not in _groups:
            group = current.add_parser(name)
            _groups[name] = group.add_subparsers(dest=name + "_command", required=True)
        current = _groups[name]
    return current.add_parser(names[-1])


def register_command(command_name, *parameters, per_family=None):
    def handler(fn):
        subparser = _command_parser(command_name.split())
        leaves = [subparser]
        if per_family:
            nested = subparser.add_subparsers(dest="family_name", required=True)
            leaves = []
            for family in get_families():
                if per_family == "add_sweep_arguments" and not family.sweepable:
                    continue
                leaf = nested.add_parser(family.identifier, help=family.verbose_name)
                getattr(family, per_family)(leaf)
                leaf.set_defaults(family=family)
                leaves.append(leaf)
        for leaf in leaves:
            leaf.set_defaults(func=fn)
            for param_name, kwargs in COMMON + parameters:
                leaf.add_argument(param_name, **kwargs)
        return fn

    return handler


parser = ArgumentParser(
    prog="ppinv", description="verify and invert permutation polynomials"
)
parser.add_argument("--version", action="version", version=__version__)
subparsers = parser.add_subparsers(dest="command", required=True)


@register_command("verify", per_family="add_arguments")
def verify(args):
    certificate = args.family.from_args(args).certify()
    certificate.check()
    print_obj(certificate.to_dict(with_timing=args.timings))


@register_command("sweep", per_family="add_sweep_arguments")
def sweep(args):
    result = args.family.sweep(args, args.jobs)
    print_obj(result)
    if result["failures"]:
        raise VerificationException(
            {
                "reason": "{} sweep had {} failures".format(
                    result["family"], result["failures"]
                ),
                "summary": result["summary"],
            }
        )


@register_command(
    "invert",
    ("--dense", {"default": False, "action": "store_true"}),
    per_family="add_arguments",
)
def invert(args):
    family = args.family.from_args(args)
    table = family.inverse_table()
    result = {
        "family": family.identifier,
        "field": family.ctx.spec,
        "modulus": list(family.ctx.modulus),
        "parameters": family.params.to_json(),
        "inverse": table.to_json(),
    }
    if args.dense:
        result["dense"] = lagrange_interpolate(table).to_json()
    print_obj(result)


@register_command(
    "export sbox",
    ("--out", {"default": "-", "help": "output file, - for standard output"}),
    ("--inverse", {"default": False, "action": "store_true"}),
    per_family="add_arguments",
)
def export_sbox(args):
    family = args.family.from_args(args)
    if args.inverse:
        table = family.inverse_table()
    else:
        table = value_table(family.forward(), family.ctx)
    lines = table.sbox_lines()
    if args.out == "-":
        sys.stdout.write("\n".join(lines) + "\n")
        return
    with open(args.out, "w") as f:
        f.write("\n".join(lines) + "\n")
    logger.info("wrote %d entries to %s", len(lines), args.out)
    print_obj(
        {
            "family": family.identifier,
            "field": family.ctx.spec,
            "modulus": list(family.ctx.modulus),
            "entries": len(lines),
            "bijective": table.bijective,
            "out": args.out,
        }
    )


@register_command(
    "selftest",
    ("--samples", {"type": int, "default": None}),
    ("--seed", {"type": int, "default": None}),
)
def selftest(args):
    records = list(run_selftest(args.samples, args.seed, args.jobs))
    passed = all(record["passed"] for record in records)
    print_obj({"checks": records, "passed": passed})
    if not passed:
        failed = sorted({r["check"] for r in records if not r["passed"]})
        raise VerificationException({"reason": "failed checks: " + ", ".join(failed)})


def run(argv=None) -> int:
    try:
        args = parser.parse_args(argv)
    except UsageException as e:
        print(e, file=sys.stderr)
        return 1
    logging.basicConfig()
    logging.getLogger().setLevel(level=logging.DEBUG if args.debug else logging.INFO)

    try:
        args.func(args)
    except VerificationException as e:
        logger.exception("verification failed")
        print(dumps(e.certificate), file=sys.stderr)
        return 2
    except (FieldException, ParameterException, NotAPermutationException) as e:
        print("ppinv: error: {}".format(e), file=sys.stderr)
        return 1
    except ValueError as e:
        logger.debug("invalid input", exc_info=True)
        print("ppinv: error: {}".format(e), file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())
