import logging
import time
from concurrent.futures import ProcessPoolExecutor

from .certificate import PermutationCertificate, VerificationException
from .gf_core import FieldCtx, make_field, parse_field_spec, split_prime_power
from .poly_eval import FieldMap, brute_inverse, value_table
from .settings import settings

logger = logging.getLogger(__name__)


class ParameterException(ValueError):
    """Raised when parameters violate a family's standing hypotheses."""


def field_for(q: int, n: int) -> FieldCtx:
    p, e = split_prime_power(q)
    return make_field(p, e, n)


def field_from_args(args, n=None):
    """
    The field named by --field p:e:n, or by --q with extension degree n (args.n
    when the family leaves n open).
    """
    if getattr(args, "field", None):
        p, e, field_n = parse_field_spec(args.field)
        if n is not None and field_n != n:
            raise ParameterException(
                "the family needs n = {}, --field {} has n = {}".format(
                    n, args.field, field_n
                )
            )
        return make_field(p, e, field_n)
    return field_for(args.q, n if n is not None else args.n)


def run_tasks(worker, tasks, jobs=None):
    """
    Map ``worker`` over ``tasks``, in a process pool when more than one job is
    requested. Results come back in task order either way.
    """
    tasks = list(tasks)
    jobs = jobs or settings.jobs
    logger.debug("running %d tasks with %d job(s)", len(tasks), jobs)
    if jobs <= 1 or len(tasks) < 2:
        return [worker(task) for task in tasks]
    chunksize = max(1, len(tasks) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks, chunksize=chunksize))


class Stopwatch:
    def __init__(self):
        self.start = time.perf_counter()

    def stop(self, certificate):
        certificate.wall_time = round(time.perf_counter() - self.start, 6)
        return certificate


class PermutationFamily:
    """
    One family of permutation polynomials as seen from the command line: how its
    parameters are declared and parsed, and how an instance is certified, inverted
    and exported.
    """

    identifier = ""
    verbose_name = ""
    sweepable = False

    def __init__(self, params):
        self.params = params

    @property
    def ctx(self) -> FieldCtx:
        return self.params.ctx

    @staticmethod
    def add_field_arguments(parser):
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument("--q", type=int, help="subfield size q")
        group.add_argument("--field", help="the whole field as p:e:n or p^e^n")

    @classmethod
    def add_arguments(cls, parser):
        cls.add_field_arguments(parser)

    @classmethod
    def add_sweep_arguments(cls, parser):
        cls.add_arguments(parser)

    @classmethod
    def from_args(cls, args) -> "PermutationFamily":
        raise NotImplementedError

    def certify(self) -> PermutationCertificate:
        raise NotImplementedError

    def forward(self) -> FieldMap:
        raise NotImplementedError

    def inverse_map(self) -> FieldMap:
        raise NotImplementedError

    def inverse_table(self):
        table = value_table(self.inverse_map(), self.ctx)
        if not table.same_as(brute_inverse(self.forward(), self.ctx)):
            raise VerificationException(self.certify().to_dict())
        return table

    @classmethod
    def sweep(cls, args, jobs=None) -> dict:
        raise NotImplementedError


def get_families():
    from .family_aml import AmlFamily
    from .family_cubic_cpp import CubicCppFamily
    from .family_quadratic import QuadraticFamily

    return [
        QuadraticFamily,
        CubicCppFamily,
        AmlFamily,
    ]
