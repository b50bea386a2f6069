"""Dense LP engine: program containers, two-phase simplex, certificate audit."""

from mpssnet.lp.certificate import CertificateReport, check_certificate
from mpssnet.lp.program import (
    LinearProgram,
    LpSolution,
    Relation,
    Status,
    Tolerances,
    dump_lp,
    load_lp,
    make_lp,
)
from mpssnet.lp.simplex import solve

__all__ = [
    "CertificateReport",
    "LinearProgram",
    "LpSolution",
    "Relation",
    "Status",
    "Tolerances",
    "check_certificate",
    "dump_lp",
    "load_lp",
    "make_lp",
    "solve",
]
