from packages.seqform.recurrence import RecurrenceConstraint, RecurrenceError, solve_recurrence
from packages.seqform.roots import NonCyclotomicRoot, RootOfUnityScalar, cyclotomic_roots
from packages.seqform.sequence import (
    SequenceClosedForm,
    Term,
    alternating,
    constant,
    cos_seq,
    eval_seq,
    period,
    real_form,
    seq_equal_span,
    seq_mul,
    seq_shift,
    sin_seq,
)

__all__ = [
    "NonCyclotomicRoot",
    "RecurrenceConstraint",
    "RecurrenceError",
    "RootOfUnityScalar",
    "SequenceClosedForm",
    "Term",
    "alternating",
    "constant",
    "cos_seq",
    "cyclotomic_roots",
    "eval_seq",
    "period",
    "real_form",
    "seq_equal_span",
    "seq_mul",
    "seq_shift",
    "sin_seq",
    "solve_recurrence",
]
