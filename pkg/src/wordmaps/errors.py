"""Exception types shared across the package."""


class WordMapsError(Exception):
    """Base class for every domain error raised by this package."""

    code = "domain_error"


class FieldError(WordMapsError):
    code = "field_error"


class NonPrime(FieldError):
    code = "non_prime"


class DegreeZero(FieldError):
    code = "degree_zero"


class FieldTooLarge(FieldError):
    code = "field_too_large"


class LinAlgError(WordMapsError):
    code = "linalg_error"


class Singular(LinAlgError):
    code = "singular"


class AmbientMismatch(LinAlgError):
    code = "ambient_mismatch"


class UnionCoversSpace(LinAlgError):
    code = "union_covers_space"


class DependentInput(LinAlgError):
    code = "dependent_input"


class NotScalarOnW(LinAlgError):
    code = "not_scalar_on_w"


class NotComplement(LinAlgError):
    code = "not_complement"


class WordError(WordMapsError):
    code = "word_error"


class DimensionMismatch(WordError):
    code = "dimension_mismatch"


class SingularInput(WordError):
    code = "singular_input"


class NotReduced(WordError):
    code = "not_reduced"


class AlreadyStrong(WordError):
    code = "already_strong"


class TooShort(WordError):
    code = "too_short"


class SingularWord(WordError):
    code = "singular_word"


class NotInvertible(WordMapsError):
    code = "not_invertible"


class HypothesesFail(WordMapsError):
    """The inputs fall outside the range where the witness construction applies."""

    code = "hypotheses_fail"

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class AvoidanceImpossible(WordMapsError):
    code = "avoidance_impossible"


class IndependenceBroken(WordMapsError):
    code = "independence_broken"


class CertificateViolated(WordMapsError):
    code = "certificate_violated"


class DeterminantUnfixable(WordMapsError):
    code = "determinant_unfixable"


class VerificationFailed(WordMapsError):
    code = "verification_failed"


class GroupTooLarge(WordMapsError):
    code = "group_too_large"


class TrivialWord(WordMapsError):
    code = "trivial_word"


class EmptyWord(WordMapsError):
    code = "empty_word"


class NotInGroup(WordMapsError):
    code = "not_in_group"


class BudgetExceeded(WordMapsError):
    code = "budget_exceeded"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class LevelDecrease(WordMapsError):
    code = "level_decrease"


class LevelMismatch(WordMapsError):
    code = "level_mismatch"


class ParseError(WordMapsError):
    code = "parse_error"


class ValidationError(WordMapsError):
    code = "validation_error"
