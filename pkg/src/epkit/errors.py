"""Exception types shared across the package."""


class EpkitError(Exception):
    """Base class for all epkit errors."""


class DegreeZero(EpkitError):
    """Root finding requested on a constant polynomial."""


class NotAnEigenvalue(EpkitError):
    """Probe value is farther from the spectrum than the cluster radius."""


class SingularS(EpkitError):
    """The mixing matrix of the two-level model is (numerically) singular."""


class AngleSingularity(EpkitError):
    """Closed-form EP eigenvector undefined at this angle combination."""


class DegenerateSlopes(EpkitError):
    """EP location formula needs distinct perturbation eigenvalues."""


class RealParametersRequired(EpkitError):
    """Operation is only defined for a system with real parameters."""


class NearSingular(EpkitError):
    """Linear solve too close to a pole (condition estimate above threshold)."""


class NotAnEP(EpkitError):
    """Coalescence conditions not satisfied at the supplied point."""


class FormMismatch(EpkitError):
    """The two closed forms of the EP amplitude ratio disagree (wrong root)."""


class NoConvergence(EpkitError):
    """Iterative search exhausted its iteration budget."""


class ConvergedToDegenerate(EpkitError):
    """Search landed on a genuine degeneracy (full eigenspace), not an EP."""


class TrackingAmbiguous(EpkitError):
    """Branch matching stayed ambiguous down to the refinement floor."""


class FitUnstable(EpkitError):
    """Log-log exponent fit residual exceeded its acceptance threshold."""


class DefectiveBasis(EpkitError):
    """Biorthogonal expansion requested at a (near-)defective point."""


class DegenerateFamily(EpkitError):
    """Eliminant degenerates; the family has no well-posed resultant."""


class ConfigError(EpkitError):
    """Invalid or incomplete run configuration."""
