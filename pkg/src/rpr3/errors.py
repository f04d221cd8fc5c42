"""Exception hierarchy shared by all modules."""


class KinematicsError(ValueError):
    """Base class for domain errors raised by rpr3."""


class InvalidDesign(KinematicsError):
    pass


class Unreachable(KinematicsError):
    """A leg cannot reach its platform joint (|A_iC_i| < L_i)."""

    def __init__(self, leg, distance=None, offset=None):
        self.leg = leg
        msg = f"leg {leg + 1} unreachable"
        if distance is not None:
            msg += f" (|AC| = {distance:.6g} < L = {offset:.6g})"
        super().__init__(msg)


class ParallelLegs12(KinematicsError):
    """Legs 1 and 2 are parallel; the direct-kinematics coefficients are undefined."""


class InconsistentState(KinematicsError):
    """Joint state does not close the kinematic loop for the given pose."""


class EmptyRegion(KinematicsError):
    pass


class DegenerateEpsilon(KinematicsError):
    pass


class NoRealRoots(KinematicsError):
    """The self-motion angle equation has no real solution for a branch."""


class InfiniteFamily(KinematicsError):
    """Every joint angle solves the self-motion equation for this branch."""


class ConditionsNotMet(KinematicsError):
    pass


class NotPaminsaDesign(KinematicsError):
    pass


class NoConvergence(KinematicsError):
    pass


class NearSingular(KinematicsError):
    pass


class EmptyContours(KinematicsError):
    pass
