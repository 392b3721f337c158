"""Exception hierarchy shared by all modules."""


class MeshDftError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(MeshDftError, ValueError):
    """An argument value is malformed or out of range."""


class DimensionError(MeshDftError, ValueError):
    """Shapes, ranks, or axis indices do not line up."""


class DecompositionError(MeshDftError):
    """A tensor cannot be block-decomposed over the requested core grid."""


class PlanError(MeshDftError):
    """A transform plan cannot be built for the requested configuration."""


class UnsupportedOperationError(MeshDftError):
    """The operation is well-formed but not available in this configuration."""


class CommunicationError(MeshDftError):
    """A collective was invoked with inconsistent arguments."""


class ProtocolError(MeshDftError):
    """Cores disagreed about the next collective; the program would deadlock."""


class AssemblyError(MeshDftError):
    """Per-core blocks cannot be stitched back into a global tensor."""
