import numpy as np

from qndsim import StateVector
from qndsim.dynamics import JointUnitaryTensor


def haar_unitary(dim, rng):
    """Haar-distributed unitary via QR with phase-fixed diagonal."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_joint_tensor(space, rng):
    dim = space.dimension
    s, p = space.shape
    return JointUnitaryTensor(haar_unitary(dim, rng).reshape(s, p, s, p), space)


def random_state(space, rng):
    amps = rng.normal(size=space.dimension) + 1j * rng.normal(size=space.dimension)
    return StateVector.normalized(amps, space)
