"""
Quaternion arithmetic for SU(2) and SO(3) elements.

Quaternions are stored as ``(w, x, y, z)`` arrays; the last axis holds the
components so every helper works on single elements and on stacks alike.
"""
import numpy as np


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product ``a * b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def conjugate(a: np.ndarray) -> np.ndarray:
    """Quaternion conjugate, the inverse of a unit quaternion."""
    a = np.asarray(a, dtype=float)
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def norm(a: np.ndarray) -> np.ndarray:
    return np.linalg.norm(np.asarray(a, dtype=float), axis=-1)


def from_axis_angle(axis, angle) -> np.ndarray:
    """Unit quaternion ``(cos angle, sin angle * axis)`` for a unit ``axis``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis, axis=-1, keepdims=True)
    angle = np.asarray(angle, dtype=float)[..., None]
    vector = np.sin(angle) * axis
    scalar = np.broadcast_to(np.cos(angle), vector.shape[:-1] + (1,))
    return np.concatenate([scalar, vector], axis=-1)


def su2_angle(q: np.ndarray) -> np.ndarray:
    """Class angle in ``[0, pi]`` of an SU(2) element."""
    q = np.asarray(q, dtype=float)
    return np.arctan2(np.linalg.norm(q[..., 1:], axis=-1), q[..., 0])


def so3_angle(q: np.ndarray) -> np.ndarray:
    """Rotation angle in ``[0, pi]`` of the rotation represented by ``q`` (sign ignored)."""
    q = np.asarray(q, dtype=float)
    return 2.0 * np.arctan2(np.linalg.norm(q[..., 1:], axis=-1), np.abs(q[..., 0]))


def canonical_sign(q: np.ndarray) -> np.ndarray:
    """Representative of ``{q, -q}`` whose first non-zero component is positive."""
    q = np.array(q, dtype=float)
    flat = q.reshape(-1, 4)
    for row in flat:
        nonzero = np.flatnonzero(row)
        if nonzero.size and row[nonzero[0]] < 0:
            row *= -1.0
    return flat.reshape(q.shape)


def random_unit(count: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unit quaternions (normalised Gaussian 4-vectors)."""
    q = rng.standard_normal((count, 4))
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def shoemake(u: np.ndarray) -> np.ndarray:
    """Map points of the unit cube ``[0, 1)^3`` to unit quaternions, preserving uniformity."""
    u = np.asarray(u, dtype=float)
    u1, u2, u3 = u[..., 0], u[..., 1], u[..., 2]
    r1 = np.sqrt(1.0 - u1)
    r2 = np.sqrt(u1)
    return np.stack(
        [
            r2 * np.cos(2.0 * np.pi * u3),
            r1 * np.sin(2.0 * np.pi * u2),
            r1 * np.cos(2.0 * np.pi * u2),
            r2 * np.sin(2.0 * np.pi * u3),
        ],
        axis=-1,
    )
