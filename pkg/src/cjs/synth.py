"""Synthetic cross-domain benchmark generator.

Every class gets a random low-dimensional subspace; source samples are
drawn inside it and target samples inside the same subspace rotated by a
fixed angle within a per-class 2r-dimensional frame, plus isotropic noise.
Ground-truth labels are attached to both domains.

The rotation partners are not arbitrary: the mean-carrying direction of
each class rotates partly toward the *next* class's center direction and
partly toward a fresh class-exclusive direction. Together with class
centers sharing a common cone axis, this reproduces the shift pattern where
class regions move toward each other across domains (the relation between
two classes differs between domains), which is what breaks plain
source-only classifiers while leaving the per-class subspace identity
intact. The class geometry constants below were calibrated so that, at the
documented benchmark settings, a source-only linear SVM degrades sharply
while subspace identification stays easy.
"""
from __future__ import annotations

import numpy as np

from .data import DomainDataset
from .errors import BadDimensions
from .linalg import orthonormal_basis

# Class-geometry constants (see module docstring).
COEF_MEAN = 7.0        # coefficient mean along each class's center direction
COEF_STD = 1.0         # isotropic coefficient spread over the subspace
CONE = 0.93            # squared cosine weight tying class centers to a shared axis
CONFUSION_MIX = 0.62   # fraction of the mean's rotation aimed at the next class


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _orthogonalize(v: np.ndarray, against: list[np.ndarray],
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """Unit residual of v against a set of orthonormal directions.

    When the residual degenerates (v already inside the span, e.g. a single
    class pointing at itself) a random direction is substituted.
    """
    original_norm = np.linalg.norm(v)
    for u in against:
        v = v - u * (u @ v)
    if np.linalg.norm(v) <= 1e-8 * max(1.0, original_norm):
        if rng is None:
            raise ValueError("degenerate direction")
        return _orthogonalize(rng.normal(size=v.shape[0]), against, rng)
    return _unit(v)


def synth_generate(n_classes: int, dim: int, subspace_dim: int,
                   samples_per_class: int, rotation_angle: float,
                   noise: float, seed: int) -> tuple[DomainDataset, DomainDataset]:
    """Generate paired source/target datasets with a controlled domain shift.

    Parameters
    ----------
    n_classes, dim, subspace_dim : class count, ambient dimension, and the
        per-class subspace dimension r (the rotation needs a 2r frame, so
        2r plus the class-exclusive directions must fit inside ``dim``).
    samples_per_class : samples per class in each domain.
    rotation_angle : angle in [0, pi/2] between each source class subspace
        and its target counterpart; 0 means no shift.
    noise : isotropic noise scale added to target samples.
    seed : RNG seed; the generator is deterministic given all arguments.

    Returns
    -------
    (source, target) labeled DomainDatasets.
    """
    if n_classes < 1 or samples_per_class < 1:
        raise ValueError("n_classes and samples_per_class must be >= 1")
    if subspace_dim < 1 or subspace_dim >= dim:
        raise BadDimensions(
            f"need 1 <= subspace_dim < dim, got r={subspace_dim}, d={dim}")
    needed = (n_classes + 1) + n_classes * (2 * subspace_dim - 1)
    if needed > dim:
        raise BadDimensions(
            f"dim={dim} too small for {n_classes} classes with "
            f"subspace_dim={subspace_dim} (needs >= {needed} dimensions)")
    if not 0.0 <= rotation_angle <= np.pi / 2:
        raise ValueError("rotation_angle must lie in [0, pi/2]")
    if noise < 0.0:
        raise ValueError("noise must be >= 0")

    rng = np.random.default_rng(seed)
    r = subspace_dim

    # Shared cone axis plus per-class offsets define the center directions.
    frame = orthonormal_basis(rng.normal(size=(dim, n_classes + 1)))
    axis, offsets = frame[:, 0], frame[:, 1:]
    centers = [_unit(np.sqrt(CONE) * axis + np.sqrt(1.0 - CONE) * offsets[:, c])
               for c in range(n_classes)]

    # Source frames: center direction first, then class-exclusive spread
    # directions (orthogonal to everything used so far).
    used: list[np.ndarray] = []
    source_frames = []
    for c in range(n_classes):
        cols = [centers[c]]
        while len(cols) < r:
            cols.append(_orthogonalize(rng.normal(size=dim), cols + used, rng))
        source_frames.append(np.stack(cols, axis=1))
        used += cols[1:]

    # Rotation partners: the mean-carrying column rotates toward a mix of
    # the next class's center and a fresh exclusive direction.
    partner_frames = []
    for c in range(n_classes):
        u_cols = [source_frames[c][:, j] for j in range(r)]
        toward_next = _orthogonalize(centers[(c + 1) % n_classes], u_cols, rng)
        exclusive = _orthogonalize(rng.normal(size=dim),
                                   u_cols + [toward_next] + used, rng)
        first = _unit(CONFUSION_MIX * toward_next
                      + np.sqrt(1.0 - CONFUSION_MIX**2) * exclusive)
        cols = [first]
        while len(cols) < r:
            cols.append(_orthogonalize(rng.normal(size=dim),
                                       u_cols + cols + used, rng))
        partner_frames.append(np.stack(cols, axis=1))
        used += cols

    mean_coef = np.zeros(r)
    mean_coef[0] = COEF_MEAN

    src_blocks, tgt_blocks, src_labels, tgt_labels = [], [], [], []
    cos_a, sin_a = np.cos(rotation_angle), np.sin(rotation_angle)
    for c in range(n_classes):
        coefs = mean_coef[:, None] + COEF_STD * rng.normal(
            size=(r, samples_per_class))
        src_blocks.append(source_frames[c] @ coefs)
        src_labels.append(np.full(samples_per_class, c))
        target_frame = cos_a * source_frames[c] + sin_a * partner_frames[c]
        coefs = mean_coef[:, None] + COEF_STD * rng.normal(
            size=(r, samples_per_class))
        tgt_blocks.append(target_frame @ coefs
                          + noise * rng.normal(size=(dim, samples_per_class)))
        tgt_labels.append(np.full(samples_per_class, c))

    n_total = n_classes * samples_per_class
    perm_s = rng.permutation(n_total)
    perm_t = rng.permutation(n_total)
    source = DomainDataset(
        features=np.hstack(src_blocks)[:, perm_s],
        labels=np.concatenate(src_labels)[perm_s],
        domain_tag="synth-source")
    target = DomainDataset(
        features=np.hstack(tgt_blocks)[:, perm_t],
        labels=np.concatenate(tgt_labels)[perm_t],
        domain_tag="synth-target")
    return source, target
