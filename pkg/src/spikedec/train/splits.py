"""Leave-signers-out K-fold splitting."""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError


def kfold_split(signer_ids, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Partition sample indices into K folds by signer.

    ``signer_ids[i]`` is the signer of sample i.  Signers are shuffled and cut
    into K groups whose sizes differ by at most one; fold j tests on group j's
    samples and trains on everything else, so no signer ever appears on both
    sides of a fold.
    """
    if k < 2:
        raise ValidationError("need at least 2 folds")
    signer_ids = np.asarray(signer_ids)
    signers = np.unique(signer_ids)
    if len(signers) < k:
        raise ValidationError(f"{len(signers)} signers cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    shuffled = rng.permutation(signers)
    groups = np.array_split(shuffled, k)
    folds = []
    for group in groups:
        test_mask = np.isin(signer_ids, group)
        folds.append((np.nonzero(~test_mask)[0], np.nonzero(test_mask)[0]))
    return folds
