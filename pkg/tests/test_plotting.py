import numpy as np

from h2trunc.plotting import plot_support, support_mask
from h2trunc.rings import IntZ
from h2trunc.series import BiSeries


def test_support_mask_orientation(tmp_path):
    F = BiSeries.from_terms(IntZ(), 4, 3, {(3, 1): 2, (0, 2): -1})
    mask = support_mask(F)
    assert mask.shape == (3, 4)
    assert mask[1, 3] and mask[2, 0] and mask.sum() == 2
    out = plot_support(F, tmp_path / "f.png", "t", highlight_rows=[1], shade_rows=[(0, 0)])
    assert out.exists() and out.stat().st_size > 0
    assert isinstance(mask, np.ndarray)
