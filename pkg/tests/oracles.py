"""Hand-built fixtures whose expected values were summed by hand."""
from types import SimpleNamespace

import numpy as np

from planvent.comfort import ComfortBand


def penalty_series():
    """Two zones over two days with a hand-summed penalty.

    Band: day 1 [20, 26], day 2 [21, 27]. The bedroom is occupied all day
    (factor 1); the living room only in slots 13-15 and 19-24, i.e. hours
    12-14 and 18-23 of each day (factor 1, otherwise 0.3).

    bedroom, day 1: hours 0-3 at 18 (4 x 2 below), hour 12 at 28 (2 above),
        hour 15 exactly on the upper edge (0)                     -> 10.0
    bedroom, day 2: hour 5 at 19.5 (1.5 below), hour 6 at 27.5 (0.5)  -> 2.0
    living, day 1: hour 0 at 17 (3 below x 0.3), hour 13 at 30 (4)    -> 4.9
    living, day 2: hour 2 at 29 (2 above x 0.3), hour 20 at 20 (1),
        hour 23 at 27.5 (0.5)                                        -> 2.1
    total 19.0; days 14.9 and 4.1; bedroom 12.0, living room 7.0
    """
    bed = np.r_[np.full(24, 25.0), np.full(24, 24.0)]
    bed[0:4] = 18.0
    bed[12] = 28.0
    bed[15] = 26.0
    bed[24 + 5] = 19.5
    bed[24 + 6] = 27.5
    liv = np.full(48, 22.0)
    liv[0] = 17.0
    liv[13] = 30.0
    liv[24 + 2] = 29.0
    liv[24 + 20] = 20.0
    liv[24 + 23] = 27.5
    series = SimpleNamespace(zone_ids=("Bedroom1", "LivingRoom1"),
                             zone_functions=("Bedroom", "LivingRoom"),
                             air_temp=np.vstack([bed, liv]))
    band = ComfortBand(np.array([20.0, 21.0]), np.array([26.0, 27.0]))
    expected = {"total": 19.0, "per_day": (14.9, 4.1),
                "per_space": {"Bedroom1": 12.0, "LivingRoom1": 7.0}}
    return series, band, expected


#: reference comparison table rows: design, penalties under A, B, C, D, the reference, printed Imp%
TABLE_ROWS = (
    (120, (19681.5, 20191.3, 19656.0, 20148.5), 21216.0, 7.4),
    (125, (21166.0, 21675.2, 21172.6, 21425.7), 22940.7, 7.7),
    (116, (26787.5, 27322.0, 26805.1, 27352.7), 28627.4, 6.4),
    (114, (27390.4, 27848.3, 27367.8, 27428.7), 28887.7, 5.3),
    (115, (27654.8, 28017.9, 27653.8, 27708.2), 29033.2, 4.8),
    (127, (27324.7, 28089.5, 27140.4, 27484.8), 29473.3, 7.9),
    (117, (28759.9, 29206.3, 28728.6, 28785.2), 30144.9, 4.7),
    (119, (30215.8, 30987.6, 30150.3, 30212.3), 32495.9, 7.2),
)
