"""Pixel counts and reference FR values of the per-class frequency-ratio table
(13 conditioning factors), transcribed row by row.

Each row: (factor, class label, class pixels, landslide pixels, reference FR).
"""

FR_TABLE = [
    ('slope', '0 – 5.08', 2548859, 145249, 1.0),
    ('slope', '5.08- 11.44', 1100810, 63001, 1.01),
    ('slope', '11.44- 18.56', 215571, 11664, 0.95),
    ('slope', '18.56- 27.72', 20050, 1092, 0.96),
    ('slope', '27.72- 64.61', 1236, 73, 1.04),
    ('elevation', '7 - 122', 2506131, 141193, 0.99),
    ('elevation', '122 - 244', 829189, 33465, 0.71),
    ('elevation', '244 - 399', 379450, 30408, 1.41),
    ('elevation', '399 - 585', 154881, 14034, 1.59),
    ('elevation', '585- 1,021', 16878, 1979, 2.06),
    ('aspect', '-69.34', 687024, 36492, 0.93),
    ('aspect', '68.34 - 141.92', 725869, 42026, 1.02),
    ('aspect', '141.92 -215.51', 698690, 40150, 1.01),
    ('aspect', '215.51 -284.55', 1040659, 59760, 1.01),
    ('aspect', '284.55 -358.44', 740577, 42875, 1.02),
    ('curvature', '-8.71', 44, 4, 1.6),
    ('curvature', '-0.67', 79828, 4487, 0.99),
    ('curvature', '-0.41', 3805633, 216529, 1.0),
    ('curvature', '0.13- 0.81', 1016, 58, 1.0),
    ('curvature', '0.81 - 11.88', 6, 1, 2.93),
    ('spi', '0 -428', 2055576, 118525, 1.01),
    ('spi', '428 - 2222', 735465, 40984, 0.98),
    ('spi', '2222 - 4390', 400221, 21919, 0.96),
    ('spi', '4390 – 7317', 228237, 12808, 0.99),
    ('spi', '7317 – 13822', 467030, 26843, 1.01),
    ('twi', '1.84 - 2,519.8', 3651684, 202259, 0.97),
    ('twi', '2,519.8 - 6,296.9', 162984, 13270, 1.43),
    ('twi', '6,296.9 - 8,744.9', 56067, 4043, 1.27),
    ('twi', '8,744.9 - 12,312.1', 12751, 1310, 1.81),
    ('twi', '12,312.1 - 17,837.8', 3043, 197, 1.14),
    ('drainage_distance', '0 - 454.39', 1108365, 82703, 1.31),
    ('drainage_distance', '454.39 - 940.12', 1050460, 62803, 1.05),
    ('drainage_distance', '940.12 - 1,457.19', 905290, 41466, 0.81),
    ('drainage_distance', '1,472.19 - 2,052.60', 600704, 26170, 0.77),
    ('drainage_distance', '2,052.60 - 3,995.52', 233206, 8343, 0.63),
    ('drainage_density', '0 - 30.97', 1856226, 93810, 0.89),
    ('drainage_density', '30.97 - 79.37', 994850, 59827, 1.06),
    ('drainage_density', '79.37 - 145.19', 603426, 39177, 1.14),
    ('drainage_density', '145.19 - 243.93', 340732, 26762, 1.38),
    ('drainage_density', '243.93 - 493.67', 96632, 1909, 0.35),
    ('road_distance', '0 - 2,026.07', 1276117, 72788, 1.0),
    ('road_distance', '2,026.07 - 4,389.83', 1142515, 71979, 1.11),
    ('road_distance', '4,389.83 - 7,091.27', 797858, 27129, 0.6),
    ('road_distance', '7,091.27 - 10,738.21', 417186, 25196, 1.06),
    ('road_distance', '10,738.21 - 17,221.67', 264349, 24393, 1.62),
    ('land_use', 'Water Body', 291745, 20372, 1.23),
    ('land_use', 'Settlement Area', 2088060, 131625, 1.11),
    ('land_use', 'Vegetation', 1518220, 69488, 0.81),
    ('rainfall', '568 - 862', 712204, 41976, 1.04),
    ('rainfall', '862 - 1,155', 891637, 56904, 1.13),
    ('rainfall', '1,155 - 1,404', 1009565, 93087, 1.63),
    ('rainfall', '1,404 - 1,670', 681406, 20264, 0.53),
    ('rainfall', '1,670 - 2,087', 571576, 6509, 0.2),
    ('cut_fill', 'Net Gain', 1424648, 85557, 1.05),
    ('cut_fill', 'Unchanged', 398127, 10185, 0.45),
    ('cut_fill', 'Net Loss', 2058193, 125301, 1.07),
    ('ndvi', '-0.144 - 0.183', 159981, 11901, 1.31),
    ('ndvi', '0.183 - 0.261', 555897, 38034, 1.2),
    ('ndvi', '0.261 - 0.321', 1137134, 68588, 1.06),
    ('ndvi', '0.321 - 0.377', 1271794, 68171, 0.94),
    ('ndvi', '0.377 - 0.541', 773218, 34791, 0.79),
]

# (zone, pixels, area km2, area %) for the five-zone susceptibility map.
# The area table omits the very-high row; its count and share come from the text.
ZONE_TABLE = [
    ("very low", 363867, 327.48, 9.82),
    ("low", 652020, 586.818, 17.61),
    ("moderate", 1069399, 962.459, 28.88),
    ("high", 1007582, 906.824, 27.21),
    ("very high", 610667, None, 16.49),
]
CELL_SIZE = 30.0
