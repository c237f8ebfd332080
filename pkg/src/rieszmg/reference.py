"""Published iteration counts used as comparison columns by the bench runner."""

TABLE1_COLUMNS = (
    "CG",
    "gal-TGM(0,1)", "gal-TGM(1,0)", "gal-TGM(1,1)",
    "gal-V(0,1)", "gal-V(1,0)", "gal-V(1,1)",
    "geo-TGM(0,1)", "geo-TGM(1,0)", "geo-TGM(1,1)",
    "geo-V(0,1)", "geo-V(1,0)", "geo-V(1,1)",
    "s", "PsV(1,1)", "PV(1,1)", "PtV(1,1)", "PC", "PS",
)

# keyed by (alpha, log2(M + 1))
TABLE1 = {
    (1.2, 6): (32, 17, 17, 9, 17, 17, 9, 16, 16, 13, 37, 38, 31, 7, 8, 6, 11, 9, 5),
    (1.2, 7): (63, 16, 16, 9, 16, 17, 10, 16, 16, 13, 43, 43, 34, 7, 8, 6, 12, 10, 6),
    (1.2, 8): (110, 16, 16, 9, 16, 17, 10, 16, 16, 12, 48, 48, 37, 9, 10, 6, 12, 12, 6),
    (1.2, 9): (178, 16, 16, 9, 16, 18, 10, 16, 16, 12, 52, 52, 40, 9, 13, 7, 12, 13, 6),
    (1.2, 10): (279, 15, 15, 8, 16, 18, 11, 15, 15, 11, 55, 56, 42, 11, 18, 7, 12, 14, 7),
    (1.5, 6): (32, 17, 17, 9, 17, 17, 10, 17, 17, 10, 23, 22, 16, 7, 7, 6, 8, 9, 5),
    (1.5, 7): (62, 17, 17, 9, 16, 17, 9, 17, 17, 10, 25, 24, 17, 7, 8, 6, 8, 11, 5),
    (1.5, 8): (111, 17, 17, 9, 16, 17, 10, 17, 17, 10, 27, 26, 19, 9, 10, 6, 8, 13, 7),
    (1.5, 9): (192, 16, 16, 9, 16, 18, 10, 16, 16, 9, 28, 28, 20, 9, 14, 6, 9, 14, 7),
    (1.5, 10): (328, 16, 16, 9, 16, 18, 10, 16, 16, 9, 30, 30, 20, 11, 19, 7, 9, 16, 8),
    (1.8, 6): (32, 17, 17, 10, 17, 17, 11, 17, 17, 10, 18, 21, 13, 7, 8, 7, 7, 10, 6),
    (1.8, 7): (64, 17, 17, 10, 17, 18, 11, 17, 17, 10, 19, 20, 13, 7, 9, 7, 8, 13, 6),
    (1.8, 8): (126, 17, 17, 10, 17, 18, 11, 17, 17, 10, 20, 22, 13, 9, 10, 7, 8, 15, 7),
    (1.8, 9): (238, 17, 17, 9, 17, 19, 11, 17, 17, 9, 21, 23, 14, 9, 14, 7, 8, 17, 7),
    (1.8, 10): (448, 17, 17, 9, 18, 20, 12, 17, 17, 9, 22, 24, 14, 11, 18, 7, 8, 21, 7),
}

TABLE2_COLUMNS = ("CG", "gal-V(1,1)", "geo-V(1,1)", "PV(1,1)", "PtV(1,1)", "PsV(1,1)", "Ptau", "PS")

# keyed by ((alpha, beta), log2(M1 + 1)); wall times omitted
TABLE2 = {
    ((1.1, 1.2), 5): (57, 17, 36, 9, 13, 10, 6, 13),
    ((1.1, 1.2), 6): (93, 14, 43, 9, 14, 11, 7, 17),
    ((1.1, 1.2), 7): (157, 14, 48, 8, 15, 12, 7, 19),
    ((1.1, 1.2), 8): (237, 14, 52, 8, 16, 17, 8, 21),
    ((1.1, 1.2), 9): (383, 14, 56, 9, 17, 26, 8, 24),
    ((1.5, 1.5), 5): (44, 14, 19, 8, 8, 9, 6, 12),
    ((1.5, 1.5), 6): (78, 14, 21, 8, 9, 10, 6, 13),
    ((1.5, 1.5), 7): (136, 12, 23, 8, 10, 12, 7, 16),
    ((1.5, 1.5), 8): (234, 13, 25, 8, 10, 15, 8, 20),
    ((1.5, 1.5), 9): (401, 13, 26, 8, 11, 25, 8, 25),
    ((1.7, 1.9), 5): (66, 24, 26, 11, 11, 11, 6, 15),
    ((1.7, 1.9), 6): (127, 27, 30, 12, 12, 13, 6, 19),
    ((1.7, 1.9), 7): (244, 30, 34, 13, 13, 15, 6, 25),
    ((1.7, 1.9), 8): (467, 33, 38, 14, 15, 17, 7, 30),
    ((1.7, 1.9), 9): (899, 37, 43, 15, 16, 27, 7, 43),
}

TABLE3_COLUMNS = ("GMRES", "PtV(1,1)", "PsV(1,1)", "Ptau", "PS")

TABLE3 = {
    ((1.1, 1.2), 4): (49, 11, 9, 12, 19),
    ((1.1, 1.2), 5): (94, 12, 11, 13, 23),
    ((1.1, 1.2), 6): (163, 14, 12, 13, 27),
    ((1.1, 1.2), 7): (267, 15, 15, 13, 31),
    ((1.5, 1.5), 4): (51, 11, 10, 13, 20),
    ((1.5, 1.5), 5): (95, 12, 12, 13, 24),
    ((1.5, 1.5), 6): (171, 12, 13, 14, 27),
    ((1.5, 1.5), 7): (301, 12, 17, 14, 31),
    ((1.7, 1.9), 4): (62, 13, 12, 12, 21),
    ((1.7, 1.9), 5): (129, 14, 14, 13, 26),
    ((1.7, 1.9), 6): (262, 15, 14, 14, 31),
    ((1.7, 1.9), 7): (524, 15, 18, 14, 37),
    ((1.9, 1.9), 4): (60, 11, 11, 12, 21),
    ((1.9, 1.9), 5): (124, 12, 11, 13, 25),
    ((1.9, 1.9), 6): (252, 12, 11, 13, 30),
    ((1.9, 1.9), 7): (504, 12, 13, 13, 35),
}

# mu -> (CG, Ptau, PS, RRE)
TABLE4 = {
    1e-3: (12, 3, 12, 1.54e-1),
    1e-4: (15, 4, 9, 1.12e-1),
    1e-5: (36, 6, 16, 1.15e-1),
    1e-6: (93, 10, 44, 2.21e-1),
}
