#!/usr/bin/env python3
"""Convert NASA-7 cp/R polynomial fits to the internal-energy form used by
the mechanism files.

NASA-7 per range: cp/R = a0 + a1 T + a2 T^2 + a3 T^3 + a4 T^4, with a5 the
enthalpy and a6 the entropy integration constants. The solver stores
u(T) = sum_k b_k T^k (J/kg) per range:

    b0 = R a5          (zero-point/formation offset)
    b1 = R (a0 - 1)
    bk = R a_{k-1} / k,  k = 2..5
    s_const = R a6     (standard-state entropy constant)

with R = 8314.4621 / W in J/(kg K). Usage: edit SPECIES/REACTIONS below or
import the helpers.
"""

R0 = 8314.4621


def convert_range(W, a):
    R = R0 / W
    b = [R * a[5], R * (a[0] - 1.0)] + [R * a[k - 1] / k for k in range(2, 6)]
    return b, R * a[6]


def emit_species(out, name, W, atoms, ranges):
    out.write("\n[species]\n")
    out.write(f"name = {name}\n")
    out.write(f"W = {W}\n")
    out.write(f"atoms = {atoms}\n")
    for (Tlo, Thi, a) in ranges:
        b, s_const = convert_range(W, a)
        out.write(f"range = {Tlo} {Thi}\n")
        out.write("b = " + " ".join(f"{c:.17g}" for c in b) + "\n")
        out.write(f"s_const = {s_const:.17g}\n")


# GRI-Mech 3.0 NASA-7 data (public), low range 200-1000 K, high 1000-3500 K.
SPECIES = [
    ("H2", 2.016, "H:2",
     (2.34433112e+00, 7.98052075e-03, -1.94781510e-05, 2.01572094e-08, -7.37611761e-12, -9.17935173e+02, 6.83010238e-01),
     (3.33727920e+00, -4.94024731e-05, 4.99456778e-07, -1.79566394e-10, 2.00255376e-14, -9.50158922e+02, -3.20502331e+00)),
    ("O2", 31.998, "O:2",
     (3.78245636e+00, -2.99673416e-03, 9.84730201e-06, -9.68129509e-09, 3.24372837e-12, -1.06394356e+03, 3.65767573e+00),
     (3.28253784e+00, 1.48308754e-03, -7.57966669e-07, 2.09470555e-10, -2.16717794e-14, -1.08845772e+03, 5.45323129e+00)),
    ("H2O", 18.015, "H:2,O:1",
     (4.19864056e+00, -2.03643410e-03, 6.52040211e-06, -5.48797062e-09, 1.77197817e-12, -3.02937267e+04, -8.49032208e-01),
     (3.03399249e+00, 2.17691804e-03, -1.64072518e-07, -9.70419870e-11, 1.68200992e-14, -3.00042971e+04, 4.96677010e+00)),
    ("OH", 17.007, "H:1,O:1",
     (3.99201543e+00, -2.40131752e-03, 4.61793841e-06, -3.88113333e-09, 1.36411470e-12, 3.61508056e+03, -1.03925458e-01),
     (3.09288767e+00, 5.48429716e-04, 1.26505228e-07, -8.79461556e-11, 1.17412376e-14, 3.85865700e+03, 4.47669610e+00)),
    ("H", 1.008, "H:1",
     (2.50000000e+00, 7.05332819e-13, -1.99591964e-15, 2.30081632e-18, -9.27732332e-22, 2.54736599e+04, -4.46682853e-01),
     (2.50000001e+00, -2.30842973e-11, 1.61561948e-14, -4.73515235e-18, 4.98197357e-22, 2.54736599e+04, -4.46682914e-01)),
    ("O", 15.999, "O:1",
     (3.16826710e+00, -3.27931884e-03, 6.64306396e-06, -6.12806624e-09, 2.11265971e-12, 2.91222592e+04, 2.05193346e+00),
     (2.56942078e+00, -8.59741137e-05, 4.19484589e-08, -1.00177799e-11, 1.22833691e-15, 2.92175791e+04, 4.78433864e+00)),
    ("HO2", 33.006, "H:1,O:2",
     (4.30179801e+00, -4.74912051e-03, 2.11582891e-05, -2.42763894e-08, 9.29225124e-12, 2.94808040e+02, 3.71666245e+00),
     (4.01721090e+00, 2.23982013e-03, -6.33658150e-07, 1.14246370e-10, -1.07908535e-14, 1.11856713e+02, 3.78510215e+00)),
    ("H2O2", 34.014, "H:2,O:2",
     (4.27611269e+00, -5.42822417e-04, 1.67335701e-05, -2.15770813e-08, 8.62454363e-12, -1.77025821e+04, 3.43505074e+00),
     (4.16500285e+00, 4.90831694e-03, -1.90139225e-06, 3.71185986e-10, -2.87908305e-14, -1.78617877e+04, 2.91615662e+00)),
    ("AR", 39.948, "Ar:1",
     (2.5, 0.0, 0.0, 0.0, 0.0, -7.45375000e+02, 4.36600000e+00),
     (2.5, 0.0, 0.0, 0.0, 0.0, -7.45375000e+02, 4.36600000e+00)),
]

T_LOW, T_MID, T_HIGH = 200.0, 1000.0, 3500.0

# Hydrogen-oxygen-argon skeleton (Mueller/O'Conaire-style parameters).
# A in cm^3/mol or cm^6/mol^2 units with T^beta, Ea in cal/mol; converted to
# SI (kmol, m^3, J/kmol) on output. Falloff behavior is not modeled; the
# H+O2+M and H2O2+M channels use their low-pressure-limit constants.
REACTIONS = [
    ("H + O2 = O + OH",        1.915e14,  0.00, 16440.0, None),
    ("O + H2 = H + OH",        5.080e04,  2.67,  6292.0, None),
    ("OH + H2 = H + H2O",      2.160e08,  1.51,  3430.0, None),
    ("O + H2O = OH + OH",      2.970e06,  2.02, 13400.0, None),
    ("H2 + M = H + H + M",     4.577e19, -1.40, 104380.0, "H2:2.5,H2O:12,AR:0.83"),
    ("O + O + M = O2 + M",     6.165e15, -0.50,     0.0, "H2:2.5,H2O:12,AR:0.83"),
    ("O + H + M = OH + M",     4.714e18, -1.00,     0.0, "H2:2.5,H2O:12,AR:0.75"),
    ("H + OH + M = H2O + M",   3.800e22, -2.00,     0.0, "H2:2.5,H2O:12,AR:0.38"),
    ("H + O2 + M = HO2 + M",   6.170e19, -1.42,     0.0, "H2:2.5,H2O:12,AR:0.5"),
    ("HO2 + H = H2 + O2",      1.660e13,  0.00,   823.0, None),
    ("HO2 + H = OH + OH",      7.079e13,  0.00,   295.0, None),
    ("HO2 + O = O2 + OH",      3.250e13,  0.00,     0.0, None),
    ("HO2 + OH = H2O + O2",    2.890e13,  0.00,  -497.0, None),
    ("HO2 + HO2 = H2O2 + O2",  4.200e14,  0.00, 11982.0, None),
    ("H2O2 + M = OH + OH + M", 1.202e17,  0.00, 45500.0, "H2:2.5,H2O:12,AR:0.64"),
    ("H2O2 + H = H2O + OH",    2.410e13,  0.00,  3970.0, None),
    ("H2O2 + H = HO2 + H2",    4.820e13,  0.00,  7950.0, None),
    ("H2O2 + O = OH + HO2",    9.550e06,  2.00,  3970.0, None),
    ("H2O2 + OH = H2O + HO2",  1.000e12,  0.00,     0.0, None),
]

CAL_PER_MOL_TO_J_PER_KMOL = 4.184e3


def reaction_order(stoich):
    lhs = stoich.split("=")[0]
    n = 0
    for term in lhs.split("+"):
        term = term.strip()
        if term == "M" or not term:
            continue
        n += int(term.split("*")[0]) if "*" in term else 1
    has_m = any(t.strip() == "M" for t in lhs.split("+"))
    return n + (1 if has_m else 0)


def emit_reaction(out, stoich, A_cgs, beta, Ea_cal, tb):
    order = reaction_order(stoich)
    A_si = A_cgs * (1e-3) ** (order - 1)
    Ea_si = Ea_cal * CAL_PER_MOL_TO_J_PER_KMOL
    line = f"reaction = {stoich} ; A = {A_si:.6e} ; beta = {beta} ; Ea = {Ea_si:.6e}"
    if tb:
        line += f" ; M = {tb}"
    out.write(line + "\n")


def main(path):
    with open(path, "w") as out:
        out.write(
            "# Nine-species hydrogen-oxygen-argon demonstration mechanism.\n"
            "# Stand-in data: GRI-Mech 3.0 thermodynamic fits converted to the\n"
            "# internal-energy polynomial form (see tools/convert_nasa7.py) and\n"
            "# a Mueller/O'Conaire-style H2-O2 reaction skeleton. Falloff\n"
            "# channels are approximated by their low-pressure limits.\n"
            "# Units: W kg/kmol, b J/kg/K^k, s_const J/(kg K),\n"
            "#        A (m^3/kmol)^(n-1)/s with T^beta, Ea J/kmol.\n"
            "\n[elements]\n"
            "H = 1.008\nO = 15.999\nAr = 39.948\n")
        for (name, W, atoms, lo, hi) in SPECIES:
            emit_species(out, name, W, atoms,
                         [(T_LOW, T_MID, lo), (T_MID, T_HIGH, hi)])
        out.write("\n[reactions]\n")
        for rx in REACTIONS:
            emit_reaction(out, *rx)
    print(f"wrote {path}")


if __name__ == "__main__":
    import sys
    main(sys.argv[1] if len(sys.argv) > 1 else "mech/h2o2_ar_9sp.mech")
