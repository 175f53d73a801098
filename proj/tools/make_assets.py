#!/usr/bin/env python3
# Copyright 2026 The rbmducc Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerate the bundled FCIDUMP assets with PySCF.

Each asset is a canonical RHF/STO-3G integral set (frozen core where noted).
Reference HF, MP2 and FCI energies computed by PySCF are written to
assets/manifest.json so the C++ oracle can be cross-checked against an
independent implementation.
"""
import json
import math
import os

import numpy as np
from pyscf import ao2mo, fci, gto, mcscf, mp, scf

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(os.path.dirname(HERE), "assets")


def linear_chain(symbol_list, spacing):
    return [(s, (0.0, 0.0, i * spacing)) for i, s in enumerate(symbol_list)]


def bent_xh2(center, r, angle_deg):
    half = math.radians(angle_deg) / 2.0
    return [
        (center, (0.0, 0.0, 0.0)),
        ("H", (0.0, r * math.sin(half), r * math.cos(half))),
        ("H", (0.0, -r * math.sin(half), r * math.cos(half))),
    ]


def write_fcidump(path, h1, eri, ecore, orbe, nelec, ms2):
    norb = h1.shape[0]
    eri = ao2mo.restore(1, eri, norb)
    tol = 1e-14
    with open(path, "w") as f:
        f.write(f" &FCI NORB={norb},NELEC={nelec},MS2={ms2},\n")
        f.write("  ORBSYM=" + "1," * norb + "\n  ISYM=1,\n &END\n")
        for p in range(norb):
            for q in range(p + 1):
                for r in range(norb):
                    for s in range(r + 1):
                        pq = p * (p + 1) // 2 + q
                        rs = r * (r + 1) // 2 + s
                        if rs > pq:
                            continue
                        v = eri[p, q, r, s]
                        if abs(v) > tol:
                            f.write(f"{v: .16e} {p+1:4d} {q+1:4d} {r+1:4d} {s+1:4d}\n")
        for p in range(norb):
            for q in range(p + 1):
                v = h1[p, q]
                if abs(v) > tol:
                    f.write(f"{v: .16e} {p+1:4d} {q+1:4d}    0    0\n")
        for p in range(norb):
            f.write(f"{orbe[p]: .16e} {p+1:4d}    0    0    0\n")
        f.write(f"{ecore: .16e}    0    0    0    0\n")


def build(asset_id, atoms, ncore, description):
    mol = gto.M(atom=atoms, basis="sto-3g", unit="Angstrom", symmetry=True,
                verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-13
    mf.conv_tol_grad = 1e-9
    mf.kernel()
    assert mf.converged, asset_id
    norb = mol.nao - ncore
    nelec = mol.nelectron - 2 * ncore
    cas = mcscf.CASCI(mf, norb, nelec)
    cas.ncore = ncore
    h1, ecore = cas.get_h1eff()
    eri = cas.get_h2eff()
    orbe = mf.mo_energy[ncore:]
    write_fcidump(os.path.join(OUT, asset_id + ".fcidump"), h1, eri, ecore,
                  orbe, nelec, 0)
    e_mp2 = mp.MP2(mf, frozen=ncore if ncore else None).kernel()[0]
    e_fci, _ = fci.direct_spin1.kernel(h1, ao2mo.restore(1, eri, norb), norb,
                                       nelec, ecore=ecore, conv_tol=1e-13,
                                       max_cycle=500)
    return {
        "file": asset_id + ".fcidump",
        "description": description,
        "geometry_angstrom": [[a, list(xyz)] for a, xyz in atoms],
        "basis": "sto-3g",
        "frozen_core_orbitals": ncore,
        "n_spatial": norb,
        "n_electrons": nelec,
        "pyscf_hf_energy": float(mf.e_tot),
        "pyscf_mp2_correlation": float(e_mp2),
        "pyscf_fci_energy": float(e_fci),
    }


def main():
    os.makedirs(OUT, exist_ok=True)
    manifest = {}
    for r in (0.5, 0.735, 1.0, 1.5, 2.0):
        aid = f"h2_{r}"
        manifest[aid] = build(aid, linear_chain(["H", "H"], r), 0,
                              f"H2 bond length {r} A")
    for r in (1.0, 1.5):
        aid = f"h4_{r}"
        manifest[aid] = build(aid, linear_chain(["H"] * 4, r), 0,
                              f"linear H4, uniform spacing {r} A")
    for r in (1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5):
        aid = f"bh_{r}"
        manifest[aid] = build(aid, [("B", (0, 0, 0)), ("H", (0, 0, r))], 1,
                              f"BH bond length {r} A, B 1s frozen")
    for r in (0.96, 1.2, 1.5):
        aid = f"h2o_{r}"
        manifest[aid] = build(aid, bent_xh2("O", r, 104.5), 1,
                              f"H2O symmetric O-H {r} A, angle 104.5 deg, O 1s frozen")
    for r in (1.1, 1.4, 1.7):
        aid = f"ch2_{r}"
        manifest[aid] = build(aid, bent_xh2("C", r, 101.9), 1,
                              f"singlet CH2 C-H {r} A, angle 101.9 deg, C 1s frozen")
    with open(os.path.join(OUT, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
