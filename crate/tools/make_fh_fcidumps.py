#!/usr/bin/env python3
"""Generate the FH dimer and FH-H2O valence active-space FCIDUMP files.

RHF/aug-cc-pVDZ (spherical) on the dimer and on each monomer at its dimer
geometry. Heavy-atom 1s orbitals are frozen (canonical, folded into the core
energy). Valence occupied orbitals are Pipek-Mezey localized (meta-Lowdin
populations). Active virtuals span the valence virtual space: the part of
the intrinsic atomic orbital (IAO) space orthogonal to the occupied
orbitals, one orbital per FH and two per H2O, Pipek-Mezey localized within
that space.

Dimer orbital order: occupied A, occupied B, virtual A, virtual B. Within
each fragment block the dimer orbitals are rotated onto the monomer orbitals
(orthogonal Procrustes), so dimer orbital i corresponds to the monomer
orbital written in the map `dimer_orbital fragment fragment_orbital`.

Requires pyscf (tested with 2.14). Usage:
    python3 tools/make_fh_fcidumps.py crates/core/tests/data/fh
"""

import json
import sys
from pathlib import Path

import numpy as np
from pyscf import gto, lo, mcscf, scf
from pyscf.lo import iao
from pyscf.tools import fcidump

BASIS = "aug-cc-pvdz"

FH_DIMER = [
    ("F", (-0.355909, 0.404037, 0.199053), 0),
    ("H", (0.112061, -0.309544, -0.156637), 0),
    ("F", (-3.008949, -0.078707, -0.096402), 1),
    ("H", (-2.130203, 0.184214, 0.053986), 1),
]

FH_H2O = [
    ("O", (-2.451734, 0.852831, -0.885154), 0),
    ("H", (-1.585104, 0.709253, -0.491503), 0),
    ("H", (-2.774601, 1.674026, -0.500774), 0),
    ("F", (-4.071275, -1.154030, -0.438062), 1),
    ("H", (-3.491540, -0.434027, -0.626687), 1),
]

MASS = {"H": 1.00782503, "O": 15.99491462, "F": 18.99840316}
N_VIRT = {"FH": 1, "H2O": 2}
SEPARATION = 100.0


def formula(atoms):
    return "H2O" if any(a[0] == "O" for a in atoms) else "FH"


def fragment(atoms, f):
    return [a for a in atoms if a[2] == f]


def separated(atoms, distance):
    """Moves fragment 1 along the centre-of-mass axis to `distance` Angstrom."""

    def com(frag):
        m = np.array([MASS[a[0]] for a in frag])
        x = np.array([a[1] for a in frag])
        return (m[:, None] * x).sum(0) / m.sum()

    a, b = com(fragment(atoms, 0)), com(fragment(atoms, 1))
    axis = (b - a) / np.linalg.norm(b - a)
    shift = a + distance * axis - b
    return [(s, tuple(np.array(x) + shift) if f == 1 else x, f) for s, x, f in atoms]


def mole(atoms, basis=BASIS):
    return gto.M(
        atom=[(s, x) for s, x, _ in atoms], basis=basis, unit="Angstrom", verbose=0
    )


def rhf(mol):
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    assert mf.converged
    return mf


def n_core(atoms):
    return sum(1 for a in atoms if a[0] in ("O", "F"))


def valence_virtuals(mol, mf):
    """Virtual-space projection of the IAOs, orthonormalized."""
    c, s = mf.mo_coeff, mol.intor("int1e_ovlp")
    nocc = mol.nelectron // 2
    a = lo.vec_lowdin(iao.iao(mol, c[:, :nocc]), s)
    v = c[:, nocc:]
    pv = v @ (v.T @ s @ a)
    u, sv, _ = np.linalg.svd(pv.T @ s @ pv)
    n = int((sv > 1e-6).sum())
    return pv @ u[:, :n] / np.sqrt(sv[:n])


def pm(mol, orbs):
    loc = lo.PM(mol, orbs)
    loc.conv_tol = 1e-12
    return loc.kernel()


def atom_weights(mol, orbs, atom_ids):
    """Meta-Lowdin population of each orbital on the given atoms."""
    c = lo.orth_ao(mol, "meta_lowdin")
    s = mol.intor("int1e_ovlp")
    coef = c.T @ s @ orbs
    labels = np.array([lab[0] for lab in mol.ao_labels(fmt=False)])
    mask = np.isin(labels, atom_ids)
    return (coef[mask] ** 2).sum(0)


def write(path, mol, mf, core, active, nelec, n_virt):
    # inactive virtuals: canonical virtuals with the active ones projected out
    s = mol.intor("int1e_ovlp")
    v = mf.mo_coeff[:, mol.nelectron // 2 :]
    act_v = active[:, active.shape[1] - n_virt :]
    rest = v - act_v @ (act_v.T @ s @ v)
    u, sv, _ = np.linalg.svd(rest.T @ s @ rest)
    n = v.shape[1] - n_virt
    rest = rest @ u[:, :n] / np.sqrt(sv[:n])
    mo = np.hstack([core, active, rest])
    mc = mcscf.CASCI(mf, active.shape[1], nelec)
    mc.verbose = 0
    h1, ecore = mc.get_h1eff(mo)
    eri = mc.get_h2eff(mo)
    fcidump.from_integrals(
        str(path), h1, eri, active.shape[1], nelec, nuc=ecore, ms=0, tol=1e-15
    )
    mc.fcisolver.conv_tol = 1e-12
    return mc.kernel(mo)[0]


def monomer(atoms, out):
    mol = mole(atoms)
    mf = rhf(mol)
    c = mf.mo_coeff
    nc, nocc = n_core(atoms), mol.nelectron // 2
    occ = pm(mol, c[:, nc:nocc])
    virt = valence_virtuals(mol, mf)
    assert virt.shape[1] == N_VIRT[formula(atoms)]
    if virt.shape[1] > 1:
        virt = pm(mol, virt)
    active = np.hstack([occ, virt])
    e_cas = write(out, mol, mf, c[:, :nc], active, 2 * (nocc - nc), virt.shape[1])
    return mol, mf.e_tot, e_cas, active, nocc - nc


def dimer(atoms, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    mono = [monomer(fragment(atoms, f), out_dir / f"monomer_{'ab'[f]}.fcidump") for f in (0, 1)]

    mol = mole(atoms)
    mf = rhf(mol)
    c = mf.mo_coeff
    nc, nocc = n_core(atoms), mol.nelectron // 2
    core = c[:, :nc]

    atom_frag = [a[2] for a in atoms]
    frag_atoms = [[i for i, f in enumerate(atom_frag) if f == g] for g in (0, 1)]
    occ = pm(mol, c[:, nc:nocc])
    w = atom_weights(mol, occ, frag_atoms[0])
    occ_by = [occ[:, w > 0.5], occ[:, w <= 0.5]]

    virt = pm(mol, valence_virtuals(mol, mf))
    w = atom_weights(mol, virt, frag_atoms[0])
    virt_by = [virt[:, w > 0.5], virt[:, w <= 0.5]]
    for f in (0, 1):
        assert virt_by[f].shape[1] == N_VIRT[formula(fragment(atoms, f))]

    # match every dimer orbital to a monomer orbital of its fragment
    blocks = []
    for f in (0, 1):
        mmol, _, _, m_active, m_nocc = mono[f]
        cross = gto.intor_cross("int1e_ovlp", mol, mmol)
        for kind, dim_orbs in (("occ", occ_by[f]), ("virt", virt_by[f])):
            m_orbs = m_active[:, :m_nocc] if kind == "occ" else m_active[:, m_nocc:]
            offset = 0 if kind == "occ" else m_nocc
            ov = dim_orbs.T @ cross @ m_orbs
            assert ov.shape[0] == ov.shape[1]
            # rotate within the block onto the monomer orbitals (orthogonal
            # Procrustes); lone pairs are degenerate under localization
            u, _, vt = np.linalg.svd(ov)
            aligned = dim_orbs @ (u @ vt)
            diag = np.diag(aligned.T @ cross @ m_orbs)
            local = np.arange(m_orbs.shape[1]) + offset
            blocks.append((kind, f, aligned, local, diag.min()))

    order = [b for b in blocks if b[0] == "occ"] + [b for b in blocks if b[0] == "virt"]
    active = np.hstack([b[2] for b in order])
    table, worst = [], 1.0
    for kind, f, orbs, local, quality in order:
        worst = min(worst, quality)
        for loc in local:
            table.append(f"{len(table)} {'AB'[f]} {loc}")
    (out_dir / "orbital_map.txt").write_text("\n".join(table) + "\n")

    n_virt = sum(v.shape[1] for v in virt_by)
    e_cas = write(out_dir / "dimer.fcidump", mol, mf, core, active, 2 * (nocc - nc), n_virt)
    return {
        "rhf": {"dimer": mf.e_tot, "monomer_a": mono[0][1], "monomer_b": mono[1][1]},
        "casci": {"dimer": e_cas, "monomer_a": mono[0][2], "monomer_b": mono[1][2]},
        "min_orbital_match_overlap": worst,
    }


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data/fh")
    systems = {
        "fh_dimer": FH_DIMER,
        "fh_dimer_100": separated(FH_DIMER, SEPARATION),
        "fh_h2o": FH_H2O,
        "fh_h2o_100": separated(FH_H2O, SEPARATION),
    }
    summary = {}
    for name, atoms in systems.items():
        summary[name] = dimer(atoms, root / name)
        print(name, json.dumps(summary[name]))
    (root / "pyscf_reference.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
