use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// CODATA 2018 Bohr radius in Å.
pub const ANGSTROM_PER_BOHR: f64 = 0.529_177_210_903;

const ELEMENTS: [&str; 18] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub symbol: String,
    pub charge: u32,
    /// Position in Bohr.
    pub position: [f64; 3],
    pub fragment: usize,
}

impl Atom {
    pub fn new(symbol: &str, position_bohr: [f64; 3], fragment: usize) -> Result<Self> {
        let charge = ELEMENTS
            .iter()
            .position(|e| e.eq_ignore_ascii_case(symbol))
            .map(|i| i as u32 + 1)
            .ok_or_else(|| Error::InvalidGeometry(format!("unknown element `{symbol}`")))?;
        Ok(Atom {
            symbol: ELEMENTS[charge as usize - 1].to_string(),
            charge,
            position: position_bohr,
            fragment,
        })
    }
}

/// Atoms with fragment labels. Fragment ids are dense: `0..n_fragments`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    atoms: Vec<Atom>,
}

impl Geometry {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidGeometry("no atoms".into()));
        }
        for a in &atoms {
            if a.position.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "non-finite position for {}",
                    a.symbol
                )));
            }
            if a.charge == 0 {
                return Err(Error::InvalidGeometry(
                    "nuclear charge must be positive".into(),
                ));
            }
        }
        let n_frag = atoms.iter().map(|a| a.fragment).max().unwrap() + 1;
        for f in 0..n_frag {
            if !atoms.iter().any(|a| a.fragment == f) {
                return Err(Error::InvalidGeometry(format!("fragment {f} has no atoms")));
            }
        }
        Ok(Geometry { atoms })
    }

    /// Parses `element x y z [fragment]` lines, coordinates in Å.
    /// Blank lines and `#` comments are skipped; a missing fragment id means 0.
    pub fn parse(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 && fields.len() != 5 {
                return Err(Error::InvalidGeometry(format!(
                    "line {}: expected `element x y z [fragment]`",
                    lineno + 1
                )));
            }
            let mut pos = [0.0; 3];
            for (k, f) in fields[1..4].iter().enumerate() {
                let x: f64 = f.parse().map_err(|_| {
                    Error::InvalidGeometry(format!("line {}: bad coordinate `{f}`", lineno + 1))
                })?;
                pos[k] = x / ANGSTROM_PER_BOHR;
            }
            let fragment = match fields.get(4) {
                Some(f) => f.parse().map_err(|_| {
                    Error::InvalidGeometry(format!("line {}: bad fragment id `{f}`", lineno + 1))
                })?,
                None => 0,
            };
            atoms.push(Atom::new(fields[0], pos, fragment)?);
        }
        Geometry::new(atoms)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| e.context(format!("reading {}", path.display())))
    }

    /// Inverse of [`Geometry::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in &self.atoms {
            let p = a.position.map(|x| x * ANGSTROM_PER_BOHR);
            writeln!(
                out,
                "{:<2} {:>22.15} {:>22.15} {:>22.15} {}",
                a.symbol, p[0], p[1], p[2], a.fragment
            )
            .unwrap();
        }
        out
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn n_fragments(&self) -> usize {
        self.atoms.iter().map(|a| a.fragment).max().unwrap() + 1
    }

    pub fn n_electrons(&self) -> usize {
        self.atoms.iter().map(|a| a.charge as usize).sum()
    }

    /// Atoms of one fragment, relabelled as fragment 0.
    pub fn fragment(&self, id: usize) -> Result<Geometry> {
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .filter(|a| a.fragment == id)
            .map(|a| Atom {
                fragment: 0,
                ..a.clone()
            })
            .collect();
        if atoms.is_empty() {
            return Err(Error::InvalidGeometry(format!("no fragment {id}")));
        }
        Geometry::new(atoms)
    }

    pub fn nuclear_repulsion(&self) -> f64 {
        let mut e = 0.0;
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[..i] {
                e += (a.charge * b.charge) as f64 / distance(&a.position, &b.position);
            }
        }
        e
    }

    /// Square of four hydrogens in the xy plane with the given side (Bohr),
    /// lower-left corner at `origin`.
    pub fn h4_square(side_bohr: f64, origin: [f64; 3]) -> Geometry {
        Geometry::new(h4_atoms(side_bohr, origin, 0)).unwrap()
    }

    /// Two stacked H4 squares (a cuboid) separated by `distance_angstrom` along z.
    pub fn h8_cuboid(side_bohr: f64, distance_angstrom: f64) -> Geometry {
        let mut atoms = h4_atoms(side_bohr, [0.0; 3], 0);
        atoms.extend(h4_atoms(
            side_bohr,
            [0.0, 0.0, distance_angstrom / ANGSTROM_PER_BOHR],
            1,
        ));
        Geometry::new(atoms).unwrap()
    }
}

fn h4_atoms(side_bohr: f64, origin: [f64; 3], fragment: usize) -> Vec<Atom> {
    let [x, y, z] = origin;
    let corners = [
        [x, y, z],
        [x + side_bohr, y, z],
        [x + side_bohr, y + side_bohr, z],
        [x, y + side_bohr, z],
    ];
    corners
        .into_iter()
        .map(|p| Atom::new("H", p, fragment).unwrap())
        .collect()
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    squared_distance(a, b).sqrt()
}

pub(crate) fn squared_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}
