//! Bivariate-bicycle codes from two polynomials over `Z_l x Z_m`.
//!
//! The monomial `(a, b)` stands for `x^a y^b` with `x = S_l (x) I_m` and
//! `y = I_l (x) S_m`. Checks are `H_X = [A | B]` and `H_Z = [B^T | A^T]`, so
//! `n = 2lm` with `lm` checks of each type.

use super::{CheckKind, Coupling, CssLayout};
use crate::error::{Error, Result};
use crate::gf2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BbSpec {
    pub l: usize,
    pub m: usize,
    pub poly_a: Vec<(usize, usize)>,
    pub poly_b: Vec<(usize, usize)>,
}

impl BbSpec {
    /// `A = 1 + y + x`, `B = 1 + y^2 + x^2` on `Z_3 x Z_3`: an [[18, 4, 4]] code.
    pub fn preset_18_4_4() -> Self {
        Self {
            l: 3,
            m: 3,
            poly_a: vec![(0, 0), (0, 1), (1, 0)],
            poly_b: vec![(0, 0), (0, 2), (2, 0)],
        }
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.m + j
    }

    fn shifted(&self, r: usize, (a, b): (usize, usize), forward: bool) -> usize {
        let (i, j) = (r / self.m, r % self.m);
        if forward {
            self.index((i + a) % self.l, (j + b) % self.m)
        } else {
            self.index((i + self.l - a) % self.l, (j + self.m - b) % self.m)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.l == 0 || self.m == 0 {
            return Err(Error::InvalidCode("l and m must be positive".into()));
        }
        for (name, poly) in [("A", &self.poly_a), ("B", &self.poly_b)] {
            if poly.is_empty() {
                return Err(Error::InvalidCode(format!("polynomial {name} is empty")));
            }
            for (k, &(a, b)) in poly.iter().enumerate() {
                if a >= self.l || b >= self.m {
                    return Err(Error::InvalidCode(format!(
                        "polynomial {name} term x^{a} y^{b} outside Z_{} x Z_{}",
                        self.l, self.m
                    )));
                }
                if poly[..k].contains(&(a, b)) {
                    return Err(Error::InvalidCode(format!(
                        "polynomial {name} repeats term x^{a} y^{b}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parity-check matrices `(H_X, H_Z)` as GF(2) rows.
    pub fn check_matrices(&self) -> Result<(Vec<gf2::BitRow>, Vec<gf2::BitRow>)> {
        self.validate()?;
        let lm = self.l * self.m;
        let mut hx = vec![vec![false; 2 * lm]; lm];
        let mut hz = vec![vec![false; 2 * lm]; lm];
        for r in 0..lm {
            for &t in &self.poly_a {
                hx[r][self.shifted(r, t, true)] ^= true;
                hz[r][lm + self.shifted(r, t, false)] ^= true;
            }
            for &t in &self.poly_b {
                hx[r][lm + self.shifted(r, t, true)] ^= true;
                hz[r][self.shifted(r, t, false)] ^= true;
            }
        }
        Ok((hx, hz))
    }

    /// `(n, k)` of the code.
    pub fn parameters(&self) -> Result<(usize, usize)> {
        let (hx, hz) = self.check_matrices()?;
        let n = 2 * self.l * self.m;
        Ok((n, n - gf2::rank(&hx) - gf2::rank(&hz)))
    }
}

fn support(row: &[bool]) -> Vec<usize> {
    row.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect()
}

pub fn bb_layout(spec: &BbSpec) -> Result<CssLayout> {
    let (hx, hz) = spec.check_matrices()?;
    let product = gf2::mul_transpose(&hx, &hz);
    if let Some((i, j)) = product
        .iter()
        .enumerate()
        .find_map(|(i, row)| row.iter().position(|b| *b).map(|j| (i, j)))
    {
        return Err(Error::InvalidCode(format!(
            "H_X H_Z^T is nonzero: X check {i} and Z check {j} anticommute"
        )));
    }
    let n = 2 * spec.l * spec.m;
    let lm = spec.l * spec.m;
    let logical_z = gf2::independent_mod(&hz, &gf2::kernel(&hx, n));
    let logical_x = gf2::independent_mod(&hx, &gf2::kernel(&hz, n));
    if logical_z.is_empty() {
        return Err(Error::InvalidCode("code encodes no logical qubits".into()));
    }
    let mut schedule = Vec::new();
    for (poly, offset) in [(&spec.poly_a, 0), (&spec.poly_b, lm)] {
        for &t in poly {
            schedule.push(
                (0..lm)
                    .map(|r| Coupling {
                        kind: CheckKind::X,
                        check: r,
                        data: offset + spec.shifted(r, t, true),
                    })
                    .collect(),
            );
        }
    }
    for (poly, offset) in [(&spec.poly_b, 0), (&spec.poly_a, lm)] {
        for &t in poly {
            schedule.push(
                (0..lm)
                    .map(|r| Coupling {
                        kind: CheckKind::Z,
                        check: r,
                        data: offset + spec.shifted(r, t, false),
                    })
                    .collect(),
            );
        }
    }
    Ok(CssLayout {
        n_data: n,
        x_checks: hx.iter().map(|r| support(r)).collect(),
        z_checks: hz.iter().map(|r| support(r)).collect(),
        schedule,
        logical_z: logical_z.iter().map(|r| support(r)).collect(),
        logical_x: logical_x.iter().map(|r| support(r)).collect(),
    })
}
