//! Rotated surface code.
//!
//! Data qubit `(r, c)` has index `r * d + c`. Face `(i, j)` with `0 <= i, j <= d`
//! covers the data corners `(i-1..=i, j-1..=j)` that exist; it is X-type when
//! `i + j` is even. Top and bottom boundaries keep X faces, left and right keep
//! Z faces. Logical Z runs along row 0 and logical X down column 0.

use super::{CheckKind, Coupling, CssLayout};
use crate::error::{Error, Result};

// corner offsets (dr, dc) from the face's top-left data position (i-1, j-1)
const TL: (usize, usize) = (0, 0);
const TR: (usize, usize) = (0, 1);
const BL: (usize, usize) = (1, 0);
const BR: (usize, usize) = (1, 1);

const X_ORDER: [(usize, usize); 4] = [TL, TR, BL, BR];
const Z_ORDER: [(usize, usize); 4] = [TL, BL, TR, BR];

pub fn surface_layout(d: usize) -> Result<CssLayout> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::InvalidCode(format!("surface distance must be odd and >= 3, got {d}")));
    }
    let corner = |i: usize, j: usize, (dr, dc): (usize, usize)| -> Option<usize> {
        let r = (i + dr).checked_sub(1)?;
        let c = (j + dc).checked_sub(1)?;
        (r < d && c < d).then_some(r * d + c)
    };
    let mut faces = Vec::new();
    for i in 0..=d {
        for j in 0..=d {
            let x_type = (i + j) % 2 == 0;
            let bulk = (1..d).contains(&i) && (1..d).contains(&j);
            let top_bottom = (i == 0 || i == d) && (1..d).contains(&j);
            let left_right = (j == 0 || j == d) && (1..d).contains(&i);
            if bulk || (top_bottom && x_type) || (left_right && !x_type) {
                faces.push((i, j, x_type));
            }
        }
    }
    let mut x_checks = Vec::new();
    let mut z_checks = Vec::new();
    let mut schedule = vec![Vec::new(); 4];
    for &(i, j, x_type) in &faces {
        let (kind, order, list) = if x_type {
            (CheckKind::X, X_ORDER, &mut x_checks)
        } else {
            (CheckKind::Z, Z_ORDER, &mut z_checks)
        };
        let check = list.len();
        let mut support = Vec::new();
        for (step, off) in order.into_iter().enumerate() {
            if let Some(q) = corner(i, j, off) {
                schedule[step].push(Coupling { kind, check, data: q });
                support.push(q);
            }
        }
        support.sort_unstable();
        list.push(support);
    }
    Ok(CssLayout {
        n_data: d * d,
        x_checks,
        z_checks,
        schedule,
        logical_z: vec![(0..d).collect()],
        logical_x: vec![(0..d).map(|r| r * d).collect()],
    })
}
