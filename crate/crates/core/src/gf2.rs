//! Dense linear algebra over GF(2) on `Vec<bool>` rows.
//!
//! Sizes here are tiny (a few hundred columns at most), so clarity wins over packing.

pub type BitRow = Vec<bool>;

/// Row-reduce in place; returns pivot columns in order.
fn reduce(rows: &mut [BitRow]) -> Vec<usize> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c]) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] {
                let pivot = rows[r].clone();
                xor_into(&mut rows[i], &pivot);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn xor_into(dst: &mut [bool], src: &[bool]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

pub fn rank(rows: &[BitRow]) -> usize {
    let mut m = rows.to_vec();
    reduce(&mut m).len()
}

/// Basis of `{v : M v = 0}`.
pub fn kernel(rows: &[BitRow], cols: usize) -> Vec<BitRow> {
    let mut m = rows.to_vec();
    let pivots = reduce(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![false; cols];
            v[f] = true;
            for (r, &p) in pivots.iter().enumerate() {
                if m[r][f] {
                    v[p] = true;
                }
            }
            v
        })
        .collect()
}

/// `M v` over GF(2).
pub fn mul_vec(rows: &[BitRow], v: &[bool]) -> BitRow {
    rows.iter()
        .map(|r| r.iter().zip(v).filter(|(a, b)| **a && **b).count() % 2 == 1)
        .collect()
}

/// `A B^T` over GF(2).
pub fn mul_transpose(a: &[BitRow], b: &[BitRow]) -> Vec<BitRow> {
    a.iter().map(|r| mul_vec(b, r)).collect()
}

/// Vectors from `candidates` that are independent modulo `span`, greedily in order.
pub fn independent_mod(span: &[BitRow], candidates: &[BitRow]) -> Vec<BitRow> {
    let mut basis = span.to_vec();
    let mut current = rank(&basis);
    let mut picked = Vec::new();
    for v in candidates {
        basis.push(v.clone());
        let next = rank(&basis);
        if next > current {
            current = next;
            picked.push(v.clone());
        } else {
            basis.pop();
        }
    }
    picked
}
