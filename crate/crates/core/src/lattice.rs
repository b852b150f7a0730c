//! Integer lattices in `Z^d` via Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// A sublattice of `Z^d` held as its row-style Hermite normal form:
/// pivots strictly increase, are positive, and entries above each pivot
/// are reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
}

fn pivot_col(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|c| !c.is_zero())
}

impl Lattice {
    pub fn span(dim: usize, rows: impl IntoIterator<Item = Vec<BigInt>>) -> Self {
        let mut lat = Lattice {
            dim,
            basis: Vec::new(),
        };
        for r in rows {
            assert_eq!(r.len(), dim, "row length");
            lat.insert(r);
        }
        lat.reduce_above();
        lat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Adds a generator, keeping the basis in echelon form.
    fn insert(&mut self, mut v: Vec<BigInt>) {
        loop {
            let Some(col) = pivot_col(&v) else {
                return;
            };
            let pos = self
                .basis
                .iter()
                .position(|b| pivot_col(b).unwrap() >= col);
            match pos {
                Some(i) if pivot_col(&self.basis[i]).unwrap() == col => {
                    // Euclid on the pivot entries of basis[i] and v
                    let mut b = std::mem::take(&mut self.basis[i]);
                    while !v[col].is_zero() {
                        let qt = b[col].div_floor(&v[col]);
                        for k in col..self.dim {
                            let t = &qt * &v[k];
                            b[k] -= t;
                        }
                        std::mem::swap(&mut b, &mut v);
                    }
                    if b[col].is_negative() {
                        b.iter_mut().for_each(|c| *c = -std::mem::take(c));
                    }
                    self.basis[i] = b;
                    // v now has a zero at col; continue with the remainder
                }
                Some(i) => {
                    if v[col].is_negative() {
                        v.iter_mut().for_each(|c| *c = -std::mem::take(c));
                    }
                    self.basis.insert(i, v);
                    return;
                }
                None => {
                    if v[col].is_negative() {
                        v.iter_mut().for_each(|c| *c = -std::mem::take(c));
                    }
                    self.basis.push(v);
                    return;
                }
            }
        }
    }

    fn reduce_above(&mut self) {
        for i in 0..self.basis.len() {
            let col = pivot_col(&self.basis[i]).unwrap();
            let piv = self.basis[i][col].clone();
            for j in 0..i {
                let qt = self.basis[j][col].div_floor(&piv);
                if qt.is_zero() {
                    continue;
                }
                let (head, tail) = self.basis.split_at_mut(i);
                for k in col..self.dim {
                    let t = &qt * &tail[0][k];
                    head[j][k] -= t;
                }
            }
        }
    }

    /// Integer coordinates of `v` on the basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut r = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for b in &self.basis {
            let col = pivot_col(b).unwrap();
            if r[..col].iter().any(|c| !c.is_zero()) {
                return None;
            }
            let (qt, rem) = r[col].div_rem(&b[col]);
            if !rem.is_zero() {
                return None;
            }
            for k in col..self.dim {
                let t = &qt * &b[k];
                r[k] -= t;
            }
            coords.push(qt);
        }
        if r.iter().all(Zero::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Index `[Z^d : L]` when the lattice has full rank.
    pub fn index(&self) -> Option<BigInt> {
        if self.rank() < self.dim {
            return None;
        }
        Some(
            self.basis
                .iter()
                .map(|b| b[pivot_col(b).unwrap()].clone())
                .product(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_examples() {
        let l = Lattice::span(2, [v(&[2, 0]), v(&[0, 3]), v(&[4, 6])]);
        assert_eq!(l.index(), Some(BigInt::from(6)));
        assert!(l.contains(&v(&[2, 3])));
        assert!(!l.contains(&v(&[1, 0])));
        let l = Lattice::span(2, [v(&[6, 4]), v(&[4, 2])]);
        assert_eq!(l.basis(), &[v(&[2, 0]), v(&[0, 2])]);
        let l = Lattice::span(3, [v(&[0, 0, 0])]);
        assert_eq!(l.rank(), 0);
    }

    proptest! {
        #[test]
        fn hnf_is_canonical(rows in prop::collection::vec(prop::collection::vec(-9i64..9, 3), 1..6)) {
            let a = Lattice::span(3, rows.iter().map(|r| v(r)));
            let mut rev = rows.clone();
            rev.reverse();
            let b = Lattice::span(3, rev.iter().map(|r| v(r)));
            prop_assert_eq!(&a, &b);
            for r in &rows {
                let c = a.coordinates(&v(r)).unwrap();
                let mut back = vec![BigInt::zero(); 3];
                for (k, basis) in c.iter().zip(a.basis()) {
                    for i in 0..3 {
                        back[i] += k * &basis[i];
                    }
                }
                prop_assert_eq!(back, v(r));
            }
        }
    }
}
