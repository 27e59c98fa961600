//! Lattices in `Q^n` via row-style Hermite normal form.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::linalg::{clear_denominators, det, rat, Rat, RatVec};

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// The result is upper triangular with positive pivots, and entries above each
/// pivot are reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hnf(rows: &[Vec<i128>], n: usize) -> Vec<Vec<i128>> {
    let mut a: Vec<Vec<i128>> = rows.iter().filter(|r| r.iter().any(|x| *x != 0)).cloned().collect();
    let mut r = 0;
    for c in 0..n {
        if r >= a.len() {
            break;
        }
        while let Some(piv) = (r..a.len()).filter(|&i| a[i][c] != 0).min_by_key(|&i| a[i][c].abs()) {
            a.swap(r, piv);
            let mut clean = true;
            for i in r + 1..a.len() {
                if a[i][c] != 0 {
                    let q = Integer::div_floor(&a[i][c], &a[r][c]);
                    let pivot_row = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= q * y;
                    }
                    if a[i][c] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if a[r][c] == 0 {
            continue;
        }
        if a[r][c] < 0 {
            for x in a[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let q = Integer::div_floor(&a[i][c], &a[r][c]);
            if q != 0 {
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= q * y;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// A lattice in `Q^n`, stored as `basis / denom` with `basis` in Hermite form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    denom: i128,
    basis: Vec<Vec<i128>>,
}

impl Lattice {
    pub fn from_generators(gens: &[RatVec], dim: usize) -> Self {
        let denom = gens
            .iter()
            .flat_map(|g| g.iter().map(|x| *x.denom()))
            .fold(1i128, |acc, d| acc.lcm(&d));
        let rows: Vec<Vec<i128>> = gens
            .iter()
            .map(|g| g.iter().map(|x| (x * rat(denom)).to_integer()).collect())
            .collect();
        Self::normalized(dim, denom, hnf(&rows, dim))
    }

    pub fn from_int_generators(gens: &[Vec<i64>], dim: usize) -> Self {
        let rows: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|&x| x as i128).collect()).collect();
        Self::normalized(dim, 1, hnf(&rows, dim))
    }

    /// The standard lattice `Z^n`.
    pub fn standard(dim: usize) -> Self {
        let rows: Vec<Vec<i128>> = (0..dim)
            .map(|i| (0..dim).map(|j| i128::from(i == j)).collect())
            .collect();
        Lattice { dim, denom: 1, basis: rows }
    }

    fn normalized(dim: usize, denom: i128, basis: Vec<Vec<i128>>) -> Self {
        // Reduce the common denominator as far as the basis allows.
        let g = basis
            .iter()
            .flatten()
            .fold(denom, |acc, x| acc.gcd(x));
        if g > 1 {
            let basis: Vec<Vec<i128>> = basis.iter().map(|r| r.iter().map(|x| x / g).collect()).collect();
            return Lattice { dim, denom: denom / g, basis: hnf(&basis, dim) };
        }
        Lattice { dim, denom, basis }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> Vec<RatVec> {
        self.basis
            .iter()
            .map(|r| r.iter().map(|x| Rat::new(*x, self.denom)).collect())
            .collect()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let (ints, l) = clear_denominators(v);
        // v * denom must be integral before reducing against the basis.
        if ints.iter().any(|x| (x * self.denom) % l != 0) {
            return false;
        }
        let mut w: Vec<i128> = ints.iter().map(|x| x * self.denom / l).collect();
        for row in &self.basis {
            let p = row.iter().position(|x| *x != 0).expect("hnf rows are nonzero");
            if w[p] % row[p] != 0 {
                return false;
            }
            let q = w[p] / row[p];
            for (x, y) in w.iter_mut().zip(row) {
                *x -= q * y;
            }
        }
        w.iter().all(Zero::is_zero)
    }

    pub fn contains_int(&self, v: &[i64]) -> bool {
        self.contains(&v.iter().map(|&x| rat(x as i128)).collect::<Vec<_>>())
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.basis().iter().all(|b| other.contains(b))
    }

    /// `[other : self]` when `self ⊆ other` and both have full rank.
    pub fn index_in(&self, other: &Lattice) -> Option<Rat> {
        if self.rank() != self.dim || other.rank() != other.dim || !self.is_sublattice_of(other) {
            return None;
        }
        Some((det(&self.basis()) / det(&other.basis())).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_vec;

    #[test]
    fn hnf_of_simple_lattice() {
        let h = hnf(&[vec![2, 1], vec![0, 3], vec![4, 5]], 2);
        assert_eq!(h, vec![vec![2, 1], vec![0, 3]]);
        let h = hnf(&[vec![3, 0], vec![5, 0]], 2);
        assert_eq!(h, vec![vec![1, 0]]);
    }

    #[test]
    fn membership_and_index() {
        let l = Lattice::from_int_generators(&[vec![2, 0], vec![0, 2], vec![1, 1]], 2);
        assert!(l.contains_int(&[1, 1]));
        assert!(!l.contains_int(&[1, 0]));
        assert_eq!(l.index_in(&Lattice::standard(2)), Some(rat(2)));
    }

    #[test]
    fn rational_lattice_equality() {
        let half = Lattice::from_generators(&[vec![Rat::new(1, 2), rat(0)], vec![rat(0), rat(1)]], 2);
        let other = Lattice::from_generators(&[rat_vec(&[1, 0]), vec![Rat::new(1, 2), rat(1)], rat_vec(&[0, 1])], 2);
        assert_eq!(half, other);
        assert!(Lattice::standard(2).is_sublattice_of(&half));
        assert_eq!(Lattice::standard(2).index_in(&half), Some(rat(2)));
    }
}
