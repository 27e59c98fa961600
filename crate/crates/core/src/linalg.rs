//! Exact rational linear algebra over small dense matrices.
//!
//! Everything here works with `Ratio<i128>`; the dimensions involved are at
//! most eight and the entries are small, so overflow would indicate a bug.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rat = Ratio<i128>;
pub type RatVec = Vec<Rat>;
pub type RatMatrix = Vec<Vec<Rat>>;

pub fn rat(n: i128) -> Rat {
    Rat::from_integer(n)
}

pub fn rat_vec(v: &[i64]) -> RatVec {
    v.iter().map(|&x| rat(x as i128)).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_int(a: &[Rat], b: &[i64]) -> Rat {
    a.iter()
        .zip(b)
        .fold(Rat::zero(), |acc, (x, &y)| acc + x * rat(y as i128))
}

pub fn mat_vec(m: &[Vec<Rat>], v: &[Rat]) -> RatVec {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> RatMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(Rat::zero(), |acc, (x, r)| acc + x * r[j]))
                .collect()
        })
        .collect()
}

pub fn transpose(m: &[Vec<Rat>]) -> RatMatrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect()
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Incrementally maintained reduced row-echelon basis.
///
/// Used both for rank computations with early exit and for solving
/// over-determined consistent systems (augment the rows with the right-hand side).
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<(usize, RatVec)>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, v: &mut RatVec) {
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let c = v[*p];
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= c * r;
                }
            }
        }
    }

    /// Reduce `v` against the current basis; returns the residual.
    pub fn residual(&self, v: &[Rat]) -> RatVec {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        is_zero_vec(&self.residual(v))
    }

    /// Insert a row; returns the pivot column if it was independent.
    pub fn insert(&mut self, v: &[Rat]) -> Option<usize> {
        debug_assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let p = w.iter().position(|x| !x.is_zero())?;
        let inv = w[p].recip();
        for x in w.iter_mut() {
            *x *= inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p];
                for (x, y) in row.iter_mut().zip(&w) {
                    *x -= c * y;
                }
            }
        }
        self.rows.push((p, w));
        Some(p)
    }

    pub fn insert_int(&mut self, v: &[i64]) -> Option<usize> {
        self.insert(&rat_vec(v))
    }

    pub fn pivots(&self) -> impl Iterator<Item = (usize, &RatVec)> {
        self.rows.iter().map(|(p, r)| (*p, r))
    }
}

pub fn rank(rows: &[RatVec]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut e = Echelon::new(first.len());
    for r in rows {
        e.insert(r);
        if e.rank() == e.dim() {
            break;
        }
    }
    e.rank()
}

pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    rank(&rows.iter().map(|r| rat_vec(r)).collect::<Vec<_>>())
}

/// Outcome of solving `rows · y = rhs` for the unknown `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    Unique(RatVec),
    Inconsistent { rank: usize },
    Underdetermined { rank: usize },
}

pub fn solve_rows(rows: &[RatVec], rhs: &[Rat], n: usize) -> AffineSolution {
    let mut e = Echelon::new(n + 1);
    let mut inconsistent = false;
    for (r, b) in rows.iter().zip(rhs) {
        let mut aug = r.clone();
        aug.push(*b);
        if e.insert(&aug) == Some(n) {
            inconsistent = true;
            break;
        }
    }
    let coeff_rank = e.pivots().filter(|(p, _)| *p < n).count();
    if inconsistent {
        return AffineSolution::Inconsistent { rank: rank(rows) };
    }
    if coeff_rank < n {
        return AffineSolution::Underdetermined { rank: coeff_rank };
    }
    let mut y = vec![Rat::zero(); n];
    for (p, row) in e.pivots() {
        y[p] = row[n];
    }
    AffineSolution::Unique(y)
}

pub fn inverse(m: &[RatVec]) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let c = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= c * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det(m: &[RatVec]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Rat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            a.swap(col, piv);
            d = -d;
        }
        d *= a[col][col];
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let c = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= c * y;
                }
            }
        }
    }
    d
}

pub fn det_int(m: &[Vec<i64>]) -> i128 {
    let d = det(&m.iter().map(|r| rat_vec(r)).collect::<Vec<_>>());
    debug_assert!(d.is_integer());
    d.to_integer()
}

/// Basis of `{x : rows · x = 0}`.
pub fn nullspace(rows: &[RatVec], n: usize) -> Vec<RatVec> {
    let mut e = Echelon::new(n);
    for r in rows {
        e.insert(r);
    }
    let pivots: Vec<(usize, RatVec)> = e.pivots().map(|(p, r)| (p, r.clone())).collect();
    let pivot_cols: Vec<usize> = pivots.iter().map(|(p, _)| *p).collect();
    (0..n)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut x = vec![Rat::zero(); n];
            x[free] = Rat::one();
            for (p, row) in &pivots {
                x[*p] = -row[free];
            }
            x
        })
        .collect()
}

fn lcm_denominators(v: &[Rat]) -> i128 {
    v.iter().fold(1i128, |acc, x| acc.lcm(x.denom()))
}

/// Primitive integer vector on the ray through `v` (sign kept).
pub fn primitive(v: &[Rat]) -> Vec<i64> {
    let l = lcm_denominators(v);
    let ints: Vec<i128> = v.iter().map(|x| (x * rat(l)).to_integer()).collect();
    let g = ints.iter().fold(0i128, |acc, x| acc.gcd(x));
    if g == 0 {
        return vec![0; v.len()];
    }
    ints.iter()
        .map(|x| i64::try_from(x / g).expect("primitive vector entry exceeds i64"))
        .collect()
}

pub fn primitive_int(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, x| acc.gcd(x));
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

/// Scale a rational vector by the least common denominator, returning the
/// integer vector and the scale.
pub fn clear_denominators(v: &[Rat]) -> (Vec<i128>, i128) {
    let l = lcm_denominators(v);
    (v.iter().map(|x| (x * rat(l)).to_integer()).collect(), l)
}

pub fn is_integral(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Render as `p/q` (or `p` for integers).
pub fn rat_string(x: &Rat) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn sign(x: &Rat) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
