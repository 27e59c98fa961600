//! Cartan data for the irreducible root systems and their products.
//!
//! Conventions: node labels are 1-based and follow Bourbaki's tables. Vectors
//! live in the fundamental-weight basis (ω-coordinates), so the weight lattice
//! `Λ_P` is `Z^n` and the simple root `α_j` is the `j`-th column of the Cartan
//! matrix `A_ij = ⟨α_j, α_i^∨⟩`. The invariant form is normalized on each
//! irreducible component so that short roots have squared length 2.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{self, dot, rat, Rat, RatMatrix, RatVec};
use crate::weyl;

/// Cartan-Killing family letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub const ALL: [Family; 7] = [Family::A, Family::B, Family::C, Family::D, Family::E, Family::F, Family::G];

    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.letter() == c.to_ascii_uppercase())
    }

    /// Ranks for which this family is defined. `D3` is accepted separately as an alias.
    pub fn admits(self, rank: usize) -> bool {
        match self {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One irreducible factor, e.g. `B3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Component {
    pub family: Family,
    pub rank: usize,
}

impl Component {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        if family == Family::D && rank == 3 {
            return Ok(Component { family: Family::A, rank: 3 });
        }
        if !family.admits(rank) {
            return Err(Error::InvalidArgument(format!("no root system of type {family}{rank}")));
        }
        Ok(Component { family, rank })
    }

    /// Simple roots in the standard Euclidean realization (ε-coordinates).
    pub fn euclidean_simple_roots(&self) -> Vec<RatVec> {
        let n = self.rank;
        let unit = |dim: usize, i: usize| -> RatVec {
            let mut v = vec![Rat::zero(); dim];
            v[i] = Rat::one();
            v
        };
        let diff = |dim: usize, i: usize, j: usize| -> RatVec {
            let mut v = unit(dim, i);
            v[j] -= Rat::one();
            v
        };
        let half = Rat::new(1, 2);
        match self.family {
            Family::A => (0..n).map(|i| diff(n + 1, i, i + 1)).collect(),
            Family::B | Family::C | Family::D => {
                let mut roots: Vec<RatVec> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
                roots.push(match self.family {
                    Family::B => unit(n, n - 1),
                    Family::C => unit(n, n - 1).iter().map(|x| x * rat(2)).collect(),
                    _ => {
                        let mut v = unit(n, n - 1);
                        v[n - 2] = Rat::one();
                        v
                    }
                });
                roots
            }
            Family::E => {
                let mut a1 = vec![-half; 8];
                a1[0] = half;
                a1[7] = half;
                let mut a2 = unit(8, 0);
                a2[1] = Rat::one();
                let mut roots = vec![a1, a2, diff(8, 1, 0)];
                roots.extend((2..7).map(|i| diff(8, i, i - 1)));
                roots.truncate(n);
                roots
            }
            Family::F => vec![
                diff(4, 1, 2),
                diff(4, 2, 3),
                unit(4, 3),
                vec![half, -half, -half, -half],
            ],
            Family::G => vec![diff(3, 0, 1), vec![rat(-2), rat(1), rat(1)]],
        }
    }

    /// ω-coordinates `⟨v, α_i^∨⟩` of a Euclidean vector.
    pub fn omega_coords(&self, v: &[Rat]) -> RatVec {
        self.euclidean_simple_roots()
            .iter()
            .map(|a| rat(2) * dot(v, a) / dot(a, a))
            .collect()
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

impl FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = chars
            .next()
            .and_then(Family::from_letter)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown type '{s}'")))?;
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad rank in '{s}'")))?;
        Component::new(family, rank)
    }
}

/// A possibly reducible Cartan type, e.g. `A2xB3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootSystemSpec {
    pub components: Vec<Component>,
}

impl RootSystemSpec {
    pub fn irreducible(family: Family, rank: usize) -> Result<Self> {
        Ok(RootSystemSpec { components: vec![Component::new(family, rank)?] })
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }
}

impl fmt::Display for RootSystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for RootSystemSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let components = s
            .split(['x', 'X', '×', '*'])
            .map(str::parse)
            .collect::<Result<Vec<Component>>>()?;
        if components.is_empty() {
            return Err(Error::InvalidArgument("empty root system type".into()));
        }
        Ok(RootSystemSpec { components })
    }
}

/// A lattice vector in ω-coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(vec![0; n])
    }

    /// `ω_label` (1-based label).
    pub fn fundamental(n: usize, label: usize) -> Self {
        let mut v = vec![0; n];
        v[label - 1] = 1;
        Weight(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| *x == 0)
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|x| k * x).collect())
    }

    /// 1-based labels of the nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, x)| **x != 0).map(|(i, _)| i + 1).collect()
    }

    pub fn is_antidominant(&self) -> bool {
        self.0.iter().all(|x| *x <= 0)
    }

    pub fn to_rat(&self) -> RatVec {
        linalg::rat_vec(&self.0)
    }

    pub fn primitive(&self) -> Weight {
        Weight(linalg::primitive_int(&self.0))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The anti-dominant weight `-Σ_{i∈support} ω_i`.
pub fn antidominant_weight(n: usize, support: &[usize]) -> Weight {
    let mut v = vec![0; n];
    for &i in support {
        v[i - 1] = -1;
    }
    Weight(v)
}

/// Cartan matrix, invariant form and root set of a (possibly reducible) root system.
#[derive(Clone, Debug)]
pub struct RootSystem {
    spec: RootSystemSpec,
    cartan: Vec<Vec<i64>>,
    gram: RatMatrix,
    gram_inv: RatMatrix,
    blocks: Vec<Range<usize>>,
    roots: Vec<Weight>,
}

impl RootSystem {
    pub fn new(spec: &RootSystemSpec) -> Result<Self> {
        if spec.components.is_empty() {
            return Err(Error::InvalidArgument("empty root system".into()));
        }
        let n = spec.rank();
        let mut cartan = vec![vec![0i64; n]; n];
        let mut gram = vec![vec![Rat::zero(); n]; n];
        let mut blocks = Vec::new();
        let mut offset = 0;
        for comp in &spec.components {
            let (a, g) = component_data(comp);
            let r = comp.rank;
            for i in 0..r {
                for j in 0..r {
                    cartan[offset + i][offset + j] = a[i][j];
                    gram[offset + i][offset + j] = g[i][j];
                }
            }
            blocks.push(offset..offset + r);
            offset += r;
        }
        let gram_inv = linalg::inverse(&gram).expect("invariant form is nondegenerate");
        let mut rs = RootSystem { spec: spec.clone(), cartan, gram, gram_inv, blocks, roots: Vec::new() };
        rs.roots = rs.enumerate_roots();
        Ok(rs)
    }

    pub fn irreducible(family: Family, rank: usize) -> Result<Self> {
        Self::new(&RootSystemSpec::irreducible(family, rank)?)
    }

    fn enumerate_roots(&self) -> Vec<Weight> {
        let all: Vec<usize> = (1..=self.rank()).collect();
        let mut roots: Vec<Weight> = (1..=self.rank())
            .flat_map(|i| weyl::orbit(self, &all, &self.simple_root(i)).expect("valid labels"))
            .collect();
        roots.sort();
        roots.dedup();
        roots
    }

    pub fn spec(&self) -> &RootSystemSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &RatMatrix {
        &self.gram_inv
    }

    /// Index ranges of the irreducible blocks.
    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, label: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&(label - 1))).expect("label in range")
    }

    pub fn check_label(&self, label: usize) -> Result<()> {
        if label == 0 || label > self.rank() {
            return Err(Error::IndexOutOfRange { index: label, rank: self.rank() });
        }
        Ok(())
    }

    /// `α_label` in ω-coordinates.
    pub fn simple_root(&self, label: usize) -> Weight {
        Weight(self.cartan.iter().map(|row| row[label - 1]).collect())
    }

    pub fn simple_roots(&self) -> Vec<Weight> {
        (1..=self.rank()).map(|i| self.simple_root(i)).collect()
    }

    /// Squared length of `α_label`.
    pub fn simple_root_norm(&self, label: usize) -> Rat {
        let a = self.simple_root(label).to_rat();
        self.inner(&a, &a)
    }

    pub fn inner(&self, a: &[Rat], b: &[Rat]) -> Rat {
        dot(a, &linalg::mat_vec(&self.gram, b))
    }

    pub fn inner_int(&self, a: &Weight, b: &Weight) -> Rat {
        self.inner(&a.to_rat(), &b.to_rat())
    }

    /// Coefficients of the functional `v ↦ (x, v)` on the ω basis, i.e. `G x`.
    pub fn dual_coords(&self, x: &[Rat]) -> RatVec {
        linalg::mat_vec(&self.gram, x)
    }

    /// Inverse of [`Self::dual_coords`].
    pub fn from_dual_coords(&self, y: &[Rat]) -> RatVec {
        linalg::mat_vec(&self.gram_inv, y)
    }

    /// All roots, sorted lexicographically.
    pub fn all_roots(&self) -> &[Weight] {
        &self.roots
    }

    pub fn is_root(&self, v: &Weight) -> bool {
        self.roots.binary_search(v).is_ok()
    }

    /// `[Λ_P : Λ_R]`, computed from the Hermite form of the simple roots.
    pub fn weight_lattice_index(&self) -> u128 {
        let roots: Vec<Vec<i64>> = self.simple_roots().into_iter().map(|w| w.0).collect();
        let idx = Lattice::from_int_generators(&roots, self.rank())
            .index_in(&Lattice::standard(self.rank()))
            .expect("root lattice has full rank");
        idx.to_integer() as u128
    }
}

/// Cartan matrix and normalized Gram matrix of fundamental weights for one component.
fn component_data(comp: &Component) -> (Vec<Vec<i64>>, RatMatrix) {
    let e = comp.euclidean_simple_roots();
    let r = comp.rank;
    let b_euclid: RatMatrix = e.iter().map(|a| e.iter().map(|b| dot(a, b)).collect()).collect();
    let short = (0..r).map(|i| b_euclid[i][i]).min().expect("rank is positive");
    let scale = rat(2) / short;
    let b: RatMatrix = b_euclid.iter().map(|row| row.iter().map(|x| x * scale).collect()).collect();
    let cartan: Vec<Vec<i64>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let c = rat(2) * b[i][j] / b[i][i];
                    debug_assert!(c.is_integer());
                    c.to_integer() as i64
                })
                .collect()
        })
        .collect();
    let a_rat: RatMatrix = cartan.iter().map(|row| linalg::rat_vec(row)).collect();
    let a_inv = linalg::inverse(&a_rat).expect("Cartan matrix is invertible");
    // (ω_i, α_j) = δ_ij (α_i, α_i)/2, hence G = D A^{-1}.
    let gram: RatMatrix = (0..r)
        .map(|i| (0..r).map(|j| b[i][i] / rat(2) * a_inv[i][j]).collect())
        .collect();
    (cartan, gram)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        RootSystem::new(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn a2_gram() {
        let r = rs("A2");
        let third = |k| Rat::new(k, 3);
        assert_eq!(r.gram(), &vec![vec![third(2), third(1)], vec![third(1), third(2)]]);
    }

    #[test]
    fn b2_gram_and_short_root() {
        let r = rs("B2");
        assert_eq!(r.gram(), &vec![vec![rat(2), rat(1)], vec![rat(1), rat(1)]]);
        assert_eq!(r.simple_root(2), Weight(vec![-1, 2]));
        assert_eq!(r.simple_root_norm(2), rat(2));
        assert_eq!(r.simple_root_norm(1), rat(4));
    }

    #[test]
    fn g2_cartan_and_lengths() {
        let r = rs("G2");
        assert_eq!(r.cartan(), &[vec![2, -3], vec![-1, 2]]);
        assert_eq!(r.simple_root_norm(1), rat(2));
        assert_eq!(r.simple_root_norm(2), rat(6));
    }

    #[test]
    fn root_counts() {
        let count = |s: &str| rs(s).all_roots().len();
        assert_eq!(count("A2"), 6);
        assert_eq!(count("B3"), 18);
        assert_eq!(count("G2"), 12);
        assert_eq!(count("F4"), 48);
        assert_eq!(count("E6"), 72);
        assert_eq!(count("E7"), 126);
        assert_eq!(count("E8"), 240);
        assert_eq!(count("D5"), 40);
        assert_eq!(count("A1xA1"), 4);
    }

    #[test]
    fn short_root_counts() {
        let short = |s: &str| {
            let r = rs(s);
            r.all_roots().iter().filter(|a| r.inner_int(a, a) == rat(2)).count()
        };
        assert_eq!(short("B3"), 6);
        assert_eq!(short("G2"), 6);
        assert_eq!(short("C3"), 12);
    }

    #[test]
    fn lattice_indices() {
        let idx = |s: &str| rs(s).weight_lattice_index();
        assert_eq!(idx("A4"), 5);
        assert_eq!(idx("B3"), 2);
        assert_eq!(idx("C4"), 2);
        assert_eq!(idx("D5"), 4);
        assert_eq!(idx("E6"), 3);
        assert_eq!(idx("E7"), 2);
        assert_eq!(idx("E8"), 1);
        assert_eq!(idx("F4"), 1);
        assert_eq!(idx("G2"), 1);
    }

    #[test]
    fn d3_is_a3() {
        assert_eq!("D3".parse::<Component>().unwrap(), Component { family: Family::A, rank: 3 });
        assert!("E9".parse::<Component>().is_err());
        assert!("B1".parse::<Component>().is_err());
    }

    #[test]
    fn product_is_block_diagonal() {
        let r = rs("A2xG2");
        assert_eq!(r.rank(), 4);
        assert_eq!(r.cartan()[0][2], 0);
        assert_eq!(r.cartan()[2][3], -3);
        assert_eq!(r.gram()[1][3], rat(0));
    }

    #[test]
    fn euclidean_coordinates_round_trip() {
        // In C_n the vector ε_n is ω_n − ω_{n−1}.
        let c3 = Component::new(Family::C, 3).unwrap();
        let e3 = vec![rat(0), rat(0), rat(1)];
        assert_eq!(c3.omega_coords(&e3), vec![rat(0), rat(-1), rat(1)]);
        // In B_n, ε_n is 2ω_n − ω_{n−1}.
        let b3 = Component::new(Family::B, 3).unwrap();
        assert_eq!(b3.omega_coords(&e3), vec![rat(0), rat(-1), rat(2)]);
    }
}
