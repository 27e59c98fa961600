//! Exact polyhedral cones: double description, extremality, affine hulls and face lattices.
//!
//! A normal vector `h` describes the half-space `{v : (h, v) ≤ 0}` where the
//! pairing is the invariant form given by a Gram matrix. Normals and rays are
//! reported as primitive integer vectors in sorted order.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, rat, solve_rows, AffineSolution, Echelon, Rat, RatMatrix, RatVec};
use crate::rootsys::Weight;

fn check_vectors(vs: &[RatVec], dim: usize) -> Result<()> {
    for v in vs {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        if linalg::is_zero_vec(v) {
            return Err(Error::InvalidArgument("zero generator".into()));
        }
    }
    Ok(())
}

/// Extreme rays of `{y : c·y ≤ 0 for every constraint c}` by the double description method.
///
/// The constraints must span, so that the cone is pointed.
pub fn dd_dual_rays(constraints: &[RatVec], dim: usize) -> Result<Vec<Vec<i64>>> {
    check_vectors(constraints, dim)?;
    let mut basis = Echelon::new(dim);
    let mut chosen = Vec::new();
    for (k, c) in constraints.iter().enumerate() {
        if basis.insert(c).is_some() {
            chosen.push(k);
        }
    }
    if chosen.len() < dim {
        return Err(Error::NotFullDimensional { rank: chosen.len(), dim });
    }
    let b: RatMatrix = chosen.iter().map(|&k| constraints[k].clone()).collect();
    let b_inv = linalg::inverse(&b).expect("chosen constraints are independent");
    // Ray j solves B r = -e_j, so it is tight on every basis row except j.
    let mut rays: Vec<(RatVec, Vec<usize>)> = (0..dim)
        .map(|j| {
            let r: RatVec = (0..dim).map(|i| -b_inv[i][j]).collect();
            let tight = chosen.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, &k)| k).collect();
            (normalize(&r), tight)
        })
        .collect();

    for (k, c) in constraints.iter().enumerate() {
        if chosen.contains(&k) {
            continue;
        }
        let values: Vec<Rat> = rays.iter().map(|(r, _)| dot(c, r)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let mut next: Vec<(RatVec, Vec<usize>)> = Vec::new();
        for &p in &plus {
            for &m in &minus {
                let common: Vec<usize> = rays[p].1.iter().filter(|t| rays[m].1.contains(t)).copied().collect();
                if common.len() + 2 < dim {
                    continue;
                }
                let rows: Vec<RatVec> = common.iter().map(|&t| constraints[t].clone()).collect();
                if linalg::rank(&rows) + 2 != dim {
                    continue;
                }
                let r: RatVec = rays[m]
                    .0
                    .iter()
                    .zip(&rays[p].0)
                    .map(|(a, b)| values[p] * a - values[m] * b)
                    .collect();
                let mut tight = common;
                tight.push(k);
                next.push((normalize(&r), tight));
            }
        }
        for (i, ray) in rays.into_iter().enumerate() {
            if values[i].is_zero() {
                let (r, mut tight) = ray;
                tight.push(k);
                next.push((r, tight));
            } else if values[i].is_negative() {
                next.push(ray);
            }
        }
        rays = next;
    }
    let mut out: Vec<Vec<i64>> = rays.iter().map(|(r, _)| linalg::primitive(r)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn normalize(r: &[Rat]) -> RatVec {
    linalg::rat_vec(&linalg::primitive(r))
}

/// Primitive outward facet normals of `cone(generators)`.
pub fn dd_facets(generators: &[RatVec], gram: &RatMatrix) -> Result<Vec<Weight>> {
    let dim = gram.len();
    let ys = dd_dual_rays(generators, dim)?;
    let gram_inv = linalg::inverse(gram).ok_or_else(|| Error::InvalidArgument("degenerate form".into()))?;
    let mut out: Vec<Weight> = ys
        .iter()
        .map(|y| Weight(linalg::primitive(&linalg::mat_vec(&gram_inv, &linalg::rat_vec(y)))))
        .collect();
    out.sort();
    Ok(out)
}

/// Primitive extreme rays of `{v : (h, v) ≤ 0 for every normal h}`.
pub fn dd_rays(normals: &[RatVec], gram: &RatMatrix) -> Result<Vec<Weight>> {
    let dim = gram.len();
    let constraints: Vec<RatVec> = normals.iter().map(|h| linalg::mat_vec(gram, h)).collect();
    Ok(dd_dual_rays(&constraints, dim)?.into_iter().map(Weight).collect())
}

/// Generators whose tight facet normals span a space of dimension `n - 1`,
/// reported once per ray as primitive vectors.
pub fn extreme_among(generators: &[RatVec], normals: &[RatVec], gram: &RatMatrix) -> Vec<Weight> {
    let dim = gram.len();
    let duals: Vec<RatVec> = normals.iter().map(|h| linalg::mat_vec(gram, h)).collect();
    let mut out: Vec<Weight> = generators
        .iter()
        .filter(|g| {
            let tight: Vec<RatVec> = duals.iter().filter(|y| dot(y, g).is_zero()).cloned().collect();
            dim >= 1 && linalg::rank(&tight) + 1 == dim
        })
        .map(|g| Weight(linalg::primitive(g)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Exact feasibility of `v = Σ c_k g_k` with `c ≥ 0`, by phase-one simplex with Bland's rule.
///
/// Independent of the double description code; used as a brute-force oracle.
pub fn in_cone_lp(generators: &[RatVec], v: &[Rat]) -> bool {
    let rows = v.len();
    let cols = generators.len();
    // Tableau: [A | I | b], one artificial variable per row.
    let mut t: Vec<RatVec> = (0..rows)
        .map(|i| {
            let flip = if v[i].is_negative() { rat(-1) } else { rat(1) };
            let mut row: RatVec = generators.iter().map(|g| g[i] * flip).collect();
            row.extend((0..rows).map(|j| if i == j { rat(1) } else { rat(0) }));
            row.push(v[i] * flip);
            row
        })
        .collect();
    let width = cols + rows;
    let mut basis: Vec<usize> = (cols..width).collect();
    loop {
        // Reduced costs of minimizing the sum of artificials.
        let reduced: Vec<Rat> = (0..width)
            .map(|j| {
                let cost = if j >= cols { rat(1) } else { rat(0) };
                let z: Rat = (0..rows)
                    .map(|i| if basis[i] >= cols { t[i][j] } else { rat(0) })
                    .sum();
                cost - z
            })
            .collect();
        let Some(enter) = (0..width).find(|&j| reduced[j].is_negative()) else { break };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..rows {
            if t[i][enter].is_positive() {
                let ratio = t[i][width] / t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        let p = t[r][enter];
        for x in t[r].iter_mut() {
            *x /= p;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let c = row[enter];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= c * y;
                }
            }
        }
        basis[r] = enter;
    }
    (0..rows).all(|i| basis[i] < cols || t[i][width].is_zero())
}

/// Generators `g` with `g ∉ cone(other generators)`, decided by linear programming.
pub fn extreme_brute_force(generators: &[RatVec]) -> Vec<Weight> {
    let prims: Vec<Vec<i64>> = generators.iter().map(|g| linalg::primitive(g)).collect();
    let mut distinct = prims.clone();
    distinct.sort();
    distinct.dedup();
    let as_rat: Vec<RatVec> = distinct.iter().map(|g| linalg::rat_vec(g)).collect();
    let mut out: Vec<Weight> = (0..distinct.len())
        .filter(|&k| {
            let others: Vec<RatVec> = (0..distinct.len()).filter(|&j| j != k).map(|j| as_rat[j].clone()).collect();
            !in_cone_lp(&others, &as_rat[k])
        })
        .map(|k| Weight(distinct[k].clone()))
        .collect();
    out.sort();
    out
}

/// Where the affine hull of a point set sits relative to the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineHull {
    /// The points are affinely spanning.
    FullDim,
    /// The affine hull is a proper linear subspace.
    ThroughOrigin,
    /// The affine hull misses the origin but has dimension below `n - 1`.
    Deficient { dim: usize },
    /// The unique `x` with `(x, p) = -1` for every point `p`.
    Hyperplane(RatVec),
}

pub fn affine_hull_normal(points: &[RatVec], gram: &RatMatrix) -> AffineHull {
    let n = gram.len();
    let rhs = vec![rat(-1); points.len()];
    match solve_rows(points, &rhs, n) {
        AffineSolution::Unique(y) => {
            let gram_inv = linalg::inverse(gram).expect("nondegenerate form");
            AffineHull::Hyperplane(linalg::mat_vec(&gram_inv, &y))
        }
        AffineSolution::Inconsistent { rank } if rank == n => AffineHull::FullDim,
        AffineSolution::Inconsistent { .. } => AffineHull::ThroughOrigin,
        AffineSolution::Underdetermined { rank } => AffineHull::Deficient { dim: rank.saturating_sub(1) },
    }
}

/// A full-dimensional pointed cone given by both descriptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalCone {
    pub rays: Vec<Weight>,
    pub facets: Vec<Weight>,
    gram: RatMatrix,
}

impl RationalCone {
    pub fn from_generators(generators: &[RatVec], gram: &RatMatrix) -> Result<Self> {
        let facets = dd_facets(generators, gram)?;
        let normals: Vec<RatVec> = facets.iter().map(Weight::to_rat).collect();
        let rays = extreme_among(generators, &normals, gram);
        Ok(RationalCone { rays, facets, gram: gram.clone() })
    }

    /// Assemble from already known rays and facet normals.
    pub fn from_parts(rays: Vec<Weight>, facets: Vec<Weight>, gram: &RatMatrix) -> Self {
        RationalCone { rays, facets, gram: gram.clone() }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    fn pairings(&self, v: &[Rat]) -> Vec<Rat> {
        let gv = linalg::mat_vec(&self.gram, v);
        self.facets.iter().map(|h| linalg::dot_int(&gv, &h.0)).collect()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.pairings(v).iter().all(|x| !x.is_positive())
    }

    pub fn contains_strictly(&self, v: &[Rat]) -> bool {
        self.pairings(v).iter().all(Signed::is_negative)
    }

    /// Face counts by dimension and the number of complete flags.
    pub fn face_lattice(&self) -> Result<FaceLattice> {
        face_lattice(&self.rays, &self.facets, &self.gram)
    }
}

/// Counts of faces per dimension (`0..=n`) and of complete flags of faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceLattice {
    pub faces_by_dim: Vec<usize>,
    pub flag_count: u128,
}

pub const FACE_LATTICE_RANK_CAP: usize = 6;

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(w, bits)| (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b))
    }
}

/// Face lattice of the cone with the given extreme rays and facet normals.
pub fn face_lattice(rays: &[Weight], facets: &[Weight], gram: &RatMatrix) -> Result<FaceLattice> {
    let n = gram.len();
    if n > FACE_LATTICE_RANK_CAP {
        return Err(Error::RankCap { rank: n, cap: FACE_LATTICE_RANK_CAP });
    }
    let ray_rat: Vec<RatVec> = rays.iter().map(Weight::to_rat).collect();
    let tight: Vec<Bits> = facets
        .iter()
        .map(|h| {
            let y = linalg::mat_vec(gram, &h.to_rat());
            let mut b = Bits::empty(rays.len());
            for (i, r) in ray_rat.iter().enumerate() {
                if dot(&y, r).is_zero() {
                    b.set(i);
                }
            }
            b
        })
        .collect();
    let rank_of = |b: &Bits| -> usize {
        let rows: Vec<RatVec> = b.iter().map(|i| ray_rat[i].clone()).collect();
        linalg::rank(&rows)
    };
    let mut top = Bits::empty(rays.len());
    for i in 0..rays.len() {
        top.set(i);
    }
    // levels[d]: faces of dimension d with their flag counts filled in later.
    let mut levels: Vec<Vec<Bits>> = vec![Vec::new(); n + 1];
    let mut children: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n + 1];
    levels[n].push(top);
    for d in (1..=n).rev() {
        let mut index: HashMap<Bits, usize> = HashMap::new();
        let mut below: Vec<Bits> = Vec::new();
        let mut kids_of_level = Vec::new();
        for face in &levels[d] {
            let mut kids = Vec::new();
            for t in &tight {
                let g = face.and(t);
                if &g == face {
                    continue;
                }
                if rank_of(&g) + 1 != d {
                    continue;
                }
                let id = *index.entry(g.clone()).or_insert_with(|| {
                    below.push(g);
                    below.len() - 1
                });
                if !kids.contains(&id) {
                    kids.push(id);
                }
            }
            kids_of_level.push(kids);
        }
        children[d] = kids_of_level;
        levels[d - 1] = below;
    }
    let mut flags: Vec<u128> = vec![1; levels[0].len()];
    for level in &children[1..=n] {
        flags = level.iter().map(|kids| kids.iter().map(|&k| flags[k]).sum()).collect();
    }
    Ok(FaceLattice {
        faces_by_dim: levels.iter().map(Vec::len).collect(),
        flag_count: flags.iter().sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::RootSystem;

    fn rv(v: &[i64]) -> RatVec {
        linalg::rat_vec(v)
    }

    fn identity_gram(n: usize) -> RatMatrix {
        linalg::identity(n)
    }

    #[test]
    fn chamber_facets_are_simple_roots() {
        let a2 = RootSystem::new(&"A2".parse().unwrap()).unwrap();
        let f = dd_facets(&[rv(&[-1, 0]), rv(&[0, -1])], a2.gram()).unwrap();
        assert_eq!(f, vec![Weight(vec![-1, 2]), Weight(vec![2, -1])]);
        let r = dd_rays(&[rv(&[2, -1]), rv(&[-1, 2])], a2.gram()).unwrap();
        assert_eq!(r, vec![Weight(vec![-1, 0]), Weight(vec![0, -1])]);
    }

    #[test]
    fn square_pyramid_cone() {
        let g = identity_gram(3);
        let gens = [rv(&[1, 1, 1]), rv(&[1, -1, 1]), rv(&[-1, 1, 1]), rv(&[-1, -1, 1]), rv(&[0, 0, 1])];
        let cone = RationalCone::from_generators(&gens, &g).unwrap();
        assert_eq!(cone.facets.len(), 4);
        assert_eq!(cone.rays.len(), 4);
        assert_eq!(extreme_brute_force(&gens), cone.rays);
        let fl = cone.face_lattice().unwrap();
        assert_eq!(fl.faces_by_dim, vec![1, 4, 4, 1]);
        assert_eq!(fl.flag_count, 8);
        assert!(cone.contains_strictly(&rv(&[0, 0, 1])));
        assert!(cone.contains(&rv(&[1, 1, 1])));
        assert!(!cone.contains_strictly(&rv(&[1, 1, 1])));
        assert!(!cone.contains(&rv(&[0, 0, -1])));
    }

    #[test]
    fn flags_of_small_cones() {
        let g2 = identity_gram(2);
        let c = RationalCone::from_generators(&[rv(&[1, 0]), rv(&[1, 1])], &g2).unwrap();
        assert_eq!(c.face_lattice().unwrap().flag_count, 2);
        let g3 = identity_gram(3);
        let c = RationalCone::from_generators(&[rv(&[1, 0, 0]), rv(&[0, 1, 0]), rv(&[0, 0, 1])], &g3).unwrap();
        assert_eq!(c.face_lattice().unwrap().flag_count, 6);
    }

    #[test]
    fn rejects_bad_input() {
        let g = identity_gram(3);
        assert!(matches!(
            dd_facets(&[rv(&[1, 0, 0]), rv(&[0, 1, 0])], &g),
            Err(Error::NotFullDimensional { .. })
        ));
        assert!(matches!(dd_facets(&[rv(&[0, 0, 0])], &g), Err(Error::InvalidArgument(_))));
        let big = identity_gram(7);
        assert!(matches!(face_lattice(&[], &[], &big), Err(Error::RankCap { .. })));
    }

    #[test]
    fn affine_hull_cases() {
        let a2 = RootSystem::new(&"A2".parse().unwrap()).unwrap();
        assert_eq!(
            affine_hull_normal(&[rv(&[0, -1]), rv(&[-1, 1])], a2.gram()),
            AffineHull::Hyperplane(rv(&[3, 0]))
        );
        assert_eq!(
            affine_hull_normal(&[rv(&[-1, 0]), rv(&[0, -1])], a2.gram()),
            AffineHull::Hyperplane(rv(&[1, 1]))
        );
        let g = identity_gram(2);
        assert_eq!(
            affine_hull_normal(&[rv(&[1, 0]), rv(&[0, 1]), rv(&[1, 1])], &g),
            AffineHull::FullDim
        );
        assert_eq!(affine_hull_normal(&[rv(&[1, 1]), rv(&[-1, -1])], &g), AffineHull::ThroughOrigin);
        assert_eq!(affine_hull_normal(&[rv(&[1, 1])], &g), AffineHull::Deficient { dim: 0 });
    }

    #[test]
    fn lp_membership() {
        let gens = [rv(&[1, 0]), rv(&[0, 1])];
        assert!(in_cone_lp(&gens, &rv(&[2, 3])));
        assert!(!in_cone_lp(&gens, &rv(&[-1, 3])));
        assert!(in_cone_lp(&gens, &rv(&[0, 0])));
        assert!(!in_cone_lp(&[], &rv(&[1, 0])));
    }
}
