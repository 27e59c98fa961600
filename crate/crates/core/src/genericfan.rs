//! The cone `σ_λ` (union of the `W_λ`-translates of the anti-dominant chamber),
//! its primitive generators, the anti-canonical normal and the Fano classification.

use std::collections::BTreeSet;

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, rat, Echelon, RatMatrix, RatVec};
use crate::polyhedral::{self, AffineHull};
use crate::rootsys::{antidominant_weight, Family, RootSystem, Weight};
use crate::weyl::{self, Reflection};

/// Above this rank the brute-force oracles are skipped.
pub const ORACLE_RANK_CAP: usize = 4;

/// Cap on the explicit orbit used to recount maximal cones.
const CONE_RECOUNT_CAP: u128 = 5_000_000;

/// Result of building a union of chambers of some root base.
#[derive(Clone, Debug)]
pub(crate) struct ChamberUnion {
    /// Orbit of the `k`-th chamber ray under the stabilizer, for every `k`.
    pub generator_orbits: Vec<Vec<Weight>>,
    pub facet_normals: Vec<Weight>,
    /// Whether the `k`-th chamber ray spans an extreme ray.
    pub extreme: Vec<bool>,
}

/// Integer functional with the same sign as `v ↦ (h, v)`.
fn sign_functional(gram: &RatMatrix, h: &Weight) -> Vec<i64> {
    linalg::primitive(&linalg::mat_vec(gram, &h.to_rat()))
}

fn eval(f: &[i64], v: &[i64]) -> i64 {
    f.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn tight_rank_reaches(dim: usize, vectors: impl Iterator<Item = Vec<i64>>) -> bool {
    if dim <= 1 {
        return true;
    }
    let mut e = Echelon::new(dim);
    for v in vectors {
        e.insert_int(&v);
        if e.rank() + 1 >= dim {
            return true;
        }
    }
    false
}

/// Union of the chambers `w·𝒞` for `w` in the subgroup generated by the base
/// reflections outside `support`.
///
/// `chamber_rays[k]` is the primitive ray dual to `base[k]` (the chamber is
/// their cone) and `support` lists 1-based positions in `base`.
pub(crate) fn chamber_union(
    gram: &RatMatrix,
    base: &[Reflection],
    chamber_rays: &[Weight],
    support: &[usize],
) -> ChamberUnion {
    let dim = gram.len();
    let stab: Vec<Reflection> = (1..=base.len())
        .filter(|l| !support.contains(l))
        .map(|l| base[l - 1].clone())
        .collect();
    let generator_orbits: Vec<Vec<Weight>> =
        chamber_rays.par_iter().map(|r| weyl::orbit_under(&stab, r)).collect();
    let generators: Vec<&Weight> = generator_orbits.iter().flatten().collect();

    let mut candidates: Vec<Weight> = support
        .iter()
        .flat_map(|&l| weyl::orbit_under(&stab, &Weight(base[l - 1].root.clone()).primitive()))
        .collect();
    candidates.sort();
    candidates.dedup();

    let facet_normals: Vec<Weight> = candidates
        .into_par_iter()
        .filter(|h| {
            let f = sign_functional(gram, h);
            if generators.iter().any(|g| eval(&f, &g.0) > 0) {
                return false;
            }
            tight_rank_reaches(
                dim,
                generators.iter().filter(|g| eval(&f, &g.0) == 0).map(|g| g.0.clone()),
            )
        })
        .collect();

    let functionals: Vec<Vec<i64>> = facet_normals.iter().map(|h| sign_functional(gram, h)).collect();
    let extreme: Vec<bool> = chamber_rays
        .iter()
        .map(|r| {
            tight_rank_reaches(
                dim,
                functionals.iter().zip(&facet_normals).filter(|(f, _)| eval(f, &r.0) == 0).map(|(_, h)| h.0.clone()),
            )
        })
        .collect();
    ChamberUnion { generator_orbits, facet_normals, extreme }
}

/// The cone `σ_λ` for an anti-dominant weight `λ`, described by its support.
#[derive(Clone, Debug)]
pub struct GenericFan {
    rs: RootSystem,
    support: Vec<usize>,
    stabilizer: Vec<usize>,
    generator_orbits: Vec<Vec<Weight>>,
    facet_normals: Vec<Weight>,
    prim: Vec<Weight>,
    j_lambda: Vec<usize>,
    max_cone_count: u128,
}

/// Build `σ_λ` for `λ = -Σ_{i∈support} ω_i`.
///
/// Only the support matters: the stabilizer `W_λ` is generated by the simple
/// reflections outside it. The support must meet every irreducible component,
/// otherwise the cone contains a line.
pub fn build_sigma(rs: &RootSystem, support: &[usize]) -> Result<GenericFan> {
    let mut support: Vec<usize> = support.to_vec();
    support.sort_unstable();
    support.dedup();
    if support.is_empty() {
        return Err(Error::InvalidArgument("support must be non-empty".into()));
    }
    for &l in &support {
        rs.check_label(l)?;
    }
    for (b, block) in rs.blocks().iter().enumerate() {
        if !support.iter().any(|l| block.contains(&(l - 1))) {
            return Err(Error::InvalidArgument(format!(
                "support does not meet component {} ({}); the cone would not be strictly convex",
                b + 1,
                rs.spec().components[b]
            )));
        }
    }
    let n = rs.rank();
    let base: Vec<Reflection> = (1..=n).map(|l| Reflection::simple(rs, l)).collect();
    let rays: Vec<Weight> = (1..=n).map(|l| Weight::fundamental(n, l).neg()).collect();
    let cu = chamber_union(rs.gram(), &base, &rays, &support);
    let j_lambda: Vec<usize> = (1..=n).filter(|&l| cu.extreme[l - 1]).collect();
    let mut prim: Vec<Weight> = j_lambda.iter().flat_map(|&l| cu.generator_orbits[l - 1].clone()).collect();
    prim.sort();
    let max_cone_count = weyl::coset_count(rs, &support)?;
    Ok(GenericFan {
        rs: rs.clone(),
        stabilizer: weyl::complement(rs, &support),
        support,
        generator_orbits: cu.generator_orbits,
        facet_normals: cu.facet_normals,
        prim,
        j_lambda,
        max_cone_count,
    })
}

/// Build from an explicit anti-dominant weight, reducing it to its support.
pub fn build_sigma_from_weight(rs: &RootSystem, weight: &Weight) -> Result<GenericFan> {
    if weight.len() != rs.rank() {
        return Err(Error::DimensionMismatch { expected: rs.rank(), found: weight.len() });
    }
    if !weight.is_antidominant() {
        return Err(Error::InvalidArgument(format!("{weight} is not anti-dominant")));
    }
    build_sigma(rs, &weight.support())
}

/// The functional `n_λ` with `(n_λ, p) = -1` on every primitive generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalData {
    /// `n_λ` in ω-coordinates.
    pub vector: RatVec,
    /// Primitive integer vector on the ray of `n_λ`.
    pub direction: Weight,
    /// `φ(ω_j) = (n_λ, ω_j)`.
    pub phi: RatVec,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub q_gorenstein_fano: bool,
    pub gorenstein_fano: bool,
    pub smooth: bool,
    pub fano: bool,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub flags: Flags,
    pub hull: AffineHull,
    pub normal: Option<NormalData>,
    /// Determinant of the primitive generators when there are exactly `n` of them.
    pub prim_det: Option<i128>,
    pub diagnostics: Vec<String>,
}

impl GenericFan {
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    /// Sorted 1-based support `I_λ`.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weight(&self) -> Weight {
        antidominant_weight(self.rank(), &self.support)
    }

    /// Labels generating `W_λ`.
    pub fn stabilizer(&self) -> &[usize] {
        &self.stabilizer
    }

    /// `W_λ · (-ω_k)` for `k = 1..n`.
    pub fn generator_orbits(&self) -> &[Vec<Weight>] {
        &self.generator_orbits
    }

    pub fn generators(&self) -> Vec<Weight> {
        let mut g: Vec<Weight> = self.generator_orbits.iter().flatten().cloned().collect();
        g.sort();
        g
    }

    pub fn facet_normals(&self) -> &[Weight] {
        &self.facet_normals
    }

    /// Primitive generators of the extreme rays, sorted.
    pub fn prim(&self) -> &[Weight] {
        &self.prim
    }

    /// Labels `j` with `-ω_j` among the primitive generators.
    pub fn j_lambda(&self) -> &[usize] {
        &self.j_lambda
    }

    /// `|W| / |W_λ|`.
    pub fn max_cone_count(&self) -> u128 {
        self.max_cone_count
    }

    fn prim_rat(&self) -> Vec<RatVec> {
        self.prim.iter().map(Weight::to_rat).collect()
    }

    pub fn affine_hull(&self) -> AffineHull {
        polyhedral::affine_hull_normal(&self.prim_rat(), self.rs.gram())
    }

    /// `n_λ`, present exactly when the primitive generators span an affine hyperplane off the origin.
    pub fn normal_functional(&self) -> Option<NormalData> {
        normal_from_hull(&self.rs, &self.affine_hull())
    }

    /// Sum of the primitive generators.
    pub fn baricenter(&self) -> Result<Weight> {
        let mut b = Weight::zero(self.rank());
        for p in &self.prim {
            b = b.add(p);
        }
        if b.support() != self.support {
            return Err(Error::Invariant(format!(
                "baricenter {b} has support {:?}, expected {:?}",
                b.support(),
                self.support
            )));
        }
        Ok(b)
    }

    /// Compare the affine hull of the primitive generators with
    /// `-ω_k + span({α_i : i ∉ I_λ} ∪ {ω_i - ω_k : i ∈ J_λ})`.
    pub fn aff_hull_directions_check(&self) -> bool {
        let Some(&k) = self.j_lambda.first() else { return false };
        let n = self.rank();
        let base = Weight::fundamental(n, k).neg();
        if self.prim.binary_search(&base).is_err() {
            return false;
        }
        let observed: Vec<RatVec> = self.prim.iter().map(|p| p.sub(&base).to_rat()).collect();
        let mut predicted: Vec<RatVec> = self.stabilizer.iter().map(|&i| self.rs.simple_root(i).to_rat()).collect();
        predicted.extend(
            self.j_lambda
                .iter()
                .map(|&i| Weight::fundamental(n, i).sub(&Weight::fundamental(n, k)).to_rat()),
        );
        let r1 = linalg::rank(&observed);
        let r2 = linalg::rank(&predicted);
        let mut both = observed;
        both.extend(predicted);
        r1 == r2 && linalg::rank(&both) == r1
    }

    /// Whether `-n_λ` lies in the interior of `σ_λ` (the local form of the Fano condition).
    fn minus_normal_interior(&self, normal: &NormalData) -> bool {
        let minus: RatVec = normal.vector.iter().map(|x| -x).collect();
        let y = self.rs.dual_coords(&minus);
        self.facet_normals.iter().all(|h| linalg::dot_int(&y, &h.0).is_negative())
    }

    /// Structural invariants that must hold for every support.
    pub fn check_invariants(&self) -> Result<()> {
        let b = self.baricenter()?;
        // Recount the maximal cones as the W-orbit of the interior point b.
        if self.max_cone_count <= CONE_RECOUNT_CAP {
            let all: Vec<usize> = (1..=self.rank()).collect();
            let count = weyl::orbit(&self.rs, &all, &b)?.len() as u128;
            if count != self.max_cone_count {
                return Err(Error::Invariant(format!(
                    "fan has {count} maximal cones, expected |W|/|W_λ| = {}",
                    self.max_cone_count
                )));
            }
        }
        // Extremality must not depend on the choice of orbit representative.
        let normals: Vec<RatVec> = self.facet_normals.iter().map(Weight::to_rat).collect();
        let gens: Vec<RatVec> = self.generators().iter().map(Weight::to_rat).collect();
        let extreme = polyhedral::extreme_among(&gens, &normals, self.rs.gram());
        if extreme != self.prim {
            return Err(Error::Invariant(
                "primitive generators are not the stabilizer orbits of the extreme fundamental weights".into(),
            ));
        }
        // Facet normals are stabilizer translates of simple roots in the support.
        let stab = weyl::simple_reflections(&self.rs, &self.stabilizer);
        let allowed: BTreeSet<Weight> = self
            .support
            .iter()
            .flat_map(|&l| weyl::orbit_under(&stab, &self.rs.simple_root(l).primitive()))
            .collect();
        if let Some(h) = self.facet_normals.iter().find(|h| !allowed.contains(h)) {
            return Err(Error::Invariant(format!("facet normal {h} is not a translate of a simple root in the support")));
        }
        let mut span = Echelon::new(self.rank());
        for h in &self.facet_normals {
            span.insert_int(&h.0);
        }
        if span.rank() < self.rank() {
            return Err(Error::Invariant("facet normals do not span".into()));
        }
        Ok(())
    }

    /// Facets from the double description of all generators (oracle path).
    pub fn oracle_facets(&self) -> Result<Vec<Weight>> {
        let gens: Vec<RatVec> = self.generators().iter().map(Weight::to_rat).collect();
        polyhedral::dd_facets(&gens, self.rs.gram())
    }

    /// Extreme generators decided by linear programming (oracle path).
    pub fn oracle_extreme(&self) -> Vec<Weight> {
        let gens: Vec<RatVec> = self.generators().iter().map(Weight::to_rat).collect();
        polyhedral::extreme_brute_force(&gens)
    }

    /// Global Fano test: a hyperplane exists and `φ > -1` on every ray of the
    /// fan outside `σ_λ`, i.e. on `W·Prim(σ_λ) ∖ Prim(σ_λ)`.
    pub fn oracle_global_fano(&self, normal: Option<&NormalData>) -> Result<bool> {
        let Some(normal) = normal else { return Ok(false) };
        let all: Vec<usize> = (1..=self.rank()).collect();
        for &j in &self.j_lambda {
            let orbit = weyl::orbit(&self.rs, &all, &Weight::fundamental(self.rank(), j).neg())?;
            for w in orbit {
                if self.prim.binary_search(&w).is_ok() {
                    continue;
                }
                if linalg::dot_int(&normal.phi, &w.0) <= rat(-1) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn normal_from_hull(rs: &RootSystem, hull: &AffineHull) -> Option<NormalData> {
    let AffineHull::Hyperplane(x) = hull else { return None };
    Some(NormalData {
        vector: x.clone(),
        direction: Weight(linalg::primitive(x)),
        phi: rs.dual_coords(x),
    })
}

/// Classify `Σ_λ` as ℚ-Gorenstein-Fano, Gorenstein-Fano, smooth, Fano.
///
/// With `oracle` set (and rank at most [`ORACLE_RANK_CAP`]) the facets,
/// extremality and the global Fano condition are recomputed independently;
/// any disagreement is an error. Oracles never change the flags.
pub fn classify(fan: &GenericFan, oracle: bool) -> Result<Classification> {
    let rs = fan.root_system();
    let n = fan.rank();
    let hull = fan.affine_hull();
    let normal = normal_from_hull(rs, &hull);
    let mut diagnostics = Vec::new();

    let q_gorenstein_fano = match &normal {
        None => false,
        Some(nd) => {
            let d = &nd.direction.0;
            if let Some(i) = (1..=n).find(|i| !fan.support.contains(i) && d[i - 1] != 0) {
                return Err(Error::Invariant(format!(
                    "normal direction {} is nonzero at label {i} outside the support",
                    nd.direction
                )));
            }
            fan.support.iter().all(|&i| d[i - 1] > 0)
        }
    };
    let local = normal.as_ref().is_some_and(|nd| fan.minus_normal_interior(nd));
    if local != q_gorenstein_fano {
        return Err(Error::Invariant(format!(
            "support-positivity test ({q_gorenstein_fano}) disagrees with the interior test for -n ({local})"
        )));
    }
    let gorenstein_fano = q_gorenstein_fano && normal.as_ref().is_some_and(|nd| linalg::is_integral(&nd.phi));
    let prim_det = (fan.prim.len() == n).then(|| {
        let m: Vec<Vec<i64>> = fan.prim.iter().map(|p| p.0.clone()).collect();
        linalg::det_int(&m)
    });
    let smooth = prim_det.is_some_and(|d| d.abs() == 1);
    let flags = Flags { q_gorenstein_fano, gorenstein_fano, smooth, fano: smooth && gorenstein_fano };

    if let Some(note) = known_discrepancy(fan, &flags) {
        diagnostics.push(note);
    }
    if oracle {
        if n > ORACLE_RANK_CAP {
            diagnostics.push(format!("oracle checks skipped: rank {n} exceeds {ORACLE_RANK_CAP}"));
        } else {
            run_oracles(fan, normal.as_ref(), q_gorenstein_fano)?;
            diagnostics.push("oracle: facets, extremality and global Fano condition agree".into());
        }
    }
    Ok(Classification { flags, hull, normal, prim_det, diagnostics })
}

fn run_oracles(fan: &GenericFan, normal: Option<&NormalData>, qgf: bool) -> Result<()> {
    let dd = fan.oracle_facets()?;
    let mut ours = fan.facet_normals.clone();
    ours.sort();
    if dd != ours {
        return Err(Error::OracleMismatch(format!(
            "double description facets {dd:?} differ from candidate facets {ours:?}"
        )));
    }
    let lp = fan.oracle_extreme();
    if lp != fan.prim {
        return Err(Error::OracleMismatch(format!(
            "linear-programming extreme rays {lp:?} differ from {:?}",
            fan.prim
        )));
    }
    let global = fan.oracle_global_fano(normal)?;
    if global != qgf {
        return Err(Error::OracleMismatch(format!(
            "global Fano condition ({global}) differs from the support test ({qgf})"
        )));
    }
    Ok(())
}

/// Cases whose computed status warrants an explanatory note.
fn known_discrepancy(fan: &GenericFan, flags: &Flags) -> Option<String> {
    let comps = &fan.rs.spec().components;
    let [c] = comps.as_slice() else { return None };
    if c.family == Family::A && c.rank % 2 == 1 && c.rank >= 3 && fan.support == [c.rank.div_ceil(2)] {
        return Some(format!(
            "A{} middle node: the normal pairs to exactly -1 with every primitive generator and phi is {}integral, \
             so the fan is {}Gorenstein-Fano; a pairing value of (-3j+1)/(2j-1) is inconsistent with this",
            c.rank,
            if flags.gorenstein_fano { "" } else { "not " },
            if flags.gorenstein_fano { "" } else { "only Q-" },
        ));
    }
    None
}

/// Classify a product system factor by factor and combine the flags.
pub fn classify_product(rs: &RootSystem, support: &[usize]) -> Result<Flags> {
    let mut flags = Flags { q_gorenstein_fano: true, gorenstein_fano: true, smooth: true, fano: true };
    for (b, comp) in rs.spec().components.iter().enumerate() {
        let block = &rs.blocks()[b];
        let local: Vec<usize> = support
            .iter()
            .filter(|l| block.contains(&(*l - 1)))
            .map(|l| l - block.start)
            .collect();
        let sub = RootSystem::irreducible(comp.family, comp.rank)?;
        let f = classify(&build_sigma(&sub, &local)?, false)?.flags;
        flags.q_gorenstein_fano &= f.q_gorenstein_fano;
        flags.gorenstein_fano &= f.gorenstein_fano;
        flags.smooth &= f.smooth;
        flags.fano &= f.fano;
    }
    Ok(flags)
}
