//! The root system `Φ(Σ)` spanned by the facet normals of a fan, Dynkin type
//! recognition, minimal pairs, lattice comparison, automorphism counts,
//! lattice-regularity, the polytope of a fan and star projections.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genericfan::{self, chamber_union, GenericFan, ORACLE_RANK_CAP};
use crate::lattice::Lattice;
use crate::linalg::{self, rat, Rat, RatMatrix, RatVec};
use crate::polyhedral::{self, FACE_LATTICE_RANK_CAP};
use crate::rootsys::{Component, Family, RootSystem, RootSystemSpec, Weight};
use crate::weyl::{self, Reflection};

/// Cap on the number of maximal cones enumerated explicitly.
const MAX_CONE_ENUMERATION: u128 = 100_000;

/// A crystallographic root system sitting inside `Λ_P`, with a chosen base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    /// All roots, sorted.
    pub vectors: Vec<Weight>,
    /// Simple roots, numbered component by component as in the catalog.
    pub base: Vec<Weight>,
    /// `A′_ij = 2(β_i, β_j)/(β_i, β_i)`.
    pub cartan: Vec<Vec<i64>>,
    pub spec: RootSystemSpec,
}

impl RootSet {
    pub fn rank(&self) -> usize {
        self.base.len()
    }

    pub fn type_name(&self) -> String {
        if self.spec.components.is_empty() {
            "trivial".into()
        } else {
            self.spec.to_string()
        }
    }

    pub fn contains(&self, v: &Weight) -> bool {
        self.vectors.binary_search(v).is_ok()
    }

    /// Roots positive for the chosen base.
    pub fn positive(&self) -> Vec<Weight> {
        let e = self.base.iter().map(Weight::to_rat).collect::<Vec<_>>();
        self.vectors
            .iter()
            .filter(|v| {
                let c = solve_in_span(&e, &v.to_rat()).expect("root lies in the span of the base");
                c.iter().all(|x| !x.is_negative())
            })
            .cloned()
            .collect()
    }
}

/// Coefficients of `v` in terms of the independent vectors `basis`.
fn solve_in_span(basis: &[RatVec], v: &[Rat]) -> Option<RatVec> {
    let n = v.len();
    let rows: Vec<RatVec> = (0..n).map(|i| basis.iter().map(|b| b[i]).collect()).collect();
    match linalg::solve_rows(&rows, v, basis.len()) {
        linalg::AffineSolution::Unique(c) => Some(c),
        _ => None,
    }
}

fn inner(gram: &RatMatrix, a: &Weight, b: &Weight) -> Rat {
    linalg::dot(&a.to_rat(), &linalg::mat_vec(gram, &b.to_rat()))
}

/// `⟨a, b^∨⟩ = 2(a, b)/(b, b)`.
fn cartan_pairing(gram: &RatMatrix, a: &Weight, b: &Weight) -> Rat {
    rat(2) * inner(gram, a, b) / inner(gram, b, b)
}

fn check_root_set(roots: &[Weight], gram: &RatMatrix) -> Result<()> {
    let set: HashSet<&Weight> = roots.iter().collect();
    for b in roots {
        if b.is_zero() {
            return Err(Error::Invariant("root set contains the zero vector".into()));
        }
        if !set.contains(&b.neg()) {
            return Err(Error::Invariant(format!("root set is not symmetric: {} missing", b.neg())));
        }
    }
    for b in roots {
        for c in roots {
            let k = cartan_pairing(gram, b, c);
            if !k.is_integer() {
                return Err(Error::Invariant(format!("pairing of {b} with {c} is {k}, not an integer")));
            }
            let image = b.sub(&c.scale(k.to_integer() as i64));
            if !set.contains(&image) {
                return Err(Error::Invariant(format!("reflection in {c} sends {b} outside the root set")));
            }
            if b != c && b != &c.neg() && linalg::rank_int(&[b.0.clone(), c.0.clone()]) < 2 {
                return Err(Error::Invariant(format!("roots {b} and {c} are proportional")));
            }
        }
    }
    Ok(())
}

/// Lexicographic sign of `v` under a sequence of functionals.
fn lex_sign(functionals: &[RatVec], v: &Weight) -> i32 {
    functionals
        .iter()
        .map(|f| linalg::sign(&linalg::dot_int(f, &v.0)))
        .find(|&s| s != 0)
        .unwrap_or(0)
}

/// Cartan matrix and root count of a catalog component.
fn catalog(comp: Component) -> (Vec<Vec<i64>>, usize) {
    let rs = RootSystem::irreducible(comp.family, comp.rank).expect("catalog component");
    (rs.cartan().to_vec(), rs.all_roots().len())
}

/// Find catalog positions for `members`: `out[p]` is the member playing node `p + 1`.
fn match_component(a: &[Vec<i64>], members: &[usize], cat: &[Vec<i64>]) -> Option<Vec<usize>> {
    fn extend(a: &[Vec<i64>], members: &[usize], cat: &[Vec<i64>], out: &mut Vec<usize>) -> bool {
        let p = out.len();
        if p == members.len() {
            return true;
        }
        for &m in members {
            if out.contains(&m) {
                continue;
            }
            let fits = a[m][m] == cat[p][p]
                && out.iter().enumerate().all(|(q, &o)| a[m][o] == cat[p][q] && a[o][m] == cat[q][p]);
            if fits {
                out.push(m);
                if extend(a, members, cat, out) {
                    return true;
                }
                out.pop();
            }
        }
        false
    }
    let mut out = Vec::new();
    extend(a, members, cat, &mut out).then_some(out)
}

/// Identify a root set, choosing positive roots by the lexicographic signs of `functionals`.
fn identify_with(roots: &[Weight], gram: &RatMatrix, functionals: &[RatVec]) -> Result<RootSet> {
    let mut vectors = roots.to_vec();
    vectors.sort();
    vectors.dedup();
    check_root_set(&vectors, gram)?;
    let mut positive = Vec::new();
    for v in &vectors {
        match lex_sign(functionals, v) {
            0 => return Err(Error::Invariant(format!("positivity functional vanishes on root {v}"))),
            1 => positive.push(v.clone()),
            _ => {}
        }
    }
    let pos_set: HashSet<&Weight> = positive.iter().collect();
    let mut simple: Vec<Weight> = positive
        .iter()
        .filter(|v| !positive.iter().any(|p| p != *v && pos_set.contains(&v.sub(p))))
        .cloned()
        .collect();
    // A deterministic order that lists the simple roots of Λ_P first to last
    // when they are the base.
    simple.sort_by_cached_key(|v| std::cmp::Reverse(linalg::mat_vec(gram, &v.to_rat())));
    let r = simple.len();
    let mut a = vec![vec![0i64; r]; r];
    for i in 0..r {
        for j in 0..r {
            a[i][j] = cartan_pairing(gram, &simple[j], &simple[i]).to_integer() as i64;
        }
    }
    if linalg::rank_int(&simple.iter().map(|v| v.0.clone()).collect::<Vec<_>>()) != r {
        return Err(Error::Invariant("indecomposable positive roots are dependent".into()));
    }

    // Connected components of the Dynkin graph, in order of first appearance.
    let mut seen = vec![false; r];
    let mut pieces: Vec<(Component, Vec<usize>)> = Vec::new();
    for start in 0..r {
        if seen[start] {
            continue;
        }
        let mut members = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < members.len() {
            let i = members[k];
            for j in 0..r {
                if !seen[j] && a[i][j] != 0 {
                    seen[j] = true;
                    members.push(j);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        let size = members.len();
        let found = Family::ALL.iter().filter(|f| f.admits(size)).find_map(|&f| {
            let comp = Component::new(f, size).ok()?;
            let (cat, _) = catalog(comp);
            match_component(&a, &members, &cat).map(|order| (comp, order))
        });
        match found {
            Some(piece) => pieces.push(piece),
            None => {
                return Err(Error::Invariant(format!(
                    "no Dynkin diagram of rank {size} matches the Cartan matrix {a:?}"
                )))
            }
        }
    }
    pieces.sort_by_key(|(c, _)| *c);
    let expected: usize = pieces.iter().map(|(c, _)| catalog(*c).1).sum();
    if expected != vectors.len() {
        return Err(Error::Invariant(format!(
            "{} roots found, type predicts {expected}",
            vectors.len()
        )));
    }
    let order: Vec<usize> = pieces.iter().flat_map(|(_, o)| o.clone()).collect();
    let base: Vec<Weight> = order.iter().map(|&i| simple[i].clone()).collect();
    let cartan = order.iter().map(|&i| order.iter().map(|&j| a[i][j]).collect()).collect();
    Ok(RootSet {
        vectors,
        base,
        cartan,
        spec: RootSystemSpec { components: pieces.into_iter().map(|(c, _)| c).collect() },
    })
}

/// Identify the Dynkin type of a root set and extract a base.
///
/// Positivity is decided by the functional `v ↦ Σ t^i v_i` with `t` larger
/// than twice every coordinate, which vanishes on no nonzero root.
pub fn identify_type(roots: &[Weight], gram: &RatMatrix) -> Result<RootSet> {
    let n = gram.len();
    let max = roots.iter().flat_map(|v| v.0.iter()).map(|x| x.unsigned_abs()).max().unwrap_or(0);
    let t = 2 * max as i128 + 1;
    let f: RatVec = (0..n).map(|i| rat(t.pow(i as u32))).collect();
    identify_with(roots, gram, &[f])
}

/// Positivity functionals placing the point `b + εc` in the anti-dominant chamber.
fn chamber_functionals(rs: &RootSystem, b: &Weight, c: &Weight) -> Vec<RatVec> {
    [b, c]
        .iter()
        .map(|v| rs.dual_coords(&v.to_rat()).iter().map(|x| -x).collect())
        .collect()
}

fn rho_neg(n: usize) -> Weight {
    Weight(vec![-1; n])
}

/// `Φ(Σ_λ)`: primitive facet normals of the fan, closed under `W` and negation.
///
/// Up to rank four the facets are recomputed by double description, both
/// for `σ_λ` and for its translate by `s_1`.
pub fn phi_of_fan(gf: &GenericFan) -> Result<RootSet> {
    let rs = gf.root_system();
    let n = rs.rank();
    let all: Vec<usize> = (1..=n).collect();
    let gens = weyl::simple_reflections(rs, &all);
    let mut set = BTreeSet::new();
    for h in gf.facet_normals() {
        if set.contains(h) {
            continue;
        }
        for v in weyl::orbit_under(&gens, h) {
            set.insert(v.neg());
            set.insert(v);
        }
    }
    let vectors: Vec<Weight> = set.into_iter().collect();
    let roots = identify_with(&vectors, rs.gram(), &chamber_functionals(rs, &gf.baricenter()?, &rho_neg(n)))?;

    if n <= ORACLE_RANK_CAP {
        let mut ours = gf.facet_normals().to_vec();
        ours.sort();
        if gf.oracle_facets()? != ours {
            return Err(Error::OracleMismatch("double description facets of σ_λ differ".into()));
        }
        let s = Reflection::simple(rs, 1);
        let moved: Vec<RatVec> = gf.generators().iter().map(|g| s.apply(g).to_rat()).collect();
        for h in polyhedral::dd_facets(&moved, rs.gram())? {
            if !roots.contains(&h) {
                return Err(Error::Invariant(format!("facet normal {h} of s_1·σ_λ is not in Φ(Σ)")));
            }
        }
    }
    Ok(roots)
}

/// Primitive generators of every maximal cone `w·σ_λ`, sorted.
pub fn max_cones(gf: &GenericFan) -> Result<Vec<Vec<Weight>>> {
    if gf.max_cone_count() > MAX_CONE_ENUMERATION {
        return Err(Error::RankCap { rank: gf.rank(), cap: ORACLE_RANK_CAP });
    }
    let rs = gf.root_system();
    let all: Vec<usize> = (1..=rs.rank()).collect();
    let gens = weyl::simple_reflections(rs, &all);
    let start = gf.prim().to_vec();
    let mut seen: HashSet<Vec<Weight>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cone) = queue.pop_front() {
        for g in &gens {
            let mut img: Vec<Weight> = cone.iter().map(|v| g.apply(v)).collect();
            img.sort();
            if seen.insert(img.clone()) {
                queue.push_back(img);
            }
        }
    }
    let mut out: Vec<Vec<Weight>> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Every reflection `s_β`, `β ∈ Φ(Σ)`, permutes the maximal cones.
pub fn reflection_stable(gf: &GenericFan, roots: &RootSet) -> Result<bool> {
    let cones = max_cones(gf)?;
    Ok(cones_reflection_stable(gf.root_system(), &cones, &roots.vectors))
}

fn cones_reflection_stable(rs: &RootSystem, cones: &[Vec<Weight>], roots: &[Weight]) -> bool {
    let set: HashSet<&Vec<Weight>> = cones.iter().collect();
    roots.iter().filter(|b| b.0 > b.neg().0).all(|b| {
        let Ok(s) = Reflection::from_root(rs, b) else { return false };
        cones.iter().all(|c| {
            let mut img: Vec<Weight> = c.iter().map(|v| s.apply(v)).collect();
            img.sort();
            set.contains(&img)
        })
    })
}

/// Position of `Λ_P` between the root and weight lattices of `Φ′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeRelation {
    /// `Λ_P = Λ_R′`.
    RootLattice,
    /// `Λ_P = Λ_P′` (also reported when `Λ_R′ = Λ_P′`).
    WeightLattice,
    /// Strictly between, with a Hermite basis of `Λ_P` in ω′-coordinates.
    Between { basis: Vec<Vec<i64>> },
}

impl fmt::Display for LatticeRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeRelation::RootLattice => write!(f, "Λ_R′"),
            LatticeRelation::WeightLattice => write!(f, "Λ_P′"),
            LatticeRelation::Between { basis } => {
                let rows: Vec<String> = basis.iter().map(|r| Weight(r.clone()).to_string()).collect();
                write!(f, "between Λ_R′ and Λ_P′: ⟨{}⟩", rows.join(", "))
            }
        }
    }
}

/// Coroot functionals of the base; integral exactly when `Λ_P ⊆ Λ_P′`.
fn coroot_rows(rs: &RootSystem, roots: &RootSet) -> Result<Vec<Vec<i64>>> {
    roots.base.iter().map(|b| Reflection::from_root(rs, b).map(|r| r.coroot)).collect()
}

fn lattice_relation(roots: &RootSet, coroots: &[Vec<i64>]) -> Result<LatticeRelation> {
    let n = coroots.len();
    let root_lattice = Lattice::from_int_generators(&roots.base.iter().map(|b| b.0.clone()).collect::<Vec<_>>(), n);
    let m: RatMatrix = coroots.iter().map(|r| linalg::rat_vec(r)).collect();
    let m_inv = linalg::inverse(&m).ok_or_else(|| Error::Invariant("coroots of Φ(Σ) do not span".into()))?;
    let omegas: Vec<RatVec> = (0..n).map(|k| (0..n).map(|i| m_inv[i][k]).collect()).collect();
    let weight_lattice = Lattice::from_generators(&omegas, n);
    let lp = Lattice::standard(n);
    if !root_lattice.is_sublattice_of(&lp) || !lp.is_sublattice_of(&weight_lattice) {
        return Err(Error::Invariant("Λ_R′ ⊆ Λ_P ⊆ Λ_P′ fails".into()));
    }
    if lp == weight_lattice {
        return Ok(LatticeRelation::WeightLattice);
    }
    if lp == root_lattice {
        return Ok(LatticeRelation::RootLattice);
    }
    // Columns of the coroot matrix are the ω′-coordinates of the ω_i.
    let cols: Vec<Vec<i64>> = (0..n).map(|i| coroots.iter().map(|r| r[i]).collect()).collect();
    let basis = Lattice::from_int_generators(&cols, n)
        .basis()
        .iter()
        .map(|r| r.iter().map(|x| x.to_integer() as i64).collect())
        .collect();
    Ok(LatticeRelation::Between { basis })
}

/// The pair `(Φ′, μ)` over which `σ_λ` is the cone of an anti-dominant weight.
#[derive(Clone, Debug)]
pub struct MinimalPair {
    pub roots: RootSet,
    /// Support of `μ` in the labels of `Φ′`.
    pub support: Vec<usize>,
    /// The baricenter of `σ_λ` in ω′-coordinates.
    pub mu: Weight,
    pub lattice_relation: LatticeRelation,
    /// `|W′|`.
    pub weyl_order: u128,
    /// `|W′_μ|`.
    pub stabilizer_order: u128,
    coroots: Vec<Vec<i64>>,
}

impl MinimalPair {
    /// `⟨·, β_k^∨⟩` on ω-coordinates, one row per simple root of `Φ′`.
    pub fn coroots(&self) -> &[Vec<i64>] {
        &self.coroots
    }

    /// Whether the pair is `(Φ, λ)` itself.
    pub fn is_same_pair(&self, gf: &GenericFan) -> bool {
        let simple: Vec<Weight> = gf.root_system().simple_roots().iter().map(Weight::primitive).collect();
        self.roots.spec == *gf.root_system().spec() && self.roots.base == simple && self.support == gf.support()
    }
}

/// Compute the minimal pair and verify it rebuilds `σ_λ` exactly.
pub fn minimal_pair(gf: &GenericFan) -> Result<MinimalPair> {
    let rs = gf.root_system();
    let n = rs.rank();
    let roots = phi_of_fan(gf)?;
    if roots.rank() != n {
        return Err(Error::Invariant(format!("Φ(Σ) has rank {}, expected {n}", roots.rank())));
    }
    let b = gf.baricenter()?;
    let coroots = coroot_rows(rs, &roots)?;
    let mu = Weight(coroots.iter().map(|f| f.iter().zip(&b.0).map(|(x, y)| x * y).sum()).collect());
    if mu.0.iter().any(|&x| x > 0) {
        return Err(Error::Invariant(format!("baricenter {mu} is not anti-dominant for Φ(Σ)")));
    }
    let support = mu.support();

    let cat = RootSystem::new(&roots.spec)?;
    let weyl_order = weyl::weyl_order(&cat);
    let stabilizer_order = weyl::parabolic_order(&cat, &weyl::complement(&cat, &support))?;
    if weyl_order / stabilizer_order != gf.max_cone_count() {
        return Err(Error::Invariant(format!(
            "|W′|/|W′_μ| = {} but the fan has {} maximal cones",
            weyl_order / stabilizer_order,
            gf.max_cone_count()
        )));
    }

    let m: RatMatrix = coroots.iter().map(|r| linalg::rat_vec(r)).collect();
    let m_inv = linalg::inverse(&m).ok_or_else(|| Error::Invariant("coroots of Φ(Σ) do not span".into()))?;
    let chamber_rays: Vec<Weight> = (0..n)
        .map(|k| Weight(linalg::primitive(&(0..n).map(|i| -m_inv[i][k]).collect::<Vec<_>>())))
        .collect();
    let base: Vec<Reflection> = roots.base.iter().map(|b| Reflection::from_root(rs, b)).collect::<Result<_>>()?;
    let cu = chamber_union(rs.gram(), &base, &chamber_rays, &support);
    let mut rebuilt: Vec<Weight> = (0..n)
        .filter(|&k| cu.extreme[k])
        .flat_map(|k| cu.generator_orbits[k].clone())
        .collect();
    rebuilt.sort();
    rebuilt.dedup();
    if rebuilt != gf.prim() {
        return Err(Error::RebuildMismatch { expected: gf.prim().to_vec(), found: rebuilt });
    }
    let lattice_relation = lattice_relation(&roots, &coroots)?;
    Ok(MinimalPair { roots, support, mu, lattice_relation, weyl_order, stabilizer_order, coroots })
}

/// Matrices (in ω-coordinates) of the diagram symmetries of `Φ′` that fix the
/// support of `μ` setwise and preserve `Λ_P`.
///
/// All Cartan-preserving permutations of the base are tried, including
/// exchanges of isomorphic components.
pub fn lattice_symmetries(pair: &MinimalPair) -> Vec<Vec<Vec<i64>>> {
    let a = &pair.roots.cartan;
    let r = a.len();
    let base: RatMatrix = (0..r).map(|i| pair.roots.base.iter().map(|b| rat(b.0[i] as i128)).collect()).collect();
    let base_inv = linalg::inverse(&base).expect("base spans");
    let in_support: Vec<bool> = (1..=r).map(|k| pair.support.contains(&k)).collect();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = Vec::new();
    fn walk(
        a: &[Vec<i64>],
        in_support: &[bool],
        perm: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        let p = perm.len();
        if p == a.len() {
            visit(perm);
            return;
        }
        for q in 0..a.len() {
            if perm.contains(&q) || in_support[q] != in_support[p] || a[q][q] != a[p][p] {
                continue;
            }
            if perm.iter().enumerate().all(|(i, &pi)| a[pi][q] == a[i][p] && a[q][pi] == a[p][i]) {
                perm.push(q);
                walk(a, in_support, perm, visit);
                perm.pop();
            }
        }
    }
    walk(a, &in_support, &mut perm, &mut |perm: &[usize]| {
        let permuted: RatMatrix = (0..r)
            .map(|i| perm.iter().map(|&q| rat(pair.roots.base[q].0[i] as i128)).collect())
            .collect();
        let t = linalg::mat_mul(&permuted, &base_inv);
        if t.iter().all(|row| linalg::is_integral(row)) && linalg::det(&t).abs() == rat(1) {
            out.push(t.iter().map(|row| row.iter().map(|x| x.to_integer() as i64).collect()).collect());
        }
    });
    out.sort();
    out
}

fn check_regularity_rank(gf: &GenericFan) -> Result<()> {
    if gf.rank() > FACE_LATTICE_RANK_CAP {
        return Err(Error::RankCap { rank: gf.rank(), cap: FACE_LATTICE_RANK_CAP });
    }
    Ok(())
}

/// Lattice automorphisms of the fan counted directly, without `Φ(Σ)`.
///
/// An automorphism is fixed by the images of `n` independent generators of
/// `σ_λ`, and those images lie in a common maximal cone; every such choice
/// is tested for integrality, unimodularity and stability of the cone set.
pub fn aut_order_brute_force(gf: &GenericFan) -> Result<u128> {
    let n = gf.rank();
    if n > ORACLE_RANK_CAP {
        return Err(Error::RankCap { rank: n, cap: ORACLE_RANK_CAP });
    }
    let cones = max_cones(gf)?;
    let cone_set: HashSet<&Vec<Weight>> = cones.iter().collect();
    let mut basis = linalg::Echelon::new(n);
    let frame: Vec<&Weight> = gf.prim().iter().filter(|p| basis.insert_int(&p.0).is_some()).collect();
    let v: RatMatrix = (0..n).map(|i| frame.iter().map(|p| rat(p.0[i] as i128)).collect()).collect();
    let v_inv = linalg::inverse(&v).ok_or_else(|| Error::Invariant("σ_λ is not full-dimensional".into()))?;
    let mut count = 0u128;
    let mut images: Vec<&Weight> = Vec::new();
    fn choose<'a>(
        cone: &'a [Weight],
        n: usize,
        images: &mut Vec<&'a Weight>,
        visit: &mut dyn FnMut(&[&'a Weight]),
    ) {
        if images.len() == n {
            visit(images);
            return;
        }
        for r in cone {
            if !images.contains(&r) {
                images.push(r);
                choose(cone, n, images, visit);
                images.pop();
            }
        }
    }
    for cone in &cones {
        choose(cone, n, &mut images, &mut |imgs: &[&Weight]| {
            let w: RatMatrix = (0..n).map(|i| imgs.iter().map(|p| rat(p.0[i] as i128)).collect()).collect();
            let t = linalg::mat_mul(&w, &v_inv);
            if !t.iter().all(|row| linalg::is_integral(row)) || linalg::det(&t).abs() != rat(1) {
                return;
            }
            let t: Vec<Vec<i64>> = t.iter().map(|row| row.iter().map(|x| x.to_integer() as i64).collect()).collect();
            let maps_fan = cones.iter().all(|c| {
                let mut img: Vec<Weight> = c.iter().map(|p| weyl::apply_matrix(&t, p)).collect();
                img.sort();
                cone_set.contains(&img)
            });
            if maps_fan {
                count += 1;
            }
        });
    }
    Ok(count)
}

/// `|Aut(Σ_λ)| = |W′| · #{lattice-preserving diagram symmetries fixing μ}`.
pub fn aut_order(gf: &GenericFan) -> Result<u128> {
    check_regularity_rank(gf)?;
    let pair = minimal_pair(gf)?;
    Ok(pair.weyl_order * lattice_symmetries(&pair).len() as u128)
}

/// Number of complete flags of cones: `|Σ(n)|` times the flags of `σ_λ`.
pub fn flag_count(gf: &GenericFan) -> Result<u128> {
    check_regularity_rank(gf)?;
    let fl = polyhedral::face_lattice(gf.prim(), gf.facet_normals(), gf.root_system().gram())?;
    Ok(gf.max_cone_count() * fl.flag_count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regularity {
    pub aut_order: u128,
    pub flag_count: u128,
    pub lattice_regular: bool,
}

/// The automorphism group acts freely on flags, so transitivity is equality of counts.
pub fn regularity(gf: &GenericFan) -> Result<Regularity> {
    let aut_order = aut_order(gf)?;
    let flag_count = flag_count(gf)?;
    Ok(Regularity { aut_order, flag_count, lattice_regular: aut_order == flag_count })
}

pub fn is_lattice_regular(gf: &GenericFan) -> Result<bool> {
    Ok(regularity(gf)?.lattice_regular)
}

/// `Conv(W·Prim(σ_λ))` and, for ℚ-Gorenstein-Fano fans, its polar dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    pub vertices: Vec<Weight>,
    pub regular: bool,
    pub dual: Option<DualPolytope>,
}

/// Vertices `scale · w·n_λ` in dual coordinates, `scale` the least common denominator of `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPolytope {
    pub scale: i128,
    pub vertices: Vec<Vec<i64>>,
}

pub fn polytope_of_fan(gf: &GenericFan) -> Result<Polytope> {
    check_regularity_rank(gf)?;
    let rs = gf.root_system();
    let all: Vec<usize> = (1..=rs.rank()).collect();
    let gens = weyl::simple_reflections(rs, &all);
    let mut vertices: Vec<Weight> = gf
        .j_lambda()
        .iter()
        .flat_map(|&j| weyl::orbit_under(&gens, &Weight::fundamental(rs.rank(), j).neg()))
        .collect();
    vertices.sort();
    vertices.dedup();
    let regular = is_lattice_regular(gf)?;
    let class = genericfan::classify(gf, false)?;
    let dual = match (&class.normal, class.flags.q_gorenstein_fano) {
        (Some(nd), true) => {
            let (x, lx) = linalg::clear_denominators(&nd.vector);
            let x = Weight(x.iter().map(|&v| v as i64).collect());
            let (_, scale) = linalg::clear_denominators(&nd.phi);
            let mut vs: Vec<Vec<i64>> = weyl::orbit_under(&gens, &x)
                .iter()
                .map(|w| {
                    let y = rs.dual_coords(&w.to_rat());
                    y.iter().map(|c| (c * rat(scale) / rat(lx)).to_integer() as i64).collect()
                })
                .collect();
            vs.sort();
            Some(DualPolytope { scale, vertices: vs })
        }
        _ => None,
    };
    Ok(Polytope { vertices, regular, dual })
}

/// The star of a ray projected along it, with the Levi comparison.
#[derive(Clone, Debug)]
pub struct StarProjection {
    /// Maximal cones containing the ray.
    pub cone_count: usize,
    /// Facet normals of the projected fan as primitive vectors of `Λ_P`, both signs.
    pub normals: Vec<Weight>,
    /// Type of the projected normals, when they form a root system.
    pub projected: Option<RootSet>,
    /// `{β ∈ Φ(Σ) : (β, ray) = 0}`.
    pub levi: RootSet,
    /// Whether the projected normals are all of `levi`. Always true for
    /// lattice-regular fans; in general only the inclusion holds.
    pub equals_levi: bool,
    pub lattice_regular: bool,
}

/// Project the star of `ray` to `ray^⊥`.
///
/// The projected facet normals must lie in `Φ(Σ) ∩ ray^⊥`; for a
/// lattice-regular fan they must exhaust it.
pub fn star_projection(gf: &GenericFan, ray: &Weight) -> Result<StarProjection> {
    let rs = gf.root_system();
    let n = rs.rank();
    if n > ORACLE_RANK_CAP {
        return Err(Error::RankCap { rank: n, cap: ORACLE_RANK_CAP });
    }
    if gf.prim().binary_search(ray).is_err() {
        return Err(Error::InvalidArgument(format!("{ray} is not a primitive generator of σ_λ")));
    }
    let roots = phi_of_fan(gf)?;
    let gram = rs.gram();
    let levi_vectors: Vec<Weight> =
        roots.vectors.iter().filter(|b| inner(gram, b, ray).is_zero()).cloned().collect();
    let levi = identify_type(&levi_vectors, gram)?;
    let star: Vec<Vec<Weight>> = max_cones(gf)?.into_iter().filter(|c| c.contains(ray)).collect();

    let r = ray.to_rat();
    let rr = rs.inner(&r, &r);
    let f = rs.dual_coords(&r);
    let basis: Vec<RatVec> = linalg::nullspace(&[f], n);
    let basis_cols: RatMatrix = (0..n).map(|i| basis.iter().map(|b| b[i]).collect()).collect();
    let sub_gram: RatMatrix = basis.iter().map(|a| basis.iter().map(|b| rs.inner(a, b)).collect()).collect();
    let sub_gram_inv = if n > 1 { linalg::inverse(&sub_gram).expect("form is definite") } else { Vec::new() };
    let coords = |v: &RatVec| -> RatVec {
        let pairings: RatVec = basis.iter().map(|b| rs.inner(b, v)).collect();
        linalg::mat_vec(&sub_gram_inv, &pairings)
    };
    let mut normals = BTreeSet::new();
    if n > 1 {
        for cone in &star {
            let projected: Vec<RatVec> = cone
                .iter()
                .filter(|g| *g != ray)
                .map(|g| {
                    let v = g.to_rat();
                    let c = rs.inner(&v, &r) / rr;
                    coords(&v.iter().zip(&r).map(|(a, b)| a - c * b).collect())
                })
                .collect();
            for h in polyhedral::dd_facets(&projected, &sub_gram)? {
                let ambient = Weight(linalg::primitive(&linalg::mat_vec(&basis_cols, &h.to_rat())));
                normals.insert(ambient.neg());
                normals.insert(ambient);
            }
        }
    }
    let normals: Vec<Weight> = normals.into_iter().collect();
    if let Some(h) = normals.iter().find(|h| !levi.contains(h)) {
        return Err(Error::Invariant(format!(
            "projected star has facet normal {h}, which is not a root of Φ(Σ) orthogonal to {ray}"
        )));
    }
    let equals_levi = normals == levi.vectors;
    let lattice_regular = is_lattice_regular(gf)?;
    if lattice_regular && !equals_levi {
        return Err(Error::Invariant(format!(
            "lattice-regular fan: projected star of {ray} has normals {normals:?}, expected {:?}",
            levi.vectors
        )));
    }
    let projected = identify_type(&normals, gram).ok();
    Ok(StarProjection { cone_count: star.len(), normals, projected, levi, equals_levi, lattice_regular })
}

/// Analysis of a complete fan given as unions of Weyl chambers.
#[derive(Clone, Debug)]
pub struct ChamberFanReport {
    /// Primitive generators of each maximal cone, in input order.
    pub cones: Vec<Vec<Weight>>,
    /// Primitive facet normals of all cones, both signs.
    pub normals: Vec<Weight>,
    /// Every reflection in a facet normal permutes the maximal cones.
    pub associated: bool,
    /// Present when `associated`.
    pub roots: Option<RootSet>,
    /// Labels `k` with `⟨b, β_k^∨⟩ ≠ 0` for the baricenter `b` of the first cone.
    pub support: Vec<usize>,
    pub lattice_relation: Option<LatticeRelation>,
}

/// Analyze the fan whose maximal cones are `∪_{w ∈ cone} w·𝒞`, each `w` a word in
/// simple reflections. The cones must be convex and partition the chambers.
pub fn analyze_chamber_fan(rs: &RootSystem, cones: &[Vec<Vec<usize>>]) -> Result<ChamberFanReport> {
    let n = rs.rank();
    if n > ORACLE_RANK_CAP {
        return Err(Error::RankCap { rank: n, cap: ORACLE_RANK_CAP });
    }
    let all: Vec<usize> = (1..=n).collect();
    let group = weyl::element_words(rs, &all, 2000)?;
    let interior: Vec<Weight> = group
        .iter()
        .map(|w| Ok(weyl::apply_matrix(&weyl::element_matrix(rs, w)?, &rho_neg(n))))
        .collect::<Result<_>>()?;

    let mut owner: BTreeMap<Weight, usize> = BTreeMap::new();
    let mut prims = Vec::new();
    let mut normals = BTreeSet::new();
    let mut first_chamber = None;
    for (k, words) in cones.iter().enumerate() {
        if words.is_empty() {
            return Err(Error::InvalidArgument(format!("cone {} has no chambers", k + 1)));
        }
        let mut gens: Vec<RatVec> = Vec::new();
        let mut count = 0;
        for w in words {
            let m = weyl::element_matrix(rs, w)?;
            let p = weyl::apply_matrix(&m, &rho_neg(n));
            first_chamber.get_or_insert_with(|| p.clone());
            if owner.insert(p, k).is_none() {
                count += 1;
            } else {
                return Err(Error::InvalidArgument(format!("chamber of word {w:?} is listed twice")));
            }
            gens.extend((0..n).map(|c| m.iter().map(|row| rat(-row[c] as i128)).collect::<RatVec>()));
        }
        let facets = polyhedral::dd_facets(&gens, rs.gram())?;
        let duals: Vec<RatVec> = facets.iter().map(|h| rs.dual_coords(&h.to_rat())).collect();
        let inside = interior
            .iter()
            .filter(|p| duals.iter().all(|y| linalg::dot_int(y, &p.0).is_negative()))
            .count();
        if inside != count {
            return Err(Error::InvalidArgument(format!(
                "cone {} is not convex: its hull contains {inside} chambers, {count} listed",
                k + 1
            )));
        }
        let normals_rat: Vec<RatVec> = facets.iter().map(Weight::to_rat).collect();
        prims.push(polyhedral::extreme_among(&gens, &normals_rat, rs.gram()));
        for h in facets {
            normals.insert(h.neg());
            normals.insert(h);
        }
    }
    if owner.len() != group.len() {
        return Err(Error::InvalidArgument(format!(
            "the cones cover {} of {} chambers",
            owner.len(),
            group.len()
        )));
    }
    let normals: Vec<Weight> = normals.into_iter().collect();
    let mut sorted_cones = prims.clone();
    sorted_cones.sort();
    let associated = cones_reflection_stable(rs, &sorted_cones, &normals);
    let mut report =
        ChamberFanReport { cones: prims, normals, associated, roots: None, support: Vec::new(), lattice_relation: None };
    if associated {
        let mut b = Weight::zero(n);
        for p in &report.cones[0] {
            b = b.add(p);
        }
        let c = first_chamber.expect("at least one chamber");
        let roots = identify_with(&report.normals, rs.gram(), &chamber_functionals(rs, &b, &c))?;
        let coroots = coroot_rows(rs, &roots)?;
        report.support = (1..=roots.rank())
            .filter(|&k| coroots[k - 1].iter().zip(&b.0).map(|(x, y)| x * y).sum::<i64>() != 0)
            .collect();
        if roots.rank() == n {
            report.lattice_relation = Some(lattice_relation(&roots, &coroots)?);
        }
        report.roots = Some(roots);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genericfan::build_sigma;

    fn rs(s: &str) -> RootSystem {
        RootSystem::new(&s.parse().unwrap()).unwrap()
    }

    fn fan(s: &str, support: &[usize]) -> GenericFan {
        build_sigma(&rs(s), support).unwrap()
    }

    #[test]
    fn identify_catalog_types() {
        for name in ["A1", "A4", "B3", "C3", "D4", "D5", "G2", "F4", "E6", "E7"] {
            let r = rs(name);
            let set = identify_type(r.all_roots(), r.gram()).unwrap();
            assert_eq!(set.type_name(), name);
            assert_eq!(set.cartan, r.cartan());
        }
    }

    #[test]
    fn long_roots_of_b3_are_a3() {
        let r = rs("B3");
        let long: Vec<Weight> = r
            .all_roots()
            .iter()
            .filter(|v| r.inner_int(v, v) == rat(4))
            .cloned()
            .collect();
        assert_eq!(long.len(), 12);
        assert_eq!(identify_type(&long, r.gram()).unwrap().type_name(), "A3");
    }

    #[test]
    fn short_roots_of_b2_are_a1_squared() {
        let r = rs("B2");
        let short: Vec<Weight> = r
            .all_roots()
            .iter()
            .filter(|v| r.inner_int(v, v) == rat(2))
            .cloned()
            .collect();
        assert_eq!(identify_type(&short, r.gram()).unwrap().type_name(), "A1xA1");
    }

    #[test]
    fn rejects_non_root_sets() {
        let r = rs("A2");
        let bad = vec![Weight(vec![1, 0]), Weight(vec![-1, 0]), Weight(vec![0, 1]), Weight(vec![0, -1])];
        assert!(matches!(identify_type(&bad, r.gram()), Err(Error::Invariant(_))));
        let asym = vec![Weight(vec![2, -1])];
        assert!(identify_type(&asym, r.gram()).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_of_fan(&fan("A3", &[2])).unwrap().type_name(), "A3");
        assert_eq!(phi_of_fan(&fan("C3", &[3])).unwrap().type_name(), "A1xA1xA1");
        assert_eq!(phi_of_fan(&fan("G2", &[1])).unwrap().type_name(), "A2");
        assert_eq!(phi_of_fan(&fan("G2", &[2])).unwrap().type_name(), "A2");
    }

    #[test]
    fn minimal_pair_examples() {
        let p = minimal_pair(&fan("G2", &[1])).unwrap();
        assert_eq!((p.roots.type_name().as_str(), p.support.as_slice()), ("A2", &[1, 2][..]));
        assert_eq!(p.lattice_relation, LatticeRelation::RootLattice);
        let p = minimal_pair(&fan("G2", &[2])).unwrap();
        assert_eq!(p.lattice_relation, LatticeRelation::WeightLattice);
        let p = minimal_pair(&fan("B4", &[1])).unwrap();
        assert_eq!((p.roots.type_name().as_str(), p.support.as_slice()), ("D4", &[1][..]));
        assert_eq!(p.lattice_relation, LatticeRelation::WeightLattice);
        let p = minimal_pair(&fan("B3", &[1])).unwrap();
        assert_eq!(p.roots.type_name(), "A3");
        let f = fan("A4", &[2, 4]);
        assert!(minimal_pair(&f).unwrap().is_same_pair(&f));
    }

    #[test]
    fn b_n_last_node_sits_between() {
        let p = minimal_pair(&fan("B3", &[3])).unwrap();
        assert_eq!(p.roots.type_name(), "A1xA1xA1");
        let LatticeRelation::Between { basis } = &p.lattice_relation else { panic!("{:?}", p.lattice_relation) };
        assert_eq!(basis, &vec![vec![1, 1, 1], vec![0, 2, 0], vec![0, 0, 2]]);
    }

    #[test]
    fn automorphisms_and_flags() {
        assert_eq!(aut_order(&fan("A1", &[1])).unwrap(), 2);
        assert_eq!(flag_count(&fan("A1", &[1])).unwrap(), 2);
        assert_eq!(aut_order(&fan("A3", &[1])).unwrap(), 24);
        assert_eq!(flag_count(&fan("A3", &[1])).unwrap(), 24);
        assert_eq!(aut_order(&fan("A2", &[1, 2])).unwrap(), 12);
        assert_eq!(flag_count(&fan("A2", &[1, 2])).unwrap(), 12);
        assert!(is_lattice_regular(&fan("G2", &[2])).unwrap());
        for (name, support) in [("A3", &[1][..]), ("A2", &[1, 2]), ("B3", &[3]), ("B3", &[2]), ("C2", &[1]), ("G2", &[1])] {
            let f = fan(name, support);
            assert_eq!(aut_order(&f).unwrap(), aut_order_brute_force(&f).unwrap(), "{name} {support:?}");
        }
        assert!(matches!(aut_order(&fan("E7", &[1])), Err(Error::RankCap { .. })));
    }

    #[test]
    fn polytopes() {
        let p = polytope_of_fan(&fan("A3", &[1])).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert!(p.regular);
        let p = polytope_of_fan(&fan("A1", &[1])).unwrap();
        assert_eq!(p.vertices, vec![Weight(vec![-1]), Weight(vec![1])]);
        let d = p.dual.unwrap();
        assert_eq!(d.vertices, vec![vec![-1], vec![1]]);
        let p = polytope_of_fan(&fan("A2", &[1, 2])).unwrap();
        assert_eq!(p.vertices.len(), 6);
        assert!(p.regular);
        assert_eq!(p.dual.unwrap().vertices.len(), 6);
    }

    #[test]
    fn star_projections() {
        let f = fan("A1", &[1]);
        let s = star_projection(&f, &Weight(vec![-1])).unwrap();
        assert!(s.normals.is_empty());
        let f = fan("A2", &[1, 2]);
        let s = star_projection(&f, &Weight(vec![-1, 0])).unwrap();
        assert_eq!(s.levi.type_name(), "A1");
        assert_eq!(s.cone_count, 2);
        let f = fan("A3", &[1, 2, 3]);
        let s = star_projection(&f, &Weight(vec![0, -1, 0])).unwrap();
        assert_eq!(s.levi.type_name(), "A1xA1");
        assert!(s.equals_levi);
        // Not lattice-regular: only the long roots of the B2 Levi are walls.
        let f = fan("B3", &[1, 3]);
        let s = star_projection(&f, &Weight(vec![-1, 0, 0])).unwrap();
        assert!(!s.lattice_regular && !s.equals_levi);
        assert_eq!(s.levi.type_name(), "B2");
        assert_eq!(s.projected.unwrap().type_name(), "A1xA1");
        assert!(star_projection(&f, &Weight(vec![0, 1, 0])).is_err());
    }

    #[test]
    fn chamber_fan_of_full_support_is_the_weyl_fan() {
        let r = rs("A2");
        let words = weyl::element_words(&r, &[1, 2], 100).unwrap();
        let cones: Vec<Vec<Vec<usize>>> = words.into_iter().map(|w| vec![w]).collect();
        let rep = analyze_chamber_fan(&r, &cones).unwrap();
        assert!(rep.associated);
        assert_eq!(rep.roots.unwrap().type_name(), "A2");
        assert_eq!(rep.lattice_relation, Some(LatticeRelation::WeightLattice));
        assert_eq!(rep.support, vec![1, 2]);
    }

    #[test]
    fn chamber_fan_rejects_nonconvex_unions() {
        let r = rs("A2");
        let words = weyl::element_words(&r, &[1, 2], 100).unwrap();
        // Five chambers together are not convex.
        let cones = vec![words[..5].to_vec(), words[5..].to_vec()];
        assert!(analyze_chamber_fan(&r, &cones).is_err());
    }

    /// Group the twelve chambers of G2 by the quadrant they occupy relative
    /// to the orthogonal pair `α_1`, `ω_2`.
    fn g2_quadrant_fan() -> (RootSystem, Vec<Vec<Vec<usize>>>) {
        let r = rs("G2");
        let words = weyl::element_words(&r, &[1, 2], 100).unwrap();
        let a1 = Weight(vec![2, -1]);
        let w2 = Weight(vec![0, 1]);
        let mut groups: BTreeMap<(i32, i32), Vec<Vec<usize>>> = BTreeMap::new();
        for w in words {
            let p = weyl::apply_matrix(&weyl::element_matrix(&r, &w).unwrap(), &rho_neg(2));
            let key = (linalg::sign(&r.inner_int(&a1, &p)), linalg::sign(&r.inner_int(&w2, &p)));
            groups.entry(key).or_default().push(w);
        }
        (r, groups.into_values().collect())
    }

    #[test]
    fn g2_quadrant_fan_is_a1_squared_between_lattices() {
        let (r, cones) = g2_quadrant_fan();
        assert_eq!(cones.len(), 4);
        assert!(cones.iter().all(|c| c.len() == 3));
        let rep = analyze_chamber_fan(&r, &cones).unwrap();
        assert!(rep.associated);
        assert_eq!(rep.roots.as_ref().unwrap().type_name(), "A1xA1");
        assert!(matches!(rep.lattice_relation, Some(LatticeRelation::Between { .. })));
        assert_eq!(rep.support, vec![1, 2]);
    }
}
