//! Weyl group actions on ω-coordinates: reflections, parabolic orbits and orders.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::linalg::{self, rat, Rat};
use crate::rootsys::{RootSystem, Weight};

/// The reflection `v ↦ v − ⟨v, β^∨⟩ β`.
///
/// The coroot is stored as an integer functional on ω-coordinates, which is
/// exactly the condition for the reflection to preserve `Λ_P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reflection {
    pub root: Vec<i64>,
    pub coroot: Vec<i64>,
}

impl Reflection {
    /// The simple reflection `s_label`; its coroot functional is a unit vector.
    pub fn simple(rs: &RootSystem, label: usize) -> Self {
        let mut coroot = vec![0; rs.rank()];
        coroot[label - 1] = 1;
        Reflection { root: rs.simple_root(label).0, coroot }
    }

    /// Reflection in an arbitrary vector `β`, provided `⟨·, β^∨⟩` is integral on `Λ_P`.
    pub fn from_root(rs: &RootSystem, root: &Weight) -> Result<Self> {
        let b = root.to_rat();
        let norm = rs.inner(&b, &b);
        if norm == rat(0) {
            return Err(Error::InvalidArgument("cannot reflect in the zero vector".into()));
        }
        let functional: Vec<Rat> = rs.dual_coords(&b).iter().map(|x| rat(2) * x / norm).collect();
        if !linalg::is_integral(&functional) {
            return Err(Error::Invariant(format!(
                "reflection in {root} does not preserve the weight lattice"
            )));
        }
        Ok(Reflection { root: root.0.clone(), coroot: functional.iter().map(|x| x.to_integer() as i64).collect() })
    }

    pub fn pairing(&self, v: &[i64]) -> i64 {
        self.coroot.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn apply_in_place(&self, v: &mut [i64]) {
        let c = self.pairing(v);
        if c != 0 {
            for (x, r) in v.iter_mut().zip(&self.root) {
                *x -= c * r;
            }
        }
    }

    pub fn apply(&self, v: &Weight) -> Weight {
        let mut w = v.0.clone();
        self.apply_in_place(&mut w);
        Weight(w)
    }

    pub fn apply_rat(&self, v: &[Rat]) -> Vec<Rat> {
        let c: Rat = self.coroot.iter().zip(v).map(|(a, b)| rat(*a as i128) * b).sum();
        v.iter().zip(&self.root).map(|(x, r)| x - c * rat(*r as i128)).collect()
    }
}

/// Breadth-first orbit under the group generated by `gens`, returned sorted.
pub fn orbit_under(gens: &[Reflection], start: &Weight) -> Vec<Weight> {
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.0.clone());
    queue.push_back(start.0.clone());
    while let Some(v) = queue.pop_front() {
        for g in gens {
            if g.pairing(&v) == 0 {
                continue;
            }
            let mut w = v.clone();
            g.apply_in_place(&mut w);
            if seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    let mut out: Vec<Weight> = seen.into_iter().map(Weight).collect();
    out.sort();
    out
}

fn check_labels(rs: &RootSystem, labels: &[usize]) -> Result<()> {
    labels.iter().try_for_each(|&l| rs.check_label(l))
}

pub fn simple_reflections(rs: &RootSystem, labels: &[usize]) -> Vec<Reflection> {
    let mut sorted: Vec<usize> = labels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.iter().map(|&l| Reflection::simple(rs, l)).collect()
}

/// `s_label(λ) = λ − λ_label α_label`.
pub fn simple_reflection(rs: &RootSystem, label: usize, weight: &Weight) -> Result<Weight> {
    rs.check_label(label)?;
    if weight.len() != rs.rank() {
        return Err(Error::DimensionMismatch { expected: rs.rank(), found: weight.len() });
    }
    Ok(Reflection::simple(rs, label).apply(weight))
}

/// Orbit of `weight` under the parabolic subgroup `W_I` generated by `labels`.
pub fn orbit(rs: &RootSystem, labels: &[usize], weight: &Weight) -> Result<Vec<Weight>> {
    check_labels(rs, labels)?;
    if weight.len() != rs.rank() {
        return Err(Error::DimensionMismatch { expected: rs.rank(), found: weight.len() });
    }
    Ok(orbit_under(&simple_reflections(rs, labels), weight))
}

/// Labels outside `support`: the generators of the stabilizer `W_λ`.
pub fn complement(rs: &RootSystem, support: &[usize]) -> Vec<usize> {
    (1..=rs.rank()).filter(|l| !support.contains(l)).collect()
}

/// `|W_I|`.
///
/// Computed component by component through the orbit-stabilizer chain
/// `|W_C| = |W_C · ω_j| · |W_{C∖j}|` for a leaf `j` of each connected
/// component `C`, which keeps every orbit small even for `E8`.
pub fn parabolic_order(rs: &RootSystem, labels: &[usize]) -> Result<u128> {
    check_labels(rs, labels)?;
    let set: BTreeSet<usize> = labels.iter().copied().collect();
    Ok(order_rec(rs, &set))
}

fn neighbours(rs: &RootSystem, set: &BTreeSet<usize>, l: usize) -> usize {
    set.iter().filter(|&&m| m != l && rs.cartan()[l - 1][m - 1] != 0).count()
}

fn order_rec(rs: &RootSystem, set: &BTreeSet<usize>) -> u128 {
    if set.is_empty() {
        return 1;
    }
    let mut remaining = set.clone();
    let mut total = 1u128;
    while let Some(&first) = remaining.iter().next() {
        // Connected component of `first` inside `set`.
        let mut comp = BTreeSet::from([first]);
        let mut stack = vec![first];
        while let Some(l) = stack.pop() {
            for &m in set {
                if rs.cartan()[l - 1][m - 1] != 0 && comp.insert(m) {
                    stack.push(m);
                }
            }
        }
        remaining.retain(|l| !comp.contains(l));
        let leaf = comp
            .iter()
            .copied()
            .find(|&l| neighbours(rs, &comp, l) <= 1)
            .unwrap_or(first);
        let gens: Vec<usize> = comp.iter().copied().collect();
        let orbit_size = orbit_under(&simple_reflections(rs, &gens), &Weight::fundamental(rs.rank(), leaf)).len();
        let mut rest = comp.clone();
        rest.remove(&leaf);
        total *= orbit_size as u128 * order_rec(rs, &rest);
    }
    total
}

pub fn weyl_order(rs: &RootSystem) -> u128 {
    let all: Vec<usize> = (1..=rs.rank()).collect();
    parabolic_order(rs, &all).expect("labels in range")
}

/// `|W| / |W_λ|`, the number of maximal cones of the fan attached to `support`.
pub fn coset_count(rs: &RootSystem, support: &[usize]) -> Result<u128> {
    check_labels(rs, support)?;
    let stab = parabolic_order(rs, &complement(rs, support))?;
    Ok(weyl_order(rs) / stab)
}

/// Matrix of `s_{w_1} ⋯ s_{w_m}` acting on ω-coordinates (column `k` is the image of `ω_k`).
pub fn element_matrix(rs: &RootSystem, word: &[usize]) -> Result<Vec<Vec<i64>>> {
    check_labels(rs, word)?;
    let n = rs.rank();
    let mut cols: Vec<Vec<i64>> = (1..=n).map(|k| Weight::fundamental(n, k).0).collect();
    for &l in word.iter().rev() {
        let s = Reflection::simple(rs, l);
        for c in cols.iter_mut() {
            s.apply_in_place(c);
        }
    }
    Ok((0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect())
}

pub fn apply_matrix(m: &[Vec<i64>], v: &Weight) -> Weight {
    Weight(m.iter().map(|row| row.iter().zip(&v.0).map(|(a, b)| a * b).sum()).collect())
}

/// Reduced words for every element of `W_I`, keyed by the image of the
/// regular element `-ρ`; the group order must not exceed `cap`.
pub fn element_words(rs: &RootSystem, labels: &[usize], cap: usize) -> Result<Vec<Vec<usize>>> {
    check_labels(rs, labels)?;
    let gens = simple_reflections(rs, labels);
    let mut sorted: Vec<usize> = labels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let start: Vec<i64> = vec![-1; rs.rank()];
    let mut words: HashMap<Vec<i64>, Vec<usize>> = HashMap::from([(start.clone(), Vec::new())]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let word = words[&v].clone();
        for (g, &l) in gens.iter().zip(&sorted) {
            let mut w = v.clone();
            g.apply_in_place(&mut w);
            if !words.contains_key(&w) {
                if words.len() >= cap {
                    return Err(Error::RankCap { rank: rs.rank(), cap });
                }
                let mut nw = vec![l];
                nw.extend(&word);
                words.insert(w.clone(), nw);
                queue.push_back(w);
            }
        }
    }
    let mut out: Vec<(Vec<i64>, Vec<usize>)> = words.into_iter().collect();
    out.sort();
    Ok(out.into_iter().map(|(_, w)| w).collect())
}

/// Whether the integer matrix `m` preserves the invariant form.
pub fn preserves_form(rs: &RootSystem, m: &[Vec<i64>]) -> bool {
    let n = rs.rank();
    let cols: Vec<Vec<Rat>> = (0..n).map(|k| m.iter().map(|row| rat(row[k] as i128)).collect()).collect();
    (0..n).all(|i| (0..n).all(|j| rs.inner(&cols[i], &cols[j]) == rs.gram()[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det_int;

    fn rs(s: &str) -> RootSystem {
        RootSystem::new(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn simple_reflection_examples() {
        let a2 = rs("A2");
        assert_eq!(simple_reflection(&a2, 1, &Weight(vec![1, 0])).unwrap(), Weight(vec![-1, 1]));
        let b2 = rs("B2");
        assert_eq!(simple_reflection(&b2, 2, &Weight(vec![0, -1])).unwrap(), Weight(vec![-1, 1]));
        assert!(simple_reflection(&a2, 3, &Weight(vec![1, 0])).is_err());
    }

    #[test]
    fn orbit_examples() {
        let a2 = rs("A2");
        assert_eq!(
            orbit(&a2, &[1, 2], &Weight(vec![1, 0])).unwrap(),
            vec![Weight(vec![-1, 1]), Weight(vec![0, -1]), Weight(vec![1, 0])]
        );
        let b2 = rs("B2");
        assert_eq!(
            orbit(&b2, &[2], &Weight(vec![0, -1])).unwrap(),
            vec![Weight(vec![-1, 1]), Weight(vec![0, -1])]
        );
    }

    #[test]
    fn group_orders_match_degree_products() {
        // Products of the degrees of the basic invariants.
        let cases = [
            ("A3", 24u128),
            ("B3", 48),
            ("C4", 384),
            ("D4", 192),
            ("D5", 1920),
            ("G2", 12),
            ("F4", 1152),
            ("E6", 51840),
            ("E7", 2_903_040),
            ("E8", 696_729_600),
        ];
        for (s, order) in cases {
            assert_eq!(weyl_order(&rs(s)), order, "{s}");
        }
    }

    #[test]
    fn e6_order_from_regular_orbit() {
        let e6 = rs("E6");
        let rho = Weight(vec![1; 6]);
        let all: Vec<usize> = (1..=6).collect();
        assert_eq!(orbit(&e6, &all, &rho).unwrap().len(), 51840);
    }

    #[test]
    fn coset_counts() {
        assert_eq!(coset_count(&rs("A2"), &[1]).unwrap(), 3);
        assert_eq!(coset_count(&rs("B3"), &[2]).unwrap(), 12);
        assert_eq!(coset_count(&rs("A3"), &[1, 2, 3]).unwrap(), 24);
    }

    #[test]
    fn element_matrix_is_unimodular_isometry() {
        let g2 = rs("G2");
        let m = element_matrix(&g2, &[1, 2, 1]).unwrap();
        assert_eq!(det_int(&m).abs(), 1);
        assert!(preserves_form(&g2, &m));
        let id = element_matrix(&g2, &[]).unwrap();
        assert_eq!(id, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn element_words_enumerate_the_group() {
        let words = element_words(&rs("B2"), &[1, 2], 100).unwrap();
        assert_eq!(words.len(), 8);
        assert!(element_words(&rs("F4"), &[1, 2, 3, 4], 100).is_err());
    }
}
