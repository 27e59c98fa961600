//! Property tests over random root systems, supports, words and lattices.

use proptest::prelude::*;

use crate::assoc;
use crate::genericfan::{self, GenericFan};
use crate::lattice::{hnf, Lattice};
use crate::linalg::{det_int, rat, rat_vec, RatVec};
use crate::polyhedral::{self, RationalCone};
use crate::rootsys::{RootSystem, Weight};
use crate::weyl;

const SYSTEMS: &[&str] = &["A1", "A2", "B2", "G2", "A3", "B3", "C3", "A1xA2", "A4", "B4", "C4", "D4", "B2xA1"];

fn rs(s: &str) -> RootSystem {
    RootSystem::new(&s.parse().unwrap()).unwrap()
}

/// A root system and a support meeting every component.
fn system_and_support() -> impl Strategy<Value = (String, Vec<usize>)> {
    prop::sample::select(SYSTEMS).prop_flat_map(|name| {
        let r = rs(name);
        let n = r.rank();
        let blocks = r.blocks().to_vec();
        prop::collection::vec(any::<bool>(), n)
            .prop_filter("support meets every component", move |mask| {
                blocks.iter().all(|b| b.clone().any(|i| mask[i]))
            })
            .prop_map(move |mask| {
                let s: Vec<usize> = (1..=n).filter(|i| mask[i - 1]).collect();
                (name.to_string(), s)
            })
    })
}

fn fan(name: &str, support: &[usize]) -> GenericFan {
    genericfan::build_sigma(&rs(name), support).unwrap()
}

fn word(max_label: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=max_label, 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn weyl_elements_are_lattice_isometries(name in prop::sample::select(SYSTEMS), w in word(4)) {
        let r = rs(name);
        let w: Vec<usize> = w.into_iter().filter(|&l| l <= r.rank()).collect();
        let m = weyl::element_matrix(&r, &w).unwrap();
        prop_assert!(weyl::preserves_form(&r, &m));
        prop_assert_eq!(det_int(&m).abs(), 1);
        for root in r.all_roots() {
            prop_assert!(r.is_root(&weyl::apply_matrix(&m, root)));
        }
    }

    #[test]
    fn orbits_are_invariant(name in prop::sample::select(SYSTEMS), w in word(4), v in prop::collection::vec(-3i64..=3, 4)) {
        let r = rs(name);
        let n = r.rank();
        let labels: Vec<usize> = (1..=n).collect();
        let v = Weight(v[..n].to_vec());
        let w: Vec<usize> = w.into_iter().filter(|&l| l <= n).collect();
        let moved = weyl::apply_matrix(&weyl::element_matrix(&r, &w).unwrap(), &v);
        let o1 = weyl::orbit(&r, &labels, &v).unwrap();
        let o2 = weyl::orbit(&r, &labels, &moved).unwrap();
        prop_assert!(o1.binary_search(&v).is_ok());
        prop_assert_eq!(weyl::weyl_order(&r) % o1.len() as u128, 0);
        prop_assert_eq!(o1, o2);
    }

    #[test]
    fn fan_structure((name, support) in system_and_support()) {
        let r = rs(&name);
        let gf = fan(&name, &support);
        prop_assert!(gf.check_invariants().is_ok());
        prop_assert!(!gf.j_lambda().is_empty());
        prop_assert!(gf.aff_hull_directions_check());
        let cone = RationalCone::from_parts(gf.prim().to_vec(), gf.facet_normals().to_vec(), r.gram());
        prop_assert!(cone.contains_strictly(&gf.weight().to_rat()));
        prop_assert!(cone.contains_strictly(&gf.baricenter().unwrap().to_rat()));
        // -ω_i is interior exactly when the support is {i}.
        for i in 1..=r.rank() {
            let inside = cone.contains_strictly(&Weight::fundamental(r.rank(), i).neg().to_rat());
            prop_assert_eq!(inside, support == [i]);
        }
        let words = weyl::element_words(&r, &weyl::complement(&r, &support), 5000).unwrap();
        for w in words.iter().take(50) {
            let m = weyl::element_matrix(&r, w).unwrap();
            let mut image: Vec<Weight> = gf.prim().iter().map(|p| weyl::apply_matrix(&m, p)).collect();
            image.sort();
            prop_assert_eq!(&image, &gf.prim().to_vec());
        }
    }

    #[test]
    fn classification_agrees_with_oracles((name, support) in system_and_support()) {
        let gf = fan(&name, &support);
        let c = genericfan::classify(&gf, true);
        prop_assert!(c.is_ok(), "{:?}", c.err());
        let f = c.unwrap().flags;
        prop_assert!(!f.gorenstein_fano || f.q_gorenstein_fano);
        prop_assert_eq!(f.fano, f.gorenstein_fano && f.smooth);
    }

    #[test]
    fn fundamental_rays_survive_in_smaller_cones((name, support) in system_and_support(), extra in 1usize..=4) {
        let r = rs(&name);
        let mut bigger = support.clone();
        if extra <= r.rank() && !bigger.contains(&extra) {
            bigger.push(extra);
            bigger.sort();
        }
        let small = fan(&name, &support);
        let large = fan(&name, &bigger);
        // σ for the larger support sits inside σ for the smaller one, so a
        // fundamental ray of the bigger cone that survives stays a ray.
        prop_assert!(small.j_lambda().iter().all(|j| large.j_lambda().contains(j)));
    }

    #[test]
    fn minimal_pair_lattices_and_idempotence((name, support) in system_and_support()) {
        let r = rs(&name);
        let gf = fan(&name, &support);
        let pair = assoc::minimal_pair(&gf).unwrap();
        prop_assert!(assoc::reflection_stable(&gf, &pair.roots).unwrap());
        // Λ_R′ ⊆ Λ_P: the roots are integral, and Λ_P ⊆ Λ_P′: coroots pair integrally.
        for (beta, co) in pair.roots.base.iter().zip(pair.coroots()) {
            prop_assert_eq!(co.iter().zip(&beta.0).map(|(a, b)| a * b).sum::<i64>(), 2);
        }
        let det = det_int(&pair.roots.cartan).abs();
        let index = Lattice::from_int_generators(&pair.roots.vectors.iter().map(|v| v.0.clone()).collect::<Vec<_>>(), r.rank())
            .index_in(&Lattice::standard(r.rank()))
            .unwrap();
        match &pair.lattice_relation {
            assoc::LatticeRelation::WeightLattice => prop_assert_eq!(index, rat(det)),
            assoc::LatticeRelation::RootLattice => prop_assert_eq!(index, rat(1)),
            assoc::LatticeRelation::Between { .. } => prop_assert!(rat(1) < index && index < rat(det)),
        }
        let again = RootSystem::new(&pair.roots.spec).unwrap();
        let gf2 = genericfan::build_sigma(&again, &pair.support).unwrap();
        let pair2 = assoc::minimal_pair(&gf2).unwrap();
        prop_assert_eq!(pair2.roots.type_name(), pair.roots.type_name());
        prop_assert_eq!(&pair2.support, &pair.support);
        prop_assert_eq!(gf2.max_cone_count(), gf.max_cone_count());
    }

    #[test]
    fn hnf_spans_the_same_lattice(rows in prop::collection::vec(prop::collection::vec(-6i128..=6, 3), 1..5), coeffs in prop::collection::vec(-3i128..=3, 5)) {
        let h = hnf(&rows, 3);
        prop_assert_eq!(hnf(&h, 3), h.clone());
        let l = Lattice::from_generators(&rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect::<Vec<RatVec>>(), 3);
        for row in &rows {
            prop_assert!(l.contains(&row.iter().map(|&x| rat(x)).collect::<Vec<_>>()));
        }
        let combo: Vec<i128> = (0..3).map(|k| rows.iter().zip(&coeffs).map(|(r, c)| r[k] * c).sum()).collect();
        prop_assert!(l.contains(&combo.iter().map(|&x| rat(x)).collect::<Vec<_>>()));
        let back = Lattice::from_generators(&l.basis(), 3);
        prop_assert_eq!(back, l);
    }

    #[test]
    fn cone_membership_methods_agree(gens in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 3..7), v in prop::collection::vec(-4i64..=4, 3)) {
        let r = rs("A1xA1xA1");
        let gens: Vec<RatVec> = gens.iter().map(|g| rat_vec(g)).collect();
        prop_assume!(crate::linalg::rank(&gens) == 3);
        let Ok(cone) = RationalCone::from_generators(&gens, r.gram()) else { return Ok(()) };
        prop_assume!(!cone.facets.is_empty());
        let v = rat_vec(&v);
        prop_assert_eq!(polyhedral::in_cone_lp(&gens, &v), cone.contains(&v));
    }
}
