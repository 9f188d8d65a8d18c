//! Randomized invariants over the pattern algebra and the text formats.

use proptest::prelude::*;

use meshpat::force::{compare_wrt_point, Relation};
use meshpat::insertion::{insert_point, star_set, Direction};
use meshpat::mesh::{sq, MeshPattern, Shading};
use meshpat::occurrence::{classical_occurrences, mesh_occurrences};
use meshpat::prover::{parse_trace_text, shading_lemma_square, trace_text, verify};
use meshpat::{Permutation, Symmetry};

fn arb_permutation(max_size: usize) -> impl Strategy<Value = Permutation> {
    (0..=max_size).prop_flat_map(|n| {
        Just(n).prop_perturb(move |n, mut rng| {
            let mut word: Vec<u8> = (1..=n as u8).collect();
            for i in (1..word.len()).rev() {
                let j = rng.random_range(0..=i);
                word.swap(i, j);
            }
            Permutation::new(word).unwrap()
        })
    })
}

fn arb_mesh(max_size: usize) -> impl Strategy<Value = MeshPattern> {
    (arb_permutation(max_size), any::<u128>()).prop_map(|(word, raw)| {
        let bits = (word.len() + 1) * (word.len() + 1);
        let mask = if bits == 128 { raw } else { raw & ((1 << bits) - 1) };
        MeshPattern::from_mask(word, Shading(mask)).unwrap()
    })
}

proptest! {
    #[test]
    fn text_form_round_trips(p in arb_mesh(9)) {
        let text = p.to_string();
        let back: MeshPattern = text.parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn symmetries_invert(p in arb_mesh(6)) {
        for s in Symmetry::ALL {
            prop_assert_eq!(s.inverse().apply(&s.apply(&p)), p.clone());
        }
    }

    #[test]
    fn occurrences_are_sorted_and_increasing(
        host in arb_permutation(7),
        patt in arb_permutation(3),
    ) {
        let occs = classical_occurrences(&host, &patt);
        for o in &occs {
            prop_assert!(o.indices().windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(
                Permutation::flatten(&o.letters(&host)),
                patt.clone()
            );
        }
        for w in occs.windows(2) {
            prop_assert!(w[0] < w[1], "lexicographic output order");
        }
    }

    #[test]
    fn insertion_grows_and_preserves_counts(p in arb_mesh(4), col in 0usize..5, row in 0usize..5) {
        let square = sq(col.min(p.size()), row.min(p.size()));
        if p.is_shaded(square) {
            return Ok(());
        }
        let bigger = insert_point(&p, square).unwrap();
        prop_assert_eq!(bigger.size(), p.size() + 1);
        prop_assert!(bigger.shading().count() >= p.shading().count());
        prop_assert!(star_set(&p, square).unwrap().len() <= 4);
    }

    #[test]
    fn comparison_relations_are_antisymmetric(host in arb_permutation(6)) {
        let patt: Permutation = "21".parse().unwrap();
        let occs = classical_occurrences(&host, &patt);
        for u in &occs {
            for v in &occs {
                for point in 1..=2 {
                    let fwd = compare_wrt_point(&host, u, v, point).unwrap();
                    let bwd = compare_wrt_point(&host, v, u, point).unwrap();
                    prop_assert_eq!(
                        fwd.contains(&Relation::Above),
                        bwd.contains(&Relation::Below)
                    );
                    prop_assert_eq!(
                        fwd.contains(&Relation::LeftOf),
                        bwd.contains(&Relation::RightOf)
                    );
                }
            }
        }
    }

    #[test]
    fn symmetry_preserves_containment(p in arb_mesh(3), host in arb_permutation(5)) {
        for s in [Symmetry::Reverse, Symmetry::Inverse, Symmetry::ReverseComplement] {
            prop_assert_eq!(
                mesh_occurrences(&host, &p).len(),
                mesh_occurrences(&s.apply_perm(&host), &s.apply(&p)).len()
            );
        }
    }

    #[test]
    fn shading_lemma_traces_replay(p in arb_mesh(3)) {
        for square in p.unshaded_squares_row_major() {
            let res = shading_lemma_square(&p, square).unwrap();
            if res.is_success() {
                verify(&res).unwrap();
                let parsed = parse_trace_text(&trace_text(&res)).unwrap();
                prop_assert_eq!(parsed, res);
            }
        }
    }

    #[test]
    fn directions_parse_round_trip(d in prop::sample::select(Direction::ALL.to_vec())) {
        let text = d.to_string();
        prop_assert_eq!(text.parse::<Direction>().unwrap(), d);
    }
}
