//! Exhaustive oracle checks: every engine is replayed against a direct
//! brute-force reading of the region semantics, independent of the mask
//! machinery the library uses.

use rayon::prelude::*;

use meshpat::enumerate::{occ_count, Pattern};
use meshpat::force::{strength, strongest_occurrences, Force, ForcedPattern};
use meshpat::insertion::{insert_directed, insert_point, star_set, Direction};
use meshpat::mesh::{sq, MeshPattern, Shading, Square};
use meshpat::occurrence::{
    avoidance_fingerprint, classical_occurrences, contains_mesh, mesh_in_mesh_occurrences,
    mesh_occurrences, Occurrence,
};
use meshpat::{Permutation, Symmetry};

fn perm(s: &str) -> Permutation {
    s.parse().unwrap()
}

fn all_shadings(word: &str) -> Vec<MeshPattern> {
    let word: Permutation = word.parse().unwrap();
    let bits = (word.len() + 1) * (word.len() + 1);
    (0..1u128 << bits)
        .map(|m| MeshPattern::from_mask(word.clone(), Shading(m)).unwrap())
        .collect()
}

/// Region emptiness spelled out directly: no masks, no cut arrays. A host
/// point `(i, v)` lies in the region of pattern square `(a, b)` under an
/// occurrence when exactly `a` occurrence indices sit at or left of `i` and
/// exactly `b` occurrence values sit at or below `v`.
fn brute_region_empty(host: &Permutation, occ: &Occurrence, square: Square) -> bool {
    for i in 1..=host.len() {
        if occ.indices().contains(&i) {
            continue;
        }
        let v = host.value_at(i);
        let cols_left = occ.indices().iter().filter(|&&j| j < i).count();
        let rows_below = occ
            .indices()
            .iter()
            .filter(|&&j| host.value_at(j) < v)
            .count();
        if cols_left == square.col && rows_below == square.row {
            return false;
        }
    }
    true
}

fn brute_mesh_occurrences(host: &Permutation, p: &MeshPattern) -> Vec<Occurrence> {
    classical_occurrences(host, p.pattern())
        .into_iter()
        .filter(|occ| p.squares().iter().all(|&s| brute_region_empty(host, occ, s)))
        .collect()
}

#[test]
fn mesh_occurrences_match_brute_force_for_all_small_patterns() {
    let patterns: Vec<MeshPattern> = all_shadings("")
        .into_iter()
        .chain(all_shadings("1"))
        .chain(all_shadings("12"))
        .chain(all_shadings("21"))
        .collect();
    for n in 0..=6 {
        let hosts = Permutation::all(n);
        hosts.par_iter().for_each(|host| {
            for p in &patterns {
                assert_eq!(
                    mesh_occurrences(host, p),
                    brute_mesh_occurrences(host, p),
                    "host {host} pattern {p}"
                );
            }
        });
    }
}

#[test]
fn shading_monotonicity_under_subsets() {
    // dropping any one square can only add occurrences
    let patterns = all_shadings("12");
    let hosts: Vec<Permutation> = (0..=5).flat_map(Permutation::all).collect();
    patterns.par_iter().for_each(|p| {
        for s in p.squares() {
            let smaller = MeshPattern::from_mask(
                p.pattern().clone(),
                Shading(p.shading().0 & !p.square_mask(s).unwrap().0),
            )
            .unwrap();
            for host in &hosts {
                let big = mesh_occurrences(host, p);
                let small = mesh_occurrences(host, &smaller);
                assert!(
                    big.iter().all(|o| small.contains(o)),
                    "host {host}: occurrences of {p} must survive dropping {s}"
                );
            }
        }
    });
}

#[test]
fn mesh_in_mesh_transitivity_into_permutations() {
    // if m contains p and pi contains m then pi contains p
    let ps = [
        "213:3136".parse::<MeshPattern>().unwrap(),
        "12:393".parse().unwrap(),
        "21:56".parse().unwrap(),
        "12:16".parse().unwrap(),
    ];
    let ms: Vec<MeshPattern> = all_shadings("12")
        .into_iter()
        .step_by(7)
        .chain(all_shadings("21").into_iter().step_by(11))
        .chain(std::iter::once(
            MeshPattern::new(
                perm("42135"),
                [
                    sq(0, 0),
                    sq(0, 1),
                    sq(0, 2),
                    sq(1, 4),
                    sq(2, 4),
                    sq(3, 3),
                    sq(3, 4),
                    sq(3, 5),
                    sq(4, 0),
                    sq(4, 3),
                    sq(4, 4),
                    sq(4, 5),
                    sq(5, 0),
                ],
            )
            .unwrap(),
        ))
        .collect();
    let hosts: Vec<Permutation> = (0..=6).flat_map(Permutation::all).collect();
    for p in &ps {
        for m in &ms {
            if p.size() > m.size() || mesh_in_mesh_occurrences(m, p).is_empty() {
                continue;
            }
            hosts.par_iter().for_each(|host| {
                if contains_mesh(host, m) {
                    assert!(
                        contains_mesh(host, p),
                        "{host} contains {m} which contains {p}"
                    );
                }
            });
        }
    }
}

#[test]
fn symmetry_preserves_occurrence_counts() {
    let patterns = all_shadings("12");
    let hosts: Vec<Permutation> = (0..=5).flat_map(Permutation::all).collect();
    patterns.par_iter().step_by(3).for_each(|p| {
        for s in Symmetry::ALL {
            let sp = s.apply(p);
            for host in &hosts {
                let shost = s.apply_perm(host);
                assert_eq!(
                    mesh_occurrences(host, p).len(),
                    mesh_occurrences(&shost, &sp).len(),
                    "symmetry {s:?} on {p} in {host}"
                );
            }
        }
    });
}

#[test]
fn fingerprint_agrees_with_direct_containment() {
    let p: MeshPattern = "21:56".parse().unwrap();
    let fp = avoidance_fingerprint(&p, 5);
    for n in 0..=5 {
        for (idx, host) in Permutation::all(n).iter().enumerate() {
            assert_eq!(
                fp.avoids(n, idx),
                mesh_occurrences(host, &p).is_empty(),
                "host {host}"
            );
        }
    }
}

#[test]
fn insertion_agrees_with_region_semantics() {
    // the trivial embedding survives every insertion, and every non-trivial
    // occurrence of p in the enlarged pattern uses the inserted point
    let patterns = all_shadings("12");
    patterns.par_iter().for_each(|p| {
        for square in p.unshaded_squares_row_major() {
            for dir in Direction::ALL {
                let m = insert_directed(p, square, dir).unwrap();
                let trivial: Vec<usize> = (1..=p.size() + 1)
                    .filter(|&i| i != square.col + 1)
                    .collect();
                let occs = mesh_in_mesh_occurrences(&m, p);
                assert!(
                    occs.iter().any(|o| o.indices() == trivial),
                    "trivial occurrence lost inserting {square} {dir} into {p}"
                );
                for o in &occs {
                    if o.indices() != trivial {
                        assert!(
                            o.indices().contains(&(square.col + 1)),
                            "non-trivial occurrence skips the inserted point"
                        );
                    }
                }
            }
        }
    });
}

#[test]
fn directional_pair_count_law() {
    // the directional pair adds exactly two squares unless it overlaps the
    // transported shading
    for p in all_shadings("21") {
        for square in p.unshaded_squares_row_major() {
            let base = insert_point(&p, square).unwrap();
            for dir in Direction::ALL {
                let directed = insert_directed(&p, square, dir).unwrap();
                let added = directed.shading().count() - base.shading().count();
                assert!(added <= 2);
                let splits = p
                    .squares()
                    .iter()
                    .filter(|s| s.col == square.col)
                    .count()
                    + p.squares().iter().filter(|s| s.row == square.row).count();
                if added == 2 {
                    assert_eq!(
                        directed.shading().count() as usize,
                        p.squares().len() + splits + 2
                    );
                }
            }
        }
    }
}

#[test]
fn point_addition_dichotomy_smoke() {
    // a host containing p holds the shaded extension or all four directed
    // insertions; the exhaustive sweep lives in the acceptance suite
    let p: MeshPattern = "12:2".parse().unwrap();
    let square = sq(1, 1);
    let members = star_set(&p, square).unwrap();
    let shaded = p.with_square(square).unwrap();
    for host in Permutation::all(5) {
        if !contains_mesh(&host, &p) {
            continue;
        }
        let ok = contains_mesh(&host, &shaded)
            || members.iter().all(|m| contains_mesh(&host, m));
        assert!(ok, "host {host}");
    }
}

#[test]
fn forced_pattern_containment_matches_underlying() {
    let pattern: MeshPattern = "132:8".parse().unwrap();
    let forces = [
        Force::empty(),
        "1:R".parse().unwrap(),
        "2:U,3:D".parse().unwrap(),
        "3:L,1:U,2:D".parse().unwrap(),
    ];
    let hosts: Vec<Permutation> = (0..=6).flat_map(Permutation::all).collect();
    for force in forces {
        let fp = ForcedPattern::new(pattern.clone(), force).unwrap();
        hosts.par_iter().for_each(|host| {
            let expected = !mesh_occurrences(host, &pattern).is_empty();
            assert_eq!(!strongest_occurrences(host, &fp).is_empty(), expected);
        });
    }
}

#[test]
fn full_forces_are_binary_on_small_hosts() {
    for word in ["12", "21"] {
        let pattern = MeshPattern::classical(perm(word)).unwrap();
        let force = Force::new(vec![(1, Direction::Up), (2, Direction::Down)], 2).unwrap();
        let fp = ForcedPattern::new(pattern, force).unwrap();
        for n in 0..=6 {
            for host in Permutation::all(n) {
                assert!(strongest_occurrences(&host, &fp).len() <= 1);
            }
        }
    }
}

#[test]
fn strongest_occurrences_return_every_tie() {
    let fp = ForcedPattern::new(
        MeshPattern::classical(perm("12")).unwrap(),
        "1:U".parse().unwrap(),
    )
    .unwrap();
    for host in Permutation::all(5) {
        let best = strongest_occurrences(&host, &fp);
        if best.is_empty() {
            continue;
        }
        let top = strength(&host, &best[0], &fp.force).unwrap();
        for occ in mesh_occurrences(&host, &fp.pattern) {
            let s = strength(&host, &occ, &fp.force).unwrap();
            assert!(s <= top);
            assert_eq!(s == top, best.contains(&occ));
        }
    }
}

#[test]
fn forced_and_mesh_left_restrictions_differ() {
    // the leftward forced pair and the left-column meshes pick out
    // different occurrence sets in some host of size at most 4
    let forced = ForcedPattern::new(
        MeshPattern::classical(perm("12")).unwrap(),
        Force::new(vec![(1, Direction::Left)], 2).unwrap(),
    )
    .unwrap();
    let meshes: [MeshPattern; 2] = ["12:3".parse().unwrap(), "12:7".parse().unwrap()];
    for mesh in meshes {
        let witness = (1..=4)
            .flat_map(Permutation::all)
            .find(|host| strongest_occurrences(host, &forced) != mesh_occurrences(host, &mesh));
        assert!(
            witness.is_some(),
            "no separating host for the forced pair vs {mesh}"
        );
    }
}

#[test]
fn occ_count_spot_values() {
    assert_eq!(
        occ_count(
            &Pattern::Mesh("1:3".parse().unwrap()),
            &perm("35142")
        ),
        1
    );
    assert_eq!(
        occ_count(&Pattern::classical(perm("21")).unwrap(), &perm("2413")),
        3
    );
    let forced = ForcedPattern::new(
        MeshPattern::classical(perm("132")).unwrap(),
        Force::new(
            vec![(3, Direction::Up), (1, Direction::Down), (2, Direction::Down)],
            3,
        )
        .unwrap(),
    )
    .unwrap();
    for host in Permutation::all(5) {
        let c = occ_count(&Pattern::Forced(forced.clone()), &host);
        assert!(c <= 1, "fully forced patterns occur at most once");
        assert_eq!(c == 1, contains_mesh(&host, &forced.pattern));
    }
}
