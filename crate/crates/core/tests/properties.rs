//! Randomized structural properties of the pipeline: allowability of
//! truncations, solver postconditions, equivalence-move symmetries, and
//! canonicalization laws.

use proptest::prelude::*;

use montesinos::classifier::{find_toroidal, toroidal_search_params, Exclusions};
use montesinos::edgepath::{enumerate_skeletons, truncate_at_u, SearchParams};
use montesinos::knot::{
    canonicalize, component_count, shift_permutation_orbit, KnotParams,
};
use montesinos::rat;
use montesinos::solver::{solve_systems, SolutionFamily};
use montesinos::Rational;

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Non-integral tangle slopes: ±p/q + shift with small denominators.
fn tangle() -> impl Strategy<Value = Rational> {
    (2i128..=9, 1i128..9, any::<bool>(), -1i128..=1)
        .prop_filter_map("reduced proper fraction", |(q, p, neg, shift)| {
            if p >= q || gcd(p, q) != 1 {
                return None;
            }
            let f = if neg { rat(-p, q) } else { rat(p, q) };
            Some(f + Rational::from_int(shift))
        })
}

/// Arbitrary valid knots (single component, bounded slope sum).
fn knot() -> impl Strategy<Value = KnotParams> {
    (tangle(), tangle(), tangle()).prop_filter_map("is a knot", |(a, b, c)| {
        let k = KnotParams::new([a, b, c]).ok()?;
        (k.slope_sum().abs() <= rat(3, 1) && component_count(&k) == 1).then_some(k)
    })
}

fn lite_params() -> SearchParams {
    SearchParams { u_floor: Rational::ONE, max_edges: 4 }
}

/// Multiset fingerprint of a solution set that equivalence moves preserve:
/// (ū, sorted path lengths) per system.
fn solution_shape(k: &KnotParams) -> Vec<(Rational, [Rational; 3])> {
    let mut out: Vec<(Rational, [Rational; 3])> = solve_systems(k, &lite_params())
        .unwrap()
        .iter()
        .map(|s| {
            let mut lens = [
                s.paths[0].length(),
                s.paths[1].length(),
                s.paths[2].length(),
            ];
            lens.sort();
            (s.u_bar, lens)
        })
        .collect();
    out.sort();
    out
}

fn delta_set(k: &KnotParams) -> Vec<Rational> {
    find_toroidal(k, &toroidal_search_params(), &Exclusions::empty())
        .unwrap()
        .iter()
        .map(|f| f.delta)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncations_are_allowable(t in tangle(), skel_pick in any::<prop::sample::Index>(),
                                 lam_num in 0i128..=16) {
        let skels = enumerate_skeletons(t, &SearchParams { u_floor: Rational::ONE, max_edges: 5 })
            .unwrap();
        let skel = &skels[skel_pick.index(skels.len())];
        // The swept u-range: from the start vertex down to the last
        // nonvertical arrival.
        let start_u = Rational::from_int(t.denom());
        let mut low = start_u;
        for st in &skel.steps {
            if st.is_vertical() {
                break;
            }
            low = st.to.u().unwrap();
        }
        let u = low + rat(lam_num, 16) * (start_u - low);
        let path = truncate_at_u(skel, u).unwrap();
        prop_assert!(path.validate(), "invalid truncation {}", path.render());
        prop_assert_eq!(path.final_u(), u);
        // Cutting higher never lengthens the path.
        if u < start_u {
            let higher = truncate_at_u(skel, start_u).unwrap();
            prop_assert!(higher.length() <= path.length());
        }
    }

    #[test]
    fn solver_postconditions(k in knot()) {
        for s in solve_systems(&k, &lite_params()).unwrap() {
            prop_assert_eq!(s.ys[0] + s.ys[1] + s.ys[2], Rational::ZERO);
            prop_assert!(s.u_bar >= Rational::ONE);
            for p in &s.paths {
                prop_assert!(p.validate(), "invalid path {}", p.render());
                prop_assert_eq!(p.final_u(), s.u_bar);
            }
        }
    }

    #[test]
    fn mirror_preserves_solution_shapes(k in knot()) {
        prop_assert_eq!(solution_shape(&k), solution_shape(&k.mirror()));
    }

    #[test]
    fn move3_preserves_solution_shapes(k in knot(), a in -2i128..=2, b in -2i128..=2) {
        let shifted = KnotParams {
            t: [
                k.t[0] + Rational::from_int(a),
                k.t[1] + Rational::from_int(b),
                k.t[2] - Rational::from_int(a + b),
            ],
        };
        prop_assert_eq!(solution_shape(&k), solution_shape(&shifted));
    }

    #[test]
    fn mirror_negates_toroidal_slopes(k in knot()) {
        let mut ours = delta_set(&k);
        let mut theirs: Vec<Rational> = delta_set(&k.mirror()).iter().map(|d| -*d).collect();
        ours.sort();
        theirs.sort();
        prop_assert_eq!(ours, theirs);
    }

    #[test]
    fn move3_preserves_toroidal_slopes(k in knot(), a in -2i128..=2, b in -2i128..=2) {
        let shifted = KnotParams {
            t: [
                k.t[0] + Rational::from_int(a),
                k.t[1] + Rational::from_int(b),
                k.t[2] - Rational::from_int(a + b),
            ],
        };
        prop_assert_eq!(delta_set(&k), delta_set(&shifted));
    }

    #[test]
    fn interval_family_members_share_twist(k in knot(), lam_num in 0i128..16) {
        use montesinos::slope::twist;
        for s in solve_systems(&k, &lite_params()).unwrap() {
            if let Some(SolutionFamily::UInterval { lo, hi }) = s.family {
                let u = lo + rat(lam_num, 16) * (hi - lo);
                let member = s.at_u(u).unwrap();
                prop_assert_eq!(twist(&member), twist(&s));
            }
        }
    }

    #[test]
    fn canonicalization_laws(k in knot(), pick in any::<prop::sample::Index>()) {
        let c = canonicalize(&k);
        // Idempotence.
        let again = canonicalize(&c.rep);
        prop_assert_eq!(again.rep, c.rep);
        prop_assert!(!again.mirrored);
        // Orbit stability: every shift/permutation variant canonicalizes the
        // same way, and the mirror reaches the same representative.
        let orbit: Vec<KnotParams> = shift_permutation_orbit(&k, 4).into_iter().collect();
        let member = orbit[pick.index(orbit.len())];
        prop_assert_eq!(canonicalize(&member).rep, c.rep);
        prop_assert_eq!(canonicalize(&k.mirror()).rep, c.rep);
    }

    #[test]
    fn component_count_respects_moves(k in knot(), a in -2i128..=2, b in -2i128..=2) {
        prop_assert_eq!(component_count(&k.mirror()), 1);
        let shifted = KnotParams {
            t: [
                k.t[0] + Rational::from_int(a),
                k.t[1] + Rational::from_int(b),
                k.t[2] - Rational::from_int(a + b),
            ],
        };
        prop_assert_eq!(component_count(&shifted), 1);
        let perm = KnotParams { t: [k.t[2], k.t[0], k.t[1]] };
        prop_assert_eq!(component_count(&perm), 1);
    }
}
