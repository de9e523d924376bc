use gausslab::classify::{self, ClosedWalk};
use gausslab::codec::{parse_intersigned, parse_link, parse_signed, AnyCode};
use gausslab::isomorphism::{self, generators};
use gausslab::topology::{self, FourValentGraph};
use gausslab::{moves, oracle, IntersignedGaussCode, IntersignedLinkCode, Sign};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 96, ..ProptestConfig::default() }
}

fn code_params() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), 1usize..=n.min(3), any::<u64>()))
}

/// A random element of the full group applied to `code`.
fn scramble(code: &IntersignedGaussCode, seed: u64) -> IntersignedGaussCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<u32> = (1..=code.n() as u32).collect();
    perm.shuffle(&mut rng);
    let mut out = generators::relabel(code, &perm);
    let mut order: Vec<usize> = (0..out.components().len()).collect();
    order.shuffle(&mut rng);
    out = generators::permute_components(&out, &order);
    for c in 0..out.components().len() {
        let len = out.components()[c].len();
        out = generators::rotate(&out, c, rand::Rng::gen_range(&mut rng, 0..len));
        if rand::Rng::gen_bool(&mut rng, 0.5) {
            out = isomorphism::reverse_component(&out, &[c].into_iter().collect()).unwrap();
        }
    }
    out
}

fn sign_sums(code: &IntersignedLinkCode) -> Vec<Sign> {
    code.components().iter().map(|c| c.sign_sum()).collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn verdicts_are_invariant_under_isomorphism((n, k, seed) in code_params(), g in any::<u64>()) {
        let a = oracle::random_code(n, k, seed);
        let b = scramble(&a, g);
        let (oa, ob) = (classify::orientability(&a), classify::orientability(&b));
        prop_assert_eq!(oa.orientable, ob.orientable);
        prop_assert_eq!(classify::two_colorability(&a).two_colorable, classify::two_colorability(&b).two_colorable);
        let sa = topology::trace_faces(&topology::scheme_from_code(&a, 0)).unwrap();
        let sb = topology::trace_faces(&topology::scheme_from_code(&b, 0)).unwrap();
        prop_assert_eq!(sa, sb);
        prop_assert_eq!(isomorphism::canonical_intersigned(&a, false), isomorphism::canonical_intersigned(&b, false));
    }

    #[test]
    fn verdicts_do_not_depend_on_rotation_seed((n, k, seed) in code_params(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let code = oracle::random_code(n, k, seed);
        let (a, b) = (classify::orientability_with_seed(&code, s1), classify::orientability_with_seed(&code, s2));
        prop_assert_eq!(a.orientable, b.orientable);
        let fa = topology::trace_faces(&topology::scheme_from_code(&code, s1)).unwrap();
        let fb = topology::trace_faces(&topology::scheme_from_code(&code, s2)).unwrap();
        prop_assert_eq!(fa, fb);
    }

    #[test]
    fn algebra_agrees_with_oracles((n, k, seed) in code_params(), rot in any::<u64>()) {
        let code = oracle::random_code(n, k, seed);
        let scheme = topology::scheme_from_code(&code, rot);
        let o = classify::orientability_with_seed(&code, rot);
        prop_assert_eq!(o.orientable, oracle::face_trace_orientable(&scheme));
        prop_assert_eq!(o.orientable, topology::trace_faces(&scheme).unwrap().orientable);
        let graph = FourValentGraph::new(&code);
        prop_assert_eq!(o.orientable, oracle::brute_coboundary_membership(&o.w1_rep, &graph).unwrap());
        prop_assert_eq!(classify::two_colorability(&code).two_colorable, classify::two_color_oracle(&scheme));
    }

    #[test]
    fn witnesses_solve_their_equations((n, k, seed) in code_params()) {
        let code = oracle::random_code(n, k, seed);
        let graph = FourValentGraph::new(&code);
        let o = classify::orientability(&code);
        if let Some(x) = &o.witness {
            prop_assert_eq!(&gausslab::gf2::coboundary(x, &graph).unwrap(), &o.w1_rep);
        }
        let t = classify::two_colorability(&code);
        if let Some(x) = &t.witness {
            prop_assert_eq!(&gausslab::gf2::coboundary(x, &graph).unwrap(), &t.dual_rep);
        }
    }

    #[test]
    fn pairing_identity_holds((n, k, seed) in code_params(), walk_seed in any::<u64>(), len in 1usize..20) {
        let code = oracle::random_code(n, k, seed);
        let graph = FourValentGraph::new(&code);
        let z: ClosedWalk = oracle::random_walk(&graph, len, walk_seed);
        let (lhs, rhs) = classify::pairing_check(&code, &z).unwrap();
        prop_assert_eq!(lhs, rhs);
        let straight = z.passages(&graph).unwrap().iter().filter(|&&p| p == classify::Passage::Straight).count();
        prop_assert_eq!(classify::w1_evaluate(&code, &z).unwrap(), lhs ^ (straight % 2) as u8);
    }

    #[test]
    fn signed_codes_give_orientable_codes((n, k, seed) in code_params()) {
        let signed = oracle::random_signed(n, k, seed);
        let code = classify::from_signed(&signed);
        prop_assert!(classify::orientability(&code).orientable);
        let again = parse_signed(&signed.to_string()).unwrap();
        prop_assert_eq!(&again, &signed);
    }

    #[test]
    fn codec_round_trips((n, k, seed) in code_params(), free in 0usize..2) {
        let code = oracle::random_code(n, k, seed);
        prop_assert_eq!(&parse_intersigned(&code.to_string()).unwrap(), &code);
        let any = AnyCode::Intersigned(code.clone());
        prop_assert_eq!(&AnyCode::from_json(&any.to_json()).unwrap(), &any);
        let link = oracle::random_link(n, k, free, seed);
        let back = parse_link(&link.to_string()).unwrap();
        prop_assert_eq!(isomorphism::canonical_link(&back), isomorphism::canonical_link(&link));
        let json = serde_json::to_string(&link.to_json()).unwrap();
        let parsed = AnyCode::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(parsed.to_string(), link.to_string());
    }

    #[test]
    fn complement_is_reversible((n, k, seed) in code_params(), w in any::<u64>()) {
        let code = oracle::random_code(n, k, seed);
        let writhes = (1..=n as u32).map(|s| (s, Sign::from_bit(((w >> s) & 1) as u8))).collect();
        let link = moves::complement(&code, &writhes).unwrap();
        let (back, ws) = moves::uncomplement(&link).unwrap();
        prop_assert_eq!(back, code);
        prop_assert_eq!(ws, writhes);
    }

    #[test]
    fn moves_invert_and_conserve(n in 0usize..=4, k in 1usize..=2, seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let link = oracle::random_link(n, k.min(n.max(1)), usize::from(n == 0), seed);
        let all = moves::enumerate_moves(&link);
        prop_assume!(!all.is_empty());
        let m = &all[pick.index(all.len())];
        let (next, inv) = moves::apply_with_inverse(&link, m).unwrap();
        prop_assert_eq!(next.n() as i64, link.n() as i64 + m.crossing_delta());
        prop_assert_eq!(inv.crossing_delta(), -m.crossing_delta());
        prop_assert_eq!(sign_sums(&next), sign_sums(&link));
        let back = moves::apply_move(&next, &inv).unwrap();
        prop_assert_eq!(isomorphism::canonical_link(&back), isomorphism::canonical_link(&link));
    }
}
