use dgk_core::dgcat::{random_category, validate, DgStructure, RandomCategoryConfig};
use dgk_core::drinfeld::{drinfeld_quotient, TrustWindow};
use proptest::prelude::*;

fn contracted_labels(mask: u8, n: usize) -> Vec<String> {
    (0..n).filter(|i| mask >> i & 1 == 1).map(|i| format!("v{i}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quotients_satisfy_the_axioms(seed in any::<u64>(), mask in any::<u8>()) {
        let (_, c) = random_category(seed, &RandomCategoryConfig::default());
        let labels = contracted_labels(mask, c.object_count());
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let q = drinfeld_quotient(&c, &refs, 3).unwrap();
        let report = validate(&q);
        prop_assert!(report.is_valid(), "{}", report);
    }

    #[test]
    fn ungraded_bases_are_trusted_from_one_minus_depth(seed in any::<u64>(), mask in any::<u8>(), depth in 2usize..5) {
        let (_, c) = random_category(seed, &RandomCategoryConfig::ungraded());
        let labels = contracted_labels(mask, c.object_count());
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let q = drinfeld_quotient(&c, &refs, depth).unwrap();
        for a in 0..q.object_count() {
            for b in 0..q.object_count() {
                for m in 1 - depth as i32..=1 {
                    prop_assert!(q.trust_window(a, b).contains(m));
                }
            }
        }
    }

    #[test]
    fn deeper_truncations_agree_inside_the_window(seed in any::<u64>(), mask in any::<u8>()) {
        let (_, c) = random_category(seed, &RandomCategoryConfig::nonpositive());
        let labels = contracted_labels(mask, c.object_count());
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let shallow = drinfeld_quotient(&c, &refs, 2).unwrap();
        let deep = drinfeld_quotient(&c, &refs, 3).unwrap();
        for a in 0..c.object_count() {
            for b in 0..c.object_count() {
                let window = shallow.trust_window(a, b);
                prop_assert_ne!(window, TrustWindow::Nothing);
                let (complex, _) = shallow.hom_complex(a, b).unwrap();
                for m in complex.lo() - 1..=complex.hi() + 1 {
                    if window.contains(m) {
                        prop_assert!(deep.trust_window(a, b).contains(m));
                        prop_assert_eq!(shallow.cohomology(a, b, m).unwrap().dim, deep.cohomology(a, b, m).unwrap().dim);
                    }
                }
            }
        }
    }
}
