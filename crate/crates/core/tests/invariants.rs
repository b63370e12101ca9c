use msing::amod::{bmu_band, bsigma_band, check_relations, lens_module};
use msing::coeff::{Kind, Profile};
use msing::config::{parse_window, window_string, Format, RunConfig};
use msing::dualalg::{basis, Tag};
use msing::ext::ExtWindow;
use msing::fp::{binom, binom_falling, image_and_kernel, Fp};
use msing::ops::{MilnorElement, Steenrod};
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = Profile> {
    prop_oneof![Just(Profile::trivial(2)), Just(Profile::trivial(3)), Just(Profile::complex()), Just(Profile::real())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn binom_agrees_with_falling_factorial(a in -40i64..40, b in 0i64..12, p in prop::sample::select(vec![2u32, 3, 5])) {
        prop_assert_eq!(Some(binom(a, b, p)), binom_falling(a, b, p));
    }

    #[test]
    fn rank_nullity(p in prop::sample::select(vec![2u32, 3, 5]), rows in 1usize..6, cols in prop::collection::vec(prop::collection::vec(0u32..5, 6), 0..7)) {
        let f = Fp::new(p);
        let cols: Vec<Vec<u32>> = cols.into_iter().map(|c| c.into_iter().take(rows).map(|x| x % p).collect()).collect();
        let (img, ker) = image_and_kernel(f, rows, &cols);
        prop_assert_eq!(img.rank() + ker.len(), cols.len());
        for k in &ker {
            for i in 0..rows {
                let s = cols.iter().zip(k).fold(0, |acc, (c, &x)| f.add(acc, f.mul(c[i], x)));
                prop_assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn milnor_product_is_associative(prof in profile(), d in prop::collection::vec(0i32..6, 3), picks in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let st = Steenrod::new(prof);
        let tag = Tag::An(2);
        let mut xs = Vec::new();
        for (deg, ix) in d.iter().zip(&picks) {
            let b = basis(prof.prime, tag, *deg);
            prop_assume!(!b.is_empty());
            xs.push(MilnorElement::symbol(prof, tag, *ix.get(&b)));
        }
        let l = st.mul(&st.mul(&xs[0], &xs[1]).unwrap(), &xs[2]).unwrap();
        let r = st.mul(&xs[0], &st.mul(&xs[1], &xs[2]).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn band_modules_satisfy_relations(prof in profile(), lo in -6i32..0, w in 1i32..8, which in 0u8..3) {
        let st = Steenrod::new(prof);
        let m = match which {
            0 => bmu_band(prof, 1, lo, lo + w),
            1 => bsigma_band(prof, 1, lo, lo + w),
            _ => lens_module(prof, 1, -lo, w),
        };
        prop_assert!(check_relations(&st, &m, 8).is_ok(), "{}", m.name);
    }

    #[test]
    fn config_text_round_trips(prime in prop::sample::select(vec![2u32, 3]), kind in 0u8..3, env in 0i32..4, s in 0usize..5, a in -4i32..2, w in 0i32..8, deg in 1i32..30, fmt in 0u8..3, zero in any::<bool>(), module in "[a-z]{1,6}") {
        let mut c = RunConfig::default();
        c.prime = prime;
        c.profile = [Kind::Trivial, Kind::Complex, Kind::Real][kind as usize];
        c.envelope = env;
        c.window = ExtWindow::new(s, a, a + w);
        c.max_deg = deg;
        c.format = [Format::Json, Format::Svg, Format::Txt][fmt as usize];
        c.zero_map = zero;
        c.module = module;
        prop_assert_eq!(RunConfig::from_text(&c.to_text()).unwrap(), c.clone());
        prop_assert_eq!(parse_window(&window_string(&c.window)).unwrap(), c.window);
    }
}
