use msing::amod::{bmu_band, lens_module, lens_tower, residue_map, susp, trivial, ModMap};
use msing::cobar::cobar_ext;
use msing::coeff::Profile;
use msing::ext::*;
use msing::fp::Fp;
use msing::ops::Steenrod;
use std::collections::BTreeMap;

fn central() -> [Profile; 3] {
    [Profile::trivial(2), Profile::trivial(3), Profile::complex()]
}

#[test]
fn koszul_chart_over_a0() {
    for p in [2, 3] {
        let st = Steenrod::new(Profile::trivial(p));
        let c = ext_dims(&st, &trivial(st.profile, 0), 0, &ExtWindow::new(5, 0, 4)).unwrap();
        let want: BTreeMap<_, _> = (0..=5).map(|s| ((s, s as i32, 0), 1)).collect();
        assert_eq!(c.entries, want, "l={p}");
    }
}

#[test]
fn a1_low_classes_match_cobar() {
    let st = Steenrod::new(Profile::trivial(2));
    let win = ExtWindow::new(3, 0, 6);
    let c = ext_dims(&st, &trivial(st.profile, 1), 1, &win).unwrap();
    // frozen from the cobar oracle
    for k in [(0, 0, 0), (1, 1, 0), (1, 2, 1), (2, 2, 0), (2, 4, 2), (3, 3, 0), (3, 6, 3)] {
        assert_eq!(c.dim(k.0, k.1, k.2), 1, "{k:?}");
    }
    let o = cobar_ext(2, 1, 3, win.t_max());
    let oracle: BTreeMap<_, _> = o.entries.into_iter().filter(|&((s, t, _), _)| win.contains(s, t)).collect();
    assert_eq!(c.entries, oracle);
}

#[test]
fn minimal_in_trivial_profile() {
    // zero induced differential: Ext dimension equals the number of generators
    let st = Steenrod::new(Profile::trivial(2));
    let win = ExtWindow::new(3, 0, 6);
    let m = lens_module(st.profile, 2, 1, 5);
    let res = minimal_resolution(&st, &m, 2, win.s_max + 1, win.t_max()).unwrap();
    let c = chart_of(&st, &res.cx, &win, weight_range(&res.cx, &win));
    let mut gens: BTreeMap<(usize, i32, i32), usize> = BTreeMap::new();
    for (s, lv) in res.cx.levels.iter().enumerate() {
        for g in lv {
            if win.contains(s, g.t) {
                *gens.entry((s, g.t, g.u)).or_default() += 1;
            }
        }
    }
    assert_eq!(c.entries, gens);
    assert!(check_exact(&res, &win).is_ok());
}

#[test]
fn functoriality_and_second_lift() {
    for p in central() {
        let st = Steenrod::new(p);
        let f = Fp::new(p.prime);
        let win = ExtWindow::new(2, -4, 4);
        let tower = lens_tower(p, 1, 0, 2, 6);
        let res: Vec<_> = tower.levels.iter().map(|m| minimal_resolution(&st, m, 1, win.s_max + 1, win.t_max()).unwrap()).collect();
        let (a, b) = (&tower.maps[0], &tower.maps[1]);
        let ab: ModMap = a.compose(&p, b);
        let phi_a = lift(&res[0], &res[1], a).unwrap();
        let phi_b = lift(&res[1], &res[2], b).unwrap();
        let phi_ab = lift(&res[0], &res[2], &ab).unwrap();
        let ur = res.iter().map(|r| weight_range(&r.cx, &win)).fold((i32::MAX, i32::MIN), |x, y| (x.0.min(y.0), x.1.max(y.1)));
        let mut nontrivial = 0;
        for s in 0..=win.s_max {
            for ts in win.ts_min..=win.ts_max {
                let t = ts + s as i32;
                for u in ur.0..=ur.1 {
                    let h0 = hom_cohomology(f, &res[0].cx, s, t, u);
                    let h2 = hom_cohomology(f, &res[2].cx, s, t, u);
                    let (_, _, ca) = hom_map(f, &res[0].cx, &res[1].cx, &phi_a, s, t, u);
                    let (_, _, cb) = hom_map(f, &res[1].cx, &res[2].cx, &phi_b, s, t, u);
                    let (_, _, cab) = hom_map(f, &res[0].cx, &res[2].cx, &phi_ab, s, t, u);
                    let apply = |cols: &Vec<Vec<u32>>, z: &[u32], n: usize| {
                        let mut out = vec![0u32; n];
                        for (i, &c) in z.iter().enumerate() {
                            for (j, &x) in cols[i].iter().enumerate() {
                                out[j] = f.add(out[j], f.mul(c, x));
                            }
                        }
                        out
                    };
                    let n0 = h0.basis.len();
                    let n1 = ca.len();
                    for z in &h2.cocycles {
                        let direct = apply(&cab, z, n0);
                        let two_step = apply(&ca, &apply(&cb, z, n1), n0);
                        let diff: Vec<u32> = direct.iter().zip(&two_step).map(|(&x, &y)| f.sub(x, y)).collect();
                        assert!(h0.coboundaries.contains(&diff), "{p} ({s},{t},{u})");
                        if !h0.coboundaries.contains(&direct) {
                            nontrivial += 1;
                        }
                    }
                }
            }
        }
        assert!(nontrivial > 0, "{p}: composite acts trivially on Ext");
    }
}

#[test]
fn identity_zero_and_residue_verdicts() {
    let win = ExtWindow::new(2, 0, 3);
    for p in central() {
        let st = Steenrod::new(p);
        let h = trivial(p, 2);
        let (id, _) = induced_ext_map(&st, &h, &h, &ModMap::identity(&h), 2, &win).unwrap();
        assert_eq!(id.verdict(), Verdict::Iso);
        let (z, _) = induced_ext_map(&st, &h, &h, &ModMap::zero(&h), 2, &win).unwrap();
        // complex charts start at weight -1, where tau lives
        assert!(matches!(z.verdict(), Verdict::Fail(0, 0, _, _)), "{p}");
        assert_eq!(z.entries[&(0, 0, 0)], (1, 1, 0));
        // the residue is onto in degree zero even for a short band
        let b = susp(&bmu_band(p, 2, -6, 4), 1, 0);
        let (r, _) = induced_ext_map(&st, &b, &h, &residue_map(&b), 2, &win).unwrap();
        assert_eq!(r.entries[&(0, 0, 0)], (1, 1, 1));
    }
}

#[test]
fn narrow_band_is_inconclusive() {
    let mut cfg = LinConfig::new(ExtWindow::new(2, 0, 3));
    cfg.k_max = 4;
    let r = lin_check(Profile::trivial(2), &cfg).unwrap();
    assert!(matches!(r.verdict, Verdict::Inconclusive(_)));
    assert_eq!(r.axis, Some("band"));
    assert!(lin_check(Profile::real(), &cfg).is_err());
}

#[test]
fn total_complex_of_constant_tower() {
    let st = Steenrod::new(Profile::complex());
    let win = ExtWindow::new(2, -2, 4);
    let l = lens_module(st.profile, 1, 1, 4);
    let tower = msing::amod::Tower { levels: vec![l.clone(), l.clone()], maps: vec![ModMap::identity(&l)] };
    let tc = total_complex_e2(&st, &tower, 1, &win).unwrap();
    let direct = ext_dims(&st, &l, 1, &win).unwrap();
    assert_eq!(tc.entries, direct.entries);
    let zero = msing::amod::Tower { levels: vec![l.clone(), l.clone()], maps: vec![ModMap::zero(&l)] };
    assert_eq!(total_complex_e2(&st, &zero, 1, &win).unwrap().entries, direct.entries);
}
