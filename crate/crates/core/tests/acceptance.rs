use msing::amod::{lens_tower, tower_colim, trivial};
use msing::cobar::cobar_ext;
use msing::coeff::Profile;
use msing::dualalg::Tag;
use msing::ext::{ext_dims, lin_check, total_complex_e2, ExtWindow, LinConfig, Verdict};
use msing::ops::Steenrod;
use msing::verify::*;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

fn all() -> [Profile; 4] {
    [Profile::trivial(2), Profile::trivial(3), Profile::complex(), Profile::real()]
}

fn central() -> [Profile; 3] {
    [Profile::trivial(2), Profile::trivial(3), Profile::complex()]
}

/// Fold reports into (ok, detail).
fn reports(rs: impl IntoIterator<Item = Report>) -> (bool, String) {
    let mut cases = 0;
    let mut bad = Vec::new();
    for r in rs {
        cases += r.cases;
        if let Some(f) = r.failures.first() {
            bad.push(format!("{}: {f}", r.name));
        }
    }
    if bad.is_empty() {
        (true, format!("{cases} cases"))
    } else {
        (false, bad.join("; "))
    }
}

fn crit1() -> (bool, String) {
    reports(all().into_iter().flat_map(|p| [hopf_axioms(p, Tag::Full, 16), algebra_maps(p, Tag::Full, 16)]))
}

fn crit2() -> (bool, String) {
    reports(all().into_iter().flat_map(|p| {
        let mut v = vec![
            right_basis_roundtrip(p, Tag::Full, 0, 16),
            right_basis_roundtrip(p, Tag::An(2), 0, 16),
            right_basis_roundtrip(p, Tag::Cn(2), -16, 16),
            right_basis_roundtrip(p, Tag::Bn(2), -16, 16),
        ];
        v.extend((0..=2).map(|n| comodule_isos(p, n, 16, -16)));
        v
    }))
}

fn crit3() -> (bool, String) {
    let mut v = vec![milnor_identities(Profile::real(), 3), milnor_identities(Profile::trivial(3), 3)];
    for p in [Profile::trivial(2), Profile::complex(), Profile::real()] {
        v.push(adem_relations(p, 20));
    }
    reports(v)
}

fn crit4() -> (bool, String) {
    reports(central().into_iter().flat_map(|p| {
        let r = if p.prime == 2 { 8 } else { 2 };
        [singer_n_independence(p, -r..=r, 2), singer_eval_linearity(p), singer_isomorphism(p, 8)]
    }))
}

fn crit5() -> (bool, String) {
    let win = ExtWindow::new(4, 0, 12);
    let mut n_entries = 0;
    for p in [2, 3] {
        let st = Steenrod::new(Profile::trivial(p));
        for n in 0..=1 {
            let ours: BTreeMap<_, _> = match ext_dims(&st, &trivial(st.profile, n), n, &win) {
                Ok(c) => c.entries.into_iter().filter(|k| k.0 .1 <= 12).collect(),
                Err(e) => return (false, e.to_string()),
            };
            let c = cobar_ext(p, n as usize, 4, 12);
            if !c.d_squared_zero {
                return (false, format!("cobar d^2 != 0, l={p} n={n}"));
            }
            if ours != c.entries {
                return (false, format!("l={p} A({n}): resolution {ours:?} vs cobar {:?}", c.entries));
            }
            n_entries += ours.len();
        }
    }
    (true, format!("{n_entries} nonzero tridegrees agree"))
}

fn crit6() -> (bool, String) {
    let win = ExtWindow::new(3, -4, 6);
    let mut n_entries = 0;
    for p in central() {
        let st = Steenrod::new(p);
        let env = 2;
        let tower = lens_tower(p, env, 0, 4, 8);
        let tc = total_complex_e2(&st, &tower, env, &win);
        let direct = tower_colim(&tower).and_then(|c| ext_dims(&st, &c, env, &win));
        match (tc, direct) {
            (Ok(a), Ok(b)) if a.entries == b.entries => n_entries += a.entries.len(),
            (Ok(a), Ok(b)) => return (false, format!("{p}: total complex {:?} vs colimit {:?}", a.entries, b.entries)),
            (Err(e), _) | (_, Err(e)) => return (false, format!("{p}: {e}")),
        }
    }
    (true, format!("{n_entries} nonzero tridegrees agree"))
}

fn crit7() -> (bool, String) {
    let mut ok = true;
    let mut out = Vec::new();
    for p in central() {
        let mut cfg = LinConfig::new(ExtWindow::new(3, 0, 6));
        cfg.k_max = 40;
        match lin_check(p, &cfg) {
            Ok(r) => {
                let within = matches!(r.witness, Some((n, k)) if n <= 3 && k <= 12);
                ok &= r.verdict == Verdict::Iso && within;
                out.push(match (&r.verdict, r.witness) {
                    (Verdict::Iso, Some((n, k))) => format!("{p} ISO witness n={n} K={k}{}", if within { "" } else { " (K exceeds 12)" }),
                    (v, w) => format!("{p} {v:?} witness {w:?}"),
                });
            }
            Err(e) => {
                ok = false;
                out.push(format!("{p}: {e}"));
            }
        }
    }
    (ok, out.join("; "))
}

fn crit8() -> (bool, String) {
    let win = ExtWindow::new(3, -1, 6);
    let mut checked = 0;
    for p in central() {
        let st = Steenrod::new(p);
        let c = match ext_dims(&st, &trivial(p, 3), 3, &win) {
            Ok(c) => c,
            Err(e) => return (false, e.to_string()),
        };
        for s in 0..=3usize {
            let t = s as i32 - 1;
            checked += 1;
            if c.dim(s, t, 0) != 0 {
                return (false, format!("{p}: Ext^({s},{t},0) = {}", c.dim(s, t, 0)));
            }
        }
    }
    (true, format!("{checked} tridegrees vanish"))
}

fn main() {
    let crits: [(&str, fn() -> (bool, String), Option<Duration>); 8] = [
        ("hopf algebroid axioms, degree <= 16", crit1, Some(Duration::from_secs(120))),
        ("left/right bases and comodule isomorphisms", crit2, None),
        ("Milnor and Adem identities", crit3, None),
        ("Singer constructions", crit4, None),
        ("Ext against the cobar complex", crit5, Some(Duration::from_secs(300))),
        ("total complex against the colimit", crit6, None),
        ("residue Ext-equivalence", crit7, Some(Duration::from_secs(900))),
        ("weight-zero vanishing", crit8, None),
    ];
    let mut passed = 0;
    for (i, (name, f, limit)) in crits.iter().enumerate() {
        let t0 = Instant::now();
        let (ok, detail) = f();
        let dt = t0.elapsed();
        let in_time = limit.map_or(true, |l| dt <= l);
        let ok = ok && in_time;
        passed += ok as usize;
        let time = if in_time { String::new() } else { " over time limit".to_string() };
        println!("{} {} {name}: {detail} [{:.1}s{time}]", if ok { "PASS" } else { "FAIL" }, i + 1, dt.as_secs_f64());
    }
    println!("{passed}/8 criteria pass");
}
