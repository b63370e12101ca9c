//! Named verification suites, module constructors and Ext strategies.

use crate::amod::{bmu_band, bsigma_band, check_relations, free_module, lens_module, parse_tower, susp, trivial, FPModule};
use crate::cobar::cobar_ext;
use crate::coeff::{Kind, Profile};
use crate::dualalg::Tag;
use crate::ext::{check_exact, ext_dims, minimal_resolution, total_complex_e2, ExtChart, ExtWindow};
use crate::ops::Steenrod;
use crate::verify::*;
use crate::Error;
use std::collections::{BTreeMap, HashMap};

pub trait Suite {
    fn name(&self) -> &'static str;
    fn supports(&self, _profile: &Profile) -> bool {
        true
    }
    fn run(&self, profile: Profile, max_deg: i32) -> Vec<Report>;
}

pub trait ModuleCtor {
    fn name(&self) -> &'static str;
    fn build(&self, reg: &Registry, st: &Steenrod, n: i32, args: &str) -> Result<FPModule, Error>;
}

pub trait ExtStrategy {
    fn name(&self) -> &'static str;
    fn chart(&self, reg: &Registry, st: &Steenrod, desc: &str, n: i32, win: &ExtWindow) -> Result<ExtChart, Error>;
}

struct FnSuite {
    name: &'static str,
    central: bool,
    two: bool,
    run: fn(Profile, i32) -> Vec<Report>,
}

impl Suite for FnSuite {
    fn name(&self) -> &'static str {
        self.name
    }
    fn supports(&self, profile: &Profile) -> bool {
        (!self.central || profile.kind != Kind::Real) && (!self.two || profile.prime == 2)
    }
    fn run(&self, profile: Profile, max_deg: i32) -> Vec<Report> {
        (self.run)(profile, max_deg)
    }
}

struct FnCtor {
    name: &'static str,
    build: fn(&Registry, &Steenrod, i32, &str) -> Result<FPModule, Error>,
}

impl ModuleCtor for FnCtor {
    fn name(&self) -> &'static str {
        self.name
    }
    fn build(&self, reg: &Registry, st: &Steenrod, n: i32, args: &str) -> Result<FPModule, Error> {
        (self.build)(reg, st, n, args)
    }
}

struct MinimalResolution;
struct CobarOracle;
struct TotalComplex;

impl ExtStrategy for MinimalResolution {
    fn name(&self) -> &'static str {
        "minimal-resolution"
    }
    fn chart(&self, reg: &Registry, st: &Steenrod, desc: &str, n: i32, win: &ExtWindow) -> Result<ExtChart, Error> {
        let m = reg.module(st, n, desc)?;
        ext_dims(st, &m, n, win)
    }
}

impl ExtStrategy for CobarOracle {
    fn name(&self) -> &'static str {
        "cobar"
    }
    fn chart(&self, _reg: &Registry, st: &Steenrod, desc: &str, n: i32, win: &ExtWindow) -> Result<ExtChart, Error> {
        if st.profile.kind != Kind::Trivial || desc != "trivial" || n < 0 {
            return Err(Error::Unsupported("the cobar oracle handles the trivial module in the trivial profile only".into()));
        }
        let c = cobar_ext(st.p, n as usize, win.s_max, win.t_max());
        let entries: BTreeMap<_, _> = c.entries.into_iter().filter(|&((s, t, _), _)| win.contains(s, t)).collect();
        let lo = entries.keys().map(|k| k.2).min().unwrap_or(0);
        let hi = entries.keys().map(|k| k.2).max().unwrap_or(0);
        Ok(ExtChart { prime: st.p, profile: st.profile.kind.name().to_string(), envelope: n, window: *win, u_range: (lo, hi), entries })
    }
}

impl ExtStrategy for TotalComplex {
    fn name(&self) -> &'static str {
        "total-complex"
    }
    fn chart(&self, _reg: &Registry, st: &Steenrod, desc: &str, n: i32, win: &ExtWindow) -> Result<ExtChart, Error> {
        let tower = parse_tower(st.profile, n, desc)?;
        total_complex_e2(st, &tower, n, win)
    }
}

fn bad(desc: &str) -> Error {
    Error::Parse(format!("bad module descriptor '{desc}'"))
}

fn range(s: &str) -> Result<(i32, i32), Error> {
    let (a, b) = s.split_once("..").ok_or_else(|| bad(s))?;
    Ok((a.trim().parse().map_err(|_| bad(s))?, b.trim().parse().map_err(|_| bad(s))?))
}

fn key_values(s: &str) -> Result<HashMap<String, i32>, Error> {
    s.split(',')
        .map(|p| {
            let (k, v) = p.split_once('=').ok_or_else(|| bad(s))?;
            Ok((k.trim().to_string(), v.trim().parse().map_err(|_| bad(s))?))
        })
        .collect()
}

fn no_args(name: &str, args: &str) -> Result<(), Error> {
    if args.is_empty() {
        Ok(())
    } else {
        Err(bad(&format!("{name}:{args}")))
    }
}

fn singer_reports(prof: Profile, _d: i32) -> Vec<Report> {
    vec![singer_n_independence(prof, -4..=4, 2), singer_eval_linearity(prof), singer_isomorphism(prof, 8)]
}

fn module_reports(prof: Profile, d: i32) -> Vec<Report> {
    let st = Steenrod::new(prof);
    let mut rep = Report::new("module-relations");
    for m in [lens_module(prof, 2, 2, 6), bmu_band(prof, 2, -6, 6), bsigma_band(prof, 2, -6, 6), free_module(&st, 1)] {
        let r = check_relations(&st, &m, d);
        rep.check(r.is_ok(), || format!("{}: {}", m.name, r.clone().unwrap_err()));
    }
    vec![rep]
}

fn ext_reports(prof: Profile, _d: i32) -> Vec<Report> {
    let st = Steenrod::new(prof);
    let win = ExtWindow::new(4, 0, 8);
    let mut rep = Report::new("ext");
    for (m, n) in [(trivial(prof, 1), 1), (lens_module(prof, 2, 2, 6), 2)] {
        match minimal_resolution(&st, &m, n, win.s_max + 1, win.t_max()) {
            Ok(res) => {
                let r = check_exact(&res, &win);
                rep.check(r.is_ok(), || format!("{} over A({n}): {}", m.name, r.clone().unwrap_err()));
            }
            Err(e) => rep.check(false, || e.to_string()),
        }
    }
    if prof.kind == Kind::Trivial {
        for n in 0..=1 {
            let ours = ext_dims(&st, &trivial(prof, n), n, &win).map(|c| c.entries);
            let c = cobar_ext(prof.prime, n as usize, win.s_max, win.t_max());
            let oracle: BTreeMap<_, _> = c.entries.into_iter().filter(|&((s, t, _), _)| win.contains(s, t)).collect();
            rep.check(c.d_squared_zero, || format!("cobar d^2 != 0 over A({n})"));
            rep.check(ours.as_ref().ok() == Some(&oracle), || format!("A({n}): resolution and cobar charts differ"));
        }
    }
    vec![rep]
}

pub struct Registry {
    suites: Vec<Box<dyn Suite>>,
    modules: Vec<Box<dyn ModuleCtor>>,
    strategies: Vec<Box<dyn ExtStrategy>>,
}

impl Default for Registry {
    fn default() -> Registry {
        Registry::standard()
    }
}

impl Registry {
    pub fn standard() -> Registry {
        let suite = |name, central, two, run| Box::new(FnSuite { name, central, two, run }) as Box<dyn Suite>;
        let suites = vec![
            suite("hopf", false, false, |p, d| vec![hopf_axioms(p, Tag::Full, d), algebra_maps(p, Tag::Full, d)]),
            suite("basis", false, false, |p, d| {
                let mut v = vec![
                    right_basis_roundtrip(p, Tag::Full, 0, d),
                    right_basis_roundtrip(p, Tag::An(2), 0, d),
                    right_basis_roundtrip(p, Tag::Cn(2), -d, d),
                    right_basis_roundtrip(p, Tag::Bn(2), -d, d),
                ];
                for n in 0..=2 {
                    v.push(comodule_isos(p, n, d, -d));
                    v.push(coactions_commute(p, n, d));
                    v.push(xi_power_sequence(p, n, d));
                }
                v
            }),
            suite("milnor", false, false, |p, _| {
                let n = if p.prime == 2 { 3 } else { 2 };
                vec![
                    milnor_associativity(p, 1),
                    milnor_identities(p, n),
                    generation(p, 2),
                    bimodule_axioms(p, 1, -8, 8),
                    free_over_subalgebra(p, 1, 2),
                    bidegree_cone(p, 1, 2),
                ]
            }),
            suite("adem", false, true, |p, d| vec![adem_relations(p, d as i64)]),
            suite("singer", true, false, singer_reports),
            suite("modules", false, false, module_reports),
            suite("ext", true, false, ext_reports),
        ];
        let ctor = |name, build| Box::new(FnCtor { name, build }) as Box<dyn ModuleCtor>;
        let modules = vec![
            ctor("trivial", |_, st, n, a| no_args("trivial", a).map(|_| trivial(st.profile, n))),
            ctor("free", |_, st, n, a| no_args("free", a).map(|_| free_module(st, n))),
            ctor("lens", |_, st, n, a| {
                let kv = key_values(a)?;
                let get = |k: &str| kv.get(k).copied().ok_or_else(|| bad(a));
                Ok(lens_module(st.profile, n, get("m")?, get("n")?))
            }),
            ctor("bmu", |_, st, n, a| range(a).map(|(x, y)| bmu_band(st.profile, n, x, y))),
            ctor("bsigma", |_, st, n, a| range(a).map(|(x, y)| bsigma_band(st.profile, n, x, y))),
            ctor("susp", |reg, st, n, a| {
                let (pq, inner) = a.split_once(':').ok_or_else(|| bad(a))?;
                let (x, y) = pq.split_once(',').ok_or_else(|| bad(a))?;
                let x: i32 = x.trim().parse().map_err(|_| bad(a))?;
                let y: i32 = y.trim().parse().map_err(|_| bad(a))?;
                Ok(susp(&reg.module(st, n, inner)?, x, y))
            }),
        ];
        let strategies: Vec<Box<dyn ExtStrategy>> = vec![Box::new(MinimalResolution), Box::new(CobarOracle), Box::new(TotalComplex)];
        Registry { suites, modules, strategies }
    }

    pub fn suites(&self) -> impl Iterator<Item = &dyn Suite> {
        self.suites.iter().map(|s| s.as_ref())
    }

    pub fn suite(&self, name: &str) -> Option<&dyn Suite> {
        self.suites().find(|s| s.name() == name)
    }

    pub fn module_names(&self) -> Vec<&'static str> {
        self.modules.iter().map(|m| m.name()).collect()
    }

    /// Build a module from a descriptor such as `lens:m=2,n=6` or `susp:1,0:bmu:-4..4`.
    pub fn module(&self, st: &Steenrod, n: i32, desc: &str) -> Result<FPModule, Error> {
        let (head, args) = desc.split_once(':').unwrap_or((desc, ""));
        let c = self.modules.iter().find(|m| m.name() == head).ok_or_else(|| bad(desc))?;
        c.build(self, st, n, args)
    }

    pub fn strategy(&self, name: &str) -> Option<&dyn ExtStrategy> {
        self.strategies.iter().map(|s| s.as_ref()).find(|s| s.name() == name)
    }

    pub fn strategy_names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors() {
        let reg = Registry::standard();
        let st = Steenrod::new(Profile::trivial(2));
        let m = reg.module(&st, 2, "susp:1,0:bmu:-2..2").unwrap();
        assert_eq!(m.dim(), 10);
        assert_eq!(m.gens[0].name, "Sv^-2");
        assert_eq!(reg.module(&st, 2, "lens:m=2,n=6").unwrap().dim(), 12);
        for b in ["bogus", "lens:m=2", "bmu:1", "trivial:3", "susp:1:trivial"] {
            assert!(reg.module(&st, 2, b).is_err(), "{b}");
        }
    }

    #[test]
    fn strategies_agree() {
        let reg = Registry::standard();
        let st = Steenrod::new(Profile::trivial(2));
        let win = ExtWindow::new(3, 0, 6);
        let a = reg.strategy("minimal-resolution").unwrap().chart(&reg, &st, "trivial", 1, &win).unwrap();
        let b = reg.strategy("cobar").unwrap().chart(&reg, &st, "trivial", 1, &win).unwrap();
        assert!(a.same_dims(&b));
        assert!(reg.strategy("cobar").unwrap().chart(&reg, &st, "lens:m=1,n=3", 1, &win).is_err());
        let tc = reg.strategy("total-complex").unwrap().chart(&reg, &st, "tower:lens:m0=0,m1=2,n=4", 1, &win).unwrap();
        let colim = reg.strategy("minimal-resolution").unwrap().chart(&reg, &st, "lens:m=2,n=4", 1, &win).unwrap();
        assert_eq!(tc.entries, colim.entries);
        assert!(reg.suite("singer").unwrap().supports(&Profile::trivial(3)));
        assert!(!reg.suite("singer").unwrap().supports(&Profile::real()));
        assert!(!reg.suite("adem").unwrap().supports(&Profile::trivial(3)));
    }
}
