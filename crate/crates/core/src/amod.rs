//! Bigraded left A(n)-modules that are free over H on a finite set of generators,
//! given by action tables for beta, P^1, P^l, ..., P^{l^{n-1}}; all other symbols act
//! through word decompositions.

use crate::coeff::{HElement, HMono, Profile};
use crate::dualalg::{basis, lin_add, Mono, Tag};
use crate::fp::binom;
use crate::ops::{gen_ops, symbol_name, MilnorElement, Steenrod};
use crate::Error;
use serde_json::{json, Value};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

/// Sum of c * h * g_i, keyed by (generator index, h).
pub type MVec = BTreeMap<(usize, HMono), u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gen {
    pub name: String,
    pub p: i32,
    pub q: i32,
    /// (i, k) for u^i v^k or c^i d^k in band modules
    pub label: Option<(u8, i32)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandKind {
    Bmu,
    Bsigma,
}

#[derive(Clone)]
pub struct FPModule {
    pub profile: Profile,
    pub n: i32,
    pub name: String,
    pub gens: Vec<Gen>,
    pub shift: (i32, i32),
    /// table[op][gen], op indexed as in `gen_ops`
    pub table: Vec<Vec<MVec>>,
    /// entries whose formula left the band
    pub overflow: Vec<Vec<bool>>,
    pub pinned: bool,
    pub band: Option<BandKind>,
    cache: RefCell<HashMap<(Mono, usize), Rc<MVec>>>,
}

pub fn mvec_add(p: u32, x: &mut MVec, y: &MVec, c: u32) {
    let f = crate::fp::Fp::new(p);
    for (k, &v) in y {
        lin_add(f, x, *k, f.mul(v, c));
    }
}

pub fn mvec_scale(profile: &Profile, x: &MVec, h: HMono, c: u32) -> MVec {
    let f = profile.fp();
    let mut out = MVec::new();
    for (&(g, k), &v) in x {
        let hk = h.mul(k);
        if profile.allows(hk) {
            lin_add(f, &mut out, (g, hk), f.mul(v, c));
        }
    }
    out
}

pub fn mvec_gen(g: usize) -> MVec {
    [((g, HMono::ONE), 1)].into_iter().collect()
}

impl FPModule {
    pub fn new(profile: Profile, n: i32, name: &str, gens: Vec<Gen>) -> FPModule {
        let nops = gen_ops(profile.prime, n).len();
        let ng = gens.len();
        FPModule {
            profile,
            n,
            name: name.to_string(),
            gens,
            shift: (0, 0),
            table: vec![vec![MVec::new(); ng]; nops],
            overflow: vec![vec![false; ng]; nops],
            pinned: false,
            band: None,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn find(&self, i: u8, k: i32) -> Option<usize> {
        self.gens.iter().position(|g| g.label == Some((i, k)))
    }

    pub fn find_name(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    /// Bidegree of h * g.
    pub fn bideg(&self, g: usize, h: HMono) -> (i32, i32) {
        let (a, b) = h.bideg();
        (self.gens[g].p + a, self.gens[g].q + b)
    }

    /// F_l-basis h * g of bidegree (t, u).
    pub fn basis_at(&self, t: i32, u: i32) -> Vec<(usize, HMono)> {
        let mut out = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            if let Some(h) = HMono::at(t - g.p, u - g.q) {
                if self.profile.allows(h) {
                    out.push((i, h));
                }
            }
        }
        out
    }

    pub fn bottom(&self) -> Option<i32> {
        self.gens.iter().map(|g| g.p).min()
    }

    fn check_tag(&self, tag: Tag) -> Result<(), Error> {
        match tag {
            Tag::An(m) if m <= self.n => Ok(()),
            _ => Err(Error::Unsupported(format!("operation in {tag} outside envelope A({})", self.n))),
        }
    }

    /// Action of a symbol of A(n) on an element.
    pub fn act_mono(&self, st: &Steenrod, a: Mono, x: &MVec) -> Result<MVec, Error> {
        let f = self.profile.fp();
        let mut out = MVec::new();
        for (&(g, h), &c) in x {
            let ah = st.symbol_times_h(a, h, Tag::An(self.n));
            for (&(z, k), &c2) in ah.iter() {
                let part = self.act_symbol(st, z, g)?;
                let scaled = mvec_scale(&self.profile, &part, k, f.mul(c, c2));
                mvec_add(self.profile.prime, &mut out, &scaled, 1);
            }
        }
        Ok(out)
    }

    /// Action of a symbol on a generator.
    pub fn act_symbol(&self, st: &Steenrod, a: Mono, g: usize) -> Result<Rc<MVec>, Error> {
        if let Some(v) = self.cache.borrow().get(&(a, g)) {
            return Ok(v.clone());
        }
        let p = self.profile.prime;
        let out = if a.is_one() {
            mvec_gen(g)
        } else if let Some(i) = gen_ops(p, self.n).iter().position(|&o| o == a) {
            if self.pinned && self.overflow[i][g] {
                return Err(Error::OutOfBand(format!("{} on {} leaves pinned band", symbol_name(p, &a), self.gens[g].name)));
            }
            self.table[i][g].clone()
        } else {
            let word = st.word(a, self.n);
            let mut acc = MVec::new();
            for w in word.iter() {
                let inner = self.act_symbol(st, w.rest, g)?;
                let v = match w.op {
                    Some(i) => self.act_mono(st, gen_ops(p, self.n)[i], &inner)?,
                    None => (*inner).clone(),
                };
                mvec_add(p, &mut acc, &mvec_scale(&self.profile, &v, w.h, w.c), 1);
            }
            acc
        };
        let rc = Rc::new(out);
        self.cache.borrow_mut().insert((a, g), rc.clone());
        Ok(rc)
    }

    pub fn act(&self, st: &Steenrod, op: &MilnorElement, x: &MVec) -> Result<MVec, Error> {
        self.check_tag(op.tag)?;
        let mut out = MVec::new();
        for (&(a, h), &c) in &op.terms {
            let v = self.act_mono(st, a, x)?;
            mvec_add(self.profile.prime, &mut out, &mvec_scale(&self.profile, &v, h, c), 1);
        }
        Ok(out)
    }

    pub fn fmt(&self, x: &MVec) -> String {
        fmt_terms(self.profile.prime, x, |g| self.gens[g].name.clone())
    }

    pub fn to_json(&self) -> Value {
        let p = self.profile.prime;
        let ops = gen_ops(p, self.n);
        let gens: Vec<Value> = self.gens.iter().map(|g| json!({"name": g.name, "bidegree": [g.p, g.q]})).collect();
        let mut actions = Vec::new();
        for (i, o) in ops.iter().enumerate() {
            for (j, g) in self.gens.iter().enumerate() {
                if !self.table[i][j].is_empty() {
                    actions.push(json!({"op": symbol_name(p, o), "gen": g.name, "value": self.fmt(&self.table[i][j])}));
                }
            }
        }
        json!({
            "name": self.name,
            "prime": p,
            "profile": self.profile.kind.name(),
            "envelope": self.n,
            "shift": [self.shift.0, self.shift.1],
            "generators": gens,
            "actions": actions,
        })
    }
}

pub fn fmt_terms(p: u32, x: &MVec, name: impl Fn(usize) -> String) -> String {
    if x.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (&(g, h), &c) in x {
        let (neg, mag) = if p > 2 && c * 2 > p { (true, p - c) } else { (false, c) };
        let mut factors = Vec::new();
        if mag != 1 {
            factors.push(mag.to_string());
        }
        if !h.is_one() {
            factors.push(h.to_string());
        }
        factors.push(name(g));
        parts.push(format!("{}{}", if neg { "-" } else { "" }, factors.join("*")));
    }
    parts.join(" + ").replace("+ -", "- ")
}

/// The trivial module H.
pub fn trivial(profile: Profile, n: i32) -> FPModule {
    FPModule::new(profile, n, "trivial", vec![Gen { name: "1".into(), p: 0, q: 0, label: None }])
}

/// A(n) as a free module on one generator.
pub fn free_module(st: &Steenrod, n: i32) -> FPModule {
    let p = st.p;
    let tag = Tag::An(n);
    let top = crate::verify::basis_max_deg(p, tag);
    let syms: Vec<Mono> = (0..=top).flat_map(|d| basis(p, tag, d)).collect();
    let idx: HashMap<Mono, usize> = syms.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let gens = syms.iter().map(|m| Gen { name: format!("[{}]", symbol_name(p, m)), p: m.deg, q: m.wt, label: None }).collect();
    let mut md = FPModule::new(st.profile, n, &format!("A({n})"), gens);
    for (i, o) in gen_ops(p, n).iter().enumerate() {
        for (j, m) in syms.iter().enumerate() {
            for (&(z, h), &c) in st.mul_symbols(*o, *m, n).iter() {
                if st.profile.allows(h) {
                    md.table[i][j].insert((idx[&z], h), c);
                }
            }
        }
    }
    md
}

fn bmu_rule(p: u32, e: u8, r: i64, i: u8, k: i64) -> Option<(u8, i64, u32)> {
    let l = p as i64;
    let c = binom(k, r, p);
    match (i, e) {
        (1, 0) => Some((1, (l - 1) * r + k, c)),
        (1, 1) => Some((0, (l - 1) * r + 1 + k, c)),
        (0, 0) => Some((0, (l - 1) * r + k, c)),
        _ => None,
    }
}

fn bsigma_rule(p: u32, e: u8, r: i64, i: u8, k: i64) -> Option<(u8, i64, u32)> {
    let l = p as i64;
    let f = crate::fp::Fp::new(p);
    let s = f.sign(r);
    match (i, e) {
        (1, 0) => Some((1, r + k, f.mul(s, binom((l - 1) * (k + 1) - 1, r, p)))),
        (1, 1) => Some((0, r + 1 + k, f.mul(s, binom((l - 1) * (k + 1) - 1, r, p)))),
        (0, 0) => Some((0, r + k, f.mul(s, binom((l - 1) * k, r, p)))),
        _ => None,
    }
}

/// beta^e P^r on u^i v^k (or c^i d^k) as (i', k', coefficient).
pub fn band_rule(kind: BandKind, p: u32, e: u8, r: i64, i: u8, k: i64) -> Option<(u8, i64, u32)> {
    match kind {
        BandKind::Bmu => bmu_rule(p, e, r, i, k),
        BandKind::Bsigma => bsigma_rule(p, e, r, i, k),
    }
}

pub fn band_bideg(kind: BandKind, p: u32, i: u8, k: i32) -> (i32, i32) {
    let l = p as i32;
    let i = i as i32;
    match kind {
        BandKind::Bmu => (i + 2 * k, i + k),
        BandKind::Bsigma => (i * (2 * l - 3) + k * (2 * l - 2), (i + k) * (l - 1)),
    }
}

pub fn band_name(kind: BandKind, i: u8, k: i32) -> String {
    let (x, y) = match kind {
        BandKind::Bmu => ("u", "v"),
        BandKind::Bsigma => ("c", "d"),
    };
    let pre = if i == 1 { x } else { "" };
    match (i, k) {
        (0, 0) => "1".into(),
        (_, 0) => pre.into(),
        (_, 1) => format!("{pre}{y}"),
        _ => format!("{pre}{y}^{k}"),
    }
}

/// H-basis {x^i y^k : k in [kmin, kmax]} of H(Bmu)_loc or H(BS)_loc, truncated.
pub fn band(profile: Profile, n: i32, kind: BandKind, kmin: i32, kmax: i32) -> FPModule {
    let p = profile.prime;
    let mut gens = Vec::new();
    for k in kmin..=kmax {
        for i in 0..2u8 {
            let (bp, bq) = band_bideg(kind, p, i, k);
            gens.push(Gen { name: band_name(kind, i, k), p: bp, q: bq, label: Some((i, k)) });
        }
    }
    let name = match kind {
        BandKind::Bmu => format!("bmu:{kmin}..{kmax}"),
        BandKind::Bsigma => format!("bsigma:{kmin}..{kmax}"),
    };
    let mut md = FPModule::new(profile, n, &name, gens);
    md.band = Some(kind);
    let ops: Vec<(u8, i64)> = std::iter::once((1u8, 0i64)).chain((0..n.max(0)).map(|j| (0u8, (p as i64).pow(j as u32)))).collect();
    for (oi, &(e, r)) in ops.iter().enumerate() {
        for (gi, g) in md.gens.clone().iter().enumerate() {
            let (i, k) = g.label.unwrap();
            if let Some((i2, k2, c)) = band_rule(kind, p, e, r, i, k as i64) {
                if c == 0 {
                    continue;
                }
                match md.find(i2, k2 as i32) {
                    Some(t) => {
                        md.table[oi][gi].insert((t, HMono::ONE), c);
                    }
                    None => md.overflow[oi][gi] = true,
                }
            }
        }
    }
    md
}

pub fn bmu_band(profile: Profile, n: i32, kmin: i32, kmax: i32) -> FPModule {
    band(profile, n, BandKind::Bmu, kmin, kmax)
}

pub fn bsigma_band(profile: Profile, n: i32, kmin: i32, kmax: i32) -> FPModule {
    band(profile, n, BandKind::Bsigma, kmin, kmax)
}

/// H(L^{2n-1}) with Thom twist U_{-m}, labelled by absolute exponents -m <= k < n - m.
pub fn lens_module(profile: Profile, env: i32, m: i32, n: i32) -> FPModule {
    let mut md = bmu_band(profile, env, -m, n - m - 1);
    md.name = format!("lens:m={m},n={n}");
    md
}

/// Sigma^{a,b} M; odd-degree operations pick up the sign (-1)^a.
pub fn susp(md: &FPModule, a: i32, b: i32) -> FPModule {
    let p = md.profile.prime;
    let f = md.profile.fp();
    let mut out = md.clone();
    out.cache = RefCell::new(HashMap::new());
    out.shift = (md.shift.0 + a, md.shift.1 + b);
    out.name = if (a, b) == (1, 0) { format!("S{}", md.name) } else { format!("S^({a},{b}){}", md.name) };
    for g in out.gens.iter_mut() {
        g.p += a;
        g.q += b;
        if (a, b) == (1, 0) && !g.name.starts_with('S') {
            g.name = format!("S{}", g.name);
        }
    }
    for (i, o) in gen_ops(p, md.n).iter().enumerate() {
        if (o.deg as i64 * a as i64) % 2 != 0 {
            for v in out.table[i].iter_mut() {
                for c in v.values_mut() {
                    *c = f.neg(*c);
                }
            }
        }
    }
    out
}

pub fn direct_sum(a: &FPModule, b: &FPModule) -> FPModule {
    let off = a.gens.len();
    let mut gens = a.gens.clone();
    gens.extend(b.gens.iter().cloned());
    let mut md = FPModule::new(a.profile, a.n, &format!("{}+{}", a.name, b.name), gens);
    for i in 0..md.table.len() {
        for j in 0..off {
            md.table[i][j] = a.table[i][j].clone();
            md.overflow[i][j] = a.overflow[i][j];
        }
        for j in 0..b.gens.len() {
            md.table[i][off + j] = b.table[i][j].iter().map(|(&(g, h), &c)| ((g + off, h), c)).collect();
            md.overflow[i][off + j] = b.overflow[i][j];
        }
    }
    md
}

/// Restrict the envelope to A(m), m <= n.
pub fn restrict(md: &FPModule, m: i32) -> FPModule {
    let mut out = FPModule::new(md.profile, m, &md.name, md.gens.clone());
    let k = out.table.len();
    out.table = md.table[..k].to_vec();
    out.overflow = md.overflow[..k].to_vec();
    out.shift = md.shift;
    out.pinned = md.pinned;
    out.band = md.band;
    out
}

/// Module homomorphism given by images of generators.
#[derive(Clone, Debug)]
pub struct ModMap {
    pub images: Vec<MVec>,
}

impl ModMap {
    pub fn apply(&self, profile: &Profile, x: &MVec) -> MVec {
        let mut out = MVec::new();
        for (&(g, h), &c) in x {
            mvec_add(profile.prime, &mut out, &mvec_scale(profile, &self.images[g], h, c), 1);
        }
        out
    }

    pub fn zero(src: &FPModule) -> ModMap {
        ModMap { images: vec![MVec::new(); src.dim()] }
    }

    pub fn identity(src: &FPModule) -> ModMap {
        ModMap { images: (0..src.dim()).map(mvec_gen).collect() }
    }

    pub fn compose(&self, profile: &Profile, after: &ModMap) -> ModMap {
        ModMap { images: self.images.iter().map(|x| after.apply(profile, x)).collect() }
    }

    /// A(n)-linearity on all generators of the algebra and the source.
    pub fn check_linear(&self, st: &Steenrod, src: &FPModule, dst: &FPModule) -> Result<(), String> {
        for (g, gen) in src.gens.iter().enumerate() {
            let im = &self.images[g];
            for &(t, h) in im.keys() {
                if dst.bideg(t, h) != (gen.p, gen.q) {
                    return Err(format!("image of {} not homogeneous", gen.name));
                }
            }
            for o in gen_ops(st.p, src.n) {
                let lhs = self.apply(&src.profile, &src.act_mono(st, o, &mvec_gen(g)).map_err(|e| e.to_string())?);
                let rhs = dst.act_mono(st, o, im).map_err(|e| e.to_string())?;
                if lhs != rhs {
                    return Err(format!("{} on {}: {} vs {}", symbol_name(st.p, &o), gen.name, dst.fmt(&lhs), dst.fmt(&rhs)));
                }
            }
        }
        Ok(())
    }
}

/// Sequence of modules with maps level_m -> level_{m+1}.
#[derive(Clone)]
pub struct Tower {
    pub levels: Vec<FPModule>,
    pub maps: Vec<ModMap>,
}

/// Multiplication by v from lens(m, n) to lens(m + 1, n), preserving absolute labels.
pub fn jstar(src: &FPModule, dst: &FPModule) -> ModMap {
    ModMap {
        images: src
            .gens
            .iter()
            .map(|g| {
                let (i, k) = g.label.unwrap();
                dst.find(i, k).map(mvec_gen).unwrap_or_default()
            })
            .collect(),
    }
}

pub fn lens_tower(profile: Profile, env: i32, m0: i32, m1: i32, n: i32) -> Tower {
    let levels: Vec<FPModule> = (m0..=m1).map(|m| lens_module(profile, env, m, n)).collect();
    let maps = levels.windows(2).map(|w| jstar(&w[0], &w[1])).collect();
    Tower { levels, maps }
}

/// Colimit of a finite tower, which is its last level.
pub fn tower_colim(t: &Tower) -> Result<FPModule, Error> {
    t.levels.last().cloned().ok_or_else(|| Error::Unsupported("empty tower".into()))
}

/// Whether the last map of the tower is a bijection of basis elements with topological
/// degree in [pmin, pmax], so the colimit is reached inside the window.
pub fn tower_stable(t: &Tower, pmin: i32, pmax: i32) -> bool {
    let (Some(map), Some(prev), Some(last)) = (t.maps.last(), t.levels.len().checked_sub(2).map(|i| &t.levels[i]), t.levels.last()) else {
        return true;
    };
    let inw = |md: &FPModule, g: usize| (pmin..=pmax).contains(&md.gens[g].p);
    let mut hit = Vec::new();
    for g in (0..prev.dim()).filter(|&g| inw(prev, g)) {
        let im = &map.images[g];
        match im.iter().next() {
            Some((&(t, h), _)) if im.len() == 1 && h.is_one() => hit.push(t),
            _ => return false,
        }
    }
    hit.sort();
    hit == (0..last.dim()).filter(|&g| inw(last, g)).collect::<Vec<_>>()
}

fn h_of(profile: Profile, x: &MVec, g: usize) -> HElement {
    let terms: Vec<(HMono, u32)> = x.iter().filter(|((j, _), _)| *j == g).map(|(&(_, h), &c)| (h, c)).collect();
    HElement::from_terms(profile, &terms).expect("homogeneous")
}

/// Residue on a suspended band: the coefficient of the generator with label (1, -1).
pub fn residue(md: &FPModule, x: &MVec) -> Result<HElement, Error> {
    let g = md.find(1, -1).ok_or_else(|| Error::OutOfBand("band does not contain k = -1".into()))?;
    Ok(h_of(md.profile, x, g))
}

/// Residue as a module map into H.
pub fn residue_map(md: &FPModule) -> ModMap {
    ModMap { images: md.gens.iter().map(|g| if g.label == Some((1, -1)) { mvec_gen(0) } else { MVec::new() }).collect() }
}

/// Frobenius adjoint of an element of a suspended band, as a combination of dual basis
/// elements indexed by generators of `dual` (the unsuspended band).
pub fn frobenius_adjoint(md: &FPModule, dual: &FPModule, x: &MVec) -> Result<MVec, Error> {
    let mut out = MVec::new();
    let miss = || Error::OutOfBand("dual band too narrow".into());
    for (&(g, h), &c) in x {
        let (i, k) = md.gens[g].label.ok_or_else(|| Error::Unsupported("not a band".into()))?;
        let mut img = MVec::new();
        if i == 0 {
            img.insert((dual.find(1, -k - 1).ok_or_else(miss)?, HMono::ONE), 1);
        } else {
            let kk = k + 1;
            img.insert((dual.find(0, -kk).ok_or_else(miss)?, HMono::ONE), 1);
            if md.profile.allows(HMono::RHO) {
                img.insert((dual.find(1, -kk).ok_or_else(miss)?, HMono::RHO), 1);
            }
        }
        mvec_add(md.profile.prime, &mut out, &mvec_scale(&md.profile, &img, h, c), 1);
    }
    Ok(out)
}

/// Product in H(Bmu)_loc or H(BS)_loc of band generators, when l = 2 or the product has u-degree <= 1.
pub fn band_product(md: &FPModule, a: usize, b: usize) -> Option<MVec> {
    let (i, k) = md.gens[a].label?;
    let (j, m) = md.gens[b].label?;
    let mut out = MVec::new();
    if i + j <= 1 {
        out.insert((md.find(i + j, k + m)?, HMono::ONE), 1);
    } else {
        if md.profile.prime != 2 {
            return None;
        }
        // u^2 = tau v + rho u
        if md.profile.allows(HMono::TAU) {
            out.insert((md.find(0, k + m + 1)?, HMono::TAU), 1);
        }
        if md.profile.allows(HMono::RHO) {
            out.insert((md.find(1, k + m)?, HMono::RHO), 1);
        }
    }
    Some(out)
}

/// pi: Sigma bmu band -> Sigma bsigma band.
pub fn pi_projection(src: &FPModule, dst: &FPModule, x: &MVec) -> Result<MVec, Error> {
    let l = src.profile.prime as i32;
    let f = src.profile.fp();
    let mut out = MVec::new();
    for (&(g, h), &c) in x {
        let (i, k) = src.gens[g].label.ok_or_else(|| Error::Unsupported("not a band".into()))?;
        let (target, kk) = if i == 0 && k.rem_euclid(l - 1) == 0 {
            ((0u8, k / (l - 1)), k / (l - 1))
        } else if i == 1 && (k + 1).rem_euclid(l - 1) == 0 {
            let kk = (k + 1) / (l - 1);
            ((1u8, kk - 1), kk)
        } else {
            continue;
        };
        let t = dst.find(target.0, target.1).ok_or_else(|| Error::OutOfBand("bsigma band too narrow".into()))?;
        let s = f.sign(kk as i64);
        lin_add(f, &mut out, (t, h), f.mul(c, s));
    }
    Ok(out)
}

/// p_zeta^*: c -> -u v^{l-2}, d -> -v^{l-1}.
pub fn psigma_inclusion(src: &FPModule, dst: &FPModule, x: &MVec) -> Result<MVec, Error> {
    let l = src.profile.prime as i32;
    let f = src.profile.fp();
    let mut out = MVec::new();
    for (&(g, h), &c) in x {
        let (i, k) = src.gens[g].label.ok_or_else(|| Error::Unsupported("not a band".into()))?;
        let e = i as i32 * (l - 2) + k * (l - 1);
        let t = dst.find(i, e).ok_or_else(|| Error::OutOfBand("bmu band too narrow".into()))?;
        lin_add(f, &mut out, (t, h), f.mul(c, f.sign((i as i32 + k) as i64)));
    }
    Ok(out)
}

pub fn psigma_map(src: &FPModule, dst: &FPModule) -> Result<ModMap, Error> {
    Ok(ModMap { images: (0..src.dim()).map(|g| psigma_inclusion(src, dst, &mvec_gen(g))).collect::<Result<_, _>>()? })
}

pub fn pi_map(src: &FPModule, dst: &FPModule) -> Result<ModMap, Error> {
    Ok(ModMap { images: (0..src.dim()).map(|g| pi_projection(src, dst, &mvec_gen(g))).collect::<Result<_, _>>()? })
}

/// tower:lens:m0..m1,n=N (also accepts m0=A,m1=B,n=N).
pub fn parse_tower(profile: Profile, env: i32, desc: &str) -> Result<Tower, Error> {
    let bad = || Error::Parse(format!("bad tower descriptor '{desc}'"));
    let rest = desc.strip_prefix("tower:lens:").ok_or_else(bad)?;
    let (mut m0, mut m1, mut n) = (None, None, None);
    for part in rest.split(',') {
        if let Some((a, b)) = part.split_once("..") {
            m0 = a.trim().parse().ok();
            m1 = b.trim().parse().ok();
        } else if let Some((k, v)) = part.split_once('=') {
            let v: i32 = v.trim().parse().map_err(|_| bad())?;
            match k.trim() {
                "m0" => m0 = Some(v),
                "m1" => m1 = Some(v),
                "n" => n = Some(v),
                _ => return Err(bad()),
            }
        } else {
            return Err(bad());
        }
    }
    Ok(lens_tower(profile, env, m0.ok_or_else(bad)?, m1.ok_or_else(bad)?, n.ok_or_else(bad)?))
}

/// Check act(a, act(b, g)) = act(a b, g) for all symbols a, b with deg a + deg b <= max_deg.
pub fn check_relations(st: &Steenrod, md: &FPModule, max_deg: i32) -> Result<usize, String> {
    let p = st.p;
    let tag = Tag::An(md.n);
    let syms: Vec<Mono> = (1..=max_deg).flat_map(|d| basis(p, tag, d)).collect();
    let mut count = 0;
    for a in &syms {
        for b in &syms {
            if a.deg + b.deg > max_deg {
                continue;
            }
            for g in 0..md.dim() {
                let e = |e: Error| e.to_string();
                let inner = md.act_symbol(st, *b, g).map_err(e)?;
                let lhs = md.act_mono(st, *a, &inner).map_err(e)?;
                let prod = st.mul_symbols(*a, *b, md.n);
                let mut rhs = MVec::new();
                for (&(z, h), &c) in prod.iter() {
                    let v = md.act_symbol(st, z, g).map_err(e)?;
                    mvec_add(p, &mut rhs, &mvec_scale(&md.profile, &v, h, c), 1);
                }
                if lhs != rhs {
                    return Err(format!(
                        "{} * {} on {}: {} vs {}",
                        symbol_name(p, a),
                        symbol_name(p, b),
                        md.gens[g].name,
                        md.fmt(&lhs),
                        md.fmt(&rhs)
                    ));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Cartan formula on products of band generators whose product stays in the band.
pub fn check_cartan(st: &Steenrod, md: &FPModule, max_r: i64) -> Result<usize, String> {
    let p = st.p;
    let prof = md.profile;
    let e = |e: Error| e.to_string();
    let mut count = 0;
    let prod = |x: &MVec, y: &MVec| -> Option<MVec> {
        let mut out = MVec::new();
        for (&(a, h1), &c1) in x {
            for (&(b, h2), &c2) in y {
                let xy = band_product(md, a, b)?;
                let hh = h1.mul(h2);
                mvec_add(p, &mut out, &mvec_scale(&prof, &xy, hh, prof.fp().mul(c1, c2)), 1);
            }
        }
        Some(out)
    };
    let op = |e: u8, r: i64| crate::ops::bp(p, e, r as i32);
    // keep every factor away from the top edge so truncation does not enter
    let kmax = md.gens.iter().filter_map(|g| g.label).map(|l| l.1).max().unwrap_or(0);
    let safe = kmax as i64 - max_r * (p as i64 - 1) - 1;
    let low = |g: usize| md.gens[g].label.map(|l| l.1 as i64 <= safe).unwrap_or(false);
    for a in (0..md.dim()).filter(|&g| low(g)) {
        for b in (0..md.dim()).filter(|&g| low(g)) {
            let xy = match band_product(md, a, b) {
                Some(v) if v.keys().all(|&(g, _)| low(g)) => v,
                _ => continue,
            };
            let (x, y) = (mvec_gen(a), mvec_gen(b));
            for r in 0..=max_r {
                if r > 0 && (md.n < 1 || gen_ops(p, md.n).len() < 2 || crate::ops::min_envelope(p, &op(0, r)) > md.n) {
                    continue;
                }
                let lhs = md.act_mono(st, op(0, r), &xy).map_err(e)?;
                let mut rhs = MVec::new();
                let mut ok = true;
                for i in 0..=r {
                    let xi = md.act_mono(st, op(0, i), &x).map_err(e)?;
                    let yi = md.act_mono(st, op(0, r - i), &y).map_err(e)?;
                    match prod(&xi, &yi) {
                        Some(v) => mvec_add(p, &mut rhs, &v, 1),
                        None => ok = false,
                    }
                    if p == 2 && i < r && prof.allows(HMono::TAU) {
                        let xo = md.act_mono(st, op(1, i), &x).map_err(e)?;
                        let yo = md.act_mono(st, op(1, r - i - 1), &y).map_err(e)?;
                        match prod(&xo, &yo) {
                            Some(v) => mvec_add(p, &mut rhs, &mvec_scale(&prof, &v, HMono::TAU, 1), 1),
                            None => ok = false,
                        }
                    }
                }
                if !ok {
                    continue;
                }
                if lhs != rhs {
                    return Err(format!("P^{r}({} * {}): {} vs {}", md.gens[a].name, md.gens[b].name, md.fmt(&lhs), md.fmt(&rhs)));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{bp, q};

    fn gen(md: &FPModule, name: &str) -> MVec {
        mvec_gen(md.find_name(name).unwrap_or_else(|| panic!("no {name}")))
    }

    #[test]
    fn lens_examples() {
        let prof = Profile::trivial(2);
        let st = Steenrod::new(prof);
        let l = lens_module(prof, 2, 0, 2);
        let bd: Vec<(i32, i32)> = l.gens.iter().map(|g| (g.p, g.q)).collect();
        assert_eq!(bd, vec![(0, 0), (1, 1), (2, 1), (3, 2)]);
        let l = lens_module(prof, 2, 1, 3);
        let v = l.act_mono(&st, bp(2, 0, 1), &gen(&l, "v^-1")).unwrap();
        assert_eq!(l.fmt(&v), "1");
        let b = bmu_band(prof, 2, -3, 3);
        for k in -3..3 {
            let x = mvec_gen(b.find(1, k).unwrap());
            assert_eq!(b.act_mono(&st, q(2, 0), &x).unwrap(), mvec_gen(b.find(0, k + 1).unwrap()));
        }
        let t = trivial(prof, 2);
        assert!(t.act_mono(&st, bp(2, 0, 2), &mvec_gen(0)).unwrap().is_empty());
    }

    #[test]
    fn bsigma_examples() {
        let prof = Profile::trivial(3);
        let st = Steenrod::new(prof);
        let b = bsigma_band(prof, 1, -2, 4);
        let x = b.act_mono(&st, bp(3, 0, 1), &gen(&b, "d")).unwrap();
        assert_eq!(b.fmt(&x), "d^2");
        assert!(b.act_mono(&st, q(3, 0), &gen(&b, "d^2")).unwrap().is_empty());
        let m = bmu_band(prof, 1, -4, 4);
        let y = m.act_mono(&st, bp(3, 0, 1), &gen(&m, "v")).unwrap();
        assert_eq!(m.fmt(&y), "v^3");
    }

    #[test]
    fn relations_hold() {
        for prof in [Profile::trivial(2), Profile::complex(), Profile::real(), Profile::trivial(3)] {
            let st = Steenrod::new(prof);
            let n = if prof.prime == 2 { 2 } else { 1 };
            for md in [bmu_band(prof, n, -4, 4), bsigma_band(prof, n, -3, 3), susp(&lens_module(prof, n, 2, 5), 1, 0), trivial(prof, n)] {
                let d = if prof.prime == 2 { 10 } else { 14 };
                check_relations(&st, &md, d).unwrap_or_else(|e| panic!("{prof} {}: {e}", md.name));
            }
        }
    }

    #[test]
    fn cartan_and_periodicity() {
        for prof in [Profile::trivial(2), Profile::complex(), Profile::real(), Profile::trivial(3)] {
            let st = Steenrod::new(prof);
            let md = bmu_band(prof, 2, -6, 6);
            check_cartan(&st, &md, 4).unwrap_or_else(|e| panic!("{prof}: {e}"));
            // l^N periodicity for A(N), N = 1
            let big = bmu_band(prof, 1, -12, 12);
            let l = prof.prime as i32;
            for d in 1..=12 {
                for a in basis(l as u32, Tag::An(1), d) {
                    for i in 0..2u8 {
                        for k in -6..0 {
                            let x = big.act_mono(&st, a, &mvec_gen(big.find(i, k).unwrap())).unwrap();
                            let y = big.act_mono(&st, a, &mvec_gen(big.find(i, k + l).unwrap())).unwrap();
                            let shift = |v: &MVec, s: i32| -> Vec<(u8, i32, HMono, u32)> {
                                v.iter().map(|(&(g, h), &c)| (big.gens[g].label.unwrap().0, big.gens[g].label.unwrap().1 - s, h, c)).collect()
                            };
                            assert_eq!(shift(&x, 0), shift(&y, l));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn maps_are_linear() {
        for prof in [Profile::trivial(2), Profile::complex(), Profile::real(), Profile::trivial(3)] {
            let st = Steenrod::new(prof);
            let n = 2;
            let l = prof.prime as i32;
            let bs = bsigma_band(prof, n, -3, 3);
            let bm = bmu_band(prof, n, -3 * (l - 1), 3 * (l - 1) + l - 2);
            let inc = psigma_map(&bs, &bm).unwrap();
            inc.check_linear(&st, &bs, &bm).unwrap();
            let sbm = susp(&bmu_band(prof, n, -5, 5), 1, 0);
            let sbs = susp(&bsigma_band(prof, n, -5 / (l - 1) - 1, 5 / (l - 1)), 1, 0);
            let h = trivial(prof, n);
            residue_map(&sbm).check_linear(&st, &sbm, &h).unwrap_or_else(|e| panic!("{prof}: residue {e}"));
            if prof.kind != crate::coeff::Kind::Real {
                pi_map(&sbm, &sbs).unwrap().check_linear(&st, &sbm, &sbs).unwrap_or_else(|e| panic!("{prof}: pi {e}"));
            }
            let t = lens_tower(prof, n, 0, 3, 6);
            for (i, m) in t.maps.iter().enumerate() {
                m.check_linear(&st, &t.levels[i], &t.levels[i + 1]).unwrap();
            }
        }
    }

    #[test]
    fn psigma_examples() {
        let prof = Profile::trivial(3);
        let bs = bsigma_band(prof, 1, -2, 2);
        let bm = bmu_band(prof, 1, -6, 6);
        let d2 = psigma_inclusion(&bs, &bm, &gen(&bs, "d^2")).unwrap();
        assert_eq!(bm.fmt(&d2), "v^4");
        let c = psigma_inclusion(&bs, &bm, &gen(&bs, "c")).unwrap();
        assert_eq!(bm.fmt(&c), "-uv");
        let prof = Profile::trivial(2);
        let bs = bsigma_band(prof, 1, -2, 2);
        let bm = bmu_band(prof, 1, -3, 3);
        assert_eq!(bm.fmt(&psigma_inclusion(&bs, &bm, &gen(&bs, "c")).unwrap()), "u");
        assert_eq!(bm.fmt(&psigma_inclusion(&bs, &bm, &gen(&bs, "1")).unwrap()), "1");
    }

    #[test]
    fn residue_and_adjoint() {
        let prof = Profile::real();
        let sb = susp(&bmu_band(prof, 1, -3, 3), 1, 0);
        let b = bmu_band(prof, 1, -4, 4);
        let x = gen(&sb, "Suv^-1");
        assert_eq!(residue(&sb, &x).unwrap().to_string(), "1");
        assert!(residue(&sb, &gen(&sb, "Sv^-1")).unwrap().is_zero());
        let tx = mvec_scale(&prof, &x, HMono::TAU, 1);
        assert_eq!(residue(&sb, &tx).unwrap().to_string(), "T");
        assert_eq!(b.fmt(&frobenius_adjoint(&sb, &b, &gen(&sb, "S1")).unwrap()), "uv^-1");
        assert_eq!(b.fmt(&frobenius_adjoint(&sb, &b, &x).unwrap()), "1 + r*u");
        // adjoint pairs against the product: <adj(x), y> = res(x y)
        for prof in [Profile::trivial(2), Profile::complex(), Profile::real()] {
            let sb = susp(&bmu_band(prof, 1, -3, 3), 1, 0);
            let b = bmu_band(prof, 1, -8, 8);
            for g in 0..sb.dim() {
                let adj = frobenius_adjoint(&sb, &b, &mvec_gen(g)).unwrap();
                let (i, k) = sb.gens[g].label.unwrap();
                for y in 0..b.dim() {
                    let (j, m) = b.gens[y].label.unwrap();
                    let xy = band_product(&b, b.find(i, k).unwrap(), b.find(j, m).unwrap());
                    let res = xy.map(|v| v.iter().filter(|((t, _), _)| b.gens[*t].label == Some((1, -1))).map(|(&(_, h), &c)| (h, c)).collect::<Vec<_>>());
                    let want: Vec<(HMono, u32)> = adj.iter().filter(|((t, _), _)| *t == y).map(|(&(_, h), &c)| (h, c)).collect();
                    if let Some(r) = res {
                        assert_eq!(r, want, "{prof} {} {}", sb.gens[g].name, b.gens[y].name);
                    }
                }
            }
        }
    }

    #[test]
    fn pi_examples() {
        let prof = Profile::trivial(3);
        let sb = susp(&bmu_band(prof, 1, -4, 4), 1, 0);
        let ss = susp(&bsigma_band(prof, 1, -3, 3), 1, 0);
        assert_eq!(ss.fmt(&pi_projection(&sb, &ss, &gen(&sb, "Sv^2")).unwrap()), "-Sd");
        assert_eq!(ss.fmt(&pi_projection(&sb, &ss, &gen(&sb, "Suv")).unwrap()), "-Sc");
        assert!(pi_projection(&sb, &ss, &gen(&sb, "Sv")).unwrap().is_empty());
    }

    #[test]
    fn towers() {
        let prof = Profile::trivial(2);
        let t = lens_tower(prof, 2, 0, 4, 8);
        assert!(tower_stable(&t, -6, 6));
        assert!(!tower_stable(&t, -10, 6));
        let c = tower_colim(&t).unwrap();
        assert_eq!(c.gens, bmu_band(prof, 2, -4, 3).gens);
        for (i, m) in t.maps.iter().enumerate() {
            // injective on bidegrees below the top class
            let tops = t.levels[i].gens.iter().filter(|g| g.label.unwrap().1 == 8 - i as i32 - 1).count();
            let nonzero = m.images.iter().filter(|v| !v.is_empty()).count();
            assert_eq!(nonzero + tops, t.levels[i].dim());
        }
        let l = lens_module(prof, 2, 1, 4);
        let same = Tower { levels: vec![l.clone(), l.clone()], maps: vec![ModMap::identity(&l)] };
        assert_eq!(tower_colim(&same).unwrap().gens, l.gens);
        assert!(tower_stable(&same, -10, 10));
        let zero = Tower { levels: vec![l.clone(), l.clone()], maps: vec![ModMap::zero(&l)] };
        assert_eq!(tower_colim(&zero).unwrap().gens, l.gens);
        assert!(!tower_stable(&zero, -10, 10));
    }

    #[test]
    fn descriptors_and_json() {
        let st = Steenrod::new(Profile::trivial(2));
        let m = susp(&bmu_band(st.profile, 2, -2, 2), 1, 0);
        assert_eq!(m.dim(), 10);
        assert_eq!(m.gens[0].name, "Sv^-2");
        let j = m.to_json();
        assert_eq!(j["generators"].as_array().unwrap().len(), 10);
        let t = parse_tower(st.profile, 2, "tower:lens:m0=0,m1=4,n=8").unwrap();
        assert_eq!(t.levels.len(), 5);
    }

    #[test]
    fn free_module_relations() {
        let st = Steenrod::new(Profile::complex());
        let fm = free_module(&st, 1);
        check_relations(&st, &fm, 6).unwrap();
    }
}
