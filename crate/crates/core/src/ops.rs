//! Cohomological side: Milnor bases of A(n) and of the bimodules C(n), B(n),
//! with products and actions obtained by dualizing the coproduct and coactions.
//!
//! A Milnor element is stored like a dual element, as a left H-combination of
//! symbols rho(E,R), each symbol indexed by the dual monomial tau^E xi^R.

use crate::coeff::{HElement, HMono, Kind, Profile};
use crate::dualalg::{basis, lin_add, lin_sum, pow, Dual, Lin, Mono, Tag, NGEN};
use crate::fp::{Echelon, Fp};
use crate::Error;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

#[derive(Clone, PartialEq, Eq)]
pub struct MilnorElement {
    pub profile: Profile,
    pub tag: Tag,
    pub terms: Lin,
}

impl MilnorElement {
    pub fn zero(profile: Profile, tag: Tag) -> MilnorElement {
        MilnorElement { profile, tag, terms: Lin::new() }
    }
    pub fn symbol(profile: Profile, tag: Tag, m: Mono) -> MilnorElement {
        let mut terms = Lin::new();
        terms.insert((m, HMono::ONE), 1);
        MilnorElement { profile, tag, terms }
    }
    pub fn one(profile: Profile, tag: Tag) -> MilnorElement {
        MilnorElement::symbol(profile, tag, Mono::ONE)
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add(&self, o: &MilnorElement) -> MilnorElement {
        MilnorElement { profile: self.profile, tag: self.tag, terms: lin_sum(self.profile.fp(), &self.terms, &o.terms, 1) }
    }
    pub fn sub(&self, o: &MilnorElement) -> MilnorElement {
        let f = self.profile.fp();
        MilnorElement { profile: self.profile, tag: self.tag, terms: lin_sum(f, &self.terms, &o.terms, f.neg(1)) }
    }
    pub fn scale(&self, h: HMono, c: u32) -> MilnorElement {
        let f = self.profile.fp();
        let mut terms = Lin::new();
        for (&(m, k), &v) in &self.terms {
            let hk = h.mul(k);
            if self.profile.allows(hk) {
                lin_add(f, &mut terms, (m, hk), f.mul(v, c));
            }
        }
        MilnorElement { profile: self.profile, tag: self.tag, terms }
    }
    pub fn with_tag(&self, tag: Tag) -> MilnorElement {
        MilnorElement { profile: self.profile, tag, terms: self.terms.clone() }
    }
    /// Cohomological bidegree of each term; None if empty or inhomogeneous.
    pub fn bideg(&self) -> Option<(i32, i32)> {
        let mut out = None;
        for &(m, h) in self.terms.keys() {
            let b = (m.deg + h.a as i32, m.wt + h.a as i32 + h.b as i32);
            match out {
                None => out = Some(b),
                Some(o) if o != b => return None,
                _ => {}
            }
        }
        out
    }
}

/// Name of a symbol: Sq^k / beta^e P^r in the one-row case, else Milnor notation.
pub fn symbol_name(p: u32, m: &Mono) -> String {
    if m.is_one() {
        return "1".into();
    }
    let one_row = m.e & !1 == 0 && m.r[1..].iter().all(|&x| x == 0);
    if one_row {
        let e = m.e & 1;
        let r = m.r[0];
        if p == 2 {
            return format!("Sq{}", 2 * r + e as i32);
        }
        return match (e, r) {
            (1, 0) => "b".into(),
            (1, r) => format!("bP{r}"),
            (_, r) => format!("P{r}"),
        };
    }
    let mut s = String::new();
    if m.e != 0 {
        let top = (0..NGEN).rev().find(|&i| m.has_tau(i)).unwrap();
        let es: Vec<String> = (0..=top).map(|i| (m.e >> i & 1).to_string()).collect();
        s.push_str(&format!("Q({})", es.join(",")));
    }
    let rl = m.r_list();
    if !rl.is_empty() {
        let rs: Vec<String> = rl.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("P({})", rs.join(",")));
    }
    s
}

impl fmt::Display for MilnorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let fp = self.profile.fp();
        let mut parts = Vec::new();
        for (&(m, h), &c) in &self.terms {
            let c = fp.signed(c);
            let mut t = String::new();
            if c == -1 {
                t.push('-');
            } else if c != 1 {
                t.push_str(&format!("{c}*"));
            }
            if !h.is_one() {
                t.push_str(&format!("{h}*"));
            }
            t.push_str(&symbol_name(self.profile.prime, &m));
            parts.push(t);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for MilnorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} @ {}", self.tag)
    }
}

/// Which structure map a pairing table dualizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Pairing {
    /// product in A(n), dual to psi_n
    Product(i32),
    /// left A(n)-action on C(n) or B(n), dual to lambda_n
    Left(Tag),
    /// right A(n-1)-action on C(n) or B(n), dual to rho_n
    Right(Tag),
}

type Table = HashMap<(Mono, Mono), Vec<(Mono, HMono, u32)>>;

/// Products and actions on Milnor bases, with per-degree memoized tables.
pub struct Steenrod {
    pub dual: Dual,
    pub profile: Profile,
    pub f: Fp,
    pub p: u32,
    tables: RefCell<HashMap<(Pairing, i32), Rc<Table>>>,
    right_h: RefCell<HashMap<(Mono, HMono, Tag), Rc<Lin>>>,
    mono_products: RefCell<HashMap<(Mono, Mono, i32), Rc<Lin>>>,
    words: RefCell<HashMap<(Mono, i32), Rc<Vec<WordTerm>>>>,
}

/// One term c * h * (g * rest) of a word decomposition; `op = None` means c * h * rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordTerm {
    pub op: Option<usize>,
    pub rest: Mono,
    pub h: HMono,
    pub c: u32,
}

/// Algebra generators of A(n): beta, P^1, P^l, ..., P^{l^{n-1}}.
pub fn gen_ops(p: u32, n: i32) -> Vec<Mono> {
    let mut v = Vec::new();
    if n >= 0 {
        v.push(q(p, 0));
    }
    for j in 0..n.max(0) {
        v.push(bp(p, 0, pow(p, j as u32) as i32));
    }
    v
}

impl Steenrod {
    pub fn new(profile: Profile) -> Steenrod {
        Steenrod {
            dual: Dual::new(profile),
            profile,
            f: profile.fp(),
            p: profile.prime,
            tables: RefCell::new(HashMap::new()),
            right_h: RefCell::new(HashMap::new()),
            mono_products: RefCell::new(HashMap::new()),
            words: RefCell::new(HashMap::new()),
        }
    }

    fn table(&self, kind: Pairing, deg: i32) -> Rc<Table> {
        if let Some(t) = self.tables.borrow().get(&(kind, deg)) {
            return t.clone();
        }
        let p = self.p;
        let d = &self.dual;
        let f = self.f;
        let odd = p != 2;
        let mut table: Table = HashMap::new();
        let (xtag, ltag) = match kind {
            Pairing::Product(n) => (Tag::An(n), Tag::An(n)),
            Pairing::Left(t) => (t, Tag::An(t.n().unwrap())),
            Pairing::Right(t) => (t, t),
        };
        for x in basis(p, xtag, deg) {
            let tensor = match kind {
                Pairing::Product(n) => (*d.psi_mono(x, Tag::An(n), Tag::An(n))).clone(),
                Pairing::Left(t) => d.coact_left_mono(x, t.n().unwrap(), t),
                Pairing::Right(t) => d.coact_right_mono(x, t.n().unwrap(), t),
            };
            for (&(l, r, h), &c) in tensor.iter() {
                let s = if odd { f.sign(l.deg as i64 * r.deg as i64) } else { 1 };
                let c = f.mul(c, s);
                if h.is_one() || self.profile.kind != Kind::Real {
                    table.entry((l, r)).or_default().push((x, h, c));
                } else {
                    let exp = d.mul_lin(&d.mono_lin(l, HMono::ONE, 1), &d.eta_r_mono(h), ltag);
                    for (&(a, k), &c2) in &exp {
                        table.entry((a, r)).or_default().push((x, k, f.mul(c, c2)));
                    }
                }
            }
        }
        let rc = Rc::new(table);
        self.tables.borrow_mut().insert((kind, deg), rc.clone());
        rc
    }

    /// rho(a) * h as a left-H combination, for a a symbol of `tag`.
    pub fn symbol_times_h(&self, a: Mono, h: HMono, tag: Tag) -> Rc<Lin> {
        if h.is_one() || self.profile.kind != Kind::Real {
            let mut l = Lin::new();
            l.insert((a, h), 1);
            return Rc::new(l);
        }
        if let Some(v) = self.right_h.borrow().get(&(a, h, tag)) {
            return v.clone();
        }
        let d = &self.dual;
        let mut out = Lin::new();
        // rewriting only adds rho, so deg z <= deg a; each added rho uses up a tau
        let lo = match tag {
            Tag::An(_) | Tag::Full => 0,
            _ => a.deg - h.b as i32 - NGEN as i32 - 1,
        };
        for deg in lo..=a.deg {
            for z in basis(self.p, tag, deg) {
                let prod = d.mul_lin(&d.mono_lin(z, HMono::ONE, 1), &d.eta_r_mono(h), Tag::Full);
                for (&(m, k), &c) in &prod {
                    if m == a {
                        lin_add(self.f, &mut out, (z, k), c);
                    }
                }
            }
        }
        let rc = Rc::new(out);
        self.right_h.borrow_mut().insert((a, h, tag), rc.clone());
        rc
    }

    /// rho(a) rho(b) in A(n).
    pub fn mul_symbols(&self, a: Mono, b: Mono, n: i32) -> Rc<Lin> {
        if let Some(v) = self.mono_products.borrow().get(&(a, b, n)) {
            return v.clone();
        }
        let out = self.gather(Pairing::Product(n), n, a, b);
        let rc = Rc::new(out);
        self.mono_products.borrow_mut().insert((a, b, n), rc.clone());
        rc
    }

    fn pair_lin(&self, x: &Lin, y: &Lin, xtag: Tag, by_symbol: impl Fn(Mono, Mono) -> Lin) -> Lin {
        let f = self.f;
        let mut out = Lin::new();
        for (&(a, h1), &c1) in x {
            for (&(b, h2), &c2) in y {
                let ah = self.symbol_times_h(a, h2, xtag);
                for (&(a2, k), &c3) in ah.iter() {
                    let hk = h1.mul(k);
                    if !self.profile.allows(hk) {
                        continue;
                    }
                    let c = f.mul(f.mul(c1, c2), c3);
                    for (&(z, g), &c4) in &by_symbol(a2, b) {
                        let hh = hk.mul(g);
                        if self.profile.allows(hh) {
                            lin_add(f, &mut out, (z, hh), f.mul(c, c4));
                        }
                    }
                }
            }
        }
        out
    }

    /// Product in A(max(n, m)).
    pub fn mul(&self, x: &MilnorElement, y: &MilnorElement) -> Result<MilnorElement, Error> {
        let n = match (x.tag, y.tag) {
            (Tag::An(a), Tag::An(b)) => a.max(b),
            (a, b) => return Err(Error::TagMismatch(a.to_string(), b.to_string())),
        };
        if x.profile != self.profile || y.profile != self.profile {
            return Err(Error::ProfileMismatch);
        }
        let terms = self.pair_lin(&x.terms, &y.terms, Tag::An(n), |a, b| (*self.mul_symbols(a, b, n)).clone());
        Ok(MilnorElement { profile: self.profile, tag: Tag::An(n), terms })
    }

    /// Sum the pairing entries for (a, b). A coefficient rho^alpha lowers the degree
    /// of the paired monomial by alpha, and alpha is at most its number of tau's.
    fn gather(&self, kind: Pairing, n: i32, a: Mono, b: Mono) -> Lin {
        let reach = if self.profile.kind == Kind::Real { n + 1 } else { 0 };
        let mut out = Lin::new();
        for alpha in 0..=reach.max(0) {
            let t = self.table(kind, a.deg + b.deg - alpha);
            if let Some(v) = t.get(&(a, b)) {
                for &(x, h, c) in v {
                    lin_add(self.f, &mut out, (x, h), c);
                }
            }
        }
        out
    }

    fn act_table(&self, kind: Pairing, a: Mono, b: Mono) -> Lin {
        let n = match kind {
            Pairing::Product(n) => n,
            Pairing::Left(t) | Pairing::Right(t) => t.n().unwrap(),
        };
        self.gather(kind, n, a, b)
    }

    /// Left action of A(n) on C(n) or B(n).
    pub fn act_left(&self, a: &MilnorElement, x: &MilnorElement) -> Result<MilnorElement, Error> {
        let n = x.tag.n().filter(|_| matches!(x.tag, Tag::Cn(_) | Tag::Bn(_))).ok_or_else(|| Error::Unsupported(format!("left action on {}", x.tag)))?;
        match a.tag {
            Tag::An(m) if m <= n => {}
            t => return Err(Error::TagMismatch(t.to_string(), x.tag.to_string())),
        }
        let kind = Pairing::Left(x.tag);
        let terms = self.pair_lin(&a.terms, &x.terms, Tag::An(n), |s, y| self.act_table(kind, s, y));
        Ok(MilnorElement { profile: self.profile, tag: x.tag, terms })
    }

    /// Right action of A(n-1) on C(n) or B(n).
    pub fn act_right(&self, x: &MilnorElement, b: &MilnorElement) -> Result<MilnorElement, Error> {
        let n = x.tag.n().filter(|_| matches!(x.tag, Tag::Cn(_) | Tag::Bn(_))).ok_or_else(|| Error::Unsupported(format!("right action on {}", x.tag)))?;
        match b.tag {
            Tag::An(m) if m < n => {}
            t => return Err(Error::TagMismatch(x.tag.to_string(), t.to_string())),
        }
        let kind = Pairing::Right(x.tag);
        let terms = self.pair_lin(&x.terms, &b.terms, x.tag, |y, s| self.act_table(kind, y, s));
        Ok(MilnorElement { profile: self.profile, tag: x.tag, terms })
    }

    pub fn act_bimodule(&self, a: &MilnorElement, x: &MilnorElement, b: &MilnorElement) -> Result<MilnorElement, Error> {
        let ax = self.act_left(a, x)?;
        self.act_right(&ax, b)
    }

    /// [a, h] = a h - (-1)^{|a||h|} h a for a in A(n).
    pub fn commutator_with_h(&self, a: &MilnorElement, h: &HElement) -> Result<MilnorElement, Error> {
        let n = match a.tag {
            Tag::An(n) => n,
            t => return Err(Error::Unsupported(format!("commutator in {t}"))),
        };
        let hl = MilnorElement { profile: self.profile, tag: Tag::An(n), terms: if h.coeff == 0 { Lin::new() } else { [((Mono::ONE, h.mono), h.coeff)].into_iter().collect() } };
        let ah = self.mul(a, &hl)?;
        let ha = self.mul(&hl, a)?;
        Ok(ah.sub(&ha))
    }

    /// B(n) -> C(n): drop symbols with negative r_1.
    pub fn b_to_c(&self, x: &MilnorElement) -> Result<MilnorElement, Error> {
        let n = match x.tag {
            Tag::Bn(n) => n,
            t => return Err(Error::Unsupported(format!("b_to_c on {t}"))),
        };
        let terms = x.terms.iter().filter(|((m, _), _)| m.r[0] >= 0).map(|(k, v)| (*k, *v)).collect();
        Ok(MilnorElement { profile: self.profile, tag: Tag::Cn(n), terms })
    }

    fn require_central(&self) -> Result<(), Error> {
        if self.profile.kind == Kind::Real {
            return Err(Error::Unsupported("decompositions need central coefficients".into()));
        }
        Ok(())
    }

    /// Powers of tau with which a symbol of weight w reaches weight q.
    fn tau_shift(&self, w: i32, q: i32) -> Option<HMono> {
        let k = q - w;
        if k < 0 {
            return None;
        }
        let h = HMono::new(0, k as u16);
        if self.profile.allows(h) {
            Some(h)
        } else {
            None
        }
    }

    /// Solve x = sum of candidate vectors, per bidegree; returns coefficient per candidate.
    fn solve_bideg(&self, target: &Lin, cands: &[Lin]) -> Option<Vec<u32>> {
        let mut keys: Vec<(Mono, HMono)> = target.keys().copied().collect();
        for c in cands {
            keys.extend(c.keys().copied());
        }
        keys.sort();
        keys.dedup();
        let idx: HashMap<_, _> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let n = keys.len();
        let mut ech = Echelon::new(self.f, n, cands.len());
        for (i, c) in cands.iter().enumerate() {
            let mut v = vec![0u32; n + cands.len()];
            for (k, &x) in c {
                v[idx[k]] = x;
            }
            v[n + i] = 1;
            ech.insert(&mut v);
        }
        let mut t = vec![0u32; n];
        for (k, &x) in target {
            t[idx[k]] = x;
        }
        ech.solve(&t)
    }

    /// Express a symbol of A(n) of positive degree as sum of h * (g * a') with g a generator
    /// and a' a symbol of lower degree, plus h * z for lower symbols z (only with rho).
    pub fn word(&self, a: Mono, n: i32) -> Rc<Vec<WordTerm>> {
        if let Some(w) = self.words.borrow().get(&(a, n)) {
            return w.clone();
        }
        let p = self.p;
        let tag = Tag::An(n);
        let gens = gen_ops(p, n);
        let (pa, qa) = (a.deg, a.wt);
        let mut cands = Vec::new();
        let mut labels = Vec::new();
        for (gi, g) in gens.iter().enumerate() {
            for d in 0..a.deg - g.deg + 1 {
                for r in basis(p, tag, d) {
                    // h * g * r in bidegree (pa, qa): h = rho^i tau^j
                    let i = pa - g.deg - r.deg;
                    let j = qa - g.wt - r.wt - i;
                    if i < 0 || j < 0 {
                        continue;
                    }
                    let h = HMono::new(i as u16, j as u16);
                    if !self.profile.allows(h) {
                        continue;
                    }
                    let prod = self.mul_symbols(*g, r, n);
                    let v: Lin = prod.iter().filter_map(|(&(m, k), &c)| {
                        let hk = h.mul(k);
                        self.profile.allows(hk).then_some(((m, hk), c))
                    }).collect();
                    cands.push(v);
                    labels.push(WordTerm { op: Some(gi), rest: r, h, c: 0 });
                }
            }
        }
        if self.profile.kind == Kind::Real {
            for d in 0..a.deg {
                for z in basis(p, tag, d) {
                    let i = pa - z.deg;
                    let j = qa - z.wt - i;
                    if j < 0 {
                        continue;
                    }
                    let h = HMono::new(i as u16, j as u16);
                    cands.push([((z, h), 1)].into_iter().collect());
                    labels.push(WordTerm { op: None, rest: z, h, c: 0 });
                }
            }
        }
        let target: Lin = [((a, HMono::ONE), 1)].into_iter().collect();
        let sol = self.solve_bideg(&target, &cands).unwrap_or_else(|| panic!("{} is not generated in A({n})", symbol_name(p, &a)));
        let out: Vec<WordTerm> = sol.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| WordTerm { c, ..labels[i] }).collect();
        let rc = Rc::new(out);
        self.words.borrow_mut().insert((a, n), rc.clone());
        rc
    }

    /// x = sum a_i P^{r_i} with a_i in A(n) and l^n | r_i (free left A(n)-basis of B(n)).
    pub fn decompose_left_an(&self, x: &MilnorElement) -> Result<Vec<(MilnorElement, i64)>, Error> {
        self.require_central()?;
        let n = match x.tag {
            Tag::Bn(n) | Tag::Cn(n) => n,
            t => return Err(Error::Unsupported(format!("left decomposition on {t}"))),
        };
        let p = self.p;
        let step = pow(p, n as u32);
        let mut out: BTreeMap<i64, Lin> = BTreeMap::new();
        for (p_deg, q_wt, part) in split_bidegrees(x) {
            let mut cands = Vec::new();
            let mut labels = Vec::new();
            let pr_deg = (2 * p as i64 - 2) * step;
            let top = crate::verify::basis_max_deg(p, Tag::An(n)) as i64;
            // r ranges so that deg a = p_deg - deg P^r lies in [0, top]
            let rmin = (p_deg as i64 - top).div_euclid(pr_deg) - 1;
            let rmax = (p_deg as i64).div_euclid(pr_deg) + 1;
            for j in rmin..=rmax {
                let r = j * step;
                if matches!(x.tag, Tag::Cn(_)) && r < 0 {
                    continue;
                }
                let pr = Mono::xi(p, 1, r as i32);
                let da = p_deg - pr.deg;
                if da < 0 {
                    continue;
                }
                for a in basis(p, Tag::An(n), da) {
                    let Some(h) = self.tau_shift(a.wt + pr.wt, q_wt) else { continue };
                    let prod = self.act_table(Pairing::Left(x.tag), a, pr);
                    let scaled: Lin = prod.into_iter().filter_map(|((m, k), c)| {
                        let hk = k.mul(h);
                        self.profile.allows(hk).then_some(((m, hk), c))
                    }).collect();
                    cands.push(scaled);
                    labels.push((a, h, r));
                }
            }
            let sol = self.solve_bideg(&part, &cands).ok_or_else(|| Error::Inconclusive("left decomposition failed".into()))?;
            for (i, &c) in sol.iter().enumerate() {
                if c != 0 {
                    let (a, h, r) = labels[i];
                    lin_add(self.f, out.entry(r).or_default(), (a, h), c);
                }
            }
        }
        Ok(out
            .into_iter()
            .filter(|(_, l)| !l.is_empty())
            .map(|(r, l)| (MilnorElement { profile: self.profile, tag: Tag::An(n), terms: l }, r))
            .collect())
    }

    /// x = sum beta^e P^r b_i with b_i in A(n-1) (free right A(n-1)-basis of B(n)).
    pub fn decompose_right_an1(&self, x: &MilnorElement) -> Result<Vec<((u8, i64), MilnorElement)>, Error> {
        self.require_central()?;
        let n = match x.tag {
            Tag::Bn(n) | Tag::Cn(n) => n,
            t => return Err(Error::Unsupported(format!("right decomposition on {t}"))),
        };
        let p = self.p;
        let mut out: BTreeMap<(u8, i64), Lin> = BTreeMap::new();
        for (p_deg, q_wt, part) in split_bidegrees(x) {
            let mut cands = Vec::new();
            let mut labels = Vec::new();
            let top = if n >= 1 { crate::verify::basis_max_deg(p, Tag::An(n - 1)) } else { 0 };
            for db in 0..=top {
                for b in basis(p, Tag::An(n - 1), db) {
                    for e in 0..=1u8 {
                        let rest = p_deg - db - e as i32;
                        let d1 = 2 * p as i32 - 2;
                        if rest % d1 != 0 {
                            continue;
                        }
                        let r = rest / d1;
                        if matches!(x.tag, Tag::Cn(_)) && r < 0 {
                            continue;
                        }
                        let s = Mono::new(p, e as u16, { let mut rr = [0; NGEN]; rr[0] = r; rr });
                        let Some(h) = self.tau_shift(s.wt + b.wt, q_wt) else { continue };
                        let prod = self.act_table(Pairing::Right(x.tag), s, b);
                        let scaled: Lin = prod.into_iter().filter_map(|((m, k), c)| {
                            let hk = k.mul(h);
                            self.profile.allows(hk).then_some(((m, hk), c))
                        }).collect();
                        cands.push(scaled);
                        labels.push((e, r as i64, b, h));
                    }
                }
            }
            let sol = self.solve_bideg(&part, &cands).ok_or_else(|| Error::Inconclusive("right decomposition failed".into()))?;
            for (i, &c) in sol.iter().enumerate() {
                if c != 0 {
                    let (e, r, b, h) = labels[i];
                    lin_add(self.f, out.entry((e, r)).or_default(), (b, h), c);
                }
            }
        }
        Ok(out
            .into_iter()
            .filter(|(_, l)| !l.is_empty())
            .map(|(k, l)| (k, MilnorElement { profile: self.profile, tag: Tag::An(n - 1), terms: l }))
            .collect())
    }
}

/// Split an element into its homogeneous pieces (cohomological bidegrees).
pub fn split_bidegrees(x: &MilnorElement) -> Vec<(i32, i32, Lin)> {
    let mut by: BTreeMap<(i32, i32), Lin> = BTreeMap::new();
    for (&(m, h), &c) in &x.terms {
        let b = (m.deg + h.a as i32, m.wt + h.a as i32 + h.b as i32);
        by.entry(b).or_default().insert((m, h), c);
    }
    by.into_iter().map(|((p, q), l)| (p, q, l)).collect()
}

/// beta^e P^r as a symbol.
pub fn bp(p: u32, e: u8, r: i32) -> Mono {
    let mut rr = [0; NGEN];
    rr[0] = r;
    Mono::new(p, e as u16, rr)
}

/// Sq^k for l = 2.
pub fn sq(k: i32) -> Mono {
    bp(2, (k.rem_euclid(2)) as u8, k.div_euclid(2))
}

/// Q_i, dual to tau_i.
pub fn q(p: u32, i: usize) -> Mono {
    Mono::tau(p, i)
}

/// P_i^j, dual to xi_i^{l^j}.
pub fn p_ij(p: u32, i: usize, j: u32) -> Mono {
    Mono::xi(p, i, pow(p, j) as i32)
}

/// Smallest n with the symbol in A(n).
pub fn min_envelope(p: u32, m: &Mono) -> i32 {
    (-1..NGEN as i32).find(|&n| Tag::An(n).keeps(p, m)).unwrap_or(NGEN as i32)
}

/// Parse operator syntax: `Sq3`, `bP2`, `P-4`, `Q1`, `P(1,0)`, `Q(1,0,1)P(2)`,
/// `b`, optionally multiplied by `T`, `r` or integers, with `+` sums and `*` products.
pub fn parse_symbol(p: u32, s: &str) -> Result<Mono, Error> {
    let s = s.trim();
    let err = || Error::Parse(format!("bad operation '{s}'"));
    if s == "1" {
        return Ok(Mono::ONE);
    }
    if s == "b" {
        return Ok(bp(p, 1, 0));
    }
    if let Some(k) = s.strip_prefix("Sq") {
        if p != 2 {
            return Err(Error::Parse("Sq needs prime 2".into()));
        }
        return Ok(sq(k.parse().map_err(|_| err())?));
    }
    if let Some(k) = s.strip_prefix("bP") {
        return Ok(bp(p, 1, k.parse().map_err(|_| err())?));
    }
    if s.starts_with("Q(") || s.starts_with("P(") {
        let mut e = 0u16;
        let mut r = [0i32; NGEN];
        let mut rest = s;
        while !rest.is_empty() {
            let close = rest.find(')').ok_or_else(err)?;
            let head = &rest[..2];
            let body = &rest[2..close];
            let nums: Vec<i32> = if body.is_empty() {
                vec![]
            } else {
                body.split(',').map(|x| x.trim().parse::<i32>().map_err(|_| err())).collect::<Result<_, _>>()?
            };
            if nums.len() > NGEN {
                return Err(err());
            }
            match head {
                "Q(" => {
                    for (i, &x) in nums.iter().enumerate() {
                        if x != 0 && x != 1 {
                            return Err(err());
                        }
                        if x == 1 {
                            e |= 1 << i;
                        }
                    }
                }
                "P(" => r[..nums.len()].copy_from_slice(&nums),
                _ => return Err(err()),
            }
            rest = &rest[close + 1..];
        }
        return Ok(Mono::new(p, e, r));
    }
    if let Some(k) = s.strip_prefix('Q') {
        let i: usize = k.parse().map_err(|_| err())?;
        if i >= NGEN {
            return Err(err());
        }
        return Ok(q(p, i));
    }
    if let Some(k) = s.strip_prefix('P') {
        return Ok(bp(p, 0, k.parse().map_err(|_| err())?));
    }
    Err(err())
}

/// Parse a sum of products of symbols and coefficients into A(n), C(n) or B(n).
/// Products are only evaluated inside A(n).
pub fn parse_op(st: &Steenrod, s: &str, tag: Tag) -> Result<MilnorElement, Error> {
    let p = st.p;
    let f = st.f;
    let mut total = MilnorElement::zero(st.profile, tag);
    let cleaned = s.replace(' ', "");
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut depth = 0;
    let chars: Vec<char> = cleaned.chars().collect();
    for (i, &ch) in chars.iter().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let prev = if i > 0 { chars[i - 1] } else { ' ' };
        let unary = prev.is_ascii_alphabetic() || prev == '^';
        if depth == 0 && (ch == '+' || (ch == '-' && !unary)) {
            if !cur.is_empty() {
                pieces.push((neg, std::mem::take(&mut cur)));
            }
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        pieces.push((neg, cur));
    }
    if pieces.is_empty() {
        return Err(Error::Parse("empty operation".into()));
    }
    for (neg, piece) in pieces {
        let mut h = HMono::ONE;
        let mut c = 1u32;
        let mut syms = Vec::new();
        for factor in piece.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, x)) if b == "r" || b == "T" => (b, x.parse::<u16>().map_err(|_| Error::Parse(format!("bad exponent '{factor}'")))?),
                _ => (factor, 1),
            };
            if base == "r" {
                h.a += exp;
            } else if base == "T" {
                h.b += exp;
            } else if let Ok(k) = base.parse::<i64>() {
                c = f.mul(c, f.from_i64(k));
            } else {
                syms.push(parse_symbol(p, base)?);
            }
        }
        if neg {
            c = f.neg(c);
        }
        let elt = if syms.len() <= 1 {
            let m = syms.first().copied().unwrap_or(Mono::ONE);
            if !tag.keeps(p, &m) {
                return Err(Error::OutOfBand(format!("{} is not in {tag}", symbol_name(p, &m))));
            }
            MilnorElement::symbol(st.profile, tag, m)
        } else {
            let n = syms.iter().map(|m| min_envelope(p, m)).max().unwrap().max(tag.n().unwrap_or(0));
            let mut acc = MilnorElement::one(st.profile, Tag::An(n));
            for m in syms {
                acc = st.mul(&acc, &MilnorElement::symbol(st.profile, Tag::An(n), m))?;
            }
            if !matches!(tag, Tag::An(_)) {
                return Err(Error::Unsupported("products outside A(n)".into()));
            }
            acc
        };
        let elt = elt.scale(h, c);
        total = if total.tag == elt.tag { total.add(&elt) } else { elt.with_tag(elt.tag).add(&total.with_tag(elt.tag)) };
    }
    Ok(total)
}

/// Motivic Adem relation for Sq^a Sq^b, 0 < a < 2b, as a list of
/// (coefficient monomial, c, i, j) meaning c * h * Sq^i Sq^j.
pub fn adem_terms(a: i64, b: i64) -> Vec<(HMono, u32, i64, i64)> {
    use crate::fp::binom;
    let mut out = Vec::new();
    for j in 0..=a / 2 {
        let c = binom(b - 1 - j, a - 2 * j, 2);
        let c_rho = match (a % 2, b % 2) {
            (1, 0) => binom(b - 1 - j, a - 2 * j - 1, 2),
            (0, 1) => c,
            _ => 0,
        };
        if j % 2 == 1 && c_rho != 0 {
            out.push((HMono::RHO, 1, a + b - j - 1, j));
        }
        if c == 0 {
            continue;
        }
        match (a % 2, b % 2) {
            (0, 0) => out.push((HMono::new(0, (j % 2) as u16), 1, a + b - j, j)),
            (1, 0) => out.push((HMono::ONE, 1, a + b - j, j)),
            (0, 1) => out.push((HMono::ONE, 1, a + b - j, j)),
            _ => {
                if j % 2 == 1 {
                    out.push((HMono::ONE, 1, a + b - j, j));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(st: &Steenrod, s: &str, n: i32) -> MilnorElement {
        parse_op(st, s, Tag::An(n)).unwrap()
    }

    #[test]
    fn beta_squared_and_a1_relation() {
        for prof in [Profile::trivial(2), Profile::complex(), Profile::real()] {
            let st = Steenrod::new(prof);
            let b = el(&st, "Sq1", 1);
            assert!(st.mul(&b, &b).unwrap().is_zero());
            let s2 = el(&st, "Sq2", 1);
            let lhs = st.mul(&s2, &s2).unwrap();
            let rhs = el(&st, "T*Sq3*Sq1", 1);
            assert_eq!(lhs, rhs, "{prof}");
        }
        let st = Steenrod::new(Profile::trivial(3));
        let b = el(&st, "b", 1);
        assert!(st.mul(&b, &b).unwrap().is_zero());
    }

    #[test]
    fn commutators() {
        for prof in [Profile::trivial(2), Profile::trivial(3), Profile::complex(), Profile::real()] {
            let st = Steenrod::new(prof);
            let p = prof.prime;
            for n in 1..=3 {
                if p == 3 && n == 3 {
                    continue;
                }
                let pn = MilnorElement::symbol(prof, Tag::An(n), p_ij(p, n as usize, 0));
                let q0 = MilnorElement::symbol(prof, Tag::An(n), q(p, 0));
                let c = st.mul(&pn, &q0).unwrap().sub(&st.mul(&q0, &pn).unwrap());
                assert_eq!(c, MilnorElement::symbol(prof, Tag::An(n), q(p, n as usize)), "{prof} n={n}");
            }
        }
    }

    #[test]
    fn beta_tau_commutator() {
        let r = Profile::real();
        let st = Steenrod::new(r);
        let b = MilnorElement::symbol(r, Tag::An(0), q(2, 0));
        let tau = HElement::new(r, HMono::TAU, 1).unwrap();
        let rho = HElement::new(r, HMono::RHO, 1).unwrap();
        let c = st.commutator_with_h(&b, &tau).unwrap();
        assert_eq!(c, MilnorElement::one(r, Tag::An(0)).scale(HMono::RHO, 1));
        assert!(st.commutator_with_h(&b, &rho).unwrap().is_zero());
        assert!(st.commutator_with_h(&b, &HElement::one(r)).unwrap().is_zero());
    }

    #[test]
    fn parse_and_print() {
        let st = Steenrod::new(Profile::trivial(2));
        assert_eq!(el(&st, "Sq3", 2).to_string(), "Sq3");
        assert_eq!(el(&st, "P(1,1)", 2).to_string(), "P(1,1)");
        assert_eq!(el(&st, "Q1", 2).to_string(), "Q(0,1)");
        let x = parse_op(&st, "P-4", Tag::Bn(1)).unwrap();
        assert_eq!(x.to_string(), "Sq-8");
        assert!(parse_op(&st, "Sq4", Tag::An(1)).is_err());
    }

    #[test]
    fn bimodule_examples() {
        let t = Profile::trivial(2);
        let st = Steenrod::new(t);
        let q0 = el(&st, "Q0", 0);
        let x = parse_op(&st, "P-1", Tag::Bn(0)).unwrap();
        assert_eq!(st.act_left(&q0, &x).unwrap(), parse_op(&st, "bP-1", Tag::Bn(0)).unwrap());
        let sq3 = parse_op(&st, "Sq3", Tag::Bn(1)).unwrap();
        assert_eq!(st.b_to_c(&sq3).unwrap().terms, sq3.terms);
        assert!(st.b_to_c(&parse_op(&st, "Sq-1", Tag::Bn(1)).unwrap()).unwrap().is_zero());
        let c = Steenrod::new(Profile::complex());
        let tx = parse_op(&c, "T*Sq-3", Tag::Bn(1)).unwrap();
        assert!(c.b_to_c(&tx).unwrap().is_zero());
        let ty = parse_op(&c, "T*Sq3", Tag::Bn(1)).unwrap();
        assert_eq!(c.b_to_c(&ty).unwrap().terms, ty.terms);
    }

    #[test]
    fn left_decompositions() {
        for p in [2u32, 3] {
            let prof = Profile::trivial(p);
            let st = Steenrod::new(prof);
            for n in 0..=2 {
                let ln = pow(p, n as u32) as i32;
                let x = MilnorElement::symbol(prof, Tag::Bn(n), bp(p, 0, ln));
                assert_eq!(st.decompose_left_an(&x).unwrap(), vec![(MilnorElement::one(prof, Tag::An(n)), ln as i64)]);
                let x = MilnorElement::symbol(prof, Tag::Bn(n), bp(p, 1, -ln));
                let dec = st.decompose_left_an(&x).unwrap();
                assert_eq!(dec, vec![(MilnorElement::symbol(prof, Tag::An(n), q(p, 0)), -ln as i64)], "p={p} n={n}");
            }
        }
        let t = Profile::trivial(2);
        let st = Steenrod::new(t);
        let x = parse_op(&st, "P1", Tag::Bn(1)).unwrap();
        assert_eq!(st.decompose_left_an(&x).unwrap(), vec![(el(&st, "P1", 1), 0)]);
    }

    fn recombine_left(st: &Steenrod, tag: Tag, dec: &[(MilnorElement, i64)]) -> MilnorElement {
        let mut acc = MilnorElement::zero(st.profile, tag);
        for (a, r) in dec {
            let pr = MilnorElement::symbol(st.profile, tag, bp(st.p, 0, *r as i32));
            acc = acc.add(&st.act_left(a, &pr).unwrap());
        }
        acc
    }

    fn recombine_right(st: &Steenrod, tag: Tag, dec: &[((u8, i64), MilnorElement)]) -> MilnorElement {
        let mut acc = MilnorElement::zero(st.profile, tag);
        for ((e, r), b) in dec {
            let s = MilnorElement::symbol(st.profile, tag, bp(st.p, *e, *r as i32));
            acc = acc.add(&st.act_right(&s, b).unwrap());
        }
        acc
    }

    #[test]
    fn decompositions_recombine() {
        for prof in [Profile::trivial(2), Profile::trivial(3), Profile::complex()] {
            let st = Steenrod::new(prof);
            let p = prof.prime;
            for n in 1..=2 {
                let tag = Tag::Bn(n);
                for deg in -12..=12 {
                    for m in basis(p, tag, deg) {
                        let x = MilnorElement::symbol(prof, tag, m).scale(HMono::new(0, (prof.kind == Kind::Complex) as u16), 1);
                        let dl = st.decompose_left_an(&x).unwrap();
                        assert_eq!(recombine_left(&st, tag, &dl), x, "{prof} {m}");
                        let dr = st.decompose_right_an1(&x).unwrap();
                        assert_eq!(recombine_right(&st, tag, &dr), x, "{prof} {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn right_decomposition_examples() {
        let t = Profile::trivial(2);
        let st = Steenrod::new(t);
        for (e, r) in [(0u8, -3), (1, 2), (0, 0), (1, -5)] {
            let x = MilnorElement::symbol(t, Tag::Bn(2), bp(2, e, r));
            assert_eq!(st.decompose_right_an1(&x).unwrap(), vec![((e, r as i64), MilnorElement::one(t, Tag::An(1)))]);
        }
        // dual of tau_1 xi_1^{-1}: leading term carries Q_0 on the right
        let x = MilnorElement::symbol(t, Tag::Bn(1), Mono::from_lists(2, &[0, 1], &[-1]));
        let dec = st.decompose_right_an1(&x).unwrap();
        assert!(dec.iter().any(|(_, b)| b.terms.keys().any(|(m, _)| *m == q(2, 0))), "{dec:?}");
        assert_eq!(recombine_right(&st, Tag::Bn(1), &dec), x);
        // right linearity
        let b = el(&st, "Sq1", 0);
        let x = MilnorElement::symbol(t, Tag::Bn(1), bp(2, 0, -2));
        let xb = st.act_right(&x, &b).unwrap();
        let dec = st.decompose_right_an1(&xb).unwrap();
        assert_eq!(dec, vec![((0, -2), b)]);
    }
}
