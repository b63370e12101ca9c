//! The dual motivic Steenrod algebra, its quotients A(n), C(n) and the localizations
//! B(n), as polynomial algebras over H_{*,*} on tau_i and xi_i.
//!
//! Elements are kept in left-normal form: sums of c * h * tau^E xi^R with h a
//! monomial in rho, tau. Tensor products A (x)_H A are normalized so that every
//! H-coefficient sits on the left of the right factor, with the left factor in
//! its right H-basis.

use crate::coeff::{HElement, HMono, Kind, Profile};
use crate::fp::Fp;
use crate::Error;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

/// Number of tau / xi generators tracked.
pub const NGEN: usize = 8;

pub fn pow(p: u32, k: u32) -> i64 {
    (p as i64).pow(k)
}

pub fn tau_bideg(p: u32, i: usize) -> (i32, i32) {
    let q = pow(p, i as u32) as i32;
    (2 * q - 1, q - 1)
}

pub fn xi_bideg(p: u32, i: usize) -> (i32, i32) {
    let q = pow(p, i as u32) as i32;
    (2 * q - 2, q - 1)
}

/// tau^E xi^R. `r[s-1]` is the exponent of xi_s. Ordered by (deg, wt, E, R).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub deg: i32,
    pub wt: i32,
    pub e: u16,
    pub r: [i32; NGEN],
}

impl Mono {
    pub const ONE: Mono = Mono { deg: 0, wt: 0, e: 0, r: [0; NGEN] };

    pub fn new(p: u32, e: u16, r: [i32; NGEN]) -> Mono {
        let mut deg = 0;
        let mut wt = 0;
        for i in 0..NGEN {
            if e >> i & 1 == 1 {
                let (d, w) = tau_bideg(p, i);
                deg += d;
                wt += w;
            }
            if r[i] != 0 {
                let (d, w) = xi_bideg(p, i + 1);
                deg += d * r[i];
                wt += w * r[i];
            }
        }
        Mono { deg, wt, e, r }
    }
    pub fn from_lists(p: u32, e: &[u8], r: &[i32]) -> Mono {
        let mut eb = 0u16;
        for (i, &x) in e.iter().enumerate() {
            if x != 0 {
                eb |= 1 << i;
            }
        }
        let mut rr = [0; NGEN];
        rr[..r.len()].copy_from_slice(r);
        Mono::new(p, eb, rr)
    }
    pub fn tau(p: u32, i: usize) -> Mono {
        Mono::new(p, 1 << i, [0; NGEN])
    }
    pub fn xi(p: u32, i: usize, k: i32) -> Mono {
        let mut r = [0; NGEN];
        r[i - 1] = k;
        Mono::new(p, 0, r)
    }
    pub fn has_tau(&self, i: usize) -> bool {
        self.e >> i & 1 == 1
    }
    pub fn ntau(&self) -> u32 {
        self.e.count_ones()
    }
    /// Multiply by xi_i^k (no relations involved).
    pub fn times_xi(&self, p: u32, i: usize, k: i32) -> Mono {
        let (d, w) = xi_bideg(p, i);
        let mut m = *self;
        m.r[i - 1] += k;
        m.deg += d * k;
        m.wt += w * k;
        m
    }
    pub fn without_tau(&self, p: u32, i: usize) -> Mono {
        let (d, w) = tau_bideg(p, i);
        let mut m = *self;
        m.e &= !(1 << i);
        m.deg -= d;
        m.wt -= w;
        m
    }
    pub fn with_tau(&self, p: u32, i: usize) -> Mono {
        let (d, w) = tau_bideg(p, i);
        let mut m = *self;
        m.e |= 1 << i;
        m.deg += d;
        m.wt += w;
        m
    }
    pub fn is_one(&self) -> bool {
        self.e == 0 && self.r.iter().all(|&x| x == 0)
    }
    pub fn e_list(&self) -> Vec<u8> {
        let top = (0..NGEN).rev().find(|&i| self.has_tau(i)).map(|i| i + 1).unwrap_or(0);
        (0..top).map(|i| (self.e >> i & 1) as u8).collect()
    }
    pub fn r_list(&self) -> Vec<i32> {
        let top = (0..NGEN).rev().find(|&i| self.r[i] != 0).map(|i| i + 1).unwrap_or(0);
        self.r[..top].to_vec()
    }
    pub fn bideg(&self) -> (i32, i32) {
        (self.deg, self.wt)
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for i in 0..NGEN {
            if self.has_tau(i) {
                parts.push(format!("t{i}"));
            }
        }
        for i in 0..NGEN {
            match self.r[i] {
                0 => {}
                1 => parts.push(format!("x{}", i + 1)),
                k => parts.push(format!("x{}^{}", i + 1, k)),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Which algebra a dual element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Full,
    An(i32),
    Cn(i32),
    Bn(i32),
}

impl Tag {
    /// Is the monomial one of the basis monomials of this algebra?
    pub fn keeps(&self, p: u32, m: &Mono) -> bool {
        match *self {
            Tag::Full => true,
            Tag::An(n) => {
                if n < 0 {
                    return m.is_one();
                }
                let n = n as usize;
                if (m.e >> (n + 1)) != 0 {
                    return false;
                }
                for s in 1..=NGEN {
                    let r = m.r[s - 1];
                    if r < 0 {
                        return false;
                    }
                    if s > n {
                        if r != 0 {
                            return false;
                        }
                    } else if r as i64 >= pow(p, (n + 1 - s) as u32) {
                        return false;
                    }
                }
                true
            }
            Tag::Cn(n) | Tag::Bn(n) => {
                let n = n.max(0) as usize;
                if (m.e >> (n + 1)) != 0 {
                    return false;
                }
                if matches!(self, Tag::Cn(_)) && m.r[0] < 0 {
                    return false;
                }
                for s in 2..=NGEN {
                    let r = m.r[s - 1];
                    if r < 0 {
                        return false;
                    }
                    if s > n {
                        if r != 0 {
                            return false;
                        }
                    } else if r as i64 >= pow(p, (n + 1 - s) as u32) {
                        return false;
                    }
                }
                true
            }
        }
    }

    pub fn n(&self) -> Option<i32> {
        match *self {
            Tag::Full => None,
            Tag::An(n) | Tag::Cn(n) | Tag::Bn(n) => Some(n),
        }
    }

    /// Is there a canonical projection from self onto `target`?
    pub fn projects_to(&self, target: &Tag) -> bool {
        use Tag::*;
        match (*self, *target) {
            (Full, _) => !matches!(target, Bn(_)),
            (An(n), An(m)) => m <= n,
            (Cn(n), An(m)) => m <= n,
            (Cn(n), Cn(m)) => m <= n,
            (Bn(n), Bn(m)) => m <= n,
            _ => false,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Full => write!(f, "A"),
            Tag::An(n) => write!(f, "A({n})"),
            Tag::Cn(n) => write!(f, "C({n})"),
            Tag::Bn(n) => write!(f, "B({n})"),
        }
    }
}

/// Left-normal linear combination: (monomial, H-coefficient) -> F_l scalar.
pub type Lin = BTreeMap<(Mono, HMono), u32>;
/// Tensor normal form: (left, right, H-coefficient of the right factor) -> scalar.
pub type Tensor = BTreeMap<(Mono, Mono, HMono), u32>;
/// Triple tensor normal form, all H-coefficients on the rightmost factor.
pub type Tensor3 = BTreeMap<(Mono, Mono, Mono, HMono), u32>;

pub fn lin_add<K: Ord>(f: Fp, map: &mut BTreeMap<K, u32>, k: K, c: u32) {
    let c = c % f.p;
    if c == 0 {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(k) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = f.add(*o.get(), c);
            if s == 0 {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

pub fn lin_scale<K: Ord + Clone>(f: Fp, map: &BTreeMap<K, u32>, c: u32) -> BTreeMap<K, u32> {
    let mut out = BTreeMap::new();
    for (k, &v) in map {
        lin_add(f, &mut out, k.clone(), f.mul(v, c));
    }
    out
}

pub fn lin_sum<K: Ord + Clone>(f: Fp, a: &BTreeMap<K, u32>, b: &BTreeMap<K, u32>, cb: u32) -> BTreeMap<K, u32> {
    let mut out = a.clone();
    for (k, &v) in b {
        lin_add(f, &mut out, k.clone(), f.mul(v, cb));
    }
    out
}

/// An element of one of the dual algebras.
#[derive(Clone, PartialEq, Eq)]
pub struct DualElement {
    pub profile: Profile,
    pub tag: Tag,
    pub terms: Lin,
}

impl DualElement {
    pub fn zero(profile: Profile, tag: Tag) -> DualElement {
        DualElement { profile, tag, terms: Lin::new() }
    }
    pub fn mono(profile: Profile, tag: Tag, m: Mono) -> DualElement {
        let mut terms = Lin::new();
        terms.insert((m, HMono::ONE), 1 % profile.prime);
        DualElement { profile, tag, terms }
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add(&self, o: &DualElement) -> DualElement {
        DualElement { profile: self.profile, tag: self.tag, terms: lin_sum(self.profile.fp(), &self.terms, &o.terms, 1) }
    }
    pub fn sub(&self, o: &DualElement) -> DualElement {
        let f = self.profile.fp();
        DualElement { profile: self.profile, tag: self.tag, terms: lin_sum(f, &self.terms, &o.terms, f.neg(1)) }
    }
    pub fn scale_h(&self, h: HMono, c: u32) -> DualElement {
        let f = self.profile.fp();
        let mut terms = Lin::new();
        for (&(m, k), &v) in &self.terms {
            let hk = h.mul(k);
            if self.profile.allows(hk) {
                lin_add(f, &mut terms, (m, hk), f.mul(v, c));
            }
        }
        DualElement { profile: self.profile, tag: self.tag, terms }
    }
}

fn fmt_lin(f: Fp, terms: &Lin, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if terms.is_empty() {
        return write!(out, "0");
    }
    let mut first = true;
    for (&(m, h), &c) in terms {
        let c = f.signed(c);
        let sep = if first {
            if c < 0 {
                "-"
            } else {
                ""
            }
        } else if c < 0 {
            " - "
        } else {
            " + "
        };
        first = false;
        write!(out, "{sep}")?;
        let a = c.abs();
        let mut parts = Vec::new();
        if a != 1 {
            parts.push(a.to_string());
        }
        if !h.is_one() {
            parts.push(h.to_string());
        }
        if !m.is_one() || parts.is_empty() {
            parts.push(m.to_string());
        }
        write!(out, "{}", parts.join("*"))?;
    }
    Ok(())
}

impl fmt::Display for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_lin(self.profile.fp(), &self.terms, f)
    }
}

impl fmt::Debug for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} @ {}", self.tag)
    }
}

type TermVec = Rc<Vec<(Mono, HMono, u32)>>;

/// Computation context for one profile: caches products, right units,
/// right-basis rewrites, coproducts and conjugates.
pub struct Dual {
    pub profile: Profile,
    pub f: Fp,
    pub p: u32,
    mul_cache: RefCell<HashMap<(Mono, Mono), TermVec>>,
    eta_cache: RefCell<HashMap<HMono, Rc<Lin>>>,
    rb_cache: RefCell<HashMap<(Mono, HMono), TermVec>>,
    psi_cache: RefCell<HashMap<(Mono, Tag, Tag), Rc<Tensor>>>,
    chi_cache: RefCell<HashMap<(usize, bool), Rc<Lin>>>,
}

impl Dual {
    pub fn new(profile: Profile) -> Dual {
        Dual {
            profile,
            f: profile.fp(),
            p: profile.prime,
            mul_cache: RefCell::new(HashMap::new()),
            eta_cache: RefCell::new(HashMap::new()),
            rb_cache: RefCell::new(HashMap::new()),
            psi_cache: RefCell::new(HashMap::new()),
            chi_cache: RefCell::new(HashMap::new()),
        }
    }

    fn odd(&self) -> bool {
        self.p != 2
    }

    /// m * tau_i in left-normal form.
    fn times_tau(&self, m: Mono, i: usize, out: &mut Vec<(Mono, HMono, u32)>, h: HMono, c: u32) {
        assert!(i < NGEN, "tau index out of range");
        if !m.has_tau(i) {
            let above = (m.e >> (i + 1)).count_ones() as i64;
            let s = if self.odd() { self.f.sign(above) } else { 1 };
            out.push((m.with_tau(self.p, i), h, self.f.mul(c, s)));
            return;
        }
        if self.odd() || self.profile.kind == Kind::Trivial {
            return;
        }
        // tau_i^2 = tau xi_{i+1} + rho tau_{i+1} + rho tau_0 xi_{i+1}
        let rest = m.without_tau(self.p, i);
        let rx = rest.times_xi(self.p, i + 1, 1);
        out.push((rx, h.mul(HMono::TAU), c));
        if self.profile.kind == Kind::Real {
            let hr = h.mul(HMono::RHO);
            self.times_tau(rest, i + 1, out, hr, c);
            self.times_tau(rx, 0, out, hr, c);
        }
    }

    /// Product of two monomials in left-normal form (no projection).
    pub fn mul_mono(&self, a: Mono, b: Mono) -> TermVec {
        if let Some(v) = self.mul_cache.borrow().get(&(a, b)) {
            return v.clone();
        }
        let mut base = a;
        for s in 0..NGEN {
            if b.r[s] != 0 {
                base = base.times_xi(self.p, s + 1, b.r[s]);
            }
        }
        let mut cur = vec![(base, HMono::ONE, 1u32)];
        for i in 0..NGEN {
            if b.has_tau(i) {
                let mut next = Vec::new();
                for &(m, h, c) in &cur {
                    self.times_tau(m, i, &mut next, h, c);
                }
                cur = next;
            }
        }
        let mut acc = Lin::new();
        for (m, h, c) in cur {
            if self.profile.allows(h) {
                lin_add(self.f, &mut acc, (m, h), c);
            }
        }
        let v: TermVec = Rc::new(acc.into_iter().map(|((m, h), c)| (m, h, c)).collect());
        self.mul_cache.borrow_mut().insert((a, b), v.clone());
        v
    }

    /// Product of left-normal combinations, projected to `tag`.
    pub fn mul_lin(&self, x: &Lin, y: &Lin, tag: Tag) -> Lin {
        let mut out = Lin::new();
        for (&(m1, h1), &c1) in x {
            for (&(m2, h2), &c2) in y {
                let h12 = h1.mul(h2);
                if !self.profile.allows(h12) {
                    continue;
                }
                let c12 = self.f.mul(c1, c2);
                for &(m, h, c) in self.mul_mono(m1, m2).iter() {
                    let hh = h.mul(h12);
                    if self.profile.allows(hh) && tag.keeps(self.p, &m) {
                        lin_add(self.f, &mut out, (m, hh), self.f.mul(c, c12));
                    }
                }
            }
        }
        out
    }

    pub fn one_lin(&self) -> Lin {
        let mut l = Lin::new();
        l.insert((Mono::ONE, HMono::ONE), 1);
        l
    }

    pub fn mono_lin(&self, m: Mono, h: HMono, c: u32) -> Lin {
        let mut l = Lin::new();
        lin_add(self.f, &mut l, (m, h), c);
        l
    }

    /// eta_R(rho^a tau^b), left-normal, in the full algebra.
    pub fn eta_r_mono(&self, h: HMono) -> Rc<Lin> {
        if let Some(v) = self.eta_cache.borrow().get(&h) {
            return v.clone();
        }
        let res = if self.profile.kind != Kind::Real || h.b == 0 {
            self.mono_lin(Mono::ONE, h, 1)
        } else {
            let prev = self.eta_r_mono(HMono::new(h.a, h.b - 1));
            let mut step = self.mono_lin(Mono::ONE, HMono::TAU, 1);
            lin_add(self.f, &mut step, (Mono::tau(self.p, 0), HMono::RHO), 1);
            self.mul_lin(&prev, &step, Tag::Full)
        };
        let rc = Rc::new(res);
        self.eta_cache.borrow_mut().insert(h, rc.clone());
        rc
    }

    /// h * m rewritten as sum of m' * eta_R(h').
    pub fn right_basis_term(&self, m: Mono, h: HMono) -> TermVec {
        if self.profile.kind != Kind::Real || h.b == 0 {
            return Rc::new(vec![(m, h, 1)]);
        }
        if let Some(v) = self.rb_cache.borrow().get(&(m, h)) {
            return v.clone();
        }
        let mut rem = self.mono_lin(m, h, 1);
        let mut out = Vec::new();
        let mono_m = |mm: Mono| self.mono_lin(mm, HMono::ONE, 1);
        while let Some((&(mm, hh), &c)) = rem.iter().next() {
            out.push((mm, hh, c));
            let t = self.mul_lin(&mono_m(mm), &self.eta_r_mono(hh), Tag::Full);
            rem = lin_sum(self.f, &rem, &t, self.f.neg(c));
        }
        let v = Rc::new(out);
        self.rb_cache.borrow_mut().insert((m, h), v.clone());
        v
    }

    /// x = sum m_i * eta_R(h_i).
    pub fn to_right_basis_lin(&self, x: &Lin) -> Vec<(Mono, HMono, u32)> {
        let mut acc: BTreeMap<(Mono, HMono), u32> = BTreeMap::new();
        for (&(m, h), &c) in x {
            for &(m2, h2, c2) in self.right_basis_term(m, h).iter() {
                lin_add(self.f, &mut acc, (m2, h2), self.f.mul(c, c2));
            }
        }
        acc.into_iter().map(|((m, h), c)| (m, h, c)).collect()
    }

    /// sum m_i * eta_R(h_i) back to left-normal form.
    pub fn from_right_basis(&self, terms: &[(Mono, HMono, u32)], tag: Tag) -> Lin {
        let mut out = Lin::new();
        for &(m, h, c) in terms {
            let t = self.mul_lin(&self.mono_lin(m, HMono::ONE, c), &self.eta_r_mono(h), tag);
            out = lin_sum(self.f, &out, &t, 1);
        }
        out
    }

    /// Add c * (h_l m) (x) (h_r n) into a normalized tensor, projecting by (ql, qr).
    pub fn tensor_push(&self, t: &mut Tensor, m: Mono, h_l: HMono, n: Mono, h_r: HMono, c: u32, ql: Tag, qr: Tag) {
        if !qr.keeps(self.p, &n) {
            return;
        }
        for &(m2, k, c2) in self.right_basis_term(m, h_l).iter() {
            if !ql.keeps(self.p, &m2) {
                continue;
            }
            let hh = k.mul(h_r);
            if self.profile.allows(hh) {
                lin_add(self.f, t, (m2, n, hh), self.f.mul(c, c2));
            }
        }
    }

    pub fn tensor_mul(&self, a: &Tensor, b: &Tensor, ql: Tag, qr: Tag) -> Tensor {
        let mut out = Tensor::new();
        for (&(l1, r1, h1), &c1) in a {
            for (&(l2, r2, h2), &c2) in b {
                let s = if self.odd() { self.f.sign(r1.deg as i64 * l2.deg as i64) } else { 1 };
                let c12 = self.f.mul(self.f.mul(c1, c2), s);
                let h12 = h1.mul(h2);
                let left = self.mul_mono(l1, l2);
                let right = self.mul_mono(r1, r2);
                for &(m, k, d) in left.iter() {
                    for &(n, g, e) in right.iter() {
                        let hr = h12.mul(g);
                        if !self.profile.allows(hr) {
                            continue;
                        }
                        self.tensor_push(&mut out, m, k, n, hr, self.f.mul(c12, self.f.mul(d, e)), ql, qr);
                    }
                }
            }
        }
        out
    }

    fn psi_gen(&self, m: Mono, ql: Tag, qr: Tag) -> Tensor {
        let p = self.p;
        let mut t = Tensor::new();
        let one = Mono::ONE;
        if m.e != 0 {
            let k = m.e.trailing_zeros() as usize;
            self.tensor_push(&mut t, m, HMono::ONE, one, HMono::ONE, 1, ql, qr);
            for j in 0..=k {
                let i = k - j;
                let left = if i == 0 { one } else { Mono::xi(p, i, pow(p, j as u32) as i32) };
                self.tensor_push(&mut t, left, HMono::ONE, Mono::tau(p, j), HMono::ONE, 1, ql, qr);
            }
        } else {
            let k = m.r.iter().position(|&x| x != 0).unwrap() + 1;
            for j in 0..=k {
                let i = k - j;
                let left = if i == 0 { one } else { Mono::xi(p, i, pow(p, j as u32) as i32) };
                let right = if j == 0 { one } else { Mono::xi(p, j, 1) };
                self.tensor_push(&mut t, left, HMono::ONE, right, HMono::ONE, 1, ql, qr);
            }
        }
        t
    }

    /// (ql (x) qr) psi(m) for a monomial with r_1 >= 0.
    pub fn psi_mono(&self, m: Mono, ql: Tag, qr: Tag) -> Rc<Tensor> {
        if let Some(v) = self.psi_cache.borrow().get(&(m, ql, qr)) {
            return v.clone();
        }
        assert!(m.r[0] >= 0, "coproduct of a monomial with negative xi_1 exponent");
        let res = if m.is_one() {
            let mut t = Tensor::new();
            t.insert((Mono::ONE, Mono::ONE, HMono::ONE), 1);
            t
        } else {
            let (rest, g) = split_last(self.p, m);
            if rest.is_one() {
                self.psi_gen(g, ql, qr)
            } else {
                let a = self.psi_mono(rest, ql, qr);
                let b = self.psi_mono(g, ql, qr);
                self.tensor_mul(&a, &b, ql, qr)
            }
        };
        let rc = Rc::new(res);
        self.psi_cache.borrow_mut().insert((m, ql, qr), rc.clone());
        rc
    }

    /// psi of a left-normal combination, psi(h x) = (h (x) 1) psi(x).
    pub fn psi_lin(&self, x: &Lin, ql: Tag, qr: Tag) -> Tensor {
        let mut out = Tensor::new();
        for (&(m, h), &c) in x {
            let t = self.psi_mono(m, ql, qr);
            for (&(l, r, k), &d) in t.iter() {
                self.tensor_push(&mut out, l, h, r, k, self.f.mul(c, d), ql, qr);
            }
        }
        out
    }

    fn chi_gen(&self, i: usize, is_tau: bool) -> Rc<Lin> {
        if let Some(v) = self.chi_cache.borrow().get(&(i, is_tau)) {
            return v.clone();
        }
        let p = self.p;
        let f = self.f;
        let mut acc = Lin::new();
        if is_tau {
            lin_add(f, &mut acc, (Mono::tau(p, i), HMono::ONE), f.neg(1));
        }
        for s in 1..=i {
            let j = i - s;
            if !is_tau && j == 0 {
                let x = self.mono_lin(Mono::xi(p, s, pow(p, j as u32) as i32), HMono::ONE, 1);
                acc = lin_sum(f, &acc, &x, f.neg(1));
                continue;
            }
            let xi = self.mono_lin(Mono::xi(p, s, pow(p, j as u32) as i32), HMono::ONE, 1);
            let prod = self.mul_lin(&xi, &self.chi_gen(j, is_tau), Tag::Full);
            acc = lin_sum(f, &acc, &prod, f.neg(1));
        }
        let rc = Rc::new(acc);
        self.chi_cache.borrow_mut().insert((i, is_tau), rc.clone());
        rc
    }

    pub fn chi_mono(&self, m: Mono, tag: Tag) -> Lin {
        let mut acc = self.one_lin();
        for i in 0..NGEN {
            if m.has_tau(i) {
                acc = self.mul_lin(&acc, &self.chi_gen(i, true), tag);
            }
        }
        for s in 1..=NGEN {
            for _ in 0..m.r[s - 1] {
                acc = self.mul_lin(&acc, &self.chi_gen(s, false), tag);
            }
        }
        acc
    }

    pub fn chi_lin(&self, x: &Lin, tag: Tag) -> Lin {
        let mut out = Lin::new();
        for (&(m, h), &c) in x {
            let t = self.mul_lin(&self.eta_r_mono(h), &self.chi_mono(m, tag), tag);
            out = lin_sum(self.f, &out, &t, c);
        }
        out
    }

    // ---- element-level operations ----

    fn check(&self, x: &DualElement) -> Result<(), Error> {
        if x.profile != self.profile {
            return Err(Error::ProfileMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, x: &DualElement, y: &DualElement) -> Result<DualElement, Error> {
        self.check(x)?;
        self.check(y)?;
        if x.tag != y.tag {
            return Err(Error::TagMismatch(x.tag.to_string(), y.tag.to_string()));
        }
        Ok(DualElement { profile: self.profile, tag: x.tag, terms: self.mul_lin(&x.terms, &y.terms, x.tag) })
    }

    pub fn eta_right(&self, h: &HElement) -> DualElement {
        let terms = if h.coeff == 0 { Lin::new() } else { lin_scale(self.f, &self.eta_r_mono(h.mono), h.coeff) };
        DualElement { profile: self.profile, tag: Tag::Full, terms }
    }

    pub fn counit(&self, x: &DualElement) -> HElement {
        let terms: Vec<(HMono, u32)> =
            x.terms.iter().filter(|((m, _), _)| m.is_one()).map(|(&(_, h), &c)| (h, c)).collect();
        HElement::from_terms(self.profile, &terms).unwrap_or_else(|_| HElement::zero(self.profile))
    }

    pub fn to_right_basis(&self, x: &DualElement) -> Vec<(Mono, HElement)> {
        self.to_right_basis_lin(&x.terms)
            .into_iter()
            .map(|(m, h, c)| (m, HElement { profile: self.profile, mono: h, coeff: c }))
            .collect()
    }

    pub fn coproduct(&self, x: &DualElement) -> Result<Tensor, Error> {
        self.check(x)?;
        match x.tag {
            Tag::Full | Tag::An(_) => Ok(self.psi_lin(&x.terms, x.tag, x.tag)),
            t => Err(Error::Unsupported(format!("coproduct on {t}"))),
        }
    }

    pub fn conjugate(&self, x: &DualElement) -> Result<DualElement, Error> {
        self.check(x)?;
        match x.tag {
            Tag::Full | Tag::An(_) => {
                Ok(DualElement { profile: self.profile, tag: x.tag, terms: self.chi_lin(&x.terms, x.tag) })
            }
            t => Err(Error::Unsupported(format!("conjugation on {t}"))),
        }
    }

    pub fn project(&self, x: &DualElement, target: Tag) -> Result<DualElement, Error> {
        if !x.tag.projects_to(&target) {
            return Err(Error::Unsupported(format!("no projection {} -> {}", x.tag, target)));
        }
        let terms = x.terms.iter().filter(|((m, _), _)| target.keeps(self.p, m)).map(|(k, v)| (*k, *v)).collect();
        Ok(DualElement { profile: self.profile, tag: target, terms })
    }

    /// alpha_n: keep monomials with e_0..e_n = 0 and l^{n+1-s} | r_s for s <= n.
    pub fn xn_project(&self, x: &DualElement, n: i32) -> DualElement {
        let p = self.p;
        let keep = |m: &Mono| xn_keeps(p, n, m);
        let terms = x.terms.iter().filter(|((m, _), _)| keep(m)).map(|(k, v)| (*k, *v)).collect();
        DualElement { profile: self.profile, tag: Tag::Full, terms }
    }

    /// Left A(n)-coaction on C(n) or B(n).
    pub fn coact_left_mono(&self, m: Mono, n: i32, tag: Tag) -> Tensor {
        let ql = Tag::An(n);
        let qr = match tag {
            Tag::Bn(_) => Tag::Cn(n),
            t => t,
        };
        if m.r[0] >= 0 {
            let t = self.psi_mono(m, ql, qr);
            if let Tag::Bn(_) = tag {
                return t.iter().map(|(&(l, r, h), &c)| ((l, r, h), c)).collect();
            }
            return (*t).clone();
        }
        let step = pow(self.p, n as u32) as i32;
        let k = (-m.r[0] + step - 1) / step;
        let shift = k * step;
        let m2 = m.times_xi(self.p, 1, shift);
        let t = self.psi_mono(m2, ql, qr);
        let mut out = Tensor::new();
        for (&(l, r, h), &c) in t.iter() {
            lin_add(self.f, &mut out, (l, r.times_xi(self.p, 1, -shift), h), c);
        }
        out
    }

    /// Right A(n-1)-coaction on C(n) or B(n).
    pub fn coact_right_mono(&self, m: Mono, n: i32, tag: Tag) -> Tensor {
        let qr = Tag::An(n - 1);
        let ql = match tag {
            Tag::Bn(_) => Tag::Cn(n),
            t => t,
        };
        if m.r[0] >= 0 {
            return (*self.psi_mono(m, ql, qr)).clone();
        }
        let step = pow(self.p, n as u32) as i32;
        let k = (-m.r[0] + step - 1) / step;
        let shift = k * step;
        let m2 = m.times_xi(self.p, 1, shift);
        let t = self.psi_mono(m2, ql, qr);
        let mut out = Tensor::new();
        for (&(l, r, h), &c) in t.iter() {
            lin_add(self.f, &mut out, (l.times_xi(self.p, 1, -shift), r, h), c);
        }
        out
    }

    pub fn coact_left(&self, x: &DualElement) -> Result<Tensor, Error> {
        let n = match x.tag {
            Tag::Cn(n) | Tag::Bn(n) => n,
            t => return Err(Error::Unsupported(format!("left coaction on {t}"))),
        };
        let mut out = Tensor::new();
        for (&(m, h), &c) in &x.terms {
            for (&(l, r, k), &d) in self.coact_left_mono(m, n, x.tag).iter() {
                self.tensor_push(&mut out, l, h, r, k, self.f.mul(c, d), Tag::An(n), x.tag);
            }
        }
        Ok(out)
    }

    pub fn coact_right(&self, x: &DualElement) -> Result<Tensor, Error> {
        let n = match x.tag {
            Tag::Cn(n) | Tag::Bn(n) => n,
            t => return Err(Error::Unsupported(format!("right coaction on {t}"))),
        };
        let mut out = Tensor::new();
        for (&(m, h), &c) in &x.terms {
            for (&(l, r, k), &d) in self.coact_right_mono(m, n, x.tag).iter() {
                self.tensor_push(&mut out, l, h, r, k, self.f.mul(c, d), x.tag, Tag::An(n - 1));
            }
        }
        Ok(out)
    }

    /// Basis monomials of `tag` in topological degree `deg`.
    pub fn basis(&self, tag: Tag, deg: i32) -> Vec<Mono> {
        basis(self.p, tag, deg)
    }

    /// The triple-tensor expansions (psi (x) id) psi and (id (x) psi) psi of a monomial.
    pub fn coassoc_sides(&self, m: Mono, q: Tag) -> (Tensor3, Tensor3) {
        let f = self.f;
        let t = self.psi_mono(m, q, q);
        let mut lhs = Tensor3::new();
        let mut rhs = Tensor3::new();
        for (&(l, r, h), &c) in t.iter() {
            // (psi (x) id): psi(l) (x) h r
            for (&(a, b, k), &d) in self.psi_mono(l, q, q).iter() {
                // a (x) k b (x) h r: move k across b
                for &(b2, k2, e) in self.right_basis_term(b, k).iter() {
                    if !q.keeps(self.p, &b2) {
                        continue;
                    }
                    let hh = k2.mul(h);
                    if self.profile.allows(hh) {
                        lin_add(f, &mut lhs, (a, b2, r, hh), f.mul(c, f.mul(d, e)));
                    }
                }
            }
            // (id (x) psi): l (x) h psi(r) = l (x) (h r1) (x) k r2
            for (&(r1, r2, k), &d) in self.psi_mono(r, q, q).iter() {
                for &(r1b, k2, e) in self.right_basis_term(r1, h).iter() {
                    if !q.keeps(self.p, &r1b) {
                        continue;
                    }
                    let hh = k2.mul(k);
                    if self.profile.allows(hh) {
                        lin_add(f, &mut rhs, (l, r1b, r2, hh), f.mul(c, f.mul(d, e)));
                    }
                }
            }
        }
        (lhs, rhs)
    }

    /// phi (chi (x) id) psi and phi (id (x) chi) psi of a monomial.
    pub fn antipode_sides(&self, m: Mono, q: Tag) -> (Lin, Lin) {
        let f = self.f;
        let t = self.psi_mono(m, q, q);
        let mut a = Lin::new();
        let mut b = Lin::new();
        for (&(l, r, h), &c) in t.iter() {
            // chi(l) * h * r
            let hr = self.mono_lin(r, h, c);
            let x = self.mul_lin(&self.chi_mono(l, q), &hr, q);
            a = lin_sum(f, &a, &x, 1);
            // l * chi(h r) = l * eta_R(h) chi(r)
            let y = self.mul_lin(&self.mono_lin(l, HMono::ONE, c), &self.chi_lin(&self.mono_lin(r, h, 1), q), q);
            b = lin_sum(f, &b, &y, 1);
        }
        (a, b)
    }
}

pub fn xn_keeps(p: u32, n: i32, m: &Mono) -> bool {
    for s in 0..=(n.max(-1)) {
        if m.has_tau(s as usize) {
            return false;
        }
    }
    for s in 1..=n.max(0) as usize {
        if n < 1 {
            break;
        }
        let d = pow(p, (n as usize + 1 - s) as u32);
        if (m.r[s - 1] as i64).rem_euclid(d) != 0 {
            return false;
        }
    }
    true
}

/// Split off the last generator: m = rest * g with coefficient exactly 1.
pub fn split_last(p: u32, m: Mono) -> (Mono, Mono) {
    for s in (1..=NGEN).rev() {
        if m.r[s - 1] > 0 {
            return (m.times_xi(p, s, -1), Mono::xi(p, s, 1));
        }
    }
    let j = (0..NGEN).rev().find(|&i| m.has_tau(i)).expect("split of unit");
    (m.without_tau(p, j), Mono::tau(p, j))
}

fn basis_rec(p: u32, tag: Tag, deg: i32, gens: &[(bool, usize, i32)], idx: usize, cur: Mono, out: &mut Vec<Mono>) {
    if idx == gens.len() {
        if cur.deg == deg && tag.keeps(p, &cur) {
            out.push(cur);
        }
        return;
    }
    let (is_tau, i, d) = gens[idx];
    let left = deg - cur.deg;
    if is_tau {
        basis_rec(p, tag, deg, gens, idx + 1, cur, out);
        if d <= left {
            basis_rec(p, tag, deg, gens, idx + 1, cur.with_tau(p, i), out);
        }
    } else {
        let mut k = 0;
        let mut m = cur;
        while k * d <= left {
            if !tag.keeps(p, &m) && k > 0 {
                break;
            }
            basis_rec(p, tag, deg, gens, idx + 1, m, out);
            m = m.times_xi(p, i, 1);
            k += 1;
        }
    }
}

/// All basis monomials of `tag` in topological degree `deg`, sorted.
pub fn basis(p: u32, tag: Tag, deg: i32) -> Vec<Mono> {
    let mut out = Vec::new();
    match tag {
        Tag::Bn(n) => {
            // enumerate everything except xi_1, then solve for r_1
            let n = n.max(0) as usize;
            let mut gens = Vec::new();
            for i in 0..=n {
                gens.push((true, i, tau_bideg(p, i).0));
            }
            for i in 2..=n {
                gens.push((false, i, xi_bideg(p, i).0));
            }
            let mut partial = Vec::new();
            collect_all(p, &gens, 0, Mono::ONE, &mut partial, Tag::Bn(n as i32));
            let d1 = xi_bideg(p, 1).0;
            for m in partial {
                let rest = deg - m.deg;
                if rest % d1 == 0 {
                    out.push(m.times_xi(p, 1, rest / d1));
                }
            }
        }
        _ => {
            if deg < 0 {
                return out;
            }
            let mut gens = Vec::new();
            for i in 0..NGEN {
                let d = tau_bideg(p, i).0;
                if d <= deg {
                    gens.push((true, i, d));
                }
            }
            for i in 1..=NGEN {
                let d = xi_bideg(p, i).0;
                if d <= deg {
                    gens.push((false, i, d));
                }
            }
            basis_rec(p, tag, deg, &gens, 0, Mono::ONE, &mut out);
        }
    }
    out.sort();
    out
}

fn collect_all(p: u32, gens: &[(bool, usize, i32)], idx: usize, cur: Mono, out: &mut Vec<Mono>, tag: Tag) {
    if idx == gens.len() {
        out.push(cur);
        return;
    }
    let (is_tau, i, _) = gens[idx];
    if is_tau {
        collect_all(p, gens, idx + 1, cur, out, tag);
        collect_all(p, gens, idx + 1, cur.with_tau(p, i), out, tag);
    } else {
        let mut m = cur;
        while tag.keeps(p, &m) {
            collect_all(p, gens, idx + 1, m, out, tag);
            m = m.times_xi(p, i, 1);
        }
    }
}

/// Parse the textual element syntax, e.g. `T*t0*x1^-2 + r*t1`.
pub fn parse_element(profile: Profile, s: &str, tag: Tag) -> Result<DualElement, Error> {
    let p = profile.prime;
    let f = profile.fp();
    let mut terms = Lin::new();
    let cleaned = s.replace(' ', "");
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let chars: Vec<char> = cleaned.chars().collect();
    for (i, &ch) in chars.iter().enumerate() {
        let after_caret = i > 0 && chars[i - 1] == '^';
        if (ch == '+' || ch == '-') && !after_caret {
            if !cur.is_empty() {
                pieces.push((neg, cur.clone()));
                cur.clear();
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
        return Err(Error::Parse("empty element".into()));
    }
    for (neg, piece) in pieces {
        let mut c: u32 = 1;
        let mut h = HMono::ONE;
        let mut e = 0u16;
        let mut r = [0i32; NGEN];
        for factor in piece.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, x)) => (b, x.parse::<i32>().map_err(|_| Error::Parse(format!("bad exponent in '{factor}'")))?),
                None => (factor, 1),
            };
            if base == "0" {
                c = 0;
            } else if base == "1" {
            } else if let Ok(k) = base.parse::<i64>() {
                c = f.mul(c, f.from_i64(k.pow(exp as u32)));
            } else if base == "r" {
                h.a += exp as u16;
            } else if base == "T" {
                h.b += exp as u16;
            } else if let Some(i) = base.strip_prefix('t') {
                let i: usize = i.parse().map_err(|_| Error::Parse(format!("bad generator '{base}'")))?;
                if i >= NGEN || exp != 1 {
                    return Err(Error::Parse(format!("bad tau factor '{factor}'")));
                }
                e |= 1 << i;
            } else if let Some(i) = base.strip_prefix('x') {
                let i: usize = i.parse().map_err(|_| Error::Parse(format!("bad generator '{base}'")))?;
                if i == 0 || i > NGEN {
                    return Err(Error::Parse(format!("bad xi factor '{factor}'")));
                }
                r[i - 1] += exp;
            } else {
                return Err(Error::Parse(format!("unknown factor '{factor}'")));
            }
        }
        if neg {
            c = f.neg(c);
        }
        let m = Mono::new(p, e, r);
        if !tag.keeps(p, &m) && !matches!(tag, Tag::Full) {
            continue;
        }
        if !profile.allows(h) {
            continue;
        }
        lin_add(f, &mut terms, (m, h), c);
    }
    Ok(DualElement { profile, tag, terms })
}

pub fn parse_tag(s: &str) -> Result<Tag, Error> {
    let s = s.trim();
    if s == "A" || s.eq_ignore_ascii_case("full") {
        return Ok(Tag::Full);
    }
    let (head, rest) = s.split_at(1);
    let n: i32 = rest
        .trim_start_matches('(')
        .trim_end_matches(')')
        .parse()
        .map_err(|_| Error::Parse(format!("bad algebra tag '{s}'")))?;
    match head {
        "A" => Ok(Tag::An(n)),
        "C" => Ok(Tag::Cn(n)),
        "B" => Ok(Tag::Bn(n)),
        _ => Err(Error::Parse(format!("bad algebra tag '{s}'"))),
    }
}

pub fn fmt_tensor(f: Fp, t: &Tensor) -> String {
    if t.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (&(l, r, h), &c) in t {
        let c = f.signed(c);
        let coef = if c == 1 { String::new() } else { format!("{c}*") };
        let hh = if h.is_one() { String::new() } else { format!("{h}*") };
        parts.push(format!("{coef}{l}(x){hh}{r}"));
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(d: &Dual, s: &str) -> DualElement {
        parse_element(d.profile, s, Tag::Full).unwrap()
    }

    #[test]
    fn tau0_squared_real() {
        let d = Dual::new(Profile::real());
        let t0 = el(&d, "t0");
        let sq = d.mul(&t0, &t0).unwrap();
        assert_eq!(sq, el(&d, "T*x1 + r*t1 + r*t0*x1"));
    }

    #[test]
    fn tau0_squared_odd_and_trivial() {
        let d = Dual::new(Profile::trivial(3));
        let t0 = el(&d, "t0");
        assert!(d.mul(&t0, &t0).unwrap().is_zero());
        let x1 = el(&d, "x1");
        assert_eq!(d.mul(&x1, &x1).unwrap(), el(&d, "x1^2"));
    }

    #[test]
    fn coproduct_examples() {
        let d = Dual::new(Profile::trivial(2));
        let t = d.coproduct(&el(&d, "t1")).unwrap();
        assert_eq!(fmt_tensor(d.f, &t), "1(x)t1 + x1(x)t0 + t1(x)1");
        let t = d.coproduct(&el(&d, "t0*x1")).unwrap();
        assert_eq!(t.len(), 4);
        let t = d.coproduct(&el(&d, "1")).unwrap();
        assert_eq!(fmt_tensor(d.f, &t), "1(x)1");
    }

    #[test]
    fn conjugation_examples() {
        for p in [2, 3, 5] {
            let d = Dual::new(Profile::trivial(p));
            assert_eq!(d.conjugate(&el(&d, "x1")).unwrap(), el(&d, "-x1"));
            assert_eq!(d.conjugate(&el(&d, "t0")).unwrap(), el(&d, "-t0"));
            let want = el(&d, &format!("-x2 + x1^{}", p + 1));
            assert_eq!(d.conjugate(&el(&d, "x2")).unwrap(), want);
        }
        let d = Dual::new(Profile::real());
        let tau = el(&d, "T");
        let ct = d.conjugate(&tau).unwrap();
        assert_eq!(d.conjugate(&ct).unwrap(), tau);
    }

    #[test]
    fn right_basis_example() {
        let d = Dual::new(Profile::real());
        let x = el(&d, "T*t0");
        let rb = d.to_right_basis(&x);
        let got: Vec<String> = rb.iter().map(|(m, h)| format!("{m}|{h}")).collect();
        assert_eq!(got, vec!["t0|T", "x1|r*T", "t1|r^2"]);
    }

    #[test]
    fn projections() {
        let d = Dual::new(Profile::trivial(2));
        let x = el(&d, "x1^2*t2");
        assert!(d.project(&x, Tag::An(1)).unwrap().is_zero());
        let y = el(&d, "x1^5*t1");
        assert_eq!(d.project(&y, Tag::Cn(1)).unwrap().terms.len(), 1);
        let z = DualElement::mono(d.profile, Tag::Cn(2), Mono::tau(2, 1));
        assert!(d.project(&z, Tag::Cn(0)).unwrap().is_zero());
        assert_eq!(d.xn_project(&el(&d, "x1^2"), 1).terms.len(), 1);
        assert!(d.xn_project(&el(&d, "t0"), 1).is_zero());
        assert!(d.xn_project(&el(&d, "x1"), 1).is_zero());
    }

    #[test]
    fn basis_counts() {
        // A(1) at p = 2 has 8 basis monomials over H
        let total: usize = (0..=6).map(|k| basis(2, Tag::An(1), k).len()).sum();
        assert_eq!(total, 8);
        let total: usize = (0..=40).map(|k| basis(2, Tag::An(2), k).len()).sum();
        assert_eq!(total, 64);
        assert_eq!(basis(2, Tag::Bn(0), -4).len(), 1);
        assert_eq!(basis(2, Tag::Bn(0), -3).len(), 1);
    }
}
