//! Small and large Singer constructions R_S(M) and R_mu(M) over a windowed module M,
//! with their actions, evaluation maps and the identification with localized cohomology.
//! Only central coefficient profiles are supported.

use crate::amod::{band_rule, mvec_add, mvec_gen, mvec_scale, BandKind, FPModule, Gen, MVec};
use crate::coeff::{HMono, Kind, Profile};
use crate::dualalg::{lin_add, Tag};
use crate::fp::{binom, Fp};
use crate::ops::{bp, gen_ops, min_envelope, MilnorElement, Steenrod};
use crate::Error;
use std::collections::BTreeMap;

/// h * (beta^e P^r (x) m_j), keyed by (e, r, j, h).
pub type SElem = BTreeMap<(u8, i64, usize, HMono), u32>;
/// h * (Sigma u^i v^k (x) m_j), keyed by (i, k, j, h).
pub type LElem = BTreeMap<(u8, i64, usize, HMono), u32>;

fn central(profile: &Profile) -> Result<(), Error> {
    if profile.kind == Kind::Real {
        return Err(Error::Unsupported("Singer constructions need central coefficients".into()));
    }
    Ok(())
}

/// beta^e P^r acting on an element of M, for all r >= 0 where M defines it.
pub fn act_bp(st: &Steenrod, m: &FPModule, e: u8, r: i64, x: &MVec) -> Result<MVec, Error> {
    let p = st.p;
    if r < 0 {
        return Ok(MVec::new());
    }
    if let Some(kind) = m.band {
        let f = m.profile.fp();
        let sign = if e == 1 && m.shift.0 % 2 != 0 { f.neg(1) } else { 1 };
        let mut out = MVec::new();
        for (&(g, h), &c) in x {
            let (i, k) = m.gens[g].label.unwrap();
            if let Some((i2, k2, c2)) = band_rule(kind, p, e, r, i, k as i64) {
                if c2 == 0 {
                    continue;
                }
                match m.find(i2, k2 as i32) {
                    Some(t) => lin_add(f, &mut out, (t, h), f.mul(f.mul(c, c2), sign)),
                    None if m.pinned => return Err(Error::OutOfBand(format!("beta^{e}P^{r} on {}", m.gens[g].name))),
                    None => {}
                }
            }
        }
        return Ok(out);
    }
    let op = bp(p, e, r as i32);
    if min_envelope(p, &op) <= m.n {
        return m.act_mono(st, op, x);
    }
    if m.name == "trivial" {
        return Ok(MVec::new());
    }
    Err(Error::Unsupported(format!("beta^{e}P^{r} outside the envelope of {}", m.name)))
}

fn push(f: Fp, out: &mut SElem, e: u8, r: i64, v: &MVec, h: HMono, c: u32, profile: &Profile) {
    if c == 0 {
        return;
    }
    for (&(j, k), &c2) in v {
        let hk = h.mul(k);
        if profile.allows(hk) {
            lin_add(f, out, (e, r, j, hk), f.mul(c, c2));
        }
    }
}

pub struct SingerSmall<'a> {
    pub st: &'a Steenrod,
    pub base: &'a FPModule,
}

impl<'a> SingerSmall<'a> {
    pub fn new(st: &'a Steenrod, base: &'a FPModule) -> Result<SingerSmall<'a>, Error> {
        central(&st.profile)?;
        Ok(SingerSmall { st, base })
    }

    pub fn elem(&self, e: u8, r: i64, j: usize) -> SElem {
        [((e, r, j, HMono::ONE), 1)].into_iter().collect()
    }

    pub fn bideg(&self, e: u8, r: i64, j: usize) -> (i32, i32) {
        let l = self.st.p as i64;
        let g = &self.base.gens[j];
        ((e as i64 + (2 * l - 2) * r) as i32 + g.p, ((l - 1) * r) as i32 + g.q)
    }

    pub fn beta(&self, x: &SElem) -> SElem {
        x.iter().filter(|(k, _)| k.0 == 0).map(|(&(_, r, j, h), &c)| ((1, r, j, h), c)).collect()
    }

    /// P^a on x (Sq^{2a} when l = 2).
    pub fn p_act(&self, a: i64, x: &SElem) -> Result<SElem, Error> {
        let st = self.st;
        let p = st.p;
        let f = st.f;
        let prof = &st.profile;
        let l = p as i64;
        let mut out = SElem::new();
        for (&(e, r, j, h), &c) in x {
            let m = mvec_gen(j);
            if p == 2 {
                let a2 = 2 * a;
                let b = 2 * r + e as i64;
                for jj in 0..=a {
                    if a2 - 2 * jj < 0 {
                        break;
                    }
                    let coef = binom(b - 1 - jj, a2 - 2 * jj, p);
                    if coef == 0 {
                        continue;
                    }
                    let hj = if e == 0 && jj % 2 == 1 { HMono::TAU } else { HMono::ONE };
                    if !prof.allows(hj) {
                        continue;
                    }
                    let n = a2 + b - jj;
                    let mj = act_bp(st, self.base, (jj % 2) as u8, jj / 2, &m)?;
                    push(f, &mut out, n.rem_euclid(2) as u8, n.div_euclid(2), &mj, h.mul(hj), f.mul(c, coef), prof);
                }
            } else if e == 0 {
                for jj in 0..=a / l {
                    let coef = f.mul(f.sign(a + jj), binom((l - 1) * (r - jj) - 1, a - l * jj, p));
                    let mj = act_bp(st, self.base, 0, jj, &m)?;
                    push(f, &mut out, 0, a + r - jj, &mj, h, f.mul(c, coef), prof);
                }
            } else {
                for jj in 0..=a / l {
                    let coef = f.mul(f.sign(a + jj), binom((l - 1) * (r - jj), a - l * jj, p));
                    let mj = act_bp(st, self.base, 0, jj, &m)?;
                    push(f, &mut out, 1, a + r - jj, &mj, h, f.mul(c, coef), prof);
                }
                if a >= 1 {
                    for jj in 0..=(a - 1) / l {
                        let coef = f.mul(f.sign(a + jj - 1), binom((l - 1) * (r - jj) - 1, a - l * jj - 1, p));
                        let mj = act_bp(st, self.base, 1, jj, &m)?;
                        push(f, &mut out, 0, a + r - jj, &mj, h, f.mul(c, coef), prof);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Action of beta^e P^a (for l = 2, Sq^k with k = 2a + e).
    pub fn act_bp(&self, e: u8, a: i64, x: &SElem) -> Result<SElem, Error> {
        let y = self.p_act(a, x)?;
        Ok(if e == 1 { self.beta(&y) } else { y })
    }

    /// Full A(n)-action of a Milnor element through the banded module.
    pub fn act(&self, op: &MilnorElement, x: &SElem, n: i32) -> Result<SElem, Error> {
        let (rmin, rmax) = self.span(x, op)?;
        let md = self.to_module(n, rmin, rmax)?;
        let v = md.act(self.st, op, &self.to_mvec(&md, x))?;
        Ok(self.from_mvec(&md, &v))
    }

    fn span(&self, x: &SElem, op: &MilnorElement) -> Result<(i64, i64), Error> {
        let lo = x.keys().map(|k| k.1).min().unwrap_or(0);
        let hi = x.keys().map(|k| k.1).max().unwrap_or(0);
        let d = op.terms.keys().map(|(m, _)| m.deg as i64).max().unwrap_or(0);
        Ok((lo, hi + d + 1))
    }

    fn index(&self, rmin: i64, e: u8, r: i64, j: usize) -> usize {
        (((r - rmin) * 2 + e as i64) as usize) * self.base.dim() + j
    }

    /// Truncated band r in [rmin, rmax] as an FPModule over A(n).
    pub fn to_module(&self, n: i32, rmin: i64, rmax: i64) -> Result<FPModule, Error> {
        let p = self.st.p;
        let mut gens = Vec::new();
        let mut keys = Vec::new();
        for r in rmin..=rmax {
            for e in 0..2u8 {
                for j in 0..self.base.dim() {
                    let (bp_, bq) = self.bideg(e, r, j);
                    let op = if p == 2 { format!("Sq{}", 2 * r + e as i64) } else if e == 1 { format!("bP{r}") } else { format!("P{r}") };
                    gens.push(Gen { name: format!("{op}|{}", self.base.gens[j].name), p: bp_, q: bq, label: None });
                    keys.push((e, r, j));
                }
            }
        }
        let mut md = FPModule::new(self.st.profile, n, &format!("RS({})", self.base.name), gens);
        let ops: Vec<(u8, i64)> = std::iter::once((1u8, 0i64)).chain((0..n.max(0)).map(|j| (0u8, (p as i64).pow(j as u32)))).collect();
        for (oi, &(e, a)) in ops.iter().enumerate() {
            for (gi, &(e0, r0, j0)) in keys.iter().enumerate() {
                let x = self.elem(e0, r0, j0);
                let y = if e == 1 { self.beta(&x) } else { self.p_act(a, &x)? };
                for (&(e1, r1, j1, h), &c) in &y {
                    if (rmin..=rmax).contains(&r1) {
                        md.table[oi][gi].insert((self.index(rmin, e1, r1, j1), h), c);
                    } else {
                        md.overflow[oi][gi] = true;
                    }
                }
            }
        }
        Ok(md)
    }

    pub fn to_mvec(&self, md: &FPModule, x: &SElem) -> MVec {
        let rmin = self.rmin_of(md);
        x.iter().map(|(&(e, r, j, h), &c)| ((self.index(rmin, e, r, j), h), c)).collect()
    }

    fn rmin_of(&self, md: &FPModule) -> i64 {
        let l = self.st.p as i64;
        let g = &md.gens[0];
        let b = &self.base.gens[0];
        ((g.q - b.q) as i64).div_euclid(l - 1)
    }

    pub fn from_mvec(&self, md: &FPModule, v: &MVec) -> SElem {
        let rmin = self.rmin_of(md);
        let d = self.base.dim();
        v.iter()
            .map(|(&(g, h), &c)| {
                let j = g % d;
                let re = (g / d) as i64;
                ((re.rem_euclid(2) as u8, rmin + re.div_euclid(2), j, h), c)
            })
            .collect()
    }

    /// epsilon(beta^e P^r (x) m) = beta^e P^r(m) for r >= 0, 0 for r < 0.
    pub fn eval_small(&self, x: &SElem) -> Result<MVec, Error> {
        let mut out = MVec::new();
        for (&(e, r, j, h), &c) in x {
            if r < 0 {
                continue;
            }
            let v = act_bp(self.st, self.base, e, r, &mvec_gen(j))?;
            mvec_add(self.st.p, &mut out, &mvec_scale(&self.st.profile, &v, h, c), 1);
        }
        Ok(out)
    }

    /// Rewrite b (x) m with b in B(n) into the B(0) (x) M normal form.
    pub fn stabilize(&self, b: &MilnorElement, m: &MVec) -> Result<SElem, Error> {
        let mut out = SElem::new();
        for ((e, r), y) in self.st.decompose_right_an1(b)? {
            let ym = if y.tag == Tag::An(-1) {
                let mut acc = MVec::new();
                for (&(_, h), &c) in &y.terms {
                    mvec_add(self.st.p, &mut acc, &mvec_scale(&self.st.profile, m, h, c), 1);
                }
                acc
            } else {
                self.base.act(self.st, &y, m)?
            };
            push(self.st.f, &mut out, e, r, &ym, HMono::ONE, 1, &self.st.profile);
        }
        Ok(out)
    }

    /// Action of op in A(n) computed through B(n) (x)_{A(n-1)} M.
    pub fn act_through(&self, op: &MilnorElement, x: &SElem, n: i32) -> Result<SElem, Error> {
        let st = self.st;
        let mut out = SElem::new();
        for (&(e, r, j, h), &c) in x {
            let b = MilnorElement::symbol(st.profile, Tag::Bn(n), bp(st.p, e, r as i32)).scale(h, c);
            let ab = st.act_left(op, &b)?;
            let v = self.stabilize(&ab, &mvec_gen(j))?;
            for (k, &c2) in &v {
                lin_add(st.f, &mut out, *k, c2);
            }
        }
        Ok(out)
    }

    pub fn fmt(&self, x: &SElem) -> String {
        fmt_selem(self.st.p, x, |e, r| {
            if self.st.p == 2 {
                format!("Sq{}", 2 * r + e as i64)
            } else if e == 1 {
                format!("bP{r}")
            } else {
                format!("P{r}")
            }
        }, |j| self.base.gens[j].name.clone())
    }
}

fn fmt_selem(p: u32, x: &SElem, left: impl Fn(u8, i64) -> String, right: impl Fn(usize) -> String) -> String {
    if x.is_empty() {
        return "0".into();
    }
    x.iter()
        .map(|(&(e, r, j, h), &c)| {
            let (neg, mag) = if p > 2 && c * 2 > p { (true, p - c) } else { (false, c) };
            let mut f = Vec::new();
            if mag != 1 {
                f.push(mag.to_string());
            }
            if !h.is_one() {
                f.push(h.to_string());
            }
            f.push(format!("{}|{}", left(e, r), right(j)));
            format!("{}{}", if neg { "-" } else { "" }, f.join("*"))
        })
        .collect::<Vec<_>>()
        .join(" + ")
        .replace("+ -", "- ")
}

pub struct SingerLarge<'a> {
    pub st: &'a Steenrod,
    pub base: &'a FPModule,
}

impl<'a> SingerLarge<'a> {
    pub fn new(st: &'a Steenrod, base: &'a FPModule) -> Result<SingerLarge<'a>, Error> {
        central(&st.profile)?;
        Ok(SingerLarge { st, base })
    }

    pub fn elem(&self, i: u8, k: i64, j: usize) -> LElem {
        [((i, k, j, HMono::ONE), 1)].into_iter().collect()
    }

    pub fn beta(&self, x: &LElem) -> LElem {
        let f = self.st.f;
        x.iter().filter(|(k, _)| k.0 == 1).map(|(&(_, k, j, h), &c)| ((0, k + 1, j, h), f.neg(c))).collect()
    }

    /// P^r on x (Sq^{2r} when l = 2).
    pub fn p_act(&self, r: i64, x: &LElem) -> Result<LElem, Error> {
        let st = self.st;
        let p = st.p;
        let f = st.f;
        let prof = &st.profile;
        let l = p as i64;
        let mut out = LElem::new();
        let mut put = |i: u8, k: i64, v: &MVec, h: HMono, c: u32| push(f, &mut out, i, k, v, h, c, prof);
        for (&(i, k, j, h), &c) in x {
            let m = mvec_gen(j);
            if p == 2 {
                for jj in 0..=r / 2 {
                    let m0 = act_bp(st, self.base, 0, jj, &m)?;
                    let m1 = act_bp(st, self.base, 1, jj, &m)?;
                    if i == 1 {
                        put(1, r + k - jj, &m0, h, f.mul(c, binom(k - jj, r - 2 * jj, p)));
                        if 2 * jj < r && prof.allows(HMono::TAU) {
                            put(0, r + k - jj, &m1, h.mul(HMono::TAU), f.mul(c, binom(k - jj, r - 2 * jj - 1, p)));
                        }
                    } else {
                        put(0, r + k - jj, &m0, h, f.mul(c, binom(k - jj, r - 2 * jj, p)));
                        if 2 * jj < r {
                            // (u + rho) v^{r+k-j-1}, rho = 0 in central profiles
                            put(1, r + k - jj - 1, &m1, h, f.mul(c, binom(k - jj - 1, r - 2 * jj - 1, p)));
                        }
                    }
                }
            } else {
                for jj in 0..=r / l {
                    let m0 = act_bp(st, self.base, 0, jj, &m)?;
                    if i == 1 {
                        // Sigma u v^{k-1} with k = k_stored + 1
                        let kk = k + 1;
                        put(1, kk + (l - 1) * (r - jj) - 1, &m0, h, f.mul(c, binom(kk - (l - 1) * jj - 1, r - l * jj, p)));
                    } else {
                        put(0, k + (l - 1) * (r - jj), &m0, h, f.mul(c, binom(k - (l - 1) * jj, r - l * jj, p)));
                        if r - l * jj >= 1 {
                            let m1 = act_bp(st, self.base, 1, jj, &m)?;
                            put(1, k + (l - 1) * (r - jj) - 1, &m1, h, f.mul(c, binom(k - (l - 1) * jj - 1, r - l * jj - 1, p)));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn act_bp(&self, e: u8, r: i64, x: &LElem) -> Result<LElem, Error> {
        let y = self.p_act(r, x)?;
        Ok(if e == 1 { self.beta(&y) } else { y })
    }

    /// epsilon(pi (x) 1): Sigma v^{(l-1)k} -> -(-1)^k eps(beta P^k), Sigma u v^{(l-1)k-1} -> (-1)^k eps(P^k).
    pub fn eval_large(&self, x: &LElem) -> Result<MVec, Error> {
        let st = self.st;
        let f = st.f;
        let l = st.p as i64;
        let small = SingerSmall { st, base: self.base };
        let mut y = SElem::new();
        for (&(i, k, j, h), &c) in x {
            if i == 0 && k.rem_euclid(l - 1) == 0 {
                let kk = k / (l - 1);
                lin_add(f, &mut y, (1, kk, j, h), f.mul(c, f.neg(f.sign(kk))));
            } else if i == 1 && (k + 1).rem_euclid(l - 1) == 0 {
                let kk = (k + 1) / (l - 1);
                lin_add(f, &mut y, (0, kk, j, h), f.mul(c, f.sign(kk)));
            }
        }
        small.eval_small(&y)
    }

    pub fn fmt(&self, x: &LElem) -> String {
        fmt_selem(self.st.p, x, |i, k| format!("S{}", crate::amod::band_name(BandKind::Bmu, i, k as i32)), |j| self.base.gens[j].name.clone())
    }

    /// Truncated band k in [kmin, kmax] as an FPModule over A(n).
    pub fn to_module(&self, n: i32, kmin: i64, kmax: i64) -> Result<FPModule, Error> {
        let p = self.st.p;
        let mut gens = Vec::new();
        let mut keys = Vec::new();
        for k in kmin..=kmax {
            for i in 0..2u8 {
                for j in 0..self.base.dim() {
                    let g = &self.base.gens[j];
                    let name = crate::amod::band_name(BandKind::Bmu, i, k as i32);
                    gens.push(Gen { name: format!("S{name}|{}", g.name), p: 1 + i as i32 + 2 * k as i32 + g.p, q: i as i32 + k as i32 + g.q, label: None });
                    keys.push((i, k, j));
                }
            }
        }
        let d = self.base.dim();
        let index = |i: u8, k: i64, j: usize| (((k - kmin) * 2 + i as i64) as usize) * d + j;
        let mut md = FPModule::new(self.st.profile, n, &format!("Rmu({})", self.base.name), gens);
        let ops: Vec<(u8, i64)> = std::iter::once((1u8, 0i64)).chain((0..n.max(0)).map(|j| (0u8, (p as i64).pow(j as u32)))).collect();
        for (oi, &(e, a)) in ops.iter().enumerate() {
            for (gi, &(i0, k0, j0)) in keys.iter().enumerate() {
                let x = self.elem(i0, k0, j0);
                let y = if e == 1 { self.beta(&x) } else { self.p_act(a, &x)? };
                for (&(i1, k1, j1, h), &c) in &y {
                    if (kmin..=kmax).contains(&k1) {
                        md.table[oi][gi].insert((index(i1, k1, j1), h), c);
                    } else {
                        md.overflow[oi][gi] = true;
                    }
                }
            }
        }
        Ok(md)
    }
}

/// R_S(H) -> Sigma H(BS)_loc: P^k -> Sigma c d^{k-1}, beta P^k -> -Sigma d^k.
pub fn iso_rs_to_bsigma(profile: &Profile, x: &SElem) -> BTreeMap<(u8, i64, HMono), u32> {
    let f = profile.fp();
    let mut out = BTreeMap::new();
    for (&(e, r, _, h), &c) in x {
        if e == 0 {
            lin_add(f, &mut out, (1, r - 1, h), c);
        } else {
            lin_add(f, &mut out, (0, r, h), f.neg(c));
        }
    }
    out
}

/// beta^e P^r on Sigma x^i y^k in the untruncated localized module (with the suspension sign).
pub fn susp_band_act(kind: BandKind, profile: &Profile, e: u8, r: i64, x: &BTreeMap<(u8, i64, HMono), u32>) -> BTreeMap<(u8, i64, HMono), u32> {
    let f = profile.fp();
    let mut out = BTreeMap::new();
    for (&(i, k, h), &c) in x {
        if let Some((i2, k2, c2)) = band_rule(kind, profile.prime, e, r, i, k) {
            let s = if e == 1 { f.neg(1) } else { 1 };
            lin_add(f, &mut out, (i2, k2, h), f.mul(f.mul(c, c2), s));
        }
    }
    out
}

/// Generators beta, P^1, ..., P^{l^{n-1}} as (e, r) pairs.
pub fn generator_pairs(p: u32, n: i32) -> Vec<(u8, i64)> {
    gen_ops(p, n).iter().map(|m| (m.e as u8, m.r[0] as i64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amod::{bmu_band, check_relations, residue, susp, trivial};
    use crate::ops::sq;

    #[test]
    fn small_examples() {
        let prof = Profile::trivial(2);
        let st = Steenrod::new(prof);
        let h = trivial(prof, 3);
        let rs = SingerSmall::new(&st, &h).unwrap();
        let x = rs.elem(1, -1, 0);
        assert_eq!(rs.fmt(&rs.p_act(1, &x).unwrap()), "Sq1|1");
        for r in -4..4 {
            for e in 0..2 {
                assert_eq!(rs.p_act(0, &rs.elem(e, r, 0)).unwrap(), rs.elem(e, r, 0));
            }
        }
        assert!(rs.eval_small(&rs.elem(1, 0, 0)).unwrap().is_empty());
        assert_eq!(rs.eval_small(&rs.elem(0, 0, 0)).unwrap(), mvec_gen(0));
        assert!(rs.eval_small(&rs.elem(1, -2, 0)).unwrap().is_empty());
        // Sq^a(Sq^b) = binom(b-1, a) Sq^{a+b}
        for b in -8..8i64 {
            for a in 1..4i64 {
                let y = rs.p_act(a, &rs.elem((b % 2).unsigned_abs() as u8, b.div_euclid(2), 0)).unwrap();
                let c = binom(b - 1, 2 * a, 2);
                let n = 2 * a + b;
                let want = if c == 0 { SElem::new() } else { rs.elem((n.rem_euclid(2)) as u8, n.div_euclid(2), 0) };
                assert_eq!(y, want, "Sq{} Sq{b}", 2 * a);
            }
        }
        let prof = Profile::trivial(3);
        let st = Steenrod::new(prof);
        let h = trivial(prof, 2);
        let rs = SingerSmall::new(&st, &h).unwrap();
        let f = prof.fp();
        for b in -6..6 {
            for a in 1..5 {
                let y = rs.p_act(a, &rs.elem(1, b, 0)).unwrap();
                let c = f.mul(f.sign(a), binom(2 * b, a, 3));
                let want = if c == 0 { SElem::new() } else { [((1, a + b, 0, HMono::ONE), c)].into_iter().collect() };
                assert_eq!(y, want);
                let y = rs.p_act(a, &rs.elem(0, b, 0)).unwrap();
                let c = f.mul(f.sign(a), binom(2 * b - 1, a, 3));
                let want = if c == 0 { SElem::new() } else { [((0, a + b, 0, HMono::ONE), c)].into_iter().collect() };
                assert_eq!(y, want);
            }
        }
    }

    #[test]
    fn small_relations() {
        for prof in [Profile::trivial(2), Profile::complex(), Profile::trivial(3)] {
            let st = Steenrod::new(prof);
            let n = 2;
            for base in [trivial(prof, n), bmu_band(prof, n, -2, 2)] {
                let rs = SingerSmall::new(&st, &base).unwrap();
                let md = rs.to_module(n, -4, 6).unwrap();
                let d = if prof.prime == 2 { 9 } else { 13 };
                check_relations(&st, &md, d).unwrap_or_else(|e| panic!("{prof} {}: {e}", base.name));
            }
        }
    }

    #[test]
    fn large_relations_and_identification() {
        for prof in [Profile::trivial(2), Profile::complex(), Profile::trivial(3)] {
            let st = Steenrod::new(prof);
            let n = 2;
            let h = trivial(prof, n);
            let rm = SingerLarge::new(&st, &h).unwrap();
            let md = rm.to_module(n, -6, 6).unwrap();
            // R_mu(H) is Sigma H(Bmu)_loc
            let sb = susp(&bmu_band(prof, n, -6, 6), 1, 0);
            assert_eq!(md.table, sb.table, "{prof}");
            for g in 0..md.dim() {
                let (i, k) = sb.gens[g].label.unwrap();
                let x = rm.elem(i, k as i64, 0);
                let r = residue(&sb, &mvec_gen(g)).unwrap();
                let e = rm.eval_large(&x).unwrap();
                assert_eq!(e.get(&(0, HMono::ONE)).copied().unwrap_or(0), if r.is_zero() { 0 } else { 1 });
            }
            let base = bmu_band(prof, n, -2, 2);
            let rm = SingerLarge::new(&st, &base).unwrap();
            let md = rm.to_module(n, -4, 5).unwrap();
            let d = if prof.prime == 2 { 8 } else { 12 };
            check_relations(&st, &md, d).unwrap_or_else(|e| panic!("{prof}: {e}"));
        }
    }

    #[test]
    fn stabilize_examples() {
        let prof = Profile::trivial(2);
        let st = Steenrod::new(prof);
        let base = bmu_band(prof, 2, -3, 3);
        let rs = SingerSmall::new(&st, &base).unwrap();
        let v = mvec_gen(base.find(0, -1).unwrap());
        let one = MilnorElement::symbol(prof, Tag::Bn(1), crate::dualalg::Mono::ONE);
        let s = rs.stabilize(&one, &v).unwrap();
        assert_eq!(rs.fmt(&s), "Sq0|v^-1");
        // Sq^4 Sq^2 (x) m = Sq^4 (x) Sq^2(m)
        let a = MilnorElement::symbol(prof, Tag::Bn(2), sq(4));
        let b = MilnorElement::symbol(prof, Tag::An(1), sq(2));
        let ab = st.act_right(&a, &b).unwrap();
        let s = rs.stabilize(&ab, &v).unwrap();
        assert_eq!(rs.fmt(&s), "Sq4|1");
    }
}
