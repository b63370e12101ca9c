//! Cobar complex over the dual of A(n) with trivial coefficients, written from the Milnor
//! coproduct formulas alone. Used as an oracle for the resolution engine.

use crate::fp::{image_and_kernel, Fp};
use std::collections::{BTreeMap, HashMap};

/// Monomial tau^E xi^R of A(n)_*: exterior bits for tau_0..tau_n, exponents for xi_1..xi_n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct DMono {
    e: u32,
    r: Vec<u32>,
}

struct DualAn {
    p: u32,
    n: usize,
    f: Fp,
    tau: Vec<(i32, i32)>,
    xi: Vec<(i32, i32)>,
    bound: Vec<u32>,
}

type Tens = BTreeMap<(DMono, DMono), u32>;

impl DualAn {
    fn new(p: u32, n: usize) -> DualAn {
        let pw = |i: usize| (p as i32).pow(i as u32);
        DualAn {
            p,
            n,
            f: Fp::new(p),
            tau: (0..=n).map(|i| (2 * pw(i) - 1, pw(i) - 1)).collect(),
            xi: (1..=n).map(|i| (2 * pw(i) - 2, pw(i) - 1)).collect(),
            bound: (1..=n).map(|i| p.pow((n + 1 - i) as u32)).collect(),
        }
    }

    fn bideg(&self, m: &DMono) -> (i32, i32) {
        let mut d = (0, 0);
        for i in 0..=self.n {
            if m.e >> i & 1 == 1 {
                d.0 += self.tau[i].0;
                d.1 += self.tau[i].1;
            }
        }
        for (i, &k) in m.r.iter().enumerate() {
            d.0 += self.xi[i].0 * k as i32;
            d.1 += self.xi[i].1 * k as i32;
        }
        d
    }

    fn odd(&self, m: &DMono) -> bool {
        self.p != 2 && m.e.count_ones() % 2 == 1
    }

    fn one(&self) -> DMono {
        DMono { e: 0, r: vec![0; self.n] }
    }

    /// Product of monomials with its sign, or None if it vanishes.
    fn mul(&self, a: &DMono, b: &DMono) -> Option<(DMono, u32)> {
        if a.e & b.e != 0 {
            return None;
        }
        let mut r = a.r.clone();
        for (i, &k) in b.r.iter().enumerate() {
            r[i] += k;
            if r[i] >= self.bound[i] {
                return None;
            }
        }
        // move each tau of b past the larger taus of a
        let mut swaps = 0;
        for j in 0..=self.n {
            if b.e >> j & 1 == 1 {
                swaps += (a.e >> (j + 1)).count_ones();
            }
        }
        let c = if self.p != 2 && swaps % 2 == 1 { self.p - 1 } else { 1 };
        Some((DMono { e: a.e | b.e, r }, c))
    }

    fn tmul(&self, x: &Tens, y: &Tens) -> Tens {
        let f = self.f;
        let mut out = Tens::new();
        for ((a, b), &c1) in x {
            for ((c, d), &c2) in y {
                let Some((ac, s1)) = self.mul(a, c) else { continue };
                let Some((bd, s2)) = self.mul(b, d) else { continue };
                let mut k = f.mul(f.mul(c1, c2), f.mul(s1, s2));
                if self.odd(b) && self.odd(c) {
                    k = f.neg(k);
                }
                let e = out.entry((ac, bd)).or_insert(0);
                *e = f.add(*e, k);
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn xi_pow(&self, i: usize, k: u32) -> Option<DMono> {
        let mut m = self.one();
        if i == 0 {
            return Some(m);
        }
        if i > self.n || k >= self.bound[i - 1] {
            return None;
        }
        m.r[i - 1] = k;
        Some(m)
    }

    fn delta_xi(&self, k: usize) -> Tens {
        let mut t = Tens::new();
        for i in 0..=k {
            if let (Some(a), Some(b)) = (self.xi_pow(k - i, self.p.pow(i as u32)), self.xi_pow(i, 1)) {
                t.insert((a, b), 1);
            }
        }
        t
    }

    fn delta_tau(&self, k: usize) -> Tens {
        let mut t = Tens::new();
        let mut tk = self.one();
        tk.e = 1 << k;
        t.insert((tk, self.one()), 1);
        for i in 0..=k {
            if let Some(a) = self.xi_pow(k - i, self.p.pow(i as u32)) {
                let mut b = self.one();
                b.e = 1 << i;
                t.insert((a, b), 1);
            }
        }
        t
    }

    fn delta(&self, m: &DMono) -> Tens {
        let mut acc: Tens = [((self.one(), self.one()), 1)].into_iter().collect();
        for i in 0..=self.n {
            if m.e >> i & 1 == 1 {
                acc = self.tmul(&acc, &self.delta_tau(i));
            }
        }
        for (i, &k) in m.r.iter().enumerate() {
            for _ in 0..k {
                acc = self.tmul(&acc, &self.delta_xi(i + 1));
            }
        }
        acc
    }

    fn reduced_basis(&self) -> Vec<DMono> {
        let mut out = Vec::new();
        let mut r = vec![0u32; self.n];
        loop {
            for e in 0..(1u32 << (self.n + 1)) {
                let m = DMono { e, r: r.clone() };
                if m != self.one() {
                    out.push(m);
                }
            }
            let mut i = 0;
            loop {
                if i == self.n {
                    return out;
                }
                r[i] += 1;
                if r[i] < self.bound[i] {
                    break;
                }
                r[i] = 0;
                i += 1;
            }
        }
    }
}

/// Ext^{s,t,u}_{A(n)}(F_l, F_l) from the cobar complex, for s <= s_max and t <= t_max.
pub struct Cobar {
    pub entries: BTreeMap<(usize, i32, i32), usize>,
    pub d_squared_zero: bool,
}

pub fn cobar_ext(p: u32, n: usize, s_max: usize, t_max: i32) -> Cobar {
    let a = DualAn::new(p, n);
    let f = a.f;
    let gens = a.reduced_basis();
    let degs: Vec<(i32, i32)> = gens.iter().map(|m| a.bideg(m)).collect();
    let pos: HashMap<DMono, usize> = gens.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    // reduced coproduct of each basis element, as pairs of indices
    let red: Vec<Vec<(usize, usize, u32)>> = gens
        .iter()
        .map(|m| {
            a.delta(m)
                .into_iter()
                .filter(|((x, y), _)| *x != a.one() && *y != a.one())
                .map(|((x, y), c)| (pos[&x], pos[&y], c))
                .collect()
        })
        .collect();
    let odd: Vec<bool> = gens.iter().map(|m| a.odd(m)).collect();
    // words of length s by bidegree
    let mut words: Vec<HashMap<(i32, i32), Vec<Vec<usize>>>> = vec![HashMap::new(); s_max + 2];
    words[0].insert((0, 0), vec![Vec::new()]);
    for s in 1..=s_max + 1 {
        let prev: Vec<((i32, i32), Vec<usize>)> = words[s - 1].iter().flat_map(|(&k, v)| v.iter().map(move |w| (k, w.clone()))).collect();
        for (k, w) in prev {
            for (g, &(dt, du)) in degs.iter().enumerate() {
                if k.0 + dt <= t_max {
                    let mut w2 = w.clone();
                    w2.push(g);
                    words[s].entry((k.0 + dt, k.1 + du)).or_default().push(w2);
                }
            }
        }
    }
    for m in words.iter_mut() {
        for v in m.values_mut() {
            v.sort();
        }
    }
    let d_cols = |s: usize, bd: (i32, i32)| -> Vec<Vec<u32>> {
        let src = words[s].get(&bd).cloned().unwrap_or_default();
        let tgt = words[s + 1].get(&bd).cloned().unwrap_or_default();
        let idx: HashMap<&Vec<usize>, usize> = tgt.iter().enumerate().map(|(i, w)| (w, i)).collect();
        src.iter()
            .map(|w| {
                let mut col = vec![0u32; tgt.len()];
                let mut e = 0usize;
                for i in 0..w.len() {
                    for &(x, y, c) in &red[w[i]] {
                        let sign = e + if odd[x] { 1 } else { 0 };
                        let mut w2 = w[..i].to_vec();
                        w2.push(x);
                        w2.push(y);
                        w2.extend_from_slice(&w[i + 1..]);
                        let k = if sign % 2 == 1 { f.neg(c) } else { c };
                        let j = idx[&w2];
                        col[j] = f.add(col[j], k);
                    }
                    e += 1 + if odd[w[i]] { 1 } else { 0 };
                }
                col
            })
            .collect()
    };
    let mut entries = BTreeMap::new();
    let mut d_squared_zero = true;
    let mut keys: Vec<(i32, i32)> = words.iter().flat_map(|m| m.keys().copied()).collect();
    keys.sort();
    keys.dedup();
    for &bd in &keys {
        let mut ranks = vec![0usize; s_max + 2];
        let mut mats = Vec::new();
        for s in 0..=s_max {
            let cols = d_cols(s, bd);
            let n = words[s + 1].get(&bd).map(|v| v.len()).unwrap_or(0);
            let (ech, _) = image_and_kernel(f, n, &cols);
            ranks[s] = ech.rank();
            mats.push(cols);
        }
        for s in 1..=s_max {
            // d_s d_{s-1} = 0
            let (a1, a2) = (&mats[s - 1], &mats[s]);
            for col in a1 {
                let mut out = vec![0u32; a2.first().map(|c| c.len()).unwrap_or(0)];
                for (j, &c) in col.iter().enumerate() {
                    if c != 0 {
                        for (k, &x) in a2[j].iter().enumerate() {
                            out[k] = f.add(out[k], f.mul(c, x));
                        }
                    }
                }
                if out.iter().any(|&x| x != 0) {
                    d_squared_zero = false;
                }
            }
        }
        for s in 0..=s_max {
            let dim = words[s].get(&bd).map(|v| v.len()).unwrap_or(0);
            let h = dim - ranks[s] - if s > 0 { ranks[s - 1] } else { 0 };
            if h > 0 {
                entries.insert((s, bd.0, bd.1), h);
            }
        }
    }
    Cobar { entries, d_squared_zero }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a0_and_a1() {
        let c = cobar_ext(2, 0, 4, 8);
        assert!(c.d_squared_zero);
        let want: BTreeMap<_, _> = (0..=4).map(|s| ((s, s as i32, 0), 1)).collect();
        assert_eq!(c.entries, want);
        let c = cobar_ext(2, 1, 2, 6);
        assert!(c.d_squared_zero);
        let s1: Vec<_> = c.entries.keys().filter(|k| k.0 == 1).copied().collect();
        assert_eq!(s1, vec![(1, 1, 0), (1, 2, 1)]);
        let c = cobar_ext(3, 1, 3, 12);
        assert!(c.d_squared_zero);
        assert_eq!(c.entries.get(&(1, 4, 2)), Some(&1));
    }
}
