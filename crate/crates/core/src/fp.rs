//! Prime field arithmetic, binomial coefficients and dense row reduction.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    pub p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Fp {
        assert!(is_prime(p), "{p} is not prime");
        Fp { p }
    }
    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }
    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }
    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }
    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.p - a) % self.p
    }
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "division by zero in F_{}", self.p);
        self.pow(a, self.p - 2)
    }
    pub fn pow(self, a: u32, mut e: u32) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
    /// Reduce a signed integer into [0, p).
    #[inline]
    pub fn from_i64(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }
    /// (-1)^k
    #[inline]
    pub fn sign(self, k: i64) -> u32 {
        if k.rem_euclid(2) == 0 {
            1 % self.p
        } else {
            self.p - 1
        }
    }
    /// Symmetric representative, handy for printing.
    pub fn signed(self, a: u32) -> i64 {
        let a = a as i64;
        if a > self.p as i64 / 2 {
            a - self.p as i64
        } else {
            a
        }
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn lucas_nonneg(mut a: u64, mut b: u64, p: u64) -> u32 {
    let mut acc = 1u64;
    while b > 0 || a > 0 {
        let (ai, bi) = (a % p, b % p);
        if bi > ai {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..bi {
            c = c * (ai - i) / (i + 1);
        }
        acc = acc * (c % p) % p;
        a /= p;
        b /= p;
    }
    acc as u32
}

/// binom(a, b) mod p for any integer a and b >= 0, via Lucas on a mod p^N with p^N > b.
pub fn binom(a: i64, b: i64, p: u32) -> u32 {
    if b < 0 {
        return 0;
    }
    let pp = p as i64;
    let a = if a >= 0 {
        a
    } else {
        let mut m: i64 = pp;
        while m <= b {
            m *= pp;
        }
        a.rem_euclid(m)
    };
    lucas_nonneg(a as u64, b as u64, p as u64)
}

/// binom(a, b) as the falling factorial a(a-1)...(a-b+1)/b!, exactly, then reduced mod p.
/// Returns None if the exact value overflows i128.
pub fn binom_falling(a: i64, b: i64, p: u32) -> Option<u32> {
    if b < 0 {
        return Some(0);
    }
    let mut c: i128 = 1;
    for i in 0..b as i128 {
        c = c.checked_mul(a as i128 - i)? / (i + 1);
    }
    Some(c.rem_euclid(p as i128) as u32)
}

/// Multinomial coefficient mod p (Lucas digitwise; zero on any carry).
pub fn multinomial(parts: &[u64], p: u32) -> u32 {
    let f = Fp { p };
    let mut acc = 1;
    let mut total = 0u64;
    for &k in parts {
        total += k;
        acc = f.mul(acc, lucas_nonneg(total, k, p as u64));
        if acc == 0 {
            return 0;
        }
    }
    acc
}

/// A row-echelon basis of a subspace of F_p^n, with optional augmentation columns
/// recording how each row was built from the inserted vectors.
#[derive(Clone)]
pub struct Echelon {
    pub f: Fp,
    pub n: usize,
    pub aug: usize,
    rows: Vec<Vec<u32>>,
    pivot_row: Vec<Option<usize>>,
}

impl fmt::Debug for Echelon {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "Echelon(n={}, rank={})", self.n, self.rows.len())
    }
}

impl Echelon {
    pub fn new(f: Fp, n: usize, aug: usize) -> Echelon {
        Echelon { f, n, aug, rows: Vec::new(), pivot_row: vec![None; n] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.rows.iter().map(|r| &r[..self.n])
    }

    /// Reduce v (length n + aug) in place against the stored rows.
    pub fn reduce(&self, v: &mut [u32]) {
        let f = self.f;
        for j in 0..self.n {
            if v[j] == 0 {
                continue;
            }
            if let Some(r) = self.pivot_row[j] {
                let c = f.neg(v[j]);
                let row = &self.rows[r];
                for k in j..row.len() {
                    if row[k] != 0 {
                        v[k] = (v[k] + c * row[k]) % f.p;
                    }
                }
            }
        }
    }

    /// Insert v; returns true if it enlarged the span. If v reduces to zero, the
    /// augmented part of the reduced vector is left in `v` for the caller.
    pub fn insert(&mut self, v: &mut Vec<u32>) -> bool {
        debug_assert_eq!(v.len(), self.n + self.aug);
        self.reduce(v);
        let lead = match v[..self.n].iter().position(|&x| x != 0) {
            Some(j) => j,
            None => return false,
        };
        let inv = self.f.inv(v[lead]);
        let row: Vec<u32> = v.iter().map(|&x| self.f.mul(x, inv)).collect();
        self.pivot_row[lead] = Some(self.rows.len());
        self.rows.push(row);
        true
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        w.resize(self.n + self.aug, 0);
        self.reduce(&mut w);
        w[..self.n].iter().all(|&x| x == 0)
    }

    /// Express v as a combination of the inserted vectors, using the augmentation.
    /// Returns None if v is not in the span.
    pub fn solve(&self, v: &[u32]) -> Option<Vec<u32>> {
        let mut w = v[..self.n].to_vec();
        w.resize(self.n + self.aug, 0);
        self.reduce(&mut w);
        if w[..self.n].iter().any(|&x| x != 0) {
            return None;
        }
        // v - sum c_r row_r = 0 and the augmentation accumulated -sum c_r aug_r.
        Some(w[self.n..].iter().map(|&x| self.f.neg(x)).collect())
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.n).filter(|&j| self.pivot_row[j].is_some()).collect();
        out.sort();
        out
    }
}

/// Rank, image echelon and kernel basis of the map sending e_i to images[i].
pub fn image_and_kernel(f: Fp, n: usize, images: &[Vec<u32>]) -> (Echelon, Vec<Vec<u32>>) {
    let k = images.len();
    let mut ech = Echelon::new(f, n, k);
    let mut kernel = Vec::new();
    for (i, img) in images.iter().enumerate() {
        let mut v = img.clone();
        v.resize(n + k, 0);
        v[n + i] = 1;
        if !ech.insert(&mut v) {
            kernel.push(v[n..].to_vec());
        }
    }
    (ech, kernel)
}

pub fn rank_of(f: Fp, n: usize, vecs: &[Vec<u32>]) -> usize {
    let mut ech = Echelon::new(f, n, 0);
    for v in vecs {
        let mut w = v.clone();
        ech.insert(&mut w);
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binom(5, 2, 3), 1);
        assert_eq!(binom(-1, 1, 2), 1);
        assert_eq!(binom(-2, 2, 2), 1);
        assert_eq!(binom(-1, 3, 3), 2);
        assert_eq!(binom(3, 5, 2), 0);
        assert_eq!(binom(4, 0, 5), 1);
        assert_eq!(binom(4, -1, 5), 0);
    }

    #[test]
    fn lucas_agrees_with_falling_factorial() {
        for p in [2u32, 3, 5, 7] {
            for a in -60i64..60 {
                for b in 0i64..25 {
                    assert_eq!(Some(binom(a, b, p)), binom_falling(a, b, p), "C({a},{b}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn kernel_of_projection() {
        let f = Fp::new(3);
        let imgs = vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 2]];
        let (ech, ker) = image_and_kernel(f, 2, &imgs);
        assert_eq!(ech.rank(), 2);
        assert_eq!(ker.len(), 2);
        for k in &ker {
            let mut s = [0u32; 2];
            for (i, &c) in k.iter().enumerate() {
                for j in 0..2 {
                    s[j] = f.add(s[j], f.mul(c, imgs[i][j]));
                }
            }
            assert_eq!(s, [0, 0]);
        }
        let pre = ech.solve(&[2, 1]).unwrap();
        let mut s = [0u32; 2];
        for (i, &c) in pre.iter().enumerate() {
            for j in 0..2 {
                s[j] = f.add(s[j], f.mul(c, imgs[i][j]));
            }
        }
        assert_eq!(s, [2, 1]);
    }
}
