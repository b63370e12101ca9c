//! Coefficient rings H^{*,*} = F_l[rho, tau] restricted to one of three profiles.
//!
//! A monomial rho^a tau^b sits in cohomological bidegree (a, a+b), so every
//! bidegree holds at most one monomial and homogeneous elements are scalars
//! times a monomial.

use crate::fp::Fp;
use crate::Error;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Trivial,
    Complex,
    Real,
}

impl Kind {
    pub fn parse(s: &str) -> Result<Kind, Error> {
        match s.to_ascii_lowercase().as_str() {
            "trivial" => Ok(Kind::Trivial),
            "complex" => Ok(Kind::Complex),
            "real" => Ok(Kind::Real),
            _ => Err(Error::Parse(format!("unknown profile '{s}'"))),
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Kind::Trivial => "trivial",
            Kind::Complex => "complex",
            Kind::Real => "real",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Profile {
    pub prime: u32,
    pub kind: Kind,
    pub dim_d: u32,
}

impl Profile {
    pub fn new(prime: u32, kind: Kind) -> Result<Profile, Error> {
        if !crate::fp::is_prime(prime) {
            return Err(Error::Profile(format!("{prime} is not a prime")));
        }
        if kind != Kind::Trivial && prime != 2 {
            return Err(Error::Profile(format!("profile {} needs prime 2", kind.name())));
        }
        Ok(Profile { prime, kind, dim_d: 0 })
    }
    pub fn trivial(prime: u32) -> Profile {
        Profile::new(prime, Kind::Trivial).unwrap()
    }
    pub fn complex() -> Profile {
        Profile::new(2, Kind::Complex).unwrap()
    }
    pub fn real() -> Profile {
        Profile::new(2, Kind::Real).unwrap()
    }
    pub fn fp(&self) -> Fp {
        Fp { p: self.prime }
    }
    #[inline]
    pub fn allows(&self, h: HMono) -> bool {
        match self.kind {
            Kind::Trivial => h.a == 0 && h.b == 0,
            Kind::Complex => h.a == 0,
            Kind::Real => true,
        }
    }
    /// dim over F_l of H^{p,q}.
    pub fn h_dim(&self, p: i32, q: i32) -> usize {
        match HMono::at(p, q) {
            Some(h) if self.allows(h) => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind.name(), self.prime)
    }
}

/// rho^a tau^b
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct HMono {
    pub a: u16,
    pub b: u16,
}

impl HMono {
    pub const ONE: HMono = HMono { a: 0, b: 0 };
    pub const RHO: HMono = HMono { a: 1, b: 0 };
    pub const TAU: HMono = HMono { a: 0, b: 1 };

    pub fn new(a: u16, b: u16) -> HMono {
        HMono { a, b }
    }
    /// The monomial in cohomological bidegree (p, q), if any.
    pub fn at(p: i32, q: i32) -> Option<HMono> {
        if p >= 0 && q >= p {
            Some(HMono { a: p as u16, b: (q - p) as u16 })
        } else {
            None
        }
    }
    pub fn bideg(self) -> (i32, i32) {
        (self.a as i32, self.a as i32 + self.b as i32)
    }
    #[inline]
    pub fn mul(self, o: HMono) -> HMono {
        HMono { a: self.a + o.a, b: self.b + o.b }
    }
    pub fn is_one(self) -> bool {
        self.a == 0 && self.b == 0
    }
    pub fn divides(self, o: HMono) -> bool {
        self.a <= o.a && self.b <= o.b
    }
}

impl fmt::Display for HMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.a {
            0 => {}
            1 => parts.push("r".to_string()),
            a => parts.push(format!("r^{a}")),
        }
        match self.b {
            0 => {}
            1 => parts.push("T".to_string()),
            b => parts.push(format!("T^{b}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// A homogeneous element c * rho^a tau^b of H^{*,*} (c may be zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HElement {
    pub profile: Profile,
    pub mono: HMono,
    pub coeff: u32,
}

impl HElement {
    pub fn new(profile: Profile, mono: HMono, coeff: u32) -> Result<HElement, Error> {
        let c = coeff % profile.prime;
        if c != 0 && !profile.allows(mono) {
            return Err(Error::Profile(format!("{mono} is zero in profile {profile}")));
        }
        Ok(HElement { profile, mono, coeff: c })
    }
    pub fn one(profile: Profile) -> HElement {
        HElement { profile, mono: HMono::ONE, coeff: 1 % profile.prime }
    }
    pub fn zero(profile: Profile) -> HElement {
        HElement { profile, mono: HMono::ONE, coeff: 0 }
    }
    /// Build from a list of terms; rejects non-homogeneous sums.
    pub fn from_terms(profile: Profile, terms: &[(HMono, u32)]) -> Result<HElement, Error> {
        let f = profile.fp();
        let mut out: Option<(HMono, u32)> = None;
        for &(m, c) in terms {
            let c = c % f.p;
            if c == 0 || !profile.allows(m) {
                continue;
            }
            match &mut out {
                None => out = Some((m, c)),
                Some((m0, c0)) if *m0 == m => *c0 = f.add(*c0, c),
                Some(_) => return Err(Error::NonHomogeneous),
            }
        }
        match out {
            Some((m, c)) if c != 0 => Ok(HElement { profile, mono: m, coeff: c }),
            _ => Ok(HElement::zero(profile)),
        }
    }
    pub fn is_zero(&self) -> bool {
        self.coeff == 0
    }
    pub fn bideg(&self) -> (i32, i32) {
        self.mono.bideg()
    }
}

impl fmt::Display for HElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff == 0 {
            return write!(f, "0");
        }
        let c = self.profile.fp().signed(self.coeff);
        match c {
            1 => write!(f, "{}", self.mono),
            -1 => write!(f, "-{}", self.mono),
            _ => write!(f, "{c}*{}", self.mono),
        }
    }
}

pub fn h_mul(x: &HElement, y: &HElement) -> Result<HElement, Error> {
    if x.profile != y.profile {
        return Err(Error::ProfileMismatch);
    }
    let p = x.profile;
    let m = x.mono.mul(y.mono);
    let c = p.fp().mul(x.coeff, y.coeff);
    if !p.allows(m) {
        return Ok(HElement::zero(p));
    }
    Ok(HElement { profile: p, mono: m, coeff: c })
}

/// Bockstein on coefficients: the derivation with beta(tau) = rho in the real profile.
pub fn h_beta(x: &HElement) -> HElement {
    let p = x.profile;
    if p.kind != Kind::Real || x.coeff == 0 || x.mono.b == 0 {
        return HElement::zero(p);
    }
    let c = p.fp().mul(x.coeff, (x.mono.b as u32) % p.prime);
    HElement { profile: p, mono: HMono::new(x.mono.a + 1, x.mono.b - 1), coeff: c }
}

pub fn h_dim(profile: &Profile, p: i32, q: i32) -> usize {
    profile.h_dim(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_dims() {
        let r = Profile::real();
        let rho = HElement::new(r, HMono::RHO, 1).unwrap();
        let tau = HElement::new(r, HMono::TAU, 1).unwrap();
        let rt = h_mul(&rho, &tau).unwrap();
        assert_eq!(rt.mono, HMono::new(1, 1));
        assert_eq!(rt.bideg(), (1, 2));
        assert_eq!(r.h_dim(1, 2), 1);
        assert_eq!(Profile::complex().h_dim(1, 1), 0);
        assert_eq!(Profile::trivial(2).h_dim(0, 0), 1);
        assert_eq!(h_mul(&HElement::one(r), &tau).unwrap(), tau);
    }

    #[test]
    fn rejects_inhomogeneous() {
        let r = Profile::real();
        assert!(HElement::from_terms(r, &[(HMono::TAU, 1), (HMono::RHO, 1)]).is_err());
    }

    #[test]
    fn bockstein() {
        let r = Profile::real();
        let tau = HElement::new(r, HMono::TAU, 1).unwrap();
        let rho = HElement::new(r, HMono::RHO, 1).unwrap();
        assert_eq!(h_beta(&tau), rho);
        assert!(h_beta(&rho).is_zero());
        assert!(h_beta(&HElement::one(r)).is_zero());
        let c = Profile::complex();
        assert!(h_beta(&HElement::new(c, HMono::TAU, 1).unwrap()).is_zero());
    }

    #[test]
    fn profile_constraints() {
        assert!(Profile::new(3, Kind::Complex).is_err());
        assert!(Profile::new(3, Kind::Real).is_err());
        assert!(Profile::new(4, Kind::Trivial).is_err());
        assert!(HElement::new(Profile::complex(), HMono::RHO, 1).is_err());
    }
}
