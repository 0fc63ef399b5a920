//! Exact commutative coefficient rings.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Most variables a polynomial ring may have.
pub const MAX_VARIABLES: usize = 4;
/// Largest total degree accepted when parsing polynomial coefficients.
pub const MAX_INPUT_DEGREE: u32 = 8;

/// A polynomial over ℤ: exponent vectors to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly(pub BTreeMap<Vec<u32>, BigInt>);

impl Poly {
    fn constant(c: BigInt, nvars: usize) -> Poly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(vec![0; nvars], c);
        }
        Poly(m)
    }

    pub fn degree(&self) -> u32 {
        self.0.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut m = self.0.clone();
        for (e, c) in &other.0 {
            let entry = m.entry(e.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                m.remove(e);
            }
        }
        Poly(m)
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(e, c)| (e.clone(), -c)).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut m: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *m.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        m.retain(|_, c| !c.is_zero());
        Poly(m)
    }
}

/// A ring element. Which variant is valid depends on the [`Ring`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Elem {
    Int(BigInt),
    Rat(BigRational),
    Mod(u64),
    Poly(Poly),
}

/// The supported coefficient rings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    Rationals,
    IntegersMod(u64),
    /// ℤ[x_1, …, x_k] with named variables.
    Polynomials(Vec<String>),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "ZZ"),
            Ring::Rationals => write!(f, "QQ"),
            Ring::IntegersMod(m) => write!(f, "ZZ/{m}"),
            Ring::Polynomials(vars) => write!(f, "ZZ[{}]", vars.join(",")),
        }
    }
}

impl Ring {
    pub fn integers_mod(m: u64) -> Result<Ring> {
        if m < 2 {
            return Err(Error::Parse(format!("modulus {m} must be at least 2")));
        }
        Ok(Ring::IntegersMod(m))
    }

    pub fn polynomials<S: AsRef<str>>(vars: &[S]) -> Result<Ring> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        if vars.is_empty() || vars.len() > MAX_VARIABLES {
            return Err(Error::Parse(format!(
                "polynomial rings take 1 to {MAX_VARIABLES} variables, got {}",
                vars.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || vars[..i].contains(v) {
                return Err(Error::Parse(format!("bad variable name `{v}`")));
            }
        }
        Ok(Ring::Polynomials(vars))
    }

    /// Parses ring names: `int`/`ZZ`, `rat`/`QQ`, `mod5`/`ZZ/5`, `poly`
    /// (variables `l,m`) or `poly:x,y,z`.
    pub fn from_name(name: &str) -> Result<Ring> {
        let s = name.trim();
        match s {
            "int" | "ZZ" | "Z" | "integers" => return Ok(Ring::Integers),
            "rat" | "QQ" | "Q" | "rationals" => return Ok(Ring::Rationals),
            "poly" => return Ring::polynomials(&["l", "m"]),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let vars: Vec<&str> = rest.split(',').map(str::trim).collect();
            return Ring::polynomials(&vars);
        }
        let modulus = s
            .strip_prefix("mod")
            .or_else(|| s.strip_prefix("ZZ/"))
            .or_else(|| s.strip_prefix("Z/"));
        if let Some(m) = modulus {
            let m: u64 = m.parse().map_err(|_| Error::Parse(format!("bad modulus in `{s}`")))?;
            return Ring::integers_mod(m);
        }
        Err(Error::Parse(format!("unknown ring `{s}`")))
    }

    /// Short kind tag used in JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Ring::Integers => "int",
            Ring::Rationals => "rat",
            Ring::IntegersMod(_) => "mod",
            Ring::Polynomials(_) => "poly",
        }
    }

    fn nvars(&self) -> usize {
        match self {
            Ring::Polynomials(v) => v.len(),
            _ => 0,
        }
    }

    pub fn zero(&self) -> Elem {
        self.from_i64(0)
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, x: i64) -> Elem {
        self.from_bigint(BigInt::from(x))
    }

    pub fn from_bigint(&self, x: BigInt) -> Elem {
        match self {
            Ring::Integers => Elem::Int(x),
            Ring::Rationals => Elem::Rat(BigRational::from_integer(x)),
            Ring::IntegersMod(m) => Elem::Mod(x.mod_floor(&BigInt::from(*m)).to_u64().unwrap()),
            Ring::Polynomials(v) => Elem::Poly(Poly::constant(x, v.len())),
        }
    }

    /// The `i`-th variable of a polynomial ring.
    pub fn var(&self, i: usize) -> Result<Elem> {
        let n = self.nvars();
        if i >= n {
            return Err(Error::Parse(format!("ring {self} has no variable number {i}")));
        }
        let mut e = vec![0; n];
        e[i] = 1;
        Ok(Elem::Poly(Poly([(e, BigInt::one())].into_iter().collect())))
    }

    fn mismatch(&self, a: &Elem) -> ! {
        panic!("element {a:?} does not belong to {self}")
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Ring::Integers, Elem::Int(x), Elem::Int(y)) => Elem::Int(x + y),
            (Ring::Rationals, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            (Ring::IntegersMod(m), Elem::Mod(x), Elem::Mod(y)) => {
                Elem::Mod(((*x as u128 + *y as u128) % *m as u128) as u64)
            }
            (Ring::Polynomials(_), Elem::Poly(x), Elem::Poly(y)) => Elem::Poly(x.add(y)),
            _ => self.mismatch(a),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self, a) {
            (Ring::Integers, Elem::Int(x)) => Elem::Int(-x),
            (Ring::Rationals, Elem::Rat(x)) => Elem::Rat(-x),
            (Ring::IntegersMod(m), Elem::Mod(x)) => Elem::Mod((m - x) % m),
            (Ring::Polynomials(_), Elem::Poly(x)) => Elem::Poly(x.neg()),
            _ => self.mismatch(a),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Ring::Integers, Elem::Int(x), Elem::Int(y)) => Elem::Int(x * y),
            (Ring::Rationals, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            (Ring::IntegersMod(m), Elem::Mod(x), Elem::Mod(y)) => {
                Elem::Mod(((*x as u128 * *y as u128) % *m as u128) as u64)
            }
            (Ring::Polynomials(_), Elem::Poly(x), Elem::Poly(y)) => Elem::Poly(x.mul(y)),
            _ => self.mismatch(a),
        }
    }

    pub fn pow(&self, a: &Elem, k: u32) -> Elem {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Int(x) => x.is_zero(),
            Elem::Rat(x) => x.is_zero(),
            Elem::Mod(x) => *x == 0,
            Elem::Poly(p) => p.0.is_empty(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    /// Inverse of a unit, `None` for non-units.
    pub fn unit_inverse(&self, a: &Elem) -> Option<Elem> {
        match (self, a) {
            (Ring::Integers, Elem::Int(x)) => (x.abs().is_one()).then(|| Elem::Int(x.clone())),
            (Ring::Rationals, Elem::Rat(x)) => (!x.is_zero()).then(|| Elem::Rat(x.recip())),
            (Ring::IntegersMod(m), Elem::Mod(x)) => {
                let e = BigInt::from(*x).extended_gcd(&BigInt::from(*m));
                e.gcd
                    .is_one()
                    .then(|| Elem::Mod(e.x.mod_floor(&BigInt::from(*m)).to_u64().unwrap()))
            }
            (Ring::Polynomials(v), Elem::Poly(p)) => {
                let c = p.0.get(&vec![0; v.len()])?;
                (p.0.len() == 1 && c.abs().is_one()).then(|| a.clone())
            }
            _ => self.mismatch(a),
        }
    }

    pub fn format(&self, a: &Elem) -> String {
        match (self, a) {
            (_, Elem::Int(x)) => x.to_string(),
            (_, Elem::Rat(x)) => x.to_string(),
            (_, Elem::Mod(x)) => x.to_string(),
            (Ring::Polynomials(vars), Elem::Poly(p)) => format_poly(vars, p),
            _ => self.mismatch(a),
        }
    }

    /// Parses a coefficient: decimal integers, `p/q` fractions, or
    /// polynomial expressions such as `3*l^2*m - m + 1`.
    pub fn parse(&self, s: &str) -> Result<Elem> {
        let t = s.trim();
        let bad = || Error::Parse(format!("cannot read `{t}` as an element of {self}"));
        match self {
            Ring::Integers | Ring::IntegersMod(_) => {
                let x: BigInt = t.parse().map_err(|_| bad())?;
                Ok(self.from_bigint(x))
            }
            Ring::Rationals => {
                let x = match t.split_once('/') {
                    Some((p, q)) => {
                        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                        if q.is_zero() {
                            return Err(bad());
                        }
                        BigRational::new(p, q)
                    }
                    None => BigRational::from_integer(t.parse().map_err(|_| bad())?),
                };
                Ok(Elem::Rat(x))
            }
            Ring::Polynomials(vars) => {
                let p = parse_poly(vars, t).ok_or_else(bad)?;
                if p.degree() > MAX_INPUT_DEGREE {
                    return Err(Error::Parse(format!(
                        "`{t}` has degree {} above the cap {MAX_INPUT_DEGREE}",
                        p.degree()
                    )));
                }
                Ok(Elem::Poly(p))
            }
        }
    }

    /// A small random element: integers in `-3..=3`, residues, fractions with
    /// small numerator and denominator, or constant polynomials.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        match self {
            Ring::IntegersMod(m) => Elem::Mod(rng.gen_range(0..*m)),
            Ring::Rationals => {
                let p = rng.gen_range(-3i64..=3);
                let q = rng.gen_range(1i64..=3);
                Elem::Rat(BigRational::new(p.into(), q.into()))
            }
            _ => self.from_i64(rng.gen_range(-3..=3)),
        }
    }

    /// Every element, for finite rings.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        match self {
            Ring::IntegersMod(m) => Some((0..*m).map(Elem::Mod).collect()),
            _ => None,
        }
    }
}

fn format_poly(vars: &[String], p: &Poly) -> String {
    if p.0.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    // highest degree first
    let mut terms: Vec<_> = p.0.iter().collect();
    terms.sort_by(|a, b| {
        let da: u32 = a.0.iter().sum();
        let db: u32 = b.0.iter().sum();
        db.cmp(&da).then(b.0.cmp(a.0))
    });
    for (i, (e, c)) in terms.into_iter().enumerate() {
        let monomial: Vec<String> = e
            .iter()
            .zip(vars)
            .filter(|(k, _)| **k > 0)
            .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
            .collect();
        let mag = c.abs();
        let body = match (monomial.is_empty(), mag.is_one()) {
            (true, _) => mag.to_string(),
            (false, true) => monomial.join("*"),
            (false, false) => format!("{mag}*{}", monomial.join("*")),
        };
        match (i, c.is_negative()) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

fn parse_poly(vars: &[String], s: &str) -> Option<Poly> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !s[..i].ends_with('^') {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut acc = Poly::default();
    for term in terms {
        let (sign, body) = match term.as_bytes().first()? {
            b'-' => (-1, &term[1..]),
            b'+' => (1, &term[1..]),
            _ => (1, term),
        };
        if body.is_empty() {
            return None;
        }
        let mut coef = BigInt::from(sign);
        let mut exps = vec![0u32; vars.len()];
        for factor in body.split('*') {
            if let Ok(c) = factor.parse::<BigInt>() {
                coef *= c;
                continue;
            }
            let (name, k) = match factor.split_once('^') {
                Some((n, k)) => (n, k.parse::<u32>().ok()?),
                None => (factor, 1),
            };
            let i = vars.iter().position(|v| v == name)?;
            exps[i] += k;
        }
        acc = acc.add(&Poly([(exps, coef)].into_iter().filter(|(_, c)| !c.is_zero()).collect()));
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modular_inverse() {
        let r = Ring::integers_mod(5).unwrap();
        let two = r.from_i64(2);
        assert_eq!(r.unit_inverse(&two), Some(r.from_i64(3)));
        assert_eq!(r.neg(&two), r.from_i64(3));
        assert_eq!(Ring::integers_mod(6).unwrap().unit_inverse(&Elem::Mod(2)), None);
    }

    #[test]
    fn polynomial_round_trip() {
        let r = Ring::from_name("poly").unwrap();
        let p = r.parse("3*l^2*m - m + 1").unwrap();
        assert_eq!(r.format(&p), "3*l^2*m - m + 1");
        assert_eq!(r.parse(&r.format(&p)).unwrap(), p);
        let l = r.var(0).unwrap();
        let sq = r.mul(&r.add(&l, &r.one()), &r.sub(&l, &r.one()));
        assert_eq!(r.format(&sq), "l^2 - 1");
        assert!(r.parse("l^9").is_err());
    }

    #[test]
    fn ring_names() {
        assert_eq!(Ring::from_name("ZZ/7").unwrap(), Ring::IntegersMod(7));
        assert_eq!(Ring::from_name("poly:x,y,z").unwrap().to_string(), "ZZ[x,y,z]");
        assert!(Ring::from_name("poly:a,b,c,d,e").is_err());
        assert!(Ring::from_name("mod1").is_err());
    }

    #[test]
    fn rationals() {
        let r = Ring::Rationals;
        let x = r.parse("-2/4").unwrap();
        assert_eq!(r.format(&x), "-1/2");
        assert_eq!(r.mul(&x, &r.unit_inverse(&x).unwrap()), r.one());
    }
}
