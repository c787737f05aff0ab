//! Sparse Laurent polynomials with arbitrary-precision integer coefficients.
//!
//! Every other module stores its algebra here: cluster variables, exchange
//! binomials, F-polynomials and flattened q-characters.  Variables are interned
//! once in a process-wide registry and referred to by [`VarId`].
//!
//! Monomials are ordered lexicographically on their dense exponent vectors
//! (variables compared by registration index).  This is a group order on
//! `Z^n`, so leading terms are multiplicative and exact division can run
//! directly in the Laurent ring.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Errors raised by Laurent-ring operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaurentError {
    #[error("division is not exact in the Laurent ring")]
    NonExactDivision,
    #[error("variable {0} appears with a negative exponent but its image is not a unit")]
    NonInvertibleImage(String),
    #[error("variable {0} is evaluated at 0 under a negative exponent")]
    ZeroToNegativePower(String),
    #[error("variable {0} has no assigned value")]
    Unassigned(String),
    #[error("evaluation produced the non-integer {0}")]
    NonIntegralResult(String),
    #[error("parse error: {0}")]
    Parse(String),
}

struct Registry {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

fn registry() -> &'static RwLock<Registry> {
    static REG: OnceLock<RwLock<Registry>> = OnceLock::new();
    REG.get_or_init(|| {
        RwLock::new(Registry {
            names: Vec::new(),
            index: HashMap::new(),
        })
    })
}

/// Interned indeterminate.  Ordering follows registration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(u32);

impl VarId {
    /// Returns the variable with this display name, registering it if new.
    pub fn named(name: &str) -> VarId {
        if let Some(v) = Self::lookup(name) {
            return v;
        }
        let mut reg = registry().write().expect("variable registry poisoned");
        if let Some(&id) = reg.index.get(name) {
            return VarId(id);
        }
        let id = reg.names.len() as u32;
        reg.names.push(name.to_string());
        reg.index.insert(name.to_string(), id);
        VarId(id)
    }

    pub fn lookup(name: &str) -> Option<VarId> {
        let reg = registry().read().expect("variable registry poisoned");
        reg.index.get(name).map(|&id| VarId(id))
    }

    pub fn name(self) -> String {
        let reg = registry().read().expect("variable registry poisoned");
        reg.names[self.0 as usize].clone()
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A Laurent monomial: sorted `(variable, exponent)` pairs, no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarId, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn var_pow(v: VarId, e: i32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    /// Builds a monomial from arbitrary pairs, merging repeats and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, i32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<VarId, i32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: VarId) -> i32 {
        match self.0.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(pos) => self.0[pos].1,
            Err(_) => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, i32)> + '_ {
        self.0.iter().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, e)| (v, -e)).collect())
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Self::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inv())
    }

    /// Total degree (sum of exponents).
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e as i64).sum()
    }

    pub fn variables(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }
}

impl Ord for Monomial {
    /// Dense lexicographic comparison: absent variables count as exponent 0.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Equal,
                (Some(&(_, ea)), None) => return ea.cmp(&0),
                (None, Some(&(_, eb))) => return 0.cmp(&eb),
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                    Less => return ea.cmp(&0),
                    Greater => return 0.cmp(&eb),
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (idx, &(v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

/// Sparse Laurent polynomial over `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_monomial(Monomial::one())
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(v: VarId) -> Self {
        Self::from_monomial(Monomial::var(v))
    }

    /// Shorthand for the variable with the given name.
    pub fn named(name: &str) -> Self {
        Self::var(VarId::named(name))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Self::term(m, 1)
    }

    pub fn term<T: Into<BigInt>>(m: Monomial, c: T) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(it: I) -> Self {
        let mut p = LaurentPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c·m` in place.
    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    /// The single monomial and coefficient, when the polynomial is a term.
    pub fn as_term(&self) -> Option<(&Monomial, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Largest term in the dense lexicographic order.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn trailing_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Every variable occurring in some term, in registry order.
    pub fn variables(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.terms.keys().flat_map(|m| m.variables()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Minimum exponent of `v` over all terms (0 for the zero polynomial).
    pub fn min_exponent(&self, v: VarId) -> i32 {
        self.terms.keys().map(|m| m.exponent(v)).min().unwrap_or(0)
    }

    pub fn max_exponent(&self, v: VarId) -> i32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some((m, c)) = other.as_term() {
            return self.mul_term(m, c);
        }
        if let Some((m, c)) = self.as_term() {
            return other.mul_term(m, c);
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        LaurentPoly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Multiplication by a single term `c·m`.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn scale<T: Into<BigInt>>(&self, c: T) -> Self {
        self.mul_term(&Monomial::one(), &c.into())
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut out = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Exact quotient `self / d`; fails unless `d` divides `self` in the Laurent ring.
    pub fn exact_div(&self, d: &Self) -> Result<Self, LaurentError> {
        let (dl_m, dl_c) = d.leading_term().ok_or(LaurentError::NonExactDivision)?;
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if let Some((m, c)) = d.as_term() {
            let inv = m.inv();
            let mut terms = BTreeMap::new();
            for (k, v) in &self.terms {
                if (v % c).is_zero() {
                    terms.insert(k.mul(&inv), v / c);
                } else {
                    return Err(LaurentError::NonExactDivision);
                }
            }
            return Ok(LaurentPoly { terms });
        }
        // The quotient's terms come out in decreasing order and none can lie
        // below trailing(self)/trailing(d); anything below proves inexactness.
        let floor = self
            .trailing_term()
            .expect("nonzero")
            .0
            .div(d.trailing_term().expect("nonzero").0);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.div(dl_m);
            if qm < floor || !(rc % dl_c).is_zero() {
                return Err(LaurentError::NonExactDivision);
            }
            let qc = rc / dl_c;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    /// Replaces variables by Laurent polynomials.  Unassigned variables pass through.
    pub fn substitute(&self, assignment: &HashMap<VarId, LaurentPoly>) -> Result<Self, LaurentError> {
        let mut inverses: HashMap<VarId, LaurentPoly> = HashMap::new();
        let mut powers: HashMap<(VarId, i32), LaurentPoly> = HashMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut value = LaurentPoly::constant(c.clone());
            for (v, e) in m.iter() {
                let Some(img) = assignment.get(&v) else {
                    kept.push((v, e));
                    continue;
                };
                if !powers.contains_key(&(v, e)) {
                    let p = if e >= 0 {
                        img.pow(e as u32)
                    } else {
                        if !inverses.contains_key(&v) {
                            let inv = unit_inverse(img)
                                .ok_or_else(|| LaurentError::NonInvertibleImage(v.name()))?;
                            inverses.insert(v, inv);
                        }
                        inverses[&v].pow((-e) as u32)
                    };
                    powers.insert((v, e), p);
                }
                value = value.mul(&powers[&(v, e)]);
            }
            out = out.add(&value.mul_monomial(&Monomial(kept)));
        }
        Ok(out)
    }

    /// Exact evaluation at integer values.
    pub fn evaluate_exact(&self, point: &HashMap<VarId, BigInt>) -> Result<BigRational, LaurentError> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut num = c.clone();
            let mut den = BigInt::one();
            for (v, e) in m.iter() {
                let x = point.get(&v).ok_or_else(|| LaurentError::Unassigned(v.name()))?;
                if e < 0 {
                    if x.is_zero() {
                        return Err(LaurentError::ZeroToNegativePower(v.name()));
                    }
                    den *= num_traits::pow(x.clone(), (-e) as usize);
                } else {
                    num *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += BigRational::new(num, den);
        }
        Ok(total)
    }

    /// Exact evaluation at rational values.
    pub fn evaluate_rational(&self, point: &HashMap<VarId, BigRational>) -> Result<BigRational, LaurentError> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut value = BigRational::from_integer(c.clone());
            for (v, e) in m.iter() {
                let x = point.get(&v).ok_or_else(|| LaurentError::Unassigned(v.name()))?;
                if e < 0 && x.is_zero() {
                    return Err(LaurentError::ZeroToNegativePower(v.name()));
                }
                value *= x.pow(e);
            }
            total += value;
        }
        Ok(total)
    }

    /// Evaluation that insists on an integer result.
    pub fn evaluate_integer(&self, point: &HashMap<VarId, BigInt>) -> Result<BigInt, LaurentError> {
        let r = self.evaluate_exact(point)?;
        if r.is_integer() {
            Ok(r.to_integer())
        } else {
            Err(LaurentError::NonIntegralResult(r.to_string()))
        }
    }

    /// Sum of coefficients (evaluation at all variables = 1).
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Splits off the largest monomial denominator: `self = numerator / denominator`
    /// with `numerator` a polynomial not divisible by any variable in the denominator.
    pub fn numerator_denominator(&self) -> (LaurentPoly, Monomial) {
        let den = Monomial::from_pairs(
            self.variables()
                .into_iter()
                .map(|v| (v, -self.min_exponent(v)))
                .filter(|&(_, e)| e > 0),
        );
        (self.mul_monomial(&den), den)
    }

    /// Canonical JSON value (`{"terms":[{"coeff":"3","mono":{"x1":2}}]}`).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, LaurentError> {
        serde_json::from_value(v.clone()).map_err(|e| LaurentError::Parse(e.to_string()))
    }
}

/// Inverse of a unit `±m`, or `None` if the polynomial is not a unit.
fn unit_inverse(p: &LaurentPoly) -> Option<LaurentPoly> {
    let (m, c) = p.as_term()?;
    if c.abs().is_one() {
        Some(LaurentPoly::term(m.inv(), c.clone()))
    } else {
        None
    }
}

macro_rules! impl_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                LaurentPoly::$inner(self, rhs)
            }
        }
        impl std::ops::$tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                LaurentPoly::$inner(&self, &rhs)
            }
        }
    };
}
impl_binop!(Add, add, add);
impl_binop!(Sub, sub, sub);
impl_binop!(Mul, mul, mul);

impl std::ops::Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::neg(&self)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", abs, m)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Name(String),
    Caret,
    Star,
    Plus,
    Minus,
}

fn tokenize(s: &str) -> Result<Vec<Token>, LaurentError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Int(text.parse().map_err(|_| LaurentError::Parse(text))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if i < chars.len() && chars[i] == '[' {
                while i < chars.len() && chars[i] != ']' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(LaurentError::Parse("unterminated '['".into()));
                }
                i += 1;
            }
            let name: String = chars[start..i].iter().filter(|c| !c.is_whitespace()).collect();
            out.push(Token::Name(name));
        } else {
            out.push(match c {
                '^' => Token::Caret,
                '*' => Token::Star,
                '+' => Token::Plus,
                '-' => Token::Minus,
                other => return Err(LaurentError::Parse(format!("unexpected character '{}'", other))),
            });
            i += 1;
        }
    }
    Ok(out)
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks = tokenize(s)?;
        let mut pos = 0;
        let mut out = LaurentPoly::zero();
        if toks.is_empty() {
            return Err(LaurentError::Parse("empty input".into()));
        }
        loop {
            let mut sign = BigInt::one();
            while let Some(t @ (Token::Plus | Token::Minus)) = toks.get(pos) {
                if *t == Token::Minus {
                    sign = -sign;
                }
                pos += 1;
            }
            let mut coeff = sign;
            let mut pairs = Vec::new();
            let mut factors = 0;
            loop {
                match toks.get(pos) {
                    Some(Token::Int(n)) => {
                        coeff *= n;
                        pos += 1;
                    }
                    Some(Token::Name(name)) => {
                        pos += 1;
                        let mut e: i32 = 1;
                        if toks.get(pos) == Some(&Token::Caret) {
                            pos += 1;
                            let mut neg = false;
                            while let Some(t @ (Token::Plus | Token::Minus)) = toks.get(pos) {
                                neg ^= *t == Token::Minus;
                                pos += 1;
                            }
                            match toks.get(pos) {
                                Some(Token::Int(n)) => {
                                    let v = n
                                        .to_i32()
                                        .ok_or_else(|| LaurentError::Parse("exponent too large".into()))?;
                                    e = if neg { -v } else { v };
                                    pos += 1;
                                }
                                _ => return Err(LaurentError::Parse("expected exponent".into())),
                            }
                        }
                        pairs.push((VarId::named(name), e));
                    }
                    _ => break,
                }
                factors += 1;
                if toks.get(pos) == Some(&Token::Star) {
                    pos += 1;
                }
            }
            if factors == 0 {
                return Err(LaurentError::Parse(format!("expected a term at token {}", pos)));
            }
            out.add_term(Monomial::from_pairs(pairs), coeff);
            match toks.get(pos) {
                None => break,
                Some(Token::Plus | Token::Minus) => {}
                Some(t) => return Err(LaurentError::Parse(format!("unexpected token {:?}", t))),
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    mono: BTreeMap<String, i32>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    terms: Vec<TermJson>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    coeff: c.to_string(),
                    mono: m.iter().map(|(v, e)| (v.name(), e)).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        let mut out = LaurentPoly::zero();
        for t in raw.terms {
            let c: BigInt = t.coeff.parse().map_err(serde::de::Error::custom)?;
            let m = Monomial::from_pairs(t.mono.into_iter().map(|(n, e)| (VarId::named(&n), e)));
            out.add_term(m, c);
        }
        Ok(out)
    }
}
