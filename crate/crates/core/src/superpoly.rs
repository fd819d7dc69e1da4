//! Supercommutative differential polynomials with exact rational coefficients.
//!
//! A [`DiffPoly`] lives in the free differential superalgebra generated by
//! parity-graded variables `u^{(n)}`. Spectral parameters such as `λ` and `μ`
//! are modelled as even variables annihilated by `∂`, so polynomials in the
//! parameters with differential-polynomial coefficients share the same type.
//!
//! ```
//! use sato::superpoly::{DiffPoly, Var};
//!
//! let t1 = DiffPoly::var(Var::named("t1", true));
//! let t2 = DiffPoly::var(Var::named("t2", true));
//! assert!((&t1 * &t2 + &t2 * &t1).is_zero());
//! assert!((&t1 * &t1).is_zero());
//! ```

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::RwLock;

/// Exact rational scalar.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Scalar {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `(-1)^k` as a scalar.
pub fn sign(k: bool) -> Scalar {
    if k {
        int(-1)
    } else {
        int(1)
    }
}

/// Generalized binomial coefficient `binom(n, k)` for any integer `n`.
pub fn binomial(n: i64, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..k as i64 {
        num *= BigInt::from(n - t);
        den *= BigInt::from(t + 1);
    }
    num / den
}

static NAMES: RwLock<Vec<&'static str>> = RwLock::new(Vec::new());

/// Interned name of a user-defined variable family.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Name(u32);

impl Name {
    pub fn intern(s: &str) -> Name {
        if let Some(p) = NAMES.read().unwrap().iter().position(|n| *n == s) {
            return Name(p as u32);
        }
        let mut names = NAMES.write().unwrap();
        if let Some(p) = names.iter().position(|n| *n == s) {
            return Name(p as u32);
        }
        names.push(Box::leak(s.to_owned().into_boxed_str()));
        Name(names.len() as u32 - 1)
    }

    pub fn as_str(self) -> &'static str {
        NAMES.read().unwrap()[self.0 as usize]
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            Ordering::Equal
        } else {
            self.as_str().cmp(other.as_str())
        }
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// Variable family. Parameter families are even and `∂`-constant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Family {
    /// Generic operator coefficients `u_{M,ab}`.
    U,
    /// Affine generators `q_{ij}`.
    Q,
    /// Abstract W-generators `w_{ij;k}`.
    W,
    Named(Name),
    Lambda,
    Mu,
    Nu,
    Eps,
}

impl Family {
    pub fn is_parameter(self) -> bool {
        matches!(self, Family::Lambda | Family::Mu | Family::Nu | Family::Eps)
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::U => "u",
            Family::Q => "q",
            Family::W => "w",
            Family::Named(n) => n.as_str(),
            Family::Lambda => "lambda",
            Family::Mu => "mu",
            Family::Nu => "nu",
            Family::Eps => "eps",
        }
    }

    pub fn from_label(s: &str) -> Family {
        match s {
            "u" => Family::U,
            "q" => Family::Q,
            "w" => Family::W,
            "lambda" => Family::Lambda,
            "mu" => Family::Mu,
            "nu" => Family::Nu,
            "eps" => Family::Eps,
            other => Family::Named(Name::intern(other)),
        }
    }
}

/// A variable `x^{(der)}`; the parity is stored on the key.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var {
    pub family: Family,
    pub m: Option<u16>,
    pub i: u16,
    pub j: u16,
    pub der: u16,
    pub odd: bool,
}

impl Var {
    pub fn u(m: usize, i: usize, j: usize, odd: bool) -> Var {
        Var { family: Family::U, m: Some(m as u16), i: i as u16, j: j as u16, der: 0, odd }
    }

    pub fn q(i: usize, j: usize, odd: bool) -> Var {
        Var { family: Family::Q, m: None, i: i as u16, j: j as u16, der: 0, odd }
    }

    pub fn w(k: usize, i: usize, j: usize, odd: bool) -> Var {
        Var { family: Family::W, m: Some(k as u16), i: i as u16, j: j as u16, der: 0, odd }
    }

    pub fn named(name: &str, odd: bool) -> Var {
        Var { family: Family::Named(Name::intern(name)), m: None, i: 0, j: 0, der: 0, odd }
    }

    pub fn param(family: Family) -> Var {
        debug_assert!(family.is_parameter());
        Var { family, m: None, i: 0, j: 0, der: 0, odd: false }
    }

    pub fn lambda() -> Var {
        Var::param(Family::Lambda)
    }

    pub fn is_parameter(&self) -> bool {
        self.family.is_parameter()
    }

    /// The variable with derivative order raised by `n`.
    pub fn d(&self, n: u16) -> Var {
        Var { der: self.der + n, ..*self }
    }

    /// The underlying generator (derivative order zero).
    pub fn base(&self) -> Var {
        Var { der: 0, ..*self }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::U => write!(f, "u{}_{}{}", self.m.unwrap_or(0), self.i, self.j)?,
            Family::Q => write!(f, "q{}_{}", self.i, self.j)?,
            Family::W => write!(f, "w{}_{}{}", self.m.unwrap_or(0), self.i, self.j)?,
            fam => match (self.m, self.i, self.j) {
                (None, 0, 0) => write!(f, "{}", fam.label())?,
                (m, i, j) => {
                    write!(f, "{}", fam.label())?;
                    if let Some(m) = m {
                        write!(f, "{m}_")?;
                    }
                    write!(f, "{i}{j}")?
                }
            },
        }
        match self.der {
            0 => Ok(()),
            1..=3 => write!(f, "{}", "'".repeat(self.der as usize)),
            n => write!(f, "^({n})"),
        }
    }
}

type Factors = SmallVec<[(Var, u32); 4]>;

/// A monomial: strictly sorted factors, odd variables with exponent one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Factors);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.0.iter().filter(|(v, _)| v.odd).count() % 2 == 1
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// Builds the canonical product of the given factors taken in order,
    /// returning the Koszul sign (`true` for negative) or `None` if it vanishes.
    pub fn from_factors(list: &[(Var, u32)]) -> Option<(Monomial, bool)> {
        let mut acc = Monomial::one();
        let mut neg = false;
        for &(v, e) in list {
            if e == 0 {
                continue;
            }
            if v.odd && e > 1 {
                return None;
            }
            let (m, s) = acc.mul(&Monomial(SmallVec::from_elem((v, e), 1)))?;
            acc = m;
            neg ^= s;
        }
        Some((acc, neg))
    }

    /// Supercommutative product with Koszul sign.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let (a, b) = (&self.0, &other.0);
        let mut out: Factors = SmallVec::with_capacity(a.len() + b.len());
        let mut neg = false;
        let mut odd_left = a.iter().filter(|f| f.0.odd).count();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    if a[i].0.odd {
                        odd_left -= 1;
                    }
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    if b[j].0.odd && odd_left % 2 == 1 {
                        neg = !neg;
                    }
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    if a[i].0.odd {
                        return None;
                    }
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for f in &b[j..] {
            if f.0.odd && odd_left % 2 == 1 {
                neg = !neg;
            }
            out.push(*f);
        }
        Some((Monomial(out), neg))
    }

    /// Inserts `y` as if written at factor position `pos` of `self`.
    fn insert_at(&self, pos: usize, y: Var) -> Option<(Monomial, bool)> {
        let mut f = self.0.clone();
        match f.binary_search_by(|(v, _)| v.cmp(&y)) {
            Ok(q) => {
                if y.odd {
                    return None;
                }
                f[q].1 += 1;
                Some((Monomial(f), false))
            }
            Err(q) => {
                let neg = if y.odd {
                    let (lo, hi) = if q >= pos { (pos, q) } else { (q, pos) };
                    f[lo..hi].iter().filter(|(v, _)| v.odd).count() % 2 == 1
                } else {
                    false
                };
                f.insert(q, (y, 1));
                Some((Monomial(f), neg))
            }
        }
    }

    fn odd_before(&self, pos: usize) -> bool {
        self.0[..pos].iter().filter(|(v, _)| v.odd).count() % 2 == 1
    }
}

/// Parity of a homogeneous element.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// A differential superpolynomial in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl DiffPoly {
    pub fn zero() -> DiffPoly {
        DiffPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> DiffPoly {
        DiffPoly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> DiffPoly {
        let mut p = DiffPoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn int(n: i64) -> DiffPoly {
        DiffPoly::constant(int(n))
    }

    pub fn var(v: Var) -> DiffPoly {
        DiffPoly::monomial(Monomial(SmallVec::from_elem((v, 1), 1)), Scalar::one())
    }

    /// `x^e` for even `x`, or `x` itself when `e = 1`.
    pub fn var_pow(v: Var, e: u32) -> DiffPoly {
        if e == 0 {
            return DiffPoly::one();
        }
        if v.odd && e > 1 {
            return DiffPoly::zero();
        }
        DiffPoly::monomial(Monomial(SmallVec::from_elem((v, e), 1)), Scalar::one())
    }

    pub fn lambda() -> DiffPoly {
        DiffPoly::var(Var::lambda())
    }

    pub fn param(f: Family) -> DiffPoly {
        DiffPoly::var(Var::param(f))
    }

    pub fn monomial(m: Monomial, c: Scalar) -> DiffPoly {
        let mut p = DiffPoly::zero();
        p.add_term(m, c);
        p
    }

    /// Product of the given factors in the written order.
    pub fn product_of(list: &[(Var, u32)], c: Scalar) -> DiffPoly {
        match Monomial::from_factors(list) {
            None => DiffPoly::zero(),
            Some((m, neg)) => DiffPoly::monomial(m, if neg { -c } else { c }),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Scalar)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one())
    }

    /// True if no non-parameter variable occurs.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|(v, _)| v.is_parameter()))
    }

    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            if m.is_odd() {
                odd = true
            } else {
                even = true
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    /// Even and odd parts.
    pub fn split_parity(&self) -> (DiffPoly, DiffPoly) {
        let mut e = DiffPoly::zero();
        let mut o = DiffPoly::zero();
        for (m, c) in &self.terms {
            if m.is_odd() {
                o.terms.insert(m.clone(), c.clone());
            } else {
                e.terms.insert(m.clone(), c.clone());
            }
        }
        (e, o)
    }

    pub fn scale(&self, c: &Scalar) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn scale_int(&self, n: i64) -> DiffPoly {
        self.scale(&int(n))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (a, x) in &self.terms {
            if let Some((p, neg)) = a.mul(m) {
                let v = x * c;
                out.add_term(p, if neg { -v } else { v });
            }
        }
        out
    }

    /// All variables occurring, including derivatives.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| *v)).collect()
    }

    /// Underlying non-parameter generators.
    pub fn generators(&self) -> BTreeSet<Var> {
        self.vars().into_iter().filter(|v| !v.is_parameter()).map(|v| v.base()).collect()
    }

    /// Highest derivative order of generator `g` occurring.
    pub fn max_der(&self, g: &Var) -> Option<u16> {
        self.vars().into_iter().filter(|v| v.base() == g.base()).map(|v| v.der).max()
    }

    /// The total derivative `∂`.
    pub fn d(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (p, &(v, e)) in m.0.iter().enumerate() {
                if v.is_parameter() {
                    continue;
                }
                let mut rest = m.clone();
                if e == 1 {
                    rest.0.remove(p);
                } else {
                    rest.0[p].1 -= 1;
                }
                let pos = if e == 1 { p } else { p + 1 };
                if let Some((r, neg)) = rest.insert_at(pos, v.d(1)) {
                    let x = c * int(e as i64);
                    out.add_term(r, if neg { -x } else { x });
                }
            }
        }
        out
    }

    /// `∂^n`.
    pub fn d_n(&self, n: usize) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            if p.is_zero() {
                break;
            }
            p = p.d();
        }
        p
    }

    /// Left partial derivative `∂/∂v`, a derivation of the parity of `v`.
    pub fn partial(&self, v: &Var) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            if let Ok(p) = m.0.binary_search_by(|(x, _)| x.cmp(v)) {
                let e = m.0[p].1;
                let mut r = m.clone();
                if e == 1 {
                    r.0.remove(p);
                } else {
                    r.0[p].1 -= 1;
                }
                let neg = v.odd && m.odd_before(p);
                let x = c * int(e as i64);
                out.add_term(r, if neg { -x } else { x });
            }
        }
        out
    }

    /// `δ/δg = Σ_n (−∂)^n ∂/∂g^{(n)}` for a generator `g`.
    pub fn variational(&self, g: &Var) -> DiffPoly {
        let g = g.base();
        let Some(top) = self.max_der(&g) else {
            return DiffPoly::zero();
        };
        let mut out = DiffPoly::zero();
        for n in 0..=top {
            let p = self.partial(&g.d(n)).d_n(n as usize);
            if n % 2 == 0 {
                out += &p;
            } else {
                out -= &p;
            }
        }
        out
    }

    /// Whether `self ∈ ∂V`; rejects a nonzero constant term.
    pub fn is_total_derivative(&self) -> Result<bool> {
        if !self.constant_term().is_zero() {
            return Err(Error::ConstantTerm);
        }
        let params: BTreeSet<Var> = self.vars().into_iter().filter(|v| v.is_parameter()).collect();
        if !params.is_empty() {
            for (_, c) in self.param_split() {
                if !c.is_total_derivative()? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        Ok(self.generators().iter().all(|g| self.variational(g).is_zero()))
    }

    /// Splits by the monomial in parameter variables.
    pub fn param_split(&self) -> BTreeMap<Monomial, DiffPoly> {
        let mut out: BTreeMap<Monomial, DiffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (pf, rest): (Factors, Factors) = m.0.iter().copied().partition(|(v, _)| v.is_parameter());
            out.entry(Monomial(pf)).or_default().add_term(Monomial(rest), c.clone());
        }
        out
    }

    /// Coefficients of the powers of a single parameter.
    pub fn coeffs_in(&self, f: Family) -> BTreeMap<u32, DiffPoly> {
        let mut out: BTreeMap<u32, DiffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = 0;
            let mut rest = m.clone();
            if let Some(p) = rest.0.iter().position(|(v, _)| v.family == f) {
                e = rest.0[p].1;
                rest.0.remove(p);
            }
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Degree in a parameter (`None` for zero).
    pub fn degree_in(&self, f: Family) -> Option<u32> {
        self.coeffs_in(f).keys().next_back().copied()
    }

    /// Setting a parameter to zero.
    pub fn at_zero(&self, f: Family) -> DiffPoly {
        self.coeffs_in(f).remove(&0).unwrap_or_default()
    }

    /// Renames one parameter to another.
    pub fn rename_param(&self, from: Family, to: Family) -> DiffPoly {
        if from == to {
            return self.clone();
        }
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let list: Factors = m
                .0
                .iter()
                .map(|&(v, e)| if v.family == from { (Var::param(to), e) } else { (v, e) })
                .collect();
            let mut f: Factors = SmallVec::new();
            for (v, e) in list {
                match f.binary_search_by(|(x, _)| x.cmp(&v)) {
                    Ok(p) => f[p].1 += e,
                    Err(p) => f.insert(p, (v, e)),
                }
            }
            out.add_term(Monomial(f), c.clone());
        }
        out
    }

    /// Differential-algebra homomorphism determined by images of generators.
    ///
    /// `map` receives a variable of derivative order zero; variables it does
    /// not map are kept. Derivatives map to derivatives of the images.
    pub fn substitute(&self, map: &dyn Fn(&Var) -> Option<DiffPoly>) -> DiffPoly {
        let mut cache: HashMap<Var, Option<DiffPoly>> = HashMap::new();
        let mut image = |v: &Var| -> Option<DiffPoly> {
            if let Some(x) = cache.get(v) {
                return x.clone();
            }
            let x = map(&v.base()).map(|p| p.d_n(v.der as usize));
            cache.insert(*v, x.clone());
            x
        };
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = DiffPoly::constant(c.clone());
            let mut pending: Factors = SmallVec::new();
            for &(v, e) in m.0.iter() {
                match image(&v) {
                    None => pending.push((v, e)),
                    Some(p) => {
                        if !pending.is_empty() {
                            acc = &acc * &DiffPoly::product_of(&pending, Scalar::one());
                            pending.clear();
                        }
                        for _ in 0..e {
                            acc = &acc * &p;
                        }
                    }
                }
                if acc.is_zero() {
                    break;
                }
            }
            if !pending.is_empty() {
                acc = &acc * &DiffPoly::product_of(&pending, Scalar::one());
            }
            out += &acc;
        }
        out
    }

    /// Applies the even derivation with `D(v)` given on every variable.
    pub fn apply_derivation(&self, image: &mut dyn FnMut(&Var) -> DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (p, &(v, e)) in m.0.iter().enumerate() {
                let dv = image(&v);
                if dv.is_zero() {
                    continue;
                }
                let mut left: Factors = m.0[..p].into();
                if e > 1 {
                    left.push((v, e - 1));
                }
                let l = DiffPoly::product_of(&left, c * int(e as i64));
                let r = DiffPoly::product_of(&m.0[p + 1..], Scalar::one());
                out += &(&(&l * &dv) * &r);
            }
        }
        out
    }

    /// Applies the flow derivation extending `D(g^{(n)}) = ∂^n D(g)`.
    pub fn apply_evolution(&self, gen_image: &dyn Fn(&Var) -> Option<DiffPoly>) -> DiffPoly {
        let mut cache: HashMap<Var, DiffPoly> = HashMap::new();
        self.apply_derivation(&mut |v: &Var| {
            if v.is_parameter() {
                return DiffPoly::zero();
            }
            cache
                .entry(*v)
                .or_insert_with(|| gen_image(&v.base()).map(|p| p.d_n(v.der as usize)).unwrap_or_default())
                .clone()
        })
    }

    /// `(s·x + s·∂)^n` applied to `self`, where `x` is the parameter `f` and `s = ±1`.
    pub fn shift_pow(&self, f: Family, n: u32, negate: bool) -> DiffPoly {
        let x = Var::param(f);
        let mut out = DiffPoly::zero();
        let mut dp = self.clone();
        for t in 0..=n {
            if dp.is_zero() {
                break;
            }
            let b = BigRational::from_integer(binomial(n as i64, t));
            let term = dp.mul_monomial(&Monomial(SmallVec::from_elem((x, n - t), 1)).normalize(), &b);
            out += &term;
            if t < n {
                dp = dp.d();
            }
        }
        if negate && n % 2 == 1 {
            -out
        } else {
            out
        }
    }

    /// Maximum polynomial degree over monomials, parameters excluded.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.0.iter().filter(|(v, _)| !v.is_parameter()).map(|(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    /// Homogeneous component of a given polynomial degree (parameters excluded).
    pub fn degree_part(&self, d: u32) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0.iter().filter(|(v, _)| !v.is_parameter()).map(|(_, e)| e).sum::<u32>() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl Monomial {
    fn normalize(self) -> Monomial {
        Monomial(self.0.into_iter().filter(|(_, e)| *e > 0).collect())
    }
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let body: Vec<String> = m
                .0
                .iter()
                .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", body.join(" "))?;
            } else {
                write!(f, "{a} {}", body.join(" "))?;
            }
        }
        Ok(())
    }
}

impl From<Var> for DiffPoly {
    fn from(v: Var) -> Self {
        DiffPoly::var(v)
    }
}

impl From<Scalar> for DiffPoly {
    fn from(c: Scalar) -> Self {
        DiffPoly::constant(c)
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl AddAssign<DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: DiffPoly) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = std::mem::replace(self, rhs);
            *self += &lhs;
        } else {
            for (m, c) in rhs.terms {
                self.add_term(m, c);
            }
        }
    }
}

impl SubAssign<DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: DiffPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(mut self) -> DiffPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                if let Some((m, neg)) = a.mul(b) {
                    let c = x * y;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }
}

macro_rules! forward_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $f(self, rhs: DiffPoly) -> DiffPoly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $f(self, rhs: &DiffPoly) -> DiffPoly {
                (&self).$f(rhs)
            }
        }
        impl $tr<DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $f(self, rhs: DiffPoly) -> DiffPoly {
                self.$f(&rhs)
            }
        }
    };
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::iter::Sum for DiffPoly {
    fn sum<I: Iterator<Item = DiffPoly>>(iter: I) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for p in iter {
            out += p;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> DiffPoly {
        DiffPoly::var(Var::named("u", false))
    }
    fn v() -> DiffPoly {
        DiffPoly::var(Var::named("v", false))
    }
    fn th(k: usize) -> DiffPoly {
        DiffPoly::var(Var::named(&format!("theta{k}"), true))
    }

    #[test]
    fn addition_cancels() {
        assert!((u() + (-u())).is_zero());
        assert_eq!(u() + v() + v(), u() + v().scale_int(2));
        assert!((&th(1) * &th(2) + &th(2) * &th(1)).is_zero());
    }

    #[test]
    fn products_carry_koszul_signs() {
        assert!((&th(1) * &th(1)).is_zero());
        assert_eq!(&th(2) * &th(1), -(&th(1) * &th(2)));
        let a = u() + th(1);
        assert_eq!(&a * &a, &u() * &u() + (&u() * &th(1)).scale_int(2));
    }

    #[test]
    fn derivative_is_even_leibniz() {
        assert_eq!((u() * v()).d(), u().d() * v() + u() * v().d());
        assert_eq!((th(1) * th(2)).d(), th(1).d() * th(2) + th(1) * th(2).d());
        assert_eq!((u() * u()).d(), (u() * u().d()).scale_int(2));
        assert!(DiffPoly::lambda().d().is_zero());
    }

    #[test]
    fn partial_derivatives() {
        let uv = Var::named("u", false);
        assert_eq!((u() * u().d_n(2)).partial(&uv), u().d_n(2));
        let t2 = Var::named("theta2", true);
        assert_eq!((th(1) * th(2)).partial(&t2), -th(1));
        assert!((u() * u()).partial(&uv.d(1)).is_zero());
    }

    #[test]
    fn variational_derivatives() {
        let uv = Var::named("u", false);
        assert_eq!((u() * u().d_n(2)).variational(&uv), u().d_n(2).scale_int(2));
        assert!((u().d() * u()).variational(&uv).is_zero());
        assert_eq!((u() * u() * u()).variational(&uv), (u() * u()).scale_int(3));
    }

    #[test]
    fn total_derivatives() {
        assert!((u().d() * u()).is_total_derivative().unwrap());
        assert!(!(u() * u()).is_total_derivative().unwrap());
        assert!((u().d_n(2) * v() + u().d() * v().d()).is_total_derivative().unwrap());
        assert_eq!(DiffPoly::one().is_total_derivative(), Err(Error::ConstantTerm));
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(binomial(-1, 3), BigInt::from(-1));
        assert_eq!(binomial(-2, 2), BigInt::from(3));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 3), BigInt::from(0));
    }

    #[test]
    fn shift_powers() {
        // (λ+∂)^2 u = λ^2 u + 2λ u' + u''
        let l = DiffPoly::lambda();
        let expect = &(&l * &l) * &u() + (&l * &u().d()).scale_int(2) + u().d_n(2);
        assert_eq!(u().shift_pow(Family::Lambda, 2, false), expect);
        assert_eq!(u().shift_pow(Family::Lambda, 1, true), -(&l * &u()) - u().d());
    }

    #[test]
    fn substitution_is_differential() {
        let uv = Var::named("u", false);
        let img = v() * v();
        let p = u().d() * u();
        let s = p.substitute(&|x: &Var| if *x == uv { Some(img.clone()) } else { None });
        assert_eq!(s, img.d() * img.clone());
    }
}
