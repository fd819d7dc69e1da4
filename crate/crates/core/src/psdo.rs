//! Scalar pseudo-differential operators `Σ a_k ∂^k` with explicit truncation.
//!
//! Every operator carries a floor: `None` means the operator is known
//! exactly, `Some(t)` means coefficients at exponents below `t` are unknown.
//! Products compute the trusted floor of the result, so truncation is never
//! silent.
//!
//! ```
//! use sato::psdo::Psdo;
//! use sato::superpoly::{DiffPoly, Var};
//!
//! let u = DiffPoly::var(Var::named("u", false));
//! let inv = Psdo::d_pow(-1).truncate(-3);
//! let p = inv.compose(&Psdo::mult(u.clone()));
//! assert_eq!(p.coeff(-2), -u.d());
//! assert_eq!(p.floor(), Some(-3));
//! ```

use crate::error::{Error, Result};
use crate::superpoly::{binomial, int, DiffPoly, Family, Scalar};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Psdo {
    coeffs: BTreeMap<i32, DiffPoly>,
    floor: Option<i32>,
}

fn max_opt(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Psdo {
    /// Builds an operator, dropping zero coefficients and those below the floor.
    pub fn new(coeffs: BTreeMap<i32, DiffPoly>, floor: Option<i32>) -> Psdo {
        let coeffs = coeffs
            .into_iter()
            .filter(|(k, c)| !c.is_zero() && floor.is_none_or(|f| *k >= f))
            .collect();
        Psdo { coeffs, floor }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, DiffPoly)>) -> Psdo {
        let mut map: BTreeMap<i32, DiffPoly> = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_default() += c;
        }
        Psdo::new(map, None)
    }

    pub fn zero() -> Psdo {
        Psdo::default()
    }

    pub fn one() -> Psdo {
        Psdo::mult(DiffPoly::one())
    }

    /// Multiplication operator by `f`.
    pub fn mult(f: DiffPoly) -> Psdo {
        Psdo::from_terms([(0, f)])
    }

    /// `∂^k`.
    pub fn d_pow(k: i32) -> Psdo {
        Psdo::from_terms([(k, DiffPoly::one())])
    }

    /// `(∂ + x)^e` for the parameter `x`, truncated at `floor` when `e < 0`.
    pub fn shifted_power(x: Family, e: i32, floor: i32) -> Psdo {
        let mut map = BTreeMap::new();
        let mut n: u32 = 0;
        loop {
            let k = e - n as i32;
            if e >= 0 && n as i32 > e {
                break;
            }
            if e < 0 && k < floor {
                break;
            }
            let c = DiffPoly::var_pow(crate::superpoly::Var::param(x), n)
                .scale(&BigRational::from_integer(binomial(e as i64, n)));
            map.insert(k, c);
            n += 1;
        }
        let fl = if e < 0 { Some(floor) } else { None };
        Psdo::new(map, fl)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, DiffPoly> {
        &self.coeffs
    }

    pub fn floor(&self) -> Option<i32> {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn top(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Lowest stored exponent.
    pub fn bottom(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    /// Coefficient at `∂^k` regardless of trust.
    pub fn coeff(&self, k: i32) -> DiffPoly {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    /// Coefficient at `∂^k`, rejecting untrusted exponents.
    pub fn coeff_checked(&self, k: i32) -> Result<DiffPoly> {
        match self.floor {
            Some(f) if k < f => Err(Error::Untrusted { needed: k, floor: f }),
            _ => Ok(self.coeff(k)),
        }
    }

    pub fn is_differential(&self) -> bool {
        self.floor.is_none() && self.bottom().is_none_or(|b| b >= 0)
    }

    /// Drops coefficients below `t` and records the floor.
    pub fn truncate(&self, t: i32) -> Psdo {
        let floor = max_opt(self.floor, Some(t));
        Psdo::new(self.coeffs.clone(), floor)
    }

    pub fn with_floor(mut self, floor: Option<i32>) -> Psdo {
        self.floor = floor;
        self.coeffs.retain(|k, _| floor.is_none_or(|f| *k >= f));
        self
    }

    pub fn map_coeffs(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> Psdo {
        Psdo::new(self.coeffs.iter().map(|(k, c)| (*k, f(c))).collect(), self.floor)
    }

    pub fn scale(&self, c: &Scalar) -> Psdo {
        self.map_coeffs(|p| p.scale(c))
    }

    /// Left multiplication of every coefficient by `f`.
    pub fn left_mul(&self, f: &DiffPoly) -> Psdo {
        self.map_coeffs(|p| f * p)
    }

    /// Trusted floor of a product.
    fn product_floor(&self, other: &Psdo) -> Option<i32> {
        let (ta, tb) = (self.top(), other.top());
        let mut out = None;
        if let (Some(fa), Some(tb)) = (self.floor, tb) {
            out = max_opt(out, Some(fa + tb));
        }
        if let (Some(ta), Some(fb)) = (ta, other.floor) {
            out = max_opt(out, Some(ta + fb));
        }
        if let (Some(fa), Some(fb)) = (self.floor, other.floor) {
            out = max_opt(out, Some(fa + fb - 1));
        }
        out
    }

    /// Composition `self ∘ other` with the inherited trusted floor.
    ///
    /// Panics if both operators are exact and the expansion does not
    /// terminate; truncate one factor first.
    pub fn compose(&self, other: &Psdo) -> Psdo {
        self.compose_to(other, None)
    }

    /// Composition truncated at `target` (in addition to the inherited floor).
    pub fn compose_to(&self, other: &Psdo, target: Option<i32>) -> Psdo {
        if (self.is_zero() && self.floor.is_none()) || (other.is_zero() && other.floor.is_none()) {
            return Psdo::zero();
        }
        let floor = max_opt(self.product_floor(other), target);
        let mut out: BTreeMap<i32, DiffPoly> = BTreeMap::new();
        for (&j, b) in &other.coeffs {
            let constant = b.is_constant();
            let mut ders: Vec<DiffPoly> = vec![b.clone()];
            for (&i, a) in &self.coeffs {
                let mut n: u32 = 0;
                loop {
                    let e = i + j - n as i32;
                    if floor.is_some_and(|f| e < f) || (i >= 0 && n as i32 > i) {
                        break;
                    }
                    if n > 0 && constant {
                        break;
                    }
                    if floor.is_none() && i < 0 && !constant && n > 0 {
                        panic!("non-terminating expansion of exact operators; truncate first");
                    }
                    while ders.len() <= n as usize {
                        let next = ders.last().unwrap().d();
                        ders.push(next);
                    }
                    let bd = &ders[n as usize];
                    if bd.is_zero() {
                        break;
                    }
                    let bin = binomial(i as i64, n);
                    if !bin.is_zero() {
                        let term = (a * bd).scale(&BigRational::from_integer(bin));
                        *out.entry(e).or_default() += term;
                    }
                    n += 1;
                }
            }
        }
        Psdo::new(out, floor)
    }

    /// The coefficient of `∂^e` in `self ∘ other`.
    pub fn compose_coeff(&self, other: &Psdo, e: i32) -> Result<DiffPoly> {
        if let Some(f) = self.product_floor(other) {
            if e < f {
                return Err(Error::Untrusted { needed: e, floor: f });
            }
        }
        let mut out = DiffPoly::zero();
        for (&j, b) in &other.coeffs {
            let mut ders: Vec<DiffPoly> = vec![b.clone()];
            for (&i, a) in &self.coeffs {
                let n = i + j - e;
                if n < 0 || (i >= 0 && n > i) || (n > 0 && b.is_constant()) {
                    continue;
                }
                while ders.len() <= n as usize {
                    let next = ders.last().unwrap().d();
                    ders.push(next);
                }
                let bin = binomial(i as i64, n as u32);
                out += &(a * &ders[n as usize]).scale(&BigRational::from_integer(bin));
            }
        }
        Ok(out)
    }

    /// `n`-fold composition power (`n ≥ 0`), truncated at `target`.
    pub fn pow_to(&self, n: usize, target: Option<i32>) -> Psdo {
        let mut acc = Psdo::one();
        for _ in 0..n {
            acc = acc.compose_to(self, target);
        }
        acc
    }

    /// Formal adjoint `Σ (−∂)^k ∘ a_k`; the floor is preserved.
    pub fn adjoint(&self) -> Psdo {
        let mut out: BTreeMap<i32, DiffPoly> = BTreeMap::new();
        for (&k, a) in &self.coeffs {
            let s = if k.rem_euclid(2) == 1 { int(-1) } else { int(1) };
            let constant = a.is_constant();
            let mut d = a.clone();
            let mut n: u32 = 0;
            loop {
                let e = k - n as i32;
                if self.floor.is_some_and(|f| e < f) || (k >= 0 && n as i32 > k) || d.is_zero() {
                    break;
                }
                if n > 0 && constant {
                    break;
                }
                if self.floor.is_none() && k < 0 && n > 0 {
                    panic!("non-terminating adjoint of an exact operator; truncate first");
                }
                let c = BigRational::from_integer(binomial(k as i64, n)) * &s;
                *out.entry(e).or_default() += d.scale(&c);
                d = d.d();
                n += 1;
            }
        }
        Psdo::new(out, self.floor)
    }

    /// Coefficient of `∂^{-1}`.
    pub fn residue(&self) -> Result<DiffPoly> {
        self.coeff_checked(-1)
    }

    /// Differential part, always exact.
    pub fn plus(&self) -> Result<Psdo> {
        if let Some(f) = self.floor {
            if f > 0 {
                return Err(Error::Untrusted { needed: 0, floor: f });
            }
        }
        Ok(Psdo::new(self.coeffs.range(0..).map(|(k, c)| (*k, c.clone())).collect(), None))
    }

    /// Integral part, inheriting the floor.
    pub fn minus(&self) -> Psdo {
        Psdo::new(self.coeffs.range(..0).map(|(k, c)| (*k, c.clone())).collect(), self.floor)
    }

    /// `A(∂ + x)` for a parameter `x`, truncated at `floor` where needed.
    pub fn shift(&self, x: Family) -> Psdo {
        let mut acc = Psdo::new(BTreeMap::new(), self.floor);
        for (&k, a) in &self.coeffs {
            let t = match self.floor {
                Some(f) => f,
                None if k >= 0 => 0,
                None => panic!("shift of an exact operator with negative powers; truncate first"),
            };
            acc = &acc + &Psdo::shifted_power(x, k, t).left_mul(a);
        }
        acc
    }

    /// Evaluates `A(z + ∂)(B(z))`, returning the symbol as an operator in `z`.
    ///
    /// `floor` bounds the `z`-expansion from below when negative powers occur.
    pub fn symbol_apply(&self, other: &Psdo, floor: Option<i32>) -> Psdo {
        let mut out: BTreeMap<i32, DiffPoly> = BTreeMap::new();
        for (&k, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                // (z+∂)^k b z^j = Σ_n binom(k,n) z^{k-n+j} ∂^n b
                let mut d = b.clone();
                let mut n: u32 = 0;
                while !d.is_zero() {
                    let e = k + j - n as i32;
                    if (k >= 0 && n as i32 > k) || floor.is_some_and(|f| e < f) {
                        break;
                    }
                    let c = BigRational::from_integer(binomial(k as i64, n));
                    *out.entry(e).or_default() += (a * &d).scale(&c);
                    d = d.d();
                    n += 1;
                    if floor.is_none() && k < 0 {
                        assert!(d.is_zero(), "non-terminating symbol expansion; give a floor");
                    }
                }
            }
        }
        Psdo::new(out, max_opt(self.product_floor(other), floor))
    }

    /// Whether all trusted coefficients agree.
    pub fn agrees_with(&self, other: &Psdo) -> bool {
        let floor = max_opt(self.floor, other.floor);
        let keys: std::collections::BTreeSet<i32> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.into_iter()
            .filter(|k| floor.is_none_or(|f| *k >= f))
            .all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl Add for Psdo {
    type Output = Psdo;
    fn add(self, rhs: Psdo) -> Psdo {
        &self + &rhs
    }
}

impl Add for &Psdo {
    type Output = Psdo;
    fn add(self, rhs: &Psdo) -> Psdo {
        let mut map = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            *map.entry(*k).or_default() += c;
        }
        Psdo::new(map, max_opt(self.floor, rhs.floor))
    }
}

impl Sub for &Psdo {
    type Output = Psdo;
    fn sub(self, rhs: &Psdo) -> Psdo {
        self + &(-rhs)
    }
}

impl Sub for Psdo {
    type Output = Psdo;
    fn sub(self, rhs: Psdo) -> Psdo {
        &self - &rhs
    }
}

impl Neg for &Psdo {
    type Output = Psdo;
    fn neg(self) -> Psdo {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for Psdo {
    type Output = Psdo;
    fn neg(self) -> Psdo {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superpoly::Var;

    fn u() -> DiffPoly {
        DiffPoly::var(Var::named("u", false))
    }
    fn v() -> DiffPoly {
        DiffPoly::var(Var::named("v", false))
    }

    #[test]
    fn leibniz_rule_for_d() {
        let p = Psdo::d_pow(1).compose(&Psdo::mult(u()));
        assert_eq!(p, Psdo::from_terms([(0, u().d()), (1, u())]));
    }

    #[test]
    fn inverse_d_expansion() {
        let p = Psdo::d_pow(-1).truncate(-3).compose(&Psdo::mult(u()));
        let expect = Psdo::new(
            [(-1, u()), (-2, -u().d()), (-3, u().d_n(2))].into_iter().collect(),
            Some(-3),
        );
        assert_eq!(p, expect);
        assert_eq!(p.residue().unwrap(), u());
    }

    #[test]
    fn hand_expanded_product() {
        let a = Psdo::from_terms([(1, DiffPoly::one()), (0, u())]);
        let b = Psdo::from_terms([(1, DiffPoly::one()), (0, -u())]);
        let expect = Psdo::from_terms([(2, DiffPoly::one()), (0, -u().d() - &u() * &u())]);
        assert_eq!(a.compose(&b), expect);
    }

    #[test]
    fn adjoints() {
        assert_eq!(Psdo::d_pow(1).adjoint(), -Psdo::d_pow(1));
        let a = Psdo::from_terms([(1, u())]);
        assert_eq!(a.adjoint(), Psdo::from_terms([(1, -u()), (0, -u().d())]));
        let l = Psdo::from_terms([(2, DiffPoly::one()), (1, u()), (0, v())]);
        let expect = Psdo::from_terms([(2, DiffPoly::one()), (1, -u()), (0, v() - u().d())]);
        assert_eq!(l.adjoint(), expect);
    }

    #[test]
    fn residues_and_parts() {
        assert!(Psdo::d_pow(1).residue().unwrap().is_zero());
        assert_eq!(Psdo::from_terms([(-1, u())]).residue().unwrap(), u());
        assert!(Psdo::d_pow(-1).truncate(0).residue().is_err());
        let a = Psdo::from_terms([(1, DiffPoly::one()), (0, u()), (-1, v())]);
        assert_eq!(a.plus().unwrap(), Psdo::from_terms([(1, DiffPoly::one()), (0, u())]));
        assert_eq!(a.minus(), Psdo::from_terms([(-1, v())]));
    }

    #[test]
    fn symbol_application() {
        let s = Psdo::d_pow(1).symbol_apply(&Psdo::mult(u()), None);
        assert_eq!(s, Psdo::from_terms([(0, u().d()), (1, u())]));
        let s = Psdo::d_pow(-1).symbol_apply(&Psdo::one(), Some(-2));
        assert_eq!(s.coeff(-1), DiffPoly::one());
        assert!(s.coeff(-2).is_zero());
        assert_eq!(Psdo::mult(u()).symbol_apply(&Psdo::mult(v()), None), Psdo::mult(&u() * &v()));
    }

    #[test]
    fn shifted_powers() {
        // (∂+λ)^{-1} = ∂^{-1} - λ∂^{-2} + λ^2∂^{-3} - ...
        let p = Psdo::shifted_power(Family::Lambda, -1, -3);
        let l = DiffPoly::lambda();
        assert_eq!(p.coeff(-2), -l.clone());
        assert_eq!(p.coeff(-3), &l * &l);
        let q = Psdo::shifted_power(Family::Lambda, 1, 0).compose(&p);
        assert!(q.agrees_with(&Psdo::one().truncate(-2)));
    }
}
