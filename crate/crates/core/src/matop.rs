//! Matrices of pseudo-differential operators over a parity-graded index set.
//!
//! Two products are provided. With `ã` the parity of a matrix unit and `ṽ`
//! that of a coefficient, `(a⊗v)∘(b⊗w) = (−1)^{b̃ṽ} ab⊗vw` and
//! `(a⊗v)★(b⊗w) = (−1)^{b̃ṽ+ãb̃} ab⊗vw`. On even matrices `★` is plain
//! entrywise composition.
//!
//! ```
//! use sato::matop::{IndexSet, MatPsdo};
//! use sato::psdo::Psdo;
//! use sato::superpoly::{DiffPoly, Var};
//!
//! let set = IndexSet::superset(1, 1);
//! let t1 = DiffPoly::var(Var::named("t1", true));
//! let t2 = DiffPoly::var(Var::named("t2", true));
//! let a = MatPsdo::single(&set, 1, 2, Psdo::mult(t1.clone()));
//! let b = MatPsdo::single(&set, 2, 1, Psdo::mult(t2.clone()));
//! let c = a.circ_mul(&b).unwrap();
//! assert_eq!(c.get(1, 1).coeff(0), -(&t1 * &t2));
//! assert_eq!(a.star_mul(&b).unwrap().get(1, 1).coeff(0), &t1 * &t2);
//! ```

use crate::error::{Error, Result};
use crate::psdo::Psdo;
use crate::superpoly::{int, DiffPoly, Parity, Scalar};
use num_traits::One;
use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

/// Ordered index labels with a parity for each.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IndexSet {
    ids: Vec<usize>,
    odd: Vec<bool>,
}

impl IndexSet {
    pub fn new(ids: Vec<usize>, odd: Vec<bool>) -> Result<IndexSet> {
        if ids.len() != odd.len() {
            return Err(Error::Dimension("ids and parities differ in length".into()));
        }
        let mut seen = ids.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != ids.len() {
            return Err(Error::Invalid("repeated index".into()));
        }
        Ok(IndexSet { ids, odd })
    }

    /// `{1, …, m+n}` with the last `n` indices odd.
    pub fn superset(m: usize, n: usize) -> IndexSet {
        IndexSet { ids: (1..=m + n).collect(), odd: (1..=m + n).map(|i| i > m).collect() }
    }

    /// `{1, …, N(m+n)}` with `i` odd unless `i mod (m+n)` lies in `1..=m`.
    pub fn rectangular(m: usize, n: usize, big_n: usize) -> IndexSet {
        let s = m + n;
        let ids: Vec<usize> = (1..=big_n * s).collect();
        let odd = ids.iter().map(|i| (i - 1) % s >= m).collect();
        IndexSet { ids, odd }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn odd_at(&self, pos: usize) -> bool {
        self.odd[pos]
    }

    pub fn profile(&self) -> &[bool] {
        &self.odd
    }

    pub fn position(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|x| *x == id)
    }

    pub fn parity_of(&self, id: usize) -> Option<bool> {
        self.position(id).map(|p| self.odd[p])
    }

    /// Sub-index-set with the given ids, in the given order.
    pub fn subset(&self, ids: &[usize]) -> Result<IndexSet> {
        let odd = ids
            .iter()
            .map(|i| self.parity_of(*i).ok_or_else(|| Error::Invalid(format!("index {i} not in set"))))
            .collect::<Result<Vec<_>>>()?;
        IndexSet::new(ids.to_vec(), odd)
    }

    /// Ids not in `ids`, in set order.
    pub fn complement(&self, ids: &[usize]) -> Vec<usize> {
        self.ids.iter().copied().filter(|i| !ids.contains(i)).collect()
    }

    /// Same parities relabelled `1, …, len`.
    pub fn relabel(&self) -> IndexSet {
        IndexSet { ids: (1..=self.len()).collect(), odd: self.odd.clone() }
    }

    fn counts(&self) -> (usize, usize) {
        let o = self.odd.iter().filter(|x| **x).count();
        (self.len() - o, o)
    }
}

/// A matrix of scalar pseudo-differential operators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatPsdo {
    rows: IndexSet,
    cols: IndexSet,
    entries: Vec<Psdo>,
}

fn psdo_parity_parts(p: &Psdo) -> Vec<(bool, Psdo)> {
    let mut even = BTreeMap::new();
    let mut odd = BTreeMap::new();
    for (k, c) in p.coeffs() {
        let (e, o) = c.split_parity();
        even.insert(*k, e);
        odd.insert(*k, o);
    }
    vec![(false, Psdo::new(even, p.floor())), (true, Psdo::new(odd, p.floor()))]
}

impl MatPsdo {
    /// Validated constructor; entries are row-major.
    pub fn new(rows: IndexSet, cols: IndexSet, entries: Vec<Psdo>) -> Result<MatPsdo> {
        if entries.len() != rows.len() * cols.len() {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows.len(),
                cols.len()
            )));
        }
        let m = MatPsdo { rows, cols, entries };
        if !m.is_even() {
            return Err(Error::Parity("matrix is not even".into()));
        }
        Ok(m)
    }

    /// Constructor without the evenness check.
    pub fn from_fn(rows: &IndexSet, cols: &IndexSet, mut f: impl FnMut(usize, usize) -> Psdo) -> MatPsdo {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for r in 0..rows.len() {
            for c in 0..cols.len() {
                entries.push(f(r, c));
            }
        }
        MatPsdo { rows: rows.clone(), cols: cols.clone(), entries }
    }

    pub fn zero(rows: &IndexSet, cols: &IndexSet) -> MatPsdo {
        MatPsdo::from_fn(rows, cols, |_, _| Psdo::zero())
    }

    /// `𝟙∂^k`.
    pub fn identity_pow(set: &IndexSet, k: i32) -> MatPsdo {
        MatPsdo::from_fn(set, set, |r, c| if r == c { Psdo::d_pow(k) } else { Psdo::zero() })
    }

    pub fn identity(set: &IndexSet) -> MatPsdo {
        MatPsdo::identity_pow(set, 0)
    }

    /// `e_{ij} ⊗ p` for ids `i`, `j`.
    pub fn single(set: &IndexSet, i: usize, j: usize, p: Psdo) -> MatPsdo {
        let (pi, pj) = (set.position(i).unwrap(), set.position(j).unwrap());
        MatPsdo::from_fn(set, set, |r, c| if (r, c) == (pi, pj) { p.clone() } else { Psdo::zero() })
    }

    pub fn rows(&self) -> &IndexSet {
        &self.rows
    }

    pub fn cols(&self) -> &IndexSet {
        &self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Psdo {
        &self.entries[r * self.cols.len() + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Psdo {
        let n = self.cols.len();
        &mut self.entries[r * n + c]
    }

    /// Entry by index ids.
    pub fn get(&self, i: usize, j: usize) -> &Psdo {
        self.at(self.rows.position(i).expect("row id"), self.cols.position(j).expect("col id"))
    }

    pub fn entries(&self) -> &[Psdo] {
        &self.entries
    }

    pub fn with_sets(mut self, rows: IndexSet, cols: IndexSet) -> MatPsdo {
        assert_eq!(rows.len(), self.rows.len());
        assert_eq!(cols.len(), self.cols.len());
        self.rows = rows;
        self.cols = cols;
        self
    }

    /// Every coefficient of entry `(i,j)` has parity `ĩ + j̃`.
    pub fn is_even(&self) -> bool {
        for r in 0..self.rows.len() {
            for c in 0..self.cols.len() {
                let want = self.rows.odd[r] ^ self.cols.odd[c];
                for p in self.at(r, c).coeffs().values() {
                    match (p.parity(), want) {
                        (Parity::Even, false) | (Parity::Odd, true) => {}
                        _ => return false,
                    }
                }
            }
        }
        true
    }

    pub fn map(&self, f: impl Fn(&Psdo) -> Psdo) -> MatPsdo {
        MatPsdo { rows: self.rows.clone(), cols: self.cols.clone(), entries: self.entries.iter().map(f).collect() }
    }

    pub fn map_coeffs(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> MatPsdo {
        self.map(|p| p.map_coeffs(&f))
    }

    pub fn scale(&self, c: &Scalar) -> MatPsdo {
        self.map(|p| p.scale(c))
    }

    pub fn truncate(&self, t: i32) -> MatPsdo {
        self.map(|p| p.truncate(t))
    }

    /// Highest exponent over all entries.
    pub fn top(&self) -> Option<i32> {
        self.entries.iter().filter_map(|p| p.top()).max()
    }

    /// Largest entry floor (`None` if every entry is exact).
    pub fn floor(&self) -> Option<i32> {
        self.entries.iter().filter_map(|p| p.floor()).max()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn plus(&self) -> Result<MatPsdo> {
        let entries = self.entries.iter().map(|p| p.plus()).collect::<Result<Vec<_>>>()?;
        Ok(MatPsdo { rows: self.rows.clone(), cols: self.cols.clone(), entries })
    }

    pub fn minus(&self) -> MatPsdo {
        self.map(|p| p.minus())
    }

    /// Coefficient matrix at `∂^k`, row-major.
    pub fn coeff(&self, k: i32) -> Vec<DiffPoly> {
        self.entries.iter().map(|p| p.coeff(k)).collect()
    }

    fn check_inner(&self, other: &MatPsdo) -> Result<()> {
        if self.cols.profile() != other.rows.profile() {
            return Err(Error::Dimension("inner index sets differ in parity profile".into()));
        }
        Ok(())
    }

    fn product(&self, other: &MatPsdo, star: bool, target: Option<i32>) -> Result<MatPsdo> {
        self.product_with(other, star, |a, b| Ok(a.compose_to(b, target)))
    }

    fn product_with(
        &self,
        other: &MatPsdo,
        star: bool,
        compose: impl Fn(&Psdo, &Psdo) -> Result<Psdo>,
    ) -> Result<MatPsdo> {
        self.check_inner(other)?;
        let even = self.is_even();
        let n = self.cols.len();
        let parts: Vec<Vec<(bool, Psdo)>> = if even {
            Vec::new()
        } else {
            self.entries.iter().map(psdo_parity_parts).collect()
        };
        let mut out = MatPsdo::zero(&self.rows, &other.cols);
        for i in 0..self.rows.len() {
            let pi = self.rows.odd[i];
            for j in 0..other.cols.len() {
                let pj = other.cols.odd[j];
                let mut acc = Psdo::zero();
                for t in 0..n {
                    let pt = self.cols.odd[t];
                    let b = other.at(t, j);
                    if b.is_zero() && b.is_exact() {
                        continue;
                    }
                    let pieces: Vec<(bool, &Psdo)> = if even {
                        vec![(pi ^ pt, self.at(i, t))]
                    } else {
                        parts[i * n + t].iter().map(|(o, p)| (*o, p)).collect()
                    };
                    for (v, a) in pieces {
                        if a.is_zero() && a.is_exact() {
                            continue;
                        }
                        let mut neg = (pt ^ pj) && v;
                        if star {
                            neg ^= (pi ^ pt) && (pt ^ pj);
                        }
                        let prod = compose(a, b)?;
                        acc = if neg { &acc - &prod } else { &acc + &prod };
                    }
                }
                *out.at_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn circ_mul(&self, other: &MatPsdo) -> Result<MatPsdo> {
        self.product(other, false, None)
    }

    pub fn circ_mul_to(&self, other: &MatPsdo, target: Option<i32>) -> Result<MatPsdo> {
        self.product(other, false, target)
    }

    /// The `∂^e` coefficients of `self ∘ other`.
    pub fn circ_coeff(&self, other: &MatPsdo, e: i32) -> Result<MatPsdo> {
        self.product_with(other, false, |a, b| Ok(Psdo::from_terms([(e, a.compose_coeff(b, e)?)])))
    }

    /// `self ★ other`.
    pub fn star_mul(&self, other: &MatPsdo) -> Result<MatPsdo> {
        self.product(other, true, None)
    }

    pub fn star_mul_to(&self, other: &MatPsdo, target: Option<i32>) -> Result<MatPsdo> {
        self.product(other, true, target)
    }

    /// Supertrace `Σ (−1)^ĩ A_ii`.
    pub fn supertrace(&self) -> Result<Psdo> {
        if self.rows.profile() != self.cols.profile() {
            return Err(Error::Dimension("supertrace of a non-square matrix".into()));
        }
        let mut acc = Psdo::zero();
        for i in 0..self.rows.len() {
            let p = self.at(i, i);
            acc = if self.rows.odd[i] { &acc - p } else { &acc + p };
        }
        Ok(acc)
    }

    /// Whether `self = 𝟙∂^N + lower order`.
    pub fn is_monic(&self, order: i32) -> bool {
        if self.rows.profile() != self.cols.profile() {
            return false;
        }
        for r in 0..self.rows.len() {
            for c in 0..self.cols.len() {
                let p = self.at(r, c);
                if p.top().is_some_and(|t| t > order) || p.floor().is_some_and(|f| f > order) {
                    return false;
                }
                let lead = p.coeff(order);
                let want = if r == c { DiffPoly::one() } else { DiffPoly::zero() };
                if lead != want {
                    return false;
                }
            }
        }
        true
    }

    fn monic_order(&self) -> Result<i32> {
        let t = self.top().ok_or(Error::NotMonic(0))?;
        if !self.is_monic(t) {
            return Err(Error::NotMonic(t));
        }
        Ok(t)
    }

    fn monic_inverse(&self, depth: i32, star: bool) -> Result<MatPsdo> {
        let order = self.monic_order()?;
        let floor = -depth;
        let inner = floor + order;
        let x = self.map(|p| {
            let shifted: BTreeMap<i32, DiffPoly> =
                p.coeffs().iter().filter(|(k, _)| **k < order).map(|(k, c)| (k - order, c.clone())).collect();
            Psdo::new(shifted, p.floor().map(|f| f - order))
        });
        let neg_x = -&x;
        let mut term = MatPsdo::identity(&self.rows).map(|p| p.truncate(inner));
        let mut sum = term.clone();
        let nmax = (-inner).max(0);
        for _ in 0..nmax {
            term = term.product(&neg_x, star, Some(inner))?;
            sum = &sum + &term;
        }
        let lead = MatPsdo::identity_pow(&self.rows, -order);
        let inv = lead.product(&sum, star, Some(floor))?;
        Ok(inv.map(|p| p.truncate(floor)).with_sets(self.cols.clone(), self.rows.clone()))
    }

    /// `★`-inverse of a monic operator with floor `−depth`.
    pub fn star_inverse_monic(&self, depth: i32) -> Result<MatPsdo> {
        self.monic_inverse(depth, true)
    }

    /// `∘`-inverse of a monic operator with floor `−depth`.
    pub fn circ_inverse_monic(&self, depth: i32) -> Result<MatPsdo> {
        self.monic_inverse(depth, false)
    }

    /// `∘`-power, `n ≥ 0`.
    pub fn circ_pow_to(&self, n: usize, target: Option<i32>) -> Result<MatPsdo> {
        let top = self.top().unwrap_or(0).max(0);
        let mut acc = MatPsdo::identity(&self.rows);
        for step in 1..=n {
            let t = target.map(|t| t - (n - step) as i32 * top);
            acc = acc.circ_mul_to(self, t)?;
        }
        Ok(acc)
    }

    /// The monic `∘`-root `B = 𝟙∂ + V₀ + V₋₁∂^{-1} + …` with `B^{∘N} = self`,
    /// computed down to exponent `−depth`.
    pub fn circ_root(&self, n: usize, depth: i32) -> Result<MatPsdo> {
        if depth < 0 {
            return Err(Error::Invalid("negative depth".into()));
        }
        if n == 0 || !self.is_monic(n as i32) {
            return Err(Error::NotMonic(n as i32));
        }
        let big_n = n as i32;
        let inv_n = Scalar::one() / int(n as i64);
        let mut b = MatPsdo::identity_pow(&self.rows, 1);
        for r in 0..=depth {
            let e = big_n - 1 - r;
            let trial = b.map(|p| p.clone().with_floor(Some(-r)));
            let pw = trial.circ_pow_to(n - 1, Some(e - 1))?.circ_coeff(&trial, e)?;
            let mut next = b.clone();
            for i in 0..self.rows.len() {
                for j in 0..self.cols.len() {
                    let want = self.at(i, j).coeff_checked(e)?;
                    let have = pw.at(i, j).coeff_checked(e)?;
                    let v = (want - have).scale(&inv_n);
                    let cur = next.at(i, j).clone();
                    *next.at_mut(i, j) = &cur + &Psdo::from_terms([(-r, v)]);
                }
            }
            b = next;
        }
        Ok(b.map(|p| p.clone().with_floor(Some(-depth))))
    }

    /// Submatrix with rows `j` and columns `k`; requires equal even/odd counts.
    pub fn submatrix(&self, j: &[usize], k: &[usize]) -> Result<MatPsdo> {
        let rows = self.rows.subset(j)?;
        let cols = self.cols.subset(k)?;
        if rows.counts() != cols.counts() {
            return Err(Error::Parity("row and column sets have different parity counts".into()));
        }
        Ok(self.block(&rows, &cols))
    }

    fn block(&self, rows: &IndexSet, cols: &IndexSet) -> MatPsdo {
        let rp: Vec<usize> = rows.ids().iter().map(|i| self.rows.position(*i).unwrap()).collect();
        let cp: Vec<usize> = cols.ids().iter().map(|i| self.cols.position(*i).unwrap()).collect();
        MatPsdo::from_fn(rows, cols, |r, c| self.at(rp[r], cp[c]).clone())
    }

    /// `★`-inverse of a square positional block, exact when it is unipotent.
    fn block_inverse(&self, depth: i32) -> Result<MatPsdo> {
        if self.rows.profile() != self.cols.profile() {
            return Err(Error::Parity("complement block is not parity square".into()));
        }
        let id = MatPsdo::identity(&self.rows).with_sets(self.rows.clone(), self.cols.clone());
        let neg_y = -&(self - &id);
        let mut term = MatPsdo::identity(&self.cols).with_sets(self.cols.clone(), self.rows.clone());
        let mut sum = term.clone();
        for _ in 0..=self.rows.len() {
            term = term.star_mul(&neg_y)?.with_sets(self.cols.clone(), self.rows.clone());
            if term.is_zero() && term.floor().is_none() {
                return Ok(sum);
            }
            sum = &sum + &term;
        }
        if self.monic_order().is_ok() {
            return self.star_inverse_monic(depth);
        }
        Err(Error::NotInvertible)
    }

    /// `|A|_{JK} = A_{JK} − A_{JK^c} ★ (A_{J^cK^c})^{-1} ★ A_{J^cK}`.
    pub fn quasi_determinant(&self, j: &[usize], k: &[usize], depth: i32) -> Result<MatPsdo> {
        let jc = self.rows.complement(j);
        let kc = self.cols.complement(k);
        let rj = self.rows.subset(j)?;
        let ck = self.cols.subset(k)?;
        if jc.is_empty() {
            return Ok(self.block(&rj, &ck));
        }
        let rjc = self.rows.subset(&jc)?;
        let ckc = self.cols.subset(&kc)?;
        let inv = self.block(&rjc, &ckc).block_inverse(depth)?;
        let left = self.block(&rj, &ckc);
        let right = self.block(&rjc, &ck);
        let corr = left.star_mul(&inv)?.star_mul(&right)?;
        Ok(&self.block(&rj, &ck) - &corr)
    }

    /// Whether all trusted coefficients agree entrywise.
    pub fn agrees_with(&self, other: &MatPsdo) -> bool {
        self.rows.profile() == other.rows.profile()
            && self.cols.profile() == other.cols.profile()
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.agrees_with(b))
    }
}

impl Add for &MatPsdo {
    type Output = MatPsdo;
    fn add(self, rhs: &MatPsdo) -> MatPsdo {
        assert_eq!(self.entries.len(), rhs.entries.len());
        MatPsdo {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &MatPsdo {
    type Output = MatPsdo;
    fn sub(self, rhs: &MatPsdo) -> MatPsdo {
        assert_eq!(self.entries.len(), rhs.entries.len());
        MatPsdo {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &MatPsdo {
    type Output = MatPsdo;
    fn neg(self) -> MatPsdo {
        self.map(|p| -p)
    }
}
