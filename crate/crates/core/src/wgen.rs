//! Rectangular W-superalgebras `𝒲(𝔤𝔩(Nm|Nn), f)` from the affine operator.
//!
//! The affine operator `A = 𝟙∂ + Σ(−1)^ĩ e_ij⊗q_ij` over `Π = {1, …, N(m+n)}`
//! is reduced by `ρ` and its quasi-determinant gives the monic operator
//! `L = (−1)^{N−1}|ρ(A)|_{IJ}` whose coefficients `w_{ij;k}` freely generate
//! the W-superalgebra.
//!
//! ```
//! use sato::wgen::{RectangularSpec, WAlgebra};
//! use sato::superpoly::{DiffPoly, Var};
//!
//! let w = WAlgebra::new(RectangularSpec::new(2, 1, 3).unwrap()).unwrap();
//! let q = |i, j| DiffPoly::var(Var::q(i, j, false));
//! assert_eq!(w.generator(1, 1, 2), &(q(1, 1) + q(4, 4) + q(7, 7)));
//! ```

use crate::error::{Error, Result};
use crate::matop::{IndexSet, MatPsdo};
use crate::psdo::Psdo;
use crate::pvsa::{affine_operator, affine_table, generic_table, master_eval, BracketTable, GenericKind};
use crate::superpoly::{int, sign, DiffPoly, Family, Monomial, Var};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// The data `(m, n, N)` of an `N × (m|n)` rectangular nilpotent.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RectangularSpec {
    pub m: usize,
    pub n: usize,
    pub big_n: usize,
}

impl RectangularSpec {
    pub fn new(m: usize, n: usize, big_n: usize) -> Result<RectangularSpec> {
        if big_n < 2 {
            return Err(Error::Invalid("N must be at least 2".into()));
        }
        if m + n == 0 {
            return Err(Error::Invalid("m + n must be positive".into()));
        }
        Ok(RectangularSpec { m, n, big_n })
    }

    pub fn block_size(&self) -> usize {
        self.m + self.n
    }

    /// The index set `Π`.
    pub fn pi(&self) -> IndexSet {
        IndexSet::rectangular(self.m, self.n, self.big_n)
    }

    /// The small index set `{1, …, m+n}`.
    pub fn small(&self) -> IndexSet {
        IndexSet::superset(self.m, self.n)
    }

    pub fn is_odd(&self, i: usize) -> bool {
        (i - 1) % self.block_size() >= self.m
    }

    /// Global index of local index `a` in block `u`.
    pub fn global(&self, u: usize, a: usize) -> usize {
        (u - 1) * self.block_size() + a
    }

    /// `(block, local)` of a global index.
    pub fn local(&self, i: usize) -> (usize, usize) {
        ((i - 1) / self.block_size() + 1, (i - 1) % self.block_size() + 1)
    }

    /// `q_{[uv](ab)}`.
    pub fn q(&self, u: usize, v: usize, a: usize, b: usize) -> Var {
        let (i, j) = (self.global(u, a), self.global(v, b));
        Var::q(i, j, self.is_odd(i) ^ self.is_odd(j))
    }

    /// The `ad(h/2)`-grading `v − u` of `q_ij`.
    pub fn grading(&self, i: usize, j: usize) -> i64 {
        self.local(j).0 as i64 - self.local(i).0 as i64
    }
}

/// `ρ` on differential polynomials in the `q_ij`.
pub fn rho(spec: &RectangularSpec, x: &DiffPoly) -> DiffPoly {
    x.substitute(&|v: &Var| {
        if v.family != Family::Q {
            return None;
        }
        let (i, j) = (v.i as usize, v.j as usize);
        match spec.grading(i, j) {
            g if g >= 2 => Some(DiffPoly::zero()),
            1 => {
                let (a, b) = (spec.local(i).1, spec.local(j).1);
                Some(if a == b { DiffPoly::constant(sign(spec.is_odd(i))) } else { DiffPoly::zero() })
            }
            _ => None,
        }
    })
}

/// `ρ` applied entrywise to a matrix operator.
pub fn rho_matrix(spec: &RectangularSpec, a: &MatPsdo) -> MatPsdo {
    a.map_coeffs(|p| rho(spec, p))
}

/// Conformal weight of a polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Weight {
    Zero,
    Homogeneous(i64),
    Inhomogeneous,
}

/// `Δ` with `Δ(q_{[uv]}) = 1 + u − v`, `Δ(∂) = Δ(λ) = 1`.
pub fn conformal_weight(spec: &RectangularSpec, x: &DiffPoly) -> Weight {
    let mut found: Option<i64> = None;
    for (m, _) in x.terms() {
        let mut w = 0i64;
        for (v, e) in m.factors() {
            let base = match v.family {
                Family::Q => 1 - spec.grading(v.i as usize, v.j as usize),
                Family::W | Family::U => spec.big_n as i64 - v.m.unwrap_or(0) as i64,
                f if f.is_parameter() => 1,
                _ => 0,
            };
            w += (base + v.der as i64) * *e as i64;
        }
        match found {
            None => found = Some(w),
            Some(f) if f != w => return Weight::Inhomogeneous,
            _ => {}
        }
    }
    found.map_or(Weight::Zero, Weight::Homogeneous)
}

/// One free generator `w_{ij;k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: DiffPoly,
}

impl Generator {
    pub fn var(&self, spec: &RectangularSpec) -> Var {
        Var::w(self.k, self.i, self.j, spec.is_odd(self.i) ^ spec.is_odd(self.j))
    }
}

/// The W-superalgebra of one rectangular spec with its generators.
#[derive(Debug)]
pub struct WAlgebra {
    spec: RectangularSpec,
    table: BracketTable,
    l: MatPsdo,
    generators: Vec<Generator>,
    images: BTreeMap<Var, DiffPoly>,
}

fn cache() -> &'static Mutex<HashMap<RectangularSpec, Arc<WAlgebra>>> {
    static CACHE: OnceLock<Mutex<HashMap<RectangularSpec, Arc<WAlgebra>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `(−1)^{N−1}|ρ(A)|_{IJ}` relabelled over `{1, …, m+n}`.
pub fn build_l(spec: &RectangularSpec) -> Result<MatPsdo> {
    let rho_a = rho_matrix(spec, &affine_operator(&spec.pi()));
    let s = spec.block_size();
    let rows: Vec<usize> = (1..=s).map(|a| spec.global(spec.big_n, a)).collect();
    let cols: Vec<usize> = (1..=s).collect();
    let q = rho_a.quasi_determinant(&rows, &cols, 0)?;
    if q.floor().is_some() {
        return Err(Error::Invalid("quasi-determinant did not terminate".into()));
    }
    let small = spec.small();
    let q = q.with_sets(small.clone(), small);
    Ok(if spec.big_n % 2 == 0 { -&q } else { q })
}

/// `L` by the sum over chains `N > i₁ > … > i_k > 0` of block products.
pub fn build_l_by_chains(spec: &RectangularSpec) -> Result<MatPsdo> {
    let small = spec.small();
    let rho_a = rho_matrix(spec, &affine_operator(&spec.pi()));
    let block = |u: usize, v: usize| {
        MatPsdo::from_fn(&small, &small, |a, b| {
            rho_a.get(spec.global(u, a + 1), spec.global(v, b + 1)).clone()
        })
    };
    let mut g: Vec<MatPsdo> = vec![MatPsdo::identity(&small)];
    for x in 1..=spec.big_n {
        let mut acc = MatPsdo::zero(&small, &small);
        for (y, gy) in g.iter().enumerate() {
            let term = block(x, y + 1).star_mul(gy)?;
            acc = if y > 0 { &acc - &term } else { &acc + &term };
        }
        g.push(acc);
    }
    let l = g.pop().unwrap();
    Ok(if spec.big_n % 2 == 0 { -&l } else { l })
}

impl WAlgebra {
    /// Builds (or fetches from the cache) the algebra for `spec`.
    pub fn get(spec: RectangularSpec) -> Result<Arc<WAlgebra>> {
        if let Some(w) = cache().lock().unwrap().get(&spec) {
            return Ok(w.clone());
        }
        let w = Arc::new(WAlgebra::new(spec)?);
        cache().lock().unwrap().insert(spec, w.clone());
        Ok(w)
    }

    pub fn new(spec: RectangularSpec) -> Result<WAlgebra> {
        let table = affine_table(&spec.pi(), &int(-1));
        let l = build_l(&spec)?;
        let big_n = spec.big_n as i32;
        if !l.is_monic(big_n) || l.entries().iter().any(|p| !p.is_differential()) {
            return Err(Error::NotMonic(big_n));
        }
        let s = spec.block_size();
        let mut generators = Vec::new();
        for k in 0..spec.big_n {
            for i in 1..=s {
                for j in 1..=s {
                    let value = l.get(i, j).coeff(k as i32);
                    generators.push(Generator { i, j, k, value });
                }
            }
        }
        let mut w = WAlgebra { spec, table, l, generators, images: BTreeMap::new() };
        w.images = w.leading_images()?;
        Ok(w)
    }

    pub fn spec(&self) -> &RectangularSpec {
        &self.spec
    }

    /// The affine level −1 table on `𝔤𝔩(Π)`.
    pub fn affine(&self) -> &BracketTable {
        &self.table
    }

    pub fn l(&self) -> &MatPsdo {
        &self.l
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// `w_{ij;k}`.
    pub fn generator(&self, i: usize, j: usize, k: usize) -> &DiffPoly {
        let s = self.spec.block_size();
        &self.generators[k * s * s + (i - 1) * s + (j - 1)].value
    }

    /// Leading variable `q_{[N−k,1](ij)}` of `w_{ij;k}`.
    pub fn leading_var(&self, g: &Generator) -> Var {
        self.spec.q(self.spec.big_n - g.k, 1, g.i, g.j)
    }

    /// Degree-one, derivative-free part of `x`.
    pub fn linear_part(x: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in x.degree_part(1).terms() {
            if m.factors().iter().all(|(v, _)| v.der == 0) {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    fn leading_images(&self) -> Result<BTreeMap<Var, DiffPoly>> {
        let mut images: BTreeMap<Var, DiffPoly> = BTreeMap::new();
        for k in (0..self.spec.big_n).rev() {
            for g in self.generators.iter().filter(|g| g.k == k) {
                let lead = self.leading_var(g);
                let c = g.value.coefficient(&Monomial::from_factors(&[(lead, 1)]).unwrap().0);
                if c != int(1) && c != int(-1) {
                    return Err(Error::NotInW(format!("generator w{}_{}{} has no unit leading term", k, g.i, g.j)));
                }
                let rest = &g.value - &DiffPoly::var(lead).scale(&c);
                let rest = rest.substitute(&|v: &Var| images.get(v).cloned());
                let img = (DiffPoly::var(g.var(&self.spec)) - rest).scale(&c);
                images.insert(lead, img);
            }
        }
        Ok(images)
    }

    /// Generators `q_{[u,u+1](ab)}` failing `ρ{q λ x} = 0`, as `(u, a, b)`.
    pub fn check_membership(&self, x: &DiffPoly) -> Result<Vec<(usize, usize, usize)>> {
        let s = self.spec.block_size();
        let mut bad = Vec::new();
        for u in 1..self.spec.big_n {
            for a in 1..=s {
                for b in 1..=s {
                    let q = DiffPoly::var(self.spec.q(u, u + 1, a, b));
                    let br = rho(&self.spec, &master_eval(&self.table, &q, x, Family::Lambda)?);
                    if !br.is_zero() {
                        bad.push((u, a, b));
                    }
                }
            }
        }
        Ok(bad)
    }

    fn bracket_raw(&self, x: &DiffPoly, y: &DiffPoly) -> Result<DiffPoly> {
        Ok(rho(&self.spec, &master_eval(&self.table, x, y, Family::Lambda)?))
    }

    /// `{x λ y}_𝒲 = ρ{x λ y}_Aff` for elements of the W-superalgebra.
    pub fn w_bracket(&self, x: &DiffPoly, y: &DiffPoly) -> Result<DiffPoly> {
        for z in [x, y] {
            if !self.check_membership(z)?.is_empty() {
                return Err(Error::NotInW(z.to_string()));
            }
        }
        self.bracket_raw(x, y)
    }

    /// Expresses an element of the W-superalgebra in the generators `w_{ij;k}`.
    pub fn rewrite(&self, x: &DiffPoly) -> Result<DiffPoly> {
        let y = x.substitute(&|v: &Var| self.images.get(v).cloned());
        if let Some(v) = y.generators().into_iter().find(|v| v.family == Family::Q) {
            return Err(Error::NotInW(format!("{v} remains after elimination")));
        }
        Ok(y)
    }

    /// Renames `w_{ij;k}` to the generic coefficient `u_{k,ij}`.
    pub fn to_generic(&self, x: &DiffPoly) -> DiffPoly {
        x.substitute(&|v: &Var| {
            (v.family == Family::W).then(|| DiffPoly::var(Var::u(v.m.unwrap() as usize, v.i as usize, v.j as usize, v.odd)))
        })
    }

    /// Generator pairs where the rewritten W-bracket differs from the generic
    /// H-bracket, together with generators failing membership.
    pub fn verify_isomorphism(&self) -> Result<IsomorphismReport> {
        let mut report = IsomorphismReport::default();
        for g in &self.generators {
            if !self.check_membership(&g.value)?.is_empty() {
                report.not_members.push(g.var(&self.spec));
            }
        }
        let generic = generic_table(&self.spec.small(), self.spec.big_n, GenericKind::H)?;
        for x in &self.generators {
            for y in &self.generators {
                let b = self.bracket_raw(&x.value, &y.value)?;
                let (xv, yv) = (x.var(&self.spec), y.var(&self.spec));
                match self.rewrite(&b) {
                    Ok(r) => {
                        let want = generic.get(&Var::u(x.k, x.i, x.j, xv.odd), &Var::u(y.k, y.i, y.j, yv.odd))?;
                        if self.to_generic(&r) != want {
                            report.mismatches.push((xv, yv));
                        }
                    }
                    Err(_) => report.mismatches.push((xv, yv)),
                }
            }
        }
        report.pairs = self.generators.len() * self.generators.len();
        Ok(report)
    }

    /// The W-bracket table on the generators, rewritten in the `w_{ij;k}`.
    pub fn bracket_table(&self) -> Result<BracketTable> {
        let vars: Vec<Var> = self.generators.iter().map(|g| g.var(&self.spec)).collect();
        let mut t = BracketTable::new(vars);
        for x in &self.generators {
            for y in &self.generators {
                let v = self.rewrite(&self.bracket_raw(&x.value, &y.value)?)?;
                if !v.is_zero() {
                    t.insert(x.var(&self.spec), y.var(&self.spec), v);
                }
            }
        }
        Ok(t)
    }

    /// `L` with coefficients replaced by the abstract generators `w_{ij;k}`.
    pub fn abstract_l(&self) -> MatPsdo {
        let small = self.spec.small();
        let big_n = self.spec.big_n;
        MatPsdo::from_fn(&small, &small, |r, c| {
            let mut terms: Vec<(i32, DiffPoly)> = (0..big_n)
                .map(|k| (k as i32, DiffPoly::var(Var::w(k, r + 1, c + 1, small.odd_at(r) ^ small.odd_at(c)))))
                .collect();
            if r == c {
                terms.push((big_n as i32, DiffPoly::one()));
            }
            Psdo::from_terms(terms)
        })
    }
}

/// The first-order affine operator `𝟙∂ + Σ(−1)^ĩ e_ij⊗q_ij` over `Π`.
pub fn build_affine_operator(spec: &RectangularSpec) -> MatPsdo {
    affine_operator(&spec.pi())
}

/// The coefficients `w_{ij;k}` of `L`, ordered by `k`, then `i`, then `j`.
pub fn extract_generators(spec: &RectangularSpec) -> Result<Vec<Generator>> {
    Ok(WAlgebra::get(*spec)?.generators().to_vec())
}

/// `{x λ y}` in the W-superalgebra of `spec`.
pub fn w_bracket(spec: &RectangularSpec, x: &DiffPoly, y: &DiffPoly) -> Result<DiffPoly> {
    WAlgebra::get(*spec)?.w_bracket(x, y)
}

/// Outcome of [`WAlgebra::verify_isomorphism`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IsomorphismReport {
    pub pairs: usize,
    pub not_members: Vec<Var>,
    pub mismatches: Vec<(Var, Var)>,
}

impl IsomorphismReport {
    pub fn passed(&self) -> bool {
        self.not_members.is_empty() && self.mismatches.is_empty()
    }
}
