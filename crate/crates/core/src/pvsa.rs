//! λ-brackets on differential superpolynomials.
//!
//! A bracket is stored as a [`BracketTable`] on generators, with values
//! polynomial in the parameter `λ`; [`master_eval`] extends it to arbitrary
//! elements. Generic super Adler brackets, the compatible linear bracket and
//! affine brackets are provided together with the axiom checkers.
//!
//! ```
//! use sato::pvsa::{master_eval, BracketTable};
//! use sato::superpoly::{DiffPoly, Family, Var};
//!
//! let q = Var::named("q", false);
//! let mut t = BracketTable::new(vec![q]);
//! t.insert(q, q, DiffPoly::lambda());
//! let qq = DiffPoly::var(q) * DiffPoly::var(q);
//! let b = master_eval(&t, &DiffPoly::var(q), &qq, Family::Lambda).unwrap();
//! assert_eq!(b, (DiffPoly::var(q) * DiffPoly::lambda()).scale_int(2));
//! ```

use crate::error::{Error, Result};
use crate::matop::{IndexSet, MatPsdo};
use crate::psdo::Psdo;
use crate::superpoly::{binomial, sign, DiffPoly, Family, Parity, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Bracket values `{a λ b}` on pairs of generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketTable {
    generators: Vec<Var>,
    values: BTreeMap<(Var, Var), DiffPoly>,
}

impl BracketTable {
    pub fn new(generators: Vec<Var>) -> BracketTable {
        BracketTable { generators, values: BTreeMap::new() }
    }

    pub fn generators(&self) -> &[Var] {
        &self.generators
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.generators.contains(v)
    }

    pub fn insert(&mut self, a: Var, b: Var, value: DiffPoly) {
        if value.is_zero() {
            self.values.remove(&(a, b));
        } else {
            self.values.insert((a, b), value);
        }
    }

    /// `{a λ b}` for generators, zero for pairs never inserted.
    pub fn get(&self, a: &Var, b: &Var) -> Result<DiffPoly> {
        for v in [a, b] {
            if !self.contains(v) {
                return Err(Error::UnknownGenerator(v.to_string()));
            }
        }
        Ok(self.values.get(&(*a, *b)).cloned().unwrap_or_default())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Var, Var), &DiffPoly)> {
        self.values.iter()
    }

    /// `self + c·other` on the union of generators.
    pub fn combine(&self, other: &BracketTable, c: &DiffPoly) -> BracketTable {
        let mut gens = self.generators.clone();
        for g in &other.generators {
            if !gens.contains(g) {
                gens.push(*g);
            }
        }
        let mut out = BracketTable { generators: gens, values: self.values.clone() };
        for (k, v) in &other.values {
            let e = out.values.entry(*k).or_default();
            *e += &(c * v);
        }
        out.values.retain(|_, v| !v.is_zero());
        out
    }

    pub fn map_values(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> BracketTable {
        BracketTable {
            generators: self.generators.clone(),
            values: self.values.iter().map(|(k, v)| (*k, f(v))).filter(|(_, v)| !v.is_zero()).collect(),
        }
    }
}

fn lambda_pow(f: Family, n: u32) -> DiffPoly {
    DiffPoly::var_pow(Var::param(f), n)
}

/// Replaces the parameter `from` by the polynomial `image`.
pub fn substitute_param(p: &DiffPoly, from: Family, image: &DiffPoly) -> DiffPoly {
    let mut out = DiffPoly::zero();
    let mut pw = DiffPoly::one();
    let mut cur = 0;
    for (e, c) in p.coeffs_in(from) {
        while cur < e {
            pw = &pw * image;
            cur += 1;
        }
        out += &(&pw * &c);
    }
    out
}

/// `{f λ g}` by the master formula, with `λ` realized as parameter `param`.
pub fn master_eval(table: &BracketTable, f: &DiffPoly, g: &DiffPoly, param: Family) -> Result<DiffPoly> {
    let (f0, f1) = f.split_parity();
    let (g0, g1) = g.split_parity();
    let mut out = DiffPoly::zero();
    for (fp, fo) in [(&f0, false), (&f1, true)] {
        if fp.is_zero() {
            continue;
        }
        for (gp, go) in [(&g0, false), (&g1, true)] {
            if gp.is_zero() {
                continue;
            }
            out += &master_homogeneous(table, fp, fo, gp, go, param)?;
        }
    }
    Ok(out)
}

fn master_homogeneous(
    table: &BracketTable,
    f: &DiffPoly,
    fo: bool,
    g: &DiffPoly,
    go: bool,
    param: Family,
) -> Result<DiffPoly> {
    let mut fparts: BTreeMap<Var, DiffPoly> = BTreeMap::new();
    for v in f.vars().into_iter().filter(|v| !v.is_parameter()) {
        let y = f.partial(&v).shift_pow(param, v.der as u32, true);
        *fparts.entry(v.base()).or_default() += &y;
    }
    let mut gparts: BTreeMap<Var, Vec<(u32, DiffPoly)>> = BTreeMap::new();
    for v in g.vars().into_iter().filter(|v| !v.is_parameter()) {
        gparts.entry(v.base()).or_default().push((v.der as u32, g.partial(&v)));
    }
    let mut out = DiffPoly::zero();
    for (ui, y) in &fparts {
        if y.is_zero() {
            continue;
        }
        for (uj, gs) in &gparts {
            let entry = table.get(ui, uj)?;
            if entry.is_zero() {
                continue;
            }
            let mut z = DiffPoly::zero();
            for (p, c) in entry.coeffs_in(Family::Lambda) {
                let c = c.rename_param(Family::Lambda, param);
                z += &(&c * &y.shift_pow(param, p, false));
            }
            if z.is_zero() {
                continue;
            }
            let mut acc = DiffPoly::zero();
            for (n, gd) in gs {
                acc += &(gd * &z.shift_pow(param, *n, false));
            }
            let neg = (fo && go) ^ (ui.odd && uj.odd) ^ (go && uj.odd) ^ uj.odd;
            if neg {
                out -= &acc;
            } else {
                out += &acc;
            }
        }
    }
    Ok(out)
}

/// `{b −λ−∂ a}` from `{b λ a}`.
pub fn flip(value: &DiffPoly) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for (n, c) in value.coeffs_in(Family::Lambda) {
        out += &c.shift_pow(Family::Lambda, n, true);
    }
    out
}

/// Generator pairs violating skew-symmetry.
pub fn check_skew(table: &BracketTable) -> Vec<(Var, Var)> {
    let gens = table.generators();
    let mut bad = Vec::new();
    for a in gens {
        for b in gens {
            let lhs = table.get(a, b).unwrap_or_default();
            let rhs = flip(&table.get(b, a).unwrap_or_default());
            let ok = if a.odd && b.odd { lhs == rhs } else { lhs == -rhs };
            if !ok {
                bad.push((*a, *b));
            }
        }
    }
    bad
}

/// `{a λ {b μ c}} − {{a λ b} λ+μ c} − (−1)^{ãb̃}{b μ {a λ c}}` for generators.
pub fn jacobi_defect(table: &BracketTable, a: &Var, b: &Var, c: &Var) -> Result<DiffPoly> {
    let (da, db, dc) = (DiffPoly::var(*a), DiffPoly::var(*b), DiffPoly::var(*c));
    let bc = table.get(b, c)?.rename_param(Family::Lambda, Family::Mu);
    let t1 = master_eval(table, &da, &bc, Family::Lambda)?;
    let ab = table.get(a, b)?;
    let nu = master_eval(table, &ab, &dc, Family::Nu)?;
    let lm = DiffPoly::param(Family::Lambda) + DiffPoly::param(Family::Mu);
    let t2 = substitute_param(&nu, Family::Nu, &lm);
    let ac = table.get(a, c)?;
    let t3 = master_eval(table, &db, &ac, Family::Mu)?;
    let t3 = if a.odd && b.odd { -t3 } else { t3 };
    Ok(t1 - t2 - t3)
}

/// Generator triples violating the Jacobi identity.
pub fn check_jacobi(table: &BracketTable) -> Vec<(Var, Var, Var)> {
    let gens = table.generators();
    let mut bad = Vec::new();
    for a in gens {
        for b in gens {
            for c in gens {
                match jacobi_defect(table, a, b, c) {
                    Ok(d) if d.is_zero() => {}
                    _ => bad.push((*a, *b, *c)),
                }
            }
        }
    }
    bad
}

/// `(−1)^{ãb̃+ãc̃+b̃c̃}`.
fn triple_sign(a: bool, b: bool, c: bool) -> bool {
    (a && b) ^ (a && c) ^ (b && c)
}

/// The generic monic operator `L = 𝟙∂^N + Σ_{M<N} u_M ∂^M` over `set`.
pub fn generic_operator(set: &IndexSet, n: usize) -> MatPsdo {
    MatPsdo::from_fn(set, set, |r, c| {
        let (a, b) = (set.ids()[r], set.ids()[c]);
        let odd = set.odd_at(r) ^ set.odd_at(c);
        let mut terms: Vec<(i32, DiffPoly)> = (0..n).map(|m| (m as i32, DiffPoly::var(Var::u(m, a, b, odd)))).collect();
        if r == c {
            terms.push((n as i32, DiffPoly::one()));
        }
        Psdo::from_terms(terms)
    })
}

/// `z^k w^l` coefficient of the Adler expression for scalar operators `c`, `a`:
/// `Res((C(∂+λ)(∂+λ)^{−k−1})₊ A ∂^{−l−1} − C(∂+λ)((∂+λ)^{−k−1}A)₊ ∂^{−l−1})`.
pub fn adler_coefficient(c: &Psdo, a: &Psdo, k: i32, l: i32) -> Result<DiffPoly> {
    let top = c.top().unwrap_or(0).max(a.top().unwrap_or(0)).max(0);
    let floor = -top - 2;
    let cs = c.shift(Family::Lambda);
    let inv = Psdo::shifted_power(Family::Lambda, -k - 1, floor);
    let t1 = cs.compose(&inv).plus()?.compose(a).coeff_checked(l)?;
    let t2 = cs.compose(&inv.compose(a).plus()?).coeff_checked(l)?;
    Ok(t1 - t2)
}

fn check_index(set: &IndexSet, n: usize, k: usize, a: usize, b: usize) -> Result<(usize, usize)> {
    if k >= n {
        return Err(Error::Invalid(format!("coefficient index {k} not below N = {n}")));
    }
    let pa = set.position(a).ok_or_else(|| Error::Invalid(format!("index {a} not in set")))?;
    let pb = set.position(b).ok_or_else(|| Error::Invalid(format!("index {b} not in set")))?;
    Ok((pa, pb))
}

/// `{u_{k,ab} λ u_{l,cd}}` for the generic operator.
pub fn generic_h_bracket(
    set: &IndexSet,
    n: usize,
    (k, a, b): (usize, usize, usize),
    (l, c, d): (usize, usize, usize),
) -> Result<DiffPoly> {
    let l_op = generic_operator(set, n);
    generic_h_with(&l_op, set, n, (k, a, b), (l, c, d))
}

fn generic_h_with(
    l_op: &MatPsdo,
    set: &IndexSet,
    n: usize,
    (k, a, b): (usize, usize, usize),
    (l, c, d): (usize, usize, usize),
) -> Result<DiffPoly> {
    let (pa, pb) = check_index(set, n, k, a, b)?;
    let (pc, pd) = check_index(set, n, l, c, d)?;
    let v = adler_coefficient(l_op.at(pc, pb), l_op.at(pa, pd), k as i32, l as i32)?;
    let s = triple_sign(set.odd_at(pa), set.odd_at(pb), set.odd_at(pc));
    Ok(if s { -v } else { v })
}

/// `{u_{k,ab} λ u_{l,cd}}_K`, the `ε`-linear part of the bracket of `L + ε𝟙`.
pub fn generic_k_bracket(
    set: &IndexSet,
    n: usize,
    (k, a, b): (usize, usize, usize),
    (l, c, d): (usize, usize, usize),
) -> Result<DiffPoly> {
    let l_op = generic_operator(set, n);
    generic_k_with(&l_op, set, n, (k, a, b), (l, c, d))
}

fn generic_k_with(
    l_op: &MatPsdo,
    set: &IndexSet,
    n: usize,
    (k, a, b): (usize, usize, usize),
    (l, c, d): (usize, usize, usize),
) -> Result<DiffPoly> {
    let (pa, pb) = check_index(set, n, k, a, b)?;
    let (pc, pd) = check_index(set, n, l, c, d)?;
    let one = Psdo::one();
    let mut v = DiffPoly::zero();
    if c == b {
        v += &adler_coefficient(&one, l_op.at(pa, pd), k as i32, l as i32)?;
    }
    if a == d {
        v += &adler_coefficient(l_op.at(pc, pb), &one, k as i32, l as i32)?;
    }
    let s = triple_sign(set.odd_at(pa), set.odd_at(pb), set.odd_at(pc));
    Ok(if s { -v } else { v })
}

/// Generators `u_{k,ab}` of the generic operator, ordered by `k`, then `a`, `b`.
pub fn generic_generators(set: &IndexSet, n: usize) -> Vec<Var> {
    let mut out = Vec::new();
    for k in 0..n {
        for (pa, &a) in set.ids().iter().enumerate() {
            for (pb, &b) in set.ids().iter().enumerate() {
                out.push(Var::u(k, a, b, set.odd_at(pa) ^ set.odd_at(pb)));
            }
        }
    }
    out
}

/// Which generic bracket a table holds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GenericKind {
    H,
    K,
}

type CacheKey = (Vec<usize>, Vec<bool>, usize, GenericKind);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<BracketTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<BracketTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The generic H- or K-bracket table for `(set, N)`, cached.
pub fn generic_table(set: &IndexSet, n: usize, kind: GenericKind) -> Result<Arc<BracketTable>> {
    if n == 0 {
        return Err(Error::Invalid("N must be positive".into()));
    }
    let key = (set.ids().to_vec(), set.profile().to_vec(), n, kind);
    if let Some(t) = cache().lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let l_op = generic_operator(set, n);
    let gens = generic_generators(set, n);
    let mut table = BracketTable::new(gens.clone());
    for x in &gens {
        for y in &gens {
            let (kx, ky) = ((x.m.unwrap() as usize, x.i as usize, x.j as usize), (y.m.unwrap() as usize, y.i as usize, y.j as usize));
            let v = match kind {
                GenericKind::H => generic_h_with(&l_op, set, n, kx, ky)?,
                GenericKind::K => generic_k_with(&l_op, set, n, kx, ky)?,
            };
            if !v.is_zero() {
                table.insert(*x, *y, v);
            }
        }
    }
    let table = Arc::new(table);
    cache().lock().unwrap().insert(key, table.clone());
    Ok(table)
}

/// The automorphism `u_{M,ab} ↦ (−1)^{ã(b̃+1)} u_{M,ab}`; on operators it
/// carries `★` to `∘`.
pub fn star_to_circ(set: &IndexSet, p: &DiffPoly) -> DiffPoly {
    let par = |x: u16| set.parity_of(x as usize).unwrap_or(false);
    p.substitute(&|v: &Var| {
        (v.family == Family::U && par(v.i) && !par(v.j)).then(|| -DiffPoly::var(*v))
    })
}

/// The generic table transported along [`star_to_circ`], the bracket for
/// which the `∘`-Lax flows are Hamiltonian.
pub fn circ_table(set: &IndexSet, n: usize, kind: GenericKind) -> Result<BracketTable> {
    let t = generic_table(set, n, kind)?;
    let mut out = BracketTable::new(t.generators().to_vec());
    for (&(x, y), v) in t.entries() {
        let s = star_to_circ(set, &(&DiffPoly::var(x) * &DiffPoly::var(y)));
        let flip = s != &DiffPoly::var(x) * &DiffPoly::var(y);
        let w = star_to_circ(set, v);
        out.insert(x, y, if flip { -w } else { w });
    }
    Ok(out)
}

/// The table `H + ε K` with `ε` the parameter [`Family::Eps`].
pub fn deformed_table(set: &IndexSet, n: usize) -> Result<BracketTable> {
    let h = generic_table(set, n, GenericKind::H)?;
    let k = generic_table(set, n, GenericKind::K)?;
    Ok(h.combine(&k, &DiffPoly::param(Family::Eps)))
}

/// `{q_ij λ q_hk} = [e_ij, e_hk] + level·λ·str(e_ij e_hk)` on `𝔤𝔩(I)`.
pub fn affine_bracket(set: &IndexSet, level: &BigRational, (i, j): (usize, usize), (h, k): (usize, usize)) -> DiffPoly {
    let par = |x: usize| set.parity_of(x).expect("index in set");
    let q = |a: usize, b: usize| DiffPoly::var(Var::q(a, b, par(a) ^ par(b)));
    let mut out = DiffPoly::zero();
    if h == j {
        out += &q(i, k);
    }
    if i == k {
        let s = (par(i) ^ par(j)) && (par(h) ^ par(k));
        out += &q(h, j).scale(&-sign(s));
    }
    if j == h && i == k {
        out += &DiffPoly::lambda().scale(&(level * sign(par(i))));
    }
    out
}

/// Generators `q_ij` ordered row-major.
pub fn affine_generators(set: &IndexSet) -> Vec<Var> {
    let mut out = Vec::new();
    for (pi, &i) in set.ids().iter().enumerate() {
        for (pj, &j) in set.ids().iter().enumerate() {
            out.push(Var::q(i, j, set.odd_at(pi) ^ set.odd_at(pj)));
        }
    }
    out
}

/// The affine bracket table on `𝔤𝔩(I)` at the given level.
pub fn affine_table(set: &IndexSet, level: &BigRational) -> BracketTable {
    let gens = affine_generators(set);
    let mut t = BracketTable::new(gens.clone());
    for x in &gens {
        for y in &gens {
            let v = affine_bracket(set, level, (x.i as usize, x.j as usize), (y.i as usize, y.j as usize));
            if !v.is_zero() {
                t.insert(*x, *y, v);
            }
        }
    }
    t
}

/// The operator `A_ij = δ_ij ∂ + (−1)^ĩ q_ij`.
pub fn affine_operator(set: &IndexSet) -> MatPsdo {
    MatPsdo::from_fn(set, set, |r, c| {
        let (i, j) = (set.ids()[r], set.ids()[c]);
        let q = DiffPoly::var(Var::q(i, j, set.odd_at(r) ^ set.odd_at(c))).scale(&sign(set.odd_at(r)));
        let mut p = Psdo::mult(q);
        if r == c {
            p = &p + &Psdo::d_pow(1);
        }
        p
    })
}

/// `z^p w^q` coefficient of
/// `A(z)ι_z(z−w−λ−∂)^{-1}(B(w)) − A(∂+λ+w)ι_z(z−w−λ−∂)^{-1}(B^*(λ−z))`.
pub fn adler_rhs(a: &Psdo, b: &Psdo, p: i32, q: i32) -> Result<DiffPoly> {
    let lam = Family::Lambda;
    let mut out = DiffPoly::zero();
    let Some(top_a) = a.top() else {
        return Ok(out);
    };
    if b.is_zero() && b.is_exact() {
        return Ok(out);
    }
    let big = |x: BigInt| BigRational::from_integer(x);
    for kp in (p + 1)..=top_a {
        let ak = a.coeff_checked(kp)?;
        if ak.is_zero() {
            continue;
        }
        let n = kp - p - 1;
        for s in 0..=n {
            let br = b.coeff_checked(q - n + s)?;
            if br.is_zero() {
                continue;
            }
            let t = br.shift_pow(lam, s as u32, false).scale(&big(binomial(n as i64, s as u32)));
            out += &(&ak * &t);
        }
    }
    let bs = b.adjoint();
    if let Some(top_b) = bs.top() {
        let bottom_a = a.bottom().unwrap_or(top_a);
        for n in 0..=(top_b - 1 - p).max(-1) {
            let mut inner = DiffPoly::zero();
            for j in (n + 1 + p)..=top_b {
                let beta = bs.coeff_checked(j)?;
                if beta.is_zero() {
                    continue;
                }
                let s = (j - n - 1 - p) as u32;
                let c = big(binomial(j as i64, s)) * sign(j % 2 != 0) * sign(s % 2 == 1);
                inner += &(&beta * &lambda_pow(lam, s)).scale(&c);
            }
            if inner.is_zero() {
                continue;
            }
            let lo = if a.is_exact() { (q - n).max(bottom_a) } else { q - n };
            for kp in lo..=top_a {
                let ak = a.coeff_checked(kp)?;
                if ak.is_zero() {
                    continue;
                }
                let t = (kp + n - q) as u32;
                let term = inner.shift_pow(lam, t, false).scale(&big(binomial((kp + n) as i64, t)));
                out -= &(&ak * &term);
            }
        }
    }
    Ok(out)
}

/// One failing coefficient of the matrix Adler identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdlerViolation {
    pub ij: (usize, usize),
    pub hk: (usize, usize),
    pub p: i32,
    pub q: i32,
}

/// Checks `{A_ij(z) λ A_hk(w)} = ±(−1)^{ĩj̃+ĩh̃+j̃h̃}(…)` on the window
/// `p ∈ [−depth, zmax]`, `q ∈ [−depth, wmax]`; `opposite` uses the negated bracket.
pub fn verify_adler_identity(
    op: &MatPsdo,
    table: &BracketTable,
    zmax: i32,
    wmax: i32,
    depth: i32,
    opposite: bool,
) -> Result<Vec<AdlerViolation>> {
    let set = op.rows();
    if set.profile() != op.cols().profile() {
        return Err(Error::Dimension("Adler identity needs a square operator".into()));
    }
    let size = set.len();
    let mut bad = Vec::new();
    for i in 0..size {
        for j in 0..size {
            for h in 0..size {
                for k in 0..size {
                    let s = triple_sign(set.odd_at(i), set.odd_at(j), set.odd_at(h)) ^ opposite;
                    let (x, y) = (op.at(i, j), op.at(h, k));
                    let (a, b) = (op.at(h, j), op.at(i, k));
                    for p in -depth..=zmax {
                        let xp = x.coeff_checked(p)?;
                        for q in -depth..=wmax {
                            let yq = y.coeff_checked(q)?;
                            let lhs = master_eval(table, &xp, &yq, Family::Lambda)?;
                            let rhs = adler_rhs(a, b, p, q)?;
                            let ok = if s { lhs == -rhs } else { lhs == rhs };
                            if !ok {
                                bad.push(AdlerViolation {
                                    ij: (set.ids()[i], set.ids()[j]),
                                    hk: (set.ids()[h], set.ids()[k]),
                                    p,
                                    q,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(bad)
}

/// `δf/δL = Σ (−1)^ã e_ba ⊗ ∂^{−k−1}∘δf/δu_{k,ab}` truncated at `floor`.
pub fn variational_matrix(f: &DiffPoly, set: &IndexSet, n: usize, floor: i32) -> MatPsdo {
    let mut out = MatPsdo::zero(set, set);
    let gens: BTreeSet<Var> = f.generators();
    for (pa, &a) in set.ids().iter().enumerate() {
        for (pb, &b) in set.ids().iter().enumerate() {
            let mut acc = Psdo::zero().with_floor(Some(floor));
            for k in 0..n {
                let v = Var::u(k, a, b, set.odd_at(pa) ^ set.odd_at(pb));
                if !gens.contains(&v) {
                    continue;
                }
                let dv = f.variational(&v);
                let term = Psdo::d_pow(-(k as i32) - 1).compose_to(&Psdo::mult(dv), Some(floor));
                acc = &acc + &term;
            }
            if set.odd_at(pa) {
                acc = -&acc;
            }
            *out.at_mut(pb, pa) = acc;
        }
    }
    out
}

fn gd_setup(f: &DiffPoly, g: &DiffPoly, set: &IndexSet, n: usize) -> (MatPsdo, MatPsdo, MatPsdo) {
    let floor = -2 * n as i32 - 2;
    let l = generic_operator(set, n);
    (l, variational_matrix(f, set, n, floor), variational_matrix(g, set, n, floor))
}

/// `Res str ((L★X)₊★L★Y − L★(X★L)₊★Y)` with `X = δf/δL`, `Y = δg/δL`.
pub fn gd_quadratic(f: &DiffPoly, g: &DiffPoly, set: &IndexSet, n: usize) -> Result<DiffPoly> {
    let (l, x, y) = gd_setup(f, g, set, n);
    let t1 = l.star_mul(&x)?.plus()?.star_mul(&l)?.star_mul(&y)?;
    let t2 = l.star_mul(&x.star_mul(&l)?.plus()?)?.star_mul(&y)?;
    (&t1 - &t2).supertrace()?.residue()
}

/// `Res str ((L★X − X★L)₊★Y)` with `X = δf/δL`, `Y = δg/δL`.
pub fn gd_linear(f: &DiffPoly, g: &DiffPoly, set: &IndexSet, n: usize) -> Result<DiffPoly> {
    let (l, x, y) = gd_setup(f, g, set, n);
    let c = &l.star_mul(&x)? - &x.star_mul(&l)?;
    c.plus()?.star_mul(&y)?.supertrace()?.residue()
}

/// Entries whose value does not have parity `ã + b̃`.
pub fn check_parity(table: &BracketTable) -> Vec<(Var, Var)> {
    table
        .entries()
        .filter(|((a, b), v)| !matches!((v.parity(), a.odd ^ b.odd), (Parity::Even, false) | (Parity::Odd, true)))
        .map(|(k, _)| *k)
        .collect()
}
