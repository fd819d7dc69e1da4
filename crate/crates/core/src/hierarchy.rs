//! Fractional powers of the generic operator, Hamiltonian densities, Lax
//! flows and Lenard–Magri checks.
//!
//! ```
//! use sato::hierarchy::Hierarchy;
//! use sato::matop::IndexSet;
//! use sato::superpoly::{frac, DiffPoly, Var};
//!
//! let h = Hierarchy::new(&IndexSet::superset(1, 0), 2).unwrap();
//! let u = DiffPoly::var(Var::u(1, 1, 1, false));
//! let v = DiffPoly::var(Var::u(0, 1, 1, false));
//! let h1 = h.hamiltonian_density(1, 4).unwrap();
//! assert_eq!(h1, v - u.d().scale(&frac(1, 2)) - (&u * &u).scale(&frac(1, 4)));
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::matop::{IndexSet, MatPsdo};
use crate::psdo::Psdo;
use crate::pvsa::{circ_table, generic_generators, generic_operator, master_eval, BracketTable, GenericKind};
use crate::superpoly::{binomial, int, DiffPoly, Family, Scalar, Var};
use crate::{Error, Result};

/// The natural depth for quantities indexed by `k`.
pub fn default_depth(k: usize, n: usize) -> usize {
    k + n + 1
}

/// Runs `f` at `depth` and `depth + 2` and returns the common value.
pub fn stable<T: PartialEq>(depth: usize, f: impl Fn(usize) -> Result<T>) -> Result<T> {
    let a = f(depth)?;
    let b = f(depth + 2)?;
    if a != b {
        return Err(Error::Unstable { depth: depth as i32, deeper: depth as i32 + 2 });
    }
    Ok(a)
}

/// The time derivative of the generic operator along one flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub k: usize,
    pub dl: MatPsdo,
    pub dgen: BTreeMap<Var, DiffPoly>,
}

impl FlowResult {
    /// Extends the flow to `p` by the Leibniz rule.
    pub fn apply(&self, p: &DiffPoly) -> DiffPoly {
        p.apply_evolution(&|v: &Var| self.dgen.get(v).cloned())
    }

    pub fn is_zero(&self) -> bool {
        self.dgen.values().all(DiffPoly::is_zero)
    }
}

/// Which bracket produces a flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bracket {
    H,
    K,
}

/// Outcome of the Lenard–Magri checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LenardMagriReport {
    /// `k` with `{h_k λ u}_H|₀ ≠ {h_{k+N} λ u}_K|₀` for some generator.
    pub recursion_failures: Vec<usize>,
    /// `k ≤ N` with a nonzero `K`-flow of `h_k`.
    pub nonzero_initial: Vec<usize>,
    /// `k` whose Lax and bracket flows disagree.
    pub lax_mismatches: Vec<(Bracket, usize)>,
}

impl LenardMagriReport {
    pub fn passed(&self) -> bool {
        self.recursion_failures.is_empty() && self.nonzero_initial.is_empty() && self.lax_mismatches.is_empty()
    }
}

/// The hierarchy of the generic operator `L = 𝟙∂^N + Σ u_M ∂^M` over `I`.
#[derive(Debug)]
pub struct Hierarchy {
    set: IndexSet,
    n: usize,
    l: MatPsdo,
    roots: Mutex<HashMap<usize, Arc<MatPsdo>>>,
    densities: Mutex<HashMap<(usize, usize), DiffPoly>>,
    tables: [OnceLock<BracketTable>; 2],
}

impl Hierarchy {
    pub fn new(set: &IndexSet, n: usize) -> Result<Hierarchy> {
        if n == 0 || set.is_empty() {
            return Err(Error::Invalid("need N ≥ 1 and a nonempty index set".into()));
        }
        Ok(Hierarchy { set: set.clone(), n, l: generic_operator(set, n), roots: Mutex::new(HashMap::new()), densities: Mutex::new(HashMap::new()), tables: Default::default() })
    }

    pub fn set(&self) -> &IndexSet {
        &self.set
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> &MatPsdo {
        &self.l
    }

    pub fn generators(&self) -> Vec<Var> {
        generic_generators(&self.set, self.n)
    }

    /// The `H`- or `K`-bracket in the `∘` convention.
    pub fn table(&self, which: Bracket) -> Result<&BracketTable> {
        let (slot, kind) = match which {
            Bracket::H => (&self.tables[0], GenericKind::H),
            Bracket::K => (&self.tables[1], GenericKind::K),
        };
        if let Some(t) = slot.get() {
            return Ok(t);
        }
        let t = circ_table(&self.set, self.n, kind)?;
        Ok(slot.get_or_init(|| t))
    }

    /// Roots computed or seeded so far, by increasing depth.
    pub fn roots(&self) -> Vec<(usize, Arc<MatPsdo>)> {
        let mut out: Vec<_> = self.roots.lock().unwrap().iter().map(|(d, b)| (*d, b.clone())).collect();
        out.sort_by_key(|(d, _)| *d);
        out
    }

    /// Installs a previously computed `L^{1/N}` after checking `B^{∘N} = L`.
    pub fn seed_root(&self, depth: usize, b: MatPsdo) -> Result<()> {
        if b.rows() != &self.set || b.cols() != &self.set || !b.is_monic(1) || b.floor() != Some(-(depth as i32)) {
            return Err(Error::Invalid("seeded root has the wrong shape".into()));
        }
        let target = self.n as i32 - 1 - depth as i32;
        if !b.circ_pow_to(self.n, Some(target))?.agrees_with(&self.l) {
            return Err(Error::Invalid("seeded root does not power back to L".into()));
        }
        self.roots.lock().unwrap().insert(depth, Arc::new(b));
        Ok(())
    }

    /// `L^{1/N}` down to exponent `−depth`.
    pub fn root(&self, depth: usize) -> Result<Arc<MatPsdo>> {
        if let Some(b) = self.roots.lock().unwrap().get(&depth) {
            return Ok(b.clone());
        }
        let b = Arc::new(self.l.circ_root(self.n, depth as i32)?);
        self.roots.lock().unwrap().insert(depth, b.clone());
        Ok(b)
    }

    /// `L^{k/N}` from the root at `depth`; trusted down to `k − 1 − depth`.
    pub fn power(&self, k: i64, depth: usize) -> Result<MatPsdo> {
        self.power_to(k, depth, k as i32 - 1 - depth as i32)
    }

    /// `L^{k/N}` from the root at `depth`, computed down to exponent `target`.
    pub fn power_to(&self, k: i64, depth: usize, target: i32) -> Result<MatPsdo> {
        let b = self.root(depth)?;
        let target = Some(target);
        if k >= 0 {
            return b.circ_pow_to(k as usize, target);
        }
        let inv = b.circ_inverse_monic(depth as i32 + 2)?;
        inv.circ_pow_to((-k) as usize, target)
    }

    /// `h_k = (N/k) Res str L^{k/N}`.
    pub fn hamiltonian_density(&self, k: usize, depth: usize) -> Result<DiffPoly> {
        if k == 0 {
            return Err(Error::Invalid("k must be positive".into()));
        }
        if let Some(h) = self.densities.lock().unwrap().get(&(k, depth)) {
            return Ok(h.clone());
        }
        let p = self.power_to(k as i64, depth, -1)?;
        let r = p.supertrace()?.residue()?;
        let h = r.scale(&(int(self.n as i64) / int(k as i64)));
        self.densities.lock().unwrap().insert((k, depth), h.clone());
        Ok(h)
    }

    /// `(−1)^b̃ Res_z (z+∂)^i (L^{k/N−1})_{ba}(z)`.
    pub fn variational_formula(&self, k: usize, i: usize, a: usize, b: usize, depth: usize) -> Result<DiffPoly> {
        let p = self.power_to(k as i64 - self.n as i64, depth, -(i as i32) - 1)?;
        let entry = p.get(b, a);
        let mut out = DiffPoly::zero();
        for t in 0..=i {
            let c = entry.coeff_checked(t as i32 - i as i32 - 1)?;
            out += &c.d_n(t).scale(&Scalar::from_integer(binomial(i as i64, t as u32)));
        }
        let odd_b = self.set.parity_of(b).ok_or_else(|| Error::Invalid(format!("index {b} not in I")))?;
        Ok(if odd_b { -out } else { out })
    }

    /// Generators `u_{i,ab}` where `δh_k/δu_{i,ab}` differs from the residue formula.
    pub fn variational_identity_check(&self, k: usize, depth: usize) -> Result<Vec<Var>> {
        let h = self.hamiltonian_density(k, depth)?;
        let mut bad = Vec::new();
        for g in self.generators() {
            let (i, a, b) = (g.m.unwrap_or(0) as usize, g.i as usize, g.j as usize);
            if h.variational(&g) != self.variational_formula(k, i, a, b, depth)? {
                bad.push(g);
            }
        }
        Ok(bad)
    }

    fn lax(&self, k: usize, exponent: i64, depth: usize) -> Result<FlowResult> {
        let p = if exponent < 0 {
            MatPsdo::zero(&self.set, &self.set)
        } else {
            self.power_to(exponent, depth, 0)?.plus()?
        };
        let dl = &p.circ_mul(&self.l)? - &self.l.circ_mul(&p)?;
        let mut dgen = BTreeMap::new();
        for g in self.generators() {
            let e = dl.get(g.i as usize, g.j as usize);
            dgen.insert(g, e.coeff(g.m.unwrap_or(0) as i32));
        }
        Ok(FlowResult { k, dl, dgen })
    }

    /// `dL/dt_k = (L^{k/N})₊ ∘ L − L ∘ (L^{k/N})₊`.
    pub fn flow_h(&self, k: usize, depth: usize) -> Result<FlowResult> {
        self.lax(k, k as i64, depth)
    }

    /// The same commutator with `L^{k/N − 1}`.
    pub fn flow_k(&self, k: usize, depth: usize) -> Result<FlowResult> {
        self.lax(k, k as i64 - self.n as i64, depth)
    }

    /// `{h_k λ u}|_{λ=0}` on every generator through the master formula.
    pub fn bracket_flow(&self, which: Bracket, k: usize, depth: usize) -> Result<BTreeMap<Var, DiffPoly>> {
        let table = self.table(which)?;
        let h = self.hamiltonian_density(k, depth)?;
        let mut out = BTreeMap::new();
        for g in self.generators() {
            let v = master_eval(table, &h, &DiffPoly::var(g), Family::Lambda)?.at_zero(Family::Lambda);
            out.insert(g, v);
        }
        Ok(out)
    }

    /// The Lax flow of `which` at `k`, compared against the bracket flow.
    pub fn lax_matches_bracket(&self, which: Bracket, k: usize, depth: usize) -> Result<bool> {
        let lax = match which {
            Bracket::H => self.flow_h(k, depth)?,
            Bracket::K => self.flow_k(k, depth)?,
        };
        Ok(lax.dgen == self.bracket_flow(which, k, depth)?)
    }

    /// Recursion `H(h_k) = K(h_{k+N})` for `k ≤ kmax`, vanishing of `K(h_k)` for
    /// `k ≤ N` and Lax/bracket agreement, each at its default depth.
    pub fn check_lenard_magri(&self, kmax: usize, extra_depth: usize) -> Result<LenardMagriReport> {
        let n = self.n;
        let depth = |k: usize| default_depth(k, n) + extra_depth;
        let mut report = LenardMagriReport::default();
        for k in 1..=kmax {
            let h = self.bracket_flow(Bracket::H, k, depth(k))?;
            let kk = self.bracket_flow(Bracket::K, k + n, depth(k + n))?;
            if h != kk {
                report.recursion_failures.push(k);
            }
            if self.flow_h(k, depth(k))?.dgen != h {
                report.lax_mismatches.push((Bracket::H, k));
            }
            if self.flow_k(k + n, depth(k + n))?.dgen != kk {
                report.lax_mismatches.push((Bracket::K, k + n));
            }
        }
        for k in 1..=n {
            let kf = self.bracket_flow(Bracket::K, k, depth(k))?;
            if kf.values().any(|p| !p.is_zero()) || !self.flow_k(k, depth(k))?.is_zero() {
                report.nonzero_initial.push(k);
            }
        }
        Ok(report)
    }

    /// Whether `d h_{k2}/dt_{k}` is a total derivative.
    pub fn check_conservation(&self, k: usize, k2: usize, depth: usize) -> Result<bool> {
        let flow = self.flow_h(k, depth.max(k))?;
        let h = self.hamiltonian_density(k2, depth.max(k2))?;
        flow.apply(&h).is_total_derivative()
    }

    /// Generators on which the flows `k` and `k2` fail to commute.
    pub fn check_commutation(&self, k: usize, k2: usize, depth: usize) -> Result<Vec<Var>> {
        let a = self.flow_h(k, depth.max(k))?;
        let b = self.flow_h(k2, depth.max(k2))?;
        let mut bad = Vec::new();
        for g in self.generators() {
            let ab = a.apply(&b.dgen[&g]);
            let ba = b.apply(&a.dgen[&g]);
            if ab != ba {
                bad.push(g);
            }
        }
        Ok(bad)
    }

    /// Generators `u_{N−1,ab}` that move under the flow `k`.
    pub fn moving_top_generators(&self, k: usize, depth: usize) -> Result<Vec<Var>> {
        let f = self.flow_h(k, depth)?;
        let top = self.n as u16 - 1;
        Ok(f.dgen.iter().filter(|(g, v)| g.m == Some(top) && !v.is_zero()).map(|(g, _)| *g).collect())
    }

    /// Sets every `u_{N−1,ab}` to zero.
    pub fn reduce(&self, p: &DiffPoly) -> DiffPoly {
        let top = self.n as u16 - 1;
        p.substitute(&|v: &Var| (v.family == Family::U && v.m == Some(top)).then(DiffPoly::zero))
    }
}

/// A constant-coefficient-free matrix of multiplication operators.
pub fn coefficient_matrix(set: &IndexSet, entry: impl Fn(usize, usize) -> DiffPoly) -> MatPsdo {
    let ids = set.ids().to_vec();
    MatPsdo::from_fn(set, set, |r, c| Psdo::mult(entry(ids[r], ids[c])))
}
