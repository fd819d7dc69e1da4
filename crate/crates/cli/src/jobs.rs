use crate::report::{var_latex, Body, Report};
use crate::{Common, TableKind};
use sato::hierarchy::{default_depth, Bracket, Hierarchy};
use sato::matop::{IndexSet, MatPsdo};
use sato::psdo::Psdo;
use sato::pvsa::{
    affine_operator, affine_table, check_jacobi, check_parity, check_skew, deformed_table, generic_operator,
    generic_table, verify_adler_identity, BracketTable, GenericKind,
};
use sato::serial::Json;
use sato::superpoly::{int, DiffPoly, Family, Var};
use sato::wgen::{build_l, build_l_by_chains, conformal_weight, RectangularSpec, WAlgebra, Weight};
use sato::{Error, Result};
use std::path::PathBuf;

const CACHE_ENV: &str = "SATO_CACHE_DIR";

fn validate(c: &Common, min_n: usize) -> Result<()> {
    if c.m + c.n == 0 {
        return Err(Error::Invalid("need m + n ≥ 1".into()));
    }
    if c.big_n < min_n {
        return Err(Error::Invalid(format!("need N ≥ {min_n}")));
    }
    if c.k.contains(&0) {
        return Err(Error::Invalid("flow indices start at 1".into()));
    }
    Ok(())
}

fn start(command: &str, c: &Common) -> Report {
    let mut r = Report::new(command);
    r.spec("m", c.m);
    r.spec("n", c.n);
    r.spec("N", c.big_n);
    r
}

fn ks(c: &Common, default: &[usize]) -> Vec<usize> {
    let mut k = if c.k.is_empty() { default.to_vec() } else { c.k.clone() };
    k.sort_unstable();
    k.dedup();
    k
}

fn debug_list<T: std::fmt::Debug>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| format!("{x:?}")).collect()
}

fn display_list<T: std::fmt::Display>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

pub fn wgen(c: &Common, verify_iso: bool) -> Result<Report> {
    validate(c, 2)?;
    let spec = RectangularSpec::new(c.m, c.n, c.big_n)?;
    let w = WAlgebra::get(spec)?;
    let mut r = start("wgen", c);
    let mut membership = Vec::new();
    let mut weights = Vec::new();
    r.entry("L".into(), r"L(\partial)".into(), Body::Matrix(w.l().clone()));
    for g in w.generators() {
        let v = g.var(&spec);
        r.entry(v.to_string(), var_latex(&v), Body::Poly(g.value.clone()));
        if !w.check_membership(&g.value)?.is_empty() {
            membership.push(v.to_string());
        }
        if conformal_weight(&spec, &g.value) != Weight::Homogeneous((c.big_n - g.k) as i64) {
            weights.push(v.to_string());
        }
    }
    let chains = if build_l(&spec)? == build_l_by_chains(&spec)? { vec![] } else { vec!["L differs".to_string()] };
    r.check("quasi-determinant equals chain sum", chains);
    r.check("generators lie in the W-superalgebra", membership);
    r.check("generator w_{ij;k} has conformal weight N-k", weights);
    if verify_iso {
        let iso = w.verify_isomorphism()?;
        let mut bad = display_list(&iso.not_members);
        bad.extend(iso.mismatches.iter().map(|(a, b)| format!("{{{a} λ {b}}}")));
        r.check("W-brackets equal generic brackets", bad);
    }
    Ok(r)
}

fn table_entries(r: &mut Report, t: &BracketTable) {
    for ((a, b), v) in t.entries() {
        r.entry(
            format!("{{{a} λ {b}}}"),
            format!("\\{{{} {{}}_\\lambda {}\\}}", var_latex(a), var_latex(b)),
            Body::Bracket(v.clone()),
        );
    }
}

pub fn brackets(c: &Common, kind: TableKind) -> Result<Report> {
    let mut r = start("brackets", c);
    let table = match kind {
        TableKind::W => {
            validate(c, 2)?;
            r.spec("kind", "w");
            WAlgebra::get(RectangularSpec::new(c.m, c.n, c.big_n)?)?.bracket_table()?
        }
        TableKind::H | TableKind::K => {
            validate(c, 1)?;
            let g = if kind == TableKind::H { GenericKind::H } else { GenericKind::K };
            r.spec("kind", if kind == TableKind::H { "h" } else { "k" });
            (*generic_table(&IndexSet::superset(c.m, c.n), c.big_n, g)?).clone()
        }
    };
    table_entries(&mut r, &table);
    r.check("skew-symmetry", debug_list(&check_skew(&table)));
    Ok(r)
}

pub fn check_pvsa(c: &Common) -> Result<Report> {
    validate(c, 1)?;
    let set = IndexSet::superset(c.m, c.n);
    let mut r = start("check-pvsa", c);
    let h = generic_table(&set, c.big_n, GenericKind::H)?;
    let k = generic_table(&set, c.big_n, GenericKind::K)?;
    let sum = h.combine(&k, &DiffPoly::one());
    let eps = deformed_table(&set, c.big_n)?;
    for (name, t) in [("H", &*h), ("K", &*k), ("H+K", &sum), ("H+εK", &eps)] {
        r.check(format!("{name} parity"), debug_list(&check_parity(t)));
        r.check(format!("{name} skew-symmetry"), debug_list(&check_skew(t)));
        r.check(format!("{name} Jacobi identity"), debug_list(&check_jacobi(t)));
    }
    Ok(r)
}

pub fn verify_adler(c: &Common) -> Result<Report> {
    validate(c, 1)?;
    let set = IndexSet::superset(c.m, c.n);
    let big_n = c.big_n as i32;
    let depth = c.depth.unwrap_or(3) as i32;
    let mut r = start("verify-adler", c);
    r.spec("depth", depth);
    let aff = affine_table(&set, &int(-1));
    r.check("affine operator, level -1", debug_list(&verify_adler_identity(&affine_operator(&set), &aff, 1, 1, 0, false)?));
    let h = generic_table(&set, c.big_n, GenericKind::H)?;
    let l = generic_operator(&set, c.big_n);
    r.check("generic operator", debug_list(&verify_adler_identity(&l, &h, big_n, big_n, 0, false)?));
    let eps = deformed_table(&set, c.big_n)?;
    let e = DiffPoly::param(Family::Eps);
    let le = &l + &MatPsdo::identity(&set).map(|p| Psdo::mult(e.clone()).compose(p));
    r.check("L + ε𝟙 for H + εK", debug_list(&verify_adler_identity(&le, &eps, big_n, big_n, 0, false)?));
    let inv = l.star_inverse_monic(2 * depth + big_n)?;
    r.check(
        format!("★-inverse for the opposite bracket, depth {depth}"),
        debug_list(&verify_adler_identity(&inv, &h, -big_n, -big_n, depth, true)?),
    );
    let first = [set.ids()[0]];
    let sub = l.submatrix(&first, &first)?;
    r.check("submatrix", debug_list(&verify_adler_identity(&sub, &h, big_n, big_n, 0, false)?));
    Ok(r)
}

fn cache_file(c: &Common, depth: usize) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    Some(PathBuf::from(dir).join(format!("root-m{}-n{}-N{}-depth{}.json", c.m, c.n, c.big_n, depth)))
}

/// A hierarchy seeded with roots found in the cache directory.
fn open_hierarchy(c: &Common) -> Result<Hierarchy> {
    let h = Hierarchy::new(&IndexSet::superset(c.m, c.n), c.big_n)?;
    let Some(dir) = std::env::var_os(CACHE_ENV) else {
        return Ok(h);
    };
    let Ok(listing) = std::fs::read_dir(&dir) else {
        return Ok(h);
    };
    let prefix = format!("root-m{}-n{}-N{}-depth", c.m, c.n, c.big_n);
    for item in listing.flatten() {
        let name = item.file_name().to_string_lossy().to_string();
        let Some(d) = name.strip_prefix(&prefix).and_then(|s| s.strip_suffix(".json")) else {
            continue;
        };
        let (Ok(depth), Ok(text)) = (d.parse::<usize>(), std::fs::read_to_string(item.path())) else {
            continue;
        };
        if MatPsdo::from_json_str(&text).and_then(|b| h.seed_root(depth, b)).is_err() {
            eprintln!("warning: ignoring invalid cache entry {name}");
        }
    }
    Ok(h)
}

fn store_roots(c: &Common, h: &Hierarchy) {
    for (depth, b) in h.roots() {
        let Some(path) = cache_file(c, depth) else {
            return;
        };
        if path.exists() {
            continue;
        }
        if let Some(parent) = path.parent() {
            let _ = std::fs::create_dir_all(parent);
        }
        if let Err(e) = std::fs::write(&path, b.to_json_string()) {
            eprintln!("warning: cannot write cache entry {}: {e}", path.display());
        }
    }
}

fn depth_for(c: &Common, k: usize) -> usize {
    c.depth.unwrap_or_else(|| default_depth(k, c.big_n))
}

pub fn hierarchy(c: &Common) -> Result<Report> {
    validate(c, 1)?;
    let h = open_hierarchy(c)?;
    let mut r = start("hierarchy", c);
    if c.reduced {
        r.spec("reduced", true);
    }
    let top = c.big_n as u16 - 1;
    let fix = |p: &DiffPoly| if c.reduced { h.reduce(p) } else { p.clone() };
    for k in ks(c, &[1]) {
        let depth = depth_for(c, k);
        let density = h.hamiltonian_density(k, depth)?;
        r.entry(format!("h{k}"), format!("h_{{{k}}}"), Body::Poly(fix(&density)));
        let flow = h.flow_h(k, depth)?;
        for (g, v) in &flow.dgen {
            if c.reduced && g.m == Some(top) {
                continue;
            }
            r.entry(
                format!("d/dt{k} {g}"),
                format!("\\frac{{d {}}}{{d t_{{{k}}}}}", var_latex(g)),
                Body::Poly(fix(v)),
            );
        }
        let deeper = h.flow_h(k, depth + 2)?;
        let unstable = if deeper.dgen == flow.dgen && h.hamiltonian_density(k, depth + 2)? == density {
            vec![]
        } else {
            vec![format!("depth {depth} vs {}", depth + 2)]
        };
        r.check(format!("k={k} stable under depth+2"), unstable);
        let lax = if h.lax_matches_bracket(Bracket::H, k, depth)? { vec![] } else { vec!["mismatch".into()] };
        r.check(format!("k={k} Lax flow equals bracket flow"), lax);
        r.check(format!("k={k} u_{{N-1}} are constants"), display_list(&h.moving_top_generators(k, depth)?));
    }
    store_roots(c, &h);
    Ok(r)
}

pub fn lenard_magri(c: &Common, extra: usize) -> Result<Report> {
    validate(c, 1)?;
    let h = open_hierarchy(c)?;
    let kmax = *ks(c, &[3]).last().unwrap();
    let mut r = start("lenard-magri", c);
    r.spec("kmax", kmax);
    r.spec("extra_depth", extra);
    let lm = h.check_lenard_magri(kmax, extra)?;
    r.check("H(h_k) = K(h_{k+N})", display_list(&lm.recursion_failures));
    r.check("K(h_k) = 0 for k ≤ N", display_list(&lm.nonzero_initial));
    r.check("Lax flows equal bracket flows", debug_list(&lm.lax_mismatches));
    store_roots(c, &h);
    Ok(r)
}

pub fn conservation(c: &Common) -> Result<Report> {
    validate(c, 1)?;
    let h = open_hierarchy(c)?;
    let list = ks(c, &[1, 3]);
    let mut r = start("conservation", c);
    for &k in &list {
        for &k2 in &list {
            let depth = c.depth.unwrap_or_else(|| default_depth(k.max(k2), c.big_n));
            let ok = h.check_conservation(k, k2, depth)?;
            r.check(format!("d h{k2}/dt{k} is a total derivative"), if ok { vec![] } else { vec!["not exact".into()] });
            if k < k2 {
                let bad: Vec<Var> = h.check_commutation(k, k2, depth)?;
                r.check(format!("flows {k} and {k2} commute"), display_list(&bad));
            }
        }
        r.check(format!("k={k} u_{{N-1}} are constants"), display_list(&h.moving_top_generators(k, depth_for(c, k))?));
    }
    store_roots(c, &h);
    Ok(r)
}
