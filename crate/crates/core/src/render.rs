//! Plain-text and LaTeX rendering.
//!
//! Derivatives of order at most three print as primes, higher ones as
//! `x^{(n)}`. Bracket values are polynomials in the parameter `λ` and print
//! with it.

use crate::matop::MatPsdo;
use crate::psdo::Psdo;
use crate::superpoly::{DiffPoly, Family, Scalar, Var};
use num_traits::{One, Signed};

pub trait Render {
    fn text(&self) -> String;
    fn latex(&self) -> String;
}

fn subscript(parts: &[u16]) -> String {
    if parts.iter().all(|&p| p < 10) {
        parts.iter().map(|p| p.to_string()).collect()
    } else {
        parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn var_latex(v: &Var) -> String {
    let base = match v.family {
        Family::U => format!("u_{{{},{}}}", v.m.unwrap_or(0), subscript(&[v.i, v.j])),
        Family::Q => format!("q_{{{}}}", subscript(&[v.i, v.j])),
        Family::W => format!("w_{{{};{}}}", subscript(&[v.i, v.j]), v.m.unwrap_or(0)),
        Family::Lambda => r"\lambda".to_string(),
        Family::Mu => r"\mu".to_string(),
        Family::Nu => r"\nu".to_string(),
        Family::Eps => r"\varepsilon".to_string(),
        Family::Named(n) => match (v.m, v.i, v.j) {
            (None, 0, 0) => n.as_str().to_string(),
            (None, i, j) => format!("{}_{{{}}}", n.as_str(), subscript(&[i, j])),
            (Some(k), i, j) => format!("{}_{{{};{}}}", n.as_str(), subscript(&[i, j]), k),
        },
    };
    match v.der {
        0 => base,
        1..=3 => format!("{base}{}", "'".repeat(v.der as usize)),
        n => format!("{base}^{{({n})}}"),
    }
}

fn scalar_latex(c: &Scalar) -> String {
    if c.is_integer() {
        c.to_string()
    } else {
        format!(r"\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

impl Render for DiffPoly {
    fn text(&self) -> String {
        self.to_string()
    }

    fn latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let a = c.abs();
            let body: Vec<String> = m
                .factors()
                .iter()
                .map(|(v, e)| match (*e, v.der) {
                    (1, _) => var_latex(v),
                    (e, 0) => format!("{}^{{{e}}}", var_latex(v)),
                    (e, _) => format!("({})^{{{e}}}", var_latex(v)),
                })
                .collect();
            if m.is_one() {
                out.push_str(&scalar_latex(&a));
            } else {
                if !a.is_one() {
                    out.push_str(&scalar_latex(&a));
                }
                out.push_str(&body.join(" "));
            }
        }
        out
    }
}

fn single_term(p: &DiffPoly) -> bool {
    p.len() == 1 && !p.terms().next().is_some_and(|(_, c)| c.is_negative())
}

fn psdo_render(p: &Psdo, coeff: impl Fn(&DiffPoly) -> String, d: impl Fn(i32) -> String, o: impl Fn(i32) -> String) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (k, c) in p.coeffs().iter().rev() {
        let s = if *k == 0 {
            coeff(c)
        } else if c.as_scalar().is_some_and(|x| x.is_one()) {
            d(*k)
        } else if single_term(c) {
            format!("{} {}", coeff(c), d(*k))
        } else {
            format!("({}) {}", coeff(c), d(*k))
        };
        parts.push(s);
    }
    if let Some(t) = p.floor() {
        parts.push(o(t - 1));
    }
    if parts.is_empty() {
        return "0".into();
    }
    parts.join(" + ").replace("+ -", "- ")
}

impl Render for Psdo {
    fn text(&self) -> String {
        psdo_render(
            self,
            |c| c.text(),
            |k| if k == 1 { "d".into() } else { format!("d^{k}") },
            |t| format!("O(d^{t})"),
        )
    }

    fn latex(&self) -> String {
        psdo_render(
            self,
            |c| c.latex(),
            |k| if k == 1 { r"\partial".into() } else { format!(r"\partial^{{{k}}}") },
            |t| format!(r"O(\partial^{{{t}}})"),
        )
    }
}

impl Render for MatPsdo {
    fn text(&self) -> String {
        let mut out = String::new();
        for (r, i) in self.rows().ids().iter().enumerate() {
            for (c, j) in self.cols().ids().iter().enumerate() {
                out.push_str(&format!("[{i},{j}] {}\n", self.at(r, c).text()));
            }
        }
        out
    }

    fn latex(&self) -> String {
        let rows: Vec<String> = (0..self.rows().len())
            .map(|r| (0..self.cols().len()).map(|c| self.at(r, c).latex()).collect::<Vec<_>>().join(" & "))
            .collect();
        format!("\\begin{{bmatrix}}\n{}\n\\end{{bmatrix}}", rows.join(" \\\\\n"))
    }
}
