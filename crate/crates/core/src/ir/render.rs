//! Canonical text and LaTeX rendering.
//!
//! Grammar (bit-exact): atoms separated by spaces; generators `a<k>`/`b<k>`
//! with optional trailing `*`; maps `r( … )`, `R( … )`, `p[<rational>]( … )`;
//! scalar factors `w( … )`, `v( … )` joined to their term with `*`;
//! rationals `<int>` or `<int>/<posint>`; `+`/`-` separate terms.  The unit
//! word renders as `1`, the zero expression as `0`.

use super::{AlgebraTag, Atom, Expr, MapSymbol, Rat, ScalarKind, Term};
use num_traits::Signed;

pub fn render_rat(r: &Rat) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn render_atom(a: &Atom) -> String {
    match a {
        Atom::Gen { tag, id, adjoint } => {
            let letter = match tag {
                AlgebraTag::A => 'a',
                AlgebraTag::B => 'b',
            };
            let star = if *adjoint { "*" } else { "" };
            format!("{letter}{id}{star}")
        }
        Atom::Map { sym, arg } => match sym {
            MapSymbol::Rho => format!("r({})", canonical_text(arg)),
            MapSymbol::CapR => format!("R({})", canonical_text(arg)),
            MapSymbol::Phi(t) => format!("p[{}]({})", render_rat(t), canonical_text(arg)),
        },
    }
}

fn render_term_body(t: &Term) -> String {
    let mut pieces: Vec<String> = Vec::new();
    for s in &t.scalars {
        let f = match s.kind {
            ScalarKind::Omega => 'w',
            ScalarKind::Nu => 'v',
        };
        pieces.push(format!("{f}({})", canonical_text(&s.arg)));
    }
    let word = t.word.iter().map(render_atom).collect::<Vec<_>>().join(" ");
    if pieces.is_empty() {
        word
    } else if word.is_empty() {
        pieces.join(" * ")
    } else {
        format!("{} * {}", pieces.join(" * "), word)
    }
}

/// Deterministic rendering of a normalized expression; round-trips through
/// [`super::parse`].
pub fn canonical_text(e: &Expr) -> String {
    if e.terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, t) in e.terms.iter().enumerate() {
        let neg = t.coeff.is_negative();
        if i == 0 {
            if neg {
                out.push_str("- ");
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mag = t.coeff.abs();
        let body = render_term_body(t);
        if body.is_empty() {
            out.push_str(&render_rat(&mag));
        } else if mag == Rat::from_integer(1) {
            out.push_str(&body);
        } else {
            out.push_str(&render_rat(&mag));
            out.push(' ');
            out.push_str(&body);
        }
    }
    out
}

fn latex_atom(a: &Atom) -> String {
    match a {
        Atom::Gen { tag, id, adjoint } => {
            let letter = match tag {
                AlgebraTag::A => 'a',
                AlgebraTag::B => 'b',
            };
            if *adjoint {
                format!("{letter}_{{{id}}}^*")
            } else {
                format!("{letter}_{{{id}}}")
            }
        }
        Atom::Map { sym, arg } => match sym {
            MapSymbol::Rho => format!("\\rho({})", latex_text(arg)),
            MapSymbol::CapR => format!("R({})", latex_text(arg)),
            MapSymbol::Phi(t) => format!("\\phi_{{{}}}({})", render_rat(t), latex_text(arg)),
        },
    }
}

/// LaTeX form of a normalized expression, for visual diffing against the
/// thesis tables: `r(x)` → `\rho(x)`, `p[t](x)` → `\phi_{t}(x)`,
/// `w(x)` → `\omega(x)`, `v(x)` → `\nu(x)`.
pub fn latex_text(e: &Expr) -> String {
    if e.terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, t) in e.terms.iter().enumerate() {
        let neg = t.coeff.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mag = t.coeff.abs();
        let mut pieces: Vec<String> = Vec::new();
        if mag != Rat::from_integer(1) {
            pieces.push(if *mag.denom() == 1 {
                format!("{}", mag.numer())
            } else {
                format!("\\tfrac{{{}}}{{{}}}", mag.numer(), mag.denom())
            });
        }
        for s in &t.scalars {
            let f = match s.kind {
                ScalarKind::Omega => "\\omega",
                ScalarKind::Nu => "\\nu",
            };
            pieces.push(format!("{f}({})", latex_text(&s.arg)));
        }
        for a in &t.word {
            pieces.push(latex_atom(a));
        }
        if pieces.is_empty() {
            pieces.push("1".to_string());
        }
        out.push_str(&pieces.join(" "));
    }
    out
}
