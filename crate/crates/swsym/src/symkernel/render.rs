//! Plain-infix and LaTeX rendering.
//!
//! The plain renderer emits the grammar documented in `docs/grammar.md`, so
//! `parse(render(e))` reproduces `e` for any expression in the parseable
//! subset (no opaque function markers).

use num::{One, Signed};

use super::expr::{Expr, ExprNode, Func};
use super::symbol::SymbolKind;

fn prec(e: &Expr) -> u8 {
    match e.node() {
        ExprNode::Add(_) => 1,
        ExprNode::Mul(_) => 2,
        ExprNode::Pow(_, _) => 3,
        ExprNode::Num(r) => {
            if r.is_negative() || !r.is_integer() {
                0 // needs parens inside products/powers
            } else {
                4
            }
        }
        _ => 4,
    }
}

fn atom(e: &Expr, min_prec: u8, out: &mut String) {
    let p = prec(e);
    if p < min_prec {
        out.push('(');
        render_into(e, out);
        out.push(')');
    } else {
        render_into(e, out);
    }
}

fn render_into(e: &Expr, out: &mut String) {
    match e.node() {
        ExprNode::Num(r) => {
            if r.is_integer() {
                out.push_str(&r.numer().to_string());
            } else {
                out.push_str(&format!("{}/{}", r.numer(), r.denom()));
            }
        }
        ExprNode::Sym(s) => out.push_str(s.name()),
        ExprNode::Add(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let (c, key) = t.coeff_split();
                if i == 0 {
                    atom(t, 2, out);
                } else if c.is_negative() {
                    out.push_str(" - ");
                    let pos = Expr::mul(vec![Expr::num(-c), key]);
                    atom(&pos, 2, out);
                } else {
                    out.push_str(" + ");
                    atom(t, 2, out);
                }
            }
        }
        ExprNode::Mul(fs) => {
            let mut first = true;
            let mut lead_minus_one = false;
            for (i, f) in fs.iter().enumerate() {
                if i == 0 {
                    if let ExprNode::Num(r) = f.node() {
                        if (-r.clone()).is_one() {
                            lead_minus_one = true;
                            out.push('-');
                            continue;
                        }
                    }
                }
                if !first {
                    out.push('*');
                }
                atom(f, 3, out);
                first = false;
            }
            if lead_minus_one && first {
                out.push('1');
            }
        }
        ExprNode::Pow(b, x) => {
            atom(b, 4, out);
            out.push('^');
            atom(x, 4, out);
        }
        ExprNode::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            render_into(a, out);
            out.push(')');
        }
        ExprNode::Opaque(f) => {
            out.push_str(&f.name);
            if f.order() > 0 {
                out.push_str("{,");
                for (arg, k) in f.args.iter().zip(&f.derivs) {
                    for _ in 0..*k {
                        out.push_str(arg.name());
                    }
                }
                out.push('}');
            }
        }
    }
}

pub fn render(e: &Expr) -> String {
    let mut s = String::new();
    render_into(e, &mut s);
    s
}

// ---------------------------------------------------------------------------
// LaTeX
// ---------------------------------------------------------------------------

fn latex_name(name: &str) -> String {
    const GREEK: &[&str] = &[
        "alpha", "beta", "gamma", "delta", "epsilon", "sigma", "lambda", "xi", "eta", "tau",
        "omega", "phi", "psi",
    ];
    // split trailing digits into a subscript: H0 -> H_{0}
    let trimmed = name.trim_end_matches(|c: char| c.is_ascii_digit());
    let digits = &name[trimmed.len()..];
    let head = if GREEK.contains(&trimmed) {
        format!("\\{}", trimmed)
    } else {
        trimmed.to_string()
    };
    if digits.is_empty() {
        head
    } else {
        format!("{}_{{{}}}", head, digits)
    }
}

fn latex_atom(e: &Expr, min_prec: u8, out: &mut String) {
    let p = prec(e);
    if p < min_prec {
        out.push_str("\\left(");
        latex_into(e, out);
        out.push_str("\\right)");
    } else {
        latex_into(e, out);
    }
}

fn latex_into(e: &Expr, out: &mut String) {
    match e.node() {
        ExprNode::Num(r) => {
            if r.is_integer() {
                out.push_str(&r.numer().to_string());
            } else {
                let neg = r.is_negative();
                if neg {
                    out.push('-');
                }
                out.push_str(&format!(
                    "\\tfrac{{{}}}{{{}}}",
                    r.numer().abs(),
                    r.denom()
                ));
            }
        }
        ExprNode::Sym(s) => match s.kind() {
            SymbolKind::Jet { base, wrt } => {
                out.push_str(&format!("{}_{{{}}}", latex_name(base), wrt.join("")));
            }
            _ => out.push_str(&latex_name(s.name())),
        },
        ExprNode::Add(ts) => {
            for (i, t) in ts.iter().enumerate() {
                let (c, key) = t.coeff_split();
                if i == 0 {
                    latex_atom(t, 2, out);
                } else if c.is_negative() {
                    out.push_str(" - ");
                    let pos = Expr::mul(vec![Expr::num(-c), key]);
                    latex_atom(&pos, 2, out);
                } else {
                    out.push_str(" + ");
                    latex_atom(t, 2, out);
                }
            }
        }
        ExprNode::Mul(fs) => {
            let mut first = true;
            for (i, f) in fs.iter().enumerate() {
                if i == 0 {
                    if let ExprNode::Num(r) = f.node() {
                        if (-r.clone()).is_one() {
                            out.push('-');
                            continue;
                        }
                    }
                }
                if !first {
                    out.push_str(" \\, ");
                }
                latex_atom(f, 3, out);
                first = false;
            }
            if first {
                out.push('1');
            }
        }
        ExprNode::Pow(b, x) => {
            latex_atom(b, 4, out);
            out.push_str("^{");
            latex_into(x, out);
            out.push('}');
        }
        ExprNode::Call(f, a) => {
            let name = match f {
                Func::Sin => "\\sin",
                Func::Cos => "\\cos",
                Func::Tan => "\\tan",
                Func::Arctan => "\\arctan",
                Func::Exp => "\\exp",
                Func::Ln => "\\ln",
                Func::Sqrt => "\\sqrt",
                Func::LambertW => "W",
            };
            if *f == Func::Sqrt {
                out.push_str("\\sqrt{");
                latex_into(a, out);
                out.push('}');
            } else {
                out.push_str(name);
                out.push_str("\\left(");
                latex_into(a, out);
                out.push_str("\\right)");
            }
        }
        ExprNode::Opaque(f) => {
            out.push_str(&latex_name(&f.name));
            if f.order() > 0 {
                out.push_str("_{,");
                for (arg, k) in f.args.iter().zip(&f.derivs) {
                    for _ in 0..*k {
                        out.push_str(arg.name());
                    }
                }
                out.push('}');
            }
        }
    }
}

pub fn render_latex(e: &Expr) -> String {
    let mut s = String::new();
    latex_into(e, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::symbol::Symbol;

    #[test]
    fn renders_signs_and_powers() {
        let h = Expr::sym(Symbol::dep("h", &["t", "x"]));
        let g = Expr::sym(Symbol::param("gamma"));
        let e = Expr::pow(h, Expr::add(vec![g, Expr::int(-1)]));
        assert_eq!(render(&e), "h^(gamma - 1)");
    }

    #[test]
    fn latex_greek_and_subscripts() {
        let g = Expr::sym(Symbol::param("gamma"));
        let h0 = Expr::sym(Symbol::param("H0"));
        let e = Expr::mul(vec![g, h0]);
        assert_eq!(render_latex(&e), "H_{0} \\, \\gamma");
    }
}
