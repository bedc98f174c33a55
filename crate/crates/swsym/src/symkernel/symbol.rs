//! Symbols: named atoms of the expression language.
//!
//! A symbol is an independent variable, a dependent variable (with a declared
//! argument list), a jet coordinate (a dependent variable tagged with a
//! multi-index of differentiations), or a parameter. Jet coordinates are
//! treated as mutually independent coordinates by the differentiation rules;
//! the multi-index is kept sorted so `v_tx` and `v_xt` are the same symbol.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    /// An independent variable such as `t` or `x`.
    Independent,
    /// A dependent variable together with the names of the independent
    /// variables it depends on (reduced functions may depend on a subset).
    Dependent { args: Vec<String> },
    /// A jet coordinate: `base` differentiated by the (sorted) multi-index `wrt`.
    Jet { base: String, wrt: Vec<String> },
    /// A constant of the model (γ, c, α, β, integration constants, ...).
    Parameter,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: String,
    kind: SymbolKind,
}

impl Symbol {
    pub fn indep(name: &str) -> Self {
        Symbol {
            name: name.to_string(),
            kind: SymbolKind::Independent,
        }
    }

    pub fn dep(name: &str, args: &[&str]) -> Self {
        Symbol {
            name: name.to_string(),
            kind: SymbolKind::Dependent {
                args: args.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    pub fn param(name: &str) -> Self {
        Symbol {
            name: name.to_string(),
            kind: SymbolKind::Parameter,
        }
    }

    /// Jet coordinate of a dependent variable. The multi-index is sorted on
    /// construction; an empty index yields the dependent variable itself.
    pub fn jet(base: &Symbol, wrt: &[&str]) -> Self {
        let (base_name, mut idx, args) = match &base.kind {
            SymbolKind::Dependent { args } => (base.name.clone(), Vec::new(), args.clone()),
            SymbolKind::Jet { base, wrt } => (base.clone(), wrt.clone(), Vec::new()),
            _ => panic!("jet base must be a dependent variable or jet: {}", base.name),
        };
        let _ = args;
        idx.extend(wrt.iter().map(|s| s.to_string()));
        idx.sort();
        if idx.is_empty() {
            return base.clone();
        }
        let name = format!("{}_{}", base_name, idx.join(""));
        Symbol {
            name,
            kind: SymbolKind::Jet {
                base: base_name,
                wrt: idx,
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn is_independent(&self) -> bool {
        matches!(self.kind, SymbolKind::Independent)
    }

    pub fn is_dependent(&self) -> bool {
        matches!(self.kind, SymbolKind::Dependent { .. })
    }

    pub fn is_parameter(&self) -> bool {
        matches!(self.kind, SymbolKind::Parameter)
    }

    pub fn is_jet(&self) -> bool {
        matches!(self.kind, SymbolKind::Jet { .. })
    }

    /// Base dependent name for jets, own name otherwise.
    pub fn base_name(&self) -> &str {
        match &self.kind {
            SymbolKind::Jet { base, .. } => base,
            _ => &self.name,
        }
    }

    /// Jet order (0 for non-jets).
    pub fn jet_order(&self) -> usize {
        match &self.kind {
            SymbolKind::Jet { wrt, .. } => wrt.len(),
            _ => 0,
        }
    }

    pub fn jet_index(&self) -> &[String] {
        match &self.kind {
            SymbolKind::Jet { wrt, .. } => wrt,
            _ => &[],
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_multi_index_is_sorted() {
        let v = Symbol::dep("v", &["t", "x"]);
        let a = Symbol::jet(&v, &["x", "t"]);
        let b = Symbol::jet(&Symbol::jet(&v, &["t"]), &["x"]);
        assert_eq!(a, b);
        assert_eq!(a.name(), "v_tx");
        assert_eq!(a.jet_order(), 2);
    }

    #[test]
    fn jet_of_jet_accumulates() {
        let v = Symbol::dep("v", &["t", "x"]);
        let vt = Symbol::jet(&v, &["t"]);
        let vtt = Symbol::jet(&vt, &["t"]);
        assert_eq!(vtt.name(), "v_tt");
        assert_eq!(vtt.base_name(), "v");
    }
}
