//! Declared variable spaces for jet computations.

use thiserror::Error;

use crate::symkernel::{Symbol, SymbolKind};

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("duplicate variable name `{0}`")]
    Duplicate(String),
    #[error("`{0}` is not a variable of this space")]
    NotAVariable(String),
    #[error("jet order {got} exceeds the declared maximum {max}")]
    OrderOverflow { got: usize, max: usize },
}

/// Independent and dependent variables plus a maximum jet order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSpace {
    name: String,
    independents: Vec<Symbol>,
    dependents: Vec<Symbol>,
    max_order: usize,
}

impl VariableSpace {
    pub fn new(
        name: &str,
        independents: Vec<Symbol>,
        dependents: Vec<Symbol>,
        max_order: usize,
    ) -> Result<VariableSpace, SpaceError> {
        let mut seen = std::collections::BTreeSet::new();
        for s in independents.iter().chain(dependents.iter()) {
            if !seen.insert(s.name().to_string()) {
                return Err(SpaceError::Duplicate(s.name().to_string()));
            }
        }
        Ok(VariableSpace {
            name: name.to_string(),
            independents,
            dependents,
            max_order,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn independents(&self) -> &[Symbol] {
        &self.independents
    }

    pub fn dependents(&self) -> &[Symbol] {
        &self.dependents
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Independent + dependent variables, the coordinates a point-symmetry
    /// generator may carry coefficients on.
    pub fn base_vars(&self) -> Vec<Symbol> {
        let mut v = self.independents.clone();
        v.extend(self.dependents.iter().cloned());
        v
    }

    pub fn dependent(&self, name: &str) -> Option<&Symbol> {
        self.dependents.iter().find(|s| s.name() == name)
    }

    pub fn independent(&self, name: &str) -> Option<&Symbol> {
        self.independents.iter().find(|s| s.name() == name)
    }

    /// Does the dependent variable (by name) depend on the independent `y`?
    pub fn depends_on(&self, dep_name: &str, y: &Symbol) -> bool {
        match self.dependent(dep_name).map(|s| s.kind()) {
            Some(SymbolKind::Dependent { args }) => args.iter().any(|a| a == y.name()),
            _ => false,
        }
    }

    /// All jet coordinates of order 1..=order (sorted multi-indices).
    pub fn jets_up_to(&self, order: usize) -> Vec<Symbol> {
        let mut out = Vec::new();
        for dep in &self.dependents {
            let args: Vec<String> = match dep.kind() {
                SymbolKind::Dependent { args } => args.clone(),
                _ => continue,
            };
            let mut level: Vec<Symbol> = vec![dep.clone()];
            for _ in 0..order {
                let mut next = Vec::new();
                for j in &level {
                    for a in &args {
                        let cand = Symbol::jet(j, &[a.as_str()]);
                        if !next.contains(&cand) {
                            next.push(cand);
                        }
                    }
                }
                for j in &next {
                    if !out.contains(j) {
                        out.push(j.clone());
                    }
                }
                level = next;
            }
        }
        out
    }

    /// All coordinates of the jet space to the given order.
    pub fn coordinates(&self, order: usize) -> Vec<Symbol> {
        let mut v = self.base_vars();
        v.extend(self.jets_up_to(order));
        v
    }

    pub fn contains_base(&self, s: &Symbol) -> bool {
        self.independents.contains(s) || self.dependents.contains(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jets_enumerate_sorted_indices() {
        let sp = VariableSpace::new(
            "I",
            vec![Symbol::indep("t"), Symbol::indep("x")],
            vec![Symbol::dep("v", &["t", "x"])],
            2,
        )
        .unwrap();
        let jets = sp.jets_up_to(2);
        let names: Vec<&str> = jets.iter().map(|s| s.name()).collect();
        assert_eq!(names, vec!["v_t", "v_x", "v_tt", "v_tx", "v_xx"]);
    }

    #[test]
    fn reduced_function_dependencies() {
        let sp = VariableSpace::new(
            "R",
            vec![Symbol::indep("t"), Symbol::indep("x")],
            vec![Symbol::dep("H", &["t"])],
            2,
        )
        .unwrap();
        assert!(sp.depends_on("H", &Symbol::indep("t")));
        assert!(!sp.depends_on("H", &Symbol::indep("x")));
    }
}
