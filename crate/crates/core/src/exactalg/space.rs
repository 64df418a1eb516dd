use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// How a variable may appear in an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    /// Arbitrary integer exponents.
    Laurent,
    /// Nonnegative exponents, no truncation.
    Polynomial,
    /// Nonnegative exponents; counted towards the truncation order.
    Series,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    /// Cohomological degree of the variable.
    pub degree: i32,
}

impl Variable {
    pub fn new(name: impl Into<String>, kind: VarKind, degree: i32) -> Self {
        Variable { name: name.into(), kind, degree }
    }
}

/// The ambient ring an element lives in: an ordered list of variables and,
/// when any variable is a series variable, the truncation order (maximal
/// total degree in the series variables that is kept).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    vars: Vec<Variable>,
    trunc: Option<u32>,
}

impl Space {
    pub fn new(vars: Vec<Variable>, trunc: Option<u32>) -> Result<Arc<Self>, AlgebraError> {
        let has_series = vars.iter().any(|v| v.kind == VarKind::Series);
        if has_series && trunc.is_none() {
            return Err(AlgebraError::MissingTruncation);
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(AlgebraError::DuplicateVariable(v.name.clone()));
            }
        }
        Ok(Arc::new(Space { vars, trunc: if has_series { trunc } else { None } }))
    }

    /// Laurent polynomial ring on the given names, all in degree 0.
    pub fn laurent(names: &[&str]) -> Arc<Self> {
        let vars = names.iter().map(|n| Variable::new(*n, VarKind::Laurent, 0)).collect();
        Space::new(vars, None).expect("valid laurent space")
    }

    /// Polynomial ring on degree-2 generators.
    pub fn polynomial(names: &[&str]) -> Arc<Self> {
        let vars = names.iter().map(|n| Variable::new(*n, VarKind::Polynomial, 2)).collect();
        Space::new(vars, None).expect("valid polynomial space")
    }

    /// Truncated power series ring on degree-2 generators.
    pub fn series(names: &[&str], order: u32) -> Arc<Self> {
        let vars = names.iter().map(|n| Variable::new(*n, VarKind::Series, 2)).collect();
        Space::new(vars, Some(order)).expect("valid series space")
    }

    /// Variables `prefix1, ..., prefixN`.
    pub fn indexed_names(prefix: &str, range: impl IntoIterator<Item = usize>) -> Vec<String> {
        range.into_iter().map(|i| format!("{prefix}{i}")).collect()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &Variable {
        &self.vars[i]
    }

    pub fn trunc(&self) -> Option<u32> {
        self.trunc
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn has_series(&self) -> bool {
        self.trunc.is_some()
    }

    pub fn is_series_var(&self, i: usize) -> bool {
        self.vars[i].kind == VarKind::Series
    }

    /// Total degree in the series variables.
    pub fn series_degree(&self, exp: &[i32]) -> i64 {
        exp.iter()
            .zip(&self.vars)
            .filter(|(_, v)| v.kind == VarKind::Series)
            .map(|(&e, _)| e as i64)
            .sum()
    }

    pub fn cohomological_degree(&self, exp: &[i32]) -> i64 {
        exp.iter().zip(&self.vars).map(|(&e, v)| e as i64 * v.degree as i64).sum()
    }

    /// Whether the exponent vector is admissible (sign constraints only).
    pub fn check_exponent(&self, exp: &[i32]) -> Result<(), AlgebraError> {
        if exp.len() != self.vars.len() {
            return Err(AlgebraError::ArityMismatch { expected: self.vars.len(), got: exp.len() });
        }
        for (&e, v) in exp.iter().zip(&self.vars) {
            if e < 0 && v.kind != VarKind::Laurent {
                return Err(AlgebraError::NegativeExponent(v.name.clone()));
            }
        }
        Ok(())
    }

    /// Whether a term with this exponent survives truncation.
    pub fn keeps(&self, exp: &[i32]) -> bool {
        match self.trunc {
            Some(d) => self.series_degree(exp) <= d as i64,
            None => true,
        }
    }

    /// Same variables with a different truncation order.
    pub fn with_trunc(&self, order: u32) -> Arc<Self> {
        Space::new(self.vars.clone(), Some(order)).expect("valid space")
    }

    /// Concatenation of two variable lists.
    pub fn join(&self, other: &Space) -> Result<Arc<Self>, AlgebraError> {
        let trunc = match (self.trunc, other.trunc) {
            (Some(a), Some(b)) if a != b => return Err(AlgebraError::TruncationMismatch(a, b)),
            (a, b) => a.or(b),
        };
        let mut vars = self.vars.clone();
        vars.extend(other.vars.iter().cloned());
        Space::new(vars, trunc)
    }
}
