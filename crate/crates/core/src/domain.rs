//! Linear parameter constraints, parameter domains and valuations.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Comparison operator shared by parameter constraints and GMEC atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn holds<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    /// The relation obtained by multiplying both sides by -1.
    pub fn flipped(self) -> Relation {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
            Relation::Gt => Relation::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub const ALL: [Relation; 5] = [
        Relation::Lt,
        Relation::Le,
        Relation::Eq,
        Relation::Ge,
        Relation::Gt,
    ];
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Assignment of a natural number to every parameter.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(BTreeMap<String, u32>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, param: &str) -> Option<u32> {
        self.0.get(param).copied()
    }

    pub fn set(&mut self, param: impl Into<String>, value: u32) {
        self.0.insert(param.into(), value);
    }

    pub fn with(mut self, param: impl Into<String>, value: u32) -> Self {
        self.set(param, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn require(&self, param: &str) -> Result<u32> {
        self.get(param)
            .ok_or_else(|| Error::MissingParameter(param.to_string()))
    }
}

impl<K: Into<String>> FromIterator<(K, u32)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (K, u32)>>(iter: I) -> Self {
        Valuation(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// `Σ a_i·λ_i ∼ b` over named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<S> {
    pub terms: Vec<(String, S)>,
    pub relation: Relation,
    pub bound: S,
}

impl<S: Scalar> LinearConstraint<S> {
    pub fn new(terms: Vec<(String, S)>, relation: Relation, bound: S) -> Self {
        LinearConstraint {
            terms,
            relation,
            bound,
        }
    }

    /// `coef·param ∼ bound` with a one-term left-hand side.
    pub fn single(param: impl Into<String>, relation: Relation, bound: S) -> Self {
        Self::new(vec![(param.into(), S::one())], relation, bound)
    }

    /// `Σ param ∼ bound` with unit coefficients.
    pub fn sum<I, P>(params: I, relation: Relation, bound: S) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<String>,
    {
        Self::new(
            params.into_iter().map(|p| (p.into(), S::one())).collect(),
            relation,
            bound,
        )
    }

    pub fn parameters(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(p, _)| p.as_str())
    }

    /// Evaluates the left-hand side at `v`.
    pub fn lhs(&self, v: &Valuation) -> Result<S> {
        let mut acc = S::zero();
        for (param, coef) in &self.terms {
            let x = v.require(param)?;
            acc = acc + coef.clone() * S::from_natural(x);
        }
        Ok(acc)
    }
}

impl<S: Scalar> fmt::Display for LinearConstraint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (param, coef)) in self.terms.iter().enumerate() {
            let negative = coef.is_negative();
            let magnitude = coef.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if magnitude.is_one() {
                write!(f, "{param}")?;
            } else {
                write!(f, "{magnitude}*{param}")?;
            }
        }
        write!(f, " {} {}", self.relation, self.bound)
    }
}

/// Checks `Σ a_i·v(λ_i) ∼ b`.
pub fn eval_constraint<S: Scalar>(c: &LinearConstraint<S>, v: &Valuation) -> Result<bool> {
    let lhs = c.lhs(v)?;
    Ok(c.relation.holds(&lhs, &c.bound))
}

/// Conjunction of linear constraints; its natural points form the domain of
/// admissible valuations. An empty domain list accepts every valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamDomain<S> {
    pub constraints: Vec<LinearConstraint<S>>,
}

impl<S> Default for ParamDomain<S> {
    fn default() -> Self {
        ParamDomain {
            constraints: Vec::new(),
        }
    }
}

impl<S: Scalar> ParamDomain<S> {
    pub fn new(constraints: Vec<LinearConstraint<S>>) -> Self {
        ParamDomain { constraints }
    }

    pub fn push(&mut self, c: LinearConstraint<S>) {
        self.constraints.push(c);
    }

    pub fn contains(&self, v: &Valuation) -> Result<bool> {
        domain_contains(self, v)
    }
}

pub fn domain_contains<S: Scalar>(d: &ParamDomain<S>, v: &Valuation) -> Result<bool> {
    for c in &d.constraints {
        if !eval_constraint(c, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}
