//! Linguistic variables, rule firing and weighted-average defuzzification.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dsl::is_valid_name;
use crate::membership::{Degree, MembershipFunction};
use crate::Error;

/// A named term of a linguistic variable.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Term {
    pub name: String,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub function: MembershipFunction,
}

impl Term {
    pub fn new(name: impl Into<String>, function: MembershipFunction) -> Self {
        Term { name: name.into(), function }
    }
}

/// A variable with a closed universe of discourse and named terms.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LinguisticVariable {
    name: String,
    universe: [f64; 2],
    terms: Vec<Term>,
}

impl LinguisticVariable {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, terms: Vec<Term>) -> Result<Self, Error> {
        let name = name.into();
        let fail = |reason: String| Error::InvalidVariable { name: name.clone(), reason };
        if !is_valid_name(&name) {
            return Err(fail("name is not a valid identifier".to_owned()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(fail(format!("universe [{lo}, {hi}] must be finite with lo < hi")));
        }
        if terms.is_empty() {
            return Err(fail("at least one term is required".to_owned()));
        }
        for (i, term) in terms.iter().enumerate() {
            if !is_valid_name(&term.name) {
                return Err(fail(format!("term `{}` is not a valid identifier", term.name)));
            }
            if terms[..i].iter().any(|t| t.name == term.name) {
                return Err(fail(format!("duplicate term `{}`", term.name)));
            }
            let f = &term.function;
            if f.x_min() < lo || f.x_max() > hi {
                return Err(fail(format!(
                    "term `{}` spans [{}, {}] outside the universe [{lo}, {hi}]",
                    term.name,
                    f.x_min(),
                    f.x_max()
                )));
            }
        }
        Ok(LinguisticVariable { name, universe: [lo, hi], terms })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `(lo, hi)` bounds of the universe.
    pub fn universe(&self) -> (f64, f64) {
        (self.universe[0], self.universe[1])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term(&self, name: &str) -> Option<&MembershipFunction> {
        self.terms.iter().find(|t| t.name == name).map(|t| &t.function)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.universe[0] && x <= self.universe[1]
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.universe[0], self.universe[1])
    }
}

/// Degrees of one variable's terms, keyed by term name.
pub type Fuzzified = BTreeMap<String, Degree>;

/// Degree of `x` in every term of `v`. Inputs outside the universe are clamped
/// to it first.
pub fn fuzzify(v: &LinguisticVariable, x: f64) -> Result<Fuzzified, Error> {
    if !x.is_finite() {
        return Err(Error::NonFiniteInput { value: x });
    }
    let x = v.clamp(x);
    v.terms
        .iter()
        .map(|t| Ok((t.name.clone(), t.function.evaluate(x)?)))
        .collect()
}

/// Fuzzy conjunction (minimum).
#[inline]
pub fn combine_and(a: Degree, b: Degree) -> Degree {
    if b.value() < a.value() {
        b
    } else {
        a
    }
}

/// Fuzzy disjunction (maximum).
#[inline]
pub fn combine_or(a: Degree, b: Degree) -> Degree {
    if b.value() > a.value() {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Connective {
    And,
    Or,
}

impl Connective {
    pub fn keyword(self) -> &'static str {
        match self {
            Connective::And => "AND",
            Connective::Or => "OR",
        }
    }

    pub fn combine(self, a: Degree, b: Degree) -> Degree {
        match self {
            Connective::And => combine_and(a, b),
            Connective::Or => combine_or(a, b),
        }
    }
}

/// `variable IS term`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Clause {
    pub variable: String,
    pub term: String,
}

impl Clause {
    pub fn new(variable: impl Into<String>, term: impl Into<String>) -> Self {
        Clause { variable: variable.into(), term: term.into() }
    }
}

/// `IF c1 conn c2 conn ... THEN consequent`, one connective kind per rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rule {
    /// `And` for single-clause rules, where it has no effect.
    pub connective: Connective,
    pub antecedent: Vec<Clause>,
    pub consequent: Clause,
}

/// One rule's contribution to an inference.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RuleFiring {
    pub rule_index: usize,
    /// Fire strength.
    pub alpha: Degree,
    /// Crisp value of the consequent at `alpha`, in output units.
    #[cfg_attr(feature = "serde", serde(rename = "z_i"))]
    pub consequent_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InferenceResult {
    pub crisp_output: f64,
    /// Every rule's firing, in rule order.
    pub firings: Vec<RuleFiring>,
    /// Input variables whose raw value was clamped into the universe.
    pub clamped: Vec<String>,
}

/// The input and output variables rules are written against.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
}

impl Schema {
    pub fn new(inputs: Vec<LinguisticVariable>, output: LinguisticVariable) -> Result<Self, Error> {
        for (i, v) in inputs.iter().enumerate() {
            if inputs[..i].iter().any(|w| w.name == v.name) || v.name == output.name {
                return Err(Error::InvalidVariable {
                    name: v.name.clone(),
                    reason: "duplicate variable name".to_owned(),
                });
            }
        }
        Ok(Schema { inputs, output })
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn input(&self, name: &str) -> Option<&LinguisticVariable> {
        self.inputs.iter().find(|v| v.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&LinguisticVariable> {
        self.input(name).or_else(|| (self.output.name == name).then_some(&self.output))
    }

    /// Structural check of a rule against this schema.
    pub fn check_rule(&self, index: usize, rule: &Rule) -> Result<(), Error> {
        if rule.antecedent.is_empty() {
            return Err(Error::InvalidRule { index, reason: "empty antecedent".to_owned() });
        }
        for clause in &rule.antecedent {
            let v = self.input(&clause.variable).ok_or_else(|| unresolved(clause))?;
            v.term(&clause.term).ok_or_else(|| unresolved(clause))?;
        }
        let c = &rule.consequent;
        if c.variable != self.output.name || self.output.term(&c.term).is_none() {
            return Err(unresolved(c));
        }
        Ok(())
    }
}

fn unresolved(c: &Clause) -> Error {
    Error::UnresolvedClause { variable: c.variable.clone(), term: c.term.clone() }
}

/// A validated fuzzy inference system: schema plus rule base.
#[derive(Debug, Clone, PartialEq)]
pub struct Fis {
    schema: Schema,
    rules: Vec<Rule>,
}

impl Fis {
    pub fn new(schema: Schema, rules: Vec<Rule>) -> Result<Self, Error> {
        if rules.is_empty() {
            return Err(Error::EmptyRuleSet);
        }
        for (i, r) in rules.iter().enumerate() {
            schema.check_rule(i, r)?;
        }
        Ok(Fis { schema, rules })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn infer(&self, inputs: &BTreeMap<String, f64>) -> Result<InferenceResult, Error> {
        infer(self, inputs)
    }
}

/// Fire one rule against already fuzzified inputs.
pub fn fire_rule(
    rule: &Rule,
    rule_index: usize,
    fuzzified: &BTreeMap<String, Fuzzified>,
    output: &LinguisticVariable,
) -> Result<RuleFiring, Error> {
    let degree = |c: &Clause| {
        fuzzified
            .get(&c.variable)
            .and_then(|terms| terms.get(&c.term))
            .copied()
            .ok_or_else(|| unresolved(c))
    };
    let (first, rest) = rule
        .antecedent
        .split_first()
        .ok_or_else(|| Error::InvalidRule { index: rule_index, reason: "empty antecedent".to_owned() })?;
    let mut alpha = degree(first)?;
    for clause in rest {
        alpha = rule.connective.combine(alpha, degree(clause)?);
    }
    let consequent = output.term(&rule.consequent.term).ok_or_else(|| unresolved(&rule.consequent))?;
    Ok(RuleFiring { rule_index, alpha, consequent_value: consequent.invert(alpha) })
}

/// Run the full Tsukamoto pipeline.
///
/// Fails with [`Error::NoRuleFired`] when every fire strength is zero.
pub fn infer(fis: &Fis, inputs: &BTreeMap<String, f64>) -> Result<InferenceResult, Error> {
    let schema = &fis.schema;
    let mut fuzzified = BTreeMap::new();
    let mut clamped = Vec::new();
    for v in &schema.inputs {
        let referenced = fis.rules.iter().any(|r| r.antecedent.iter().any(|c| c.variable == v.name));
        let Some(&x) = inputs.get(&v.name) else {
            if referenced {
                return Err(Error::MissingInput { variable: v.name.clone() });
            }
            continue;
        };
        let degrees = fuzzify(v, x)?;
        if !v.contains(x) {
            clamped.push(v.name.clone());
        }
        fuzzified.insert(v.name.clone(), degrees);
    }

    let firings = fis
        .rules
        .iter()
        .enumerate()
        .map(|(i, r)| fire_rule(r, i, &fuzzified, &schema.output))
        .collect::<Result<Vec<_>, _>>()?;

    let crisp_output = weighted_average(&firings).ok_or_else(|| Error::NoRuleFired {
        inputs: inputs.iter().map(|(k, v)| (k.clone(), *v)).collect(),
    })?;
    Ok(InferenceResult { crisp_output, firings, clamped })
}

/// `Σ αᵢ·zᵢ / Σ αᵢ`, or `None` when `Σ αᵢ = 0`.
///
/// Terms are summed in ascending `(α, z)` order so the result does not depend
/// on rule order.
pub fn weighted_average(firings: &[RuleFiring]) -> Option<f64> {
    let mut pairs: Vec<(f64, f64)> = firings
        .iter()
        .filter(|f| f.alpha.value() > 0.0)
        .map(|f| (f.alpha.value(), f.consequent_value))
        .collect();
    if pairs.is_empty() {
        return None;
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let (mut num, mut den) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(alpha, z) in &pairs {
        num += alpha * z;
        den += alpha;
        lo = lo.min(z);
        hi = hi.max(z);
    }
    // rounding can leave the quotient an ulp outside the hull
    Some((num / den).clamp(lo, hi))
}
