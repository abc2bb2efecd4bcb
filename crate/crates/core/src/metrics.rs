//! Coherency, relevancy, and informativity, computed exactly.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::entailment::{consequence_for_relevancy, entails_bounded, EntailmentBound, EntailmentError};
use crate::model::{holds, Database};
use crate::syntax::Formula;
use crate::updates::Update;

/// An exact rational in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricValue(Ratio<u64>);

impl MetricValue {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0 && num <= den, "metric values lie in [0, 1]");
        MetricValue(Ratio::new(num, den))
    }

    pub fn zero() -> Self {
        MetricValue(Ratio::zero())
    }

    pub fn one() -> Self {
        MetricValue(Ratio::one())
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    /// Decimal rendering rounded half-up to `places` digits.
    pub fn decimal(&self, places: u32) -> String {
        let (n, d) = (self.numer() as u128, self.denom() as u128);
        let scale = 10u128.pow(places);
        let scaled = (n * scale * 2 + d) / (2 * d);
        let (int, frac) = (scaled / scale, scaled % scale);
        if places == 0 {
            int.to_string()
        } else {
            format!("{int}.{frac:0width$}", width = places as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl std::ops::Mul for MetricValue {
    type Output = MetricValue;
    fn mul(self, rhs: MetricValue) -> MetricValue {
        MetricValue(self.0 * rhs.0)
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MetricValue", 2)?;
        st.serialize_field("num", &self.numer())?;
        st.serialize_field("den", &self.denom())?;
        st.end()
    }
}

/// Premises `Γ` and conclusion `φ`; premises keep first-occurrence order
/// and are deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Deduction {
    premises: Vec<Formula>,
    conclusion: Formula,
}

impl Deduction {
    pub fn new(premises: impl IntoIterator<Item = Formula>, conclusion: Formula) -> Self {
        let mut unique: Vec<Formula> = Vec::new();
        for p in premises {
            if !unique.contains(&p) {
                unique.push(p);
            }
        }
        Deduction {
            premises: unique,
            conclusion,
        }
    }

    /// The self-deduction `{φ}{φ}`.
    pub fn of_proposition(f: Formula) -> Self {
        Deduction::new([f.clone()], f)
    }

    pub fn premises(&self) -> &[Formula] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Formula {
        &self.conclusion
    }

    /// `(ψ₁ & … & ψₙ) -> φ`, or `φ` itself when there are no premises.
    pub fn conditional(&self) -> Formula {
        match Formula::conjunction(self.premises.iter().cloned()) {
            Some(p) => Formula::implies(p, self.conclusion.clone()),
            None => self.conclusion.clone(),
        }
    }

    /// Whether the premises entail the conclusion up to the bound.
    pub fn is_valid_bounded(&self, bound: &EntailmentBound) -> Result<bool, EntailmentError> {
        Ok(entails_bounded(&self.premises, &self.conclusion, bound)?.is_entailed())
    }
}

impl fmt::Display for Deduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.premises.iter().map(ToString::to_string).collect();
        if ps.is_empty() {
            write!(f, "|- {}", self.conclusion)
        } else {
            write!(f, "{} |- {}", ps.join("; "), self.conclusion)
        }
    }
}

impl Serialize for Deduction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Deduction", 2)?;
        st.serialize_field("premises", &self.premises)?;
        st.serialize_field("conclusion", &self.conclusion)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coherency {
    pub value: MetricValue,
    /// First 1-based index whose structure satisfies the sentence; only
    /// set when the update is coherent with it.
    pub m_index: Option<usize>,
    pub coherent: bool,
}

/// `m / (1 + 2 + … + m)` for the first index `m` at which `f` holds, or 0
/// when the final structure falsifies `f`. A sentence whose symbols are not
/// yet interpreted at a step is false there.
pub fn coherency_detail(u: &Update, f: &Formula) -> Coherency {
    let truth: Vec<bool> = u.structures().iter().map(|s| holds(s, f)).collect();
    if !truth.last().copied().unwrap_or(false) {
        return Coherency {
            value: MetricValue::zero(),
            m_index: None,
            coherent: false,
        };
    }
    let m = truth.iter().position(|&t| t).expect("final step holds") + 1;
    let sum: u64 = (1..=m as u64).sum();
    Coherency {
        value: MetricValue::new(m as u64, sum),
        m_index: Some(m),
        coherent: true,
    }
}

pub fn coherency(u: &Update, f: &Formula) -> MetricValue {
    coherency_detail(u, f).value
}

/// Relevant premises, undefined when the update is incoherent with the
/// conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "premises", rename_all = "snake_case")]
pub enum RelevantPremises {
    Undefined,
    Defined(Vec<Formula>),
}

impl RelevantPremises {
    pub fn as_slice(&self) -> &[Formula] {
        match self {
            RelevantPremises::Undefined => &[],
            RelevantPremises::Defined(v) => v,
        }
    }
}

/// Premises true at the final structure that are not consequences of the
/// theory under the base-language gate.
pub fn relevant_premises(
    u: &Update,
    d: &Deduction,
    bound: &EntailmentBound,
) -> Result<RelevantPremises, EntailmentError> {
    let last = u.final_structure();
    if !holds(last, d.conclusion()) {
        return Ok(RelevantPremises::Undefined);
    }
    let mut out = Vec::new();
    for p in d.premises() {
        if holds(last, p) && !consequence_for_relevancy(u.theory(), u.base_signature(), p, bound)? {
            out.push(p.clone());
        }
    }
    Ok(RelevantPremises::Defined(out))
}

fn ratio_of(relevant: &RelevantPremises, total: usize) -> MetricValue {
    match relevant {
        RelevantPremises::Defined(v) if total > 0 => MetricValue::new(v.len() as u64, total as u64),
        _ => MetricValue::zero(),
    }
}

pub fn relevancy(u: &Update, d: &Deduction, bound: &EntailmentBound) -> Result<MetricValue, EntailmentError> {
    Ok(ratio_of(&relevant_premises(u, d, bound)?, d.premises().len()))
}

pub fn informativity_deduction(
    u: &Update,
    d: &Deduction,
    bound: &EntailmentBound,
) -> Result<MetricValue, EntailmentError> {
    Ok(relevancy(u, d, bound)? * coherency(u, d.conclusion()))
}

pub fn informativity_proposition(
    u: &Update,
    f: &Formula,
    bound: &EntailmentBound,
) -> Result<MetricValue, EntailmentError> {
    informativity_deduction(u, &Deduction::of_proposition(f.clone()), bound)
}

/// All metrics of one deduction under one update.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeductionMetrics {
    pub coherency: Coherency,
    pub relevant_premises: RelevantPremises,
    pub relevancy: MetricValue,
    pub informativity: MetricValue,
}

pub fn deduction_metrics(
    u: &Update,
    d: &Deduction,
    bound: &EntailmentBound,
) -> Result<DeductionMetrics, EntailmentError> {
    let coherency = coherency_detail(u, d.conclusion());
    let relevant = relevant_premises(u, d, bound)?;
    let relevancy = ratio_of(&relevant, d.premises().len());
    Ok(DeductionMetrics {
        informativity: relevancy * coherency.value,
        coherency,
        relevant_premises: relevant,
        relevancy,
    })
}

/// Not false in the base structure, and not a consequence of the theory.
/// A sentence outside the base language is never false there.
pub fn is_new(d: &Database, f: &Formula, bound: &EntailmentBound) -> Result<bool, EntailmentError> {
    let in_language = f.symbols().is_subset(d.signature());
    if in_language && !holds(d.structure(), f) {
        return Ok(false);
    }
    Ok(!consequence_for_relevancy(d.theory(), d.signature(), f, bound)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("results are only defined for deductions with nonzero relevancy")]
    ZeroRelevancy,
    #[error(transparent)]
    Entailment(#[from] EntailmentError),
}

/// Relevant premises, plus the conclusion when it is new.
pub fn produced_results(
    u: &Update,
    d: &Deduction,
    bound: &EntailmentBound,
) -> Result<Vec<Formula>, MetricsError> {
    let relevant = relevant_premises(u, d, bound)?;
    if ratio_of(&relevant, d.premises().len()).is_zero() {
        return Err(MetricsError::ZeroRelevancy);
    }
    let mut out = relevant.as_slice().to_vec();
    if is_new(&u.base_database(), d.conclusion(), bound)? && !out.contains(d.conclusion()) {
        out.push(d.conclusion().clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::{parse_sentence, Signature};
    use crate::updates::{build_update, build_update_with, TheoryCheck};

    fn sig() -> Signature {
        Signature::parse_decls("C/1 E/1 H/2 s/0 l/0 a/0 b/0").unwrap()
    }

    fn p(text: &str) -> Formula {
        parse_sentence(text, &sig()).unwrap()
    }

    fn k3() -> EntailmentBound {
        EntailmentBound::new(3)
    }

    #[test]
    fn metric_value_rendering() {
        let v = MetricValue::new(2, 3);
        assert_eq!(v.to_string(), "2/3");
        assert_eq!(v.decimal(4), "0.6667");
        assert_eq!(MetricValue::new(1, 6).decimal(2), "0.17");
        assert_eq!(MetricValue::one().decimal(3), "1.000");
        assert_eq!(MetricValue::new(5, 15), MetricValue::new(1, 3));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"num":2,"den":3}"#);
    }

    #[test]
    fn coherency_of_the_alias_update() {
        let d1 = fixtures::base_database();
        let u = build_update(&d1, &fixtures::alias_b_script()).unwrap();
        for f in ["E(b)", "H(l, b)", "E(b) & H(l, b)", "E(b) | H(l, b)"] {
            let c = coherency_detail(&u, &p(f));
            assert_eq!(c.value, MetricValue::new(2, 3), "{f}");
            assert_eq!(c.m_index, Some(2));
        }
        let t = Update::trivial(&d1);
        assert_eq!(coherency(&t, &p("C(s)")), MetricValue::one());
        assert_eq!(coherency(&t, &p("E(b)")), MetricValue::zero());
    }

    #[test]
    fn repointed_s_metrics() {
        let d1 = fixtures::base_database();
        let u = build_update_with(&d1, &fixtures::repoint_s_script(), TheoryCheck::Record).unwrap();
        assert_eq!(coherency(&u, &p("E(s)")), MetricValue::new(2, 3));
        assert_eq!(coherency(&u, &p("~H(s, a)")), MetricValue::new(2, 3));
        // s and a share a referent from the second structure on
        assert_eq!(coherency(&u, &p("s = a")), MetricValue::new(2, 3));
    }

    #[test]
    fn street_deduction_metrics() {
        let d1 = fixtures::base_database();
        let ded = Deduction::new([p("forall x. (C(x) -> ~E(x))"), p("C(b)")], p("~E(b)"));
        let alias = build_update(&d1, &fixtures::alias_b_script()).unwrap();
        assert_eq!(relevant_premises(&alias, &ded, &k3()).unwrap(), RelevantPremises::Undefined);

        let u = build_update_with(&d1, &fixtures::detach_b_script(), TheoryCheck::Record).unwrap();
        let m = deduction_metrics(&u, &ded, &k3()).unwrap();
        assert_eq!(m.relevant_premises, RelevantPremises::Defined(vec![p("forall x. (C(x) -> ~E(x))")]));
        assert_eq!(m.relevancy, MetricValue::new(1, 2));
        assert_eq!(m.coherency.m_index, Some(5));
        assert_eq!(m.informativity, MetricValue::new(1, 6));

        assert_eq!(informativity_proposition(&u, &p("C(b)"), &k3()).unwrap(), MetricValue::zero());
        assert_eq!(
            informativity_proposition(&u, &p("forall x. (C(x) -> ~E(x))"), &k3()).unwrap(),
            MetricValue::one()
        );
        assert_eq!(informativity_proposition(&u, &p("~E(b)"), &k3()).unwrap(), MetricValue::new(1, 3));

        let results = produced_results(&u, &ded, &k3()).unwrap();
        assert_eq!(results, vec![p("forall x. (C(x) -> ~E(x))"), p("~E(b)")]);
    }

    #[test]
    fn trivial_update_deduction() {
        let d1 = fixtures::base_database();
        let u = Update::trivial(&d1);
        let ded = Deduction::new([p("E(a)")], p("exists x. E(x)"));
        assert_eq!(relevant_premises(&u, &ded, &k3()).unwrap(), RelevantPremises::Defined(vec![p("E(a)")]));
        assert_eq!(relevancy(&u, &ded, &k3()).unwrap(), MetricValue::one());
        assert_eq!(informativity_deduction(&u, &ded, &k3()).unwrap(), MetricValue::one());
        assert_eq!(
            produced_results(&u, &ded, &k3()).unwrap(),
            vec![p("E(a)"), p("exists x. E(x)")]
        );
        let taut = Deduction::new([], p("E(a) -> exists x. E(x)"));
        assert_eq!(informativity_deduction(&u, &taut, &k3()).unwrap(), MetricValue::zero());
        assert_eq!(produced_results(&u, &taut, &k3()), Err(MetricsError::ZeroRelevancy));
    }

    #[test]
    fn newness() {
        let d1 = fixtures::base_database();
        assert!(!is_new(&d1, &p("C(s)"), &k3()).unwrap());
        assert!(is_new(&d1, &p("E(b)"), &k3()).unwrap());
        assert!(!is_new(&d1, &p("E(l)"), &k3()).unwrap());
        assert!(is_new(&d1, &p("exists x. E(x)"), &k3()).unwrap());
    }

    #[test]
    fn conclusion_in_theory_yields_premises_only() {
        let d1 = fixtures::base_database();
        let u = Update::trivial(&d1);
        let ded = Deduction::new([p("E(a)")], p("C(s)"));
        assert_eq!(produced_results(&u, &ded, &k3()).unwrap(), vec![p("E(a)")]);
    }

    #[test]
    fn deduction_display_and_conditional() {
        let ded = Deduction::new([p("E(a)"), p("E(a)")], p("exists x. E(x)"));
        assert_eq!(ded.premises().len(), 1);
        assert_eq!(ded.to_string(), "E(a) |- exists x. E(x)");
        assert_eq!(ded.conditional().to_string(), "E(a) -> (exists x. E(x))");
        assert!(ded.is_valid_bounded(&k3()).unwrap());
        assert_eq!(Deduction::new([], p("C(s)")).conditional(), p("C(s)"));
    }
}
