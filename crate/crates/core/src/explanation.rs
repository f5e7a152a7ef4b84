//! Explanations relative to an epistemic state `(K, Pr)`.
//!
//! `X = x` explains `phi` relative to `K` when
//!
//! * **EX1(a)**: in every setting of `K` where `X = x & phi` holds, some
//!   conjunct `X = x` together with a (possibly empty) conjunction `Y = y`
//!   of actual values is an actual cause of `phi`;
//! * **EX1(b)**: `[X <- x] phi` holds in every setting of `K`;
//! * **EX2**: no strict non-empty sub-conjunction satisfies EX1(a) and EX1(b);
//! * **EX3**: some setting of `K` satisfies `X = x & phi`.
//!
//! It is nontrivial when additionally **EX4** holds: some setting of `K`
//! satisfies `phi & !(X = x)`.
//!
//! The augmentation `Y` ranges over endogenous variables outside the
//! explanation and is searched by size, then by conjunct, then in
//! declaration order.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::causality::CauseTester;
use crate::error::{Error, Result};
use crate::logic::{self, BoolFormula, CausalFormula, CompiledFormula, Conjunction, PrimitiveEvent};
use crate::model::{Setting, Value};
use crate::subsets;

/// Exact probability.
pub type Probability = BigRational;

/// `p/q`, always with an explicit denominator.
pub fn format_probability(p: &Probability) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

/// A finite set of settings with a strictly positive probability on each,
/// summing to one.
#[derive(Debug, Clone)]
pub struct EpistemicState {
    settings: Vec<Setting>,
    probs: Vec<Probability>,
}

impl EpistemicState {
    pub fn new(entries: Vec<(Setting, Probability)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyState);
        }
        let mut total = Probability::zero();
        for (i, (s, p)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(t, _)| t.key() == s.key()) {
                return Err(Error::DuplicateSetting(s.label()));
            }
            if *p <= Probability::zero() {
                return Err(Error::NonPositiveProbability { setting: s.label(), probability: format_probability(p) });
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::ProbabilitySum(format_probability(&total)));
        }
        let (settings, probs) = entries.into_iter().unzip();
        Ok(EpistemicState { settings, probs })
    }

    pub fn uniform(settings: Vec<Setting>) -> Result<Self> {
        let n = BigInt::from(settings.len().max(1));
        let p = Probability::new(BigInt::one(), n);
        EpistemicState::new(settings.into_iter().map(|s| (s, p.clone())).collect())
    }

    pub fn settings(&self) -> &[Setting] {
        &self.settings
    }

    pub fn probability(&self, i: usize) -> &Probability {
        &self.probs[i]
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Setting, &Probability)> {
        self.settings.iter().zip(&self.probs)
    }

    fn mass(&self, members: impl IntoIterator<Item = usize>) -> Probability {
        members.into_iter().fold(Probability::zero(), |acc, i| acc + &self.probs[i])
    }
}

/// `[[psi]]_K`: the settings of `K` satisfying `psi`.
pub fn extension<'s>(state: &'s EpistemicState, formula: &CausalFormula) -> Result<Vec<&'s Setting>> {
    let mut out = Vec::new();
    for s in state.settings() {
        if logic::satisfies(s, formula)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// The conjunct and augmentation that made `X = x & Y = y` a cause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseEvidence {
    pub conjunct: PrimitiveEvent,
    pub augmentation: Vec<PrimitiveEvent>,
}

/// Outcome of the EX1(a) search in one setting where `X = x & phi` holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettingEvidence {
    /// Index into the state's settings.
    pub setting: usize,
    pub found: Option<CauseEvidence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ex1a {
    pub holds: bool,
    pub evidence: Vec<SettingEvidence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ex1b {
    pub holds: bool,
    /// Indices of settings where `[X <- x] phi` fails.
    pub failing: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplanationVerdict {
    pub ex1a: Ex1a,
    pub ex1b: Ex1b,
    pub ex2: bool,
    /// First strict sub-conjunction satisfying EX1(a) and EX1(b), when EX2 fails.
    pub ex2_violation: Option<Conjunction>,
    pub ex3: bool,
    pub ex4: bool,
    pub is_explanation: bool,
    pub is_nontrivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplanationScore {
    pub ex1a: Probability,
    pub ex1b: Probability,
    pub prior: Probability,
}

/// How the EX1(b) score is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ex1bMode {
    /// `Pr({s in K : s |= [X <- x] phi})`.
    #[default]
    Unconditional,
    /// The same event, conditioned on `[[phi]]_K`.
    ConditionalOnPhi,
}

/// Per-state evaluation context shared by the EX checks, with the phi
/// compilation and cause tests cached per setting.
struct Explainer<'a> {
    state: &'a EpistemicState,
    phi: BoolFormula,
    compiled: Vec<CompiledFormula>,
    testers: Vec<CauseTester<'a>>,
    ex1_cache: RefCell<HashMap<Conjunction, (bool, bool)>>,
}

impl<'a> Explainer<'a> {
    fn new(state: &'a EpistemicState, phi: &BoolFormula) -> Result<Self> {
        let compiled = state.settings().iter().map(|s| phi.compile(s.signature())).collect::<Result<_>>()?;
        let testers = state.settings().iter().map(|s| CauseTester::new(s, phi)).collect::<Result<_>>()?;
        Ok(Explainer { state, phi: phi.clone(), compiled, testers, ex1_cache: RefCell::new(HashMap::new()) })
    }

    fn phi_holds(&self, i: usize) -> bool {
        self.testers[i].phi_holds()
    }

    /// Checks the explanation against every model and returns its
    /// endogenous indices per setting.
    fn resolve(&self, expl: &Conjunction) -> Result<Vec<Vec<usize>>> {
        if expl.is_empty() {
            return Err(Error::EmptyConjunction);
        }
        self.state.settings().iter().map(|s| expl.endo_indices(s.signature())).collect()
    }

    fn conj_holds(&self, i: usize, vars: &[usize], expl: &Conjunction) -> bool {
        let s = &self.state.settings()[i];
        let off = s.signature().endo_offset();
        vars.iter().zip(expl.events()).all(|(&v, e)| s.actual_values()[off + v] == e.value)
    }

    fn ex1a_at(&self, i: usize, vars: &[usize], expl: &Conjunction) -> Option<CauseEvidence> {
        let s = &self.state.settings()[i];
        let tester = &self.testers[i];
        let n_endo = s.signature().endogenous().len();
        let others: Vec<usize> = (0..n_endo).filter(|v| !vars.contains(v)).collect();
        for k in 0..=others.len() {
            for (j, &x) in vars.iter().enumerate() {
                for ys in subsets::by_size(&others, k).filter(|ys| ys.len() == k) {
                    let mut cause: Vec<usize> = ys.clone();
                    cause.push(x);
                    cause.sort_unstable();
                    if tester.is_cause(&cause) {
                        return Some(CauseEvidence {
                            conjunct: expl.events()[j].clone(),
                            augmentation: tester.conjunction(&ys).events().to_vec(),
                        });
                    }
                }
            }
        }
        None
    }

    fn ex1a(&self, expl: &Conjunction, vars: &[Vec<usize>]) -> Ex1a {
        let evidence: Vec<SettingEvidence> = (0..self.state.len())
            .filter(|&i| self.phi_holds(i) && self.conj_holds(i, &vars[i], expl))
            .map(|i| SettingEvidence { setting: i, found: self.ex1a_at(i, &vars[i], expl) })
            .collect();
        Ex1a { holds: evidence.iter().all(|e| e.found.is_some()), evidence }
    }

    fn ex1b_ok(&self, i: usize, vars: &[usize], expl: &Conjunction) -> bool {
        let s = &self.state.settings()[i];
        let mut ov = vec![None; s.signature().endogenous().len()];
        for (&v, e) in vars.iter().zip(expl.events()) {
            ov[v] = Some(e.value.clone());
        }
        self.compiled[i].eval(&s.solve_with(&ov))
    }

    fn ex1b(&self, expl: &Conjunction, vars: &[Vec<usize>]) -> Ex1b {
        let failing: Vec<usize> = (0..self.state.len()).filter(|&i| !self.ex1b_ok(i, &vars[i], expl)).collect();
        Ex1b { holds: failing.is_empty(), failing }
    }

    /// Memoised `(EX1(a), EX1(b))` for a resolved conjunction.
    fn ex1(&self, expl: &Conjunction, vars: &[Vec<usize>]) -> (bool, bool) {
        if let Some(&r) = self.ex1_cache.borrow().get(expl) {
            return r;
        }
        // EX1(b) is the cheaper test; EX1(a) only matters when both are wanted,
        // but callers read both, so compute both.
        let r = (self.ex1a(expl, vars).holds, self.ex1b(expl, vars).holds);
        self.ex1_cache.borrow_mut().insert(expl.clone(), r);
        r
    }

    fn verdict(&self, expl: &Conjunction) -> Result<ExplanationVerdict> {
        let vars = self.resolve(expl)?;
        let ex1a = self.ex1a(expl, &vars);
        let ex1b = self.ex1b(expl, &vars);
        self.ex1_cache.borrow_mut().insert(expl.clone(), (ex1a.holds, ex1b.holds));

        let positions: Vec<usize> = (0..expl.len()).collect();
        let ex2_violation = subsets::by_size(&positions, expl.len() - 1)
            .filter(|p| !p.is_empty())
            .find(|p| {
                let sub = expl.restrict(p);
                let sub_vars: Vec<Vec<usize>> = vars.iter().map(|vs| p.iter().map(|&k| vs[k]).collect()).collect();
                self.ex1(&sub, &sub_vars) == (true, true)
            })
            .map(|p| expl.restrict(&p));
        let ex2 = ex2_violation.is_none();

        let ex3 = (0..self.state.len()).any(|i| self.phi_holds(i) && self.conj_holds(i, &vars[i], expl));
        let ex4 = (0..self.state.len()).any(|i| self.phi_holds(i) && !self.conj_holds(i, &vars[i], expl));
        let is_explanation = ex1a.holds && ex1b.holds && ex2 && ex3;
        Ok(ExplanationVerdict { ex1a, ex1b, ex2, ex2_violation, ex3, ex4, is_explanation, is_nontrivial: is_explanation && ex4 })
    }

    fn conditional(&self, event: &[usize], given: &[usize], what: impl FnOnce() -> String) -> Result<Probability> {
        let denom = self.state.mass(given.iter().copied());
        if denom.is_zero() {
            return Err(Error::ZeroProbability(what()));
        }
        Ok(self.state.mass(event.iter().copied()) / denom)
    }

    fn phi_extension(&self) -> Vec<usize> {
        (0..self.state.len()).filter(|&i| self.phi_holds(i)).collect()
    }

    fn ex1a_score(&self, expl: &Conjunction) -> Result<Probability> {
        let vars = self.resolve(expl)?;
        let ex1a = self.ex1a(expl, &vars);
        let given: Vec<usize> = ex1a.evidence.iter().map(|e| e.setting).collect();
        let ok: Vec<usize> = ex1a.evidence.iter().filter(|e| e.found.is_some()).map(|e| e.setting).collect();
        self.conditional(&ok, &given, || format!("{expl} & {}", self.phi))
    }

    fn ex1b_score(&self, expl: &Conjunction, mode: Ex1bMode) -> Result<Probability> {
        let vars = self.resolve(expl)?;
        let ok: Vec<usize> = (0..self.state.len()).filter(|&i| self.ex1b_ok(i, &vars[i], expl)).collect();
        match mode {
            Ex1bMode::Unconditional => Ok(self.state.mass(ok)),
            Ex1bMode::ConditionalOnPhi => {
                let given = self.phi_extension();
                let both: Vec<usize> = ok.into_iter().filter(|i| given.contains(i)).collect();
                self.conditional(&both, &given, || self.phi.to_string())
            }
        }
    }

    fn prior_score(&self, expl: &Conjunction) -> Result<Probability> {
        let vars = self.resolve(expl)?;
        let given = self.phi_extension();
        let both: Vec<usize> = given.iter().copied().filter(|&i| self.conj_holds(i, &vars[i], expl)).collect();
        self.conditional(&both, &given, || self.phi.to_string())
    }
}

pub fn check_ex1a(state: &EpistemicState, expl: &Conjunction, phi: &BoolFormula) -> Result<Ex1a> {
    let e = Explainer::new(state, phi)?;
    let vars = e.resolve(expl)?;
    Ok(e.ex1a(expl, &vars))
}

pub fn check_ex1b(state: &EpistemicState, expl: &Conjunction, phi: &BoolFormula) -> Result<Ex1b> {
    let e = Explainer::new(state, phi)?;
    let vars = e.resolve(expl)?;
    Ok(e.ex1b(expl, &vars))
}

pub fn is_explanation(state: &EpistemicState, expl: &Conjunction, phi: &BoolFormula) -> Result<ExplanationVerdict> {
    Explainer::new(state, phi)?.verdict(expl)
}

/// Every conjunction of at most `max_size` endogenous events satisfying
/// EX1 to EX3, ordered by size, then by variable declaration order, then by
/// range order. Candidate variables are the endogenous variables shared by
/// every model in the state, in the first model's order.
pub fn find_explanations(
    state: &EpistemicState,
    phi: &BoolFormula,
    max_size: Option<usize>,
) -> Result<Vec<(Conjunction, ExplanationVerdict)>> {
    let e = Explainer::new(state, phi)?;
    let first = state.settings()[0].signature();
    let shared: Vec<(String, Vec<Value>)> = first
        .endogenous()
        .iter()
        .filter_map(|d| {
            let values: Vec<Value> = d
                .range
                .values()
                .iter()
                .filter(|v| state.settings().iter().all(|s| s.signature().check_endogenous(&d.name, v).is_ok()))
                .cloned()
                .collect();
            (!values.is_empty()).then(|| (d.name.clone(), values))
        })
        .collect();
    let phi_ext = e.phi_extension();
    let positions: Vec<usize> = (0..shared.len()).collect();
    let mut out = Vec::new();
    for vars in subsets::by_size(&positions, max_size.unwrap_or(shared.len())).filter(|v| !v.is_empty()) {
        let ranges = vars.iter().map(|&p| shared[p].1.as_slice()).collect();
        for values in subsets::joint_values(ranges) {
            let events = vars.iter().zip(values).map(|(&p, v)| PrimitiveEvent::new(shared[p].0.clone(), v)).collect();
            let expl = Conjunction::new(events)?;
            let resolved = e.resolve(&expl)?;
            // EX3 first: it is cheap and prunes most candidates.
            if !phi_ext.iter().any(|&i| e.conj_holds(i, &resolved[i], &expl)) {
                continue;
            }
            if !e.ex1b(&expl, &resolved).holds {
                e.ex1_cache.borrow_mut().insert(expl.clone(), (false, false));
                continue;
            }
            let verdict = e.verdict(&expl)?;
            if verdict.is_explanation {
                out.push((expl, verdict));
            }
        }
    }
    Ok(out)
}

/// `Pr(EX1(a) succeeds | X = x & phi)`.
pub fn ex1a_score(state: &EpistemicState, expl: &Conjunction, phi: &BoolFormula) -> Result<Probability> {
    Explainer::new(state, phi)?.ex1a_score(expl)
}

/// Probability of the settings where `[X <- x] phi` holds.
pub fn ex1b_score(state: &EpistemicState, expl: &Conjunction, phi: &BoolFormula, mode: Ex1bMode) -> Result<Probability> {
    Explainer::new(state, phi)?.ex1b_score(expl, mode)
}

/// `Pr([[X = x]] | [[phi]])`.
pub fn prior_score(state: &EpistemicState, expl: &Conjunction, phi: &BoolFormula) -> Result<Probability> {
    Explainer::new(state, phi)?.prior_score(expl)
}

pub fn score(state: &EpistemicState, expl: &Conjunction, phi: &BoolFormula, mode: Ex1bMode) -> Result<ExplanationScore> {
    let e = Explainer::new(state, phi)?;
    Ok(ExplanationScore { ex1a: e.ex1a_score(expl)?, ex1b: e.ex1b_score(expl, mode)?, prior: e.prior_score(expl)? })
}

/// Scores of two explanations along one criterion. `order` is `Greater`
/// when the left one is better.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionComparison {
    pub left: Probability,
    pub right: Probability,
    pub order: Ordering,
}

impl CriterionComparison {
    fn new(left: Probability, right: Probability) -> Self {
        let order = left.cmp(&right);
        CriterionComparison { left, right, order }
    }
}

/// Pairwise comparison per criterion; there is deliberately no aggregate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub prior: CriterionComparison,
    pub ex1a: CriterionComparison,
    pub ex1b: CriterionComparison,
}

pub fn compare_explanations(
    state: &EpistemicState,
    left: &Conjunction,
    right: &Conjunction,
    phi: &BoolFormula,
    mode: Ex1bMode,
) -> Result<Comparison> {
    let e = Explainer::new(state, phi)?;
    Ok(Comparison {
        prior: CriterionComparison::new(e.prior_score(left)?, e.prior_score(right)?),
        ex1a: CriterionComparison::new(e.ex1a_score(left)?, e.ex1a_score(right)?),
        ex1b: CriterionComparison::new(e.ex1b_score(left, mode)?, e.ex1b_score(right, mode)?),
    })
}
