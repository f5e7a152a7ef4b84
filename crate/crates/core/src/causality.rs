//! Actual causation under the modified counterfactual definition.
//!
//! `X = x` is an actual cause of `phi` in `(M, u)` when
//!
//! * **AC1**: both `X = x` and `phi` hold in `(M, u)`;
//! * **AC2**: for some set `W` of endogenous variables and some setting `x'`
//!   of `X`, `(M, u) |= [X <- x', W <- w] !phi` where `w` are the actual
//!   values of `W`;
//! * **AC3**: no strict non-empty subset of `X` satisfies AC1 and AC2.
//!
//! Witness sets are searched by ascending size, then in declaration order of
//! the variables; contrasts in range order. The first witness found is the
//! one reported, so results are deterministic.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::logic::{BoolFormula, CompiledFormula, Conjunction, PrimitiveEvent};
use crate::model::{Setting, Value};
use crate::subsets;

/// `X = x`, optionally "rather than `X = x'`".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CandidateCause {
    pub conjunction: Conjunction,
    pub contrast: Option<Vec<Value>>,
}

impl CandidateCause {
    pub fn new(conjunction: Conjunction, contrast: Option<Vec<Value>>) -> Result<Self> {
        if conjunction.is_empty() {
            return Err(Error::EmptyConjunction);
        }
        if let Some(c) = &contrast {
            if c.len() != conjunction.len() {
                return Err(Error::ContrastArity { expected: conjunction.len(), found: c.len() });
            }
        }
        Ok(CandidateCause { conjunction, contrast })
    }

    /// Contrast-free candidate.
    pub fn of(conjunction: Conjunction) -> Result<Self> {
        CandidateCause::new(conjunction, None)
    }
}

/// The `W = w` held fixed and the `x'` used to satisfy AC2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Witness {
    pub fixed: Vec<PrimitiveEvent>,
    pub contrast: Vec<PrimitiveEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseVerdict {
    pub ac1: bool,
    pub ac2: Option<Witness>,
    pub ac3: bool,
    /// First strict sub-conjunction satisfying AC1 and AC2, when AC3 fails.
    pub ac3_violation: Option<Conjunction>,
    pub is_cause: bool,
    pub is_but_for: bool,
}

struct Checked {
    phi: CompiledFormula,
    vars: Vec<usize>,
    values: Vec<Value>,
    contrast: Option<Vec<Value>>,
}

fn prepare(setting: &Setting, cand: &CandidateCause, phi: &BoolFormula) -> Result<Checked> {
    let sig = setting.signature();
    let phi = phi.compile(sig)?;
    let vars = cand.conjunction.endo_indices(sig)?;
    let values: Vec<Value> = cand.conjunction.events().iter().map(|e| e.value.clone()).collect();
    if let Some(c) = &cand.contrast {
        for (&i, v) in vars.iter().zip(c) {
            sig.check_endogenous(&sig.endogenous()[i].name, v)?;
        }
    }
    Ok(Checked { phi, vars, values, contrast: cand.contrast.clone() })
}

fn ac1(setting: &Setting, phi: &CompiledFormula, vars: &[usize], values: &[Value]) -> bool {
    let actual = setting.actual_values();
    let off = setting.signature().endo_offset();
    phi.eval(actual) && vars.iter().zip(values).all(|(&i, v)| &actual[off + i] == v)
}

/// Returns the first `(W, x')` making `!phi` hold, if any.
/// Without a contrast, every joint value other than the candidate's own is tried.
fn ac2(
    setting: &Setting,
    phi: &CompiledFormula,
    vars: &[usize],
    values: &[Value],
    contrast: Option<&[Value]>,
) -> Option<(Vec<usize>, Vec<Value>)> {
    let sig = setting.signature();
    let off = sig.endo_offset();
    let actual = setting.actual_values();
    let n_endo = sig.endogenous().len();
    let others: Vec<usize> = (0..n_endo).filter(|i| !vars.contains(i)).collect();
    let contrasts: Vec<Vec<Value>> = match contrast {
        Some(c) => vec![c.to_vec()],
        None => {
            let ranges = vars.iter().map(|&i| sig.endogenous()[i].range.values()).collect();
            subsets::joint_values(ranges).filter(|xp| xp.as_slice() != values).collect()
        }
    };
    for w in subsets::by_size(&others, others.len()) {
        for xp in &contrasts {
            let mut ov: Vec<Option<Value>> = vec![None; n_endo];
            for (&i, v) in vars.iter().zip(xp) {
                ov[i] = Some(v.clone());
            }
            for &i in &w {
                ov[i] = Some(actual[off + i].clone());
            }
            if !phi.eval(&setting.solve_with(&ov)) {
                return Some((w, xp.clone()));
            }
        }
    }
    None
}

fn witness(setting: &Setting, vars: &[usize], w: &[usize], xp: &[Value]) -> Witness {
    let sig = setting.signature();
    let off = sig.endo_offset();
    let name = |i: usize| sig.endogenous()[i].name.clone();
    Witness {
        fixed: w.iter().map(|&i| PrimitiveEvent::new(name(i), setting.actual_values()[off + i].clone())).collect(),
        contrast: vars.iter().zip(xp).map(|(&i, v)| PrimitiveEvent::new(name(i), v.clone())).collect(),
    }
}

/// AC1: `X = x` and `phi` both hold in the setting.
pub fn check_ac1(setting: &Setting, cand: &CandidateCause, phi: &BoolFormula) -> Result<bool> {
    let c = prepare(setting, cand, phi)?;
    Ok(ac1(setting, &c.phi, &c.vars, &c.values))
}

/// AC2: searches witness sets and contrasts; only the candidate's contrast is
/// tried when it has one.
pub fn check_ac2(setting: &Setting, cand: &CandidateCause, phi: &BoolFormula) -> Result<Option<Witness>> {
    let c = prepare(setting, cand, phi)?;
    Ok(ac2(setting, &c.phi, &c.vars, &c.values, c.contrast.as_deref()).map(|(w, xp)| witness(setting, &c.vars, &w, &xp)))
}

pub fn is_actual_cause(setting: &Setting, cand: &CandidateCause, phi: &BoolFormula) -> Result<CauseVerdict> {
    let c = prepare(setting, cand, phi)?;
    let holds_ac1 = ac1(setting, &c.phi, &c.vars, &c.values);
    let found = ac2(setting, &c.phi, &c.vars, &c.values, c.contrast.as_deref());
    let is_but_for = found.as_ref().is_some_and(|(w, _)| w.is_empty());
    let ac2_witness = found.map(|(w, xp)| witness(setting, &c.vars, &w, &xp));

    let positions: Vec<usize> = (0..c.vars.len()).collect();
    let ac3_violation = subsets::by_size(&positions, c.vars.len().saturating_sub(1))
        .filter(|sub| !sub.is_empty())
        .find(|sub| {
            let vars: Vec<usize> = sub.iter().map(|&p| c.vars[p]).collect();
            let values: Vec<Value> = sub.iter().map(|&p| c.values[p].clone()).collect();
            let contrast: Option<Vec<Value>> = c.contrast.as_ref().map(|x| sub.iter().map(|&p| x[p].clone()).collect());
            ac1(setting, &c.phi, &vars, &values) && ac2(setting, &c.phi, &vars, &values, contrast.as_deref()).is_some()
        })
        .map(|sub| cand.conjunction.restrict(&sub));
    let ac3 = ac3_violation.is_none();

    Ok(CauseVerdict {
        ac1: holds_ac1,
        is_cause: holds_ac1 && ac2_witness.is_some() && ac3,
        ac2: ac2_witness,
        ac3,
        ac3_violation,
        is_but_for,
    })
}

/// Contrast-free cause tests at actual values for one setting, memoising
/// AC2 per variable set.
pub(crate) struct CauseTester<'a> {
    setting: &'a Setting,
    phi: CompiledFormula,
    phi_holds: bool,
    ac2: RefCell<HashMap<Vec<usize>, bool>>,
}

impl<'a> CauseTester<'a> {
    pub(crate) fn new(setting: &'a Setting, phi: &BoolFormula) -> Result<Self> {
        let phi = phi.compile(setting.signature())?;
        let phi_holds = phi.eval(setting.actual_values());
        Ok(CauseTester { setting, phi, phi_holds, ac2: RefCell::new(HashMap::new()) })
    }

    pub(crate) fn phi_holds(&self) -> bool {
        self.phi_holds
    }

    fn ac2(&self, vars: &[usize]) -> bool {
        if let Some(&b) = self.ac2.borrow().get(vars) {
            return b;
        }
        let off = self.setting.signature().endo_offset();
        let values: Vec<Value> = vars.iter().map(|&i| self.setting.actual_values()[off + i].clone()).collect();
        let b = ac2(self.setting, &self.phi, vars, &values, None).is_some();
        self.ac2.borrow_mut().insert(vars.to_vec(), b);
        b
    }

    /// Whether the actual values of the sorted endogenous indices `vars`
    /// form an actual cause of phi.
    pub(crate) fn is_cause(&self, vars: &[usize]) -> bool {
        if !self.phi_holds || vars.is_empty() || !self.ac2(vars) {
            return false;
        }
        subsets::by_size(vars, vars.len() - 1).filter(|s| !s.is_empty()).all(|s| !self.ac2(&s))
    }

    pub(crate) fn conjunction(&self, vars: &[usize]) -> Conjunction {
        let sig = self.setting.signature();
        let off = sig.endo_offset();
        let events = vars
            .iter()
            .map(|&i| PrimitiveEvent::new(sig.endogenous()[i].name.clone(), self.setting.actual_values()[off + i].clone()))
            .collect();
        Conjunction::new(events).expect("distinct indices")
    }
}

/// All contrast-free actual causes of `phi` of size at most `max_size`
/// (default: every endogenous variable), ordered by size and then by
/// declaration order of their variables.
pub fn find_actual_causes(setting: &Setting, phi: &BoolFormula, max_size: Option<usize>) -> Result<Vec<CandidateCause>> {
    let tester = CauseTester::new(setting, phi)?;
    if !tester.phi_holds() {
        return Ok(Vec::new());
    }
    let n_endo = setting.signature().endogenous().len();
    let all: Vec<usize> = (0..n_endo).collect();
    let max = max_size.unwrap_or(n_endo);
    Ok(subsets::by_size(&all, max)
        .filter(|vars| tester.is_cause(vars))
        .map(|vars| CandidateCause { conjunction: tester.conjunction(&vars), contrast: None })
        .collect())
}
